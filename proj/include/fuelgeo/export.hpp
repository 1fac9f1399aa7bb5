#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fuelgeo/gwr.hpp"
#include "fuelgeo/spatial_stats.hpp"

namespace fuelgeo {

/// One row per location: id, lat, lon, raw and normalized coefficients,
/// local_r2, residual.
void write_gwr_csv(const GwrFit& fit, std::span<const std::string> ids, std::span<const GeoPoint> points,
                   std::ostream& out);

/// Polygon rings (lon, lat pairs) keyed by location id. Locations without a
/// polygon are written as points.
using PolygonMap = std::map<std::string, std::vector<std::vector<std::pair<double, double>>>>;

void write_gwr_geojson(const GwrFit& fit, std::span<const std::string> ids, std::span<const GeoPoint> points,
                       std::ostream& out, const PolygonMap* polygons = nullptr);

/// Ranked by AICc; failed configurations follow with their reason.
void write_model_report_csv(const ModelSelectionReport& report, std::ostream& out);

void write_sweep_csv(const SweepResult& sweep, std::ostream& out);

} // namespace fuelgeo
