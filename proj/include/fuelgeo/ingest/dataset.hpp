#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fuelgeo/econometrics.hpp"
#include "fuelgeo/gwr.hpp"
#include "fuelgeo/ingest/records.hpp"
#include "fuelgeo/spatial_stats.hpp"

namespace fuelgeo::ingest {

class StationRegistry {
public:
    StationRegistry() = default;
    /// Throws DuplicateKey on repeated station ids.
    explicit StationRegistry(std::vector<Station> stations);

    const Station* find(const std::string& id) const;
    const std::vector<Station>& stations() const noexcept { return stations_; }

private:
    std::vector<Station> stations_;
    std::map<std::string, std::size_t> index_;
};

/// CSV header `station_id,lat,lon,city,county_fips,state_id`.
StationRegistry load_station_registry(const std::string& path);
void write_station_registry(const StationRegistry& registry, std::ostream& out);

struct CountyRecord {
    std::string county_fips;
    std::optional<std::string> state_id;
    std::optional<GeoPoint> centroid;
    std::map<std::string, double> values; // numeric covariates present for this county
    bool complete = true;                 // every covariate column had a value
};

class CovariateTable {
public:
    CovariateTable() = default;
    /// Throws DuplicateKey on repeated county_fips.
    explicit CovariateTable(std::vector<CountyRecord> records, std::vector<std::string> columns = {});

    const CountyRecord* find(const std::string& fips) const;
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::map<std::string, CountyRecord>& records() const noexcept { return records_; }

private:
    std::map<std::string, CountyRecord> records_;
    std::vector<std::string> columns_;
};

/// CSV keyed by `county_fips`; optional `state_id`, `lat`, `lon`; every other
/// column is numeric, empty cells are missing.
CovariateTable load_covariate_table(const std::string& path);

struct FilterOptions {
    PaymentMode payment_mode = PaymentMode::Credit;
    std::optional<FuelType> fuel_type = FuelType::Regular;
};

std::vector<PriceObservation> filter_observations(std::span<const PriceObservation> obs,
                                                  const FilterOptions& options = {});

struct StationDay {
    std::string station_id;
    Day day;
    double price = 0.0;
    std::size_t n_observations = 0;
};

struct DailyPanel {
    std::vector<StationDay> rows; // sorted by (station_id, day)
    std::vector<std::string> orphan_stations;
    std::size_t orphan_observations = 0;
};

/// Mean price per (station, UTC day). Observations with an unknown
/// station are skipped and listed.
DailyPanel aggregate_daily(std::span<const PriceObservation> obs, const StationRegistry& stations);

struct Period {
    std::optional<Day> first;
    std::optional<Day> last; // inclusive

    bool contains(Day d) const noexcept { return (!first || d >= *first) && (!last || d <= *last); }
};

enum class CountyMeanMode { StationDays, StationMeans };

struct CountyAggregate {
    std::string county_fips;
    std::string state_id;
    Day period_first;
    Day period_last;
    double mean_price = 0.0;
    std::size_t n_observations = 0; // station-day rows
    std::size_t n_stations = 0;
    GeoPoint point{0.0, 0.0};
    std::map<std::string, double> covariates;
    bool complete = false;
};

/// County mean over station-day rows in the period. Counties without rows
/// are omitted; counties lacking covariates are kept but flagged incomplete.
std::vector<CountyAggregate> aggregate_county(const DailyPanel& panel, const StationRegistry& stations,
                                              const CovariateTable& covariates, const Period& period = {},
                                              CountyMeanMode mode = CountyMeanMode::StationDays);

struct DescriptiveStats {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double p1 = 0.0;
    double p10 = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double p90 = 0.0;
    double p99 = 0.0;
    double p99_over_p1 = 0.0;
};

DescriptiveStats descriptive_stats(std::span<const double> values);

std::vector<PanelObservation> to_panel_observations(const DailyPanel& panel, const StationRegistry& stations);

/// Complete counties only, as rows for the county regression.
std::vector<CountyModelRow> to_county_model_rows(std::span<const CountyAggregate> counties);

/// GWR design over counties that carry every requested covariate.
GwrData to_gwr_data(std::span<const CountyAggregate> counties, std::span<const std::string> covariates);

struct CountyDayPanel {
    std::vector<std::string> county_fips;
    std::vector<GeoPoint> locations;
    std::vector<PanelValue> values; // county-day mean prices
};

CountyDayPanel county_day_panel(const DailyPanel& panel, const StationRegistry& stations,
                                std::span<const CountyAggregate> counties);

} // namespace fuelgeo::ingest
