#include "fuelgeo/export.hpp"

#include <cmath>

#include <json.hpp>

#include "fuelgeo/error.hpp"
#include "fuelgeo/text.hpp"

namespace fuelgeo {

namespace {

using Json = nlohmann::ordered_json;

void check_shapes(const GwrFit& fit, std::span<const std::string> ids, std::span<const GeoPoint> points) {
    const auto n = fit.n();
    if (ids.size() != n || points.size() != n) {
        throw Error(ErrorKind::InvalidArgument, "export: ids and points must match the fit's location count");
    }
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string joined(const std::vector<std::string>& names, char sep) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += sep;
        out += names[i];
    }
    return out;
}

} // namespace

void write_gwr_csv(const GwrFit& fit, std::span<const std::string> ids, std::span<const GeoPoint> points,
                   std::ostream& out) {
    check_shapes(fit, ids, points);
    out << "id,lat,lon";
    for (const auto& name : fit.coefficient_names) out << ",beta_" << name;
    for (const auto& name : fit.coefficient_names) out << ",beta_" << name << "_norm";
    out << ",local_r2,residual\n";
    const auto p = static_cast<Eigen::Index>(fit.parameters());
    for (std::size_t i = 0; i < fit.n(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out << csv_escape(ids[i]) << ',' << format_number(points[i].lat()) << ',' << format_number(points[i].lon());
        for (Eigen::Index j = 0; j < p; ++j) out << ',' << format_number(fit.local_coefficients(r, j));
        for (Eigen::Index j = 0; j < p; ++j) out << ',' << format_number(fit.normalized_coefficients(r, j));
        out << ',' << format_number(fit.local_r2(r)) << ',' << format_number(fit.residuals(r)) << '\n';
    }
}

void write_gwr_geojson(const GwrFit& fit, std::span<const std::string> ids, std::span<const GeoPoint> points,
                       std::ostream& out, const PolygonMap* polygons) {
    check_shapes(fit, ids, points);
    Json features = Json::array();
    const auto p = static_cast<Eigen::Index>(fit.parameters());
    for (std::size_t i = 0; i < fit.n(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        Json props;
        props["id"] = ids[i];
        for (Eigen::Index j = 0; j < p; ++j) {
            props["beta_" + fit.coefficient_names[static_cast<std::size_t>(j)]] = number(fit.local_coefficients(r, j));
        }
        for (Eigen::Index j = 0; j < p; ++j) {
            props["beta_" + fit.coefficient_names[static_cast<std::size_t>(j)] + "_norm"] =
                number(fit.normalized_coefficients(r, j));
        }
        props["local_r2"] = number(fit.local_r2(r));
        props["residual"] = number(fit.residuals(r));

        Json geometry;
        const auto poly = polygons ? polygons->find(ids[i]) : PolygonMap::const_iterator{};
        if (polygons && poly != polygons->end()) {
            Json rings = Json::array();
            for (const auto& ring : poly->second) {
                Json coords = Json::array();
                for (const auto& [lon, lat] : ring) coords.push_back(Json::array({lon, lat}));
                rings.push_back(std::move(coords));
            }
            geometry["type"] = "Polygon";
            geometry["coordinates"] = std::move(rings);
        } else {
            geometry["type"] = "Point";
            geometry["coordinates"] = Json::array({points[i].lon(), points[i].lat()});
        }

        Json feature;
        feature["type"] = "Feature";
        feature["geometry"] = std::move(geometry);
        feature["properties"] = std::move(props);
        features.push_back(std::move(feature));
    }
    Json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = std::move(features);
    out << doc.dump(1) << '\n';
}

void write_model_report_csv(const ModelSelectionReport& report, std::ostream& out) {
    out << "rank,covariates,kernel,bandwidth_mode,bandwidth,criterion,criterion_score,aicc,aicc_gap,cv_score,"
           "global_r2,hat_trace,status\n";
    const auto ranking = report.ranking();
    const double best = ranking.empty() ? 0.0 : *report.entries[ranking.front()].aicc;
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    auto row = [&](std::size_t rank, const ModelEntry& e) {
        out << (rank ? std::to_string(rank) : std::string()) << ',' << csv_escape(joined(e.covariates, ';')) << ','
            << to_string(e.kernel) << ','
            << (report.mode == BandwidthMode::AdaptiveKnn ? "adaptive" : "fixed") << ','
            << (e.bandwidth ? format_number(e.bandwidth->value()) : std::string()) << ','
            << to_string(report.criterion) << ',' << (e.ok ? format_number(e.criterion_score) : std::string())
            << ',' << opt(e.aicc) << ',' << (e.ok && e.aicc ? format_number(*e.aicc - best) : std::string())
            << ',' << opt(e.cv_score) << ',' << (e.ok ? format_number(e.global_r2) : std::string()) << ','
            << (e.ok ? format_number(e.hat_trace) : std::string()) << ','
            << csv_escape(e.ok ? std::string("ok") : "failed: " + e.failure) << '\n';
    };
    for (std::size_t r = 0; r < ranking.size(); ++r) row(r + 1, report.entries[ranking[r]]);
    for (const auto& e : report.entries) {
        if (!e.ok) row(0, e);
    }
}

void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
    out << "window_start,window_kind,d0_km,moran_i,n,sum_weights\n";
    for (const auto& r : sweep.rows) {
        const std::chrono::year_month_day ymd{r.window ? r.window->start : Day{}};
        char date[16];
        std::snprintf(date, sizeof date, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
        out << (r.window ? date : "") << ',' << (r.window ? to_string(r.window->kind) : "") << ','
            << (r.d0 ? format_number(*r.d0) : std::string()) << ',' << format_number(r.index) << ',' << r.n << ','
            << format_number(r.sum_weights) << '\n';
    }
}

} // namespace fuelgeo
