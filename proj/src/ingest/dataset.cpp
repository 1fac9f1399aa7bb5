#include "fuelgeo/ingest/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fuelgeo/error.hpp"
#include "fuelgeo/summary.hpp"
#include "fuelgeo/text.hpp"

namespace fuelgeo::ingest {

namespace {

// Order-independent mean: sums the sorted values.
double stable_mean(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

} // namespace

StationRegistry::StationRegistry(std::vector<Station> stations) : stations_(std::move(stations)) {
    for (std::size_t i = 0; i < stations_.size(); ++i) {
        stations_[i].validate();
        if (!index_.emplace(stations_[i].station_id, i).second) {
            throw Error(ErrorKind::DuplicateKey, "duplicate station id " + stations_[i].station_id);
        }
    }
}

const Station* StationRegistry::find(const std::string& id) const {
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &stations_[it->second];
}

StationRegistry load_station_registry(const std::string& path) {
    const CsvTable t = read_csv_file(path);
    const auto c_id = t.require_column("station_id");
    const auto c_lat = t.require_column("lat");
    const auto c_lon = t.require_column("lon");
    const auto c_city = t.require_column("city");
    const auto c_fips = t.require_column("county_fips");
    const auto c_state = t.require_column("state_id");
    std::vector<Station> stations;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const auto lat = parse_double(row[c_lat]);
        const auto lon = parse_double(row[c_lon]);
        if (!lat || !lon) {
            throw Error(ErrorKind::Parse, path + ": row " + std::to_string(r + 2) + ": bad coordinates");
        }
        stations.push_back({std::string(trim(row[c_id])), GeoPoint(*lat, *lon), row[c_city],
                            std::string(trim(row[c_fips])), std::string(trim(row[c_state]))});
    }
    return StationRegistry(std::move(stations));
}

void write_station_registry(const StationRegistry& registry, std::ostream& out) {
    out << "station_id,lat,lon,city,county_fips,state_id\n";
    for (const auto& s : registry.stations()) {
        out << csv_escape(s.station_id) << ',' << format_number(s.point.lat()) << ','
            << format_number(s.point.lon()) << ',' << csv_escape(s.city) << ',' << s.county_fips << ','
            << s.state_id << '\n';
    }
}

CovariateTable::CovariateTable(std::vector<CountyRecord> records, std::vector<std::string> columns)
    : columns_(std::move(columns)) {
    for (auto& r : records) {
        const std::string fips = r.county_fips;
        if (!records_.emplace(fips, std::move(r)).second) {
            throw Error(ErrorKind::DuplicateKey, "duplicate county_fips " + fips + " in covariate table");
        }
    }
}

const CountyRecord* CovariateTable::find(const std::string& fips) const {
    const auto it = records_.find(fips);
    return it == records_.end() ? nullptr : &it->second;
}

CovariateTable load_covariate_table(const std::string& path) {
    const CsvTable t = read_csv_file(path);
    const auto c_fips = t.require_column("county_fips");
    const auto c_state = t.column("state_id");
    const auto c_lat = t.column("lat");
    const auto c_lon = t.column("lon");
    std::vector<std::size_t> numeric;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (c == c_fips || c == c_state || c == c_lat || c == c_lon) continue;
        numeric.push_back(c);
        names.push_back(t.header[c]);
    }
    std::vector<CountyRecord> records;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        CountyRecord rec;
        rec.county_fips = std::string(trim(row[c_fips]));
        if (c_state && !trim(row[*c_state]).empty()) rec.state_id = std::string(trim(row[*c_state]));
        if (c_lat && c_lon) {
            const auto lat = parse_double(row[*c_lat]);
            const auto lon = parse_double(row[*c_lon]);
            if (lat && lon) rec.centroid = GeoPoint(*lat, *lon);
        }
        for (std::size_t k = 0; k < numeric.size(); ++k) {
            const std::string_view cell = trim(row[numeric[k]]);
            if (cell.empty() || cell == "NA") {
                rec.complete = false;
                continue;
            }
            const auto v = parse_double(cell);
            if (!v) {
                throw Error(ErrorKind::Parse, path + ": row " + std::to_string(r + 2) + ": column " + names[k] +
                                                  " is not numeric");
            }
            rec.values[names[k]] = *v;
        }
        records.push_back(std::move(rec));
    }
    return CovariateTable(std::move(records), std::move(names));
}

std::vector<PriceObservation> filter_observations(std::span<const PriceObservation> obs,
                                                  const FilterOptions& options) {
    std::vector<PriceObservation> out;
    for (const auto& o : obs) {
        if (o.payment_mode != options.payment_mode) continue;
        if (options.fuel_type && o.fuel_type != *options.fuel_type) continue;
        out.push_back(o);
    }
    return out;
}

DailyPanel aggregate_daily(std::span<const PriceObservation> obs, const StationRegistry& stations) {
    std::map<std::pair<std::string, Day>, std::vector<double>> cells;
    std::set<std::string> orphans;
    DailyPanel panel;
    for (const auto& o : obs) {
        if (!stations.find(o.station_id)) {
            orphans.insert(o.station_id);
            panel.orphan_observations += 1;
            continue;
        }
        cells[{o.station_id, o.day()}].push_back(o.price);
    }
    panel.rows.reserve(cells.size());
    for (auto& [key, prices] : cells) {
        const std::size_t count = prices.size();
        panel.rows.push_back({key.first, key.second, stable_mean(prices), count});
    }
    panel.orphan_stations.assign(orphans.begin(), orphans.end());
    return panel;
}

std::vector<CountyAggregate> aggregate_county(const DailyPanel& panel, const StationRegistry& stations,
                                              const CovariateTable& covariates, const Period& period,
                                              CountyMeanMode mode) {
    struct Acc {
        std::string state;
        std::map<std::string, std::vector<double>> by_station;
        std::size_t rows = 0;
        Day first = Day::max();
        Day last = Day::min();
        double lat_sum = 0.0;
        double lon_sum = 0.0;
    };
    std::map<std::string, Acc> counties;
    for (const auto& row : panel.rows) {
        if (!period.contains(row.day)) continue;
        const Station* st = stations.find(row.station_id);
        if (!st) continue;
        Acc& acc = counties[st->county_fips];
        acc.state = st->state_id;
        acc.by_station[row.station_id].push_back(row.price);
        acc.rows += 1;
        acc.first = std::min(acc.first, row.day);
        acc.last = std::max(acc.last, row.day);
    }

    std::vector<CountyAggregate> out;
    for (auto& [fips, acc] : counties) {
        CountyAggregate agg;
        agg.county_fips = fips;
        agg.state_id = acc.state;
        agg.period_first = period.first.value_or(acc.first);
        agg.period_last = period.last.value_or(acc.last);
        agg.n_observations = acc.rows;
        agg.n_stations = acc.by_station.size();

        std::vector<double> means;
        std::vector<double> all;
        double lat = 0.0, lon = 0.0;
        for (auto& [sid, prices] : acc.by_station) {
            all.insert(all.end(), prices.begin(), prices.end());
            means.push_back(stable_mean(prices));
            const Station* st = stations.find(sid);
            lat += st->point.lat();
            lon += st->point.lon();
        }
        agg.mean_price = mode == CountyMeanMode::StationDays ? stable_mean(all) : stable_mean(means);

        const CountyRecord* rec = covariates.find(fips);
        if (rec && rec->centroid) {
            agg.point = *rec->centroid;
        } else {
            const double k = static_cast<double>(acc.by_station.size());
            agg.point = GeoPoint(lat / k, lon / k);
        }
        if (rec) {
            agg.covariates = rec->values;
            agg.complete = rec->complete;
        }
        out.push_back(std::move(agg));
    }
    return out;
}

DescriptiveStats descriptive_stats(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorKind::EmptyInput, "descriptive statistics of an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    DescriptiveStats s;
    s.n = sorted.size();
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    s.p1 = quantile_sorted(sorted, 0.01);
    s.p10 = quantile_sorted(sorted, 0.10);
    s.p25 = quantile_sorted(sorted, 0.25);
    s.p50 = quantile_sorted(sorted, 0.50);
    s.p75 = quantile_sorted(sorted, 0.75);
    s.p90 = quantile_sorted(sorted, 0.90);
    s.p99 = quantile_sorted(sorted, 0.99);
    s.p99_over_p1 = s.p1 != 0.0 ? s.p99 / s.p1 : std::nan("");
    return s;
}

std::vector<PanelObservation> to_panel_observations(const DailyPanel& panel, const StationRegistry& stations) {
    std::vector<PanelObservation> out;
    out.reserve(panel.rows.size());
    for (const auto& row : panel.rows) {
        const Station* st = stations.find(row.station_id);
        if (!st) continue;
        out.push_back({row.station_id, st->state_id, st->county_fips, row.day, row.price});
    }
    return out;
}

std::vector<CountyModelRow> to_county_model_rows(std::span<const CountyAggregate> counties) {
    std::vector<CountyModelRow> rows;
    for (const auto& c : counties) {
        if (!c.complete || !(c.mean_price > 0.0)) continue;
        CountyModelRow row;
        row.county_fips = c.county_fips;
        row.state_id = c.state_id;
        row.log_mean_price = std::log(c.mean_price);
        for (const auto& name : CountyCovariates::names()) {
            if (const auto it = c.covariates.find(name); it != c.covariates.end()) row.covariates.set(name, it->second);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

GwrData to_gwr_data(std::span<const CountyAggregate> counties, std::span<const std::string> covariates) {
    std::vector<const CountyAggregate*> used;
    for (const auto& c : counties) {
        const bool has_all = std::all_of(covariates.begin(), covariates.end(),
                                         [&](const std::string& n) { return c.covariates.count(n) > 0; });
        if (has_all) used.push_back(&c);
    }
    GwrData data;
    data.covariate_names.assign(covariates.begin(), covariates.end());
    const auto n = static_cast<Eigen::Index>(used.size());
    data.covariates.resize(n, static_cast<Eigen::Index>(covariates.size()));
    data.response.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto* c = used[static_cast<std::size_t>(i)];
        data.ids.push_back(c->county_fips);
        data.points.push_back(c->point);
        data.response(i) = c->mean_price;
        for (std::size_t j = 0; j < covariates.size(); ++j) {
            data.covariates(i, static_cast<Eigen::Index>(j)) = c->covariates.at(covariates[j]);
        }
    }
    return data;
}

CountyDayPanel county_day_panel(const DailyPanel& panel, const StationRegistry& stations,
                                std::span<const CountyAggregate> counties) {
    CountyDayPanel out;
    std::map<std::string, std::size_t> index;
    for (const auto& c : counties) {
        index.emplace(c.county_fips, out.county_fips.size());
        out.county_fips.push_back(c.county_fips);
        out.locations.push_back(c.point);
    }
    std::map<std::pair<std::size_t, Day>, std::vector<double>> cells;
    for (const auto& row : panel.rows) {
        const Station* st = stations.find(row.station_id);
        if (!st) continue;
        const auto it = index.find(st->county_fips);
        if (it == index.end()) continue;
        cells[{it->second, row.day}].push_back(row.price);
    }
    for (auto& [key, prices] : cells) out.values.push_back({key.first, key.second, stable_mean(prices)});
    return out;
}

} // namespace fuelgeo::ingest
