#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "fuelgeo/cli.hpp"
#include "fuelgeo/error.hpp"
#include "fuelgeo/export.hpp"
#include "fuelgeo/ingest/collector.hpp"
#include "fuelgeo/ingest/proxy_pool.hpp"
#include "fuelgeo/ingest/source.hpp"
#include "fuelgeo/ingest/store.hpp"
#include "fuelgeo/summary.hpp"
#include "fuelgeo/synth.hpp"
#include "fuelgeo/text.hpp"

namespace fuelgeo::cli {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

// Validation failures map to exit code 1; everything else is a runtime error.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const std::optional<fs::path>& p, const std::string& key) {
    if (!p) throw ValidationError("missing required setting '" + key + "'");
    if (!fs::is_regular_file(*p)) throw ValidationError(key + ": no such file " + p->string());
}

class Run {
public:
    Run(std::string command, RunConfig cfg) : command_(std::move(command)), cfg_(std::move(cfg)) {}

    const RunConfig& cfg() const noexcept { return cfg_; }
    fs::path path(const std::string& name) const { return cfg_.out / name; }

    template <class F>
    void artifact(const std::string& name, F&& write) {
        std::ofstream out(path(name), std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + path(name).string());
        write(out);
        out.close();
        if (!out) throw Error(ErrorKind::Io, "write failed for " + path(name).string());
        artifacts_.push_back(name);
    }

    void record_external(const fs::path& p, const std::string& name) { external_.emplace_back(name, p); }

    void write_manifest() const {
        const fs::path manifest = path("run_manifest.json");
        Json doc = Json::object();
        if (std::ifstream in(manifest); in) {
            try {
                in >> doc;
            } catch (const std::exception&) {
                doc = Json::object();
            }
        }
        Json entry;
        entry["seed"] = cfg_.seed;
        entry["config"] = cfg_.effective;
        Json sums = Json::object();
        for (const auto& name : artifacts_) sums[name] = sha256_file(path(name));
        for (const auto& [name, p] : external_) {
            if (fs::is_regular_file(p)) sums[name] = sha256_file(p);
        }
        entry["artifacts"] = std::move(sums);
        doc["tool"] = "fuelgeo";
        doc["version"] = "0.1.0";
        doc["commands"][command_] = std::move(entry);
        std::ofstream(manifest, std::ios::binary | std::ios::trunc) << doc.dump(2) << '\n';
    }

private:
    std::string command_;
    RunConfig cfg_;
    std::vector<std::string> artifacts_;
    std::vector<std::pair<std::string, fs::path>> external_;
};

struct Inputs {
    ingest::StationRegistry registry;
    ingest::CovariateTable covariates;
    std::vector<ingest::PriceObservation> observations; // filtered, in period
    ingest::DailyPanel daily;
    std::vector<ingest::CountyAggregate> counties;
};

Inputs load_inputs(const RunConfig& cfg) {
    Inputs in;
    in.registry = ingest::load_station_registry(cfg.stations->string());
    if (cfg.covariates) in.covariates = ingest::load_covariate_table(cfg.covariates->string());
    const auto all = ingest::ObservationStore::load(cfg.store_path().string());
    for (auto& o : ingest::filter_observations(all, {ingest::PaymentMode::Credit, cfg.fuel})) {
        if (cfg.period.contains(o.day())) in.observations.push_back(std::move(o));
    }
    in.daily = ingest::aggregate_daily(in.observations, in.registry);
    if (!in.daily.orphan_stations.empty()) {
        std::cerr << "warning: " << in.daily.orphan_observations << " observations from "
                  << in.daily.orphan_stations.size() << " unknown stations skipped\n";
    }
    in.counties = ingest::aggregate_county(in.daily, in.registry, in.covariates, cfg.period, cfg.county_mean);
    return in;
}

void stats_row(std::ostream& out, const std::string& series, std::span<const double> v) {
    const auto s = ingest::descriptive_stats(v);
    out << series << ',' << s.n;
    for (double x : {s.mean, s.sd, s.p1, s.p10, s.p25, s.p50, s.p75, s.p90, s.p99, s.p99_over_p1}) {
        out << ',' << format_number(x);
    }
    out << '\n';
}

// ---------------------------------------------------------------- commands

int cmd_synth(Run& run) {
    const auto truth = synth::write_cli_fixture(run.cfg().seed, run.cfg().out);
    for (const char* name : {"stations.csv", "covariates.csv", "urls.txt", "fuelgeo.conf", "moran_pair.csv",
                             "moran_pair.conf", "truth.json"}) {
        run.record_external(run.path(name), name);
    }
    std::cout << "synthetic fixture: " << truth.counties << " counties, " << truth.stations << " stations, "
              << truth.records << " records in " << run.cfg().out.string() << '\n';
    return 0;
}

int cmd_ingest(Run& run) {
    const auto& cfg = run.cfg();
    ingest::CollectionPlan plan;
    std::ifstream urls(*cfg.urls);
    for (std::string line; std::getline(urls, line);) {
        const auto t = trim(line);
        if (!t.empty() && t.front() != '#') plan.urls.emplace_back(t);
    }
    plan.max_in_flight = cfg.max_in_flight;
    plan.retries = cfg.retries;
    plan.per_host_delay = std::chrono::milliseconds(cfg.per_host_delay_ms);

    ingest::SchemeRouter router;
    router.add("file", std::make_shared<ingest::FileSource>());
    router.add("http", std::make_shared<ingest::HttpSource>());
    std::optional<ingest::ProxyPool> pool;
    if (!cfg.proxies.empty()) pool.emplace(cfg.proxies);

    fs::create_directories(cfg.store_path().parent_path());
    ingest::ObservationStore store(cfg.store_path().string());
    ingest::CollectionReport report;
    int code = 0;
    try {
        report = ingest::run_collection(plan, router, pool ? &*pool : nullptr, store);
    } catch (const ingest::CollectionAborted& e) {
        report = e.report();
        std::cerr << "collection aborted: " << e.what() << '\n';
        code = 2;
    }
    run.artifact("ingest_report.csv", [&](std::ostream& out) {
        out << "metric,value\n";
        out << "urls," << report.fetched << "\npages_stored," << report.pages_stored << "\nfailed," << report.failed
            << "\nparsed," << report.parsed << "\nquarantined," << report.quarantined << "\nstored," << report.stored
            << "\nduplicates_dropped," << report.duplicates_dropped << "\nattempts," << report.attempts
            << "\nstore_size," << store.size() << "\naborted," << (report.aborted ? "true" : "false") << '\n';
    });
    run.artifact("ingest_failures.csv", [&](std::ostream& out) {
        out << "url,attempts,reason\n";
        for (const auto& f : report.failures) {
            out << csv_escape(f.url) << ',' << f.attempts << ',' << csv_escape(f.reason) << '\n';
        }
    });
    std::cout << "ingest: " << report.pages_stored << " pages stored, " << report.failed << " failed, "
              << report.stored << " new records, " << report.duplicates_dropped << " duplicates, peak in flight "
              << report.peak_in_flight << '\n';
    return code;
}

int cmd_stats(Run& run) {
    const auto& cfg = run.cfg();
    const Inputs in = load_inputs(cfg);
    if (in.daily.rows.empty()) throw Error(ErrorKind::EmptyInput, "no station-day prices after filtering");

    std::vector<double> obs_prices, day_prices;
    for (const auto& o : in.observations) obs_prices.push_back(o.price);
    for (const auto& r : in.daily.rows) day_prices.push_back(r.price);
    run.artifact("descriptive_stats.csv", [&](std::ostream& out) {
        out << "series,n,mean,sd,p1,p10,p25,p50,p75,p90,p99,p99_over_p1\n";
        stats_row(out, "observations", obs_prices);
        stats_row(out, "station_days", day_prices);
    });

    std::vector<std::string> by_station, by_county, by_state;
    for (const auto& r : in.daily.rows) {
        const auto* st = in.registry.find(r.station_id);
        by_station.push_back(st->station_id);
        by_county.push_back(st->county_fips);
        by_state.push_back(st->state_id);
    }
    run.artifact("variance_decomposition.csv", [&](std::ostream& out) {
        out << "grouping,n_groups,total,between,within,between_share,within_share\n";
        for (const auto& [name, labels] : {std::pair{"station", &by_station}, std::pair{"county", &by_county},
                                           std::pair{"state", &by_state}}) {
            const auto v = variance_decomposition(day_prices, std::span<const std::string>(*labels), name);
            const bool ok = v.total > 0.0;
            out << name << ',' << v.n_groups << ',' << format_number(v.total) << ',' << format_number(v.between)
                << ',' << format_number(v.within) << ',' << (ok ? format_number(v.between / v.total) : "") << ','
                << (ok ? format_number(v.within / v.total) : "") << '\n';
        }
    });

    // Rank persistence of station mean prices between the two halves of the period.
    Day first = in.daily.rows.front().day, last = first;
    for (const auto& r : in.daily.rows) {
        first = std::min(first, r.day);
        last = std::max(last, r.day);
    }
    const Day mid = first + std::chrono::days{((last - first).count() + 1) / 2};
    std::map<std::string, std::array<std::pair<double, std::size_t>, 2>> halves;
    for (const auto& r : in.daily.rows) {
        auto& h = halves[r.station_id][r.day < mid ? 0 : 1];
        h.first += r.price;
        h.second += 1;
    }
    std::vector<double> a, b;
    for (const auto& [id, h] : halves) {
        if (h[0].second && h[1].second) {
            a.push_back(h[0].first / static_cast<double>(h[0].second));
            b.push_back(h[1].first / static_cast<double>(h[1].second));
        }
    }
    run.artifact("persistence.csv", [&](std::ostream& out) {
        out << "first_start,first_end,second_start,second_end,n_stations,spearman,note\n";
        out << ingest::format_date(first) << ',' << ingest::format_date(mid - std::chrono::days{1}) << ','
            << ingest::format_date(mid) << ',' << ingest::format_date(last) << ',' << a.size() << ',';
        try {
            if (a.size() < 2) throw Error(ErrorKind::EmptyInput, "fewer than two stations in both halves");
            out << format_number(spearman_rank(a, b)) << ",\n";
        } catch (const Error& e) {
            out << ',' << csv_escape(e.what()) << '\n';
        }
    });

    if (cfg.covariates) {
        const auto data = ingest::to_gwr_data(in.counties, kGwrCovariates);
        run.artifact("pca.csv", [&](std::ostream& out) {
            out << "component,normalized_fraction,normalized_cumulative,raw_fraction\n";
            if (data.size() <= kGwrCovariates.size()) return;
            const auto norm = pca_variance_explained(data.covariates, true, data.covariate_names);
            const auto raw = pca_variance_explained(data.covariates, false, data.covariate_names);
            double cum = 0.0;
            for (std::size_t i = 0; i < norm.size(); ++i) {
                cum += norm[i];
                out << (i + 1) << ',' << format_number(norm[i]) << ',' << format_number(cum) << ','
                    << format_number(raw[i]) << '\n';
            }
        });
    }
    std::cout << "stats: " << in.observations.size() << " observations, " << in.daily.rows.size()
              << " station-days, " << in.counties.size() << " counties\n";
    return 0;
}

struct MoranInputs {
    std::vector<GeoPoint> locations;
    std::vector<PanelValue> panel;
};

MoranInputs read_panel_csv(const fs::path& path) {
    const CsvTable t = read_csv_file(path.string());
    const auto c_loc = t.require_column("location");
    const auto c_lat = t.require_column("lat");
    const auto c_lon = t.require_column("lon");
    const auto c_day = t.require_column("day");
    const auto c_val = t.require_column("value");
    MoranInputs m;
    std::map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const auto lat = parse_double(row[c_lat]);
        const auto lon = parse_double(row[c_lon]);
        const auto day = ingest::parse_date(trim(row[c_day]));
        const auto val = parse_double(row[c_val]);
        if (!lat || !lon || !day || !val) {
            throw Error(ErrorKind::Parse, path.string() + ": row " + std::to_string(r + 2) + ": malformed");
        }
        const std::string id(trim(row[c_loc]));
        auto [it, fresh] = index.emplace(id, m.locations.size());
        if (fresh) m.locations.emplace_back(*lat, *lon);
        m.panel.push_back({it->second, *day, *val});
    }
    return m;
}

int cmd_moran(Run& run) {
    const auto& cfg = run.cfg();
    MoranInputs m;
    if (cfg.panel) {
        m = read_panel_csv(*cfg.panel);
    } else {
        const Inputs in = load_inputs(cfg);
        auto cd = ingest::county_day_panel(in.daily, in.registry, in.counties);
        m.locations = std::move(cd.locations);
        m.panel = std::move(cd.values);
    }
    const SweepOptions options{cfg.moran_kernel, cfg.row_standardize, cfg.min_locations};
    const auto sweep = moran_sweep(m.locations, m.panel, cfg.window, cfg.d0_grid, options);
    run.artifact("moran_sweep.csv", [&](std::ostream& out) { write_sweep_csv(sweep, out); });
    run.artifact("moran_skipped.csv", [&](std::ostream& out) {
        out << "window_start,window_kind,d0_km,reason\n";
        for (const auto& s : sweep.skipped) {
            out << ingest::format_date(s.window.start) << ',' << to_string(s.window.kind) << ','
                << (s.d0 ? format_number(*s.d0) : std::string()) << ',' << csv_escape(s.reason) << '\n';
        }
    });
    std::cout << "moran: " << sweep.rows.size() << " cells, " << sweep.skipped.size() << " skipped\n";
    return 0;
}

PolygonMap load_polygons(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    PolygonMap out;
    for (const auto& f : doc.value("features", Json::array())) {
        const auto& props = f.value("properties", Json::object());
        std::string id;
        if (props.contains("county_fips")) id = props["county_fips"].get<std::string>();
        else if (props.contains("id")) id = props["id"].get<std::string>();
        else continue;
        const auto& g = f.value("geometry", Json::object());
        Json rings;
        if (g.value("type", "") == "Polygon") rings = g["coordinates"];
        else if (g.value("type", "") == "MultiPolygon" && !g["coordinates"].empty()) rings = g["coordinates"][0];
        else continue;
        auto& poly = out[id];
        for (const auto& ring : rings) {
            std::vector<std::pair<double, double>> r;
            for (const auto& pt : ring) r.emplace_back(pt[0].get<double>(), pt[1].get<double>());
            poly.push_back(std::move(r));
        }
    }
    return out;
}

int cmd_gwr(Run& run) {
    const auto& cfg = run.cfg();
    const Inputs in = load_inputs(cfg);
    GwrData data = ingest::to_gwr_data(in.counties, cfg.gwr_covariates);
    if (data.size() < cfg.gwr_covariates.size() + 3) {
        throw Error(ErrorKind::EmptyInput, "too few counties with complete GWR covariates: " +
                                               std::to_string(data.size()));
    }

    BandwidthSearchOptions search;
    search.transform = cfg.transform;
    GwrSpec spec;
    spec.transform = cfg.transform;
    std::string selection;

    if (cfg.enumerate_subsets) {
        EnumerateOptions options{cfg.bandwidth_mode, search, cfg.threads};
        const auto report = enumerate_models(data, cfg.gwr_covariates, cfg.kernels, cfg.criterion, options);
        run.artifact("gwr_models.csv", [&](std::ostream& out) { write_model_report_csv(report, out); });
        const auto& best = report.entries[report.best];
        spec.covariates = best.covariates;
        spec.kernel = best.kernel;
        spec.bandwidth = *best.bandwidth;
        selection = "enumerated " + std::to_string(report.entries.size()) + " configurations, " +
                    std::to_string(report.failed) + " failed, median AICc gap " +
                    format_number(report.median_aicc_gap);
    } else {
        spec.covariates = cfg.gwr_covariates;
        spec.kernel = cfg.kernels.front();
        if (cfg.bandwidth) {
            spec.bandwidth = *cfg.bandwidth;
            selection = "bandwidth from configuration";
        } else {
            const auto choice =
                optimize_bandwidth(data, spec.covariates, spec.kernel, cfg.criterion, cfg.bandwidth_mode, search);
            spec.bandwidth = choice.bandwidth;
            run.artifact("gwr_bandwidth_trace.csv", [&](std::ostream& out) {
                out << "bandwidth,score\n";
                for (const auto& [bw, score] : choice.trace) {
                    out << format_number(bw) << ',' << format_number(score) << '\n';
                }
            });
            selection = "golden-section search over [" + format_number(choice.lower) + ", " +
                        format_number(choice.upper) + "]";
        }
    }

    const GwrFit fit = gwr_fit(data, spec);
    std::optional<PolygonMap> polygons;
    if (cfg.polygons) polygons = load_polygons(*cfg.polygons);
    run.artifact("gwr_fit.csv", [&](std::ostream& out) { write_gwr_csv(fit, data.ids, data.points, out); });
    run.artifact("gwr_fit.geojson", [&](std::ostream& out) {
        write_gwr_geojson(fit, data.ids, data.points, out, polygons ? &*polygons : nullptr);
    });

    std::size_t above = 0;
    for (Eigen::Index i = 0; i < fit.local_r2.size(); ++i) above += fit.local_r2(i) > cfg.local_r2_threshold;
    const std::size_t nn_k =
        std::min<std::size_t>(spec.bandwidth.is_adaptive() ? spec.bandwidth.neighbors() : 22, data.size() - 1);
    const auto scale = nearest_neighbor_scale(data.points, nn_k);
    std::string covs;
    for (const auto& c : spec.covariates) covs += (covs.empty() ? "" : ";") + c;
    run.artifact("gwr_summary.csv", [&](std::ostream& out) {
        auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
        out << "key,value\n"
            << "n," << fit.n() << '\n'
            << "covariates," << covs << '\n'
            << "kernel," << to_string(spec.kernel) << '\n'
            << "bandwidth," << csv_escape(spec.bandwidth.describe()) << '\n'
            << "criterion," << to_string(cfg.criterion) << '\n'
            << "selection," << csv_escape(selection) << '\n'
            << "aicc," << opt(fit.aicc) << '\n'
            << "cv_score," << opt(fit.cv_score) << '\n'
            << "global_r2," << format_number(fit.global_r2) << '\n'
            << "hat_trace," << format_number(fit.hat_trace) << '\n'
            << "rss," << format_number(fit.rss) << '\n'
            << "local_r2_threshold," << format_number(cfg.local_r2_threshold) << '\n'
            << "share_local_r2_above," << format_number(static_cast<double>(above) / static_cast<double>(fit.n()))
            << '\n'
            << "nn_k," << nn_k << '\n'
            << "nn_median_km," << format_number(scale.median) << '\n'
            << "nn_interquartile_km," << format_number(scale.interquartile) << '\n';
    });
    std::cout << "gwr: " << covs << ", " << to_string(spec.kernel) << ", " << spec.bandwidth.describe()
              << ", global R2 " << format_number(fit.global_r2) << '\n';
    return 0;
}

int cmd_fe(Run& run) {
    const auto& cfg = run.cfg();
    const Inputs in = load_inputs(cfg);
    const auto panel = ingest::to_panel_observations(in.daily, in.registry);

    std::vector<FeLevel> levels;
    if (cfg.fe_level) levels = {*cfg.fe_level};
    else levels = {FeLevel::State, FeLevel::County, FeLevel::Station};
    run.artifact("fe_variance.csv", [&](std::ostream& out) {
        out << "level,day_effect,r_squared,n_groups,n_observations,iterations,note\n";
        for (const auto level : levels) {
            for (const bool day : {false, true}) {
                out << to_string(level) << ',' << (day ? "true" : "false") << ',';
                try {
                    const auto r = fe_variance_explained(panel, {level, day});
                    out << format_number(r.r_squared) << ',' << r.n_groups << ',' << r.n_observations << ','
                        << r.iterations << ",\n";
                } catch (const Error& e) {
                    out << ",,,," << csv_escape(e.what()) << '\n';
                }
            }
        }
    });

    const auto rows = ingest::to_county_model_rows(in.counties);
    std::vector<FeFit> fits;
    std::vector<std::string> failures;
    for (std::size_t m = 0; m < cfg.fe_models.size(); ++m) {
        try {
            fits.push_back(county_regression(rows, cfg.fe_models[m]));
        } catch (const Error& e) {
            failures.push_back("model " + std::to_string(m + 1) + ": " + e.what());
        }
    }
    if (fits.empty()) {
        throw Error(ErrorKind::EmptyReport, "every county regression failed" +
                                                (failures.empty() ? std::string() : ": " + failures.front()));
    }
    const auto labels = default_table_labels();
    run.artifact("regression_table.txt", [&](std::ostream& out) {
        render_regression_table(fits, out, labels);
        for (const auto& f : failures) out << "Skipped " << f << '\n';
    });
    run.artifact("regression_table.csv", [&](std::ostream& out) { render_regression_csv(fits, out, labels); });
    std::cout << "fe: " << fits.size() << " county regressions on " << rows.size() << " counties";
    if (!failures.empty()) std::cout << ", " << failures.size() << " skipped";
    std::cout << '\n';
    return 0;
}

int cmd_report(Run& run) {
    struct Expected {
        const char* name;
        const char* producer;
        bool optional;
    };
    static const Expected expected[] = {
        {"ingest_report.csv", "ingest", false},        {"ingest_failures.csv", "ingest", false},
        {"descriptive_stats.csv", "stats", false},     {"variance_decomposition.csv", "stats", false},
        {"persistence.csv", "stats", false},           {"pca.csv", "stats", true},
        {"moran_sweep.csv", "moran", false},           {"moran_skipped.csv", "moran", false},
        {"gwr_models.csv", "gwr", true},               {"gwr_bandwidth_trace.csv", "gwr", true},
        {"gwr_summary.csv", "gwr", false},             {"gwr_fit.csv", "gwr", false},
        {"gwr_fit.geojson", "gwr", false},             {"fe_variance.csv", "fe", false},
        {"regression_table.txt", "fe", false},         {"regression_table.csv", "fe", false},
    };
    std::vector<std::string> gaps;
    std::ostringstream body;
    for (const auto& e : expected) {
        const fs::path p = run.path(e.name);
        std::ifstream in(p, std::ios::binary);
        if (!in) {
            if (!e.optional) gaps.push_back(std::string(e.name) + " (from `" + e.producer + "`)");
            continue;
        }
        std::ostringstream content;
        content << in.rdbuf();
        const std::string text = content.str();
        const auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
        body << "## " << e.name << "\n\n";
        if (lines <= 40 && std::string_view(e.name).find(".geojson") == std::string_view::npos) {
            body << "```\n" << text << (text.empty() || text.back() == '\n' ? "" : "\n") << "```\n\n";
        } else {
            body << lines << " lines, sha256 " << sha256_file(p) << "\n\n";
        }
    }
    run.artifact("report.md", [&](std::ostream& out) {
        out << "# fuelgeo run report\n\n";
        if (gaps.empty()) {
            out << "All expected artifacts are present.\n\n";
        } else {
            out << "## Gaps\n\n";
            for (const auto& g : gaps) out << "- missing " << g << '\n';
            out << '\n';
        }
        out << body.str();
    });
    std::cout << "report: " << gaps.size() << " gaps\n";
    for (const auto& g : gaps) std::cout << "  missing " << g << '\n';
    return 0;
}

} // namespace

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::Io, "sha256 unavailable");
    }
    char buf[1 << 15];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

int execute(const std::vector<std::string>& args) {
    CLI::App app{"Spatial fuel-price analysis: ingestion, spatial statistics, GWR and fixed-effect models"};
    app.name(args.empty() ? "fuelgeo" : fs::path(args.front()).filename().string());
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    std::map<std::string, std::string> flags;
    std::vector<std::string> sets;
    auto flag = [&](const std::string& opt, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(opt, [&flags, key](const std::string& v) { flags[key] = v; }, help);
    };
    app.add_option("--config", config_path, "Flat key = value configuration file");
    flag("--out", "out", "Output directory");
    flag("--seed", "seed", "Seed for synthetic generators");
    flag("--fuel", "fuel", "Fuel type (regular, diesel, midgrade, premium, all)");
    flag("--d0-grid", "d0_grid", "Comma-separated decay distances in km");
    flag("--kernel", "kernel", "Kernel name or all");
    flag("--criterion", "criterion", "Bandwidth criterion: aicc or cv");
    flag("--fe-level", "fe_level", "Fixed-effect level: state, county, station or all");
    app.add_option("--set", sets, "Override any configuration key (key=value)");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"ingest", "Collect price pages into the observation store"},
        {"stats", "Descriptive statistics, variance decompositions, persistence, PCA"},
        {"moran", "Moran index sweep over time windows and decay distances"},
        {"gwr", "Geographically weighted regression with model and bandwidth selection"},
        {"fe", "Fixed-effect variance shares and county regressions"},
        {"report", "Summarize the artifacts of a run directory"},
        {"synth", "Write a synthetic input fixture"}};
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        Settings settings;
        if (!config_path.empty()) settings = load_config_file(config_path);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + s + "'");
            flags[std::string(trim(std::string_view(s).substr(0, eq)))] = std::string(trim(std::string_view(s).substr(eq + 1)));
        }
        for (const auto& [k, v] : flags) settings[k] = Setting{v, {}};
        cfg = resolve_config(settings);

        if (command == "ingest") {
            require_file(cfg.urls, "urls");
        } else if (command == "stats" || command == "moran" || command == "gwr" || command == "fe") {
            if (!(command == "moran" && cfg.panel)) {
                require_file(cfg.stations, "stations");
                if (!fs::is_regular_file(cfg.store_path())) {
                    throw ValidationError("observation store " + cfg.store_path().string() +
                                          " does not exist; run `ingest` first");
                }
            } else {
                require_file(cfg.panel, "panel");
            }
            if (command == "gwr" || command == "fe") require_file(cfg.covariates, "covariates");
            if (cfg.covariates) require_file(cfg.covariates, "covariates");
            if (cfg.polygons) require_file(cfg.polygons, "polygons");
        }
        std::error_code ec;
        fs::create_directories(cfg.out, ec);
        if (ec || !fs::is_directory(cfg.out)) throw ValidationError("cannot create output directory " + cfg.out.string());
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    Run run(command, cfg);
    try {
        int code = 0;
        if (command == "synth") code = cmd_synth(run);
        else if (command == "ingest") code = cmd_ingest(run);
        else if (command == "stats") code = cmd_stats(run);
        else if (command == "moran") code = cmd_moran(run);
        else if (command == "gwr") code = cmd_gwr(run);
        else if (command == "fe") code = cmd_fe(run);
        else if (command == "report") code = cmd_report(run);
        run.write_manifest();
        return code;
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

int execute(int argc, const char* const* argv) {
    std::vector<std::string> args(argv, argv + argc);
    return execute(args);
}

} // namespace fuelgeo::cli
