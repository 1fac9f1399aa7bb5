#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>

#include "fuelgeo/cli.hpp"
#include "fuelgeo/error.hpp"
#include "fuelgeo/ingest/records.hpp"
#include "fuelgeo/text.hpp"

namespace fuelgeo::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw Error(ErrorKind::Config, "config key '" + key + "': " + why);
}

std::vector<std::string> list_of(std::string_view value, char sep) {
    std::vector<std::string> out;
    for (auto part : split(value, sep)) {
        const auto t = trim(part);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::size_t to_count(const std::string& key, const std::string& v, std::size_t min = 0) {
    const auto d = parse_double(v);
    if (!d || *d < static_cast<double>(min) || *d != std::floor(*d) || *d > 1e12) {
        bad(key, "expected an integer >= " + std::to_string(min) + ", got '" + v + "'");
    }
    return static_cast<std::size_t>(*d);
}

double to_real(const std::string& key, const std::string& v) {
    const auto d = parse_double(v);
    if (!d || !std::isfinite(*d)) bad(key, "expected a number, got '" + v + "'");
    return *d;
}

bool to_bool(const std::string& key, std::string v) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad(key, "expected a boolean, got '" + v + "'");
}

std::string lower(std::string v) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    return v;
}

fs::path to_path(const Setting& s) {
    const fs::path p(s.value);
    return (p.is_absolute() || s.base.empty()) ? p : s.base / p;
}

Day to_day(const std::string& key, const std::string& v) {
    const auto d = ingest::parse_date(v);
    if (!d) bad(key, "expected YYYY-MM-DD, got '" + v + "'");
    return *d;
}

template <class F>
auto guarded(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        bad(key, e.what());
    }
}

} // namespace

Settings parse_config(std::istream& in, const fs::path& base) {
    Settings out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(body.substr(0, eq)));
        const std::string value(trim(body.substr(eq + 1)));
        if (key.empty()) throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": empty key");
        if (!out.emplace(key, Setting{value, base}).second) {
            throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": repeated key " + key);
        }
    }
    return out;
}

Settings load_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot read config file " + path.string());
    return parse_config(in, fs::absolute(path).parent_path());
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "out", "stations", "covariates", "store", "urls", "panel", "polygons", "proxies", "max_in_flight",
        "retries", "per_host_delay_ms", "fuel", "period_first", "period_last", "county_mean", "d0_grid",
        "window", "moran_kernel", "row_standardize", "min_locations", "gwr_covariates", "gwr_mode", "kernel",
        "criterion", "bandwidth_mode", "bandwidth", "response_transform", "local_r2_threshold", "fe_level",
        "cluster", "fe_models", "seed", "threads"};
    return keys;
}

std::vector<std::vector<std::string>> default_fe_models() {
    return {{},
            {"density"},
            {"density", "log_population", "log_total_income"},
            {"density", "log_population", "log_total_income", "unemployment", "poverty", "pct_black"},
            {"density", "log_population", "log_total_income", "unemployment", "poverty", "pct_black", "vote_gop"}};
}

RunConfig resolve_config(const Settings& settings) {
    const auto& keys = known_keys();
    for (const auto& [key, s] : settings) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) bad(key, "unknown key");
    }
    RunConfig cfg;
    cfg.fe_models = default_fe_models();
    auto get = [&](const std::string& key) -> const Setting* {
        const auto it = settings.find(key);
        return it == settings.end() ? nullptr : &it->second;
    };
    bool covariates_all = true;
    std::string gwr_mode = "auto";

    for (const auto& [key, s] : settings) {
        const std::string& v = s.value;
        cfg.effective[key] = v;
        if (key == "out") cfg.out = to_path(s);
        else if (key == "stations") cfg.stations = to_path(s);
        else if (key == "covariates") cfg.covariates = to_path(s);
        else if (key == "store") cfg.store = to_path(s);
        else if (key == "urls") cfg.urls = to_path(s);
        else if (key == "panel") cfg.panel = to_path(s);
        else if (key == "polygons") cfg.polygons = to_path(s);
        else if (key == "proxies") cfg.proxies = list_of(v, ',');
        else if (key == "max_in_flight") cfg.max_in_flight = to_count(key, v, 1);
        else if (key == "retries") cfg.retries = to_count(key, v);
        else if (key == "per_host_delay_ms") cfg.per_host_delay_ms = to_count(key, v);
        else if (key == "fuel") {
            if (lower(v) == "all") {
                cfg.fuel.reset();
            } else {
                cfg.fuel = ingest::parse_fuel_type(v);
                if (!cfg.fuel) bad(key, "unknown fuel type '" + v + "'");
            }
        } else if (key == "period_first") cfg.period.first = to_day(key, v);
        else if (key == "period_last") cfg.period.last = to_day(key, v);
        else if (key == "county_mean") {
            const auto m = lower(v);
            if (m == "station_days") cfg.county_mean = ingest::CountyMeanMode::StationDays;
            else if (m == "station_means") cfg.county_mean = ingest::CountyMeanMode::StationMeans;
            else bad(key, "expected station_days or station_means");
        } else if (key == "d0_grid") {
            cfg.d0_grid.clear();
            for (const auto& part : list_of(v, ',')) {
                const double d = to_real(key, part);
                if (!(d > 0.0)) bad(key, "decay distances must be positive");
                cfg.d0_grid.push_back(d);
            }
            if (cfg.d0_grid.empty()) bad(key, "empty grid");
        } else if (key == "window") cfg.window = guarded(key, [&] { return parse_window_kind(lower(v)); });
        else if (key == "moran_kernel") cfg.moran_kernel = guarded(key, [&] { return parse_kernel(lower(v)); });
        else if (key == "row_standardize") cfg.row_standardize = to_bool(key, v);
        else if (key == "min_locations") cfg.min_locations = to_count(key, v, 2);
        else if (key == "gwr_covariates") {
            if (lower(v) == "all") {
                cfg.gwr_covariates = kGwrCovariates;
            } else {
                covariates_all = false;
                cfg.gwr_covariates = list_of(v, ',');
                for (const auto& c : cfg.gwr_covariates) {
                    if (std::find(kGwrCovariates.begin(), kGwrCovariates.end(), c) == kGwrCovariates.end()) {
                        bad(key, "unknown covariate '" + c + "'");
                    }
                }
                std::set<std::string> uniq(cfg.gwr_covariates.begin(), cfg.gwr_covariates.end());
                if (uniq.size() != cfg.gwr_covariates.size()) bad(key, "repeated covariate");
                if (cfg.gwr_covariates.empty()) bad(key, "empty covariate list");
            }
        } else if (key == "gwr_mode") {
            gwr_mode = lower(v);
            if (gwr_mode != "auto" && gwr_mode != "enumerate" && gwr_mode != "single") {
                bad(key, "expected auto, enumerate or single");
            }
        } else if (key == "kernel") {
            if (lower(v) == "all") {
                cfg.kernels.assign(std::begin(kAllKernels), std::end(kAllKernels));
            } else {
                cfg.kernels.clear();
                for (const auto& part : list_of(v, ',')) {
                    cfg.kernels.push_back(guarded(key, [&] { return parse_kernel(lower(part)); }));
                }
                if (cfg.kernels.empty()) bad(key, "empty kernel list");
            }
        } else if (key == "criterion") cfg.criterion = guarded(key, [&] { return parse_criterion(lower(v)); });
        else if (key == "bandwidth_mode") {
            const auto m = lower(v);
            if (m == "adaptive") cfg.bandwidth_mode = BandwidthMode::AdaptiveKnn;
            else if (m == "fixed") cfg.bandwidth_mode = BandwidthMode::FixedDistance;
            else bad(key, "expected adaptive or fixed");
        } else if (key == "bandwidth") {
            const auto colon = v.find(':');
            if (colon == std::string::npos) bad(key, "expected adaptive:<k> or fixed:<km>");
            const auto mode = lower(std::string(trim(std::string_view(v).substr(0, colon))));
            const std::string num(trim(std::string_view(v).substr(colon + 1)));
            if (mode == "adaptive") {
                cfg.bandwidth = Bandwidth::adaptive(to_count(key, num, 1));
                cfg.bandwidth_mode = BandwidthMode::AdaptiveKnn;
            } else if (mode == "fixed") {
                cfg.bandwidth = guarded(key, [&] { return Bandwidth::fixed(to_real(key, num)); });
                cfg.bandwidth_mode = BandwidthMode::FixedDistance;
            } else {
                bad(key, "expected adaptive:<k> or fixed:<km>");
            }
        } else if (key == "response_transform") {
            const auto m = lower(v);
            if (m == "identity") cfg.transform = ResponseTransform::Identity;
            else if (m == "log") cfg.transform = ResponseTransform::Log;
            else bad(key, "expected identity or log");
        } else if (key == "local_r2_threshold") cfg.local_r2_threshold = to_real(key, v);
        else if (key == "fe_level") {
            if (lower(v) == "all") cfg.fe_level.reset();
            else cfg.fe_level = guarded(key, [&] { return parse_fe_level(lower(v)); });
        } else if (key == "cluster") {
            cfg.cluster = lower(v);
            if (cfg.cluster != "state") bad(key, "only state-level clustering is supported");
        } else if (key == "fe_models") {
            cfg.fe_models.clear();
            for (const auto& model : list_of(v, ';')) {
                if (lower(model) == "none") {
                    cfg.fe_models.emplace_back();
                    continue;
                }
                auto names = list_of(model, ',');
                for (const auto& n : names) {
                    const auto& known = CountyCovariates::names();
                    if (std::find(known.begin(), known.end(), n) == known.end()) {
                        bad(key, "unknown county covariate '" + n + "'");
                    }
                }
                cfg.fe_models.push_back(std::move(names));
            }
            if (cfg.fe_models.empty()) bad(key, "no models");
        } else if (key == "seed") {
            const auto d = parse_double(v);
            if (!d || *d < 0 || *d != std::floor(*d) || *d > 9.007199254740992e15) bad(key, "expected a non-negative integer");
            cfg.seed = static_cast<std::uint64_t>(*d);
        } else if (key == "threads") cfg.threads = to_count(key, v, 1);
    }

    if (gwr_mode == "enumerate") cfg.enumerate_subsets = true;
    else if (gwr_mode == "single") cfg.enumerate_subsets = false;
    else cfg.enumerate_subsets = covariates_all || cfg.kernels.size() > 1;
    if (!cfg.enumerate_subsets && cfg.kernels.size() > 1) {
        bad("kernel", "a single fit needs exactly one kernel");
    }
    if (get("bandwidth") && cfg.enumerate_subsets) {
        bad("bandwidth", "a fixed bandwidth only applies to a single fit");
    }
    if (cfg.period.first && cfg.period.last && *cfg.period.first > *cfg.period.last) {
        bad("period_first", "period starts after it ends");
    }
    return cfg;
}

} // namespace fuelgeo::cli
