#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fuelgeo/econometrics.hpp"
#include "fuelgeo/gwr.hpp"
#include "fuelgeo/ingest/dataset.hpp"
#include "fuelgeo/spatial_stats.hpp"

namespace fuelgeo::cli {

/// A raw setting and the directory relative paths resolve against.
struct Setting {
    std::string value;
    std::filesystem::path base;
};

using Settings = std::map<std::string, Setting>;

/// Flat `key = value` lines; `#` starts a comment. Throws Error(Config) on
/// malformed lines or repeated keys.
Settings parse_config(std::istream& in, const std::filesystem::path& base);
Settings load_config_file(const std::filesystem::path& path);

/// Keys understood by resolve_config.
const std::vector<std::string>& known_keys();

struct RunConfig {
    std::filesystem::path out = "fuelgeo_out";
    std::optional<std::filesystem::path> stations;
    std::optional<std::filesystem::path> covariates;
    std::optional<std::filesystem::path> store; // defaults to <out>/observations.txt
    std::optional<std::filesystem::path> urls;
    std::optional<std::filesystem::path> panel; // location,lat,lon,day,value
    std::optional<std::filesystem::path> polygons;

    std::vector<std::string> proxies;
    std::size_t max_in_flight = 4;
    std::size_t retries = 0;
    std::size_t per_host_delay_ms = 0;

    std::optional<ingest::FuelType> fuel = ingest::FuelType::Regular;
    ingest::Period period;
    ingest::CountyMeanMode county_mean = ingest::CountyMeanMode::StationDays;

    std::vector<double> d0_grid = {10.0, 30.0, 100.0, 300.0, 1000.0};
    WindowKind window = WindowKind::Daily;
    KernelShape moran_kernel = KernelShape::Exponential;
    bool row_standardize = false;
    std::size_t min_locations = 3;

    std::vector<std::string> gwr_covariates = kGwrCovariates;
    bool enumerate_subsets = true;
    std::vector<KernelShape> kernels{std::begin(kAllKernels), std::end(kAllKernels)};
    Criterion criterion = Criterion::AICc;
    BandwidthMode bandwidth_mode = BandwidthMode::AdaptiveKnn;
    std::optional<Bandwidth> bandwidth;
    ResponseTransform transform = ResponseTransform::Identity;
    double local_r2_threshold = 0.5;

    std::optional<FeLevel> fe_level; // empty: every level
    std::string cluster = "state";
    std::vector<std::vector<std::string>> fe_models;

    std::uint64_t seed = 1;
    std::size_t threads = 1;

    std::map<std::string, std::string> effective; // resolved key -> value, for the manifest

    std::filesystem::path store_path() const { return store ? *store : out / "observations.txt"; }
};

/// Applies settings over the defaults. Throws Error(Config) on unknown keys
/// or bad values.
RunConfig resolve_config(const Settings& settings);

/// Table 2 style model sequence over the county covariates.
std::vector<std::vector<std::string>> default_fe_models();

/// Runs one subcommand. Returns 0 on success, 1 on validation errors, 2 on
/// runtime errors.
int execute(int argc, const char* const* argv);
int execute(const std::vector<std::string>& args); // args[0] is the program name

std::string sha256_file(const std::filesystem::path& path);

} // namespace fuelgeo::cli
