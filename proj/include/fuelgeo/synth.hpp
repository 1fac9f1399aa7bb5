#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fuelgeo/econometrics.hpp"
#include "fuelgeo/gwr.hpp"
#include "fuelgeo/ingest/dataset.hpp"
#include "fuelgeo/ingest/source.hpp"
#include "fuelgeo/spatial_stats.hpp"

// Deterministic synthetic data with known ground truth.
namespace fuelgeo::synth {

/// Uniform points in a lat/lon box.
std::vector<GeoPoint> random_points(std::uint64_t seed, std::size_t n, double lat0, double lat1, double lon0,
                                    double lon1);

struct SlopeGrid {
    GwrData data;               // one covariate, "income"
    Eigen::VectorXd true_slope; // 2 + lon / 10
};

/// side x side lattice with y = (2 + lon/10) * x + noise.
SlopeGrid varying_slope_grid(std::uint64_t seed, std::size_t side = 15, double noise_sd = 0.1);

/// Five standard covariates; the response depends on income and
/// wage_per_job only.
GwrData known_subset_data(std::uint64_t seed, std::size_t n = 80, double noise_sd = 0.3);

/// Random locations, one or two covariates, smoothly varying coefficients.
GwrData random_gwr_instance(std::uint64_t seed, std::size_t n, std::size_t covariates);

/// Stationary linear data with small noise.
GwrData stationary_linear_data(std::uint64_t seed, std::size_t n = 60, double noise_sd = 0.05);

/// Multi-level panel: state, county, station and day effects plus noise.
std::vector<PanelObservation> fe_panel(std::uint64_t seed, std::size_t states, std::size_t counties_per_state,
                                       std::size_t stations_per_county, std::size_t days);

struct StateEffectRows {
    std::vector<CountyModelRow> rows;
    double state_share = 0.0; // between-state share of the response variance
};

/// log price = state effect + noise, covariates independent of both.
StateEffectRows state_effect_rows(std::uint64_t seed, std::size_t states, std::size_t counties_per_state,
                                  double state_sd = 0.06, double noise_sd = 0.035);

struct CorrelatedField {
    std::vector<GeoPoint> locations;
    std::vector<PanelValue> panel;
};

/// Gaussian field with covariance exp(-d / length_km), observed for `days`
/// consecutive days with small idiosyncratic daily noise.
CorrelatedField correlated_field(std::uint64_t seed, std::size_t n = 300, double length_km = 100.0,
                                 std::size_t days = 7, double box_km = 1000.0);

struct CorpusTruth {
    std::size_t pages = 0;
    std::size_t failing_pages = 0;
    std::size_t flaky_pages = 0;
    std::size_t expected_attempts = 0;
    std::size_t parsed = 0;      // observations on pages that will be stored
    std::size_t quarantined = 0;
    std::size_t duplicates = 0;  // repeated keys across stored pages
    std::size_t unique = 0;
    std::size_t credit_regular = 0; // unique records passing the default filter
};

struct MockCorpus {
    std::vector<std::string> urls;
    std::map<std::string, std::string> pages;
    std::vector<std::string> failing_urls;
    std::map<std::string, std::size_t> flaky_urls; // url -> failures before success
    std::vector<ingest::Station> stations;
    CorpusTruth truth;

    /// Registers every page and failure mode with the mock source.
    void install(ingest::MockSource& source) const;
};

/// Price pages over a handful of hosts; `retries` sets the expected attempt
/// counts for failing pages.
MockCorpus mock_corpus(std::uint64_t seed, std::size_t pages = 120, std::size_t retries = 2);

struct FixtureTruth {
    std::size_t counties = 0;
    std::size_t stations = 0;
    std::size_t records = 0;
    std::size_t credit_regular = 0;
    double state_share = 0.0; // between-state share of county log mean price
};

/// Writes a complete CLI input set into `dir`: stations.csv, covariates.csv,
/// pages/, urls.txt, fuelgeo.conf, moran_pair.csv, moran_pair.conf and
/// truth.json.
FixtureTruth write_cli_fixture(std::uint64_t seed, const std::filesystem::path& dir, std::size_t states = 20,
                               std::size_t counties_per_state = 15, std::size_t days = 7,
                               std::size_t pages = 120);

} // namespace fuelgeo::synth
