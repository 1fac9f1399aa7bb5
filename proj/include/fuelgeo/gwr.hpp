#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fuelgeo/geo.hpp"

namespace fuelgeo {

/// Candidate explanatory variables, in canonical order.
inline const std::vector<std::string> kGwrCovariates = {
    "income", "population", "wage_per_job", "jobs_per_capita", "jobs"};

enum class ResponseTransform { Identity, Log };

/// Locations with named covariate columns and a response.
struct GwrData {
    std::vector<std::string> ids;
    std::vector<GeoPoint> points;
    std::vector<std::string> covariate_names;
    Eigen::MatrixXd covariates; // n x q, one column per name
    Eigen::VectorXd response;

    std::size_t size() const noexcept { return points.size(); }
    Eigen::Index column_index(const std::string& name) const;
    void validate() const;
};

struct GwrSpec {
    std::vector<std::string> covariates; // empty: intercept-only
    KernelShape kernel = KernelShape::Gaussian;
    Bandwidth bandwidth = Bandwidth::adaptive(22);
    std::string response = "price";
    ResponseTransform transform = ResponseTransform::Identity;
    bool normalize = true;
    // Adaptive Gaussian/Exponential weights are zeroed beyond the k-th neighbor.
    bool truncate_adaptive = false;

    void validate() const;
};

struct GwrFit {
    GwrSpec spec;
    std::vector<std::string> coefficient_names; // "intercept" first
    Eigen::MatrixXd local_coefficients;         // raw covariate units, n x (p+1)
    Eigen::MatrixXd normalized_coefficients;    // standardized covariates, n x (p+1)
    Eigen::VectorXd local_r2;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    Eigen::VectorXd hat_diagonal;
    Eigen::VectorXd response; // after transform
    double hat_trace = 0.0;
    double rss = 0.0;
    double tss = 0.0;
    double global_r2 = 0.0;
    std::optional<double> aicc;     // empty when the criterion is undefined
    std::optional<double> cv_score; // empty when some leave-one-out fit lacks support

    std::size_t n() const noexcept { return static_cast<std::size_t>(residuals.size()); }
    std::size_t parameters() const noexcept { return coefficient_names.size(); }
};

/// Pairwise distances and per-row sorted neighbor distances, shared by
/// every fit over one set of locations.
class GwrGeometry {
public:
    explicit GwrGeometry(std::span<const GeoPoint> points);

    std::size_t size() const noexcept { return static_cast<std::size_t>(distances_.rows()); }
    const Eigen::MatrixXd& distances() const noexcept { return distances_; }
    /// Distance from i to its k-th nearest other location.
    double kth_neighbor(std::size_t i, std::size_t k) const;
    double min_positive_neighbor_distance() const noexcept { return min_nn_; }
    double diameter() const noexcept { return diameter_; }

private:
    Eigen::MatrixXd distances_;
    Eigen::MatrixXd sorted_; // row i: ascending distances to the other n-1 points
    double min_nn_ = 0.0;
    double diameter_ = 0.0;
};

struct GwrEvaluation {
    double hat_trace = 0.0;
    double rss = 0.0;
    std::optional<double> cv_score;
    std::string cv_failure;
};

/// Design for one covariate subset. Evaluating a bandwidth runs every
/// local weighted least-squares fit.
class GwrProblem {
public:
    GwrProblem(const GwrData& data, std::span<const std::string> covariates,
               ResponseTransform transform = ResponseTransform::Identity, bool normalize = true,
               std::shared_ptr<const GwrGeometry> geometry = nullptr);

    std::size_t size() const noexcept { return static_cast<std::size_t>(design_.rows()); }
    std::size_t parameters() const noexcept { return static_cast<std::size_t>(design_.cols()); }
    const GwrGeometry& geometry() const noexcept { return *geometry_; }
    const std::shared_ptr<const GwrGeometry>& shared_geometry() const noexcept { return geometry_; }

    /// Kernel weights for focal location i; the focal weight is the kernel at 0.
    Eigen::VectorXd focal_weights(std::size_t i, KernelShape kernel, const Bandwidth& bw,
                                  bool truncate_adaptive = false) const;

    GwrEvaluation evaluate(KernelShape kernel, const Bandwidth& bw, bool want_cv,
                           bool truncate_adaptive = false) const;

    GwrFit fit(const GwrSpec& spec) const;

    const Eigen::MatrixXd& design() const noexcept { return design_; }
    const Eigen::VectorXd& response() const noexcept { return response_; }
    double total_sum_of_squares() const noexcept;

private:
    struct LocalSolve {
        Eigen::VectorXd beta;
        double hat_ii = 0.0;
        std::size_t support = 0; // positive-weight observations other than the focal one
    };
    LocalSolve solve_local(std::size_t i, const Eigen::VectorXd& w, bool need_beta_only) const;

    std::shared_ptr<const GwrGeometry> geometry_;
    std::vector<std::string> covariates_;
    Eigen::MatrixXd design_; // intercept + (standardized) covariates
    Eigen::VectorXd response_;
    Eigen::VectorXd column_mean_;
    Eigen::VectorXd column_sd_;
    bool normalize_;
};

GwrFit gwr_fit(const GwrData& data, const GwrSpec& spec);

/// Corrected AIC for GWR. Throws Oversaturated when n - 2 - tr(S) <= 0 and
/// DegenerateFit when the residual sum of squares vanishes.
double gwr_aicc(std::size_t n, double rss, double hat_trace);
double gwr_aicc(const GwrFit& fit);

/// Leave-one-out sum of squared prediction errors with the focal
/// observation's own weight removed.
double gwr_cv_score(const GwrData& data, const GwrSpec& spec);

enum class Criterion { AICc, CV };
enum class BandwidthMode { FixedDistance, AdaptiveKnn };

std::string_view to_string(Criterion c) noexcept;
Criterion parse_criterion(std::string_view name);

struct BandwidthSearchOptions {
    bool exhaustive = false;
    double relative_tolerance = 1e-3;
    std::size_t fixed_scan_points = 200; // exhaustive mode, fixed distance only
    ResponseTransform transform = ResponseTransform::Identity;
    bool normalize = true;
    bool truncate_adaptive = false;
    std::shared_ptr<const GwrGeometry> geometry;
};

struct BandwidthChoice {
    Bandwidth bandwidth = Bandwidth::adaptive(1);
    double score = 0.0;
    std::vector<std::pair<double, double>> trace; // (bandwidth value, score) in evaluation order
    double lower = 0.0;
    double upper = 0.0;
};

/// Golden-section bandwidth search. Integer neighbor counts use rounded
/// probes; among equal scores the smaller bandwidth wins.
BandwidthChoice optimize_bandwidth(const GwrData& data, std::span<const std::string> covariates,
                                   KernelShape kernel, Criterion criterion, BandwidthMode mode,
                                   const BandwidthSearchOptions& options = {});

BandwidthChoice optimize_bandwidth(const GwrProblem& problem, KernelShape kernel,
                                   Criterion criterion, BandwidthMode mode,
                                   const BandwidthSearchOptions& options = {});

struct ModelEntry {
    std::vector<std::string> covariates;
    KernelShape kernel = KernelShape::Gaussian;
    std::optional<Bandwidth> bandwidth;
    double criterion_score = 0.0;
    std::optional<double> aicc;
    std::optional<double> cv_score;
    double global_r2 = 0.0;
    double hat_trace = 0.0;
    bool ok = false;
    std::string failure;
};

struct ModelSelectionReport {
    Criterion criterion = Criterion::AICc;
    BandwidthMode mode = BandwidthMode::AdaptiveKnn;
    std::vector<ModelEntry> entries;
    std::size_t best = 0;
    double median_aicc_gap = 0.0;
    std::size_t failed = 0;

    /// Indices of successful entries by ascending AICc.
    std::vector<std::size_t> ranking() const;
};

struct EnumerateOptions {
    BandwidthMode mode = BandwidthMode::AdaptiveKnn;
    BandwidthSearchOptions search;
    std::size_t threads = 1;
};

/// Every non-empty covariate subset crossed with every kernel: optimize the
/// bandwidth, refit, and rank by AICc. Failing configurations are kept and
/// flagged.
ModelSelectionReport enumerate_models(const GwrData& data,
                                      std::span<const std::string> all_covariates,
                                      std::span<const KernelShape> kernels, Criterion criterion,
                                      const EnumerateOptions& options = {});

struct NeighborScale {
    double median = 0.0;
    double interquartile = 0.0;
    std::vector<double> distances;
};

/// Distribution of the distance from each location to its k-th nearest neighbor.
NeighborScale nearest_neighbor_scale(std::span<const GeoPoint> locations, std::size_t k);

} // namespace fuelgeo
