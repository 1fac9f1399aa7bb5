#include <doctest.h>

#include <algorithm>

#include "fuelgeo/error.hpp"
#include "fuelgeo/gwr.hpp"
#include "fuelgeo/summary.hpp"
#include "fuelgeo/synth.hpp"

using namespace fuelgeo;

namespace {

BandwidthSearchOptions exhaustive() {
    BandwidthSearchOptions o;
    o.exhaustive = true;
    return o;
}

double score_at(const GwrData& d, KernelShape k, std::size_t nn) {
    GwrSpec s;
    s.covariates = d.covariate_names;
    s.kernel = k;
    s.bandwidth = Bandwidth::adaptive(nn);
    return gwr_aicc(gwr_fit(d, s));
}

// Direction changes along a scan.
int turning_points(const std::vector<std::pair<double, double>>& trace) {
    int turns = 0, dir = -1;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double d = trace[i].second - trace[i - 1].second;
        if (d == 0.0) continue;
        const int s = d > 0 ? 1 : -1;
        if (s != dir) turns += 1, dir = s;
    }
    return turns;
}

} // namespace

TEST_CASE("golden-section neighbor search equals the exhaustive scan on unimodal criteria") {
    std::size_t unimodal_cases = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto d = synth::random_gwr_instance(seed, 50, 1 + seed % 2);
        for (auto kernel : kAllKernels) {
            for (auto criterion : {Criterion::AICc, Criterion::CV}) {
                const auto g = optimize_bandwidth(d, d.covariate_names, kernel, criterion, BandwidthMode::AdaptiveKnn);
                const auto e = optimize_bandwidth(d, d.covariate_names, kernel, criterion,
                                                  BandwidthMode::AdaptiveKnn, exhaustive());
                CHECK(g.trace.size() < e.trace.size());
                CHECK(g.score >= e.score);
                if (turning_points(e.trace) <= 1) {
                    ++unimodal_cases;
                    CHECK(g.bandwidth.neighbors() == e.bandwidth.neighbors());
                    CHECK(g.score == e.score);
                }
            }
        }
    }
    CHECK(unimodal_cases >= 10);
}

TEST_CASE("exhaustive scan covers the admissible range and breaks ties low") {
    const auto d = synth::random_gwr_instance(3, 30, 2);
    const auto e = optimize_bandwidth(d, d.covariate_names, KernelShape::Bisquare, Criterion::AICc,
                                      BandwidthMode::AdaptiveKnn, exhaustive());
    CHECK(e.lower == 4.0);
    CHECK(e.upper == 29.0);
    CHECK(e.trace.size() == 26);
    double best = INFINITY;
    std::size_t arg = 0;
    for (const auto& [k, s] : e.trace) {
        if (s < best) best = s, arg = static_cast<std::size_t>(k);
    }
    CHECK(e.bandwidth.neighbors() == arg);
    CHECK(e.score == best);
}

TEST_CASE("selected score equals the fit at the selected bandwidth") {
    const auto d = synth::random_gwr_instance(8, 60, 2);
    const auto g = optimize_bandwidth(d, d.covariate_names, KernelShape::Exponential, Criterion::AICc,
                                      BandwidthMode::AdaptiveKnn);
    CHECK(g.score == doctest::Approx(score_at(d, KernelShape::Exponential, g.bandwidth.neighbors())).epsilon(1e-12));
}

TEST_CASE("stationary data pushes k to the upper bound") {
    const auto d = synth::stationary_linear_data(5);
    const auto g = optimize_bandwidth(d, d.covariate_names, KernelShape::Gaussian, Criterion::AICc,
                                      BandwidthMode::AdaptiveKnn);
    CHECK(g.bandwidth.neighbors() + 1 >= d.size() - 1);
}

TEST_CASE("varying-slope grid selects a local bandwidth") {
    const auto grid = synth::varying_slope_grid(2024);
    const auto g = optimize_bandwidth(grid.data, grid.data.covariate_names, KernelShape::Gaussian,
                                      Criterion::AICc, BandwidthMode::AdaptiveKnn);
    CHECK(g.bandwidth.neighbors() < grid.data.size() / 2);

    GwrSpec s;
    s.covariates = grid.data.covariate_names;
    s.bandwidth = g.bandwidth;
    const auto fit = gwr_fit(grid.data, s);
    const Eigen::VectorXd b = fit.local_coefficients.col(1);
    CHECK(pearson(std::vector<double>(b.data(), b.data() + b.size()),
                  std::vector<double>(grid.true_slope.data(), grid.true_slope.data() + grid.true_slope.size())) >
          0.95);

    const auto e = optimize_bandwidth(grid.data, grid.data.covariate_names, KernelShape::Gaussian,
                                      Criterion::AICc, BandwidthMode::AdaptiveKnn, exhaustive());
    CHECK(e.bandwidth.neighbors() == g.bandwidth.neighbors());

    // Lattice neighbor ties make the lowest k jagged; above the optimum the
    // criterion rises steadily.
    for (std::size_t i = 1; i < e.trace.size(); ++i) {
        if (e.trace[i - 1].first >= static_cast<double>(e.bandwidth.neighbors()))
            CHECK(e.trace[i].second > e.trace[i - 1].second);
    }
}

TEST_CASE("fixed-distance search stays in range and near the scan minimum") {
    const auto d = synth::random_gwr_instance(14, 60, 1);
    const auto g = optimize_bandwidth(d, d.covariate_names, KernelShape::Gaussian, Criterion::AICc,
                                      BandwidthMode::FixedDistance);
    const auto e = optimize_bandwidth(d, d.covariate_names, KernelShape::Gaussian, Criterion::AICc,
                                      BandwidthMode::FixedDistance, exhaustive());
    CHECK(g.bandwidth.distance_km() >= g.lower);
    CHECK(g.bandwidth.distance_km() <= g.upper);
    CHECK(g.lower == e.lower);
    CHECK(g.score <= e.score + 1e-3 * std::abs(e.score));
}

TEST_CASE("search reports infeasible problems") {
    const auto d = synth::random_gwr_instance(15, 4, 2);
    try {
        optimize_bandwidth(d, d.covariate_names, KernelShape::Gaussian, Criterion::AICc,
                           BandwidthMode::AdaptiveKnn);
        FAIL("expected no feasible bandwidth");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoFeasibleBandwidth);
    }
}

TEST_CASE("enumerate a single configuration") {
    const auto d = synth::random_gwr_instance(16, 40, 1);
    const std::vector<std::string> covs = {"income"};
    const std::vector<KernelShape> kernels = {KernelShape::Gaussian};
    const auto r = enumerate_models(d, covs, kernels, Criterion::AICc);
    REQUIRE(r.entries.size() == 1);
    CHECK(r.best == 0);
    CHECK(r.entries[0].ok);
    CHECK(r.failed == 0);
    CHECK(r.median_aicc_gap == 0.0);
}

TEST_CASE("enumeration covers every subset and kernel and ranks by aicc") {
    const auto d = synth::known_subset_data(7);
    const std::vector<std::string> covs = {"income", "population", "wage_per_job"};
    const std::vector<KernelShape> kernels(std::begin(kAllKernels), std::end(kAllKernels));
    const auto r = enumerate_models(d, covs, kernels, Criterion::AICc);
    CHECK(r.entries.size() == 28);
    const auto order = r.ranking();
    CHECK(order.size() + r.failed == 28);
    CHECK(order.front() == r.best);
    for (std::size_t i = 1; i < order.size(); ++i) CHECK(*r.entries[order[i - 1]].aicc <= *r.entries[order[i]].aicc);
    const auto& best = r.entries[r.best].covariates;
    CHECK(std::find(best.begin(), best.end(), "income") != best.end());
    CHECK(std::find(best.begin(), best.end(), "wage_per_job") != best.end());
    std::vector<double> gaps;
    for (std::size_t i = 1; i < order.size(); ++i) gaps.push_back(*r.entries[order[i]].aicc - *r.entries[r.best].aicc);
    CHECK(r.median_aicc_gap == doctest::Approx(quantile(gaps, 0.5)));
    // Any model without one of the true covariates is worse.
    for (const auto& e : r.entries) {
        if (!e.ok) continue;
        const bool has_income = std::find(e.covariates.begin(), e.covariates.end(), "income") != e.covariates.end();
        const bool has_wage =
            std::find(e.covariates.begin(), e.covariates.end(), "wage_per_job") != e.covariates.end();
        if (!has_income || !has_wage) CHECK(*e.aicc > *r.entries[r.best].aicc);
    }
}

TEST_CASE("failing configurations are recorded and skipped") {
    auto d = synth::random_gwr_instance(17, 40, 2);
    d.covariate_names.push_back("jobs");
    d.covariates.conservativeResize(Eigen::NoChange, 3);
    d.covariates.col(2).setConstant(7.0);
    const std::vector<std::string> covs = d.covariate_names;
    const std::vector<KernelShape> kernels = {KernelShape::Gaussian, KernelShape::Step};
    const auto r = enumerate_models(d, covs, kernels, Criterion::AICc);
    CHECK(r.entries.size() == 14);
    CHECK(r.failed >= 8);
    for (const auto& e : r.entries) {
        if (std::find(e.covariates.begin(), e.covariates.end(), "jobs") != e.covariates.end()) {
            CHECK_FALSE(e.ok);
            CHECK(e.failure.find("constant") != std::string::npos);
        }
    }
    CHECK(r.entries[r.best].ok);

    const std::vector<std::string> only = {"jobs"};
    try {
        enumerate_models(d, only, kernels, Criterion::AICc);
        FAIL("expected empty report");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyReport);
    }
}

TEST_CASE("parallel enumeration matches the sequential run") {
    const auto d = synth::known_subset_data(9, 50);
    const std::vector<std::string> covs = {"income", "wage_per_job", "jobs"};
    const std::vector<KernelShape> kernels = {KernelShape::Gaussian, KernelShape::Bisquare};
    EnumerateOptions seq, par;
    par.threads = 3;
    const auto a = enumerate_models(d, covs, kernels, Criterion::CV, seq);
    const auto b = enumerate_models(d, covs, kernels, Criterion::CV, par);
    REQUIRE(a.entries.size() == b.entries.size());
    CHECK(a.best == b.best);
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].covariates == b.entries[i].covariates);
        CHECK(a.entries[i].criterion_score == b.entries[i].criterion_score);
        CHECK(a.entries[i].aicc == b.entries[i].aicc);
    }
}

TEST_CASE("criterion names") {
    CHECK(parse_criterion("aicc") == Criterion::AICc);
    CHECK(parse_criterion("CV") == Criterion::CV);
    CHECK(to_string(Criterion::CV) == "cv");
    CHECK_THROWS_AS(parse_criterion("bic"), Error);
}
