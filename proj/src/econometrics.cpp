#include "fuelgeo/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "fuelgeo/error.hpp"
#include "fuelgeo/spatial_stats.hpp"

namespace fuelgeo {

namespace {

constexpr double kRankThreshold = 1e-10;

std::string column_label(std::span<const std::string> names, Eigen::Index j) {
    const auto idx = static_cast<std::size_t>(j);
    return idx < names.size() ? names[idx] : "column " + std::to_string(j);
}

// Subtract per-group means in place.
void demean(Eigen::Ref<Eigen::VectorXd> v, std::span<const std::size_t> groups, std::size_t n_groups,
            double* max_shift = nullptr) {
    std::vector<double> sums(n_groups, 0.0);
    std::vector<std::size_t> counts(n_groups, 0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        sums[groups[static_cast<std::size_t>(i)]] += v(i);
        counts[groups[static_cast<std::size_t>(i)]] += 1;
    }
    double shift = 0.0;
    for (std::size_t g = 0; g < n_groups; ++g) {
        if (counts[g] == 0) continue;
        sums[g] /= static_cast<double>(counts[g]);
        shift = std::max(shift, std::abs(sums[g]));
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) -= sums[groups[static_cast<std::size_t>(i)]];
    if (max_shift) *max_shift = shift;
}

} // namespace

OlsResult ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
              std::span<const std::string> column_names) {
    const Eigen::Index n = design.rows();
    const Eigen::Index k = design.cols();
    if (response.size() != n) throw Error(ErrorKind::InvalidArgument, "ols: response length mismatch");
    if (k < 1 || n <= k) throw Error(ErrorKind::InvalidArgument, "ols needs n > k >= 1");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < k) {
        std::ostringstream msg;
        msg << "design is rank deficient (rank " << qr.rank() << " of " << k << "); collinear columns:";
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index j = qr.rank(); j < k; ++j) msg << " " << column_label(column_names, perm(j));
        throw Error(ErrorKind::SingularDesign, msg.str());
    }

    OlsResult out;
    out.coefficients = qr.solve(response);
    out.residuals = response - design * out.coefficients;
    const auto r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd rinv = r.solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd p = qr.colsPermutation();
    out.bread = p * rinv * rinv.transpose() * p.transpose();
    out.rss = out.residuals.squaredNorm();
    const double tss = (response.array() - response.mean()).square().sum();
    out.r_squared = tss > 0.0 ? 1.0 - out.rss / tss : 0.0;
    return out;
}

std::string_view to_string(FeLevel level) noexcept {
    switch (level) {
    case FeLevel::State: return "state";
    case FeLevel::County: return "county";
    case FeLevel::Station: return "station";
    }
    return "unknown";
}

FeLevel parse_fe_level(std::string_view name) {
    if (name == "state") return FeLevel::State;
    if (name == "county") return FeLevel::County;
    if (name == "station") return FeLevel::Station;
    throw Error(ErrorKind::InvalidArgument, "unknown fixed-effect level: " + std::string(name));
}

FeVarianceExplained fe_variance_explained(std::span<const PanelObservation> panel,
                                          const FixedEffectSpec& spec) {
    if (panel.size() < 2) throw Error(ErrorKind::EmptyInput, "fixed-effect fit needs at least two observations");
    std::vector<std::string> labels;
    labels.reserve(panel.size());
    for (const auto& o : panel) {
        switch (spec.level) {
        case FeLevel::State: labels.push_back(o.state_id); break;
        case FeLevel::County: labels.push_back(o.county_fips); break;
        case FeLevel::Station: labels.push_back(o.station_id); break;
        }
    }
    std::size_t n_groups = 0;
    const auto groups = factorize(labels, &n_groups);
    if (n_groups < 2) {
        throw Error(ErrorKind::DegenerateGrouping, "fixed effects need at least two groups");
    }

    const auto n = static_cast<Eigen::Index>(panel.size());
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = panel[static_cast<std::size_t>(i)].price;
    Eigen::VectorXd r = y.array() - y.mean();
    const double tss = r.squaredNorm();
    if (!(tss > 0.0)) throw Error(ErrorKind::ZeroVariance, "prices are constant");

    FeVarianceExplained out;
    out.n_groups = n_groups;
    out.n_observations = panel.size();
    if (!spec.include_day_effect) {
        demean(r, groups, n_groups);
    } else {
        std::vector<std::size_t> day_codes(panel.size());
        std::map<std::chrono::sys_days, std::size_t> days;
        for (const auto& o : panel) days.try_emplace(o.day, days.size());
        for (std::size_t i = 0; i < panel.size(); ++i) day_codes[i] = days.at(panel[i].day);
        const double tol = 1e-10 * std::sqrt(tss / static_cast<double>(n));
        for (out.iterations = 1; out.iterations <= 100000; ++out.iterations) {
            double s1 = 0.0, s2 = 0.0;
            demean(r, groups, n_groups, &s1);
            demean(r, day_codes, days.size(), &s2);
            if (std::max(s1, s2) < tol) break;
        }
    }
    out.r_squared = 1.0 - r.squaredNorm() / tss;
    return out;
}

const std::vector<std::string>& CountyCovariates::names() {
    static const std::vector<std::string> kNames = {
        "density", "log_population", "log_total_income", "unemployment",
        "poverty", "pct_black",      "vote_gop",         "state_tax"};
    return kNames;
}

namespace {

using CovariateMember = std::optional<double> CountyCovariates::*;

CovariateMember covariate_member(std::string_view name) {
    if (name == "density") return &CountyCovariates::density;
    if (name == "log_population") return &CountyCovariates::log_population;
    if (name == "log_total_income") return &CountyCovariates::log_total_income;
    if (name == "unemployment") return &CountyCovariates::unemployment;
    if (name == "poverty") return &CountyCovariates::poverty;
    if (name == "pct_black") return &CountyCovariates::pct_black;
    if (name == "vote_gop") return &CountyCovariates::vote_gop;
    if (name == "state_tax") return &CountyCovariates::state_tax;
    throw Error(ErrorKind::InvalidArgument, "unknown county covariate: " + std::string(name));
}

} // namespace

std::optional<double> CountyCovariates::get(std::string_view name) const {
    return this->*covariate_member(name);
}

void CountyCovariates::set(std::string_view name, double value) {
    this->*covariate_member(name) = value;
}

void CountyCovariates::validate() const {
    auto in_unit = [](const std::optional<double>& v) { return !v || (*v >= 0.0 && *v <= 1.0); };
    if (!in_unit(unemployment) || !in_unit(poverty) || !in_unit(vote_gop)) {
        throw Error(ErrorKind::InvalidArgument, "rate covariates must lie in [0, 1]");
    }
    if (pct_black && !(*pct_black >= 0.0 && *pct_black <= 100.0)) {
        throw Error(ErrorKind::InvalidArgument, "pct_black must lie in [0, 100]");
    }
    if (density && !(*density >= 0.0)) throw Error(ErrorKind::InvalidArgument, "density must be non-negative");
    for (const auto& name : names()) {
        const auto v = get(name);
        if (v && !std::isfinite(*v)) throw Error(ErrorKind::InvalidArgument, name + " must be finite");
    }
}

ClusterRobust cluster_robust_se(const Eigen::MatrixXd& design, const Eigen::VectorXd& residuals,
                                const Eigen::MatrixXd& bread, std::span<const std::string> clusters,
                                std::optional<std::size_t> dof_parameters) {
    const Eigen::Index n = design.rows();
    const Eigen::Index k = design.cols();
    if (residuals.size() != n || static_cast<Eigen::Index>(clusters.size()) != n ||
        bread.rows() != k || bread.cols() != k) {
        throw Error(ErrorKind::InvalidArgument, "cluster_robust_se: dimension mismatch");
    }
    const std::size_t kdof = dof_parameters.value_or(static_cast<std::size_t>(k));
    if (static_cast<std::size_t>(n) <= kdof) {
        throw Error(ErrorKind::InvalidArgument, "cluster_robust_se needs n > k");
    }

    // Per-cluster scores X_g'u_g; std::map fixes the reduction order.
    std::map<std::string, Eigen::VectorXd> scores;
    for (Eigen::Index i = 0; i < n; ++i) {
        auto [it, inserted] = scores.try_emplace(clusters[static_cast<std::size_t>(i)], Eigen::VectorXd::Zero(k));
        it->second += design.row(i).transpose() * residuals(i);
    }
    const std::size_t g = scores.size();
    if (g < 2) throw Error(ErrorKind::InsufficientClusters, "clustered errors need at least two clusters");

    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (const auto& [id, s] : scores) meat.noalias() += s * s.transpose();

    ClusterRobust out;
    out.n_clusters = g;
    const double gd = static_cast<double>(g);
    const double nd = static_cast<double>(n);
    out.correction = gd / (gd - 1.0) * (nd - 1.0) / (nd - static_cast<double>(kdof));
    out.covariance = out.correction * bread * meat * bread;
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
    out.standard_errors = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    return out;
}

double FeFit::t_stat(const std::string& name) const {
    return coefficients.at(name) / standard_errors.at(name);
}

double FeFit::p_value(const std::string& name) const {
    return coefficient_p_value(t_stat(name), n_clusters);
}

double coefficient_p_value(double t, std::size_t n_clusters) {
    const double a = std::abs(t);
    if (!std::isfinite(a)) return 0.0;
    if (n_clusters >= 2 && n_clusters <= 30) {
        const boost::math::students_t dist(static_cast<double>(n_clusters - 1));
        return 2.0 * boost::math::cdf(boost::math::complement(dist, a));
    }
    return std::erfc(a / std::sqrt(2.0));
}

std::string significance_stars(double p_value) {
    if (p_value < 0.01) return "***";
    if (p_value < 0.05) return "**";
    if (p_value < 0.1) return "*";
    return "";
}

FeFit county_regression(std::span<const CountyModelRow> rows,
                        std::span<const std::string> covariate_set) {
    for (const auto& name : covariate_set) (void)CountyCovariates{}.get(name); // rejects unknown names

    std::vector<const CountyModelRow*> used;
    for (const auto& row : rows) {
        row.covariates.validate();
        if (!std::isfinite(row.log_mean_price)) {
            throw Error(ErrorKind::InvalidArgument, "county " + row.county_fips + ": non-finite log price");
        }
        const bool complete = std::all_of(covariate_set.begin(), covariate_set.end(),
                                          [&](const std::string& c) { return row.covariates.get(c).has_value(); });
        if (complete) used.push_back(&row);
    }

    const auto n = static_cast<Eigen::Index>(used.size());
    const auto k = static_cast<Eigen::Index>(covariate_set.size());
    std::vector<std::string> states;
    states.reserve(used.size());
    for (const auto* r : used) states.push_back(r->state_id);
    std::size_t n_states = 0;
    const auto codes = factorize(states, &n_states);
    if (n_states < 2) {
        throw Error(ErrorKind::InsufficientClusters, "state-clustered regression needs at least two states");
    }
    if (static_cast<std::size_t>(n) <= static_cast<std::size_t>(k) + n_states) {
        throw Error(ErrorKind::InvalidArgument, "county regression needs n > k + number of states");
    }

    Eigen::VectorXd y(n);
    Eigen::MatrixXd x(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto* r = used[static_cast<std::size_t>(i)];
        y(i) = r->log_mean_price;
        for (Eigen::Index j = 0; j < k; ++j) x(i, j) = *r->covariates.get(covariate_set[static_cast<std::size_t>(j)]);
    }
    const double tss = (y.array() - y.mean()).square().sum();

    Eigen::VectorXd yd = y;
    demean(yd, codes, n_states);
    Eigen::MatrixXd xd = x;
    for (Eigen::Index j = 0; j < k; ++j) {
        demean(xd.col(j), codes, n_states);
        if (xd.col(j).norm() <= 1e-10 * std::max(x.col(j).norm(), 1e-300)) {
            throw Error(ErrorKind::AbsorbedCovariate,
                        "covariate '" + covariate_set[static_cast<std::size_t>(j)] +
                            "' is constant within every state and is absorbed by the fixed effect");
        }
    }

    FeFit fit;
    fit.names.assign(covariate_set.begin(), covariate_set.end());
    fit.n_observations = used.size();
    fit.n_clusters = n_states;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd resid = yd;
    if (k > 0) {
        const OlsResult res = ols(xd, yd, covariate_set);
        beta = res.coefficients;
        resid = res.residuals;
        const double rss = resid.squaredNorm();
        const ClusterRobust cr = cluster_robust_se(xd, resid, res.bread, states,
                                                   static_cast<std::size_t>(k) + n_states);
        std::ostringstream coef_list;
        bool degenerate = rss <= 1e-24 * std::max(tss, 1e-300);
        for (Eigen::Index j = 0; j < k; ++j) {
            const auto& name = covariate_set[static_cast<std::size_t>(j)];
            fit.coefficients[name] = beta(j);
            fit.standard_errors[name] = cr.standard_errors(j);
            coef_list << (j ? ", " : "") << name << "=" << beta(j);
            if (!(cr.standard_errors(j) > 0.0)) degenerate = true;
        }
        if (degenerate) {
            throw Error(ErrorKind::DegenerateFit,
                        "perfect fit: clustered standard errors vanish (" + coef_list.str() + ")");
        }
    }

    // Recovered state effects: mean of y - x'beta within each state.
    std::vector<double> eff(n_states, 0.0);
    std::vector<std::size_t> cnt(n_states, 0);
    const Eigen::VectorXd partial = y - x * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
        eff[codes[static_cast<std::size_t>(i)]] += partial(i);
        cnt[codes[static_cast<std::size_t>(i)]] += 1;
    }
    for (std::size_t i = 0; i < used.size(); ++i) {
        const auto c = codes[i];
        fit.state_effects.try_emplace(states[i], eff[c] / static_cast<double>(cnt[c]));
    }
    fit.r_squared = tss > 0.0 ? 1.0 - resid.squaredNorm() / tss : 0.0;
    return fit;
}

} // namespace fuelgeo
