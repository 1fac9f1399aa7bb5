#include "fuelgeo/gwr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "fuelgeo/error.hpp"
#include "fuelgeo/summary.hpp"

namespace fuelgeo {

namespace {

constexpr double kRankThreshold = 1e-10;

} // namespace

Eigen::Index GwrData::column_index(const std::string& name) const {
    const auto it = std::find(covariate_names.begin(), covariate_names.end(), name);
    if (it == covariate_names.end()) {
        throw Error(ErrorKind::InvalidArgument, "unknown covariate: " + name);
    }
    return static_cast<Eigen::Index>(it - covariate_names.begin());
}

void GwrData::validate() const {
    const auto n = static_cast<Eigen::Index>(points.size());
    if (covariates.rows() != n || response.size() != n) {
        throw Error(ErrorKind::InvalidArgument, "GWR data: row counts disagree");
    }
    if (covariates.cols() != static_cast<Eigen::Index>(covariate_names.size())) {
        throw Error(ErrorKind::InvalidArgument, "GWR data: covariate names do not match columns");
    }
    if (!ids.empty() && ids.size() != points.size()) {
        throw Error(ErrorKind::InvalidArgument, "GWR data: id count does not match locations");
    }
    if (!covariates.allFinite() || !response.allFinite()) {
        throw Error(ErrorKind::InvalidArgument, "GWR data contains non-finite values");
    }
}

void GwrSpec::validate() const {
    const std::set<std::string> unique(covariates.begin(), covariates.end());
    if (unique.size() != covariates.size()) {
        throw Error(ErrorKind::InvalidArgument, "GWR spec has duplicate covariates");
    }
}

GwrGeometry::GwrGeometry(std::span<const GeoPoint> points) : distances_(distance_matrix(points)) {
    const auto n = distances_.rows();
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "GWR needs at least two locations");
    sorted_.resize(n, n - 1);
    min_nn_ = std::numeric_limits<double>::infinity();
    std::vector<double> row;
    for (Eigen::Index i = 0; i < n; ++i) {
        row.clear();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) row.push_back(distances_(i, j));
        }
        std::sort(row.begin(), row.end());
        for (Eigen::Index k = 0; k < n - 1; ++k) sorted_(i, k) = row[static_cast<std::size_t>(k)];
        const auto pos = std::upper_bound(row.begin(), row.end(), 0.0);
        if (pos != row.end()) min_nn_ = std::min(min_nn_, *pos);
        diameter_ = std::max(diameter_, row.back());
    }
    if (!std::isfinite(min_nn_)) min_nn_ = 0.0;
}

double GwrGeometry::kth_neighbor(std::size_t i, std::size_t k) const {
    if (k < 1 || k >= size()) {
        std::ostringstream msg;
        msg << "adaptive bandwidth k=" << k << " requires 1 <= k <= n-1 (n=" << size() << ")";
        throw Error(ErrorKind::InvalidBandwidth, msg.str());
    }
    return sorted_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k - 1));
}

GwrProblem::GwrProblem(const GwrData& data, std::span<const std::string> covariates,
                       ResponseTransform transform, bool normalize,
                       std::shared_ptr<const GwrGeometry> geometry)
    : geometry_(std::move(geometry)), covariates_(covariates.begin(), covariates.end()),
      normalize_(normalize) {
    data.validate();
    const auto n = static_cast<Eigen::Index>(data.size());
    if (!geometry_) geometry_ = std::make_shared<GwrGeometry>(data.points);
    if (static_cast<Eigen::Index>(geometry_->size()) != n) {
        throw Error(ErrorKind::InvalidArgument, "GWR geometry does not match data");
    }

    const auto p = static_cast<Eigen::Index>(covariates_.size());
    design_.resize(n, p + 1);
    design_.col(0).setOnes();
    column_mean_.resize(p);
    column_sd_.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto col = data.covariates.col(data.column_index(covariates_[static_cast<std::size_t>(j)]));
        const double m = col.mean();
        const double sd = std::sqrt((col.array() - m).square().sum() / static_cast<double>(n - 1));
        if (!(sd > 1e-14 * std::max(1.0, std::abs(m)))) {
            throw Error(ErrorKind::ZeroVariance,
                        "covariate '" + covariates_[static_cast<std::size_t>(j)] + "' is constant");
        }
        column_mean_(j) = m;
        column_sd_(j) = sd;
        if (normalize_) {
            design_.col(j + 1) = (col.array() - m) / sd;
        } else {
            design_.col(j + 1) = col;
        }
    }

    response_ = data.response;
    if (transform == ResponseTransform::Log) {
        if ((response_.array() <= 0.0).any()) {
            throw Error(ErrorKind::InvalidArgument, "log response requires positive values");
        }
        response_ = response_.array().log();
    }
}

Eigen::VectorXd GwrProblem::focal_weights(std::size_t i, KernelShape kernel, const Bandwidth& bw,
                                          bool truncate_adaptive) const {
    const std::size_t n = size();
    double h = 0.0;
    if (bw.is_fixed()) {
        h = bw.distance_km();
    } else {
        h = geometry_->kth_neighbor(i, bw.neighbors());
        if (!(h > 0.0)) {
            std::ostringstream msg;
            msg << "location " << i << " has zero distance to its " << bw.neighbors()
                << "-th neighbor (duplicate coordinates)";
            throw Error(ErrorKind::DegenerateBandwidth, msg.str());
        }
    }
    const auto& d = geometry_->distances();
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        const double dij = d(row, j);
        w(j) = (truncate_adaptive && bw.is_adaptive() && dij > h) ? 0.0 : kernel_weight(kernel, dij, h);
    }
    return w;
}

GwrProblem::LocalSolve GwrProblem::solve_local(std::size_t i, const Eigen::VectorXd& w,
                                               bool need_beta_only) const {
    const Eigen::Index m = design_.cols();
    std::vector<Eigen::Index> active;
    active.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        if (w(j) > 0.0) active.push_back(j);
    }
    const auto focal = static_cast<Eigen::Index>(i);
    if (static_cast<Eigen::Index>(active.size()) < m) {
        std::ostringstream msg;
        msg << "local design at location " << i << " is rank deficient: " << active.size()
            << " weighted observations for " << m << " parameters";
        throw Error(ErrorKind::SingularFit, msg.str());
    }

    const auto na = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd a(na, m);
    Eigen::VectorXd b(na);
    for (Eigen::Index r = 0; r < na; ++r) {
        const Eigen::Index j = active[static_cast<std::size_t>(r)];
        const double s = std::sqrt(w(j));
        a.row(r) = s * design_.row(j);
        b(r) = s * response_(j);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < m) {
        std::ostringstream msg;
        msg << "local design at location " << i << " is rank deficient (rank " << qr.rank()
            << " < " << m << ")";
        throw Error(ErrorKind::SingularFit, msg.str());
    }

    LocalSolve out;
    out.beta = qr.solve(b);
    out.support = active.size() - (w(focal) > 0.0 ? 1 : 0);
    if (!need_beta_only) {
        // (X'WX)^{-1} = P R^{-1} R^{-T} P'
        const Eigen::VectorXd px = qr.colsPermutation().transpose() * design_.row(focal).transpose();
        const auto r = qr.matrixR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
        const Eigen::VectorXd v = r.transpose().solve(px);
        out.hat_ii = w(focal) * v.squaredNorm();
    }
    return out;
}

GwrEvaluation GwrProblem::evaluate(KernelShape kernel, const Bandwidth& bw, bool want_cv,
                                   bool truncate_adaptive) const {
    const std::size_t n = size();
    bw.validate_for(n);
    const auto m = parameters();
    GwrEvaluation out;
    double cv = 0.0;
    bool cv_ok = want_cv;
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd w = focal_weights(i, kernel, bw, truncate_adaptive);
        const LocalSolve local = solve_local(i, w, false);
        const auto row = static_cast<Eigen::Index>(i);
        const double e = response_(row) - design_.row(row).dot(local.beta);
        out.rss += e * e;
        out.hat_trace += local.hat_ii;
        if (!cv_ok) continue;
        if (local.support < m) {
            std::ostringstream msg;
            msg << "location " << i << " has " << local.support
                << " neighbors besides itself, fewer than the " << m << " parameters";
            out.cv_failure = msg.str();
            cv_ok = false;
            continue;
        }
        const double leverage = 1.0 - local.hat_ii;
        if (!(leverage > 1e-10)) {
            out.cv_failure = "leave-one-out fit at location " + std::to_string(i) + " is singular";
            cv_ok = false;
            continue;
        }
        cv += (e / leverage) * (e / leverage);
    }
    if (cv_ok) out.cv_score = cv;
    return out;
}

GwrFit GwrProblem::fit(const GwrSpec& spec) const {
    spec.validate();
    const std::size_t n = size();
    const std::size_t m = parameters();
    if (n <= m + 1) {
        std::ostringstream msg;
        msg << "GWR needs more than " << m + 1 << " locations for " << m - 1 << " covariates";
        throw Error(ErrorKind::InvalidArgument, msg.str());
    }
    spec.bandwidth.validate_for(n);

    const auto nn = static_cast<Eigen::Index>(n);
    const auto mm = static_cast<Eigen::Index>(m);
    GwrFit fit;
    fit.spec = spec;
    fit.coefficient_names.push_back("intercept");
    for (const auto& c : covariates_) fit.coefficient_names.push_back(c);
    Eigen::MatrixXd beta(nn, mm);
    fit.local_r2.resize(nn);
    fit.fitted.resize(nn);
    fit.residuals.resize(nn);
    fit.hat_diagonal.resize(nn);
    fit.response = response_;

    double cv = 0.0;
    bool cv_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const Eigen::VectorXd w = focal_weights(i, spec.kernel, spec.bandwidth, spec.truncate_adaptive);
        const LocalSolve local = solve_local(i, w, false);
        beta.row(row) = local.beta.transpose();
        fit.fitted(row) = design_.row(row).dot(local.beta);
        fit.residuals(row) = response_(row) - fit.fitted(row);
        fit.hat_diagonal(row) = local.hat_ii;

        const double wsum = w.sum();
        const double ybar_w = w.dot(response_) / wsum;
        const Eigen::VectorXd local_resid = response_ - design_ * local.beta;
        const double rss_w = w.dot(local_resid.cwiseProduct(local_resid));
        const double tss_w = w.dot((response_.array() - ybar_w).square().matrix());
        fit.local_r2(row) = tss_w > 0.0 ? 1.0 - rss_w / tss_w : std::numeric_limits<double>::quiet_NaN();

        const double leverage = 1.0 - local.hat_ii;
        if (cv_ok && local.support >= m && leverage > 1e-10) {
            cv += (fit.residuals(row) / leverage) * (fit.residuals(row) / leverage);
        } else {
            cv_ok = false;
        }
    }

    // Coefficients in both standardized and raw covariate units.
    Eigen::MatrixXd raw = beta;
    Eigen::MatrixXd standardized = beta;
    for (Eigen::Index j = 1; j < mm; ++j) {
        const double mu = column_mean_(j - 1);
        const double sd = column_sd_(j - 1);
        if (normalize_) {
            raw.col(j) = beta.col(j) / sd;
            raw.col(0) -= beta.col(j) * (mu / sd);
        } else {
            standardized.col(j) = beta.col(j) * sd;
            standardized.col(0) += beta.col(j) * mu;
        }
    }
    fit.local_coefficients = std::move(raw);
    fit.normalized_coefficients = std::move(standardized);

    fit.hat_trace = fit.hat_diagonal.sum();
    fit.rss = fit.residuals.squaredNorm();
    fit.tss = (response_.array() - response_.mean()).square().sum();
    fit.global_r2 = fit.tss > 0.0 ? 1.0 - fit.rss / fit.tss : std::numeric_limits<double>::quiet_NaN();
    try {
        fit.aicc = gwr_aicc(fit);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Oversaturated && e.kind() != ErrorKind::DegenerateFit) throw;
    }
    if (cv_ok) fit.cv_score = cv;
    return fit;
}

double GwrProblem::total_sum_of_squares() const noexcept {
    return (response_.array() - response_.mean()).square().sum();
}

GwrFit gwr_fit(const GwrData& data, const GwrSpec& spec) {
    spec.validate();
    const GwrProblem problem(data, spec.covariates, spec.transform, spec.normalize);
    return problem.fit(spec);
}

double gwr_aicc(std::size_t n, double rss, double hat_trace) {
    const double nd = static_cast<double>(n);
    const double slack = nd - 2.0 - hat_trace;
    if (!(slack > 0.0)) {
        std::ostringstream msg;
        msg << "model is oversaturated: n - 2 - tr(S) = " << slack;
        throw Error(ErrorKind::Oversaturated, msg.str());
    }
    if (!(rss > 0.0) || !std::isfinite(rss)) {
        throw Error(ErrorKind::DegenerateFit, "residual sum of squares is zero; AICc is unbounded");
    }
    const double sigma = std::sqrt(rss / nd);
    return 2.0 * nd * std::log(sigma) + nd * std::log(2.0 * std::numbers::pi) +
           nd * (nd + hat_trace) / slack;
}

double gwr_aicc(const GwrFit& fit) {
    // Exact-fit guard relative to the response scale.
    if (fit.rss <= 1e-24 * std::max(fit.tss, std::numeric_limits<double>::min())) {
        throw Error(ErrorKind::DegenerateFit, "residual sum of squares is zero; AICc is unbounded");
    }
    return gwr_aicc(fit.n(), fit.rss, fit.hat_trace);
}

double gwr_cv_score(const GwrData& data, const GwrSpec& spec) {
    spec.validate();
    const GwrProblem problem(data, spec.covariates, spec.transform, spec.normalize);
    // Leave-one-out needs one spare location beyond an exact local fit.
    if (problem.size() < problem.parameters() + 1) {
        throw Error(ErrorKind::InvalidArgument, "too few locations for the requested covariates");
    }
    spec.bandwidth.validate_for(problem.size());
    for (std::size_t i = 0; i < problem.size(); ++i) {
        const Eigen::VectorXd w = problem.focal_weights(i, spec.kernel, spec.bandwidth, spec.truncate_adaptive);
        const auto support = static_cast<std::size_t>((w.array() > 0.0).count()) - (w(static_cast<Eigen::Index>(i)) > 0.0);
        if (support < problem.parameters()) {
            std::ostringstream msg;
            msg << "location " << i << " has " << support << " neighbors besides itself, fewer than the "
                << problem.parameters() << " parameters";
            throw Error(ErrorKind::InsufficientSupport, msg.str());
        }
    }
    const GwrEvaluation eval = problem.evaluate(spec.kernel, spec.bandwidth, true, spec.truncate_adaptive);
    if (!eval.cv_score) throw Error(ErrorKind::InsufficientSupport, eval.cv_failure);
    return *eval.cv_score;
}

NeighborScale nearest_neighbor_scale(std::span<const GeoPoint> locations, std::size_t k) {
    if (k < 1 || k >= locations.size()) {
        std::ostringstream msg;
        msg << "invalid k=" << k << " for " << locations.size() << " locations";
        throw Error(ErrorKind::InvalidArgument, msg.str());
    }
    NeighborScale out;
    out.distances = kth_neighbor_distances(distance_matrix(locations), k);
    std::vector<double> sorted = out.distances;
    std::sort(sorted.begin(), sorted.end());
    out.median = quantile_sorted(sorted, 0.5);
    out.interquartile = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    return out;
}

} // namespace fuelgeo
