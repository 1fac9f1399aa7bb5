#pragma once

// Straightforward reference implementations used to check the library.
// They favour obviousness over speed and share no code with src/.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fuelgeo/geo.hpp"

namespace oracle {

inline double great_circle_km(double lat1, double lon1, double lat2, double lon2) {
    // Spherical law of cosines in a numerically safe atan2 form (Vincenty on a sphere).
    const double r = std::numbers::pi / 180.0;
    const double p1 = lat1 * r, p2 = lat2 * r, dl = (lon2 - lon1) * r;
    const double num = std::hypot(std::cos(p2) * std::sin(dl),
                                  std::cos(p1) * std::sin(p2) - std::sin(p1) * std::cos(p2) * std::cos(dl));
    const double den = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
    return 6371.0 * std::atan2(num, den);
}

inline double distance(const fuelgeo::GeoPoint& a, const fuelgeo::GeoPoint& b) {
    return great_circle_km(a.lat(), a.lon(), b.lat(), b.lon());
}

inline double kernel(fuelgeo::KernelShape s, double d, double h) {
    const double u = d / h;
    switch (s) {
    case fuelgeo::KernelShape::Exponential: return std::exp(-u);
    case fuelgeo::KernelShape::Gaussian: return std::exp(-0.5 * u * u);
    case fuelgeo::KernelShape::Bisquare: return d < h ? (1 - u * u) * (1 - u * u) : 0.0;
    case fuelgeo::KernelShape::Step: return d <= h ? 1.0 : 0.0;
    }
    return 0.0;
}

/// Dense n x n weights with a zero diagonal, fixed bandwidth. Weights below
/// `floor` are dropped, as the sparse representation does.
inline Eigen::MatrixXd dense_weights(const std::vector<fuelgeo::GeoPoint>& pts, fuelgeo::KernelShape s, double h,
                                     double floor = 0.0) {
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) {
                const double v = kernel(s, distance(pts[i], pts[j]), h);
                w(i, j) = v < floor ? 0.0 : v;
            }
    return w;
}

inline double moran(const std::vector<double>& x, const Eigen::MatrixXd& w) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double num = 0.0, s0 = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        den += (x[i] - mean) * (x[i] - mean);
        for (std::size_t j = 0; j < n; ++j) {
            const double wij = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            num += wij * (x[i] - mean) * (x[j] - mean);
            s0 += wij;
        }
    }
    return static_cast<double>(n) / s0 * num / den;
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix, descending.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
    const auto n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

/// Least squares by the normal equations, solved with Gaussian elimination.
inline Eigen::VectorXd normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd* w = nullptr) {
    const auto k = x.cols();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k + 1);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double wr = w ? (*w)(r) : 1.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            for (Eigen::Index j = 0; j < k; ++j) a(i, j) += wr * x(r, i) * x(r, j);
            a(i, k) += wr * x(r, i) * y(r);
        }
    }
    for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::Index piv = c;
        for (Eigen::Index r = c + 1; r < k; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
        a.row(c).swap(a.row(piv));
        for (Eigen::Index r = 0; r < k; ++r) {
            if (r == c) continue;
            const double f = a(r, c) / a(c, c);
            a.row(r) -= f * a.row(c);
        }
    }
    Eigen::VectorXd beta(k);
    for (Eigen::Index i = 0; i < k; ++i) beta(i) = a(i, k) / a(i, i);
    return beta;
}

/// Group dummies (first group dropped) appended to an intercept and covariates.
inline Eigen::MatrixXd with_dummies(const Eigen::MatrixXd& x, const std::vector<std::string>& groups) {
    std::map<std::string, Eigen::Index> code;
    for (const auto& g : groups) code.emplace(g, 0);
    Eigen::Index next = 0;
    for (auto& [g, c] : code) c = next++;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(x.rows(), 1 + x.cols() + next - 1);
    d.col(0).setOnes();
    d.middleCols(1, x.cols()) = x;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const auto c = code.at(groups[static_cast<std::size_t>(r)]);
        if (c > 0) d(r, x.cols() + c) = 1.0;
    }
    return d;
}

/// HC1 robust standard errors computed from their textbook definition.
inline Eigen::VectorXd hc1(const Eigen::MatrixXd& x, const Eigen::VectorXd& u) {
    const double n = static_cast<double>(x.rows()), k = static_cast<double>(x.cols());
    const Eigen::MatrixXd inv = (x.transpose() * x).inverse();
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(x.cols(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) meat += u(i) * u(i) * x.row(i).transpose() * x.row(i);
    const Eigen::MatrixXd v = n / (n - k) * inv * meat * inv;
    return v.diagonal().array().sqrt();
}

/// k-th nearest distances by sorting every row of the full distance table.
inline std::vector<double> kth_nn(const std::vector<fuelgeo::GeoPoint>& pts, std::size_t k) {
    std::vector<double> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::vector<double> d;
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (j != i) d.push_back(fuelgeo::haversine_distance(pts[i], pts[j]));
        std::sort(d.begin(), d.end());
        out.push_back(d[k - 1]);
    }
    return out;
}

} // namespace oracle
