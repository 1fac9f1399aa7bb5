#include "fuelgeo/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fuelgeo/error.hpp"

namespace fuelgeo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

} // namespace

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
    if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
        std::ostringstream msg;
        msg << "coordinates out of range: (" << lat << ", " << lon << ")";
        throw Error(ErrorKind::InvalidArgument, msg.str());
    }
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
    const double phi1 = a.lat() * kDegToRad;
    const double phi2 = b.lat() * kDegToRad;
    const double dphi = phi2 - phi1;
    const double dlambda = (b.lon() - a.lon()) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

std::string_view to_string(KernelShape shape) noexcept {
    switch (shape) {
    case KernelShape::Exponential: return "exponential";
    case KernelShape::Gaussian: return "gaussian";
    case KernelShape::Bisquare: return "bisquare";
    case KernelShape::Step: return "step";
    }
    return "unknown";
}

KernelShape parse_kernel(std::string_view name) {
    for (auto shape : kAllKernels) {
        if (to_string(shape) == name) return shape;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown kernel: " + std::string(name));
}

double kernel_weight(KernelShape shape, double d, double h) {
    if (!(h > 0.0)) {
        throw Error(ErrorKind::InvalidBandwidth, "kernel bandwidth must be positive");
    }
    if (!(d >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "kernel distance must be non-negative");
    }
    const double u = d / h;
    switch (shape) {
    case KernelShape::Exponential: return std::exp(-u);
    case KernelShape::Gaussian: return std::exp(-0.5 * u * u);
    case KernelShape::Bisquare: {
        if (d >= h) return 0.0;
        const double t = 1.0 - u * u;
        return t * t;
    }
    case KernelShape::Step: return d <= h ? 1.0 : 0.0;
    }
    return 0.0;
}

Bandwidth Bandwidth::fixed(double km) {
    if (!(km > 0.0) || !std::isfinite(km)) {
        throw Error(ErrorKind::InvalidBandwidth, "fixed bandwidth must be a positive distance");
    }
    return Bandwidth(FixedDistance{km});
}

Bandwidth Bandwidth::adaptive(std::size_t k) {
    if (k < 1) {
        throw Error(ErrorKind::InvalidBandwidth, "adaptive bandwidth needs k >= 1");
    }
    return Bandwidth(AdaptiveKnn{k});
}

void Bandwidth::validate_for(std::size_t n) const {
    if (is_adaptive() && (neighbors() < 1 || neighbors() + 1 > n)) {
        std::ostringstream msg;
        msg << "adaptive bandwidth k=" << neighbors() << " requires 1 <= k <= n-1 (n=" << n << ")";
        throw Error(ErrorKind::InvalidBandwidth, msg.str());
    }
}

double Bandwidth::value() const noexcept {
    return is_fixed() ? std::get<FixedDistance>(mode_).km
                      : static_cast<double>(std::get<AdaptiveKnn>(mode_).k);
}

std::string Bandwidth::describe() const {
    std::ostringstream out;
    if (is_fixed()) {
        out << "fixed:" << distance_km() << "km";
    } else {
        out << "adaptive:" << neighbors();
    }
    return out.str();
}

Eigen::MatrixXd distance_matrix(std::span<const GeoPoint> points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dij = haversine_distance(points[i], points[j]);
            d(i, j) = dij;
            d(j, i) = dij;
        }
    }
    return d;
}

std::vector<double> kth_neighbor_distances(const Eigen::MatrixXd& distances, std::size_t k) {
    const auto n = static_cast<std::size_t>(distances.rows());
    if (k < 1 || k >= n) {
        std::ostringstream msg;
        msg << "neighbor rank k=" << k << " requires 1 <= k < n (n=" << n << ")";
        throw Error(ErrorKind::InvalidArgument, msg.str());
    }
    std::vector<double> out(n);
    std::vector<double> row;
    row.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) row.push_back(distances(i, j));
        }
        std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.end());
        out[i] = row[k - 1];
    }
    return out;
}

SpatialWeights::SpatialWeights(std::size_t n, std::vector<std::size_t> row_offsets,
                               std::vector<Entry> entries, KernelShape shape, Bandwidth bandwidth)
    : n_(n), offsets_(std::move(row_offsets)), entries_(std::move(entries)), shape_(shape),
      bandwidth_(bandwidth) {
    if (offsets_.size() != n_ + 1 || offsets_.back() != entries_.size()) {
        throw Error(ErrorKind::InvalidArgument, "inconsistent sparse weight layout");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        for (const auto& e : row(i)) {
            if (e.col >= n_ || e.col == i || !(e.weight >= 0.0)) {
                throw Error(ErrorKind::InvalidArgument, "invalid weight entry");
            }
        }
    }
}

std::span<const SpatialWeights::Entry> SpatialWeights::row(std::size_t i) const {
    return std::span<const Entry>(entries_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

double SpatialWeights::weight(std::size_t i, std::size_t j) const {
    const auto r = row(i);
    const auto it = std::lower_bound(r.begin(), r.end(), j,
                                     [](const Entry& e, std::size_t col) { return e.col < col; });
    return (it != r.end() && it->col == j) ? it->weight : 0.0;
}

double SpatialWeights::sum() const noexcept {
    double s = 0.0;
    for (const auto& e : entries_) s += e.weight;
    return s;
}

SpatialWeights SpatialWeights::row_standardized() const {
    std::vector<Entry> scaled = entries_;
    for (std::size_t i = 0; i < n_; ++i) {
        double rs = 0.0;
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) rs += scaled[k].weight;
        if (rs <= 0.0) continue;
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) scaled[k].weight /= rs;
    }
    return SpatialWeights(n_, offsets_, std::move(scaled), shape_, bandwidth_);
}

SpatialWeights build_weights(std::span<const GeoPoint> points, KernelShape shape,
                             const Bandwidth& bw) {
    const std::size_t n = points.size();
    if (n < 2) {
        throw Error(ErrorKind::InvalidArgument, "spatial weights need at least two points");
    }
    bw.validate_for(n);
    const Eigen::MatrixXd d = distance_matrix(points);

    std::vector<double> scale(n);
    if (bw.is_fixed()) {
        std::fill(scale.begin(), scale.end(), bw.distance_km());
    } else {
        scale = kth_neighbor_distances(d, bw.neighbors());
        for (std::size_t i = 0; i < n; ++i) {
            if (!(scale[i] > 0.0)) {
                std::ostringstream msg;
                msg << "location " << i << " has zero distance to its " << bw.neighbors()
                    << "-th neighbor (duplicate coordinates)";
                throw Error(ErrorKind::DegenerateBandwidth, msg.str());
            }
        }
    }

    std::vector<std::size_t> offsets{0};
    offsets.reserve(n + 1);
    std::vector<SpatialWeights::Entry> entries;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double w = kernel_weight(shape, d(i, j), scale[i]);
            if (w >= SpatialWeights::kWeightFloor) entries.push_back({j, w});
        }
        offsets.push_back(entries.size());
    }
    return SpatialWeights(n, std::move(offsets), std::move(entries), shape, bw);
}

} // namespace fuelgeo
