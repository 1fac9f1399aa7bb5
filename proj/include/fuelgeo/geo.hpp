#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace fuelgeo {

inline constexpr double kEarthRadiusKm = 6371.0;

/// Geographic position in decimal degrees. Out-of-range coordinates are
/// rejected at construction.
class GeoPoint {
public:
    GeoPoint(double lat, double lon);

    double lat() const noexcept { return lat_; }
    double lon() const noexcept { return lon_; }

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

private:
    double lat_;
    double lon_;
};

/// Great-circle distance in kilometers on a sphere of radius kEarthRadiusKm.
double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept;

enum class KernelShape { Exponential, Gaussian, Bisquare, Step };

inline constexpr KernelShape kAllKernels[] = {
    KernelShape::Exponential, KernelShape::Gaussian, KernelShape::Bisquare, KernelShape::Step};

std::string_view to_string(KernelShape shape) noexcept;
KernelShape parse_kernel(std::string_view name);

/// Kernel value at distance d for scale h. Throws InvalidBandwidth when h <= 0.
double kernel_weight(KernelShape shape, double d, double h);

struct FixedDistance {
    double km;
    friend bool operator==(const FixedDistance&, const FixedDistance&) = default;
};

struct AdaptiveKnn {
    std::size_t k;
    friend bool operator==(const AdaptiveKnn&, const AdaptiveKnn&) = default;
};

class Bandwidth {
public:
    static Bandwidth fixed(double km);
    static Bandwidth adaptive(std::size_t k);

    bool is_fixed() const noexcept { return std::holds_alternative<FixedDistance>(mode_); }
    bool is_adaptive() const noexcept { return !is_fixed(); }
    double distance_km() const { return std::get<FixedDistance>(mode_).km; }
    std::size_t neighbors() const { return std::get<AdaptiveKnn>(mode_).k; }

    /// Throws InvalidBandwidth when an adaptive k is outside [1, n-1].
    void validate_for(std::size_t n) const;

    /// Numeric value: kilometers for fixed, neighbor count for adaptive.
    double value() const noexcept;
    std::string describe() const;

    friend bool operator==(const Bandwidth&, const Bandwidth&) = default;

private:
    explicit Bandwidth(std::variant<FixedDistance, AdaptiveKnn> mode) : mode_(mode) {}
    std::variant<FixedDistance, AdaptiveKnn> mode_;
};

/// Symmetric pairwise distances in km.
Eigen::MatrixXd distance_matrix(std::span<const GeoPoint> points);

/// Distance from every point to its k-th nearest other point (k >= 1).
std::vector<double> kth_neighbor_distances(const Eigen::MatrixXd& distances, std::size_t k);

/// Sparse row-major weight structure. Entries below kWeightFloor are not
/// stored and the diagonal is always zero.
class SpatialWeights {
public:
    static constexpr double kWeightFloor = 1e-12;

    struct Entry {
        std::size_t col;
        double weight;
    };

    SpatialWeights(std::size_t n, std::vector<std::size_t> row_offsets, std::vector<Entry> entries,
                   KernelShape shape, Bandwidth bandwidth);

    std::size_t n() const noexcept { return n_; }
    std::span<const Entry> row(std::size_t i) const;
    std::size_t nonzeros() const noexcept { return entries_.size(); }

    /// w_ij, zero when not stored.
    double weight(std::size_t i, std::size_t j) const;
    double sum() const noexcept;

    KernelShape shape() const noexcept { return shape_; }
    const Bandwidth& bandwidth() const noexcept { return bandwidth_; }

    /// Copy with each non-empty row rescaled to sum to one.
    SpatialWeights row_standardized() const;

private:
    std::size_t n_;
    std::vector<std::size_t> offsets_;
    std::vector<Entry> entries_;
    KernelShape shape_;
    Bandwidth bandwidth_;
};

SpatialWeights build_weights(std::span<const GeoPoint> points, KernelShape shape,
                             const Bandwidth& bw);

} // namespace fuelgeo
