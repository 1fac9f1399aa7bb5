#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fuelgeo/geo.hpp"

namespace fuelgeo {

using Day = std::chrono::sys_days;

enum class WindowKind { Daily, Weekly };

std::string_view to_string(WindowKind kind) noexcept;
WindowKind parse_window_kind(std::string_view name);

struct TimeWindow {
    Day start;
    WindowKind kind;
};

struct MoranResult {
    double index = 0.0;
    std::size_t n = 0;
    double sum_weights = 0.0;
    std::optional<TimeWindow> window;
    std::optional<double> d0;
};

/// Global Moran statistic with the weights used as given (no
/// standardization). Throws ZeroVariance for constant values and
/// EmptyWeights when the weights sum to zero.
MoranResult moran_index(std::span<const double> values, const SpatialWeights& w);

struct PanelValue {
    std::size_t location;
    Day day;
    double value;
};

struct SweepOptions {
    KernelShape kernel = KernelShape::Exponential;
    bool row_standardize = false;
    std::size_t min_locations = 3;
};

struct SkippedCell {
    TimeWindow window;
    std::optional<double> d0; // empty when the whole window was skipped
    std::string reason;
};

struct SweepResult {
    std::vector<MoranResult> rows; // window-major, d0 in input order
    std::vector<SkippedCell> skipped;
};

/// Moran index per (time window, decay distance). Values are averaged per
/// location inside each window; windows that are too small or constant are
/// reported in `skipped`.
SweepResult moran_sweep(std::span<const GeoPoint> locations, std::span<const PanelValue> panel,
                        WindowKind windows, std::span<const double> d0_list,
                        const SweepOptions& options = {});

/// Tie-aware Spearman correlation (Pearson correlation of average ranks).
double spearman_rank(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based), ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

struct VarianceDecomposition {
    double total = 0.0;
    double between = 0.0;
    double within = 0.0;
    std::size_t n_groups = 0;
    std::string grouping;
};

VarianceDecomposition variance_decomposition(std::span<const double> values,
                                             std::span<const std::size_t> groups,
                                             std::string grouping = {});
VarianceDecomposition variance_decomposition(std::span<const double> values,
                                             std::span<const std::string> groups,
                                             std::string grouping = {});

/// Dense codes 0..g-1 in order of first appearance.
std::vector<std::size_t> factorize(std::span<const std::string> labels, std::size_t* n_levels = nullptr);

/// Share of variance carried by each principal component, descending.
/// With `normalize`, columns are standardized first (correlation matrix).
std::vector<double> pca_variance_explained(const Eigen::MatrixXd& data, bool normalize,
                                           std::span<const std::string> column_names = {});

} // namespace fuelgeo
