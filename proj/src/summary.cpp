#include "fuelgeo/summary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fuelgeo/error.hpp"

namespace fuelgeo {

double mean(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorKind::EmptyInput, "mean of empty sample");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
    const double m = mean(values);
    if (values.size() < 2) return 0.0;
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw Error(ErrorKind::EmptyInput, "quantile of empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "quantile level outside [0, 1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, p);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "length mismatch");
    if (x.size() < 2) throw Error(ErrorKind::InvalidArgument, "correlation needs at least two values");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) throw Error(ErrorKind::ZeroVariance, "correlation of a constant vector");
    return sxy / std::sqrt(sxx * syy);
}

} // namespace fuelgeo
