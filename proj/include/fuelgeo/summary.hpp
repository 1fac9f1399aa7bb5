#pragma once

#include <span>
#include <vector>

namespace fuelgeo {

double mean(std::span<const double> values);

/// Sample standard deviation (n-1 denominator); 0 for a single value.
double sample_sd(std::span<const double> values);

/// Quantile with linear interpolation between closest ranks
/// (h = (n-1)p on the sorted sample). `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double p);

double quantile(std::vector<double> values, double p);

double pearson(std::span<const double> x, std::span<const double> y);

} // namespace fuelgeo
