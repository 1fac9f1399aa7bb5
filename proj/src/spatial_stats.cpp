#include "fuelgeo/spatial_stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "fuelgeo/error.hpp"
#include "fuelgeo/summary.hpp"

namespace fuelgeo {

std::string_view to_string(WindowKind kind) noexcept {
    return kind == WindowKind::Daily ? "daily" : "weekly";
}

WindowKind parse_window_kind(std::string_view name) {
    if (name == "daily") return WindowKind::Daily;
    if (name == "weekly") return WindowKind::Weekly;
    throw Error(ErrorKind::InvalidArgument, "unknown window kind: " + std::string(name));
}

MoranResult moran_index(std::span<const double> values, const SpatialWeights& w) {
    const std::size_t n = values.size();
    if (n != w.n()) {
        throw Error(ErrorKind::InvalidArgument, "value count does not match weight dimension");
    }
    if (n == 0) throw Error(ErrorKind::EmptyInput, "moran index of empty input");
    const double xbar = mean(values);
    std::vector<double> z(n);
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = values[i] - xbar;
        denom += z[i] * z[i];
    }
    const double scale = std::max(1.0, std::abs(xbar));
    if (!(denom > 1e-24 * scale * scale * static_cast<double>(n))) {
        throw Error(ErrorKind::ZeroVariance, "moran index of a constant vector");
    }
    double s0 = 0.0;
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (const auto& e : w.row(i)) {
            acc += e.weight * z[e.col];
            s0 += e.weight;
        }
        cross += z[i] * acc;
    }
    if (!(s0 > 0.0)) throw Error(ErrorKind::EmptyWeights, "spatial weights sum to zero");

    MoranResult out;
    out.index = (static_cast<double>(n) / s0) * cross / denom;
    out.n = n;
    out.sum_weights = s0;
    return out;
}

SweepResult moran_sweep(std::span<const GeoPoint> locations, std::span<const PanelValue> panel,
                        WindowKind windows, std::span<const double> d0_list,
                        const SweepOptions& options) {
    if (panel.empty()) throw Error(ErrorKind::EmptyInput, "moran sweep on an empty panel");
    if (d0_list.empty()) throw Error(ErrorKind::InvalidArgument, "moran sweep needs at least one d0");

    Day first = panel.front().day;
    for (const auto& p : panel) {
        if (p.location >= locations.size()) {
            throw Error(ErrorKind::InvalidArgument, "panel references an unknown location");
        }
        first = std::min(first, p.day);
    }

    auto window_start = [&](Day d) {
        if (windows == WindowKind::Daily) return d;
        const auto offset = (d - first).count();
        return first + std::chrono::days{(offset / 7) * 7};
    };

    // window start -> location -> (sum, count)
    std::map<Day, std::map<std::size_t, std::pair<double, std::size_t>>> cells;
    for (const auto& p : panel) {
        auto& c = cells[window_start(p.day)][p.location];
        c.first += p.value;
        c.second += 1;
    }

    SweepResult out;
    for (const auto& [start, by_location] : cells) {
        const TimeWindow window{start, windows};
        std::vector<GeoPoint> pts;
        std::vector<double> vals;
        for (const auto& [loc, acc] : by_location) {
            pts.push_back(locations[loc]);
            vals.push_back(acc.first / static_cast<double>(acc.second));
        }
        const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
        if (vals.size() < options.min_locations) {
            out.skipped.push_back({window, std::nullopt, "fewer than " +
                                   std::to_string(options.min_locations) + " locations"});
            continue;
        }
        if (*lo == *hi) {
            out.skipped.push_back({window, std::nullopt, "constant values"});
            continue;
        }
        for (double d0 : d0_list) {
            try {
                auto w = build_weights(pts, options.kernel, Bandwidth::fixed(d0));
                if (options.row_standardize) w = w.row_standardized();
                MoranResult r = moran_index(vals, w);
                r.window = window;
                r.d0 = d0;
                out.rows.push_back(r);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::EmptyWeights && e.kind() != ErrorKind::ZeroVariance) throw;
                out.skipped.push_back({window, d0, e.what()});
            }
        }
    }
    return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double spearman_rank(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "spearman: length mismatch");
    if (x.size() < 2) throw Error(ErrorKind::InvalidArgument, "spearman needs at least two values");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

std::vector<std::size_t> factorize(std::span<const std::string> labels, std::size_t* n_levels) {
    std::unordered_map<std::string, std::size_t> codes;
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
        auto [it, inserted] = codes.try_emplace(l, codes.size());
        out.push_back(it->second);
    }
    if (n_levels) *n_levels = codes.size();
    return out;
}

VarianceDecomposition variance_decomposition(std::span<const double> values,
                                             std::span<const std::size_t> groups,
                                             std::string grouping) {
    if (values.empty()) throw Error(ErrorKind::EmptyInput, "variance decomposition of empty input");
    if (values.size() != groups.size()) {
        throw Error(ErrorKind::InvalidArgument, "every value needs a group label");
    }
    const double grand = mean(values);
    const std::size_t g = *std::max_element(groups.begin(), groups.end()) + 1;
    std::vector<double> sums(g, 0.0);
    std::vector<std::size_t> counts(g, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        sums[groups[i]] += values[i];
        counts[groups[i]] += 1;
    }
    std::vector<double> means(g, 0.0);
    VarianceDecomposition out;
    out.grouping = std::move(grouping);
    for (std::size_t k = 0; k < g; ++k) {
        if (counts[k] == 0) continue;
        ++out.n_groups;
        means[k] = sums[k] / static_cast<double>(counts[k]);
        out.between += static_cast<double>(counts[k]) * (means[k] - grand) * (means[k] - grand);
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double dt = values[i] - grand;
        const double dw = values[i] - means[groups[i]];
        out.total += dt * dt;
        out.within += dw * dw;
    }
    return out;
}

VarianceDecomposition variance_decomposition(std::span<const double> values,
                                             std::span<const std::string> groups,
                                             std::string grouping) {
    if (values.size() != groups.size()) {
        throw Error(ErrorKind::InvalidArgument, "every value needs a group label");
    }
    const auto codes = factorize(groups);
    return variance_decomposition(values, std::span<const std::size_t>(codes), std::move(grouping));
}

std::vector<double> pca_variance_explained(const Eigen::MatrixXd& data, bool normalize,
                                           std::span<const std::string> column_names) {
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    if (p < 1 || n <= p) {
        throw Error(ErrorKind::InvalidArgument, "PCA needs n > p >= 1");
    }
    Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    if (normalize) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const double sd = std::sqrt(centered.col(j).squaredNorm() / static_cast<double>(n - 1));
            if (!(sd > 1e-14 * std::max(1.0, data.col(j).cwiseAbs().maxCoeff()))) {
                std::ostringstream msg;
                msg << "column ";
                if (static_cast<std::size_t>(j) < column_names.size()) {
                    msg << "'" << column_names[static_cast<std::size_t>(j)] << "'";
                } else {
                    msg << j;
                }
                msg << " has zero variance";
                throw Error(ErrorKind::ZeroVariance, msg.str());
            }
            centered.col(j) /= sd;
        }
    }
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
    std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + p);
    for (auto& v : ev) v = std::max(v, 0.0);
    std::sort(ev.begin(), ev.end(), std::greater<>());
    const double total = std::accumulate(ev.begin(), ev.end(), 0.0);
    if (!(total > 0.0)) throw Error(ErrorKind::ZeroVariance, "all columns are constant");
    for (auto& v : ev) v /= total;
    return ev;
}

} // namespace fuelgeo
