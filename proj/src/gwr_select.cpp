#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "fuelgeo/error.hpp"
#include "fuelgeo/gwr.hpp"
#include "fuelgeo/summary.hpp"

namespace fuelgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvPhi = 0.6180339887498949; // 1 / golden ratio

// Criterion value at one bandwidth, +inf when the configuration is infeasible.
double criterion_at(const GwrProblem& problem, KernelShape kernel, const Bandwidth& bw,
                    Criterion criterion, bool truncate) {
    try {
        const GwrEvaluation eval = problem.evaluate(kernel, bw, criterion == Criterion::CV, truncate);
        if (criterion == Criterion::CV) return eval.cv_score ? *eval.cv_score : kInf;
        if (eval.rss <= 1e-24 * std::max(problem.total_sum_of_squares(), std::numeric_limits<double>::min())) {
            return kInf;
        }
        return gwr_aicc(problem.size(), eval.rss, eval.hat_trace);
    } catch (const Error& e) {
        switch (e.kind()) {
        case ErrorKind::SingularFit:
        case ErrorKind::Oversaturated:
        case ErrorKind::DegenerateFit:
        case ErrorKind::DegenerateBandwidth:
        case ErrorKind::InsufficientSupport:
            return kInf;
        default:
            throw;
        }
    }
}

class IntegerSearch {
public:
    IntegerSearch(const GwrProblem& problem, KernelShape kernel, Criterion criterion, bool truncate,
                  BandwidthChoice& out)
        : problem_(problem), kernel_(kernel), criterion_(criterion), truncate_(truncate), out_(out) {}

    // Smallest k among the best evaluated scores.
    long best() const {
        long k = memo_.begin()->first;
        double s = memo_.begin()->second;
        for (const auto& [kk, ss] : memo_) {
            if (ss < s) {
                k = kk;
                s = ss;
            }
        }
        return k;
    }

    double operator()(long k) {
        const auto it = memo_.find(k);
        if (it != memo_.end()) return it->second;
        const double s = criterion_at(problem_, kernel_, Bandwidth::adaptive(static_cast<std::size_t>(k)),
                                      criterion_, truncate_);
        memo_.emplace(k, s);
        out_.trace.emplace_back(static_cast<double>(k), s);
        return s;
    }

private:
    const GwrProblem& problem_;
    KernelShape kernel_;
    Criterion criterion_;
    bool truncate_;
    BandwidthChoice& out_;
    std::map<long, double> memo_;
};

// Smallest argmin over [a, b].
long scan_min(IntegerSearch& f, long a, long b) {
    long best = a;
    double best_score = f(a);
    for (long k = a + 1; k <= b; ++k) {
        const double s = f(k);
        if (s < best_score) {
            best = k;
            best_score = s;
        }
    }
    return best;
}

long golden_integer(IntegerSearch& f, long lo, long hi) {
    long a = lo;
    long b = hi;
    while (b - a > 3) {
        long c = b - static_cast<long>(std::lround(static_cast<double>(b - a) * kInvPhi));
        long d = a + static_cast<long>(std::lround(static_cast<double>(b - a) * kInvPhi));
        c = std::clamp(c, a + 1, b - 2);
        d = std::clamp(d, c + 1, b - 1);
        const double fc = f(c);
        const double fd = f(d);
        if (fc == kInf && fd == kInf) {
            a = c; // infeasible region: small bandwidths fail first
        } else if (fc <= fd) {
            b = d;
        } else {
            a = c;
        }
    }
    scan_min(f, a, b);
    long k = f.best();
    // Settle onto the smallest k of a flat minimum and off any shallow step.
    for (bool moved = true; moved;) {
        moved = false;
        while (k > lo && f(k - 1) <= f(k)) {
            --k;
            moved = true;
        }
        while (k < hi && f(k + 1) < f(k)) {
            ++k;
            moved = true;
        }
    }
    return k;
}

} // namespace

std::string_view to_string(Criterion c) noexcept {
    return c == Criterion::AICc ? "aicc" : "cv";
}

Criterion parse_criterion(std::string_view name) {
    if (name == "aicc" || name == "AICc") return Criterion::AICc;
    if (name == "cv" || name == "CV") return Criterion::CV;
    throw Error(ErrorKind::InvalidArgument, "unknown criterion: " + std::string(name));
}

BandwidthChoice optimize_bandwidth(const GwrData& data, std::span<const std::string> covariates,
                                   KernelShape kernel, Criterion criterion, BandwidthMode mode,
                                   const BandwidthSearchOptions& options) {
    const GwrProblem problem(data, covariates, options.transform, options.normalize, options.geometry);
    return optimize_bandwidth(problem, kernel, criterion, mode, options);
}

BandwidthChoice optimize_bandwidth(const GwrProblem& problem, KernelShape kernel,
                                   Criterion criterion, BandwidthMode mode,
                                   const BandwidthSearchOptions& options) {
    const std::size_t n = problem.size();
    const std::size_t p = problem.parameters() - 1;
    BandwidthChoice out;

    if (mode == BandwidthMode::AdaptiveKnn) {
        const auto lo = static_cast<long>(p + 2);
        const auto hi = static_cast<long>(n) - 1;
        if (lo > hi) {
            std::ostringstream msg;
            msg << "no admissible neighbor count: need p + 2 <= n - 1 (p=" << p << ", n=" << n << ")";
            throw Error(ErrorKind::NoFeasibleBandwidth, msg.str());
        }
        out.lower = static_cast<double>(lo);
        out.upper = static_cast<double>(hi);
        IntegerSearch f(problem, kernel, criterion, options.truncate_adaptive, out);
        const long k = options.exhaustive ? scan_min(f, lo, hi) : golden_integer(f, lo, hi);
        out.score = f(k);
        out.bandwidth = Bandwidth::adaptive(static_cast<std::size_t>(k));
    } else {
        const auto& geo = problem.geometry();
        const double lo = geo.min_positive_neighbor_distance();
        const double hi = geo.diameter();
        if (!(lo > 0.0) || !(hi > lo)) {
            throw Error(ErrorKind::NoFeasibleBandwidth, "degenerate distance range for fixed bandwidth search");
        }
        out.lower = lo;
        out.upper = hi;
        std::map<double, double> memo;
        auto f = [&](double d) {
            const auto it = memo.find(d);
            if (it != memo.end()) return it->second;
            const double s = criterion_at(problem, kernel, Bandwidth::fixed(d), criterion, false);
            memo.emplace(d, s);
            out.trace.emplace_back(d, s);
            return s;
        };
        if (options.exhaustive) {
            const std::size_t m = std::max<std::size_t>(options.fixed_scan_points, 2);
            const double ratio = std::log(hi / lo);
            for (std::size_t i = 0; i < m; ++i) {
                f(lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(m - 1)));
            }
        } else {
            double a = lo;
            double b = hi;
            double c = b - kInvPhi * (b - a);
            double d = a + kInvPhi * (b - a);
            double fc = f(c);
            double fd = f(d);
            while ((b - a) > options.relative_tolerance * 0.5 * (a + b)) {
                if ((fc == kInf && fd == kInf) ? false : fc <= fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - kInvPhi * (b - a);
                    fc = f(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + kInvPhi * (b - a);
                    fd = f(d);
                }
            }
            f(0.5 * (a + b));
        }
        // Best evaluated point; ties resolve to the smaller distance.
        double best_d = memo.begin()->first;
        double best_s = memo.begin()->second;
        for (const auto& [d, s] : memo) {
            if (s < best_s) {
                best_d = d;
                best_s = s;
            }
        }
        out.score = best_s;
        out.bandwidth = Bandwidth::fixed(best_d);
    }

    if (!std::isfinite(out.score)) {
        throw Error(ErrorKind::NoFeasibleBandwidth,
                    "criterion could not be evaluated anywhere in the bandwidth search range");
    }
    return out;
}

std::vector<std::size_t> ModelSelectionReport::ranking() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].ok) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return *entries[a].aicc < *entries[b].aicc; });
    return idx;
}

ModelSelectionReport enumerate_models(const GwrData& data,
                                      std::span<const std::string> all_covariates,
                                      std::span<const KernelShape> kernels, Criterion criterion,
                                      const EnumerateOptions& options) {
    const std::size_t q = all_covariates.size();
    if (q == 0 || q > 20) throw Error(ErrorKind::InvalidArgument, "enumerate_models needs 1..20 covariates");
    if (kernels.empty()) throw Error(ErrorKind::InvalidArgument, "enumerate_models needs at least one kernel");
    data.validate();

    auto geometry = options.search.geometry ? options.search.geometry
                                            : std::make_shared<const GwrGeometry>(data.points);

    std::vector<std::vector<std::string>> subsets;
    for (std::size_t mask = 1; mask < (std::size_t{1} << q); ++mask) {
        std::vector<std::string> s;
        for (std::size_t j = 0; j < q; ++j) {
            if (mask & (std::size_t{1} << j)) s.push_back(all_covariates[j]);
        }
        subsets.push_back(std::move(s));
    }

    ModelSelectionReport report;
    report.criterion = criterion;
    report.mode = options.mode;
    report.entries.resize(subsets.size() * kernels.size());

    auto run_one = [&](std::size_t idx) {
        ModelEntry& entry = report.entries[idx];
        entry.covariates = subsets[idx / kernels.size()];
        entry.kernel = kernels[idx % kernels.size()];
        try {
            const GwrProblem problem(data, entry.covariates, options.search.transform,
                                     options.search.normalize, geometry);
            const BandwidthChoice choice =
                optimize_bandwidth(problem, entry.kernel, criterion, options.mode, options.search);
            entry.bandwidth = choice.bandwidth;
            entry.criterion_score = choice.score;
            GwrSpec spec;
            spec.covariates = entry.covariates;
            spec.kernel = entry.kernel;
            spec.bandwidth = choice.bandwidth;
            spec.transform = options.search.transform;
            spec.normalize = options.search.normalize;
            spec.truncate_adaptive = options.search.truncate_adaptive;
            const GwrFit fit = problem.fit(spec);
            entry.aicc = fit.aicc;
            entry.cv_score = fit.cv_score;
            entry.global_r2 = fit.global_r2;
            entry.hat_trace = fit.hat_trace;
            entry.ok = fit.aicc.has_value();
            if (!entry.ok) entry.failure = "AICc undefined at the selected bandwidth";
        } catch (const Error& e) {
            entry.ok = false;
            entry.failure = e.what();
        }
    };

    const std::size_t total = report.entries.size();
    const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, total);
    if (threads == 1) {
        for (std::size_t i = 0; i < total; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < total; i = next++) run_one(i);
            });
        }
    }

    const auto order = report.ranking();
    report.failed = total - order.size();
    if (order.empty()) {
        throw Error(ErrorKind::EmptyReport, "every model configuration failed");
    }
    report.best = order.front();
    std::vector<double> gaps;
    for (std::size_t i = 1; i < order.size(); ++i) {
        gaps.push_back(*report.entries[order[i]].aicc - *report.entries[report.best].aicc);
    }
    report.median_aicc_gap = gaps.empty() ? 0.0 : quantile(gaps, 0.5);
    return report;
}

} // namespace fuelgeo
