#include <doctest.h>

#include <numeric>
#include <random>

#include "fuelgeo/error.hpp"
#include "fuelgeo/spatial_stats.hpp"
#include "oracles.hpp"

using namespace fuelgeo;

namespace {

std::vector<GeoPoint> random_points(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> lat(35.0, 40.0), lon(-100.0, -94.0);
    std::vector<GeoPoint> p;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = lat(rng);
        p.emplace_back(a, lon(rng));
    }
    return p;
}

std::vector<double> normals(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> z;
    std::vector<double> v(n);
    for (auto& x : v) x = z(rng);
    return v;
}

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidArgument;
}

const Day kDay0 = Day{std::chrono::year{2017} / 1 / 10};

} // namespace

TEST_CASE("moran two-point antisymmetric case") {
    const std::vector<GeoPoint> p = {{40, -100}, {40, -99.9}};
    const auto w = build_weights(p, KernelShape::Exponential, Bandwidth::fixed(10.0));
    const auto r = moran_index(std::vector<double>{1.0, -1.0}, w);
    CHECK(r.index == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.n == 2);
    CHECK(r.sum_weights == doctest::Approx(w.sum()));
}

TEST_CASE("moran degenerate inputs") {
    const std::vector<GeoPoint> p = {{40, -100}, {40, -99.9}, {40.1, -99.9}};
    const auto w = build_weights(p, KernelShape::Exponential, Bandwidth::fixed(10.0));
    CHECK(kind_of([&] { moran_index(std::vector<double>{2.28, 2.28, 2.28}, w); }) == ErrorKind::ZeroVariance);
    const auto empty = build_weights(p, KernelShape::Step, Bandwidth::fixed(0.01));
    CHECK(kind_of([&] { moran_index(std::vector<double>{1, 2, 3}, empty); }) == ErrorKind::EmptyWeights);
    CHECK(kind_of([&] { moran_index(std::vector<double>{1, 2}, w); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("moran matches the double-loop oracle") {
    std::mt19937_64 rng(101);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 3 + static_cast<std::size_t>(t % 8);
        const auto p = random_points(rng, n);
        const auto x = normals(rng, n);
        const auto shape = kAllKernels[t % 4];
        const double h = shape == KernelShape::Step || shape == KernelShape::Bisquare ? 800.0 : 50.0;
        const auto w = build_weights(p, shape, Bandwidth::fixed(h));
        const auto ref = oracle::moran(x, oracle::dense_weights(p, shape, h, SpatialWeights::kWeightFloor));
        CHECK(std::abs(moran_index(x, w).index - ref) < 1e-12);
    }
}

TEST_CASE("moran is invariant to affine value maps and weight scaling") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        const auto p = random_points(rng, 8);
        auto x = normals(rng, 8);
        const auto w = build_weights(p, KernelShape::Exponential, Bandwidth::fixed(50.0));
        const double base = moran_index(x, w).index;
        std::vector<double> y(x.size());
        std::transform(x.begin(), x.end(), y.begin(), [](double v) { return -3.5 * v + 12.0; });
        CHECK(std::abs(moran_index(y, w).index - base) < 1e-9);

        std::vector<SpatialWeights::Entry> entries;
        std::vector<std::size_t> offsets{0};
        for (std::size_t i = 0; i < w.n(); ++i) {
            for (const auto& e : w.row(i)) entries.push_back({e.col, 7.25 * e.weight});
            offsets.push_back(entries.size());
        }
        const SpatialWeights scaled(w.n(), offsets, entries, w.shape(), w.bandwidth());
        CHECK(std::abs(moran_index(x, scaled).index - base) < 1e-9);
    }
}

TEST_CASE("moran sweep single window equals direct index") {
    std::mt19937_64 rng(13);
    const auto p = random_points(rng, 6);
    std::vector<PanelValue> panel;
    std::vector<double> avg(6, 0.0);
    for (int d = 0; d < 3; ++d) {
        const auto x = normals(rng, 6);
        for (std::size_t i = 0; i < 6; ++i) {
            panel.push_back({i, kDay0 + std::chrono::days{d}, x[i]});
            avg[i] += x[i] / 3.0;
        }
    }
    const std::vector<double> d0 = {50.0};
    const auto sweep = moran_sweep(p, panel, WindowKind::Weekly, d0);
    REQUIRE(sweep.rows.size() == 1);
    const auto direct = moran_index(avg, build_weights(p, KernelShape::Exponential, Bandwidth::fixed(50.0)));
    CHECK(sweep.rows[0].index == doctest::Approx(direct.index).epsilon(1e-12));
    CHECK(sweep.rows[0].window->start == kDay0);
    CHECK(*sweep.rows[0].d0 == 50.0);
}

TEST_CASE("moran sweep on a time-constant panel") {
    std::mt19937_64 rng(17);
    const auto p = random_points(rng, 7);
    const auto x = normals(rng, 7);
    std::vector<PanelValue> panel;
    for (int d = 0; d < 5; ++d)
        for (std::size_t i = 0; i < 7; ++i) panel.push_back({i, kDay0 + std::chrono::days{d}, x[i]});
    const std::vector<double> d0 = {20.0, 200.0};
    const auto sweep = moran_sweep(p, panel, WindowKind::Daily, d0);
    REQUIRE(sweep.rows.size() == 10);
    for (std::size_t r = 0; r < sweep.rows.size(); ++r) {
        CHECK(sweep.rows[r].index == doctest::Approx(sweep.rows[r % 2].index).epsilon(1e-12));
        CHECK(*sweep.rows[r].d0 == d0[r % 2]);
    }
}

TEST_CASE("moran sweep weekly windows anchor at the first day") {
    std::mt19937_64 rng(19);
    const auto p = random_points(rng, 5);
    std::vector<PanelValue> panel;
    for (int d = 0; d < 15; ++d) {
        const auto x = normals(rng, 5);
        for (std::size_t i = 0; i < 5; ++i) panel.push_back({i, kDay0 + std::chrono::days{d + 2}, x[i]});
    }
    const std::vector<double> d0 = {100.0};
    const auto sweep = moran_sweep(p, panel, WindowKind::Weekly, d0);
    REQUIRE(sweep.rows.size() == 3);
    CHECK(sweep.rows[0].window->start == kDay0 + std::chrono::days{2});
    CHECK(sweep.rows[1].window->start == kDay0 + std::chrono::days{9});
    CHECK(sweep.rows[2].window->start == kDay0 + std::chrono::days{16});
}

TEST_CASE("moran sweep skips small or constant windows") {
    const std::vector<GeoPoint> p = {{40, -100}, {40, -99.5}, {40.5, -99.5}, {41, -99}};
    std::vector<PanelValue> panel = {{0, kDay0, 1.0}, {1, kDay0, 2.0}, {2, kDay0, 3.0},
                                     {0, kDay0 + std::chrono::days{1}, 1.0}, {1, kDay0 + std::chrono::days{1}, 2.0},
                                     {0, kDay0 + std::chrono::days{2}, 5.0}, {1, kDay0 + std::chrono::days{2}, 5.0},
                                     {2, kDay0 + std::chrono::days{2}, 5.0}};
    const std::vector<double> d0 = {100.0};
    const auto sweep = moran_sweep(p, panel, WindowKind::Daily, d0);
    CHECK(sweep.rows.size() == 1);
    CHECK(sweep.skipped.size() == 2);
    CHECK(kind_of([&] { moran_sweep(p, std::vector<PanelValue>{}, WindowKind::Daily, d0); }) == ErrorKind::EmptyInput);
}

TEST_CASE("moran sweep on a smooth longitude field decays with range") {
    std::vector<GeoPoint> p;
    std::vector<PanelValue> panel;
    std::vector<double> field;
    for (int r = 0; r < 10; ++r) {
        for (int c = 0; c < 10; ++c) {
            p.emplace_back(35.0 + 0.5 * r, -100.0 + 0.5 * c);
            field.push_back(std::sin(c * 0.6));
            panel.push_back({p.size() - 1, kDay0, field.back()});
        }
    }
    const std::vector<double> d0 = {30.0, 100.0, 300.0, 1000.0};
    const auto sweep = moran_sweep(p, panel, WindowKind::Daily, d0);
    REQUIRE(sweep.rows.size() == 4);
    for (std::size_t k = 0; k < d0.size(); ++k) {
        const auto w = oracle::dense_weights(p, KernelShape::Exponential, d0[k]);
        CHECK(sweep.rows[k].index == doctest::Approx(oracle::moran(field, w)).epsilon(1e-10));
    }
    CHECK(sweep.rows[0].index > 0.0);
    CHECK(sweep.rows[1].index > sweep.rows[2].index);
    CHECK(sweep.rows[2].index > sweep.rows[3].index);
}

TEST_CASE("spearman examples") {
    const std::vector<double> a = {1, 2, 3};
    CHECK(spearman_rank(a, a) == doctest::Approx(1.0));
    CHECK(spearman_rank(a, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman_rank(a, std::vector<double>{1, 3, 2}) == doctest::Approx(0.5));
    CHECK(kind_of([&] { spearman_rank(a, std::vector<double>{2, 2, 2}); }) == ErrorKind::ZeroVariance);
    CHECK_THROWS_AS(spearman_rank(a, std::vector<double>{1, 2}), Error);
}

TEST_CASE("spearman agrees with the shortcut formula without ties and handles ties") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 5 + static_cast<std::size_t>(t);
        const auto x = normals(rng, n), y = normals(rng, n);
        const auto rx = average_ranks(x), ry = average_ranks(y);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
        const double nn = static_cast<double>(n);
        CHECK(spearman_rank(x, y) == doctest::Approx(1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0))).epsilon(1e-12));
        std::vector<double> mx(n), my(n);
        std::transform(x.begin(), x.end(), mx.begin(), [](double v) { return std::exp(v); });
        std::transform(y.begin(), y.end(), my.begin(), [](double v) { return v * v * v; });
        CHECK(spearman_rank(mx, my) == doctest::Approx(spearman_rank(x, y)).epsilon(1e-12));
    }
    const auto r = average_ranks(std::vector<double>{2.0, 1.0, 2.0, 3.0});
    CHECK(r == std::vector<double>{2.5, 1.0, 2.5, 4.0});
}

TEST_CASE("variance decomposition examples") {
    const std::vector<double> v = {1, 1, 3, 3};
    const std::vector<std::size_t> g = {0, 0, 1, 1};
    const auto d = variance_decomposition(v, g, "county");
    CHECK(d.within == doctest::Approx(0.0));
    CHECK(d.between == doctest::Approx(4.0));
    CHECK(d.total == doctest::Approx(4.0));
    CHECK(d.grouping == "county");
    const auto one = variance_decomposition(std::vector<double>{0, 2}, std::vector<std::size_t>{0, 0});
    CHECK(one.between == doctest::Approx(0.0));
    CHECK(one.within == doctest::Approx(2.0));
    CHECK(kind_of([] { variance_decomposition(std::vector<double>{}, std::vector<std::size_t>{}); }) ==
          ErrorKind::EmptyInput);
}

TEST_CASE("variance decomposition matches a two-pass oracle") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<std::size_t> grp(0, 3);
    for (int t = 0; t < 25; ++t) {
        const auto v = normals(rng, 20);
        std::vector<std::string> labels;
        for (int i = 0; i < 20; ++i) labels.push_back("g" + std::to_string(grp(rng)));
        const auto d = variance_decomposition(v, labels);
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / 20.0;
        std::map<std::string, std::vector<double>> groups;
        for (int i = 0; i < 20; ++i) groups[labels[i]].push_back(v[i]);
        double total = 0, within = 0, between = 0;
        for (double x : v) total += (x - mean) * (x - mean);
        for (const auto& [k, xs] : groups) {
            const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
            for (double x : xs) within += (x - m) * (x - m);
            between += static_cast<double>(xs.size()) * (m - mean) * (m - mean);
        }
        CHECK(d.total == doctest::Approx(total).epsilon(1e-10));
        CHECK(d.within == doctest::Approx(within).epsilon(1e-10));
        CHECK(d.between == doctest::Approx(between).epsilon(1e-10));
        CHECK(std::abs(d.between + d.within - d.total) <= 1e-9 * d.total);
        CHECK(d.n_groups == groups.size());
    }
}

TEST_CASE("factorize codes by first appearance") {
    std::size_t levels = 0;
    const std::vector<std::string> labels = {"b", "a", "b", "c"};
    CHECK(factorize(labels, &levels) == std::vector<std::size_t>{0, 1, 0, 2});
    CHECK(levels == 3);
}

TEST_CASE("pca examples") {
    Eigen::MatrixXd same(10, 2);
    for (int i = 0; i < 10; ++i) same(i, 0) = same(i, 1) = i * 0.3 + (i % 3);
    const auto f = pca_variance_explained(same, true);
    CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(f[1]) < 1e-12);

    // Orthogonal +-1 patterns: exactly isotropic.
    Eigen::MatrixXd iso(8, 2);
    for (int i = 0; i < 8; ++i) {
        iso(i, 0) = (i % 2) ? 1.0 : -1.0;
        iso(i, 1) = ((i / 2) % 2) ? 1.0 : -1.0;
    }
    const auto g = pca_variance_explained(iso, true);
    CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-12));

    Eigen::MatrixXd constant = Eigen::MatrixXd::Random(10, 3);
    constant.col(1).setConstant(4.0);
    const std::vector<std::string> names = {"income", "jobs", "population"};
    try {
        pca_variance_explained(constant, true, names);
        FAIL("expected zero variance");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroVariance);
        CHECK(std::string(e.what()).find("jobs") != std::string::npos);
    }
    CHECK_THROWS_AS(pca_variance_explained(Eigen::MatrixXd::Random(3, 3), true), Error);
}

TEST_CASE("pca matches a Jacobi eigensolver") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> z;
    for (int t = 0; t < 10; ++t) {
        Eigen::MatrixXd x(50, 4);
        for (Eigen::Index i = 0; i < 50; ++i) {
            const double common = z(rng);
            for (Eigen::Index j = 0; j < 4; ++j) x(i, j) = (j + 1) * z(rng) + common * (t % 3);
        }
        for (bool normalize : {false, true}) {
            Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
            if (normalize) {
                for (Eigen::Index j = 0; j < 4; ++j) c.col(j) /= std::sqrt(c.col(j).squaredNorm() / 49.0);
            }
            const auto ev = oracle::jacobi_eigenvalues(c.transpose() * c / 49.0);
            const double sum = std::accumulate(ev.begin(), ev.end(), 0.0);
            const auto f = pca_variance_explained(x, normalize);
            REQUIRE(f.size() == 4);
            double total = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                CHECK(std::abs(f[k] - ev[k] / sum) < 1e-8);
                if (k) CHECK(f[k] <= f[k - 1]);
                total += f[k];
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}
