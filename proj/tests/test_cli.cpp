#include <doctest.h>

#include <set>

#include <json.hpp>

#include "cli_chain.hpp"
#include "fuelgeo/error.hpp"
#include "fuelgeo/text.hpp"

using namespace fuelgeo;
using fuelgeo::testing::run_chain;
using fuelgeo::testing::run_cli;
using fuelgeo::testing::slurp;
namespace fs = std::filesystem;

namespace {

fs::path root(const std::string& name) { return fs::temp_directory_path() / ("fuelgeo_cli_" + name); }

double column_value(const CsvTable& t, std::size_t row, const std::string& col) {
    return parse_double(t.rows.at(row).at(t.require_column(col))).value();
}

// Shared across cases: one full chain run.
const testing::ChainRun& chain() {
    static const auto r = run_chain(root("chain"), 3);
    return r;
}

std::string store_of(const testing::ChainRun& r) { return "store=" + (r.out / "observations.txt").string(); }

} // namespace

TEST_CASE("synth and the full analysis chain succeed") {
    const auto& r = chain();
    for (const auto& [cmd, code] : r.codes) {
        INFO(cmd);
        CHECK(code == 0);
    }
    for (const char* name : {"ingest_report.csv", "descriptive_stats.csv", "variance_decomposition.csv",
                             "persistence.csv", "pca.csv", "moran_sweep.csv", "gwr_summary.csv", "gwr_fit.csv",
                             "gwr_fit.geojson", "fe_variance.csv", "regression_table.txt", "report.md",
                             "run_manifest.json"}) {
        INFO(name);
        CHECK(fs::is_regular_file(r.out / name));
    }
    const auto report = slurp(r.out / "report.md");
    CHECK(report.find("All expected artifacts are present.") != std::string::npos);

    const auto manifest = nlohmann::json::parse(slurp(r.out / "run_manifest.json"));
    CHECK(manifest["commands"].contains("gwr"));
    CHECK(manifest["commands"]["gwr"]["seed"] == 3);
    CHECK(manifest["commands"]["gwr"]["artifacts"]["gwr_fit.csv"] ==
          cli::sha256_file(r.out / "gwr_fit.csv"));

    const auto truth = nlohmann::json::parse(slurp(r.fixture / "truth.json"));
    const auto ingest = read_csv_file((r.out / "ingest_report.csv").string());
    std::map<std::string, std::string> metric;
    for (const auto& row : ingest.rows) metric[row[0]] = row[1];
    CHECK(metric["stored"] == std::to_string(truth["records"].get<std::size_t>()));
    CHECK(metric["failed"] == "0");
    const auto stats = read_csv_file((r.out / "descriptive_stats.csv").string());
    CHECK(stats.rows[0][1] == std::to_string(truth["credit_regular"].get<std::size_t>()));
}

TEST_CASE("fe state share matches the generator decomposition") {
    const auto& r = chain();
    const auto truth = nlohmann::json::parse(slurp(r.fixture / "truth.json"));
    const auto table = read_csv_file((r.out / "regression_table.csv").string());
    std::optional<double> r2;
    for (const auto& row : table.rows) {
        if (row[0] == "R-squared") r2 = parse_double(row[1]);
    }
    REQUIRE(r2);
    CHECK(std::abs(*r2 - truth["state_share"].get<double>()) <= 0.02);
}

TEST_CASE("moran on the two-point antisymmetric fixture") {
    const auto& r = chain();
    const auto out = root("pair");
    REQUIRE(run_cli({"moran", "--config", (r.fixture / "moran_pair.conf").string(), "--out", out.string()}) == 0);
    const auto t = read_csv_file((out / "moran_sweep.csv").string());
    REQUIRE(t.rows.size() == 1);
    CHECK(column_value(t, 0, "moran_i") == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("gwr with a global step kernel gives constant coefficients") {
    const auto& r = chain();
    const auto out = root("step");
    REQUIRE(run_cli({"gwr", "--config", (r.fixture / "fuelgeo.conf").string(), "--out", out.string(), "--set", store_of(r), "--set",
                     "gwr_mode=single", "--kernel", "step", "--set", "bandwidth=fixed:100000"}) == 0);
    const auto t = read_csv_file((out / "gwr_fit.csv").string());
    REQUIRE(t.rows.size() > 100);
    for (const char* col : {"beta_intercept", "beta_income", "beta_wage_per_job"}) {
        const double first = column_value(t, 0, col);
        for (std::size_t i = 1; i < t.rows.size(); ++i) {
            CHECK(std::abs(column_value(t, i, col) - first) <= 1e-8 * std::max(1.0, std::abs(first)));
        }
    }
    CHECK_FALSE(fs::exists(out / "gwr_models.csv"));
}

TEST_CASE("flags override file values and --set overrides any key") {
    const auto& r = chain();
    const auto out = root("precedence");
    REQUIRE(run_cli({"moran", "--config", (r.fixture / "fuelgeo.conf").string(), "--out", out.string(),
                     "--d0-grid", "50,70", "--set", "window=daily", "--set", store_of(r)}) == 0);
    const auto t = read_csv_file((out / "moran_sweep.csv").string());
    std::set<std::string> d0, kinds;
    for (const auto& row : t.rows) {
        d0.insert(row[t.require_column("d0_km")]);
        kinds.insert(row[t.require_column("window_kind")]);
    }
    CHECK(d0 == std::set<std::string>{"50", "70"});
    CHECK(kinds == std::set<std::string>{"daily"});
}

TEST_CASE("exit codes") {
    const auto& r = chain();
    const std::string conf = (r.fixture / "fuelgeo.conf").string();
    const auto out = root("codes");
    CHECK(run_cli({}) == 1);
    CHECK(run_cli({"dance"}) == 1);
    CHECK(run_cli({"moran", "--config", conf, "--out", out.string(), "--set", "colour=blue"}) == 1);
    CHECK(run_cli({"moran", "--config", conf, "--out", out.string(), "--criterion", "bic"}) == 1);
    CHECK(run_cli({"moran", "--config", conf, "--out", out.string(), "--set", "d0_grid=10,-3"}) == 1);
    CHECK(run_cli({"stats", "--config", (r.fixture / "missing.conf").string()}) == 1);
    // No observation store in a fresh output directory.
    CHECK(run_cli({"stats", "--config", conf, "--out", (out / "fresh").string()}) == 1);
    CHECK(run_cli({"gwr", "--config", conf, "--out", out.string(), "--set", store_of(r), "--set",
                  "bandwidth=adaptive:5", "--kernel", "all"}) == 1);

    // Runtime failure: a corrupt observation store.
    fs::create_directories(out / "corrupt");
    std::ofstream(out / "corrupt" / "observations.txt") << "not|a|record\n";
    CHECK(run_cli({"stats", "--config", conf, "--out", (out / "corrupt").string()}) == 2);
}

TEST_CASE("report lists missing artifacts instead of failing") {
    const auto& r = chain();
    const auto out = root("gaps");
    fs::remove_all(out);
    fs::create_directories(out);
    for (const auto& e : fs::directory_iterator(r.out)) fs::copy(e.path(), out / e.path().filename());
    fs::remove(out / "moran_sweep.csv");
    fs::remove(out / "fe_variance.csv");
    REQUIRE(run_cli({"report", "--out", out.string()}) == 0);
    const auto report = slurp(out / "report.md");
    CHECK(report.find("missing moran_sweep.csv (from `moran`)") != std::string::npos);
    CHECK(report.find("missing fe_variance.csv (from `fe`)") != std::string::npos);
    CHECK(report.find("## gwr_summary.csv") != std::string::npos);
}

TEST_CASE("config parsing") {
    std::istringstream in("# comment\nstations = a.csv  # trailing\n\nseed=4\n");
    const auto s = cli::parse_config(in, "/base");
    CHECK(s.at("stations").value == "a.csv");
    CHECK(s.at("seed").value == "4");
    const auto cfg = cli::resolve_config(s);
    CHECK(cfg.stations == fs::path("/base/a.csv"));
    CHECK(cfg.seed == 4);
    std::istringstream dup("seed=1\nseed=2\n");
    CHECK_THROWS_AS(cli::parse_config(dup, "/"), Error);
    std::istringstream junk("just words\n");
    CHECK_THROWS_AS(cli::parse_config(junk, "/"), Error);
}
