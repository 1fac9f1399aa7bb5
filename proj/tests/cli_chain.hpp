#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fuelgeo/cli.hpp"

namespace fuelgeo::testing {

inline int run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> argv = {"fuelgeo"};
    argv.insert(argv.end(), args.begin(), args.end());
    return cli::execute(argv);
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct ChainRun {
    std::filesystem::path fixture;
    std::filesystem::path out;
    std::map<std::string, int> codes;
};

/// synth into <root>/fixture, then every analysis command into <root>/run.
inline ChainRun run_chain(const std::filesystem::path& root, std::uint64_t seed,
                          const std::vector<std::string>& extra = {}) {
    namespace fs = std::filesystem;
    fs::remove_all(root);
    ChainRun r{root / "fixture", root / "run", {}};
    r.codes["synth"] = run_cli({"synth", "--out", r.fixture.string(), "--seed", std::to_string(seed)});
    for (const char* cmd : {"ingest", "stats", "moran", "gwr", "fe", "report"}) {
        std::vector<std::string> args = {cmd, "--config", (r.fixture / "fuelgeo.conf").string(), "--out",
                                         r.out.string()};
        args.insert(args.end(), extra.begin(), extra.end());
        r.codes[cmd] = run_cli(args);
    }
    return r;
}

/// CSV and GeoJSON artifacts of a directory, keyed by file name.
inline std::map<std::string, std::string> data_artifacts(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const auto ext = e.path().extension();
        if (ext == ".csv" || ext == ".geojson") out[e.path().filename().string()] = slurp(e.path());
    }
    return out;
}

} // namespace fuelgeo::testing
