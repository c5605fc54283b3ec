#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

std::string binary() {
    const char* bin = std::getenv("BMCKIT_BIN");
    REQUIRE(bin != nullptr);
    return bin;
}

int run(const std::string& args, const std::string& log) {
    std::string cmd = binary() + " " + args + " > " + log + " 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("help exits cleanly") {
    TempDir dir("bmckit_cli_help");
    CHECK(run("simulate --help", (dir.path / "log").string()) == 0);
    CHECK(run("--help", (dir.path / "log").string()) == 0);
}

TEST_CASE("validate maps failures to exit code 2") {
    TempDir dir("bmckit_cli_validate");
    std::string log = (dir.path / "log").string();
    CHECK(run("validate --gamma 0.2 --alpha 0.8", log) == 2);
    std::string text = slurp(log);
    CHECK(text.find("FAIL") != std::string::npos);
    CHECK(text.find("alpha") != std::string::npos);

    CHECK(run("validate --gamma 0.7 --alpha 0.8", log) == 0);
    CHECK(run("validate --gamma 0.2 --beta 0.2 --s 2", log) == 0);
    CHECK(run("validate --gamma 0.2 --beta 0.45 --s 2", log) == 2);
}

TEST_CASE("oracle check passes and writes its row") {
    TempDir dir("bmckit_cli_oracle");
    std::string log = (dir.path / "log").string();
    CHECK(run("oracle-check --seed 7 --out " + dir.path.string(), log) == 0);
    std::string text = slurp(log);
    CHECK(text.find("PASS") != std::string::npos);
    CHECK(fs::exists(dir.path / "oracle_check.csv"));
}

TEST_CASE("dry run prints the resolved config without outputs") {
    TempDir dir("bmckit_cli_dry");
    std::string log = (dir.path / "log").string();
    CHECK(run("verify-clt --dry-run --out " + dir.path.string(), log) == 0);
    std::string text = slurp(log);
    CHECK(text.find("\"gamma\"") != std::string::npos);
    CHECK(text.find("\"replicates\"") != std::string::npos);
    CHECK_FALSE(fs::exists(dir.path / "clt_samples.jsonl"));
}

TEST_CASE("verify commands produce byte-identical reports per thread count") {
    TempDir dir("bmckit_cli_det");
    fs::path cfg_path = dir.path / "cfg.json";
    {
        std::ofstream out(cfg_path);
        out << R"({
  "model": {"type": "gaussian-bar", "a0": 0.5},
  "gamma": 0.2, "beta": 0.1,
  "depths": [5, 6, 7],
  "replicates": 500,
  "seed": 11,
  "deltas": [0.5, 1.0]
})";
    }
    std::string log = (dir.path / "log").string();
    std::vector<std::string> outs;
    for (int threads : {1, 2, 8}) {
        std::string out_dir =
            (dir.path / ("out" + std::to_string(threads))).string();
        int code = run("verify-mdp --config " + cfg_path.string() + " --out " +
                           out_dir + " --threads " + std::to_string(threads),
                       log);
        CHECK(code == 0);
        outs.push_back(out_dir);
    }
    for (const char* name :
         {"mdp_report.csv", "mdp_report_normalized.csv", "mdp_verdicts.csv",
          "mdp_samples.jsonl"}) {
        std::string base = slurp(fs::path(outs[0]) / name);
        CHECK(base == slurp(fs::path(outs[1]) / name));
        CHECK(base == slurp(fs::path(outs[2]) / name));
        CHECK(!base.empty());
    }
    // Idempotent overwrite: re-running into the same directory leaves the
    // same bytes.
    std::string rerun_dir = outs[0];
    CHECK(run("verify-mdp --config " + cfg_path.string() + " --out " +
                  rerun_dir + " --threads 2",
              log) == 0);
    CHECK(slurp(fs::path(outs[1]) / "mdp_report.csv") ==
          slurp(fs::path(rerun_dir) / "mdp_report.csv"));
}

TEST_CASE("estimate writes the per-point csv") {
    TempDir dir("bmckit_cli_estimate");
    fs::path cfg_path = dir.path / "cfg.json";
    {
        std::ofstream out(cfg_path);
        out << R"({"model": {"type": "gaussian-bar", "a0": 0.5},
                   "depths": [6], "eval_points": [0.0, 0.5], "seed": 3})";
    }
    std::string log = (dir.path / "log").string();
    CHECK(run("estimate --config " + cfg_path.string() + " --out " +
                  dir.path.string(),
              log) == 0);
    std::string text = slurp(dir.path / "estimate.csv");
    CHECK(text.find("seed,n,region,x,h,estimate,statistic") != std::string::npos);
}
