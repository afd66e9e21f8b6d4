#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mather_twist/cli.hpp"
#include "mather_twist/config.hpp"
#include "mather_twist/errors.hpp"
#include "mather_twist/io.hpp"
#include "json.hpp"

using namespace mather_twist;
namespace fs = std::filesystem;
using doctest::Approx;

namespace {

fs::path scratch_dir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    auto p = fs::temp_directory_path() / ("mather_twist_" + tag + "_" + std::to_string(rng()));
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Invocation {
    int code;
    std::string out, err;
};

Invocation run(std::vector<std::string> args) {
    args.insert(args.begin(), "mather-twist");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

double csv_column_max(const std::string& csv, std::size_t col) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    double best = -1e300;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string f;
        for (std::size_t i = 0; i <= col; ++i) std::getline(fields, f, ',');
        best = std::max(best, std::stod(f));
    }
    return best;
}

}  // namespace

TEST_CASE("config defaults and parsing") {
    const auto cfg = parse_config("family=\"standard\"\nk=1.0\n");
    CHECK(cfg.gf.k == 1.0);
    CHECK(cfg.tol_residual == 1e-10);
    CHECK(cfg.tol_barrier == 1e-9);
    CHECK(cfg.joint_tol == 1e-3);
    CHECK(cfg.grid_a == 64);
    CHECK(cfg.grid_dp == 64);
    CHECK(cfg.farey_order == 8);
    CHECK(cfg.cf_depth == 8);
    CHECK(cfg.dp_n == 16);
    CHECK(cfg.restarts == 8);
    CHECK(cfg.seed == 0);

    const auto full = parse_config("# comment\n  k = 0.5   # trailing\ngrid.a = 16\nseed = 7\ncf.depth=5\n");
    CHECK(full.gf.k == 0.5);
    CHECK(full.grid_a == 16);
    CHECK(full.seed == 7);
    CHECK(full.cf_depth == 5);
    // the canonical rendering parses back to the same config
    CHECK(render_config(parse_config(render_config(full))) == render_config(full));

    const auto custom = parse_config("family = \"custom\"\nexpr = \"0.5*(x'-x)^2\"  # quoted\n");
    CHECK(custom.gf.expr == "0.5*(x'-x)^2");
}

TEST_CASE("config errors") {
    CHECK_THROWS_WITH_AS(parse_config("k=-1"), doctest::Contains("'k'"), UsageError);
    CHECK_THROWS_WITH_AS(parse_config("k=1\nbogus=2", "a.cfg"), doctest::Contains("a.cfg:2"), UsageError);
    CHECK_THROWS_WITH_AS(parse_config("k=1\nk=2"), doctest::Contains("duplicate"), UsageError);
    CHECK_THROWS_WITH_AS(parse_config("k 1"), doctest::Contains(":1:"), UsageError);
    CHECK_THROWS_WITH_AS(parse_config("grid.a=1"), doctest::Contains("grid.a"), UsageError);
    CHECK_THROWS_WITH_AS(parse_config("tol.barrier=0"), doctest::Contains("tol.barrier"), UsageError);
    CHECK_THROWS_WITH_AS(parse_config("family=\"custom\""), doctest::Contains("expr"), UsageError);
    CHECK_THROWS_AS(parse_config("k=abc"), UsageError);
    CHECK_THROWS_AS(parse_config("restarts=0"), UsageError);
    CHECK_THROWS_AS(load_config("/nonexistent/path/x.cfg"), UsageError);
}

TEST_CASE("number formatting") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(1.0) == "1");
    CHECK(std::stod(format_real(kGoldenMean)) == kGoldenMean);
    CHECK(parse_omega("golden") == kGoldenMean);
    CHECK(parse_omega("0.25") == 0.25);
    CHECK_THROWS_AS(parse_omega("gold"), UsageError);
}

TEST_CASE("CSV headers") {
    const auto h = GeneratingFunction::standard(1.0);
    CHECK(first_line(orbit_csv(iterate(h, 0.1, 0.2, 3))) == "i,x,y,x_mod1");
    CHECK(first_line(configuration_csv(Configuration::free_segment({0.0, 1.0}))) == "i,x");
    CHECK(first_line(convergents_csv(convergents(kGoldenMean, 3))) == "p,q,omega_approx,abs_err");
    CHECK(first_line(barrier_csv(peierls_rational(h, RotationClass{0, 1}, 4))) == "a,value");
    const auto s = beta_grid(h, 3);
    CHECK(first_line(beta_csv(s)) == "p,q,omega,beta");
    CHECK(first_line(alpha_csv(alpha_grid({0.0, 0.5}, s))) == "c,alpha");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("exit codes") {
    const auto dir = scratch_dir("codes");
    CHECK(run({"--out", dir.string(), "bogus"}).code == exit_usage);
    const auto unknown = run({"--out", dir.string(), "validate", "--frobnicate"});
    CHECK(unknown.code == exit_usage);
    CHECK(unknown.err.find("Usage") != std::string::npos);
    CHECK(run({"--out", dir.string(), "--config", "/nonexistent.cfg", "validate"}).code == exit_usage);
    CHECK(run({"--out", dir.string(), "--k", "-1", "validate"}).code == exit_usage);
    CHECK(run({"--out", dir.string(), "minimize", "--p", "2", "--q", "4"}).code == exit_usage);

    std::ofstream(dir / "std_k1.cfg") << "family=\"standard\"\nk=1.0\n";
    const auto v = run({"--config", (dir / "std_k1.cfg").string(), "--out", dir.string(), "validate"});
    CHECK(v.code == exit_ok);
    CHECK(fs::exists(dir / "validate.json"));
    CHECK(fs::exists(dir / "manifest.json"));

    // a tiny coercivity window makes the momentum unreachable
    std::ofstream(dir / "narrow.cfg") << "k=1.0\ncoercivity_window=0.1\n";
    CHECK(run({"--config", (dir / "narrow.cfg").string(), "--out", dir.string(), "map", "--x", "0", "--y", "3"}).code ==
          exit_numerical);
    fs::remove_all(dir);
}

TEST_CASE("barrier subcommand reproduces the fixed-point closed form") {
    const auto dir = scratch_dir("barrier");
    const auto r = run({"--k", "1", "--out", dir.string(), "barrier", "--p", "0", "--q", "1", "--grid", "64"});
    REQUIRE(r.code == exit_ok);
    const auto csv = slurp(dir / "barrier.csv");
    CHECK(first_line(csv) == "a,value");
    CHECK(csv_column_max(csv, 1) == Approx(0.05066059).epsilon(1e-7));

    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["version"] == kToolVersion);
    CHECK(manifest["outputs"]["barrier.csv"] == "sha256:" + sha256_hex(csv));
    fs::remove_all(dir);
}

TEST_CASE("circle subcommand at k = 1.2") {
    const auto dir = scratch_dir("circle");
    const auto r = run({"--k", "1.2", "--out", dir.string(), "circle", "--omega", "golden", "--depth", "8"});
    CHECK(r.code == exit_ok);
    const auto verdict = nlohmann::json::parse(slurp(dir / "verdict.json"));
    CHECK(verdict["verdict"] == "destroyed");
    CHECK(fs::exists(dir / "convergents.csv"));
    fs::remove_all(dir);
}

TEST_CASE("byte-identical outputs for equal config and seed") {
    const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
    for (const auto& d : {a, b}) {
        std::ofstream(d / "run.cfg") << "k = 0.9\nseed = 11\nrestarts = 4\n";
        REQUIRE(run({"--config", (d / "run.cfg").string(), "--out", d.string(), "minimize", "--p", "3", "--q", "8"}).code == 0);
        REQUIRE(run({"--config", (d / "run.cfg").string(), "--out", d.string(), "alpha", "--order", "5"}).code == 0);
        REQUIRE(run({"--config", (d / "run.cfg").string(), "--out", d.string(), "barrier", "--p", "1", "--q", "3",
                     "--grid", "16"})
                    .code == 0);
    }
    for (const char* f : {"config.csv", "beta.csv", "alpha.csv", "barrier.csv", "minimizer.json"})
        CHECK(slurp(a / f) == slurp(b / f));
    auto ma = nlohmann::json::parse(slurp(a / "manifest.json")), mb = nlohmann::json::parse(slurp(b / "manifest.json"));
    for (auto* m : {&ma, &mb}) {
        m->erase("started");
        m->erase("finished");
        m->erase("timings_s");
        m->erase("command");
    }
    CHECK(ma == mb);
    fs::remove_all(a);
    fs::remove_all(b);
}
