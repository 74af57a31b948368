#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "experiments.hpp"

namespace fs = std::filesystem;
using namespace quake;
using namespace quake::cli;

namespace {

const fs::path kOut = fs::path(QUAKE_TEST_DIR) / "cli-out";

int quake_run(const std::string& args) {
    std::string cmd = std::string(QUAKE_BIN) + " --out " + kOut.string() + " " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WEXITSTATUS(st);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("surface and angle parsing") {
    auto hex = parse_surface("3,3,lower");
    CHECK(hex.x() == doctest::Approx(3).epsilon(1e-12));
    CHECK(hex.y() == doctest::Approx(3).epsilon(1e-12));
    CHECK(hex.z() == doctest::Approx(3).epsilon(1e-12));
    auto up = parse_surface("3,3,upper");
    CHECK(up.sigma == doctest::Approx(-hex.sigma).epsilon(1e-12));
    auto fn = parse_surface("fn:1.5,0.25");
    CHECK(fn.ell == 1.5);
    CHECK(fn.tau() == doctest::Approx(0.25).epsilon(1e-15));
    auto mk = parse_surface("markov:3,3,3");
    CHECK(mk.x() == doctest::Approx(3).epsilon(1e-12));
    CHECK_THROWS(parse_surface("3"));
    CHECK_THROWS(parse_surface("fn:1"));
    CHECK_THROWS(parse_surface("3,x"));

    CHECK(parse_angle("0.9pi") == doctest::Approx(0.9 * std::numbers::pi).epsilon(1e-15));
    CHECK(parse_angle("pi") == std::numbers::pi);
    CHECK(parse_angle("2.5") == 2.5);
    CHECK_THROWS(parse_angle("0.9rad"));

    CHECK(fmt(0.1) == "1.0000000000000001e-01");
    CHECK(fmt(-2) == "-2.0000000000000000e+00");
}

TEST_CASE("commands write results and manifests") {
    fs::remove_all(kOut);
    CHECK(quake_run("horocycle-check") == 0);
    auto h = load(kOut / "horocycle-check" / "result.json");
    CHECK(h["a"].get<double>() == doctest::Approx(1).epsilon(1e-12));
    CHECK(h["b"].get<double>() == doctest::Approx(2).epsilon(1e-12));
    CHECK(h["c_sum"].get<double>() < 1);
    CHECK(h["d_sum"].get<double>() < 1);
    auto m = load(kOut / "horocycle-check" / "manifest.json");
    CHECK(m["command"] == "horocycle-check");
    CHECK(m["exit_code"] == 0);
    CHECK(m.contains("versions"));
    CHECK(m["wall_seconds"].get<double>() >= 0);

    CHECK(quake_run("indicatrix --x 3 --y 3 --branch lower --n 120") == 0);
    auto csv = slurp(kOut / "indicatrix" / "indicatrix.csv");
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(fs::exists(kOut / "indicatrix" / "indicatrix.svg"));
    CHECK(load(kOut / "indicatrix" / "result.json")["sign_flips"] == 0);
}

TEST_CASE("pinch ledger carries the ratio column") {
    CHECK(quake_run("pinch --theta 0.9pi --target 5e-3") == 1);  // outside the asymptotic window
    auto ledger = slurp(kOut / "pinch" / "pinch_ledger.csv");
    CHECK(ledger.rfind("step,slope,displacement,ell_alpha,cumulative_magnitude,ratio\n", 0) == 0);
    auto r = load(kOut / "pinch" / "result.json");
    double ratio = r["final_ratio"];
    auto last = ledger.substr(ledger.rfind(',', ledger.size() - 2) + 1);
    CHECK(std::stod(last) == doctest::Approx(ratio).epsilon(1e-15));
}

TEST_CASE("reruns are byte-identical") {
    CHECK(quake_run("taylor-check --cases 4 --seed 9") == 0);
    auto a = slurp(kOut / "taylor-check" / "result.json"), ac = slurp(kOut / "taylor-check" / "taylor.csv");
    CHECK(quake_run("taylor-check --cases 4 --seed 9") == 0);
    CHECK(a == slurp(kOut / "taylor-check" / "result.json"));
    CHECK(ac == slurp(kOut / "taylor-check" / "taylor.csv"));
    CHECK(quake_run("taylor-check --cases 4 --seed 10") == 0);
    CHECK(a != slurp(kOut / "taylor-check" / "result.json"));
}

TEST_CASE("config file overrides flags") {
    fs::create_directories(kOut);
    std::ofstream(kOut / "cfg.json") << R"({"n": 64, "branch": "upper"})";
    CHECK(quake_run("indicatrix --n 720 --config " + (kOut / "cfg.json").string()) == 0);
    auto m = load(kOut / "indicatrix" / "manifest.json");
    CHECK(m["config"]["n"] == 64);
    CHECK(m["config"]["branch"] == "upper");

    std::ofstream(kOut / "bad.json") << "[1, 2]";
    CHECK(quake_run("indicatrix --config " + (kOut / "bad.json").string()) == 2);
}

TEST_CASE("usage errors and certification failures") {
    CHECK(quake_run("") == 2);
    CHECK(quake_run("no-such-command") == 2);
    CHECK(quake_run("indicatrix --n 3") == 2);
    CHECK(quake_run("indicatrix --x 2.5 --y 3") == 2);  // not a point of the trace chart
    CHECK(quake_run("pinch --theta 0.2pi") == 2);
    CHECK(quake_run("de-bracket --from nonsense") == 2);

    // the step budget runs out long before ℓ_α reaches 1e-6
    CHECK(quake_run("pinch --ell0 1e-3 --target 1e-6 --theta 0.95pi") == 3);
    auto d = load(kOut / "pinch" / "diagnostic.json");
    CHECK(d["error"] == "certification");
    CHECK(!fs::exists(kOut / "pinch" / "result.json"));
    CHECK(load(kOut / "pinch" / "manifest.json")["exit_code"] == 3);
}
