// Experiment runner. Each subcommand writes result.json plus its CSV/SVG
// artifacts and a manifest.json into <out>/<command>/.
//
// Exit codes: 0 pass, 1 check failed, 2 usage error, 3 certification failure
// (diagnostic.json is written).

#include <CLI11.hpp>

#include <boost/version.hpp>
#include <gsl/gsl_version.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "experiments.hpp"
#include "quake/fdcomp.hpp"

#ifndef QUAKE_VERSION
#define QUAKE_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace quake;
using namespace quake::cli;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Context {
    std::string command;
    fs::path dir;
    json config = json::object();
    json timings = json::object();
    std::vector<std::string> artifacts;

    void write(const std::string& name, const std::string& text) {
        std::ofstream f(dir / name, std::ios::binary);
        f << text;
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        artifacts.push_back(name);
    }
    template <class F>
    void write_with(const std::string& name, F&& fill) {
        std::ostringstream os;
        fill(os);
        write(name, os.str());
    }
};

json versions() {
    return {{"quake", QUAKE_VERSION},
            {"compiler", __VERSION__},
            {"boost", BOOST_LIB_VERSION},
            {"gsl", GSL_VERSION},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"cli11", CLI11_VERSION}};
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// Pulls wall-clock fields out of a result so result.json stays reproducible.
void strip_seconds(json& j, json& timings, const std::string& path = "") {
    if (!j.is_object()) return;
    for (auto it = j.begin(); it != j.end();) {
        if (it.key() == "seconds") {
            timings[path.empty() ? "seconds" : path + ".seconds"] = *it;
            it = j.erase(it);
        } else {
            strip_seconds(*it, timings, path.empty() ? it.key() : path + "." + it.key());
            ++it;
        }
    }
}

// Flags taken from a JSON config file, appended after the command line so
// they take precedence.
std::vector<std::string> config_args(const std::string& file) {
    std::ifstream f(file);
    if (!f) throw UsageError("cannot read config " + file);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    std::vector<std::string> out;
    auto scalar = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    for (auto& [k, v] : j.items()) {
        if (v.is_boolean()) {
            if (v.get<bool>()) out.push_back("--" + k);
        } else if (v.is_array()) {
            out.push_back("--" + k);
            for (auto& e : v) out.push_back(scalar(e));
        } else {
            out.push_back("--" + k);
            out.push_back(scalar(v));
        }
    }
    return out;
}

void write_segments_csv(std::ostream& os, const PiecewisePath& p) {
    os << "index,slope,weight,duration,displacement\n";
    int i = 0;
    for (const auto& s : p.segments())
        os << i++ << ',' << s.slope.str() << ',' << fmt(s.weight) << ',' << fmt(s.duration) << ','
           << fmt(s.displacement()) << '\n';
}

void write_pinch_ledger(std::ostream& os, const PinchRun& r) {
    const double scale = pinch_scale(r.ell0);
    os << "step,slope,displacement,ell_alpha,cumulative_magnitude,ratio\n";
    for (const auto& st : r.result.ledger)
        os << st.step << ',' << st.slope.str() << ',' << fmt(st.displacement) << ',' << fmt(st.ell_alpha) << ','
           << fmt(st.magnitude) << ',' << fmt(st.magnitude / scale) << '\n';
}

json surface_json(const MarkedSurface& s) {
    return {{"ell", s.ell}, {"tau", s.tau()}, {"traces", {s.x(), s.y(), s.z()}}};
}

DeOptions de_flags(CLI::App* c, DeOptions& o) {
    c->add_option("--max-legs", o.max_legs, "legs per candidate path")->check(CLI::Range(1, 12));
    c->add_option("--restarts", o.restarts, "optimizer restarts")->check(CLI::Range(0, 100));
    c->add_option("--max-evals", o.max_evals, "evaluations per optimizer run")->check(CLI::Range(10, 100000));
    c->add_option("--eps-chart", o.eps_chart, "endpoint tolerance in the chart")->check(CLI::PositiveNumber);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Earthquake metric experiments on the once-punctured torus", "quake"};
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string out_dir, config_file;
    std::uint64_t seed = 1;
    if (const char* e = std::getenv("QUAKE_OUT")) out_dir = e;
    if (out_dir.empty()) out_dir = "quake-out";
    app.add_option("--out", out_dir, "output directory (default $QUAKE_OUT or ./quake-out)");
    app.add_option("--config", config_file, "JSON file whose keys override flags");
    app.add_option("--seed", seed, "seed for sampled commands");

    Context ctx;
    std::function<json()> run;
    json& cfg = ctx.config;

    // indicatrix
    double ix = 3, iy = 3;
    std::string ibranch = "lower";
    int in = 720;
    auto* c_ind = app.add_subcommand("indicatrix", "unit sphere of the earthquake norm at one point");
    c_ind->add_option("--x", ix, "trace of A")->check(CLI::Range(2.0 + 1e-12, 1e6));
    c_ind->add_option("--y", iy, "trace of B")->check(CLI::Range(2.0 + 1e-12, 1e6));
    c_ind->add_option("--branch", ibranch)->check(CLI::IsMember({"lower", "upper"}));
    c_ind->add_option("--n", in, "samples")->check(CLI::Range(8, 100000));
    c_ind->callback([&] {
        run = [&] {
            cfg = {{"x", ix}, {"y", iy}, {"branch", ibranch}, {"n", in}};
            auto s = from_traces(ix, iy, ibranch == "lower" ? Branch::Lower : Branch::Upper);
            auto ind = indicatrix(s, in);
            ctx.write_with("indicatrix.csv", [&](std::ostream& os) { write_indicatrix_csv(os, ind); });
            ctx.write_with("indicatrix.svg", [&](std::ostream& os) { write_indicatrix_svg(os, ind); });
            return indicatrix_check(ind);
        };
    });

    // asymmetry
    int as_surfaces = 20, as_dirs = 64;
    auto* c_as = app.add_subcommand("asymmetry", "max ratio ‖−v‖ₑ/‖v‖ₑ over sampled surfaces");
    c_as->add_option("--surfaces", as_surfaces)->check(CLI::Range(1, 10000));
    c_as->add_option("--dirs", as_dirs)->check(CLI::Range(4, 100000));
    c_as->callback([&] {
        run = [&] {
            cfg = {{"surfaces", as_surfaces}, {"dirs", as_dirs}, {"seed", seed}};
            auto r = asymmetry(as_surfaces, as_dirs, seed);
            ctx.write_with("asymmetry.csv", [&](std::ostream& os) {
                os << "ell,tau,ratio,dir_l,dir_tau\n";
                for (auto& row : r["ratios"])
                    os << fmt(row["ell"]) << ',' << fmt(row["tau"]) << ',' << fmt(row["ratio"]) << ','
                       << fmt(row["direction"][0]) << ',' << fmt(row["direction"][1]) << '\n';
            });
            return r;
        };
    });

    // compare-norms
    int cn_surfaces = 10, cn_dirs = 6, cn_sym = 100;
    double cn_c = 0;
    auto* c_cn = app.add_subcommand("compare-norms", "constants of the earthquake/WP/Thurston comparison chain");
    c_cn->add_option("--surfaces", cn_surfaces, "surfaces in the coarse grid (doubled for the fine one)")
        ->check(CLI::Range(1, 1000));
    c_cn->add_option("--dirs", cn_dirs)->check(CLI::Range(1, 1000));
    c_cn->add_option("--wolpert-c", cn_c, "window constant c; 0 fits it")->check(CLI::Range(0.0, 100.0));
    c_cn->add_option("--sym-samples", cn_sym)->check(CLI::Range(0, 100000));
    c_cn->callback([&] {
        run = [&] {
            cfg = {{"surfaces", cn_surfaces}, {"dirs", cn_dirs}, {"wolpert_c", cn_c}, {"sym_samples", cn_sym},
                   {"seed", seed}};
            json r{{"chain", norm_chain_check(cn_surfaces, cn_dirs)}, {"wp_window", wp_pinching_window(cn_c)}};
            if (cn_sym > 0) r["symmetrized"] = symmetrized_norms(cn_sym, seed);
            bool pass = r["chain"]["pass"].get<bool>() && r["wp_window"]["pass"].get<bool>();
            if (cn_sym > 0) pass = pass && r["symmetrized"]["pass"].get<bool>();
            r["pass"] = pass;
            return r;
        };
    });

    // de-bracket
    std::string db_from = "3,3,lower", db_to = "fn:2.2,0.6";
    int db_depth = 6;
    DeOptions db_opt;
    auto* c_db = app.add_subcommand("de-bracket", "lower and upper bounds on the earthquake distance");
    c_db->add_option("--from", db_from, "surface: x,y[,branch] | fn:ell,tau | markov:x,y,z");
    c_db->add_option("--to", db_to);
    c_db->add_option("--depth", db_depth, "slope depth of the lower bound")->check(CLI::Range(0, 20));
    de_flags(c_db, db_opt);
    c_db->callback([&] {
        run = [&] {
            db_opt.seed = seed;
            cfg = {{"from", db_from}, {"to", db_to}, {"depth", db_depth}, {"max_legs", db_opt.max_legs},
                   {"restarts", db_opt.restarts}, {"max_evals", db_opt.max_evals}, {"eps_chart", db_opt.eps_chart},
                   {"seed", seed}};
            auto x = parse_surface(db_from), y = parse_surface(db_to);
            auto up = de_upper(x, y, db_opt);
            if (!up.witness) throw CertificationFailure("de-bracket: no feasible path within budget");
            double lo = de_lower(x, y, db_depth);
            ctx.write_with("witness.csv", [&](std::ostream& os) { write_segments_csv(os, *up.witness); });
            return json{{"from", surface_json(x)}, {"to", surface_json(y)}, {"lower", lo}, {"upper", up.upper},
                        {"method", up.method}, {"feasibility_gap", up.feasibility_gap}, {"pass", lo <= up.upper}};
        };
    });

    // dth
    std::string th_from = "3,3,lower", th_to = "fn:2.2,0.6";
    int th_triples = 50, th_pairs = 0;
    auto* c_th = app.add_subcommand("dth", "Thurston distance, triangle check and d_e/d_Th constant");
    c_th->add_option("--from", th_from);
    c_th->add_option("--to", th_to);
    c_th->add_option("--triples", th_triples)->check(CLI::Range(0, 10000));
    c_th->add_option("--pairs", th_pairs, "pairs for the d_e ≤ K d_Th constant (0 skips)")->check(CLI::Range(0, 1000));
    c_th->callback([&] {
        run = [&] {
            cfg = {{"from", th_from}, {"to", th_to}, {"triples", th_triples}, {"pairs", th_pairs}, {"seed", seed}};
            auto x = parse_surface(th_from), y = parse_surface(th_to);
            auto f = d_thurston(x, y), b = d_thurston(y, x);
            json r{{"forward", {f.lo, f.hi}}, {"backward", {b.lo, b.hi}}, {"argmax", f.argmax.str()}};
            bool pass = true;
            if (th_triples > 0) {
                r["triangle"] = thurston_triangle(th_triples, seed);
                pass = pass && r["triangle"]["pass"].get<bool>();
            }
            if (th_pairs > 0) {
                auto pairs = distance_pairs(th_pairs, seed, light_de());
                r["de_over_dth"] = de_thurston_ratio(pairs);
                pass = pass && r["de_over_dth"]["pass"].get<bool>();
            }
            r["pass"] = pass;
            return r;
        };
    });

    // pinch
    std::string p_theta = "0.9pi";
    std::vector<std::string> p_thetas;
    double p_target = 1e-3, p_ell0 = 1e-2;
    auto* c_p = app.add_subcommand("pinch", "pinching path toward the boundary");
    c_p->add_option("--theta", p_theta, "angle threshold, e.g. 0.9pi");
    c_p->add_option("--thetas", p_thetas, "extra angles for the monotonicity check");
    c_p->add_option("--target", p_target, "final ℓ_α")->check(CLI::Range(1e-6, 1.0));
    c_p->add_option("--ell0", p_ell0, "starting systole")->check(CLI::Range(1e-5, 2.0));
    c_p->callback([&] {
        run = [&] {
            cfg = {{"theta", p_theta}, {"thetas", p_thetas}, {"target", p_target}, {"ell0", p_ell0}};
            double th = parse_angle(p_theta);
            if (!(th > std::numbers::pi / 2 && th < std::numbers::pi)) throw UsageError("--theta must lie in (pi/2, pi)");
            if (!(p_target < p_ell0)) throw UsageError("--target must be below --ell0");
            auto main_run = pinch(p_ell0, th, p_target);
            ctx.write_with("pinch_ledger.csv", [&](std::ostream& os) { write_pinch_ledger(os, main_run); });
            ctx.write_with("pinch.svg", [&](std::ostream& os) { write_pinch_svg(os, main_run.result); });
            std::vector<PinchRun> runs{main_run};
            for (const auto& t : p_thetas) runs.push_back(pinch(p_ell0, parse_angle(t), p_target));
            std::sort(runs.begin(), runs.end(), [](auto& a, auto& b) { return a.theta < b.theta; });
            auto r = pinch_check(runs, th);
            r["final_ratio"] = main_run.ratio;
            return r;
        };
    });

    // nongeodesic
    DeOptions ng_opt = light_de();
    auto* c_ng = app.add_subcommand("nongeodesic", "twist path beaten by a detour through a shorter ℓ_γ");
    de_flags(c_ng, ng_opt);
    c_ng->callback([&] {
        run = [&] {
            ng_opt.seed = seed;
            cfg = {{"max_legs", ng_opt.max_legs}, {"restarts", ng_opt.restarts}, {"max_evals", ng_opt.max_evals},
                   {"eps_chart", ng_opt.eps_chart}, {"seed", seed}};
            auto r = nongeodesic(ng_opt);
            ctx.write_with("detour.csv", [&](std::ostream& os) {
                os << "index,slope,weight,duration\n";
                int i = 0;
                for (auto& s : r["detour"])
                    os << i++ << ',' << s["slope"].get<std::string>() << ',' << fmt(s["weight"]) << ','
                       << fmt(s["duration"]) << '\n';
            });
            return r;
        };
    });

    auto* c_h = app.add_subcommand("horocycle-check", "horocycle configuration values a, b, c, d");
    c_h->callback([&] { run = [&] { return horocycle(); }; });

    auto* c_fd = app.add_subcommand("fd-demo", "forward-dense sequences on the ℕ example and a pinch path");
    c_fd->callback([&] { run = [&] { return fd_machinery(); }; });

    int t_cases = 20;
    auto* c_t = app.add_subcommand("taylor-check", "order of the twist Taylor remainder");
    c_t->add_option("--cases", t_cases)->check(CLI::Range(1, 10000));
    c_t->callback([&] {
        run = [&] {
            cfg = {{"cases", t_cases}, {"seed", seed}};
            auto r = taylor(t_cases, seed);
            ctx.write_with("taylor.csv", [&](std::ostream& os) {
                os << "gamma,delta,ell,tau,exponent\n";
                for (auto& c : r["cases"])
                    os << c["gamma"].get<std::string>() << ',' << c["delta"].get<std::string>() << ','
                       << fmt(c["ell"]) << ',' << fmt(c["tau"]) << ',' << fmt(c["exponent"]) << '\n';
            });
            return r;
        };
    });

    std::string bl_surface = "3,3,lower";
    double bl_radius = 0.05;
    int bl_halvings = 2, bl_pairs = 6;
    DeOptions bl_opt = light_de();
    auto* c_bl = app.add_subcommand("bilipschitz-check", "d_e against the chart distance on shrinking balls");
    c_bl->add_option("--surface", bl_surface);
    c_bl->add_option("--radius", bl_radius)->check(CLI::Range(1e-6, 1.0));
    c_bl->add_option("--halvings", bl_halvings)->check(CLI::Range(0, 10));
    c_bl->add_option("--pairs", bl_pairs)->check(CLI::Range(1, 1000));
    de_flags(c_bl, bl_opt);
    c_bl->callback([&] {
        run = [&] {
            bl_opt.seed = seed;
            cfg = {{"surface", bl_surface}, {"radius", bl_radius}, {"halvings", bl_halvings}, {"pairs", bl_pairs},
                   {"max_legs", bl_opt.max_legs}, {"restarts", bl_opt.restarts}, {"max_evals", bl_opt.max_evals},
                   {"seed", seed}};
            auto s = parse_surface(bl_surface);
            if (bl_radius >= 0.5 * s.ell) throw UsageError("--radius must be below half of ℓ at the centre");
            return bilipschitz(s, bl_radius, bl_halvings, bl_pairs, seed, bl_opt);
        };
    });

    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);  // CLI11 takes them reversed
    try {
        for (int i = 1; i < argc; ++i) {
            std::string a = argv[i];
            if (a == "--config" && i + 1 < argc) config_file = argv[i + 1];
            else if (a.rfind("--config=", 0) == 0) config_file = a.substr(9);
        }
        if (!config_file.empty()) {
            auto extra = config_args(config_file);
            args.insert(args.begin(), extra.rbegin(), extra.rend());
        }
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    ctx.command = app.get_subcommands().front()->get_name();
    ctx.dir = fs::path(out_dir) / ctx.command;
    std::error_code ec;
    fs::create_directories(ctx.dir, ec);
    if (ec) {
        std::cerr << "cannot create " << ctx.dir << ": " << ec.message() << '\n';
        return 2;
    }

    for (const char* stale : {"result.json", "diagnostic.json", "manifest.json"}) fs::remove(ctx.dir / stale, ec);

    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    json result, diagnostic;
    try {
        result = run();
        code = result.value("pass", false) ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        code = 2;
        diagnostic = {{"error", "usage"}, {"what", e.what()}};
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        code = 2;
        diagnostic = {{"error", "usage"}, {"what", e.what()}};
    } catch (const fd::CertificateViolation& e) {
        code = 3;
        diagnostic = {{"error", "certification"}, {"what", e.what()}, {"detail", e.detail}};
    } catch (const std::exception& e) {
        code = 3;
        diagnostic = {{"error", "certification"}, {"what", e.what()}};
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (code == 3) {
        diagnostic["command"] = ctx.command;
        diagnostic["config"] = ctx.config;
        ctx.write("diagnostic.json", diagnostic.dump(2) + "\n");
        std::cerr << diagnostic.dump(2) << '\n';
    } else if (code != 2) {
        strip_seconds(result, ctx.timings);
        ctx.write("result.json", result.dump(2) + "\n");
        std::cout << result.dump(2) << '\n';
    }

    json manifest{{"schema", "quake-manifest/1"},
                  {"command", ctx.command},
                  {"config", ctx.config},
                  {"versions", versions()},
                  {"started_utc", started},
                  {"wall_seconds", wall},
                  {"timings", ctx.timings},
                  {"exit_code", code},
                  {"artifacts", ctx.artifacts}};
    std::ofstream(ctx.dir / "manifest.json") << manifest.dump(2) << '\n';
    return code;
}
