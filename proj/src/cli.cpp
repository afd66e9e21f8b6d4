#include "mather_twist/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "mather_twist/barriers.hpp"
#include "mather_twist/config.hpp"
#include "mather_twist/errors.hpp"
#include "mather_twist/io.hpp"
#include "mather_twist/mather_structures.hpp"
#include "mather_twist/rotation.hpp"
#include "mather_twist/twist_dynamics.hpp"
#include "mather_twist/variational.hpp"

namespace mather_twist {

double parse_omega(const std::string& s) {
    if (s == "golden") return kGoldenMean;
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
        throw UsageError("--omega expects a number or 'golden', got '" + s + "'");
    return v;
}

namespace {

RotationClass parse_fraction(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) throw UsageError("expected p/q, got '" + s + "'");
    long p = 0, q = 0;
    const auto a = std::from_chars(s.data(), s.data() + slash, p);
    const auto b = std::from_chars(s.data() + slash + 1, s.data() + s.size(), q);
    if (a.ec != std::errc() || a.ptr != s.data() + slash || b.ec != std::errc() || b.ptr != s.data() + s.size())
        throw UsageError("expected p/q, got '" + s + "'");
    return RotationClass::make(p, q);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

class Run {
public:
    Run(const ToolConfig& cfg, std::string command) : cfg_(cfg) {
        manifest_.version = kToolVersion;
        manifest_.config = cfg;
        manifest_.command = std::move(command);
        manifest_.started = std::chrono::system_clock::now();
    }

    template <class F>
    auto timed(const std::string& op, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        auto r = f();
        manifest_.timings.emplace_back(op, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        return r;
    }

    void output(const std::string& name, std::string bytes) { files_[name] = std::move(bytes); }

    // Single writer, after all computation is done.
    void flush(const std::string& dir) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw UsageError("cannot create output directory '" + dir + "'");
        for (const auto& [name, bytes] : files_) {
            write_file((std::filesystem::path(dir) / name).string(), bytes);
            manifest_.digests[name] = sha256_hex(bytes);
        }
        manifest_.finished = std::chrono::system_clock::now();
        write_file((std::filesystem::path(dir) / "manifest.json").string(), manifest_.to_json());
    }

private:
    ToolConfig cfg_;
    RunManifest manifest_;
    std::map<std::string, std::string> files_;
};

MinimizeOptions minimize_options(const ToolConfig& cfg) {
    MinimizeOptions o;
    o.tol = cfg.tol_residual;
    o.restarts = cfg.restarts;
    o.seed = cfg.seed;
    return o;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Aubry-Mather theory toolkit for exact area-preserving twist maps", "mather-twist"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string config_path, out_dir = ".";
    std::optional<double> k_override;
    std::optional<std::uint64_t> seed_override;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--out", out_dir, "directory for outputs and manifest.json");
    app.add_option("--k", k_override, "override the coupling k");
    app.add_option("--seed", seed_override, "override the seed");

    auto* validate = app.add_subcommand("validate", "twist condition and derivative self-check");
    int validate_grid = 64;
    double validate_tol = 1e-6;
    validate->add_option("--grid", validate_grid, "grid points per axis");
    validate->add_option("--tol", validate_tol, "relative tolerance for the self-check");

    double x0 = 0.0, y0 = 0.0;
    long steps = 1000;
    auto* map = app.add_subcommand("map", "one step of the twist map");
    map->add_option("--x", x0)->required();
    map->add_option("--y", y0)->required();
    auto* orbit = app.add_subcommand("orbit", "iterate the twist map");
    orbit->add_option("--x", x0)->required();
    orbit->add_option("--y", y0)->required();
    orbit->add_option("--steps", steps)->check(CLI::PositiveNumber);

    long p = 0, q = 1;
    auto* minimize = app.add_subcommand("minimize", "periodic (p, q) action minimizer");
    minimize->add_option("--p", p)->required();
    minimize->add_option("--q", q)->required();

    auto* barrier = app.add_subcommand("barrier", "Peierls barrier or B_c profile");
    std::string kind = "peierls", omega_text;
    std::optional<int> grid, depth;
    std::optional<long> bp, bq;
    double c = 0.0;
    barrier->add_option("--p", bp);
    barrier->add_option("--q", bq);
    barrier->add_option("--omega", omega_text, "limit along convergents of omega (number or 'golden')");
    barrier->add_option("--depth", depth);
    barrier->add_option("--grid", grid);
    barrier->add_option("--kind", kind)->check(CLI::IsMember({"peierls", "bc", "bc-star"}));
    barrier->add_option("--c", c);

    auto* circle = app.add_subcommand("circle", "invariant circle test at one frequency");
    std::optional<double> tol;
    circle->add_option("--omega", omega_text)->required();
    circle->add_option("--depth", depth);
    circle->add_option("--grid", grid);
    circle->add_option("--tol", tol);

    auto* beta_cmd = app.add_subcommand("beta", "beta over the Farey sequence");
    std::optional<int> order;
    beta_cmd->add_option("--order", order);

    auto* alpha_cmd = app.add_subcommand("alpha", "conjugate of the sampled beta");
    double c_min = 0.0, c_max = 1.0;
    int c_n = 101;
    alpha_cmd->add_option("--order", order);
    alpha_cmd->add_option("--c-min", c_min);
    alpha_cmd->add_option("--c-max", c_max);
    alpha_cmd->add_option("--c-n", c_n)->check(CLI::Range(2, 1000000));

    auto* scan = app.add_subcommand("scan", "invariant circle verdicts over a frequency grid");
    double w_min = 0.05, w_max = 0.95;
    int w_n = 20;
    scan->add_option("--omega-min", w_min);
    scan->add_option("--omega-max", w_max);
    scan->add_option("--n", w_n)->check(CLI::Range(1, 100000));
    scan->add_option("--depth", depth);
    scan->add_option("--grid", grid);
    scan->add_option("--tol", tol);

    auto* connect = app.add_subcommand("connect", "connecting-orbit heuristic over a schedule");
    std::string schedule_text, lengths_text;
    connect->add_option("--schedule", schedule_text, "comma-separated classes, e.g. 1/2,2/5,1/3")->required();
    connect->add_option("--T", lengths_text, "comma-separated waiting lengths (one value applies to all)")->required();

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion& e) {
        out << kToolVersion << "\n";
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return exit_usage;
    }

    std::string command;
    for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);

    try {
        ToolConfig cfg = config_path.empty() ? ToolConfig{} : load_config(config_path);
        if (k_override) cfg.gf.k = *k_override;
        if (seed_override) cfg.seed = *seed_override;
        validate_config(cfg);
        const GeneratingFunction h(cfg.gf);
        const MinimizeOptions mopts = minimize_options(cfg);
        BarrierOptions bopts;
        bopts.minimize = mopts;
        Run run(cfg, command);
        int code = exit_ok;

        if (*validate) {
            const auto tw = run.timed("twist", [&] { return check_twist(h, validate_grid); });
            const auto sc = run.timed("selfcheck", [&] { return derivative_selfcheck(h, validate_tol, validate_grid); });
            std::ostringstream j;
            j << "{\n  \"twist_min\": " << format_real(tw.min_twist) << ",\n  \"twist_pass\": "
              << (tw.pass ? "true" : "false") << ",\n  \"selfcheck_worst\": " << format_real(sc.worst_error)
              << ",\n  \"selfcheck_quantity\": \"" << sc.worst_quantity << "\",\n  \"selfcheck_pass\": "
              << (sc.pass ? "true" : "false") << "\n}\n";
            run.output("validate.json", j.str());
            out << "twist min " << format_real(tw.min_twist) << (tw.pass ? " ok" : " FAILED") << "\n";
            out << "self-check worst " << format_real(sc.worst_error) << " (" << sc.worst_quantity << ")"
                << (sc.pass ? " ok" : " FAILED") << "\n";
            if (!tw.pass || !sc.pass) code = exit_numerical;
        } else if (*map || *orbit) {
            const long n = *map ? 1 : steps;
            const OrbitSample o = run.timed("iterate", [&] { return iterate(h, x0, y0, n); });
            run.output(*map ? "map.csv" : "orbit.csv", orbit_csv(o));
            if (*orbit && n >= 2) {
                const RotationEstimate r = rotation_number(o);
                std::ostringstream j;
                j << "{\n  \"rotation\": " << format_real(r.value);
                if (r.exact) j << ",\n  \"p\": " << r.exact->p << ",\n  \"q\": " << r.exact->q;
                j << "\n}\n";
                run.output("rotation.json", j.str());
                out << "rotation number " << format_real(r.value) << "\n";
            }
        } else if (*minimize) {
            const RotationClass rc = RotationClass::make(p, q);
            const MinimizerResult m = run.timed("minimize_periodic", [&] { return minimize_periodic(h, rc, mopts); });
            run.output("config.csv", configuration_csv(m.config));
            run.output("minimizer.json", minimizer_json(m));
            out << "action " << format_real(m.action) << " residual " << format_real(m.residual_inf) << "\n";
        } else if (*barrier) {
            BarrierProfile prof;
            if (kind == "peierls") {
                if (!omega_text.empty()) {
                    const double w = parse_omega(omega_text);
                    prof = run.timed("peierls_limit", [&] {
                        return peierls_limit(h, w, depth.value_or(cfg.cf_depth), grid.value_or(cfg.grid_a), bopts).profile;
                    });
                } else {
                    if (!bp || !bq) throw UsageError("barrier needs --p and --q, or --omega");
                    const RotationClass rc = RotationClass::make(*bp, *bq);
                    prof = run.timed("peierls_rational",
                                     [&] { return peierls_rational(h, rc, grid.value_or(cfg.grid_a), bopts); });
                }
            } else {
                const BetaSamples s = run.timed("beta_grid", [&] { return beta_grid(h, cfg.farey_order, mopts); });
                const double a = alpha(c, s);
                const auto hinf = run.timed("hc_tables", [&] {
                    return hc_infinity(hc_tables(h, c, a, cfg.dp_n, grid.value_or(cfg.grid_dp)));
                });
                prof = kind == "bc" ? barrier_B(hinf) : bc_star(hinf, cfg.tol_barrier);
                if (prof.inconclusive) {
                    err << "B_c has no zero on the grid; B_c^* is inconclusive\n";
                    code = exit_inconclusive;
                }
            }
            run.output("barrier.csv", barrier_csv(prof));
            if (!prof.values.empty()) out << "max barrier " << format_real(prof.max_value()) << "\n";
        } else if (*circle) {
            const double w = parse_omega(omega_text);
            const int d = depth.value_or(cfg.cf_depth);
            const CircleTest t = run.timed("invariant_circle_test", [&] {
                return invariant_circle_test(h, w, d, tol.value_or(cfg.tol_barrier), grid.value_or(cfg.grid_a), bopts);
            });
            run.output("verdict.json", verdict_json(t, d));
            run.output("barrier.csv", barrier_csv(t.evidence.profile));
            run.output("convergents.csv", convergents_csv(convergents(w, d)));
            out << "verdict " << to_string(t.verdict) << " max barrier " << format_real(t.max_barrier) << "\n";
            if (t.verdict == CircleVerdict::inconclusive) code = exit_inconclusive;
        } else if (*beta_cmd) {
            const BetaSamples s = run.timed("beta_grid", [&] { return beta_grid(h, order.value_or(cfg.farey_order), mopts); });
            run.output("beta.csv", beta_csv(s));
        } else if (*alpha_cmd) {
            const BetaSamples s = run.timed("beta_grid", [&] { return beta_grid(h, order.value_or(cfg.farey_order), mopts); });
            std::vector<double> cs;
            for (int i = 0; i < c_n; ++i) cs.push_back(c_min + (c_max - c_min) * i / (c_n - 1));
            run.output("beta.csv", beta_csv(s));
            run.output("alpha.csv", alpha_csv(alpha_grid(cs, s)));
        } else if (*scan) {
            if (!(w_min > 0.0 && w_max < 1.0 && (w_min < w_max || w_n == 1)))
                throw UsageError("scan needs 0 < omega-min < omega-max < 1");
            std::vector<double> ws;
            for (int i = 0; i < w_n; ++i) ws.push_back(w_n == 1 ? w_min : w_min + (w_max - w_min) * i / (w_n - 1));
            const InstabilityReport r = run.timed("instability_scan", [&] {
                return instability_scan(h, ws, depth.value_or(cfg.cf_depth), tol.value_or(cfg.tol_barrier),
                                        grid.value_or(cfg.grid_a), bopts);
            });
            run.output("instability.json", instability_json(r));
            out << r.intervals.size() << " destroyed interval(s)\n";
            for (auto v : r.verdicts)
                if (v == CircleVerdict::inconclusive) code = exit_inconclusive;
        } else if (*connect) {
            std::vector<RotationClass> schedule;
            for (const auto& s : split_commas(schedule_text)) schedule.push_back(parse_fraction(s));
            std::vector<long> lengths;
            for (const auto& s : split_commas(lengths_text)) {
                long t = 0;
                const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), t);
                if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("--T expects integers");
                lengths.push_back(t);
            }
            if (lengths.size() == 1) lengths.assign(schedule.size(), lengths.front());
            ConnectingOptions copts;
            copts.minimize = mopts;
            copts.joint_tol = cfg.joint_tol;
            ConnectingResult r;
            try {
                r = run.timed("connecting_heuristic", [&] { return connecting_heuristic(h, schedule, lengths, copts); });
            } catch (const NumericalFailure& e) {
                run.output("connect_config.csv", configuration_csv(Configuration::free_segment(e.best_iterate)));
                run.flush(out_dir);
                throw;
            }
            run.output("connecting.json", connecting_json(r));
            run.output("connect_config.csv", configuration_csv(r.config));
            out << "verdict " << to_string(r.verdict) << "\n";
        }
        run.flush(out_dir);
        return code;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const MomentumOutOfRange& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const WindowExceeded& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

}  // namespace mather_twist
