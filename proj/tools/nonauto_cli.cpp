// Command-line front end: scenario simulation, fiber computation, tracking
// diagnostics, final-time delta search, tipping scans and figure presets.
//
// Exit codes: 0 ok, 1 config error, 2 numerical blow-up, 3 non-convergence.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nonauto/csv.hpp"
#include "nonauto/parallel.hpp"
#include "nonauto/scenario.hpp"
#include "nonauto/tracking.hpp"

namespace fs = std::filesystem;
using namespace nonauto;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitBlowUp = 2;
constexpr int kExitNoConvergence = 3;

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::optional<double> epsilon;
    unsigned workers = 0;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Scenario config file (JSON)");
    cmd->add_option("--preset", args.preset, "Built-in preset name");
    cmd->add_option("--epsilon", args.epsilon, "Timescale ratio for single-epsilon runs");
    cmd->add_option("--workers", args.workers, "Worker threads (0: env or 1)");
    cmd->add_option("--seed", args.seed, "Sampler seed");
    cmd->add_option("--out", args.out_dir, "Output directory");
}

unsigned resolve_workers(unsigned flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("NONAUTO_SLOWFAST_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

// Presets are frozen: a config given alongside one only contributes the
// run-level fields, and conflicting sections are reported and ignored.
ScenarioConfig resolve_config(const CommonArgs& args, std::string* preset_used) {
    ScenarioConfig cfg;
    if (!args.preset.empty()) {
        if (!is_known_preset(args.preset))
            throw ConfigError("preset", "unknown preset \"" + args.preset + "\"");
        cfg = preset_config(args.preset);
        *preset_used = args.preset;
        if (!args.config_path.empty()) {
            const ScenarioConfig user = load_config(args.config_path);
            const auto conflicts = conflicting_sections(cfg, user);
            for (const auto& section : conflicts)
                std::cerr << "warning: preset " << args.preset
                          << " ignores config section \"" << section << "\"\n";
            cfg.out_dir = user.out_dir;
            cfg.seed = user.seed;
        }
    } else if (!args.config_path.empty()) {
        cfg = load_config(args.config_path);
    } else {
        cfg = default_config();
    }
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed) cfg.seed = *args.seed;
    return cfg;
}

void write_manifest(const ScenarioConfig& cfg, const std::string& command,
                    const std::string& preset, unsigned workers,
                    const std::vector<std::pair<std::string, std::string>>& extra,
                    const std::vector<std::string>& outputs) {
    const fs::path path = fs::path(cfg.out_dir) / "manifest.json";
    write_file_atomic(path, manifest_json(cfg, command, preset, workers, extra, outputs));
}

int cmd_simulate(const CommonArgs& args) {
    std::string preset;
    ScenarioConfig cfg = resolve_config(args, &preset);
    const unsigned workers = resolve_workers(args.workers);
    SlowFastScenario sc = build_scenario(cfg);
    sc.fiber.workers = workers;
    const double eps = args.epsilon.value_or(sc.epsilon_grid.front());

    const CoupledSolution sol = solve_coupled(sc, eps, sc.integ);

    CsvTable slow({"epsilon", "t", "x"});
    for (std::size_t i = 0; i < sol.slow.size(); ++i)
        slow.add_row({eps, sol.slow.times[i], sol.slow.states[i]});
    CsvTable fast({"epsilon", "tau", "y", "blew_up"});
    for (std::size_t i = 0; i < sol.fast.size(); ++i) {
        const bool last = i + 1 == sol.fast.size();
        fast.add_row({eps, sol.fast.times[i], sol.fast.states[i],
                      static_cast<long long>(sol.blew_up && last ? 1 : 0)});
    }
    const fs::path out(cfg.out_dir);
    slow.save(out / "slow.csv");
    fast.save(out / "fast.csv");
    write_manifest(cfg, "simulate", preset, workers,
                   {{"epsilon", format_g17(eps)},
                    {"blew_up", sol.blew_up ? "true" : "false"},
                    {"consistent", sol.consistent ? "true" : "false"}},
                   {"slow.csv", "fast.csv"});
    if (sol.blew_up) {
        std::cerr << "blow-up at tau=" << sol.escape_time << "; partial output written\n";
        return kExitBlowUp;
    }
    std::cout << "wrote " << (out / "slow.csv").string() << " and "
              << (out / "fast.csv").string() << "\n";
    return kExitOk;
}

void export_fiber(const SlowFastScenario& sc, const Fiber& fiber,
                  const TorusPhase& theta, const Vec& x, CsvTable& table) {
    for (const auto& p : fiber.points) {
        std::vector<CsvCell> row;
        for (double th : theta.theta) row.emplace_back(th);
        for (double xi : x) row.emplace_back(xi);
        for (double yi : p) row.emplace_back(yi);
        row.emplace_back(fiber.pullback_time);
        row.emplace_back(static_cast<long long>(fiber.converged ? 1 : 0));
        table.add_row(row);
    }
    (void)sc;
}

std::vector<std::string> fiber_header(const SlowFastScenario& sc) {
    std::vector<std::string> header;
    for (std::size_t i = 0; i < sc.theta0.dim(); ++i)
        header.push_back("theta_" + std::to_string(i + 1));
    for (std::size_t i = 0; i < sc.slow_dim(); ++i)
        header.push_back("x_" + std::to_string(i + 1));
    for (std::size_t i = 0; i < sc.fast_dim(); ++i)
        header.push_back("y_" + std::to_string(i + 1));
    header.emplace_back("pullback_time");
    header.emplace_back("converged");
    return header;
}

int cmd_fiber(const CommonArgs& args, double delta) {
    std::string preset;
    ScenarioConfig cfg = resolve_config(args, &preset);
    const unsigned workers = resolve_workers(args.workers);
    SlowFastScenario sc = build_scenario(cfg);
    sc.fiber.workers = workers;

    NeighborhoodSpec spec;
    spec.seed = cfg.seed;

    Fiber fiber;
    try {
        fiber = delta > 0 ? inflated_fiber(sc.layer, sc.theta0, sc.x0, delta, spec,
                                           sc.fiber, sc.integ, sc.escape_radius)
                          : pullback_fiber(sc.layer, sc.theta0, sc.x0, sc.fiber,
                                           sc.integ, sc.escape_radius);
    } catch (const EmptyFiber& e) {
        std::cerr << "empty fiber: " << e.what() << "\n";
        return kExitBlowUp;
    }

    CsvTable table(fiber_header(sc));
    export_fiber(sc, fiber, sc.theta0, sc.x0, table);
    const fs::path out(cfg.out_dir);
    table.save(out / "fiber.csv");
    write_manifest(cfg, "fiber", preset, workers,
                   {{"delta", format_g17(delta)},
                    {"converged", fiber.converged ? "true" : "false"},
                    {"hausdorff_gap", format_g17(fiber.hausdorff_gap)},
                    {"escaped_seeds", std::to_string(fiber.escaped_seeds)}},
                   {"fiber.csv"});
    std::cout << "wrote " << (out / "fiber.csv").string() << " (" << fiber.points.size()
              << " points, converged=" << (fiber.converged ? "yes" : "no") << ")\n";
    return fiber.converged ? kExitOk : kExitNoConvergence;
}

int cmd_track(const CommonArgs& args, const std::string& mode_name, double delta,
              const std::string& metric_name, double t_start) {
    std::string preset;
    ScenarioConfig cfg = resolve_config(args, &preset);
    const unsigned workers = resolve_workers(args.workers);
    SlowFastScenario sc = build_scenario(cfg);
    sc.fiber.workers = workers;

    TrackingParams params;
    if (mode_name == "eta")
        params.mode = FiberTargetMode::EtaCurve;
    else if (mode_name == "pullback")
        params.mode = FiberTargetMode::Pullback;
    else if (mode_name == "inflated")
        params.mode = FiberTargetMode::Inflated;
    else
        throw ConfigError("--mode", "must be eta, pullback or inflated");
    if (metric_name == "solution")
        params.metric = TrackingMetric::Solution;
    else if (metric_name == "proxy")
        params.metric = TrackingMetric::AttractorProxy;
    else
        throw ConfigError("--metric", "must be solution or proxy");
    params.delta = delta;
    params.t_start = t_start;
    params.neighborhood.seed = cfg.seed;

    std::vector<double> eps_list =
        args.epsilon ? std::vector<double>{*args.epsilon} : sc.epsilon_grid;

    CsvTable table({"epsilon", "tau", "dist", "mode"});
    bool any_blow = false;
    for (const double eps : eps_list) {
        const TrackingReport report = tracking_error(sc, eps, params, sc.integ);
        any_blow = any_blow || report.blew_up;
        for (std::size_t i = 0; i < report.taus.size(); ++i)
            table.add_row({eps, report.taus[i], report.dists[i],
                           std::string(fiber_target_mode_name(report.mode))});
        std::cout << "epsilon=" << eps << " sup_error=" << report.sup_error
                  << " (x0 from " << report.x0_source << ")\n";
    }
    const fs::path out(cfg.out_dir);
    table.save(out / "tracking.csv");
    write_manifest(cfg, "track", preset, workers,
                   {{"mode", mode_name}, {"metric", metric_name}},
                   {"tracking.csv"});
    return any_blow ? kExitBlowUp : kExitOk;
}

int cmd_deltak(const CommonArgs& args, double search_tol) {
    std::string preset;
    ScenarioConfig cfg = resolve_config(args, &preset);
    const unsigned workers = resolve_workers(args.workers);
    SlowFastScenario sc = build_scenario(cfg);
    sc.fiber.workers = workers;

    std::vector<double> eps = sc.epsilon_grid;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());

    DeltaKParams params;
    params.search_tol = search_tol;
    params.neighborhood.seed = cfg.seed;

    const DeltaKReport report = delta_k(sc, eps, params, sc.integ);

    CsvTable table({"epsilon", "delta_k"});
    for (std::size_t i = 0; i < report.epsilons.size(); ++i)
        table.add_row({report.epsilons[i], report.delta_ks[i]});
    const fs::path out(cfg.out_dir);
    table.save(out / "deltak.csv");
    write_manifest(cfg, "deltak", preset, workers,
                   {{"search_tol", format_g17(search_tol)},
                    {"monotone_tail", report.monotone_tail ? "true" : "false"}},
                   {"deltak.csv"});
    std::cout << "wrote " << (out / "deltak.csv").string() << "\n";
    return kExitOk;
}

int cmd_equi(const CommonArgs& args, double x_lo, double x_hi, int x_count,
             const std::vector<double>& tols, double horizon) {
    std::string preset;
    ScenarioConfig cfg = resolve_config(args, &preset);
    const unsigned workers = resolve_workers(args.workers);
    SlowFastScenario sc = build_scenario(cfg);
    sc.fiber.workers = workers;

    std::vector<Vec> x_grid;
    for (int i = 0; i < std::max(x_count, 1); ++i)
        x_grid.push_back({x_count > 1 ? x_lo + (x_hi - x_lo) * i / (x_count - 1) : x_lo});
    const auto table = equi_attraction_probe(sc, x_grid, sc.fiber.seeds,
                                             tols.empty() ? std::vector<double>{1e-3, 1e-4}
                                                          : tols,
                                             horizon, sc.integ);
    CsvTable csv({"x", "tol", "T"});
    bool all_finite = true;
    for (const auto& e : table) {
        all_finite = all_finite && std::isfinite(e.T);
        csv.add_row({e.x[0], e.tol, e.T});
    }
    const fs::path out(cfg.out_dir);
    csv.save(out / "equi.csv");
    write_manifest(cfg, "equi", preset, workers,
                   {{"horizon", format_g17(horizon)}}, {"equi.csv"});
    std::cout << "wrote " << (out / "equi.csv").string() << "\n";
    return all_finite ? kExitOk : kExitNoConvergence;
}

int cmd_tipscan(const CommonArgs& args, std::optional<double> bisect_lo,
                std::optional<double> bisect_hi, double bisect_tol) {
    std::string preset;
    ScenarioConfig cfg = resolve_config(args, &preset);
    const unsigned workers = resolve_workers(args.workers);
    const TransitionScenario ts = build_transition(cfg);

    std::vector<double> eps_list =
        args.epsilon ? std::vector<double>{*args.epsilon} : cfg.epsilon_grid;

    CsvTable table({"epsilon", "outcome", "evidence_value"});
    std::vector<TippingVerdict> verdicts(eps_list.size());
    parallel_for(eps_list.size(), workers, [&](std::size_t i) {
        verdicts[i] = classify(ts, eps_list[i], std::nullopt, ts.integ);
    });
    for (const auto& v : verdicts)
        table.add_row({v.epsilon, std::string(tipping_outcome_name(v.outcome)),
                       v.evidence});

    std::vector<std::pair<std::string, std::string>> extra;
    if (bisect_lo && bisect_hi) {
        const CriticalRateResult r =
            critical_rate(ts, *bisect_lo, *bisect_hi, bisect_tol, ts.integ);
        if (r.found) {
            extra.emplace_back("critical_rate", format_g17(r.epsilon_critical));
            std::cout << "critical rate in [" << r.bracket_lo << ", " << r.bracket_hi
                      << "]\n";
        } else {
            extra.emplace_back("critical_rate", "none-found");
            std::cout << "no tipping found in [" << r.scanned_lo << ", " << r.scanned_hi
                      << "]\n";
        }
    }
    const fs::path out(cfg.out_dir);
    table.save(out / "tipscan.csv");
    write_manifest(cfg, "tipscan", preset, workers, extra, {"tipscan.csv"});
    return kExitOk;
}

int cmd_figure(const CommonArgs& args, const std::string& which) {
    CommonArgs preset_args = args;
    preset_args.preset = which;
    std::string preset;
    ScenarioConfig cfg = resolve_config(preset_args, &preset);
    const unsigned workers = resolve_workers(args.workers);
    const fs::path out(cfg.out_dir);

    if (which == "fig1") {
        SlowFastScenario sc = build_scenario(cfg);
        sc.fiber.workers = workers;
        const HyperbolicPair pair = riccati_pair(sc.layer, sc.theta0, sc.x0, 0.0, 100.0,
                                                 sc.pair, sc.integ, sc.escape_radius);
        CsvTable table({"tau", "attractor", "repeller"});
        for (std::size_t i = 0; i < pair.attractor.size(); ++i) {
            const double tau = pair.attractor.times[i];
            table.add_row({tau, pair.attractor.states[i], pair.repeller.at_scalar(tau)});
        }
        table.save(out / "fig1_pair.csv");
        write_manifest(cfg, "figure", preset, workers,
                       {{"beta_attractor", format_g17(pair.beta_attractor)},
                        {"beta_repeller", format_g17(pair.beta_repeller)},
                        {"min_gap", format_g17(pair.min_gap)},
                        {"separated", pair.separated ? "true" : "false"}},
                       {"fig1_pair.csv"});
        std::cout << "beta_attractor=" << pair.beta_attractor
                  << " beta_repeller=" << pair.beta_repeller << "\n";
        return kExitOk;
    }

    if (which == "fig2-left") {
        SlowFastScenario sc = build_scenario(cfg);
        sc.fiber.workers = workers;
        CsvTable table({"epsilon", "tau", "eta", "attractor", "sample_solution"});
        for (const double eps : sc.epsilon_grid) {
            const double tau_end = sc.t0 / eps;
            const Trajectory eta = eta_curve(sc, eps, 0.0, tau_end, sc.integ, sc.fiber.tol);
            const CoupledSolution sol = solve_coupled(sc, eps, sc.integ);
            const Trajectory x0_traj = slow_limit(sc, sc.integ, nullptr);
            VectorField f;
            f.dim = 1;
            f.eval = [&sc, &x0_traj, eps](std::span<const double> y, double tau,
                                          std::span<double> dy) {
                const double t = std::clamp(eps * tau, x0_traj.front_time(),
                                            x0_traj.back_time());
                const Vec xs = x0_traj.at(t);
                sc.layer.g(xs, y, tau, sc.theta0, dy);
            };
            Vec seed{sc.fiber.seeds.hi[0] + 1.0};
            const auto spun = integrate_endpoint(f, seed, -sc.pair.spin_up, 0.0, sc.integ,
                                                 sc.escape_radius);
            const Trajectory a_eps =
                integrate(f, spun.y, 0.0, tau_end, sc.integ, sc.escape_radius);
            const std::size_t stride = std::max<std::size_t>(1, a_eps.size() / 4000);
            for (std::size_t i = 0; i < a_eps.size(); i += stride) {
                const double tau = a_eps.times[i];
                table.add_row({eps, tau, eta.at_scalar(tau), a_eps.states[i],
                               sol.fast.at_scalar(std::min(tau, sol.fast.back_time()))});
            }
        }
        table.save(out / "fig2_left.csv");
        write_manifest(cfg, "figure", preset, workers, {}, {"fig2_left.csv"});
        return kExitOk;
    }

    if (which == "fig2-right") {
        SlowFastScenario sc = build_scenario(cfg);
        sc.fiber.workers = workers;
        // Log-spaced epsilon grid in (0, 0.5].
        const int count = 20;
        std::vector<double> eps_grid;
        for (int i = 0; i < count; ++i)
            eps_grid.push_back(0.5 * std::pow(0.01, static_cast<double>(count - 1 - i) /
                                                        static_cast<double>(count - 1)));
        CsvTable table({"epsilon", "sup_error"});
        std::vector<double> sups(eps_grid.size());
        parallel_for(eps_grid.size(), workers, [&](std::size_t i) {
            TrackingParams proxy;
            proxy.metric = TrackingMetric::AttractorProxy;
            sups[i] = tracking_error(sc, eps_grid[i], proxy, sc.integ).sup_error;
        });
        for (std::size_t i = 0; i < eps_grid.size(); ++i)
            table.add_row({eps_grid[i], sups[i]});
        table.save(out / "fig2_right.csv");
        write_manifest(cfg, "figure", preset, workers, {}, {"fig2_right.csv"});
        return kExitOk;
    }

    if (which == "fig3") {
        const TransitionScenario ts = build_transition(cfg);
        const double eps = cfg.epsilon_grid.front();
        const TransitionRun run = run_transition(ts, eps, std::nullopt, ts.integ);

        CsvTable curve({"tau", "gamma", "y"});
        const std::size_t stride = std::max<std::size_t>(1, run.path.size() / 8000);
        for (std::size_t i = 0; i < run.path.size(); i += stride) {
            const double tau = run.path.times[i];
            const Vec x{eps * tau};
            curve.add_row({tau, ts.gamma(x), run.path.states[i]});
        }
        curve.save(out / "fig3_transition.csv");

        std::vector<double> gamma_grid;
        for (int i = 0; i <= 20; ++i) gamma_grid.push_back(-0.96 + 0.096 * i);
        const double win = std::min(100.0, run.tau_end);
        const auto surface =
            attractor_surface(ts, gamma_grid, -win, win, 0.25, ts.integ);
        CsvTable surf({"gamma", "tau", "attractor_value"});
        for (const auto& p : surface) surf.add_row({p.gamma, p.tau, p.value});
        surf.save(out / "fig3_surface.csv");

        write_manifest(cfg, "figure", preset, workers,
                       {{"epsilon", format_g17(eps)},
                        {"outcome", tipping_outcome_name(run.verdict.outcome)},
                        {"evidence", format_g17(run.verdict.evidence)}},
                       {"fig3_transition.csv", "fig3_surface.csv"});
        std::cout << "epsilon=" << eps << " outcome="
                  << tipping_outcome_name(run.verdict.outcome) << "\n";
        return run.verdict.outcome == TippingOutcome::Tips ? kExitBlowUp : kExitOk;
    }

    throw ConfigError("figure", "unknown figure preset \"" + which + "\"");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation of singularly perturbed nonautonomous ODE systems"};
    app.require_subcommand(1);

    CommonArgs simulate_args, fiber_args, track_args, deltak_args, tipscan_args,
        figure_args;

    auto* simulate = app.add_subcommand("simulate", "Coupled slow-fast trajectories");
    add_common(simulate, simulate_args);

    auto* fiber = app.add_subcommand("fiber", "Pullback or inflated attractor fiber");
    add_common(fiber, fiber_args);
    double fiber_delta = 0.0;
    fiber->add_option("--delta", fiber_delta, "Inflation radius (0: bare pullback)");

    auto* track = app.add_subcommand("track", "Distance to the moving attractor target");
    add_common(track, track_args);
    std::string track_mode = "eta";
    std::string track_metric = "solution";
    double track_delta = 0.0, track_t_start = 0.0;
    track->add_option("--mode", track_mode, "eta | pullback | inflated");
    track->add_option("--metric", track_metric, "solution | proxy");
    track->add_option("--delta", track_delta, "Inflation radius for inflated mode");
    track->add_option("--t-start", track_t_start, "Fast time where measurement starts");

    auto* deltak = app.add_subcommand("deltak", "Final-time delta_k diagnostics");
    add_common(deltak, deltak_args);
    double deltak_tol = 1e-3;
    deltak->add_option("--search-tol", deltak_tol, "Bisection tolerance");

    CommonArgs equi_args;
    auto* equi = app.add_subcommand("equi", "Measured attraction times over a parameter grid");
    add_common(equi, equi_args);
    double equi_x_lo = 0.0, equi_x_hi = 0.5, equi_horizon = 40.0;
    int equi_x_count = 11;
    std::vector<double> equi_tols;
    equi->add_option("--x-lo", equi_x_lo, "Left end of the parameter grid");
    equi->add_option("--x-hi", equi_x_hi, "Right end of the parameter grid");
    equi->add_option("--x-count", equi_x_count, "Grid size");
    equi->add_option("--tol", equi_tols, "Attraction tolerances");
    equi->add_option("--horizon", equi_horizon, "Fast-time horizon");

    auto* tipscan = app.add_subcommand("tipscan", "Rate-induced tipping classification");
    add_common(tipscan, tipscan_args);
    std::optional<double> bisect_lo, bisect_hi;
    double bisect_tol = 1e-2;
    tipscan->add_option("--bisect-lo", bisect_lo, "Tracking rate to start a bisection");
    tipscan->add_option("--bisect-hi", bisect_hi, "Upper rate for the bisection");
    tipscan->add_option("--bisect-tol", bisect_tol, "Bisection tolerance");

    auto* figure = app.add_subcommand("figure", "Figure-reproduction presets");
    add_common(figure, figure_args);
    std::string figure_name;
    figure->add_option("name", figure_name, "fig1 | fig2-left | fig2-right | fig3")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(simulate_args);
        if (fiber->parsed()) return cmd_fiber(fiber_args, fiber_delta);
        if (track->parsed())
            return cmd_track(track_args, track_mode, track_delta, track_metric,
                             track_t_start);
        if (deltak->parsed()) return cmd_deltak(deltak_args, deltak_tol);
        if (equi->parsed())
            return cmd_equi(equi_args, equi_x_lo, equi_x_hi, equi_x_count, equi_tols,
                            equi_horizon);
        if (tipscan->parsed())
            return cmd_tipscan(tipscan_args, bisect_lo, bisect_hi, bisect_tol);
        if (figure->parsed()) return cmd_figure(figure_args, figure_name);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const EmptyFiber& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return kExitBlowUp;
    } catch (const NoBoundedSolution& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return kExitBlowUp;
    } catch (const AveragingUnavailable& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const UndecidedBoundary& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const SimulationError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitBlowUp;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
