#include "nonauto/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace nonauto {

const char* fiber_target_mode_name(FiberTargetMode mode) {
    switch (mode) {
        case FiberTargetMode::EtaCurve: return "eta-curve";
        case FiberTargetMode::Pullback: return "pullback";
        case FiberTargetMode::Inflated: return "inflated";
    }
    return "?";
}

Trajectory slow_limit(const SlowFastScenario& sc, const IntegratorConfig& cfg,
                      std::string* source) {
    const std::size_t n = sc.slow_dim();
    if (sc.slow.kind == SlowFieldKind::ConstantOne ||
        sc.slow.kind == SlowFieldKind::Constant) {
        Vec rate(n, 1.0);
        if (sc.slow.kind == SlowFieldKind::Constant) rate = sc.slow.constant;
        Trajectory t;
        t.dim = n;
        const std::size_t nodes = 2000;
        for (std::size_t i = 0; i <= nodes; ++i) {
            const double ti = sc.t0 * static_cast<double>(i) / static_cast<double>(nodes);
            t.times.push_back(ti);
            for (std::size_t c = 0; c < n; ++c) {
                t.states.push_back(sc.x0[c] + rate[c] * ti);
                t.derivs.push_back(rate[c]);
            }
        }
        if (source) *source = "closed-form";
        return t;
    }
    if (!sc.slow.depends_on_y()) {
        if (source) *source = "reduced-ode";
    } else {
        if (source) *source = "averaged-slow";
    }
    IntegratorConfig slow_cfg = cfg;
    slow_cfg.step = std::min(cfg.step, sc.t0 / 2000.0);
    return averaged_slow(sc, sc.t0, sc.avg_window, slow_cfg);
}

namespace {

// Extends the slow limit by clamping outside [0, t0].
Vec slow_limit_at_vec(const Trajectory& x0_traj, double t) {
    const double tc = std::clamp(t, x0_traj.front_time(), x0_traj.back_time());
    return x0_traj.at(tc);
}

// Base-equation attractor trajectory over [tau_a, tau_b] for the translated
// family: the layer field read at the reference x with the translation
// removed.
Trajectory base_attractor(const SlowFastScenario& sc, double tau_a, double tau_b,
                          const IntegratorConfig& cfg) {
    if (!sc.gamma) throw std::invalid_argument("translated layer structure required");
    if (sc.fast_dim() != 1)
        throw std::invalid_argument("eta curve requires a scalar fast variable");
    const GammaMap& gamma = *sc.gamma;
    // g0(u, tau) = g(x_ref, u + Gamma(x_ref), tau)
    const Vec x_ref = sc.x0;
    const double gamma_ref = gamma(x_ref);

    LayerField base;
    base.slow_dim = sc.layer.slow_dim;
    base.fast_dim = 1;
    base.omega = sc.layer.omega;
    base.g = [&layer = sc.layer, x_ref, gamma_ref](
                 std::span<const double>, std::span<const double> y, double tau,
                 const TorusPhase& th, std::span<double> out) {
        const Vec shifted{y[0] + gamma_ref};
        layer.g(x_ref, shifted, tau, th, out);
    };

    PairParams pp = sc.pair;
    const HyperbolicPair pair =
        riccati_pair(base, sc.theta0, x_ref, tau_a, tau_b, pp, cfg, sc.escape_radius);
    return pair.attractor;
}

std::vector<double> decade_grid(double a, double b, int per_decade, double floor_pos) {
    std::vector<double> grid;
    grid.push_back(a);
    const double lo = std::max(a, floor_pos);
    if (b > lo) {
        double d0 = std::floor(std::log10(lo));
        for (;;) {
            const double dec_lo = std::pow(10.0, d0);
            const double dec_hi = std::pow(10.0, d0 + 1);
            const double seg_lo = std::max(lo, dec_lo);
            const double seg_hi = std::min(b, dec_hi);
            if (seg_lo < seg_hi) {
                for (int i = 1; i <= per_decade; ++i) {
                    const double t = seg_lo + (seg_hi - seg_lo) * static_cast<double>(i) /
                                                  static_cast<double>(per_decade);
                    grid.push_back(t);
                }
            }
            if (dec_hi >= b) break;
            d0 += 1;
        }
    }
    grid.push_back(b);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

}  // namespace

Trajectory eta_curve(const SlowFastScenario& sc, double epsilon, double tau_a,
                     double tau_b, const IntegratorConfig& cfg, double tol,
                     int singleton_spot_checks) {
    if (!sc.gamma) throw std::invalid_argument("eta curve requires a gamma map");
    const GammaMap& gamma = *sc.gamma;
    const Trajectory x0_traj = slow_limit(sc, cfg, nullptr);

    // Spot-check that sampled fibers are singletons.
    for (int i = 0; i < singleton_spot_checks; ++i) {
        const double tau =
            tau_a + (tau_b - tau_a) * (singleton_spot_checks == 1
                                           ? 0.5
                                           : static_cast<double>(i) /
                                                 static_cast<double>(singleton_spot_checks - 1));
        const TorusPhase th = shift(sc.theta0, tau, sc.layer.omega);
        const Vec xs = slow_limit_at_vec(x0_traj, epsilon * tau);
        const Fiber f = pullback_fiber(sc.layer, th, xs, sc.fiber, cfg, sc.escape_radius);
        if (f.diameter() > tol)
            throw NotACopyOfBase("sampled fiber has diameter above tolerance");
    }

    const Trajectory a0 = base_attractor(sc, tau_a, tau_b, cfg);

    Trajectory eta;
    eta.dim = 1;
    eta.times = a0.times;
    eta.states.resize(a0.size());
    for (std::size_t i = 0; i < a0.size(); ++i) {
        const Vec xs = slow_limit_at_vec(x0_traj, epsilon * a0.times[i]);
        eta.states[i] = a0.states[i] + gamma(xs);
    }
    // Node derivatives by central differences; ends one-sided.
    eta.derivs.resize(a0.size());
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 >= eta.size() ? eta.size() - 1 : i + 1;
        eta.derivs[i] = (eta.states[hi] - eta.states[lo]) /
                        (eta.times[hi] - eta.times[lo]);
    }
    return eta;
}

TrackingReport tracking_error(const SlowFastScenario& sc, double epsilon,
                              const TrackingParams& params,
                              const IntegratorConfig& cfg) {
    if (sc.fast_dim() != 1 && params.metric == TrackingMetric::AttractorProxy)
        throw std::invalid_argument("attractor proxy needs a scalar fast variable");
    const double tau_end = sc.t0 / epsilon;
    if (!(params.t_start < tau_end))
        throw std::invalid_argument("t_start must precede t0/epsilon");

    TrackingReport report;
    report.epsilon = epsilon;
    report.t_start = params.t_start;
    report.mode = params.mode;
    report.metric = params.metric;

    std::string source;
    const Trajectory x0_traj = slow_limit(sc, cfg, &source);
    report.x0_source = source;

    // Curve to measure: the fast motion itself or the attractor of the fast
    // equation along the slow limit.
    Trajectory curve;
    if (params.metric == TrackingMetric::Solution) {
        const CoupledSolution sol = solve_coupled(sc, epsilon, cfg);
        report.blew_up = sol.blew_up;
        report.escape_time = sol.escape_time;
        curve = std::move(sol.fast);
    } else {
        VectorField f;
        f.dim = 1;
        f.eval = [&sc, &x0_traj, epsilon](std::span<const double> y, double tau,
                                          std::span<double> dy) {
            const Vec xs = slow_limit_at_vec(x0_traj, epsilon * tau);
            sc.layer.g(xs, y, tau, sc.theta0, dy);
        };
        // Pullback burn-in ahead of the measured window.
        const double burn = sc.pair.spin_up;
        Vec seed{sc.fiber.seeds.hi[0] + 1.0};
        const auto spun = integrate_endpoint(f, seed, params.t_start - burn,
                                             params.t_start, cfg, sc.escape_radius);
        if (spun.blew_up)
            throw NoBoundedSolution("attractor proxy escaped during spin-up");
        curve = integrate(f, spun.y, params.t_start, tau_end, cfg, sc.escape_radius);
        report.blew_up = curve.blew_up;
        report.escape_time = curve.escape_time;
    }

    const double measurable_end = report.blew_up ? curve.back_time() : tau_end;
    if (measurable_end <= params.t_start) {
        report.sup_error = std::numeric_limits<double>::quiet_NaN();
        return report;  // escaped before the measured window opened
    }

    // Target curve / fibers.
    Trajectory eta;
    if (params.mode == FiberTargetMode::EtaCurve)
        eta = eta_curve(sc, epsilon, std::min(params.t_start, 0.0), tau_end, cfg,
                        params.copy_tol);

    std::vector<double> grid;
    if (params.mode == FiberTargetMode::EtaCurve) {
        grid = decade_grid(params.t_start, measurable_end, params.samples_per_decade,
                           std::max(cfg.step, 1e-3));
    } else {
        const int count = std::max(params.fiber_samples, 2);
        for (int i = 0; i < count; ++i)
            grid.push_back(params.t_start + (measurable_end - params.t_start) *
                                                static_cast<double>(i) /
                                                static_cast<double>(count - 1));
    }

    Vec y(1);
    for (const double tau : grid) {
        if (tau < curve.front_time() || tau > curve.back_time()) continue;
        curve.at(tau, y);
        double dist = 0;
        switch (params.mode) {
            case FiberTargetMode::EtaCurve:
                dist = std::abs(y[0] - eta.at_scalar(tau));
                break;
            case FiberTargetMode::Pullback: {
                const TorusPhase th = shift(sc.theta0, tau, sc.layer.omega);
                const Vec xs = slow_limit_at_vec(x0_traj, epsilon * tau);
                const Fiber f =
                    pullback_fiber(sc.layer, th, xs, sc.fiber, cfg, sc.escape_radius);
                dist = dist_to_cloud(y, f.points);
                break;
            }
            case FiberTargetMode::Inflated: {
                const TorusPhase th = shift(sc.theta0, tau, sc.layer.omega);
                const Vec xs = slow_limit_at_vec(x0_traj, epsilon * tau);
                const Fiber f =
                    inflated_fiber(sc.layer, th, xs, params.delta, params.neighborhood,
                                   sc.fiber, cfg, sc.escape_radius);
                dist = dist_to_cloud(y, f.points);
                break;
            }
        }
        report.taus.push_back(tau);
        report.dists.push_back(dist);
    }
    report.sup_error = report.dists.empty()
                           ? std::numeric_limits<double>::quiet_NaN()
                           : *std::max_element(report.dists.begin(), report.dists.end());
    return report;
}

DeltaKReport delta_k(const SlowFastScenario& sc, std::vector<double> eps_descending,
                     const DeltaKParams& params, const IntegratorConfig& cfg) {
    if (eps_descending.empty()) throw std::invalid_argument("empty epsilon sequence");
    for (std::size_t i = 1; i < eps_descending.size(); ++i)
        if (eps_descending[i] >= eps_descending[i - 1])
            throw std::invalid_argument("epsilon sequence must be strictly descending");

    const FiberParams fiber = params.fiber_set ? params.fiber : sc.fiber;
    const Trajectory x0_traj = slow_limit(sc, cfg, nullptr);
    const Vec x_end = slow_limit_at_vec(x0_traj, sc.t0);

    DeltaKReport report;
    for (const double eps : eps_descending) {
        const CoupledSolution sol = solve_coupled(sc, eps, cfg);
        if (sol.blew_up)
            throw SimulationError("coupled solution escaped before t0; no final value");
        const double tau_end = sc.t0 / eps;
        const Vec y_end = sol.fast.at(tau_end);
        const TorusPhase theta_end = shift(sc.theta0, tau_end, sc.layer.omega);

        // Fibers recur across bisection iterates on the radial ladder; cache
        // them by sample key.
        std::map<std::pair<Vec, Vec>, Fiber> cache;
        const auto fiber_at = [&](const TorusPhase& th, const Vec& xs) -> const Fiber& {
            const auto key = std::make_pair(th.theta, xs);
            auto it = cache.find(key);
            if (it == cache.end()) {
                Fiber f = pullback_fiber(sc.layer, th, xs, fiber, cfg, sc.escape_radius);
                it = cache.emplace(key, std::move(f)).first;
            }
            return it->second;
        };
        const auto dist_to_inflated = [&](double delta) {
            const auto samples =
                neighborhood_samples(theta_end, x_end, delta, params.neighborhood);
            double best = std::numeric_limits<double>::infinity();
            std::size_t empty = 0;
            for (const auto& [th, xs] : samples) {
                try {
                    best = std::min(best, dist_to_cloud(y_end, fiber_at(th, xs).points));
                } catch (const EmptyFiber&) {
                    ++empty;
                }
            }
            if (empty == samples.size())
                throw EmptyFiber("every neighborhood sample produced an empty fiber");
            return best;
        };

        // The working-box diameter always satisfies the predicate; the center
        // distance gives a tighter valid start for the bisection.
        const double diam = std::max(sc.working_box().diameter(), params.search_tol);
        double hi = std::min(diam, dist_to_inflated(0.0) + params.search_tol);
        double lo = 0.0;
        if (!(dist_to_inflated(hi) <= hi)) hi = diam;  // fallback bracket
        while (hi - lo > params.search_tol) {
            const double mid = 0.5 * (lo + hi);
            if (dist_to_inflated(mid) <= mid)
                hi = mid;
            else
                lo = mid;
        }
        report.epsilons.push_back(eps);
        report.delta_ks.push_back(hi);
    }
    report.monotone_tail = true;
    for (std::size_t i = 1; i < report.delta_ks.size(); ++i)
        if (report.delta_ks[i] > report.delta_ks[i - 1] + params.search_tol)
            report.monotone_tail = false;
    return report;
}

std::vector<EquiAttractionEntry> equi_attraction_probe(
    const SlowFastScenario& sc, const std::vector<Vec>& x_grid, const SeedBox& seeds,
    const std::vector<double>& tol_levels, double horizon, const IntegratorConfig& cfg) {
    if (x_grid.empty() || tol_levels.empty())
        throw std::invalid_argument("equi-attraction probe needs nonempty grids");

    std::vector<EquiAttractionEntry> table;
    const auto seed_points = seeds.grid();
    for (const auto& x : x_grid) {
        // Moving attractor for this parameter, then the seed-cloud distances.
        PairParams pp = sc.pair;
        const HyperbolicPair pair = riccati_pair(sc.layer, sc.theta0, x, 0.0, horizon,
                                                 pp, cfg, sc.escape_radius);
        const Trajectory& target = pair.attractor;

        const VectorField f = frozen_field(sc.layer, x, sc.theta0);
        std::vector<Trajectory> runs;
        runs.reserve(seed_points.size());
        for (const auto& y0 : seed_points)
            runs.push_back(integrate(f, y0, 0.0, horizon, cfg, sc.escape_radius));

        // Sup distance over the cloud at each stored node of the longest run.
        // Escaped runs count as unbounded, so the entry reports T = infinity
        // instead of failing.
        const Trajectory* longest = &runs.front();
        for (const auto& run : runs)
            if (run.back_time() > longest->back_time()) longest = &run;
        const Trajectory& clock = *longest;
        std::vector<double> sup(clock.size(), 0.0);
        Vec y(1);
        for (std::size_t i = 0; i < clock.size(); ++i) {
            const double tau = clock.times[i];
            const double a = target.at_scalar(tau);
            double worst = 0;
            for (const auto& run : runs) {
                if (tau > run.back_time()) {
                    worst = std::numeric_limits<double>::infinity();
                    break;
                }
                run.at(tau, y);
                worst = std::max(worst, std::abs(y[0] - a));
            }
            sup[i] = worst;
        }
        for (const double tol : tol_levels) {
            // First node after which the cloud stays within tol.
            double T = std::numeric_limits<double>::infinity();
            for (std::size_t i = clock.size(); i-- > 0;) {
                if (sup[i] <= tol)
                    T = clock.times[i];
                else
                    break;
            }
            table.push_back({x, tol, T});
        }
    }
    return table;
}

}  // namespace nonauto
