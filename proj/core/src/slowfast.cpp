#include "nonauto/slowfast.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace nonauto {

bool SlowField::depends_on_y() const {
    switch (kind) {
        case SlowFieldKind::ConstantOne:
        case SlowFieldKind::Constant:
            return false;
        case SlowFieldKind::Linear:
            return y_coeff != 0.0;
        case SlowFieldKind::Custom:
            return custom_depends_on_y;
    }
    return true;
}

void SlowField::eval(std::span<const double> x, std::span<const double> y,
                     std::span<double> out) const {
    switch (kind) {
        case SlowFieldKind::ConstantOne:
            std::fill(out.begin(), out.end(), 1.0);
            return;
        case SlowFieldKind::Constant:
            if (constant.size() != out.size())
                throw std::invalid_argument("constant slow field dimension mismatch");
            std::copy(constant.begin(), constant.end(), out.begin());
            return;
        case SlowFieldKind::Linear:
            if (x.size() != 1 || out.size() != 1)
                throw std::invalid_argument("linear slow field is scalar");
            out[0] = x_coeff * x[0] + (y.empty() ? 0.0 : y_coeff * y[0]) + offset;
            return;
        case SlowFieldKind::Custom:
            if (!custom) throw std::invalid_argument("custom slow field not set");
            custom(x, y, out);
            return;
    }
}

SeedBox SlowFastScenario::working_box() const {
    SeedBox box = fiber.seeds;
    for (std::size_t i = 0; i < box.lo.size(); ++i) {
        box.lo[i] -= 1.0;
        box.hi[i] += 1.0;
    }
    return box;
}

namespace {

VectorField joint_fast_field(const SlowFastScenario& sc, double epsilon) {
    const std::size_t n = sc.slow_dim();
    const std::size_t m = sc.fast_dim();
    VectorField f;
    f.dim = n + m;
    f.eval = [&sc, epsilon, n, m](std::span<const double> state, double tau,
                                  std::span<double> d) {
        const std::span<const double> x = state.subspan(0, n);
        const std::span<const double> y = state.subspan(n, m);
        sc.slow.eval(x, y, d.subspan(0, n));
        for (std::size_t i = 0; i < n; ++i) d[i] *= epsilon;
        sc.layer.g(x, y, tau, sc.theta0, d.subspan(n, m));
    };
    return f;
}

// Slow-time form with step dt = eps * dtau reproduces the fast-time solve up
// to rounding; disagreement flags a transcription bug between the two forms.
bool verify_slow_form(const SlowFastScenario& sc, double epsilon,
                      const Trajectory& joint, const IntegratorConfig& cfg,
                      double tau_end) {
    if (joint.blew_up) return true;  // nothing comparable past the escape
    const std::size_t n = sc.slow_dim();
    const std::size_t m = sc.fast_dim();
    VectorField f;
    f.dim = n + m;
    f.eval = [&sc, epsilon, n, m](std::span<const double> state, double t,
                                  std::span<double> d) {
        const std::span<const double> x = state.subspan(0, n);
        const std::span<const double> y = state.subspan(n, m);
        sc.slow.eval(x, y, d.subspan(0, n));
        sc.layer.g(x, y, t / epsilon, sc.theta0, d.subspan(n, m));
        for (std::size_t i = 0; i < m; ++i) d[n + i] /= epsilon;
    };
    Vec s0(n + m);
    std::copy(sc.x0.begin(), sc.x0.end(), s0.begin());
    std::copy(sc.y0.begin(), sc.y0.end(), s0.begin() + static_cast<std::ptrdiff_t>(n));
    IntegratorConfig slow_cfg = cfg;
    slow_cfg.step = cfg.step * epsilon;
    const auto end = integrate_endpoint(f, s0, 0.0, epsilon * tau_end, slow_cfg,
                                        sc.escape_radius);
    if (end.blew_up) return false;
    const auto ref = joint.state(joint.size() - 1);
    double diff = 0;
    for (std::size_t i = 0; i < n + m; ++i)
        diff = std::max(diff, std::abs(end.y[i] - ref[i]));
    return diff < 1e-6;
}

}  // namespace

CoupledSolution solve_coupled(const SlowFastScenario& sc, double epsilon,
                              const IntegratorConfig& cfg) {
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    const std::size_t n = sc.slow_dim();
    const std::size_t m = sc.fast_dim();
    const double tau_end = sc.t0 / epsilon;

    const VectorField f = joint_fast_field(sc, epsilon);
    Vec s0(n + m);
    std::copy(sc.x0.begin(), sc.x0.end(), s0.begin());
    std::copy(sc.y0.begin(), sc.y0.end(), s0.begin() + static_cast<std::ptrdiff_t>(n));

    const Trajectory joint = integrate(f, s0, 0.0, tau_end, cfg, sc.escape_radius);

    CoupledSolution out;
    out.epsilon = epsilon;
    out.blew_up = joint.blew_up;
    out.escape_time = joint.escape_time;

    out.fast.dim = m;
    out.fast.blew_up = joint.blew_up;
    out.fast.escape_time = joint.escape_time;
    out.slow.dim = n;
    out.slow.blew_up = joint.blew_up;
    out.slow.escape_time = joint.blew_up ? epsilon * joint.escape_time : 0.0;
    const std::size_t nodes = joint.size();
    out.fast.times.reserve(nodes);
    out.slow.times.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double tau = joint.times[i];
        const auto state = joint.state(i);
        const auto deriv = joint.deriv(i);
        out.fast.times.push_back(tau);
        out.fast.states.insert(out.fast.states.end(), state.begin() + n, state.end());
        out.fast.derivs.insert(out.fast.derivs.end(), deriv.begin() + n, deriv.end());
        out.slow.times.push_back(epsilon * tau);
        out.slow.states.insert(out.slow.states.end(), state.begin(), state.begin() + n);
        // dx/dt = (dx/dtau)/eps = f(x, y)
        for (std::size_t c = 0; c < n; ++c)
            out.slow.derivs.push_back(deriv[c] / epsilon);
    }

    out.consistent = verify_slow_form(sc, epsilon, joint, cfg, tau_end);
    return out;
}

Trajectory averaged_slow(const SlowFastScenario& sc, double t0, double avg_window,
                         const IntegratorConfig& cfg) {
    if (!(t0 > 0) || !(avg_window > 0))
        throw std::invalid_argument("horizon and averaging window must be positive");
    const std::size_t n = sc.slow_dim();
    const std::size_t m = sc.fast_dim();

    VectorField f;
    f.dim = n;

    if (!sc.slow.depends_on_y()) {
        const Vec y_dummy(m, 0.0);
        f.eval = [&sc, &y_dummy](std::span<const double> x, double, std::span<double> d) {
            sc.slow.eval(x, y_dummy, d);
        };
        return integrate(f, sc.x0, 0.0, t0, cfg, sc.escape_radius);
    }

    // Frozen-parameter attractor, refreshed every 0.05 of slow drift.
    struct Cache {
        bool valid = false;
        Vec x_ref;
        Trajectory orbit;
    };
    auto cache = std::make_shared<Cache>();

    auto refresh = [&sc, avg_window, &cfg](const std::span<const double> x, Cache& c) {
        const Vec xv(x.begin(), x.end());
        // The averaged equation needs a converged fiber at the frozen
        // parameter before its Birkhoff average means anything.
        try {
            const Fiber fiber =
                pullback_fiber(sc.layer, sc.theta0, xv, sc.fiber, cfg, sc.escape_radius);
            if (!fiber.converged)
                throw AveragingUnavailable(
                    "layer fiber did not converge at the frozen parameter");
        } catch (const EmptyFiber&) {
            throw AveragingUnavailable("every fiber seed escaped at the frozen parameter");
        }
        const VectorField layer_f = frozen_field(sc.layer, xv, sc.theta0);
        // Spin up from the pulled-back phase, then record one window.
        const double burn = sc.pair.spin_up;
        const TorusPhase phase = shift(sc.theta0, -burn, sc.layer.omega);
        const VectorField burn_f = frozen_field(sc.layer, xv, phase);
        const auto seeds = sc.fiber.seeds.grid();
        const Vec seed = seeds[seeds.size() / 2];
        const auto spun = integrate_endpoint(burn_f, seed, 0.0, burn, cfg,
                                             sc.escape_radius);
        if (spun.blew_up)
            throw AveragingUnavailable("frozen-parameter attractor escaped during spin-up");
        Trajectory orbit = integrate(layer_f, spun.y, 0.0, avg_window, cfg,
                                     sc.escape_radius);
        if (orbit.blew_up)
            throw AveragingUnavailable("frozen-parameter attractor escaped in the window");
        if (orbit.size() < 2)
            throw AveragingUnavailable("averaging window shorter than one step");
        c.orbit = std::move(orbit);
        c.x_ref.assign(x.begin(), x.end());
        c.valid = true;
    };

    f.eval = [&sc, cache, refresh, n, m](std::span<const double> x, double,
                                         std::span<double> d) {
        double drift = 0;
        if (cache->valid)
            for (std::size_t i = 0; i < n; ++i)
                drift = std::max(drift, std::abs(x[i] - cache->x_ref[i]));
        if (!cache->valid || drift > 0.05) refresh(x, *cache);
        // Birkhoff average of f(x, y*(s)) over the cached orbit (trapezoid).
        const Trajectory& orbit = cache->orbit;
        Vec acc(n, 0.0), fx(n);
        double t_prev = orbit.times.front();
        Vec f_prev(n);
        sc.slow.eval(x, orbit.state(0), f_prev);
        for (std::size_t i = 1; i < orbit.size(); ++i) {
            sc.slow.eval(x, orbit.state(i), fx);
            const double dt = orbit.times[i] - t_prev;
            for (std::size_t c = 0; c < n; ++c)
                acc[c] += 0.5 * dt * (f_prev[c] + fx[c]);
            f_prev = fx;
            t_prev = orbit.times[i];
        }
        const double len = orbit.back_time() - orbit.front_time();
        for (std::size_t c = 0; c < n; ++c) d[c] = acc[c] / len;
    };
    return integrate(f, sc.x0, 0.0, t0, cfg, sc.escape_radius);
}

ComparisonReport comparison_bound_check(const VectorField& g1, double lipschitz,
                                        const VectorField& g2,
                                        std::span<const double> y0, double tau0,
                                        double tau1, double sigma,
                                        const IntegratorConfig& cfg,
                                        double escape_radius) {
    if (!(lipschitz > 0)) throw std::invalid_argument("Lipschitz constant must be positive");
    if (sigma < 0) throw std::invalid_argument("sigma must be >= 0");

    const Trajectory y1 = integrate(g1, y0, tau0, tau1, cfg, escape_radius);
    const Trajectory y2 = integrate(g2, y0, tau0, tau1, cfg, escape_radius);
    if (y1.blew_up || y2.blew_up)
        throw PreconditionViolated("a comparison solution escaped before tau1");

    ComparisonReport report;
    report.sigma = sigma;
    report.lipschitz = lipschitz;

    // Verify the closeness hypothesis along y2.
    Vec d1(g1.dim), d2(g2.dim);
    for (std::size_t i = 0; i < y2.size(); ++i) {
        const double tau = y2.times[i];
        const auto y = y2.state(i);
        g1.eval(y, tau, d1);
        g2.eval(y, tau, d2);
        double gap = 0;
        for (std::size_t c = 0; c < g1.dim; ++c) gap += (d1[c] - d2[c]) * (d1[c] - d2[c]);
        gap = std::sqrt(gap);
        report.max_field_gap = std::max(report.max_field_gap, gap);
    }
    if (report.max_field_gap > sigma * (1 + 1e-12) + 1e-15) {
        std::ostringstream msg;
        msg << "field gap " << report.max_field_gap << " exceeds sigma " << sigma;
        throw PreconditionViolated(msg.str());
    }
    report.precondition_ok = true;

    // Integrator slack enters through an inflated sigma, keeping the bound
    // shape.
    const double slack =
        cfg.method == Method::Rk4 ? 10.0 * std::pow(cfg.step, 4) : 10.0 * cfg.abs_tol;
    Vec v1(g1.dim);
    for (std::size_t i = 0; i < y2.size(); ++i) {
        const double tau = y2.times[i];
        if (tau == tau0) continue;
        y1.at(tau, v1);
        const auto y = y2.state(i);
        double lhs = 0;
        for (std::size_t c = 0; c < g1.dim; ++c) lhs += (v1[c] - y[c]) * (v1[c] - y[c]);
        lhs = std::sqrt(lhs);
        const double rhs = (sigma + slack) / lipschitz *
                           (std::exp(lipschitz * std::abs(tau - tau0)) - 1.0);
        if (rhs > 0) report.max_ratio = std::max(report.max_ratio, lhs / rhs);
    }
    return report;
}

double growth_envelope(double x0_norm, double a, double b, double t) {
    if (b == 0.0) return x0_norm + a * t;
    return std::exp(b * t) * x0_norm + a * (std::exp(b * t) - 1.0) / b;
}

}  // namespace nonauto
