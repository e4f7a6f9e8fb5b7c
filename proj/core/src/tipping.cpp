#include "nonauto/tipping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nonauto {

const char* tipping_outcome_name(TippingOutcome o) {
    switch (o) {
        case TippingOutcome::Tracks: return "tracks";
        case TippingOutcome::Tips: return "tips";
        case TippingOutcome::Undecided: return "undecided";
    }
    return "?";
}

TransitionScenario riccati_transition(QuasiPeriodicForcing forcing, GammaMap gamma) {
    TransitionScenario ts;
    ts.forcing = std::move(forcing);
    ts.gamma = std::move(gamma);
    ts.fast_template = [](double y, double gamma_value, double p_value) {
        const double u = y - gamma_value;
        return -u * u + p_value;
    };
    return ts;
}

namespace {

double require_limit(const std::optional<double>& v, const char* which) {
    if (!v) throw std::invalid_argument(std::string("gamma map has no ") + which +
                                        " limit; transitions need both");
    return *v;
}

// Smallest X (by doubling) with Gamma within tol of both limits at -X and +X.
double truncation_x(const TransitionScenario& ts, double past, double future) {
    if (ts.horizon_x > 0) return ts.horizon_x;
    for (double X = 1.0; X <= 1e9; X *= 2.0) {
        const Vec lo{-X}, hi{X};
        if (std::abs(ts.gamma(lo) - past) < ts.gamma_limit_tol &&
            std::abs(ts.gamma(hi) - future) < ts.gamma_limit_tol) {
            // Refine down by bisection to avoid gross overshoot.
            double a = X / 2.0, b = X;
            for (int i = 0; i < 40 && b - a > 1e-3 * b; ++i) {
                const double m = 0.5 * (a + b);
                const Vec mlo{-m}, mhi{m};
                if (std::abs(ts.gamma(mlo) - past) < ts.gamma_limit_tol &&
                    std::abs(ts.gamma(mhi) - future) < ts.gamma_limit_tol)
                    b = m;
                else
                    a = m;
            }
            return b;
        }
    }
    throw std::invalid_argument("gamma does not reach its limits within X <= 1e9");
}

VectorField frozen_gamma_field(const TransitionScenario& ts, double gamma_value) {
    VectorField f;
    f.dim = 1;
    f.eval = [&ts, gamma_value](std::span<const double> y, double tau,
                                std::span<double> dy) {
        dy[0] = ts.fast_template(y[0], gamma_value,
                                 forcing_at(ts.forcing, ts.theta0(), tau));
    };
    return f;
}

// Attractor of the frozen-gamma equation at time tau, by spin-up from a high
// seed.
EndpointResult frozen_attractor_at(const TransitionScenario& ts, double gamma_value,
                                   double tau, const IntegratorConfig& cfg) {
    const VectorField f = frozen_gamma_field(ts, gamma_value);
    const double high = gamma_value + std::sqrt(std::max(ts.forcing.max_value(), 0.0)) + 2.0;
    const Vec seed{high};
    return integrate_endpoint(f, seed, tau - ts.spin_up, tau, cfg, ts.escape_radius);
}

}  // namespace

Trajectory frozen_gamma_attractor(const TransitionScenario& ts, double gamma_value,
                                  double tau_a, double tau_b,
                                  const IntegratorConfig& cfg) {
    const VectorField f = frozen_gamma_field(ts, gamma_value);
    const auto start = frozen_attractor_at(ts, gamma_value, tau_a, cfg);
    if (start.blew_up)
        throw NoBoundedSolution("frozen-parameter attractor construction escaped");
    Trajectory a = integrate(f, start.y, tau_a, tau_b, cfg, ts.escape_radius);
    if (a.blew_up)
        throw NoBoundedSolution("frozen-parameter attractor escaped on the window");
    return a;
}

TransitionRun run_transition(const TransitionScenario& ts, double epsilon,
                             std::optional<double> y_init,
                             const IntegratorConfig& cfg) {
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    const double past = require_limit(ts.gamma.limit_past, "past");
    const double future = require_limit(ts.gamma.limit_future, "future");
    const double X = truncation_x(ts, past, future);
    const double tau_start = -X / epsilon;
    const double tau_end = X / epsilon;

    // Initial value on the past attractor unless overridden.
    double y0;
    if (y_init) {
        y0 = *y_init;
    } else {
        const auto a_past = frozen_attractor_at(ts, past, tau_start, cfg);
        if (a_past.blew_up)
            throw PastPairUnavailable("past attractor construction escaped");
        y0 = a_past.y[0];
    }

    VectorField transition;
    transition.dim = 1;
    transition.eval = [&ts, epsilon](std::span<const double> y, double tau,
                                     std::span<double> dy) {
        const Vec x{epsilon * tau};
        dy[0] = ts.fast_template(y[0], ts.gamma(x),
                                 forcing_at(ts.forcing, ts.theta0(), tau));
    };

    IntegratorConfig run_cfg = cfg;
    const double steps = (tau_end - tau_start) / cfg.step;
    run_cfg.store_stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(steps / 200000.0));

    TransitionRun run;
    run.tau_start = tau_start;
    run.tau_end = tau_end;
    const Vec seed{y0};
    run.path = integrate(transition, seed, tau_start, tau_end, run_cfg,
                         ts.escape_radius);

    TippingVerdict verdict;
    verdict.epsilon = epsilon;
    verdict.blew_up = run.path.blew_up;
    verdict.escape_time = run.path.escape_time;

    if (run.path.blew_up) {
        verdict.outcome = TippingOutcome::Tips;
        verdict.evidence = run.path.escape_time;
        run.verdict = verdict;
        return run;
    }

    const double window = ts.final_window_fraction * (tau_end - tau_start);
    const double win_a = tau_end - window;
    run.future_attractor = frozen_gamma_attractor(ts, future, win_a, tau_end, run_cfg);

    double sup = 0;
    for (std::size_t i = 0; i < run.path.size(); ++i) {
        const double tau = run.path.times[i];
        if (tau < win_a) continue;
        sup = std::max(sup,
                       std::abs(run.path.states[i] - run.future_attractor.at_scalar(tau)));
    }
    verdict.evidence = sup;
    verdict.outcome = sup <= ts.band ? TippingOutcome::Tracks : TippingOutcome::Undecided;
    run.verdict = verdict;
    return run;
}

TippingVerdict classify(const TransitionScenario& ts, double epsilon,
                        std::optional<double> y_init, const IntegratorConfig& cfg) {
    return run_transition(ts, epsilon, y_init, cfg).verdict;
}

CriticalRateResult critical_rate(const TransitionScenario& ts, double eps_lo,
                                 double eps_hi, double tol,
                                 const IntegratorConfig& cfg) {
    if (!(eps_lo > 0) || !(eps_hi >= eps_lo))
        throw std::invalid_argument("need 0 < eps_lo <= eps_hi");
    if (!(tol > 0)) throw std::invalid_argument("bisection tol must be positive");

    CriticalRateResult result;
    result.scanned_lo = eps_lo;
    result.scanned_hi = eps_hi;

    const auto probe = [&](double eps) {
        const TippingOutcome o = classify(ts, eps, std::nullopt, cfg).outcome;
        result.log.emplace_back(eps, o);
        return o;
    };

    const TippingOutcome lo_verdict = probe(eps_lo);
    if (lo_verdict != TippingOutcome::Tracks)
        throw std::invalid_argument("classify(eps_lo) must track to start a scan");
    if (eps_hi == eps_lo) return result;  // nothing to scan

    const TippingOutcome hi_verdict = probe(eps_hi);
    if (hi_verdict == TippingOutcome::Undecided) {
        std::ostringstream msg;
        msg << "undecided verdict at eps=" << eps_hi;
        throw UndecidedBoundary(msg.str());
    }
    if (hi_verdict == TippingOutcome::Tracks) return result;  // no tipping found

    double lo = eps_lo, hi = eps_hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const TippingOutcome o = probe(mid);
        if (o == TippingOutcome::Undecided) {
            std::ostringstream msg;
            msg << "undecided verdict at eps=" << mid;
            throw UndecidedBoundary(msg.str());
        }
        if (o == TippingOutcome::Tracks)
            lo = mid;
        else
            hi = mid;
    }
    result.found = true;
    result.bracket_lo = lo;
    result.bracket_hi = hi;
    result.epsilon_critical = 0.5 * (lo + hi);
    return result;
}

std::vector<SurfacePoint> attractor_surface(const TransitionScenario& ts,
                                            const std::vector<double>& gamma_grid,
                                            double tau_a, double tau_b,
                                            double sample_step,
                                            const IntegratorConfig& cfg) {
    if (!(sample_step > 0)) throw std::invalid_argument("sample_step must be positive");
    std::vector<SurfacePoint> surface;
    for (const double gamma_value : gamma_grid) {
        const Trajectory a = frozen_gamma_attractor(ts, gamma_value, tau_a, tau_b, cfg);
        for (double tau = tau_a; tau <= tau_b + 0.5 * sample_step; tau += sample_step)
            surface.push_back({gamma_value, std::min(tau, tau_b),
                               a.at_scalar(std::min(tau, tau_b))});
    }
    return surface;
}

}  // namespace nonauto
