#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nonauto/layer.hpp"

namespace nonauto {

/// Transition experiment for an asymptotically constant parameter drift.
/// The fast template defaults to the concave quadratic
/// y' = -(y - gamma)^2 + p(tau).
struct TransitionScenario {
    QuasiPeriodicForcing forcing;
    GammaMap gamma;  // finite past/future limits required
    std::function<double(double y, double gamma_value, double p_value)> fast_template;
    double band = 0.2;                  // classification distance band
    double final_window_fraction = 0.2; // portion of the horizon checked
    double gamma_limit_tol = 1e-3;      // |Gamma(+-X) - limit| at truncation
    double spin_up = 20.0;
    double horizon_x = 0.0;  // slow-scale truncation; 0 derives it from the tol
    IntegratorConfig integ;
    double escape_radius = kDefaultEscapeRadius;

    TorusPhase theta0() const { return TorusPhase::zeros(forcing.torus_dim()); }
};

TransitionScenario riccati_transition(QuasiPeriodicForcing forcing, GammaMap gamma);

enum class TippingOutcome { Tracks, Tips, Undecided };

const char* tipping_outcome_name(TippingOutcome o);

struct TippingVerdict {
    double epsilon = 0.0;
    TippingOutcome outcome = TippingOutcome::Undecided;
    // Final-window distance to the future attractor for tracks/undecided,
    // escape time for tips.
    double evidence = 0.0;
    bool blew_up = false;
    double escape_time = 0.0;
};

/// Full transition run, kept for exports.
struct TransitionRun {
    TippingVerdict verdict;
    Trajectory path;              // transition solution on [tau_start, tau_end]
    Trajectory future_attractor;  // frozen future-limit attractor on the final window
    double tau_start = 0.0;
    double tau_end = 0.0;
};

/// Integrates the transition equation from fast time -X/eps (where Gamma sits
/// at its past limit) to +X/eps. The default initial value is the past
/// attractor at the start time.
TransitionRun run_transition(const TransitionScenario& ts, double epsilon,
                             std::optional<double> y_init,
                             const IntegratorConfig& cfg);

TippingVerdict classify(const TransitionScenario& ts, double epsilon,
                        std::optional<double> y_init, const IntegratorConfig& cfg);

struct CriticalRateResult {
    bool found = false;  // false means no tipping in the scanned range
    double epsilon_critical = 0.0;
    double bracket_lo = 0.0;  // tracks
    double bracket_hi = 0.0;  // tips
    double scanned_lo = 0.0, scanned_hi = 0.0;
    std::vector<std::pair<double, TippingOutcome>> log;
};

/// Bisects the tracks/tips boundary. classify(eps_lo) must track. Verdict
/// monotonicity in epsilon is not assumed; the first boundary found is
/// reported together with the verdict log. Undecided probes raise
/// UndecidedBoundary.
CriticalRateResult critical_rate(const TransitionScenario& ts, double eps_lo,
                                 double eps_hi, double tol,
                                 const IntegratorConfig& cfg);

struct SurfacePoint {
    double gamma = 0.0;
    double tau = 0.0;
    double value = 0.0;
};

/// Frozen-parameter attractor surface: for each gamma in the grid, the
/// attractor trajectory of the frozen equation sampled over [tau_a, tau_b].
std::vector<SurfacePoint> attractor_surface(const TransitionScenario& ts,
                                            const std::vector<double>& gamma_grid,
                                            double tau_a, double tau_b,
                                            double sample_step,
                                            const IntegratorConfig& cfg);

/// Frozen-parameter attractor trajectory at a fixed gamma value.
Trajectory frozen_gamma_attractor(const TransitionScenario& ts, double gamma_value,
                                  double tau_a, double tau_b,
                                  const IntegratorConfig& cfg);

}  // namespace nonauto
