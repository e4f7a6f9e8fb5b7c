#pragma once

#include <string>
#include <vector>

#include "nonauto/slowfast.hpp"

namespace nonauto {

enum class FiberTargetMode { EtaCurve, Pullback, Inflated };
enum class TrackingMetric { Solution, AttractorProxy };

const char* fiber_target_mode_name(FiberTargetMode mode);

/// Limit of the slow motion on [0, t0]: closed form for constant slow fields,
/// the reduced equation when f does not depend on y, otherwise the averaged
/// equation. `source` records which route produced it.
Trajectory slow_limit(const SlowFastScenario& sc, const IntegratorConfig& cfg,
                      std::string* source = nullptr);

/// Section curve eta(tau) = a(theta0 shifted by tau) + Gamma(x0(eps tau)) of a
/// copy-of-the-base attractor. Requires the translated layer structure and a
/// scalar fast variable. Sampled fibers with diameter above tol raise
/// NotACopyOfBase.
Trajectory eta_curve(const SlowFastScenario& sc, double epsilon, double tau_a,
                     double tau_b, const IntegratorConfig& cfg, double tol,
                     int singleton_spot_checks = 3);

struct TrackingParams {
    FiberTargetMode mode = FiberTargetMode::EtaCurve;
    TrackingMetric metric = TrackingMetric::Solution;
    double delta = 0.0;   // inflated mode
    double t_start = 0.0; // fast-time offset after which tracking is measured
    int samples_per_decade = 2000;  // curve targets
    int fiber_samples = 64;         // fiber targets (one fiber per sample)
    NeighborhoodSpec neighborhood;
    double copy_tol = 1e-3;  // singleton tolerance for the eta curve
};

struct TrackingReport {
    double epsilon = 0.0;
    double t_start = 0.0;
    std::vector<double> taus;
    std::vector<double> dists;
    double sup_error = 0.0;
    FiberTargetMode mode = FiberTargetMode::EtaCurve;
    TrackingMetric metric = TrackingMetric::Solution;
    std::string x0_source;
    bool blew_up = false;
    double escape_time = 0.0;
};

/// Distance from the fast motion (or from the attractor proxy) to the moving
/// target over [t_start, t0/eps].
TrackingReport tracking_error(const SlowFastScenario& sc, double epsilon,
                              const TrackingParams& params,
                              const IntegratorConfig& cfg);

struct DeltaKParams {
    double search_tol = 1e-3;
    NeighborhoodSpec neighborhood{8, 0.05, 42};  // radial ladder for nesting
    FiberParams fiber;       // lighter settings than the scenario default are fine
    bool fiber_set = false;  // false: use the scenario fiber settings
};

struct DeltaKReport {
    std::vector<double> epsilons;
    std::vector<double> delta_ks;
    bool monotone_tail = false;
};

/// Per epsilon (descending), the smallest delta with
/// dist(y_eps(t0/eps), inflated fiber at (theta0 shifted by t0/eps, x0(t0))) <= delta,
/// bisected to search_tol.
DeltaKReport delta_k(const SlowFastScenario& sc, std::vector<double> eps_descending,
                     const DeltaKParams& params, const IntegratorConfig& cfg);

struct EquiAttractionEntry {
    Vec x;
    double tol = 0.0;
    double T = 0.0;  // infinity when the cloud never settles below tol
};

/// Measured absorption times: per x, the first stored time after which the
/// seed cloud stays within tol of the moving attractor up to the horizon.
std::vector<EquiAttractionEntry> equi_attraction_probe(
    const SlowFastScenario& sc, const std::vector<Vec>& x_grid, const SeedBox& seeds,
    const std::vector<double>& tol_levels, double horizon, const IntegratorConfig& cfg);

}  // namespace nonauto
