#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nonauto/hull.hpp"
#include "nonauto/ode.hpp"

namespace nonauto {

/// Slow-to-fast translation map x -> Gamma(x), scalar valued. Limits are set
/// for asymptotically constant maps and drive the transition experiments.
struct GammaMap {
    std::function<double(std::span<const double> x)> eval;
    bool is_zero = false;
    std::optional<double> limit_past;
    std::optional<double> limit_future;

    double operator()(std::span<const double> x) const { return eval(x); }
};

GammaMap zero_gamma();
GammaMap quasiperiodic_gamma(std::vector<ForcingTerm> terms, double offset);
GammaMap arctan_gamma(double amplitude = 1.0, double x_scale = 1.0);
/// Piecewise-linear interpolation through (x, value) points; clamped outside.
GammaMap table_gamma(std::vector<std::pair<double, double>> points);

/// Parametric fast field g(x, y, tau, theta). For fixed (x, theta) it is a
/// plain vector field in y. The hull phase theta selects the forcing element;
/// omega are the torus frequencies of that parametrization.
struct LayerField {
    std::size_t slow_dim = 1;
    std::size_t fast_dim = 1;
    std::vector<double> omega;
    std::function<void(std::span<const double> x, std::span<const double> y, double tau,
                       const TorusPhase& theta, std::span<double> out)>
        g;
    // Optional d/dy jacobian, row major; finite differences are used when absent.
    std::function<void(std::span<const double> x, std::span<const double> y, double tau,
                       const TorusPhase& theta, std::span<double> jac)>
        jac_y;
};

/// g(x, y, tau, theta) = -(y - Gamma(x))^2 + p_theta(tau), the scalar concave
/// quadratic family.
LayerField riccati_layer(QuasiPeriodicForcing p, GammaMap gamma, std::size_t slow_dim = 1);

/// Fast field with the slow parameter and hull element frozen.
VectorField frozen_field(const LayerField& field, Vec x, TorusPhase theta);
JacobianFn frozen_jacobian(const LayerField& field, Vec x, TorusPhase theta);

/// Axis-aligned seed box with a regular grid spacing.
struct SeedBox {
    Vec lo, hi;
    double spacing = 0.5;
    std::vector<Vec> grid() const;
    double diameter() const;
    double radius() const;  // max |corner|
};

struct FiberParams {
    SeedBox seeds;
    double t_pull = 40.0;
    double tol = 1e-3;
    unsigned workers = 1;
};

/// Finite point-cloud estimate of an attractor fiber, with the
/// self-consistency certificate obtained at half the pullback time.
struct Fiber {
    std::vector<Vec> points;
    double pullback_time = 0.0;
    double resolution = 0.0;
    bool converged = false;
    double hausdorff_gap = std::numeric_limits<double>::quiet_NaN();
    std::size_t escaped_seeds = 0;

    double diameter() const;
};

double hausdorff_distance(const std::vector<Vec>& a, const std::vector<Vec>& b);
/// One-sided semidistance sup_{a} inf_{b} |a - b|.
double hausdorff_semidistance(const std::vector<Vec>& a, const std::vector<Vec>& b);
double dist_to_cloud(std::span<const double> point, const std::vector<Vec>& cloud);

/// Pullback estimate of the fiber over (theta, x): every seed is integrated
/// from the phase shifted back by t_pull, and the endpoint cloud is kept.
/// Blown-up seeds are dropped and counted; EmptyFiber if none survive.
Fiber pullback_fiber(const LayerField& field, const TorusPhase& theta,
                     std::span<const double> x, const FiberParams& params,
                     const IntegratorConfig& cfg,
                     double escape_radius = kDefaultEscapeRadius);

/// Ball sampling used by the inflated fibers. Directions are drawn once from
/// the seed, so sample sets are reproducible. radial_step > 0 places shells at
/// its multiples up to delta (plus the boundary), which makes sample sets for
/// quantized deltas nest exactly; radial_step == 0 uses a single boundary
/// shell.
struct NeighborhoodSpec {
    int directions = 8;
    double radial_step = 0.0;
    std::uint64_t seed = 42;
};

/// (theta, x) samples of the closed delta-ball in the product metric
/// sup(hull distance, |x - x'|), center first.
std::vector<std::pair<TorusPhase, Vec>> neighborhood_samples(
    const TorusPhase& theta, std::span<const double> x, double delta,
    const NeighborhoodSpec& spec);

/// Union of pullback fibers over the sampled delta-ball. Sub-fiber points are
/// concatenated without cross-sample deduplication, so delta = 0 degenerates
/// to the center fiber exactly and nested sample sets give nested clouds.
Fiber inflated_fiber(const LayerField& field, const TorusPhase& theta,
                     std::span<const double> x, double delta,
                     const NeighborhoodSpec& spec, const FiberParams& params,
                     const IntegratorConfig& cfg,
                     double escape_radius = kDefaultEscapeRadius);

struct PairParams {
    double spin_up = 20.0;
    double separation_threshold = 1e-2;
    double hyperbolicity_threshold = 1e-2;
    double seed_margin = 1.0;
    std::optional<double> high_seed;  // auto-detected when absent
    std::optional<double> low_seed;
};

/// Attractor and repeller of a scalar concave fast equation, with finite-time
/// dichotomy exponents. The attractor comes from a high-seed pullback; the
/// repeller from the time-reversed flow seeded below both solutions.
struct HyperbolicPair {
    Trajectory attractor;
    Trajectory repeller;
    double beta_attractor = 0.0;
    double beta_repeller = 0.0;
    bool separated = false;
    double min_gap = 0.0;
};

HyperbolicPair riccati_pair(const LayerField& field, const TorusPhase& theta,
                            std::span<const double> x, double tau_a, double tau_b,
                            const PairParams& params, const IntegratorConfig& cfg,
                            double escape_radius = kDefaultEscapeRadius);

/// Window average of the trace of jac_y along a bounded base solution.
/// Negative means attractive, positive repulsive.
double dichotomy_exponent(const Trajectory& base, const JacobianFn& jac_y, double tau_a,
                          double tau_b);

struct UUBCertificate {
    double c = 0.0;
    double T = 0.0;
    double d = 0.0;  // radius of the tested seed set
    std::vector<Vec> x_set;
    double horizon = 0.0;
    bool passed = false;
    std::size_t violations = 0;
    std::string first_violation;
};

/// Empirical uniform-ultimate-boundedness check: every sampled solution with
/// seed in `seeds`, started at every sampled tau0, must satisfy
/// |y(tau + tau0)| <= c for tau in [T, horizon]. Failure is a result, not an
/// error.
UUBCertificate uub_check(const LayerField& field, const TorusPhase& theta,
                         const std::vector<Vec>& x_grid, const SeedBox& seeds,
                         const std::vector<double>& tau0_grid, double horizon,
                         double c_candidate, double T_candidate,
                         const IntegratorConfig& cfg,
                         double escape_radius = kDefaultEscapeRadius);

/// Brute-force Lipschitz-in-y estimate of a frozen field over a box, by
/// central differences on a grid.
double estimate_lipschitz_y(const VectorField& field, const SeedBox& box, double tau_a,
                            double tau_b, std::size_t tau_samples = 64);

}  // namespace nonauto
