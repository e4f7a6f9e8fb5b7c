#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nonauto/hull.hpp"
#include "nonauto/layer.hpp"
#include "nonauto/ode.hpp"

namespace nonauto {

enum class SlowFieldKind { ConstantOne, Constant, Linear, Custom };

/// Right-hand side of the slow equation x' = f(x, y). The linear kind is the
/// scalar affine family f = a x + b y + c.
struct SlowField {
    SlowFieldKind kind = SlowFieldKind::ConstantOne;
    Vec constant;
    double x_coeff = 0.0, y_coeff = 0.0, offset = 0.0;
    std::function<void(std::span<const double> x, std::span<const double> y,
                       std::span<double> out)>
        custom;
    bool custom_depends_on_y = true;

    bool depends_on_y() const;
    void eval(std::span<const double> x, std::span<const double> y,
              std::span<double> out) const;
};

struct SlowFastScenario {
    SlowField slow;
    LayerField layer;
    std::optional<GammaMap> gamma;  // set when the layer is a translated family
    QuasiPeriodicForcing forcing;
    Vec x0{0.0};
    Vec y0{2.0};
    double t0 = 20.0;
    std::vector<double> epsilon_grid{0.05, 0.2, 0.35, 0.5};
    TorusPhase theta0;
    FiberParams fiber;
    PairParams pair;
    IntegratorConfig integ;
    HullMetricConfig metric;
    double escape_radius = kDefaultEscapeRadius;
    double avg_window = 40.0;  // Birkhoff window for the averaged slow equation

    std::size_t slow_dim() const { return x0.size(); }
    std::size_t fast_dim() const { return y0.size(); }
    /// Box used for comparison brute-forcing and delta search brackets.
    SeedBox working_box() const;
};

/// Fast-time solve of the coupled pair; the slow trajectory is the rescaled
/// view of the same solve. `consistent` certifies that the slow-time form of
/// the equations reproduces it step for step.
struct CoupledSolution {
    double epsilon = 0.0;
    Trajectory slow;  // slow time t in [0, t0], states x
    Trajectory fast;  // fast time tau in [0, t0/eps], states y
    bool consistent = false;
    bool blew_up = false;
    double escape_time = 0.0;
};

CoupledSolution solve_coupled(const SlowFastScenario& sc, double epsilon,
                              const IntegratorConfig& cfg);

/// Integrates the averaged slow equation, refreshing the frozen-parameter
/// layer attractor every 0.05 of slow drift. Reduces to x' = f(x) when the
/// slow field does not depend on y.
Trajectory averaged_slow(const SlowFastScenario& sc, double t0, double avg_window,
                         const IntegratorConfig& cfg);

struct ComparisonReport {
    double sigma = 0.0;
    double lipschitz = 0.0;
    double max_ratio = 0.0;      // sup over nodes of |y1-y2| / bound
    double max_field_gap = 0.0;  // measured sup |g1(y2) - g2(y2)|
    bool precondition_ok = false;
};

/// Checks the separation bound for solutions of close equations:
/// |y1(tau) - y2(tau)| <= (sigma/L)(e^{L|tau-tau0|} - 1) plus integrator
/// slack. Throws PreconditionViolated when the sigma bound fails along y2.
ComparisonReport comparison_bound_check(const VectorField& g1, double lipschitz,
                                        const VectorField& g2,
                                        std::span<const double> y0, double tau0,
                                        double tau1, double sigma,
                                        const IntegratorConfig& cfg,
                                        double escape_radius = kDefaultEscapeRadius);

/// Gronwall-type envelope |x(t)| <= e^{bt}|x0| + a (e^{bt} - 1)/b, with the
/// b -> 0 limit |x0| + a t.
double growth_envelope(double x0_norm, double a, double b, double t);

}  // namespace nonauto
