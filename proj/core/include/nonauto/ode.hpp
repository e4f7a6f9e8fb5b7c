#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nonauto/errors.hpp"

namespace nonauto {

using Vec = std::vector<double>;

enum class Method { Rk4, Rk45 };

struct IntegratorConfig {
    Method method = Method::Rk4;
    double step = 1e-2;        // fixed step size (Rk4); initial step (Rk45)
    double abs_tol = 1e-10;    // adaptive mode
    double rel_tol = 1e-10;    // adaptive mode
    std::size_t max_steps = 100'000'000;
    std::size_t store_stride = 1;  // record every n-th accepted step
};

constexpr double kDefaultEscapeRadius = 1e6;

/// Time-dependent vector field y' = f(y, tau). The evaluator must be
/// deterministic: same inputs give the same output.
struct VectorField {
    std::size_t dim = 1;
    std::function<void(std::span<const double> y, double tau, std::span<double> dy)> eval;
};

/// Jacobian evaluator (y, tau) -> d x d matrix, row major.
using JacobianFn =
    std::function<void(std::span<const double> y, double tau, std::span<double> jac)>;

/// Stored solution nodes plus node derivatives. Dense output between nodes
/// is cubic Hermite, exact at the nodes.
struct Trajectory {
    std::size_t dim = 1;
    std::vector<double> times;   // strictly increasing
    std::vector<double> states;  // node major, dim entries per node
    std::vector<double> derivs;  // f values at the nodes
    bool blew_up = false;
    double escape_time = 0.0;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    double front_time() const { return times.front(); }
    double back_time() const { return times.back(); }
    std::span<const double> state(std::size_t i) const {
        return {states.data() + i * dim, dim};
    }
    std::span<const double> deriv(std::size_t i) const {
        return {derivs.data() + i * dim, dim};
    }

    /// Dense output at tau; throws OutOfRange outside [front_time, back_time].
    Vec at(double tau) const;
    void at(double tau, std::span<double> out) const;
    /// Convenience for dim == 1.
    double at_scalar(double tau) const;

    bool covers(double tau_a, double tau_b) const;
};

/// Integrates field from (tau0, y0) to tau1. The trajectory is truncated and
/// flagged when |y| exceeds escape_radius.
Trajectory integrate(const VectorField& field, std::span<const double> y0, double tau0,
                     double tau1, const IntegratorConfig& cfg,
                     double escape_radius = kDefaultEscapeRadius);

struct EndpointResult {
    Vec y;
    double tau = 0.0;
    bool blew_up = false;
    double escape_time = 0.0;
};

/// Same stepping as integrate() without storing nodes.
EndpointResult integrate_endpoint(const VectorField& field, std::span<const double> y0,
                                  double tau0, double tau1, const IntegratorConfig& cfg,
                                  double escape_radius = kDefaultEscapeRadius);

/// Streams accepted nodes (tau, y) to observer without storing them, and
/// returns the endpoint.
EndpointResult integrate_scan(
    const VectorField& field, std::span<const double> y0, double tau0, double tau1,
    const IntegratorConfig& cfg, double escape_radius,
    const std::function<void(double, std::span<const double>)>& observer);

/// Alias of Trajectory::at for call sites that prefer a free function.
inline Vec evaluate(const Trajectory& traj, double tau) { return traj.at(tau); }

/// Solves z' = jac_y(base(tau), tau) z along a base trajectory. The base must
/// cover [tau0, tau1].
Trajectory variational_integrate(const Trajectory& base, const JacobianFn& jac_y,
                                 std::span<const double> z0, double tau0, double tau1,
                                 const IntegratorConfig& cfg,
                                 double escape_radius = 1e12);

}  // namespace nonauto
