#include "nonauto/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace nonauto {

namespace {

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double norm2(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void validate(const VectorField& field, std::span<const double> y0, double tau0,
              double tau1, const IntegratorConfig& cfg) {
    if (!field.eval) throw std::invalid_argument("vector field has no evaluator");
    if (y0.size() != field.dim) throw std::invalid_argument("state dimension mismatch");
    if (!(tau1 >= tau0)) throw std::invalid_argument("tau1 must be >= tau0");
    if (!(cfg.step > 0)) throw std::invalid_argument("step must be positive");
    if (!(cfg.abs_tol > 0) || !(cfg.rel_tol > 0))
        throw std::invalid_argument("tolerances must be positive");
    if (cfg.max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    if (!all_finite(y0)) throw std::invalid_argument("initial state is not finite");
}

// Called with the initial node and each recorded node; `last` marks the final
// node of the run (end of interval or escape).
using Sink = std::function<void(double tau, std::span<const double> y,
                                std::span<const double> dy, bool last)>;

struct RunOutcome {
    bool blew_up = false;
    double escape_time = 0.0;
};

void eval_checked(const VectorField& f, std::span<const double> y, double tau,
                  std::span<double> dy) {
    f.eval(y, tau, dy);
    if (!all_finite(dy)) throw NonFiniteField("field evaluator returned NaN/Inf");
}

RunOutcome run_rk4(const VectorField& f, std::span<const double> y0, double tau0,
                   double tau1, const IntegratorConfig& cfg, double escape_radius,
                   const Sink& sink) {
    const std::size_t d = f.dim;
    Vec y(y0.begin(), y0.end());
    Vec k1(d), k2(d), k3(d), k4(d), work(d), y_new(d);

    double tau = tau0;
    eval_checked(f, y, tau, k1);
    if (tau1 <= tau0) {
        sink(tau, y, k1, true);
        return {};
    }
    sink(tau, y, k1, false);

    std::size_t steps = 0;
    std::size_t since_store = 0;
    for (;;) {
        if (steps >= cfg.max_steps)
            throw StepLimitExceeded("max_steps reached before end of interval");
        // The final step absorbs accumulated rounding instead of leaving a
        // residual micro-step.
        const double remaining = tau1 - tau;
        const double h =
            remaining <= cfg.step * (1.0 + 1e-9) ? remaining : cfg.step;
        // k1 already holds f(y, tau)
        for (std::size_t i = 0; i < d; ++i) work[i] = y[i] + 0.5 * h * k1[i];
        eval_checked(f, work, tau + 0.5 * h, k2);
        for (std::size_t i = 0; i < d; ++i) work[i] = y[i] + 0.5 * h * k2[i];
        eval_checked(f, work, tau + 0.5 * h, k3);
        for (std::size_t i = 0; i < d; ++i) work[i] = y[i] + h * k3[i];
        eval_checked(f, work, tau + h, k4);
        for (std::size_t i = 0; i < d; ++i)
            y_new[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        if (!all_finite(y_new)) throw NonFiniteField("state became NaN/Inf");

        tau += h;
        if (tau > tau1 - 1e-15 * std::max(1.0, std::abs(tau1))) tau = tau1;
        y.swap(y_new);
        ++steps;
        ++since_store;
        if (norm2(y) > escape_radius) {
            // k4 stands in for the node derivative; the state may sit past the
            // region where the field is safe to evaluate.
            sink(tau, y, k4, true);
            return {true, tau};
        }
        eval_checked(f, y, tau, k1);  // derivative at the new node, reused next step

        const bool done = tau >= tau1;
        if (done || since_store >= cfg.store_stride) {
            sink(tau, y, k1, done);
            since_store = 0;
        }
        if (done) return {};
    }
}

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

RunOutcome run_rk45(const VectorField& f, std::span<const double> y0, double tau0,
                    double tau1, const IntegratorConfig& cfg, double escape_radius,
                    const Sink& sink) {
    const std::size_t d = f.dim;
    Vec y(y0.begin(), y0.end());
    Vec k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d), work(d), y_new(d);

    double tau = tau0;
    eval_checked(f, y, tau, k1);
    if (tau1 <= tau0) {
        sink(tau, y, k1, true);
        return {};
    }
    sink(tau, y, k1, false);

    double h = std::min(cfg.step, tau1 - tau0);
    std::size_t steps = 0;
    std::size_t since_store = 0;
    for (;;) {
        if (steps >= cfg.max_steps)
            throw StepLimitExceeded("max_steps reached before end of interval");
        if (tau1 - tau <= h * (1.0 + 1e-9)) h = tau1 - tau;
        for (std::size_t i = 0; i < d; ++i) work[i] = y[i] + h * a21 * k1[i];
        eval_checked(f, work, tau + c2 * h, k2);
        for (std::size_t i = 0; i < d; ++i)
            work[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval_checked(f, work, tau + c3 * h, k3);
        for (std::size_t i = 0; i < d; ++i)
            work[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval_checked(f, work, tau + c4 * h, k4);
        for (std::size_t i = 0; i < d; ++i)
            work[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        eval_checked(f, work, tau + c5 * h, k5);
        for (std::size_t i = 0; i < d; ++i)
            work[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        eval_checked(f, work, tau + h, k6);
        for (std::size_t i = 0; i < d; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                   b6 * k6[i]);
        eval_checked(f, y_new, tau + h, k7);

        double err = 0;
        for (std::size_t i = 0; i < d; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
            const double scale =
                cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err += (e / scale) * (e / scale);
        }
        err = std::sqrt(err / static_cast<double>(d));
        ++steps;

        if (err <= 1.0) {
            tau += h;
            if (tau > tau1 - 1e-15 * std::max(1.0, std::abs(tau1))) tau = tau1;
            y.swap(y_new);
            k1.swap(k7);  // FSAL
            if (!all_finite(y)) throw NonFiniteField("state became NaN/Inf");
            ++since_store;
            if (norm2(y) > escape_radius) {
                sink(tau, y, k1, true);
                return {true, tau};
            }
            const bool done = tau >= tau1;
            if (done || since_store >= cfg.store_stride) {
                sink(tau, y, k1, done);
                since_store = 0;
            }
            if (done) return {};
        }
        const double factor =
            err > 0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
        h = std::max(h * factor, 1e-14 * std::max(1.0, std::abs(tau)));
    }
}

RunOutcome run(const VectorField& f, std::span<const double> y0, double tau0, double tau1,
               const IntegratorConfig& cfg, double escape_radius, const Sink& sink) {
    validate(f, y0, tau0, tau1, cfg);
    switch (cfg.method) {
        case Method::Rk4:
            return run_rk4(f, y0, tau0, tau1, cfg, escape_radius, sink);
        case Method::Rk45:
            return run_rk45(f, y0, tau0, tau1, cfg, escape_radius, sink);
    }
    throw std::invalid_argument("unknown integration method");
}

}  // namespace

Vec Trajectory::at(double tau) const {
    Vec out(dim);
    at(tau, out);
    return out;
}

double Trajectory::at_scalar(double tau) const {
    if (dim != 1) throw std::invalid_argument("at_scalar requires dim == 1");
    double out;
    at(tau, {&out, 1});
    return out;
}

bool Trajectory::covers(double tau_a, double tau_b) const {
    if (empty()) return false;
    const double slack = 1e-9 * std::max({1.0, std::abs(tau_a), std::abs(tau_b)});
    return front_time() <= tau_a + slack && back_time() >= tau_b - slack;
}

void Trajectory::at(double tau, std::span<double> out) const {
    if (empty()) throw OutOfRange("empty trajectory");
    const double slack =
        1e-9 * std::max({1.0, std::abs(front_time()), std::abs(back_time())});
    if (tau < front_time() - slack || tau > back_time() + slack)
        throw OutOfRange("query time outside trajectory range");
    tau = std::clamp(tau, front_time(), back_time());

    const auto it = std::upper_bound(times.begin(), times.end(), tau);
    std::size_t i = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    if (i + 1 >= size()) i = size() - (size() > 1 ? 2 : 1);
    if (size() == 1 || times[i] == tau) {
        const auto yi = state(i);
        std::copy(yi.begin(), yi.end(), out.begin());
        return;
    }
    const double t0 = times[i], t1 = times[i + 1];
    const double h = t1 - t0;
    const double s = (tau - t0) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    const auto ya = state(i), yb = state(i + 1);
    const auto fa = deriv(i), fb = deriv(i + 1);
    for (std::size_t j = 0; j < dim; ++j)
        out[j] = h00 * ya[j] + h10 * h * fa[j] + h01 * yb[j] + h11 * h * fb[j];
}

Trajectory integrate(const VectorField& field, std::span<const double> y0, double tau0,
                     double tau1, const IntegratorConfig& cfg, double escape_radius) {
    Trajectory traj;
    traj.dim = field.dim;
    const auto sink = [&](double tau, std::span<const double> y,
                          std::span<const double> dy, bool) {
        traj.times.push_back(tau);
        traj.states.insert(traj.states.end(), y.begin(), y.end());
        traj.derivs.insert(traj.derivs.end(), dy.begin(), dy.end());
    };
    const RunOutcome out = run(field, y0, tau0, tau1, cfg, escape_radius, sink);
    traj.blew_up = out.blew_up;
    traj.escape_time = out.escape_time;
    return traj;
}

EndpointResult integrate_endpoint(const VectorField& field, std::span<const double> y0,
                                  double tau0, double tau1, const IntegratorConfig& cfg,
                                  double escape_radius) {
    EndpointResult result;
    const auto sink = [&](double tau, std::span<const double> y,
                          std::span<const double>, bool last) {
        if (last) {
            result.y.assign(y.begin(), y.end());
            result.tau = tau;
        }
    };
    const RunOutcome out = run(field, y0, tau0, tau1, cfg, escape_radius, sink);
    result.blew_up = out.blew_up;
    result.escape_time = out.escape_time;
    return result;
}

EndpointResult integrate_scan(
    const VectorField& field, std::span<const double> y0, double tau0, double tau1,
    const IntegratorConfig& cfg, double escape_radius,
    const std::function<void(double, std::span<const double>)>& observer) {
    EndpointResult result;
    const auto sink = [&](double tau, std::span<const double> y,
                          std::span<const double>, bool last) {
        observer(tau, y);
        if (last) {
            result.y.assign(y.begin(), y.end());
            result.tau = tau;
        }
    };
    const RunOutcome out = run(field, y0, tau0, tau1, cfg, escape_radius, sink);
    result.blew_up = out.blew_up;
    result.escape_time = out.escape_time;
    return result;
}

Trajectory variational_integrate(const Trajectory& base, const JacobianFn& jac_y,
                                 std::span<const double> z0, double tau0, double tau1,
                                 const IntegratorConfig& cfg, double escape_radius) {
    if (!base.covers(tau0, tau1))
        throw OutOfRange("base trajectory does not cover the requested interval");
    if (!jac_y) throw std::invalid_argument("missing jacobian evaluator");
    const std::size_t d = z0.size();
    VectorField field;
    field.dim = d;
    // Buffers are reused across sequential evaluations of this one run.
    auto y_buf = std::make_shared<Vec>(base.dim);
    auto jac_buf = std::make_shared<Vec>(d * d);
    field.eval = [&base, &jac_y, d, y_buf, jac_buf](std::span<const double> z, double tau,
                                                    std::span<double> dz) {
        base.at(tau, *y_buf);
        jac_y(*y_buf, tau, *jac_buf);
        for (std::size_t i = 0; i < d; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < d; ++j) s += (*jac_buf)[i * d + j] * z[j];
            dz[i] = s;
        }
    };
    return integrate(field, z0, tau0, tau1, cfg, escape_radius);
}

}  // namespace nonauto
