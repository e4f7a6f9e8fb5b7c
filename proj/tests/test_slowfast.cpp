#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nonauto/slowfast.hpp"

using namespace nonauto;

namespace {

QuasiPeriodicForcing constant_forcing(double value) {
    QuasiPeriodicForcing p;
    p.offset = value;
    return p;
}

SlowFastScenario canonical_scenario() {
    SlowFastScenario sc;
    sc.forcing = canonical_forcing();
    sc.gamma = zero_gamma();
    sc.layer = riccati_layer(sc.forcing, *sc.gamma);
    sc.theta0 = TorusPhase::zeros(2);
    sc.fiber.seeds = {{-0.2}, {2.8}, 0.5};
    return sc;
}

SlowFastScenario autonomous_scenario() {
    SlowFastScenario sc;
    sc.forcing = constant_forcing(1.0);
    sc.gamma = zero_gamma();
    sc.layer = riccati_layer(sc.forcing, *sc.gamma);
    sc.theta0 = TorusPhase::zeros(0);
    sc.fiber.seeds = {{-0.5}, {3.0}, 0.5};
    return sc;
}

}  // namespace

TEST_CASE("constant slow field integrates the identity drift") {
    SlowFastScenario sc = canonical_scenario();
    for (const double eps : {0.5, 0.2, 0.05}) {
        const CoupledSolution sol = solve_coupled(sc, eps, sc.integ);
        CHECK(!sol.blew_up);
        CHECK(sol.consistent);
        double worst = 0;
        for (std::size_t i = 0; i < sol.slow.size(); ++i)
            worst = std::max(worst, std::abs(sol.slow.states[i] - sol.slow.times[i]));
        CHECK(worst < 1e-9);  // constant derivative integrates exactly
        CHECK(sol.slow.back_time() == doctest::Approx(sc.t0).epsilon(1e-12));
        CHECK(sol.fast.back_time() == doctest::Approx(sc.t0 / eps).epsilon(1e-12));
    }
}

TEST_CASE("with no x-dependence the fast output is epsilon-free") {
    SlowFastScenario sc = canonical_scenario();  // gamma == 0: g has no x dependence
    const CoupledSolution a = solve_coupled(sc, 0.4, sc.integ);
    const CoupledSolution b = solve_coupled(sc, 0.2, sc.integ);
    // Same step grid; compare on the common fast window, bit for bit. The
    // final node of the shorter run absorbs end-of-interval rounding, so it
    // is compared through dense output instead.
    REQUIRE(a.fast.size() <= b.fast.size());
    for (std::size_t i = 0; i + 1 < a.fast.size(); ++i) {
        REQUIRE(a.fast.times[i] == b.fast.times[i]);
        CHECK(a.fast.states[i] == b.fast.states[i]);
    }
    CHECK(std::abs(a.fast.states.back() - b.fast.at_scalar(a.fast.back_time())) < 1e-9);
}

TEST_CASE("zero slow field freezes the slow variable") {
    SlowFastScenario sc = canonical_scenario();
    sc.slow.kind = SlowFieldKind::Constant;
    sc.slow.constant = {0.0};
    sc.x0 = {0.7};
    const CoupledSolution sol = solve_coupled(sc, 0.3, sc.integ);
    for (std::size_t i = 0; i < sol.slow.size(); ++i)
        CHECK(sol.slow.states[i] == 0.7);
}

TEST_CASE("averaged slow equation") {
    SUBCASE("constant one gives x = t") {
        SlowFastScenario sc = canonical_scenario();
        const Trajectory x = averaged_slow(sc, 5.0, sc.avg_window, sc.integ);
        CHECK(x.at({4.0})[0] == doctest::Approx(4.0).epsilon(1e-12));
    }
    SUBCASE("f = y rides the autonomous attractor at unit speed") {
        SlowFastScenario sc = autonomous_scenario();
        sc.slow.kind = SlowFieldKind::Linear;
        sc.slow.y_coeff = 1.0;
        sc.x0 = {0.25};
        const Trajectory x = averaged_slow(sc, 5.0, sc.avg_window, sc.integ);
        CHECK(x.at_scalar(5.0) == doctest::Approx(5.25).epsilon(1e-6));
    }
    SUBCASE("f = -x decays exponentially") {
        SlowFastScenario sc = autonomous_scenario();
        sc.slow.kind = SlowFieldKind::Linear;
        sc.slow.x_coeff = -1.0;
        sc.x0 = {1.0};
        const Trajectory x = averaged_slow(sc, 3.0, sc.avg_window, sc.integ);
        CHECK(x.at_scalar(3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-8));
    }
    SUBCASE("an escaping layer reports AveragingUnavailable") {
        SlowFastScenario sc = autonomous_scenario();
        sc.forcing = constant_forcing(-1.0);  // no bounded layer solutions
        sc.layer = riccati_layer(sc.forcing, *sc.gamma);
        sc.slow.kind = SlowFieldKind::Linear;
        sc.slow.y_coeff = 1.0;
        CHECK_THROWS_AS(averaged_slow(sc, 1.0, sc.avg_window, sc.integ),
                        AveragingUnavailable);
    }
    SUBCASE("a non-converged fiber reports AveragingUnavailable") {
        SlowFastScenario sc = canonical_scenario();
        sc.slow.kind = SlowFieldKind::Linear;
        sc.slow.y_coeff = 1.0;
        sc.fiber.t_pull = 2.0;  // certificate cannot settle this quickly
        CHECK_THROWS_AS(averaged_slow(sc, 1.0, sc.avg_window, sc.integ),
                        AveragingUnavailable);
    }
}

TEST_CASE("growth envelope holds along the slow solution") {
    SlowFastScenario sc = canonical_scenario();
    // sup_y |f| = 1, so (a, b) = (1, 0) witnesses the growth condition.
    const CoupledSolution sol = solve_coupled(sc, 0.2, sc.integ);
    for (std::size_t i = 0; i < sol.slow.size(); ++i) {
        const double bound = growth_envelope(std::abs(sc.x0[0]), 1.0, 0.0,
                                             sol.slow.times[i]);
        CHECK(std::abs(sol.slow.states[i]) <= bound + 1e-9);
    }
    CHECK(growth_envelope(1.0, 1.0, 0.5, 2.0) ==
          doctest::Approx(std::exp(1.0) + (std::exp(1.0) - 1.0) / 0.5));
}

TEST_CASE("slow-time form agrees with the rescaled fast-time solve") {
    // Independent coarse solve of eps * dy/dt = g(x, y, t/eps).
    SlowFastScenario sc = canonical_scenario();
    const double eps = 0.25;
    const CoupledSolution sol = solve_coupled(sc, eps, sc.integ);

    VectorField slow_form;
    slow_form.dim = 2;
    slow_form.eval = [&sc, eps](std::span<const double> s, double t,
                                std::span<double> d) {
        const std::span<const double> x = s.subspan(0, 1);
        const std::span<const double> y = s.subspan(1, 1);
        sc.slow.eval(x, y, d.subspan(0, 1));
        sc.layer.g(x, y, t / eps, sc.theta0, d.subspan(1, 1));
        d[1] /= eps;
    };
    IntegratorConfig coarse;
    coarse.step = 5e-4;  // fast-scale step 2e-3, not matched to the reference
    const auto end = integrate_endpoint(slow_form, Vec{sc.x0[0], sc.y0[0]}, 0.0, sc.t0,
                                        coarse, sc.escape_radius);
    CHECK(std::abs(end.y[0] - sol.slow.states.back()) < 1e-6);
    CHECK(std::abs(end.y[1] - sol.fast.states.back()) < 1e-6);
}

TEST_CASE("comparison bound for identical fields is slack only") {
    const LayerField layer = riccati_layer(constant_forcing(1.0), zero_gamma());
    const VectorField f = frozen_field(layer, {0.0}, TorusPhase::zeros(0));
    IntegratorConfig cfg;
    const ComparisonReport report =
        comparison_bound_check(f, 4.0, f, Vec{2.0}, 0.0, 5.0, 0.0, cfg);
    CHECK(report.precondition_ok);
    CHECK(report.max_field_gap == 0.0);
    CHECK(report.max_ratio < 1e-3);
}

TEST_CASE("comparison bound for neighboring riccati parameters") {
    const LayerField layer = riccati_layer(constant_forcing(1.0), zero_gamma());
    const GammaMap id = [] {
        GammaMap g;
        g.eval = [](std::span<const double> x) { return x[0]; };
        return g;
    }();
    const LayerField translated = riccati_layer(constant_forcing(1.0), id);
    const VectorField g1 = frozen_field(layer, {0.0}, TorusPhase::zeros(0));
    const VectorField g2 = frozen_field(translated, {0.01}, TorusPhase::zeros(0));
    IntegratorConfig cfg;

    // Brute-force sigma over the working box the solution lives in.
    const SeedBox box{{0.9}, {2.1}, 0.01};
    double sigma = 0;
    Vec d1(1), d2(1);
    for (const auto& y : box.grid()) {
        g1.eval(y, 0.0, d1);
        g2.eval(y, 0.0, d2);
        sigma = std::max(sigma, std::abs(d1[0] - d2[0]));
    }
    const double lip = estimate_lipschitz_y(g1, box, 0.0, 1.0, 2);
    const ComparisonReport report =
        comparison_bound_check(g1, lip, g2, Vec{2.0}, 0.0, 5.0, sigma, cfg);
    CHECK(report.precondition_ok);
    CHECK(report.max_ratio <= 1.0 + 1e-3);
}

TEST_CASE("comparison bound rejects an understated sigma") {
    const LayerField layer = riccati_layer(constant_forcing(1.0), zero_gamma());
    const LayerField shifted = riccati_layer(constant_forcing(1.3), zero_gamma());
    const VectorField g1 = frozen_field(layer, {0.0}, TorusPhase::zeros(0));
    const VectorField g2 = frozen_field(shifted, {0.0}, TorusPhase::zeros(0));
    IntegratorConfig cfg;
    CHECK_THROWS_AS(comparison_bound_check(g1, 4.0, g2, Vec{2.0}, 0.0, 3.0, 1e-6, cfg),
                    PreconditionViolated);
}

TEST_CASE("frozen versus slowly drifting parameter stays within the bound") {
    const GammaMap id = [] {
        GammaMap g;
        g.eval = [](std::span<const double> x) { return x[0]; };
        return g;
    }();
    const LayerField layer = riccati_layer(canonical_forcing(), id);
    const double eps = 0.01;
    const TorusPhase th = TorusPhase::zeros(2);

    // g1 freezes x at 0; g2 lets it drift as x = eps * tau.
    const VectorField g1 = frozen_field(layer, {0.0}, th);
    VectorField g2;
    g2.dim = 1;
    g2.eval = [&layer, &th, eps](std::span<const double> y, double tau,
                                 std::span<double> dy) {
        const Vec x{eps * tau};
        layer.g(x, y, tau, th, dy);
    };

    IntegratorConfig cfg;
    const double horizon = 4.0;
    const Trajectory y2 = integrate(g2, Vec{2.0}, 0.0, horizon, cfg);
    double sigma = 0;
    Vec d1(1), d2(1);
    for (std::size_t i = 0; i < y2.size(); ++i) {
        g1.eval(y2.state(i), y2.times[i], d1);
        g2.eval(y2.state(i), y2.times[i], d2);
        sigma = std::max(sigma, std::abs(d1[0] - d2[0]));
    }
    const SeedBox box{{-0.5}, {2.5}, 0.05};
    const double lip = estimate_lipschitz_y(g1, box, 0.0, horizon, 16);
    const ComparisonReport report =
        comparison_bound_check(g1, lip, g2, Vec{2.0}, 0.0, horizon, sigma * 1.0001, cfg);
    CHECK(report.precondition_ok);
    CHECK(report.max_ratio <= 1.0 + 1e-3);
}
