#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nonauto/tracking.hpp"

using namespace nonauto;

namespace {

QuasiPeriodicForcing constant_forcing(double value) {
    QuasiPeriodicForcing p;
    p.offset = value;
    return p;
}

GammaMap fig2_gamma() {
    return quasiperiodic_gamma({{0.2, std::sqrt(2.0), 0.0, TermKind::Sin},
                                {0.2, 0.2, 0.0, TermKind::Cos}},
                               0.0);
}

SlowFastScenario scenario_with(QuasiPeriodicForcing p, GammaMap gamma) {
    SlowFastScenario sc;
    sc.forcing = std::move(p);
    sc.gamma = std::move(gamma);
    sc.layer = riccati_layer(sc.forcing, *sc.gamma);
    sc.theta0 = TorusPhase::zeros(sc.forcing.torus_dim());
    sc.fiber.seeds = {{-0.2}, {2.8}, 0.5};
    return sc;
}

}  // namespace

TEST_CASE("eta curve of the autonomous base is the equilibrium") {
    SlowFastScenario sc = scenario_with(constant_forcing(1.0), zero_gamma());
    sc.fiber.seeds = {{-0.5}, {3.0}, 0.5};
    const Trajectory eta = eta_curve(sc, 0.2, 0.0, 20.0, sc.integ, 1e-3);
    CHECK(eta.at_scalar(7.3) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("eta curve follows the translated equilibrium") {
    SlowFastScenario sc = scenario_with(constant_forcing(1.0), fig2_gamma());
    sc.fiber.seeds = {{-0.7}, {3.0}, 0.5};
    const double eps = 0.2;
    const Trajectory eta = eta_curve(sc, eps, 0.0, 50.0, sc.integ, 1e-3);
    const GammaMap gamma = fig2_gamma();
    for (double tau : {1.0, 13.7, 29.2, 46.0}) {
        const Vec x{eps * tau};
        CHECK(eta.at_scalar(tau) == doctest::Approx(1.0 + gamma(x)).epsilon(1e-5));
    }
}

TEST_CASE("a thick fiber is rejected as a base copy") {
    // Pitchfork layer: endpoints accumulate on {-1, 0, 1}.
    SlowFastScenario sc;
    sc.forcing = constant_forcing(0.0);
    sc.gamma = zero_gamma();
    sc.theta0 = TorusPhase::zeros(0);
    sc.layer.slow_dim = 1;
    sc.layer.fast_dim = 1;
    sc.layer.g = [](std::span<const double>, std::span<const double> y, double,
                    const TorusPhase&, std::span<double> out) {
        out[0] = y[0] - y[0] * y[0] * y[0];
    };
    sc.fiber.seeds = {{-2.0}, {2.0}, 0.5};
    sc.fiber.t_pull = 20.0;
    CHECK_THROWS_AS(eta_curve(sc, 0.2, 0.0, 10.0, sc.integ, 1e-3), NotACopyOfBase);
}

TEST_CASE("a solution started on the attractor never leaves it") {
    SlowFastScenario sc = scenario_with(constant_forcing(1.0), zero_gamma());
    sc.fiber.seeds = {{-0.5}, {3.0}, 0.5};
    sc.y0 = {1.0};
    TrackingParams params;
    const TrackingReport report = tracking_error(sc, 0.2, params, sc.integ);
    CHECK(!report.blew_up);
    CHECK(report.sup_error < 1e-6);
    CHECK(report.x0_source == "closed-form");
}

TEST_CASE("starting below the repeller is flagged, not silently truncated") {
    SlowFastScenario sc = scenario_with(constant_forcing(1.0), zero_gamma());
    sc.fiber.seeds = {{-0.5}, {3.0}, 0.5};
    sc.y0 = {-1.5};
    TrackingParams params;
    const TrackingReport report = tracking_error(sc, 0.2, params, sc.integ);
    CHECK(report.blew_up);
    CHECK(report.escape_time > 0.0);
}

TEST_CASE("target modes are ordered by set inclusion") {
    SlowFastScenario sc = scenario_with(canonical_forcing(), fig2_gamma());
    sc.fiber.t_pull = 25.0;  // fibers converged well past the comparison slack
    const double eps = 0.2;
    const CoupledSolution sol = solve_coupled(sc, eps, sc.integ);
    const Trajectory eta = eta_curve(sc, eps, 0.0, sc.t0 / eps, sc.integ, 1e-3);
    NeighborhoodSpec spec;
    for (const double tau : {5.0, 31.0, 62.0, 90.0}) {
        const Vec y = sol.fast.at(tau);
        const TorusPhase th = shift(sc.theta0, tau, sc.layer.omega);
        const Vec x{eps * tau};
        const Fiber pb = pullback_fiber(sc.layer, th, x, sc.fiber, sc.integ);
        const Fiber inf =
            inflated_fiber(sc.layer, th, x, 0.05, spec, sc.fiber, sc.integ);
        const double d_eta = std::abs(y[0] - eta.at_scalar(tau));
        const double d_pb = dist_to_cloud(y, pb.points);
        const double d_inf = dist_to_cloud(y, inf.points);
        CHECK(d_inf <= d_pb + 1e-12);
        CHECK(d_pb <= d_eta + pb.diameter() + 1e-9);
    }
}

TEST_CASE("tracking distances settle under every stated band") {
    // For the smallest grid epsilon a start index exists past which every
    // sample is within delta, and tighter bands need longer waits.
    SlowFastScenario sc = scenario_with(canonical_forcing(), fig2_gamma());
    const TrackingReport report = tracking_error(sc, 0.05, TrackingParams{}, sc.integ);
    REQUIRE(!report.taus.empty());
    const auto measured_T = [&](double delta) {
        double T = std::numeric_limits<double>::infinity();
        for (std::size_t i = report.taus.size(); i-- > 0;) {
            if (report.dists[i] <= delta)
                T = report.taus[i];
            else
                break;
        }
        return T;
    };
    const double t02 = measured_T(0.2), t01 = measured_T(0.1), t005 = measured_T(0.05);
    CHECK(std::isfinite(t02));
    CHECK(std::isfinite(t01));
    CHECK(std::isfinite(t005));
    CHECK(t02 <= t01 + 1e-9);
    CHECK(t01 <= t005 + 1e-9);
}

TEST_CASE("delta_k matches the eta distance when fibers are singletons") {
    // Autonomous base with zero gamma: every fiber is exactly {1}, so delta_k
    // reduces to the final-time distance |y(t0/eps) - 1|.
    SlowFastScenario sc = scenario_with(constant_forcing(1.0), zero_gamma());
    sc.fiber.seeds = {{-0.5}, {3.0}, 0.5};
    sc.fiber.t_pull = 10.0;
    sc.t0 = 1.0;
    sc.y0 = {2.0};
    // Closed form: y(tau) = coth(tau + arcoth(2)); tau_end = 2.
    const double arcoth2 = 0.5 * std::log(3.0);
    const double expected = 1.0 / std::tanh(2.0 + arcoth2) - 1.0;
    DeltaKParams params;
    const DeltaKReport report = delta_k(sc, {0.5}, params, sc.integ);
    REQUIRE(report.delta_ks.size() == 1);
    CHECK(report.delta_ks[0] == doctest::Approx(expected).epsilon(0.2));
    CHECK(std::abs(report.delta_ks[0] - expected) < 2.0 * params.search_tol);
}

TEST_CASE("delta_k requires a descending epsilon sequence") {
    SlowFastScenario sc = scenario_with(constant_forcing(1.0), zero_gamma());
    sc.fiber.seeds = {{-0.5}, {3.0}, 0.5};
    CHECK_THROWS_AS(delta_k(sc, {0.1, 0.2}, DeltaKParams{}, sc.integ),
                    std::invalid_argument);
}

TEST_CASE("delta_k propagates an empty fiber") {
    SlowFastScenario sc = scenario_with(constant_forcing(1.0), zero_gamma());
    sc.fiber.seeds = {{-3.0}, {-2.0}, 0.5};  // entirely below the repeller
    sc.fiber.t_pull = 10.0;
    sc.t0 = 1.0;
    CHECK_THROWS_AS(delta_k(sc, {0.5}, DeltaKParams{}, sc.integ), EmptyFiber);
}

TEST_CASE("solutions lock onto the drifting attractor after the transient") {
    // |y - eta| and |a_eps - eta| become indistinguishable once the solution
    // has converged forward onto a_eps.
    SlowFastScenario sc = scenario_with(canonical_forcing(), fig2_gamma());
    const double eps = 0.2;
    TrackingParams proxy;
    proxy.metric = TrackingMetric::AttractorProxy;
    const TrackingReport attractor_rep = tracking_error(sc, eps, proxy, sc.integ);
    const TrackingReport solution_rep = tracking_error(sc, eps, TrackingParams{}, sc.integ);
    REQUIRE(attractor_rep.taus == solution_rep.taus);  // shared report grid
    double late_gap = 0;
    for (std::size_t i = 0; i < solution_rep.taus.size(); ++i) {
        if (solution_rep.taus[i] < 30.0) continue;
        late_gap = std::max(late_gap,
                            std::abs(solution_rep.dists[i] - attractor_rep.dists[i]));
    }
    CHECK(late_gap < 1e-6);
}

TEST_CASE("equi-attraction of the translated family") {
    GammaMap id;
    id.eval = [](std::span<const double> x) { return x[0]; };
    SlowFastScenario sc = scenario_with(canonical_forcing(), std::move(id));
    std::vector<Vec> x_grid;
    for (int i = 0; i <= 10; ++i) x_grid.push_back({0.05 * i});
    const SeedBox seeds{{1.0}, {3.0}, 0.5};
    const auto table =
        equi_attraction_probe(sc, x_grid, seeds, {1e-3, 1e-4}, 40.0, sc.integ);
    REQUIRE(table.size() == x_grid.size() * 2);

    double t_lo = 1e18, t_hi = 0;
    for (const auto& e : table) {
        REQUIRE(std::isfinite(e.T));
        if (e.tol == 1e-4) {
            t_lo = std::min(t_lo, e.T);
            t_hi = std::max(t_hi, e.T);
        }
    }
    CHECK((t_hi - t_lo) / (0.5 * (t_hi + t_lo)) < 0.10);

    // Halving the tolerance cannot shorten the wait.
    for (std::size_t i = 0; i < table.size(); i += 2) {
        REQUIRE(table[i].tol == doctest::Approx(1e-3));
        REQUIRE(table[i + 1].tol == doctest::Approx(1e-4));
        CHECK(table[i + 1].T >= table[i].T - 1e-12);
    }
}

TEST_CASE("autonomous attraction times follow the logarithmic profile") {
    SlowFastScenario sc = scenario_with(constant_forcing(1.0), zero_gamma());
    const SeedBox seeds{{1.5}, {3.0}, 0.5};
    const auto table = equi_attraction_probe(sc, {Vec{0.0}}, seeds,
                                             {1e-2, 1e-3, 1e-4}, 30.0, sc.integ);
    REQUIRE(table.size() == 3);
    // Linearized rate -2: each tolerance decade adds about ln(10)/2.
    const double d1 = table[1].T - table[0].T;
    const double d2 = table[2].T - table[1].T;
    CHECK(d1 == doctest::Approx(std::log(10.0) / 2.0).epsilon(0.15));
    CHECK(d2 == doctest::Approx(std::log(10.0) / 2.0).epsilon(0.15));
}
