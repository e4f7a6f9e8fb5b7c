#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nonauto/hull.hpp"

using namespace nonauto;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

double angular(double a, double b) {
    double d = std::fmod(std::abs(a - b), two_pi);
    return std::min(d, two_pi - d);
}

TorusPhase random_phase(std::mt19937_64& rng, std::size_t k) {
    std::uniform_real_distribution<double> u(0.0, two_pi);
    TorusPhase th = TorusPhase::zeros(k);
    for (auto& c : th.theta) c = u(rng);
    return th;
}
}  // namespace

TEST_CASE("canonical forcing evaluates to its offset at the origin") {
    const auto p = canonical_forcing();
    CHECK(p.torus_dim() == 2);
    CHECK(forcing_at(p, TorusPhase::zeros(2), 0.0) == doctest::Approx(0.962).epsilon(1e-15));
    // Direct arithmetic at tau = pi.
    const double expected =
        -std::sin(std::numbers::pi / 2) - std::sin(std::sqrt(5.0) * std::numbers::pi) + 0.962;
    CHECK(forcing_at(p, TorusPhase::zeros(2), std::numbers::pi) ==
          doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("shift is the translation flow") {
    const auto p = canonical_forcing();
    const auto omega = p.frequencies();
    const TorusPhase zero = TorusPhase::zeros(2);
    SUBCASE("identity at s = 0") {
        const TorusPhase s = shift(zero, 0.0, omega);
        CHECK(s.theta[0] == 0.0);
        CHECK(s.theta[1] == 0.0);
    }
    SUBCASE("4 pi wraps the first coordinate back to zero") {
        const TorusPhase s = shift(zero, 4.0 * std::numbers::pi, omega);
        CHECK(angular(s.theta[0], 0.0) < 1e-12);
        const double expected = std::fmod(4.0 * std::numbers::pi * std::sqrt(5.0), two_pi);
        CHECK(angular(s.theta[1], expected) < 1e-12);
    }
    SUBCASE("group law") {
        std::mt19937_64 rng(7);
        const TorusPhase th = random_phase(rng, 2);
        const TorusPhase a = shift(shift(th, 1.0, omega), 2.0, omega);
        const TorusPhase b = shift(th, 3.0, omega);
        CHECK(angular(a.theta[0], b.theta[0]) < 1e-12);
        CHECK(angular(a.theta[1], b.theta[1]) < 1e-12);
    }
}

TEST_CASE("translation identity of the forcing") {
    const auto p = canonical_forcing();
    const auto omega = p.frequencies();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> us(-50.0, 50.0);
    for (int i = 0; i < 100; ++i) {
        const TorusPhase th = random_phase(rng, 2);
        const double s = us(rng), tau = us(rng);
        const double lhs = forcing_at(p, shift(th, s, omega), tau);
        const double rhs = forcing_at(p, th, tau + s);
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("torus-angle metric") {
    const auto p = canonical_forcing();
    HullMetricConfig cfg;
    std::mt19937_64 rng(13);
    SUBCASE("identity and symmetry") {
        for (int i = 0; i < 20; ++i) {
            const TorusPhase a = random_phase(rng, 2), b = random_phase(rng, 2);
            CHECK(hull_distance(p, a, a, cfg) == 0.0);
            CHECK(hull_distance(p, a, b, cfg) ==
                  doctest::Approx(hull_distance(p, b, a, cfg)).epsilon(1e-15));
        }
    }
    SUBCASE("antipodal points on a one-term hull are at distance one") {
        QuasiPeriodicForcing one;
        one.terms = {{1.0, 1.0, 0.0, TermKind::Sin}};
        TorusPhase a = TorusPhase::zeros(1);
        TorusPhase b = TorusPhase::zeros(1);
        b.theta[0] = std::numbers::pi;
        CHECK(hull_distance(one, a, b, cfg) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("triangle inequality") {
        for (int i = 0; i < 50; ++i) {
            const TorusPhase a = random_phase(rng, 2), b = random_phase(rng, 2),
                             c = random_phase(rng, 2);
            CHECK(hull_distance(p, a, c, cfg) <=
                  hull_distance(p, a, b, cfg) + hull_distance(p, b, c, cfg) + 1e-14);
        }
    }
    SUBCASE("the flow is an isometry") {
        const auto omega = p.frequencies();
        std::uniform_real_distribution<double> us(-200.0, 200.0);
        for (int i = 0; i < 50; ++i) {
            const TorusPhase a = random_phase(rng, 2), b = random_phase(rng, 2);
            const double s = us(rng);
            const double before = hull_distance(p, a, b, cfg);
            const double after =
                hull_distance(p, shift(a, s, omega), shift(b, s, omega), cfg);
            CHECK(std::abs(before - after) < 1e-12);
        }
    }
}

TEST_CASE("the canonical orbit returns near its start") {
    // Minimality proxy: the shifted origin re-enters a small ball.
    const auto p = canonical_forcing();
    const auto omega = p.frequencies();
    const TorusPhase origin = TorusPhase::zeros(2);
    HullMetricConfig cfg;
    double best = 1e9;
    for (double s = 1.0; s <= 1e4; s += 0.1)
        best = std::min(best, hull_distance(p, shift(origin, s, omega), origin, cfg));
    CHECK(best < 0.05);
}

TEST_CASE("compact-open metric sanity") {
    const auto p = canonical_forcing();
    HullMetricConfig cfg;
    cfg.mode = MetricMode::CompactOpen;
    std::mt19937_64 rng(17);
    SUBCASE("identity, symmetry, positivity") {
        const TorusPhase a = random_phase(rng, 2), b = random_phase(rng, 2);
        CHECK(hull_distance(p, a, a, cfg) == 0.0);
        CHECK(hull_distance(p, a, b, cfg) ==
              doctest::Approx(hull_distance(p, b, a, cfg)).epsilon(1e-15));
        CHECK(hull_distance(p, a, b, cfg) > 0.0);
    }
    SUBCASE("triangle inequality") {
        for (int i = 0; i < 20; ++i) {
            const TorusPhase a = random_phase(rng, 2), b = random_phase(rng, 2),
                             c = random_phase(rng, 2);
            CHECK(hull_distance(p, a, c, cfg) <=
                  hull_distance(p, a, b, cfg) + hull_distance(p, b, c, cfg) + 1e-12);
        }
    }
    SUBCASE("small torus distance implies small compact-open distance") {
        HullMetricConfig torus;
        for (int i = 0; i < 20; ++i) {
            TorusPhase a = random_phase(rng, 2);
            TorusPhase b = a;
            b.theta[0] += 1e-4;
            CHECK(hull_distance(p, a, b, cfg) < 1e-3);
        }
    }
}

TEST_CASE("autonomous forcing has a trivial hull") {
    QuasiPeriodicForcing constant;
    constant.offset = 1.0;
    CHECK(constant.torus_dim() == 0);
    const TorusPhase th = TorusPhase::zeros(0);
    CHECK(forcing_at(constant, th, 123.0) == 1.0);
    HullMetricConfig cfg;
    CHECK(hull_distance(constant, th, th, cfg) == 0.0);
    CHECK(shift(th, 5.0, constant.frequencies()).dim() == 0);
}
