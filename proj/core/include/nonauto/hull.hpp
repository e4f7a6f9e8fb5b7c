#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nonauto/ode.hpp"

namespace nonauto {

enum class TermKind { Sin, Cos };

struct ForcingTerm {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
    TermKind kind = TermKind::Sin;
};

/// Point on the k-torus parametrizing the hull of a quasi-periodic forcing.
/// Coordinates are kept in [0, 2*pi).
struct TorusPhase {
    Vec theta;
    static TorusPhase zeros(std::size_t k) { return TorusPhase{Vec(k, 0.0)}; }
    std::size_t dim() const { return theta.size(); }
};

/// Quasi-periodic forcing as a finite sum of sin/cos terms plus an offset.
/// One torus coordinate per term; rational independence of the frequencies is
/// asserted by the caller, not verified.
struct QuasiPeriodicForcing {
    std::vector<ForcingTerm> terms;
    double offset = 0.0;

    std::size_t torus_dim() const { return terms.size(); }
    std::vector<double> frequencies() const;
    double max_value() const;
    double min_value() const;
};

/// p(tau) = -sin(tau/2) - sin(sqrt(5) tau) + 0.962.
QuasiPeriodicForcing canonical_forcing();

/// Translation flow on the torus: theta + omega * s, reduced mod 2*pi.
TorusPhase shift(const TorusPhase& theta, double s, std::span<const double> omega);

/// Value of the hull element theta at time tau. Satisfies
/// forcing_at(fp, shift(theta, s), tau) == forcing_at(fp, theta, tau + s)
/// up to floating rounding.
double forcing_at(const QuasiPeriodicForcing& fp, const TorusPhase& theta, double tau);

enum class MetricMode { TorusAngle, CompactOpen };

struct HullMetricConfig {
    MetricMode mode = MetricMode::TorusAngle;
    // Compact-open mode: weighted sup differences over expanding windows.
    std::vector<double> window_radii = {1.0, 10.0, 100.0};
    std::vector<double> window_weights = {0.5, 0.25, 0.125};
    double sample_step = 0.05;
};

/// Distance between hull elements. Torus-angle mode is the max angular
/// distance over coordinates scaled to [0, 1] and is exactly invariant under
/// simultaneous shifts. Compact-open mode samples the induced forcing
/// functions over finite windows; shift invariance is approximate there.
double hull_distance(const QuasiPeriodicForcing& fp, const TorusPhase& a,
                     const TorusPhase& b, const HullMetricConfig& cfg);

const char* metric_mode_name(MetricMode mode);

}  // namespace nonauto
