#include "nonauto/hull.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nonauto {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    double r = std::fmod(a, two_pi);
    if (r < 0) r += two_pi;
    return r;
}

double angular_distance(double a, double b) {
    const double d = std::abs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, two_pi - d);
}
}  // namespace

std::vector<double> QuasiPeriodicForcing::frequencies() const {
    std::vector<double> w;
    w.reserve(terms.size());
    for (const auto& t : terms) w.push_back(t.frequency);
    return w;
}

double QuasiPeriodicForcing::max_value() const {
    double s = offset;
    for (const auto& t : terms) s += std::abs(t.amplitude);
    return s;
}

double QuasiPeriodicForcing::min_value() const {
    double s = offset;
    for (const auto& t : terms) s -= std::abs(t.amplitude);
    return s;
}

QuasiPeriodicForcing canonical_forcing() {
    QuasiPeriodicForcing p;
    p.terms = {{-1.0, 0.5, 0.0, TermKind::Sin}, {-1.0, std::sqrt(5.0), 0.0, TermKind::Sin}};
    p.offset = 0.962;
    return p;
}

TorusPhase shift(const TorusPhase& theta, double s, std::span<const double> omega) {
    if (omega.size() != theta.dim())
        throw std::invalid_argument("frequency vector dimension mismatch");
    TorusPhase out;
    out.theta.resize(theta.dim());
    for (std::size_t i = 0; i < theta.dim(); ++i)
        out.theta[i] = wrap_angle(theta.theta[i] + omega[i] * s);
    return out;
}

double forcing_at(const QuasiPeriodicForcing& fp, const TorusPhase& theta, double tau) {
    if (theta.dim() != fp.torus_dim())
        throw std::invalid_argument("phase dimension does not match forcing");
    double v = fp.offset;
    for (std::size_t i = 0; i < fp.terms.size(); ++i) {
        const auto& t = fp.terms[i];
        const double arg = theta.theta[i] + t.phase + t.frequency * tau;
        v += t.amplitude * (t.kind == TermKind::Sin ? std::sin(arg) : std::cos(arg));
    }
    return v;
}

double hull_distance(const QuasiPeriodicForcing& fp, const TorusPhase& a,
                     const TorusPhase& b, const HullMetricConfig& cfg) {
    if (a.dim() != b.dim()) throw std::invalid_argument("phase dimension mismatch");
    if (cfg.mode == MetricMode::TorusAngle) {
        double d = 0;
        for (std::size_t i = 0; i < a.dim(); ++i)
            d = std::max(d, angular_distance(a.theta[i], b.theta[i]));
        return d / std::numbers::pi;
    }
    if (cfg.window_radii.size() != cfg.window_weights.size() || cfg.window_radii.empty())
        throw std::invalid_argument("compact-open mode needs matching radii and weights");
    if (!(cfg.sample_step > 0)) throw std::invalid_argument("sample_step must be positive");
    double d = 0;
    for (std::size_t j = 0; j < cfg.window_radii.size(); ++j) {
        const double radius = cfg.window_radii[j];
        const double weight = cfg.window_weights[j];
        if (!(radius > 0) || !(weight > 0))
            throw std::invalid_argument("window radii and weights must be positive");
        double sup = 0;
        for (double tau = -radius; tau <= radius + 0.5 * cfg.sample_step;
             tau += cfg.sample_step)
            sup = std::max(sup, std::abs(forcing_at(fp, a, tau) - forcing_at(fp, b, tau)));
        d += weight * std::min(1.0, sup);
    }
    return d;
}

const char* metric_mode_name(MetricMode mode) {
    return mode == MetricMode::TorusAngle ? "torus-angle" : "compact-open";
}

}  // namespace nonauto
