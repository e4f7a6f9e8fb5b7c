#include "nonauto/layer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nonauto/parallel.hpp"

namespace nonauto {

namespace {

double norm2(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double point_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

std::vector<Vec> dedup_cloud(std::vector<Vec> points, double radius) {
    std::sort(points.begin(), points.end());
    std::vector<Vec> kept;
    for (auto& p : points) {
        bool close = false;
        for (const auto& q : kept) {
            if (point_dist(p, q) <= radius) {
                close = true;
                break;
            }
        }
        if (!close) kept.push_back(std::move(p));
    }
    return kept;
}

}  // namespace

GammaMap zero_gamma() {
    GammaMap g;
    g.eval = [](std::span<const double>) { return 0.0; };
    g.is_zero = true;
    g.limit_past = 0.0;
    g.limit_future = 0.0;
    return g;
}

GammaMap quasiperiodic_gamma(std::vector<ForcingTerm> terms, double offset) {
    GammaMap g;
    g.is_zero = terms.empty() && offset == 0.0;
    if (terms.empty()) {
        g.limit_past = offset;
        g.limit_future = offset;
    }
    g.eval = [terms = std::move(terms), offset](std::span<const double> x) {
        const double t = x.empty() ? 0.0 : x[0];
        double v = offset;
        for (const auto& term : terms) {
            const double arg = term.frequency * t + term.phase;
            v += term.amplitude *
                 (term.kind == TermKind::Sin ? std::sin(arg) : std::cos(arg));
        }
        return v;
    };
    return g;
}

GammaMap arctan_gamma(double amplitude, double x_scale) {
    GammaMap g;
    g.eval = [amplitude, x_scale](std::span<const double> x) {
        const double t = x.empty() ? 0.0 : x[0];
        return amplitude * (2.0 / std::numbers::pi) * std::atan(t * x_scale);
    };
    g.limit_past = -amplitude;
    g.limit_future = amplitude;
    return g;
}

GammaMap table_gamma(std::vector<std::pair<double, double>> points) {
    if (points.size() < 2) throw std::invalid_argument("gamma table needs >= 2 points");
    std::sort(points.begin(), points.end());
    GammaMap g;
    g.limit_past = points.front().second;
    g.limit_future = points.back().second;
    g.eval = [points = std::move(points)](std::span<const double> x) {
        const double t = x.empty() ? 0.0 : x[0];
        if (t <= points.front().first) return points.front().second;
        if (t >= points.back().first) return points.back().second;
        const auto it = std::upper_bound(
            points.begin(), points.end(), t,
            [](double v, const auto& p) { return v < p.first; });
        const auto& [x1, v1] = *it;
        const auto& [x0, v0] = *(it - 1);
        const double s = (t - x0) / (x1 - x0);
        return v0 + s * (v1 - v0);
    };
    return g;
}

LayerField riccati_layer(QuasiPeriodicForcing p, GammaMap gamma, std::size_t slow_dim) {
    LayerField field;
    field.slow_dim = slow_dim;
    field.fast_dim = 1;
    field.omega = p.frequencies();
    auto forcing = std::make_shared<QuasiPeriodicForcing>(std::move(p));
    auto gm = std::make_shared<GammaMap>(std::move(gamma));
    field.g = [forcing, gm](std::span<const double> x, std::span<const double> y,
                            double tau, const TorusPhase& theta, std::span<double> out) {
        const double u = y[0] - (*gm)(x);
        out[0] = -u * u + forcing_at(*forcing, theta, tau);
    };
    field.jac_y = [gm](std::span<const double> x, std::span<const double> y, double tau,
                       const TorusPhase& theta, std::span<double> jac) {
        (void)tau;
        (void)theta;
        jac[0] = -2.0 * (y[0] - (*gm)(x));
    };
    return field;
}

VectorField frozen_field(const LayerField& field, Vec x, TorusPhase theta) {
    if (!field.g) throw std::invalid_argument("layer field has no evaluator");
    VectorField f;
    f.dim = field.fast_dim;
    f.eval = [g = field.g, x = std::move(x), theta = std::move(theta)](
                 std::span<const double> y, double tau, std::span<double> dy) {
        g(x, y, tau, theta, dy);
    };
    return f;
}

JacobianFn frozen_jacobian(const LayerField& field, Vec x, TorusPhase theta) {
    const std::size_t m = field.fast_dim;
    if (field.jac_y) {
        return [jac_y = field.jac_y, x = std::move(x), theta = std::move(theta)](
                   std::span<const double> y, double tau, std::span<double> jac) {
            jac_y(x, y, tau, theta, jac);
        };
    }
    // Central differences.
    return [g = field.g, x = std::move(x), theta = std::move(theta), m](
               std::span<const double> y, double tau, std::span<double> jac) {
        const double h = 1e-6;
        Vec yp(y.begin(), y.end()), ym(y.begin(), y.end());
        Vec gp(m), gm_(m);
        for (std::size_t j = 0; j < m; ++j) {
            yp[j] += h;
            ym[j] -= h;
            g(x, yp, tau, theta, gp);
            g(x, ym, tau, theta, gm_);
            for (std::size_t i = 0; i < m; ++i) jac[i * m + j] = (gp[i] - gm_[i]) / (2 * h);
            yp[j] = y[j];
            ym[j] = y[j];
        }
    };
}

std::vector<Vec> SeedBox::grid() const {
    if (lo.size() != hi.size() || lo.empty())
        throw std::invalid_argument("seed box dimensions mismatch");
    if (!(spacing > 0)) throw std::invalid_argument("seed spacing must be positive");
    std::vector<std::size_t> counts(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (hi[i] < lo[i]) throw std::invalid_argument("seed box is empty");
        counts[i] = static_cast<std::size_t>(std::floor((hi[i] - lo[i]) / spacing + 1e-12)) + 1;
    }
    std::vector<Vec> out;
    std::vector<std::size_t> idx(lo.size(), 0);
    for (;;) {
        Vec p(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i)
            p[i] = std::min(lo[i] + static_cast<double>(idx[i]) * spacing, hi[i]);
        out.push_back(std::move(p));
        std::size_t i = 0;
        for (; i < lo.size(); ++i) {
            if (++idx[i] < counts[i]) break;
            idx[i] = 0;
        }
        if (i == lo.size()) break;
    }
    return out;
}

double SeedBox::diameter() const {
    double s = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
    return std::sqrt(s);
}

double SeedBox::radius() const {
    double s = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const double m = std::max(std::abs(lo[i]), std::abs(hi[i]));
        s += m * m;
    }
    return std::sqrt(s);
}

double Fiber::diameter() const {
    double d = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            d = std::max(d, point_dist(points[i], points[j]));
    return d;
}

double hausdorff_semidistance(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    if (a.empty()) return 0.0;
    if (b.empty()) return std::numeric_limits<double>::infinity();
    double sup = 0;
    for (const auto& p : a) sup = std::max(sup, dist_to_cloud(p, b));
    return sup;
}

double hausdorff_distance(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    return std::max(hausdorff_semidistance(a, b), hausdorff_semidistance(b, a));
}

double dist_to_cloud(std::span<const double> point, const std::vector<Vec>& cloud) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : cloud) best = std::min(best, point_dist(point, q));
    return best;
}

namespace {

// Endpoint cloud of the seed ensemble pulled back by t_pull.
std::vector<Vec> pullback_cloud(const LayerField& field, const TorusPhase& theta,
                                std::span<const double> x, const FiberParams& params,
                                double t_pull, const IntegratorConfig& cfg,
                                double escape_radius, std::size_t* escaped) {
    const TorusPhase start = shift(theta, -t_pull, field.omega);
    const VectorField f = frozen_field(field, Vec(x.begin(), x.end()), start);
    const auto seeds = params.seeds.grid();
    std::vector<std::optional<Vec>> endpoints(seeds.size());
    parallel_for(seeds.size(), params.workers, [&](std::size_t i) {
        const auto r = integrate_endpoint(f, seeds[i], 0.0, t_pull, cfg, escape_radius);
        if (!r.blew_up) endpoints[i] = std::move(r.y);
    });
    std::vector<Vec> cloud;
    for (auto& e : endpoints) {
        if (e)
            cloud.push_back(std::move(*e));
        else
            ++*escaped;
    }
    return cloud;
}

}  // namespace

Fiber pullback_fiber(const LayerField& field, const TorusPhase& theta,
                     std::span<const double> x, const FiberParams& params,
                     const IntegratorConfig& cfg, double escape_radius) {
    if (!(params.t_pull > 0)) throw std::invalid_argument("t_pull must be positive");
    if (!(params.tol > 0)) throw std::invalid_argument("fiber tol must be positive");

    Fiber fiber;
    fiber.pullback_time = params.t_pull;
    fiber.resolution = params.seeds.spacing;

    std::size_t escaped = 0;
    auto cloud = pullback_cloud(field, theta, x, params, params.t_pull, cfg,
                                escape_radius, &escaped);
    if (cloud.empty()) throw EmptyFiber("every seed escaped during pullback");
    fiber.points = dedup_cloud(std::move(cloud), params.tol / 2.0);

    std::size_t escaped_half = 0;
    auto half = pullback_cloud(field, theta, x, params, params.t_pull / 2.0, cfg,
                               escape_radius, &escaped_half);
    if (!half.empty()) {
        half = dedup_cloud(std::move(half), params.tol / 2.0);
        fiber.hausdorff_gap = hausdorff_distance(fiber.points, half);
        fiber.converged = fiber.hausdorff_gap < params.tol;
    }
    fiber.escaped_seeds = escaped;
    return fiber;
}

std::vector<std::pair<TorusPhase, Vec>> neighborhood_samples(
    const TorusPhase& theta, std::span<const double> x, double delta,
    const NeighborhoodSpec& spec) {
    std::vector<std::pair<TorusPhase, Vec>> samples;
    samples.emplace_back(theta, Vec(x.begin(), x.end()));
    if (!(delta > 0)) return samples;

    const std::size_t k = theta.dim();
    const std::size_t n = x.size();
    const std::size_t dims = k + n;
    if (dims == 0 || spec.directions <= 0) return samples;

    // Unit directions in the sup norm, fixed by the seed.
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vec> dirs;
    dirs.reserve(static_cast<std::size_t>(spec.directions));
    while (dirs.size() < static_cast<std::size_t>(spec.directions)) {
        Vec u(dims);
        double sup = 0;
        for (auto& c : u) {
            c = normal(rng);
            sup = std::max(sup, std::abs(c));
        }
        if (sup < 1e-12) continue;
        for (auto& c : u) c /= sup;
        dirs.push_back(std::move(u));
    }

    std::vector<double> radii;
    if (spec.radial_step > 0) {
        for (double r = spec.radial_step; r < delta - 1e-15; r += spec.radial_step)
            radii.push_back(r);
    }
    radii.push_back(delta);

    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (const double r : radii) {
        for (const auto& u : dirs) {
            TorusPhase th = theta;
            for (std::size_t i = 0; i < k; ++i) {
                double a = std::fmod(theta.theta[i] + std::numbers::pi * r * u[i], two_pi);
                if (a < 0) a += two_pi;
                th.theta[i] = a;
            }
            Vec xs(x.begin(), x.end());
            for (std::size_t i = 0; i < n; ++i) xs[i] += r * u[k + i];
            samples.emplace_back(std::move(th), std::move(xs));
        }
    }
    return samples;
}

Fiber inflated_fiber(const LayerField& field, const TorusPhase& theta,
                     std::span<const double> x, double delta,
                     const NeighborhoodSpec& spec, const FiberParams& params,
                     const IntegratorConfig& cfg, double escape_radius) {
    if (delta < 0) throw std::invalid_argument("delta must be >= 0");
    const auto samples = neighborhood_samples(theta, x, delta, spec);

    Fiber out;
    out.pullback_time = params.t_pull;
    out.resolution = params.seeds.spacing;
    out.converged = true;
    out.hausdorff_gap = 0.0;
    std::size_t empty_samples = 0;
    for (const auto& [th, xs] : samples) {
        try {
            Fiber f = pullback_fiber(field, th, xs, params, cfg, escape_radius);
            out.points.insert(out.points.end(), f.points.begin(), f.points.end());
            out.converged = out.converged && f.converged;
            if (std::isnan(out.hausdorff_gap) || std::isnan(f.hausdorff_gap))
                out.hausdorff_gap = std::numeric_limits<double>::quiet_NaN();
            else
                out.hausdorff_gap = std::max(out.hausdorff_gap, f.hausdorff_gap);
            out.escaped_seeds += f.escaped_seeds;
        } catch (const EmptyFiber&) {
            ++empty_samples;
        }
    }
    if (out.points.empty())
        throw EmptyFiber("every neighborhood sample produced an empty fiber");
    (void)empty_samples;
    return out;
}

namespace {

// Scans for a seed on the requested branch of a scalar concave field: g < -0.5
// along sampled times and the y-slope has the requested sign.
std::optional<double> scan_branch_seed(const LayerField& field, const TorusPhase& theta,
                                       std::span<const double> x, double tau_a,
                                       double tau_b, bool upper) {
    const std::size_t samples = 256;
    Vec g(1), jac(1);
    Vec y(1);
    const auto jac_fn = frozen_jacobian(field, Vec(x.begin(), x.end()), theta);
    for (double mag = 1.0; mag <= 1e6; mag *= 2.0) {
        const double cand = upper ? mag : -mag;
        y[0] = cand;
        bool ok = true;
        for (std::size_t i = 0; i <= samples && ok; ++i) {
            const double tau = tau_a + (tau_b - tau_a) * static_cast<double>(i) /
                                           static_cast<double>(samples);
            field.g(x, y, tau, theta, g);
            jac_fn(y, tau, jac);
            ok = g[0] < -0.5 && (upper ? jac[0] < 0 : jac[0] > 0);
        }
        if (ok) return cand;
    }
    return std::nullopt;
}

Trajectory reverse_trajectory(const Trajectory& t, double tau_origin) {
    // Maps s -> tau_origin - s back to forward time.
    Trajectory out;
    out.dim = t.dim;
    out.blew_up = t.blew_up;
    const std::size_t n = t.size();
    out.times.resize(n);
    out.states.resize(n * t.dim);
    out.derivs.resize(n * t.dim);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        out.times[i] = tau_origin - t.times[j];
        for (std::size_t c = 0; c < t.dim; ++c) {
            out.states[i * t.dim + c] = t.states[j * t.dim + c];
            out.derivs[i * t.dim + c] = -t.derivs[j * t.dim + c];
        }
    }
    if (t.blew_up) out.escape_time = tau_origin - t.escape_time;
    return out;
}

}  // namespace

HyperbolicPair riccati_pair(const LayerField& field, const TorusPhase& theta,
                            std::span<const double> x, double tau_a, double tau_b,
                            const PairParams& params, const IntegratorConfig& cfg,
                            double escape_radius) {
    if (field.fast_dim != 1)
        throw std::invalid_argument("attractor-repeller pairs need a scalar fast variable");
    if (!(tau_b > tau_a)) throw std::invalid_argument("window must have tau_b > tau_a");

    const Vec xv(x.begin(), x.end());
    const double scan_a = tau_a - params.spin_up;
    const double scan_b = tau_b + params.spin_up;

    std::optional<double> high = params.high_seed;
    if (!high) {
        high = scan_branch_seed(field, theta, x, scan_a, scan_b, true);
        if (high) *high += params.seed_margin;
    }
    std::optional<double> low = params.low_seed;
    if (!low) {
        low = scan_branch_seed(field, theta, x, scan_a, scan_b, false);
        if (low) *low -= params.seed_margin;
    }
    if (!high || !low)
        throw NoBoundedSolution("no attracting/repelling branch found for seeding");

    // Attractor: pull back from the high seed with spin-up burn-in.
    const VectorField fwd = frozen_field(field, xv, theta);
    IntegratorConfig burn_cfg = cfg;
    burn_cfg.store_stride = std::numeric_limits<std::size_t>::max();
    const Vec high_seed{*high};
    const auto burn =
        integrate_endpoint(fwd, high_seed, tau_a - params.spin_up, tau_a, burn_cfg,
                           escape_radius);
    bool attractor_ok = !burn.blew_up;
    Trajectory attractor;
    if (attractor_ok) {
        attractor = integrate(fwd, burn.y, tau_a, tau_b, cfg, escape_radius);
        attractor_ok = !attractor.blew_up;
    }

    // Repeller: attractor of the reversed flow, seeded below every bounded
    // solution and integrated backwards from past the window.
    VectorField rev;
    rev.dim = 1;
    const TorusPhase theta_rev = theta;
    const double origin = tau_b + params.spin_up;
    rev.eval = [&field, &xv, &theta_rev, origin](std::span<const double> y, double s,
                                                 std::span<double> dy) {
        field.g(xv, y, origin - s, theta_rev, dy);
        dy[0] = -dy[0];
    };
    const Vec low_seed{*low};
    const auto rev_burn =
        integrate_endpoint(rev, low_seed, 0.0, params.spin_up, burn_cfg, escape_radius);
    bool repeller_ok = !rev_burn.blew_up;
    Trajectory repeller;
    if (repeller_ok) {
        const Trajectory rev_traj = integrate(rev, rev_burn.y, params.spin_up,
                                              origin - tau_a, cfg, escape_radius);
        repeller_ok = !rev_traj.blew_up;
        if (repeller_ok) repeller = reverse_trajectory(rev_traj, origin);
    }

    if (!attractor_ok && !repeller_ok)
        throw NoBoundedSolution("both pair constructions escaped");
    if (!attractor_ok || !repeller_ok)
        throw NoBoundedSolution(attractor_ok ? "repeller construction escaped"
                                             : "attractor construction escaped");

    HyperbolicPair pair;
    pair.attractor = std::move(attractor);
    pair.repeller = std::move(repeller);

    const auto jac = frozen_jacobian(field, xv, theta);
    pair.beta_attractor = dichotomy_exponent(pair.attractor, jac, tau_a, tau_b);
    pair.beta_repeller = dichotomy_exponent(pair.repeller, jac, tau_a, tau_b);
    if (std::abs(pair.beta_attractor) < params.hyperbolicity_threshold ||
        std::abs(pair.beta_repeller) < params.hyperbolicity_threshold) {
        std::ostringstream msg;
        msg << "dichotomy exponents below threshold: beta_a=" << pair.beta_attractor
            << " beta_r=" << pair.beta_repeller;
        throw NotHyperbolic(msg.str());
    }

    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pair.attractor.size(); ++i) {
        const double tau = pair.attractor.times[i];
        if (tau < tau_a - 1e-12 || tau > tau_b + 1e-12) continue;
        min_gap = std::min(min_gap,
                           pair.attractor.states[i] - pair.repeller.at_scalar(tau));
    }
    pair.min_gap = min_gap;
    pair.separated = min_gap > params.separation_threshold;
    return pair;
}

double dichotomy_exponent(const Trajectory& base, const JacobianFn& jac_y, double tau_a,
                          double tau_b) {
    if (!(tau_b > tau_a)) throw std::invalid_argument("window must have tau_b > tau_a");
    if (!base.covers(tau_a, tau_b))
        throw OutOfRange("base trajectory does not cover the exponent window");
    const std::size_t d = base.dim;
    Vec y(d), jac(d * d);
    // Trapezoid over a uniform grid; node count tied to the stored resolution.
    const std::size_t n =
        std::clamp<std::size_t>(static_cast<std::size_t>((tau_b - tau_a) * 100), 200, 400000);
    double sum = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double tau = tau_a + (tau_b - tau_a) * static_cast<double>(i) /
                                       static_cast<double>(n);
        base.at(tau, y);
        jac_y(y, tau, jac);
        double trace = 0;
        for (std::size_t c = 0; c < d; ++c) trace += jac[c * d + c];
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        sum += w * trace;
    }
    return sum / static_cast<double>(n);
}

UUBCertificate uub_check(const LayerField& field, const TorusPhase& theta,
                         const std::vector<Vec>& x_grid, const SeedBox& seeds,
                         const std::vector<double>& tau0_grid, double horizon,
                         double c_candidate, double T_candidate,
                         const IntegratorConfig& cfg, double escape_radius) {
    if (x_grid.empty() || tau0_grid.empty())
        throw std::invalid_argument("uub_check needs nonempty grids");
    UUBCertificate cert;
    cert.c = c_candidate;
    cert.T = T_candidate;
    cert.d = seeds.radius();
    cert.x_set = x_grid;
    cert.horizon = horizon;
    cert.passed = true;

    const auto seed_points = seeds.grid();
    for (const auto& x : x_grid) {
        for (const double tau0 : tau0_grid) {
            // Starting at tau0 is the shifted-phase equation started at 0.
            const TorusPhase phase = shift(theta, tau0, field.omega);
            const VectorField f = frozen_field(field, x, phase);
            for (const auto& y0 : seed_points) {
                bool violated = false;
                double violation_tau = 0, violation_norm = 0;
                try {
                    const auto end = integrate_scan(
                        f, y0, 0.0, horizon, cfg, escape_radius,
                        [&](double tau, std::span<const double> y) {
                            if (violated) return;
                            if (tau >= T_candidate && norm2(y) > c_candidate) {
                                violated = true;
                                violation_tau = tau;
                                violation_norm = norm2(y);
                            }
                        });
                    // A blown-up run leaves every ball.
                    if (!violated && end.blew_up) {
                        violated = true;
                        violation_tau = end.escape_time;
                    }
                } catch (const SimulationError&) {
                    violated = true;
                }
                if (violated) {
                    cert.passed = false;
                    ++cert.violations;
                    if (cert.first_violation.empty()) {
                        std::ostringstream msg;
                        msg << "x[0]=" << x[0] << " tau0=" << tau0 << " y0[0]=" << y0[0]
                            << " tau=" << violation_tau << " |y|=" << violation_norm;
                        cert.first_violation = msg.str();
                    }
                }
            }
        }
    }
    return cert;
}

double estimate_lipschitz_y(const VectorField& field, const SeedBox& box, double tau_a,
                            double tau_b, std::size_t tau_samples) {
    const auto points = box.grid();
    const std::size_t d = field.dim;
    const double h = 1e-5;
    Vec gp(d), gm(d);
    double lip = 0;
    for (std::size_t s = 0; s <= tau_samples; ++s) {
        const double tau = tau_a + (tau_b - tau_a) * static_cast<double>(s) /
                                       static_cast<double>(std::max<std::size_t>(tau_samples, 1));
        for (const auto& y : points) {
            Vec yp(y), ym(y);
            for (std::size_t j = 0; j < d; ++j) {
                yp[j] += h;
                ym[j] -= h;
                field.eval(yp, tau, gp);
                field.eval(ym, tau, gm);
                double col = 0;
                for (std::size_t i = 0; i < d; ++i)
                    col += std::abs(gp[i] - gm[i]) / (2 * h);
                lip = std::max(lip, col);
                yp[j] = y[j];
                ym[j] = y[j];
            }
        }
    }
    return lip;
}

}  // namespace nonauto
