#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nonauto/slowfast.hpp"
#include "nonauto/tipping.hpp"

namespace nonauto {

enum class GammaKind { QuasiPeriodicSum, Arctan, Table };
enum class SlowFieldSpecKind { ConstantOne, Constant, Linear };

struct GammaSpec {
    GammaKind kind = GammaKind::QuasiPeriodicSum;
    // quasiperiodic-sum
    std::vector<ForcingTerm> terms;
    double offset = 0.0;
    // arctan
    double amplitude = 1.0;
    double x_scale = 1.0;
    // table
    std::vector<std::pair<double, double>> points;
};

struct SlowFieldSpec {
    SlowFieldSpecKind kind = SlowFieldSpecKind::ConstantOne;
    std::vector<double> constant{1.0};
    double x_coeff = 0.0, y_coeff = 0.0, offset = 0.0;
};

struct IntegratorSpec {
    Method method = Method::Rk4;
    double step = 1e-2;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::uint64_t max_steps = 100'000'000;
    double escape_radius = 1e6;
};

struct FiberSpec {
    double seed_lo = -0.2;
    double seed_hi = 2.8;
    double seed_spacing = 0.5;
    double t_pull = 40.0;
    double tol = 1e-3;
    double spin_up = 20.0;
};

/// Fully resolved scenario document. Parsing rejects unknown keys and reports
/// errors by field path; emission is canonical, so parse(emit(x)) == x.
struct ScenarioConfig {
    std::vector<ForcingTerm> forcing_terms;
    double forcing_offset = 0.962;
    GammaSpec gamma;
    SlowFieldSpec slow_field;
    double x0 = 0.0;
    double y0 = 2.0;
    double t0 = 20.0;
    std::vector<double> epsilon_grid{0.05, 0.2, 0.35, 0.5};
    IntegratorSpec integrator;
    FiberSpec fiber;
    MetricMode metric_mode = MetricMode::TorusAngle;
    std::string out_dir = "out";
    std::uint64_t seed = 42;

    bool operator==(const ScenarioConfig& other) const;
};

ScenarioConfig default_config();

/// Parses a JSON document; missing keys take defaults, unknown keys are
/// rejected with a ConfigError naming the path.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);

/// Canonical JSON emission of the resolved document.
std::string emit_config(const ScenarioConfig& cfg);

/// Known presets: fig1, fig2-left, fig2-right, fig3.
ScenarioConfig preset_config(const std::string& name);
bool is_known_preset(const std::string& name);
std::vector<std::string> preset_names();

/// Top-level fields of `overrides` that differ from `frozen`; presets warn
/// about and ignore these.
std::vector<std::string> conflicting_sections(const ScenarioConfig& frozen,
                                              const ScenarioConfig& overrides);

SlowFastScenario build_scenario(const ScenarioConfig& cfg);
TransitionScenario build_transition(const ScenarioConfig& cfg);
GammaMap build_gamma(const GammaSpec& spec);

/// Manifest JSON recording every resolved parameter of a run.
std::string manifest_json(const ScenarioConfig& cfg, const std::string& command,
                          const std::string& preset, unsigned workers,
                          const std::vector<std::pair<std::string, std::string>>& extra,
                          const std::vector<std::string>& outputs);

}  // namespace nonauto
