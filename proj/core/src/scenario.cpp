#include "nonauto/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nonauto {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
    }
}

double get_number(const json& obj, const std::string& path, const char* key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
    return v.get<double>();
}

std::uint64_t get_uint(const json& obj, const std::string& path, const char* key,
                       std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer())
        throw ConfigError(path + "." + key, "expected an integer");
    return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(path + "." + key, "expected a string");
    return v.get<std::string>();
}

TermKind parse_kind(const std::string& s, const std::string& path) {
    if (s == "sin") return TermKind::Sin;
    if (s == "cos") return TermKind::Cos;
    throw ConfigError(path, "kind must be \"sin\" or \"cos\"");
}

std::vector<ForcingTerm> parse_terms(const json& arr, const std::string& path) {
    if (!arr.is_array()) throw ConfigError(path, "expected an array of terms");
    std::vector<ForcingTerm> terms;
    std::size_t i = 0;
    for (const auto& t : arr) {
        const std::string tp = path + "[" + std::to_string(i) + "]";
        if (!t.is_object()) throw ConfigError(tp, "expected a term object");
        reject_unknown(t, tp, {"amplitude", "frequency", "phase", "kind"});
        ForcingTerm term;
        term.amplitude = get_number(t, tp, "amplitude", 0.0);
        term.frequency = get_number(t, tp, "frequency", 0.0);
        term.phase = get_number(t, tp, "phase", 0.0);
        term.kind = parse_kind(get_string(t, tp, "kind", "sin"), tp + ".kind");
        terms.push_back(term);
        ++i;
    }
    return terms;
}

json terms_to_json(const std::vector<ForcingTerm>& terms) {
    json arr = json::array();
    for (const auto& t : terms)
        arr.push_back({{"amplitude", t.amplitude},
                       {"frequency", t.frequency},
                       {"phase", t.phase},
                       {"kind", t.kind == TermKind::Sin ? "sin" : "cos"}});
    return arr;
}

}  // namespace

bool ScenarioConfig::operator==(const ScenarioConfig& other) const {
    return emit_config(*this) == emit_config(other);
}

ScenarioConfig default_config() {
    ScenarioConfig cfg;
    cfg.forcing_terms = canonical_forcing().terms;
    cfg.forcing_offset = canonical_forcing().offset;
    cfg.gamma.kind = GammaKind::QuasiPeriodicSum;  // no terms: Gamma == 0
    cfg.gamma.terms.clear();
    cfg.gamma.offset = 0.0;
    return cfg;
}

ScenarioConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", e.what());
    }
    if (!doc.is_object()) throw ConfigError("<document>", "top level must be an object");
    reject_unknown(doc, "",
                   {"forcing", "gamma", "slow_field", "initial", "horizons",
                    "epsilon_grid", "integrator", "fiber", "metric", "output", "seed"});

    ScenarioConfig cfg = default_config();

    if (doc.contains("forcing")) {
        const auto& f = doc.at("forcing");
        if (!f.is_object()) throw ConfigError("forcing", "expected an object");
        reject_unknown(f, "forcing", {"terms", "offset"});
        if (f.contains("terms")) cfg.forcing_terms = parse_terms(f.at("terms"), "forcing.terms");
        cfg.forcing_offset = get_number(f, "forcing", "offset", cfg.forcing_offset);
    }

    if (doc.contains("gamma")) {
        const auto& g = doc.at("gamma");
        if (!g.is_object()) throw ConfigError("gamma", "expected an object");
        const std::string kind = get_string(g, "gamma", "kind", "quasiperiodic-sum");
        if (kind == "quasiperiodic-sum") {
            reject_unknown(g, "gamma", {"kind", "terms", "offset"});
            cfg.gamma.kind = GammaKind::QuasiPeriodicSum;
            cfg.gamma.terms =
                g.contains("terms") ? parse_terms(g.at("terms"), "gamma.terms")
                                    : std::vector<ForcingTerm>{};
            cfg.gamma.offset = get_number(g, "gamma", "offset", 0.0);
        } else if (kind == "arctan") {
            reject_unknown(g, "gamma", {"kind", "amplitude", "x_scale"});
            cfg.gamma.kind = GammaKind::Arctan;
            cfg.gamma.amplitude = get_number(g, "gamma", "amplitude", 1.0);
            cfg.gamma.x_scale = get_number(g, "gamma", "x_scale", 1.0);
        } else if (kind == "table") {
            reject_unknown(g, "gamma", {"kind", "points"});
            cfg.gamma.kind = GammaKind::Table;
            if (!g.contains("points") || !g.at("points").is_array())
                throw ConfigError("gamma.points", "expected an array of [x, value] pairs");
            cfg.gamma.points.clear();
            std::size_t i = 0;
            for (const auto& p : g.at("points")) {
                const std::string pp = "gamma.points[" + std::to_string(i) + "]";
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                    throw ConfigError(pp, "expected [x, value]");
                cfg.gamma.points.emplace_back(p[0].get<double>(), p[1].get<double>());
                ++i;
            }
            if (cfg.gamma.points.size() < 2)
                throw ConfigError("gamma.points", "need at least 2 points");
        } else if (kind == "custom") {
            throw ConfigError("gamma.kind",
                              "custom gamma maps are API-only; use quasiperiodic-sum, "
                              "arctan or table in config files");
        } else {
            throw ConfigError("gamma.kind", "unknown kind \"" + kind + "\"");
        }
    }

    if (doc.contains("slow_field")) {
        const auto& s = doc.at("slow_field");
        if (!s.is_object()) throw ConfigError("slow_field", "expected an object");
        const std::string kind = get_string(s, "slow_field", "kind", "constant-one");
        if (kind == "constant-one") {
            reject_unknown(s, "slow_field", {"kind"});
            cfg.slow_field.kind = SlowFieldSpecKind::ConstantOne;
        } else if (kind == "constant") {
            reject_unknown(s, "slow_field", {"kind", "value"});
            cfg.slow_field.kind = SlowFieldSpecKind::Constant;
            cfg.slow_field.constant = {get_number(s, "slow_field", "value", 1.0)};
        } else if (kind == "linear") {
            reject_unknown(s, "slow_field", {"kind", "x_coeff", "y_coeff", "offset"});
            cfg.slow_field.kind = SlowFieldSpecKind::Linear;
            cfg.slow_field.x_coeff = get_number(s, "slow_field", "x_coeff", 0.0);
            cfg.slow_field.y_coeff = get_number(s, "slow_field", "y_coeff", 0.0);
            cfg.slow_field.offset = get_number(s, "slow_field", "offset", 0.0);
        } else if (kind == "custom") {
            throw ConfigError("slow_field.kind",
                              "custom slow fields are API-only; use constant-one, "
                              "constant or linear in config files");
        } else {
            throw ConfigError("slow_field.kind", "unknown kind \"" + kind + "\"");
        }
    }

    if (doc.contains("initial")) {
        const auto& v = doc.at("initial");
        if (!v.is_object()) throw ConfigError("initial", "expected an object");
        reject_unknown(v, "initial", {"x0", "y0"});
        cfg.x0 = get_number(v, "initial", "x0", cfg.x0);
        cfg.y0 = get_number(v, "initial", "y0", cfg.y0);
    }

    if (doc.contains("horizons")) {
        const auto& v = doc.at("horizons");
        if (!v.is_object()) throw ConfigError("horizons", "expected an object");
        reject_unknown(v, "horizons", {"t0"});
        cfg.t0 = get_number(v, "horizons", "t0", cfg.t0);
        if (!(cfg.t0 > 0)) throw ConfigError("horizons.t0", "must be positive");
    }

    if (doc.contains("epsilon_grid")) {
        const auto& v = doc.at("epsilon_grid");
        if (!v.is_array() || v.empty())
            throw ConfigError("epsilon_grid", "expected a nonempty array");
        cfg.epsilon_grid.clear();
        std::size_t i = 0;
        for (const auto& e : v) {
            const std::string p = "epsilon_grid[" + std::to_string(i) + "]";
            if (!e.is_number()) throw ConfigError(p, "expected a number");
            const double eps = e.get<double>();
            if (!(eps > 0) || eps > 1.0) throw ConfigError(p, "epsilon must be in (0, 1]");
            cfg.epsilon_grid.push_back(eps);
            ++i;
        }
    }

    if (doc.contains("integrator")) {
        const auto& v = doc.at("integrator");
        if (!v.is_object()) throw ConfigError("integrator", "expected an object");
        reject_unknown(v, "integrator",
                       {"method", "step", "abs_tol", "rel_tol", "max_steps",
                        "escape_radius"});
        const std::string method = get_string(v, "integrator", "method", "rk4");
        if (method == "rk4")
            cfg.integrator.method = Method::Rk4;
        else if (method == "rk45")
            cfg.integrator.method = Method::Rk45;
        else
            throw ConfigError("integrator.method", "must be \"rk4\" or \"rk45\"");
        cfg.integrator.step = get_number(v, "integrator", "step", cfg.integrator.step);
        cfg.integrator.abs_tol = get_number(v, "integrator", "abs_tol", cfg.integrator.abs_tol);
        cfg.integrator.rel_tol = get_number(v, "integrator", "rel_tol", cfg.integrator.rel_tol);
        cfg.integrator.max_steps = get_uint(v, "integrator", "max_steps", cfg.integrator.max_steps);
        cfg.integrator.escape_radius =
            get_number(v, "integrator", "escape_radius", cfg.integrator.escape_radius);
        if (!(cfg.integrator.step > 0)) throw ConfigError("integrator.step", "must be positive");
        if (!(cfg.integrator.abs_tol > 0) || !(cfg.integrator.rel_tol > 0))
            throw ConfigError("integrator.abs_tol", "tolerances must be positive");
        if (cfg.integrator.max_steps < 1)
            throw ConfigError("integrator.max_steps", "must be >= 1");
    }

    if (doc.contains("fiber")) {
        const auto& v = doc.at("fiber");
        if (!v.is_object()) throw ConfigError("fiber", "expected an object");
        reject_unknown(v, "fiber",
                       {"seed_lo", "seed_hi", "seed_spacing", "t_pull", "tol", "spin_up"});
        cfg.fiber.seed_lo = get_number(v, "fiber", "seed_lo", cfg.fiber.seed_lo);
        cfg.fiber.seed_hi = get_number(v, "fiber", "seed_hi", cfg.fiber.seed_hi);
        cfg.fiber.seed_spacing = get_number(v, "fiber", "seed_spacing", cfg.fiber.seed_spacing);
        cfg.fiber.t_pull = get_number(v, "fiber", "t_pull", cfg.fiber.t_pull);
        cfg.fiber.tol = get_number(v, "fiber", "tol", cfg.fiber.tol);
        cfg.fiber.spin_up = get_number(v, "fiber", "spin_up", cfg.fiber.spin_up);
        if (cfg.fiber.seed_hi < cfg.fiber.seed_lo)
            throw ConfigError("fiber.seed_hi", "seed box is empty");
        if (!(cfg.fiber.t_pull > 0)) throw ConfigError("fiber.t_pull", "must be positive");
        if (!(cfg.fiber.tol > 0)) throw ConfigError("fiber.tol", "must be positive");
    }

    if (doc.contains("metric")) {
        const auto& v = doc.at("metric");
        if (!v.is_object()) throw ConfigError("metric", "expected an object");
        reject_unknown(v, "metric", {"mode"});
        const std::string mode = get_string(v, "metric", "mode", "torus-angle");
        if (mode == "torus-angle")
            cfg.metric_mode = MetricMode::TorusAngle;
        else if (mode == "compact-open")
            cfg.metric_mode = MetricMode::CompactOpen;
        else
            throw ConfigError("metric.mode", "must be \"torus-angle\" or \"compact-open\"");
    }

    if (doc.contains("output")) {
        const auto& v = doc.at("output");
        if (!v.is_object()) throw ConfigError("output", "expected an object");
        reject_unknown(v, "output", {"dir"});
        cfg.out_dir = get_string(v, "output", "dir", cfg.out_dir);
    }

    cfg.seed = get_uint(doc, "", "seed", cfg.seed);
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

json config_to_json(const ScenarioConfig& cfg) {
    json gamma;
    switch (cfg.gamma.kind) {
        case GammaKind::QuasiPeriodicSum:
            gamma = {{"kind", "quasiperiodic-sum"},
                     {"terms", terms_to_json(cfg.gamma.terms)},
                     {"offset", cfg.gamma.offset}};
            break;
        case GammaKind::Arctan:
            gamma = {{"kind", "arctan"},
                     {"amplitude", cfg.gamma.amplitude},
                     {"x_scale", cfg.gamma.x_scale}};
            break;
        case GammaKind::Table: {
            json pts = json::array();
            for (const auto& [x, v] : cfg.gamma.points) pts.push_back({x, v});
            gamma = {{"kind", "table"}, {"points", pts}};
            break;
        }
    }

    json slow;
    switch (cfg.slow_field.kind) {
        case SlowFieldSpecKind::ConstantOne:
            slow = {{"kind", "constant-one"}};
            break;
        case SlowFieldSpecKind::Constant:
            slow = {{"kind", "constant"}, {"value", cfg.slow_field.constant.at(0)}};
            break;
        case SlowFieldSpecKind::Linear:
            slow = {{"kind", "linear"},
                    {"x_coeff", cfg.slow_field.x_coeff},
                    {"y_coeff", cfg.slow_field.y_coeff},
                    {"offset", cfg.slow_field.offset}};
            break;
    }

    return json{
        {"forcing",
         {{"terms", terms_to_json(cfg.forcing_terms)}, {"offset", cfg.forcing_offset}}},
        {"gamma", gamma},
        {"slow_field", slow},
        {"initial", {{"x0", cfg.x0}, {"y0", cfg.y0}}},
        {"horizons", {{"t0", cfg.t0}}},
        {"epsilon_grid", cfg.epsilon_grid},
        {"integrator",
         {{"method", cfg.integrator.method == Method::Rk4 ? "rk4" : "rk45"},
          {"step", cfg.integrator.step},
          {"abs_tol", cfg.integrator.abs_tol},
          {"rel_tol", cfg.integrator.rel_tol},
          {"max_steps", cfg.integrator.max_steps},
          {"escape_radius", cfg.integrator.escape_radius}}},
        {"fiber",
         {{"seed_lo", cfg.fiber.seed_lo},
          {"seed_hi", cfg.fiber.seed_hi},
          {"seed_spacing", cfg.fiber.seed_spacing},
          {"t_pull", cfg.fiber.t_pull},
          {"tol", cfg.fiber.tol},
          {"spin_up", cfg.fiber.spin_up}}},
        {"metric", {{"mode", metric_mode_name(cfg.metric_mode)}}},
        {"output", {{"dir", cfg.out_dir}}},
        {"seed", cfg.seed}};
}

}  // namespace

std::string emit_config(const ScenarioConfig& cfg) { return config_to_json(cfg).dump(2); }

ScenarioConfig preset_config(const std::string& name) {
    ScenarioConfig cfg = default_config();
    const auto gamma1 = []() {
        GammaSpec g;
        g.kind = GammaKind::QuasiPeriodicSum;
        g.terms = {{0.2, std::sqrt(2.0), 0.0, TermKind::Sin},
                   {0.2, 0.2, 0.0, TermKind::Cos}};
        g.offset = 0.0;
        return g;
    };
    if (name == "fig1") {
        // Bare layer equation; gamma stays zero.
        return cfg;
    }
    if (name == "fig2-left" || name == "fig2-right") {
        cfg.gamma = gamma1();
        return cfg;
    }
    if (name == "fig3") {
        cfg.gamma.kind = GammaKind::Arctan;
        cfg.gamma.amplitude = 1.0;
        cfg.gamma.x_scale = 1.0;
        cfg.epsilon_grid = {0.8};
        return cfg;
    }
    throw ConfigError("preset", "unknown preset \"" + name + "\"");
}

bool is_known_preset(const std::string& name) {
    for (const auto& p : preset_names())
        if (p == name) return true;
    return false;
}

std::vector<std::string> preset_names() {
    return {"fig1", "fig2-left", "fig2-right", "fig3"};
}

std::vector<std::string> conflicting_sections(const ScenarioConfig& frozen,
                                              const ScenarioConfig& overrides) {
    const json a = config_to_json(frozen);
    const json b = config_to_json(overrides);
    std::vector<std::string> conflicts;
    for (const auto& [key, value] : a.items()) {
        if (key == "output" || key == "seed") continue;  // run-level, not frozen
        if (b.at(key) != value) conflicts.push_back(key);
    }
    return conflicts;
}

GammaMap build_gamma(const GammaSpec& spec) {
    switch (spec.kind) {
        case GammaKind::QuasiPeriodicSum:
            return quasiperiodic_gamma(spec.terms, spec.offset);
        case GammaKind::Arctan:
            return arctan_gamma(spec.amplitude, spec.x_scale);
        case GammaKind::Table:
            return table_gamma(spec.points);
    }
    throw std::invalid_argument("unknown gamma kind");
}

SlowFastScenario build_scenario(const ScenarioConfig& cfg) {
    SlowFastScenario sc;
    sc.forcing.terms = cfg.forcing_terms;
    sc.forcing.offset = cfg.forcing_offset;
    sc.gamma = build_gamma(cfg.gamma);
    sc.layer = riccati_layer(sc.forcing, *sc.gamma);
    sc.theta0 = TorusPhase::zeros(sc.forcing.torus_dim());

    switch (cfg.slow_field.kind) {
        case SlowFieldSpecKind::ConstantOne:
            sc.slow.kind = SlowFieldKind::ConstantOne;
            break;
        case SlowFieldSpecKind::Constant:
            sc.slow.kind = SlowFieldKind::Constant;
            sc.slow.constant = cfg.slow_field.constant;
            break;
        case SlowFieldSpecKind::Linear:
            sc.slow.kind = SlowFieldKind::Linear;
            sc.slow.x_coeff = cfg.slow_field.x_coeff;
            sc.slow.y_coeff = cfg.slow_field.y_coeff;
            sc.slow.offset = cfg.slow_field.offset;
            break;
    }

    sc.x0 = {cfg.x0};
    sc.y0 = {cfg.y0};
    sc.t0 = cfg.t0;
    sc.epsilon_grid = cfg.epsilon_grid;

    sc.integ.method = cfg.integrator.method;
    sc.integ.step = cfg.integrator.step;
    sc.integ.abs_tol = cfg.integrator.abs_tol;
    sc.integ.rel_tol = cfg.integrator.rel_tol;
    sc.integ.max_steps = cfg.integrator.max_steps;
    sc.escape_radius = cfg.integrator.escape_radius;

    sc.fiber.seeds.lo = {cfg.fiber.seed_lo};
    sc.fiber.seeds.hi = {cfg.fiber.seed_hi};
    sc.fiber.seeds.spacing = cfg.fiber.seed_spacing;
    sc.fiber.t_pull = cfg.fiber.t_pull;
    sc.fiber.tol = cfg.fiber.tol;
    sc.pair.spin_up = cfg.fiber.spin_up;

    sc.metric.mode = cfg.metric_mode;
    return sc;
}

TransitionScenario build_transition(const ScenarioConfig& cfg) {
    QuasiPeriodicForcing forcing;
    forcing.terms = cfg.forcing_terms;
    forcing.offset = cfg.forcing_offset;
    TransitionScenario ts = riccati_transition(std::move(forcing), build_gamma(cfg.gamma));
    ts.integ.method = cfg.integrator.method;
    ts.integ.step = cfg.integrator.step;
    ts.integ.abs_tol = cfg.integrator.abs_tol;
    ts.integ.rel_tol = cfg.integrator.rel_tol;
    ts.integ.max_steps = cfg.integrator.max_steps;
    ts.escape_radius = cfg.integrator.escape_radius;
    ts.spin_up = cfg.fiber.spin_up;
    return ts;
}

std::string manifest_json(const ScenarioConfig& cfg, const std::string& command,
                          const std::string& preset, unsigned workers,
                          const std::vector<std::pair<std::string, std::string>>& extra,
                          const std::vector<std::string>& outputs) {
    json run;
    run["command"] = command;
    run["preset"] = preset.empty() ? json(nullptr) : json(preset);
    run["workers"] = workers;
    run["seed"] = cfg.seed;
    run["metric_mode"] = metric_mode_name(cfg.metric_mode);
    for (const auto& [k, v] : extra) run[k] = v;
    json doc;
    doc["tool"] = "nonauto-slowfast";
    doc["schema"] = 1;
    doc["run"] = run;
    doc["resolved_config"] = config_to_json(cfg);
    doc["outputs"] = outputs;
    return doc.dump(2);
}

}  // namespace nonauto
