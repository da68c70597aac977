#pragma once

#include <optional>
#include <set>
#include <string>

#include "patchwind/engine_free.hpp"
#include "patchwind/engine_torus.hpp"
#include "patchwind/generators.hpp"
#include "patchwind/io.hpp"

namespace patchwind {

// ---------------------------------------------------------------------------
// Experiment scenarios and their documented presets.  The preset numbers are
// the ones the acceptance runs use; config files override individual keys.
// ---------------------------------------------------------------------------

enum class Scenario { torus_theorem, plane_theorem, bc_proposition, disk_steady, kirchhoff };

inline const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::torus_theorem: return "torus-theorem";
        case Scenario::plane_theorem: return "plane-theorem";
        case Scenario::bc_proposition: return "bc-proposition";
        case Scenario::disk_steady: return "disk-steady";
        case Scenario::kirchhoff: return "kirchhoff";
    }
    return "?";
}

inline Scenario scenario_from_name(const std::string& s) {
    if (s == "torus-theorem") return Scenario::torus_theorem;
    if (s == "plane-theorem") return Scenario::plane_theorem;
    if (s == "bc-proposition") return Scenario::bc_proposition;
    if (s == "disk-steady") return Scenario::disk_steady;
    if (s == "kirchhoff") return Scenario::kirchhoff;
    throw ConfigError("unknown scenario '" + s + "'");
}

struct ExperimentConfig {
    Scenario scenario = Scenario::disk_steady;
    GeneratorParams generator;
    FreeRunConfig free_cfg;
    TorusRunConfig torus_cfg;
    ContainmentSpec containment;
    double c0_threshold = 0.0;        // slope acceptance threshold for cmd_run
    double transient_fraction = 0.1;  // slope-fit transient cutoff
    unsigned seed = 12345;            // randomized property suites only
    std::string output_dir = "out";
    double kirchhoff_a = 1.0;
    double kirchhoff_b = 0.5;
    std::size_t disk_nodes = 512;

    bool uses_torus_engine() const {
        return scenario == Scenario::torus_theorem || scenario == Scenario::bc_proposition;
    }
};

inline ExperimentConfig make_preset(Scenario s) {
    ExperimentConfig c;
    c.scenario = s;
    switch (s) {
        case Scenario::torus_theorem:
            // generator defaults are the epsilon = 0.3 torus preset
            c.torus_cfg.dt = 0.005;
            c.torus_cfg.t_end = 30.0;
            c.torus_cfg.n = 512;
            c.torus_cfg.h_min = 0.004;
            c.torus_cfg.h_max = 0.012;
            c.torus_cfg.output_stride = 200;  // once per time unit
            c.containment = {ContainmentMode::torus_annulus, c.generator.delta};
            c.c0_threshold = 0.0;  // positive slope required
            break;
        case Scenario::plane_theorem:
            c.generator.epsilon = 1.0;
            c.generator.plane_budget_c1 = 1e-2;
            c.generator.stick_width = 0.008;
            c.generator.corner_rounding = 0.03;
            c.generator.h_min = 0.015;
            c.generator.h_max = 0.035;
            c.free_cfg.dt = 0.0125;
            c.free_cfg.t_end = 40.0;
            c.free_cfg.h_min = 0.015;
            c.free_cfg.h_max = 0.035;
            c.free_cfg.output_stride = 80;  // once per time unit
            c.free_cfg.gap_resolution = 256;
            c.containment = {ContainmentMode::plane_rings, 0.25};
            c.c0_threshold = 0.0;
            break;
        case Scenario::bc_proposition:
            c.torus_cfg.dt = 0.005;
            c.torus_cfg.t_end = 50.0;
            c.torus_cfg.n = 512;
            c.torus_cfg.h_min = 0.002;
            c.torus_cfg.h_max = 0.008;
            c.torus_cfg.output_stride = 200;
            c.torus_cfg.compute_gap = false;  // the advecting field is the reference
            c.containment = {ContainmentMode::bc_annulus, 0.25};
            c.c0_threshold = 0.015;  // half of (pi delta/2)/T at delta = 1/4
            break;
        case Scenario::disk_steady:
            c.free_cfg.dt = 0.005;
            c.free_cfg.t_end = 10.0;
            c.free_cfg.h_min = 0.006;
            c.free_cfg.h_max = 0.0125;
            c.free_cfg.output_stride = 200;
            c.free_cfg.gap_resolution = 128;
            c.containment = {ContainmentMode::plane_rings, 0.25};
            c.c0_threshold = 1e-4;  // |slope| must stay below this
            break;
        case Scenario::kirchhoff: {
            c.free_cfg.dt = 0.0075;
            const double period = kTwoPi / kirchhoff_rotation_rate(1.0, 0.5);
            c.free_cfg.t_end = std::round(period / c.free_cfg.dt) * c.free_cfg.dt;
            c.free_cfg.h_min = 0.008;
            c.free_cfg.h_max = 0.02;
            c.free_cfg.output_stride = 200;
            c.free_cfg.gap_resolution = 0;
            c.containment = {ContainmentMode::plane_rings, 0.25};
            c.c0_threshold = 0.0;
            break;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Config application (unknown keys are errors)
// ---------------------------------------------------------------------------

namespace detail {

inline double to_double(const std::string& k, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw ConfigError("config: key '" + k + "' expects a number, got '" + v + "'");
    }
}

inline long to_long(const std::string& k, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw ConfigError("config: key '" + k + "' expects an integer, got '" + v + "'");
    }
}

}  // namespace detail

inline ExperimentConfig config_from_map(const ConfigMap& m) {
    auto it = m.find("scenario");
    if (it == m.end()) throw ConfigError("config: missing required key 'scenario'");
    ExperimentConfig c = make_preset(scenario_from_name(it->second));

    for (const auto& [key, val] : m) {
        if (key == "scenario") continue;
        else if (key == "seed") c.seed = static_cast<unsigned>(detail::to_long(key, val));
        else if (key == "output_dir") c.output_dir = val;
        else if (key == "c0_threshold") c.c0_threshold = detail::to_double(key, val);
        else if (key == "transient_fraction") c.transient_fraction = detail::to_double(key, val);
        else if (key == "containment.delta") c.containment.delta = detail::to_double(key, val);
        else if (key == "generator.epsilon") c.generator.epsilon = detail::to_double(key, val);
        else if (key == "generator.delta") c.generator.delta = detail::to_double(key, val);
        else if (key == "generator.epsilon_tilde")
            c.generator.epsilon_tilde = detail::to_double(key, val);
        else if (key == "generator.stick_width")
            c.generator.stick_width = detail::to_double(key, val);
        else if (key == "generator.corner_rounding")
            c.generator.corner_rounding = detail::to_double(key, val);
        else if (key == "generator.margin") c.generator.margin = detail::to_double(key, val);
        else if (key == "generator.plane_budget_c1")
            c.generator.plane_budget_c1 = detail::to_double(key, val);
        else if (key == "generator.h_min") c.generator.h_min = detail::to_double(key, val);
        else if (key == "generator.h_max") c.generator.h_max = detail::to_double(key, val);
        else if (key == "engine.dt") {
            c.free_cfg.dt = detail::to_double(key, val);
            c.torus_cfg.dt = c.free_cfg.dt;
        } else if (key == "engine.t_end") {
            c.free_cfg.t_end = detail::to_double(key, val);
            c.torus_cfg.t_end = c.free_cfg.t_end;
        } else if (key == "engine.h_min") {
            c.free_cfg.h_min = detail::to_double(key, val);
            c.torus_cfg.h_min = c.free_cfg.h_min;
        } else if (key == "engine.h_max") {
            c.free_cfg.h_max = detail::to_double(key, val);
            c.torus_cfg.h_max = c.free_cfg.h_max;
        } else if (key == "engine.output_stride") {
            c.free_cfg.output_stride = static_cast<int>(detail::to_long(key, val));
            c.torus_cfg.output_stride = c.free_cfg.output_stride;
        } else if (key == "engine.node_cap") {
            c.free_cfg.node_cap = static_cast<std::size_t>(detail::to_long(key, val));
            c.torus_cfg.node_cap = c.free_cfg.node_cap;
        } else if (key == "engine.n") c.torus_cfg.n = static_cast<int>(detail::to_long(key, val));
        else if (key == "engine.max_mode")
            c.torus_cfg.trunc = SpectralTruncation{static_cast<int>(detail::to_long(key, val))};
        else if (key == "engine.compute_gap")
            c.torus_cfg.compute_gap = detail::to_long(key, val) != 0;
        else if (key == "engine.gap_resolution")
            c.free_cfg.gap_resolution = static_cast<int>(detail::to_long(key, val));
        else if (key == "engine.interp") {
            if (val == "bilinear") c.torus_cfg.interp = TorusInterp::bilinear;
            else if (val == "bicubic") c.torus_cfg.interp = TorusInterp::bicubic;
            else throw ConfigError("config: engine.interp must be bilinear or bicubic");
        } else if (key == "engine.quadrature") {
            if (val == "analytic-segment") c.free_cfg.quadrature = Quadrature::analytic_segment;
            else if (val == "gauss") c.free_cfg.quadrature = Quadrature::gauss;
            else throw ConfigError("config: engine.quadrature must be analytic-segment or gauss");
        } else if (key == "kirchhoff.a") c.kirchhoff_a = detail::to_double(key, val);
        else if (key == "kirchhoff.b") c.kirchhoff_b = detail::to_double(key, val);
        else if (key == "disk.nodes")
            c.disk_nodes = static_cast<std::size_t>(detail::to_long(key, val));
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    return c;
}

inline ConfigMap config_to_map(const ExperimentConfig& c) {
    ConfigMap m;
    m["scenario"] = scenario_name(c.scenario);
    m["seed"] = std::to_string(c.seed);
    m["output_dir"] = c.output_dir;
    m["c0_threshold"] = fmt17(c.c0_threshold);
    m["transient_fraction"] = fmt17(c.transient_fraction);
    m["containment.delta"] = fmt17(c.containment.delta);
    if (c.scenario == Scenario::torus_theorem || c.scenario == Scenario::plane_theorem) {
        m["generator.epsilon"] = fmt17(c.generator.epsilon);
        m["generator.delta"] = fmt17(c.generator.delta);
        m["generator.epsilon_tilde"] = fmt17(c.generator.epsilon_tilde);
        m["generator.stick_width"] = fmt17(c.generator.stick_width);
        m["generator.corner_rounding"] = fmt17(c.generator.corner_rounding);
        m["generator.margin"] = fmt17(c.generator.margin);
        m["generator.plane_budget_c1"] = fmt17(c.generator.plane_budget_c1);
        m["generator.h_min"] = fmt17(c.generator.h_min);
        m["generator.h_max"] = fmt17(c.generator.h_max);
    }
    if (c.uses_torus_engine()) {
        m["engine.dt"] = fmt17(c.torus_cfg.dt);
        m["engine.t_end"] = fmt17(c.torus_cfg.t_end);
        m["engine.n"] = std::to_string(c.torus_cfg.n);
        m["engine.h_min"] = fmt17(c.torus_cfg.h_min);
        m["engine.h_max"] = fmt17(c.torus_cfg.h_max);
        m["engine.output_stride"] = std::to_string(c.torus_cfg.output_stride);
        m["engine.node_cap"] = std::to_string(c.torus_cfg.node_cap);
        m["engine.max_mode"] = std::to_string(c.torus_cfg.trunc.max_mode);
        m["engine.compute_gap"] = c.torus_cfg.compute_gap ? "1" : "0";
        m["engine.interp"] =
            c.torus_cfg.interp == TorusInterp::bicubic ? "bicubic" : "bilinear";
    } else {
        m["engine.dt"] = fmt17(c.free_cfg.dt);
        m["engine.t_end"] = fmt17(c.free_cfg.t_end);
        m["engine.h_min"] = fmt17(c.free_cfg.h_min);
        m["engine.h_max"] = fmt17(c.free_cfg.h_max);
        m["engine.output_stride"] = std::to_string(c.free_cfg.output_stride);
        m["engine.node_cap"] = std::to_string(c.free_cfg.node_cap);
        m["engine.gap_resolution"] = std::to_string(c.free_cfg.gap_resolution);
        m["engine.quadrature"] = c.free_cfg.quadrature == Quadrature::analytic_segment
                                     ? "analytic-segment"
                                     : "gauss";
        if (c.scenario == Scenario::kirchhoff) {
            m["kirchhoff.a"] = fmt17(c.kirchhoff_a);
            m["kirchhoff.b"] = fmt17(c.kirchhoff_b);
        }
        if (c.scenario == Scenario::disk_steady) m["disk.nodes"] = std::to_string(c.disk_nodes);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Initial-state assembly
// ---------------------------------------------------------------------------

struct InitialData {
    PatchState state;
    std::optional<GenerationReport> report;
};

inline InitialData make_initial_state(const ExperimentConfig& c) {
    InitialData out;
    PatchState& st = out.state;
    switch (c.scenario) {
        case Scenario::torus_theorem: {
            GeneratedPatch g = gen_torus_patch(c.generator);
            st.boundary = std::move(g.boundary);
            st.has_tracked = true;
            st.tracked = g.tracked;
            st.inner_ledger = WindingLedger(kSquareCenter, st.inner_marker());
            st.outer_ledger = WindingLedger(kSquareCenter, st.outer_marker());
            out.report = g.report;
            break;
        }
        case Scenario::plane_theorem: {
            GeneratedPatch g = gen_handle_patch(c.generator);
            st.boundary = std::move(g.boundary);
            st.has_tracked = true;
            st.tracked = g.tracked;
            st.inner_ledger = WindingLedger(kOrigin, st.inner_marker());
            st.outer_ledger = WindingLedger(kOrigin, st.outer_marker());
            out.report = g.report;
            break;
        }
        case Scenario::bc_proposition: {
            // The proposition's curve: the segment x_o -> x_c, with an exact
            // node at distance delta/2 from x_c (the period marker).
            const double delta = c.containment.delta;
            const double total = kSquareCenter.norm();
            const std::size_t n = std::max<std::size_t>(
                64, static_cast<std::size_t>(std::ceil(total / (0.8 * c.torus_cfg.h_max))));
            MarkedCurve seg = make_segment_curve(kOrigin, kSquareCenter, n);
            const double target = total - 0.5 * delta;
            std::size_t idx = seg.nodes.size() - 1;
            for (std::size_t i = 0; i + 1 < seg.nodes.size(); ++i) {
                if (seg.nodes[i].norm() <= target && seg.nodes[i + 1].norm() > target) {
                    idx = i + 1;
                    break;
                }
            }
            seg.nodes.insert(seg.nodes.begin() + static_cast<std::ptrdiff_t>(idx),
                             kSquareCenter * (target / total));
            st.boundary.components.push_back(std::move(seg));
            st.has_tracked = true;
            st.tracked.component = 0;
            st.tracked.inner_node = idx;
            st.tracked.outer_node = 0;
            st.tracked.arc_begin = 0;
            st.tracked.arc_end = idx;
            st.inner_ledger = WindingLedger(kSquareCenter, st.inner_marker());
            st.outer_ledger = WindingLedger(kSquareCenter, st.outer_marker());
            break;
        }
        case Scenario::disk_steady:
            st.boundary = make_disk_patch(c.disk_nodes);
            break;
        case Scenario::kirchhoff:
            st.boundary = make_kirchhoff_patch(c.kirchhoff_a, c.kirchhoff_b, c.free_cfg.h_max);
            break;
    }
    return out;
}

}  // namespace patchwind
