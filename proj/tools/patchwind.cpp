// patchwind command-line driver: generate initial data, run experiments,
// verify invariant suites, and summarize run outputs.
//
// Exit codes: 0 success, 2 invariant failure, 3 infeasible generation,
// 4 engine halt (partial results written).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "patchwind/engine_free.hpp"
#include "patchwind/engine_torus.hpp"
#include "patchwind/generators.hpp"
#include "patchwind/io.hpp"
#include "patchwind/presets.hpp"
#include "patchwind/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace patchwind;

namespace {

constexpr const char* kVersion = "patchwind 1.0.0";

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

ExperimentConfig load_config(const std::string& config_path, const std::string& scenario,
                             const std::string& output_dir) {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
        cfg = config_from_map(parse_config_file(config_path));
    } else if (!scenario.empty()) {
        cfg = make_preset(scenario_from_name(scenario));
    } else {
        throw ConfigError("need --config FILE or --scenario NAME");
    }
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    return cfg;
}

json row_to_json(const DiagnosticsRow& r) {
    return json{{"t", r.t},
                {"perimeter", r.perimeter},
                {"area", r.area},
                {"turns_inner", r.turns_inner},
                {"turns_outer", r.turns_outer},
                {"stability_gap", r.stability_gap},
                {"contain_inner", r.contain_inner},
                {"contain_outer", r.contain_outer},
                {"contain_arc", r.contain_arc},
                {"node_count", r.node_count}};
}

json report_to_json(const GenerationReport& rep) {
    return json{{"area_deficit", rep.area_deficit},
                {"budget", rep.budget},
                {"perimeter", rep.perimeter},
                {"gamma_outer_dist", rep.gamma_outer_dist},
                {"gamma_inner_dist", rep.gamma_inner_dist},
                {"arc_winding", rep.arc_winding},
                {"simple", rep.simple},
                {"stick_rect_area", rep.stick_rect_area},
                {"stick_probe", {rep.stick_probe.x1, rep.stick_probe.x2}}};
}

int cmd_generate(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    InitialData init = make_initial_state(cfg);
    const fs::path bpath = fs::path(cfg.output_dir) / "boundary.pwb";
    write_boundary(bpath, init.state.boundary,
                   init.state.has_tracked ? &init.state.tracked : nullptr);
    json rep;
    rep["version"] = kVersion;
    rep["scenario"] = scenario_name(cfg.scenario);
    rep["boundary_file"] = bpath.string();
    std::size_t nodes = 0;
    for (const auto& c : init.state.boundary.components) nodes += c.nodes.size();
    rep["node_count"] = nodes;
    if (init.report) {
        rep["generation"] = report_to_json(*init.report);
        rep["tracked"] = {{"component", init.state.tracked.component},
                          {"inner_node", init.state.tracked.inner_node},
                          {"outer_node", init.state.tracked.outer_node},
                          {"arc_begin", init.state.tracked.arc_begin},
                          {"arc_end", init.state.tracked.arc_end}};
    }
    atomic_write(fs::path(cfg.output_dir) / "generation_report.json", rep.dump(2) + "\n");
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_run(ExperimentConfig cfg, int threads, long snapshot_stride,
            const std::string& resume_path) {
    fs::create_directories(cfg.output_dir);
    cfg.free_cfg.threads = threads;

    PatchState state;
    std::optional<GenerationReport> gen_report;
    double dt_resume = 0.0;
    if (!resume_path.empty()) {
        Snapshot snap = read_snapshot(resume_path);
        state = std::move(snap.state);
        dt_resume = snap.dt_current;
    } else {
        InitialData init = make_initial_state(cfg);
        state = std::move(init.state);
        gen_report = init.report;
    }

    const double dt0 = cfg.uses_torus_engine() ? cfg.torus_cfg.dt : cfg.free_cfg.dt;
    const int output_stride =
        cfg.uses_torus_engine() ? cfg.torus_cfg.output_stride : cfg.free_cfg.output_stride;
    if (snapshot_stride < 0) snapshot_stride = output_stride;  // default: every row
    if (snapshot_stride > 0) {
        // Snapshots happen at row boundaries; round the stride up to one.
        const long rows = (snapshot_stride + output_stride - 1) / output_stride;
        snapshot_stride = rows * output_stride;
    }

    CsvWriter csv(fs::path(cfg.output_dir) / "diagnostics.csv");
    const double t_start_run = state.t;
    const RowSink sink = [&](const PatchState& s, const DiagnosticsRow& row) {
        csv.add(row);
        if (snapshot_stride > 0) {
            const long step = std::lround(s.t / dt0);
            if (step > std::lround(t_start_run / dt0) && step % snapshot_stride == 0) {
                Snapshot snap;
                snap.step = step;
                snap.dt = dt0;
                snap.dt_current = dt0;
                snap.state = s;
                write_snapshot(fs::path(cfg.output_dir) /
                                   ("snapshot_" + std::to_string(step) + ".pws"),
                               snap);
            }
        }
    };

    json manifest;
    manifest["version"] = kVersion;
    manifest["scenario"] = scenario_name(cfg.scenario);
    manifest["config"] = config_to_map(cfg);
    manifest["threads"] = threads;
    manifest["start_time"] = iso_now();
    if (gen_report) manifest["generation"] = report_to_json(*gen_report);
    if (!resume_path.empty()) manifest["resumed_from"] = resume_path;

    std::vector<DiagnosticsRow> rows;
    HaltReason halt = HaltReason::completed;
    std::vector<std::string> warnings;
    double max_area_drift = 0.0;

    // Remaining-time configs for resumed runs keep the absolute step grid.
    if (cfg.uses_torus_engine()) {
        TorusRunConfig tc = cfg.torus_cfg;
        if (!resume_path.empty()) {
            tc.t_end = cfg.torus_cfg.t_end - state.t;
            if (dt_resume > 0.0) tc.dt = dt_resume;
            const double steps = tc.t_end / tc.dt;
            tc.t_end = std::round(steps) * tc.dt;
        }
        if (cfg.scenario == Scenario::bc_proposition) {
            BcRunResult res = run_bc_curve(tc, std::move(state), cfg.containment, sink);
            rows = std::move(res.rows);
            warnings = std::move(res.warnings);
            manifest["measured_period"] = res.measured_period;
            state = std::move(res.final_state);
        } else {
            TorusRunResult res = run_torus(tc, std::move(state), cfg.containment, sink);
            rows = std::move(res.rows);
            warnings = std::move(res.warnings);
            halt = res.halt;
            max_area_drift = res.max_area_drift;
            manifest["max_grid_area_drift"] = res.max_grid_area_drift;
            state = std::move(res.final_state);
        }
    } else {
        FreeRunConfig fc = cfg.free_cfg;
        if (!resume_path.empty()) {
            fc.t_end = cfg.free_cfg.t_end - state.t;
            const double steps = fc.t_end / fc.dt;
            fc.t_end = std::round(steps) * fc.dt;
        }
        FreeRunResult res = run_free(fc, std::move(state), cfg.containment, sink);
        rows = std::move(res.rows);
        warnings = std::move(res.warnings);
        halt = res.halt;
        max_area_drift = res.max_area_drift;
        state = std::move(res.final_state);
    }
    csv.flush();

    // Final snapshot (resume target).
    {
        Snapshot snap;
        snap.step = std::lround(state.t / dt0);
        snap.dt = dt0;
        snap.dt_current = dt0;
        snap.state = state;
        write_snapshot(fs::path(cfg.output_dir) / "snapshot_final.pws", snap);
    }

    bool slope_ok = true;
    try {
        std::vector<std::pair<double, double>> series;
        for (const auto& r : rows) series.emplace_back(r.t, r.perimeter);
        const SlopeFit fit = slope_fit_after_transient(series, cfg.transient_fraction);
        manifest["slope_fit"] = {{"slope", fit.slope},
                                 {"intercept", fit.intercept},
                                 {"r2", fit.r2},
                                 {"threshold", cfg.c0_threshold}};
        if (cfg.scenario == Scenario::disk_steady || cfg.scenario == Scenario::kirchhoff)
            slope_ok = std::abs(fit.slope) <= std::max(cfg.c0_threshold, 1e-4);
        else
            slope_ok = fit.slope >= cfg.c0_threshold;
        manifest["slope_fit"]["pass"] = slope_ok;
    } catch (const InsufficientDataError&) {
        manifest["slope_fit"] = nullptr;
    }

    manifest["end_time"] = iso_now();
    manifest["halt_reason"] = halt == HaltReason::completed ? "completed" : "node_cap";
    manifest["warnings"] = warnings;
    manifest["max_area_drift"] = max_area_drift;
    manifest["symmetry_clamped"] = state.symmetry_clamped;
    if (!rows.empty()) manifest["final_row"] = row_to_json(rows.back());

    // First-failure timestamps per containment flag (null = never failed).
    {
        json ff;
        const auto first_fail = [&](auto flag_of) -> json {
            for (const auto& r : rows)
                if (!flag_of(r)) return r.t;
            return nullptr;
        };
        ff["inner"] = first_fail([](const DiagnosticsRow& r) { return r.contain_inner; });
        ff["outer"] = first_fail([](const DiagnosticsRow& r) { return r.contain_outer; });
        ff["arc"] = first_fail([](const DiagnosticsRow& r) { return r.contain_arc; });
        manifest["containment_first_failure"] = ff;
    }
    atomic_write(fs::path(cfg.output_dir) / "manifest.json", manifest.dump(2) + "\n");

    std::cout << "run complete: " << rows.size() << " rows -> " << cfg.output_dir << "\n";
    if (halt != HaltReason::completed) return 4;
    if (!slope_ok) return 2;
    return 0;
}

int cmd_verify(const std::string& suite, unsigned seed, const std::string& output_dir) {
    const std::vector<CheckResult> results = verify_suite(suite, seed);
    json rep;
    rep["version"] = kVersion;
    rep["suite"] = suite;
    rep["seed"] = seed;
    bool all_pass = true;
    for (const auto& r : results) {
        rep["cases"].push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        all_pass = all_pass && r.pass;
        std::printf("[%s] %s%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.empty() ? "" : " -- ", r.detail.c_str());
    }
    rep["pass"] = all_pass;
    if (!output_dir.empty()) {
        fs::create_directories(output_dir);
        atomic_write(fs::path(output_dir) / ("verify_" + suite + ".json"), rep.dump(2) + "\n");
    }
    std::printf("%s: %zu cases, %s\n", suite.c_str(), results.size(),
                all_pass ? "all passed" : "FAILURES");
    return all_pass ? 0 : 2;
}

int cmd_report(const std::string& dir) {
    const fs::path mpath = fs::path(dir) / "manifest.json";
    std::ifstream in(mpath);
    if (!in) throw IoError("no manifest at " + mpath.string());
    json manifest = json::parse(in);
    std::printf("scenario:     %s\n", manifest.value("scenario", "?").c_str());
    std::printf("halt:         %s\n", manifest.value("halt_reason", "?").c_str());
    if (manifest.contains("slope_fit") && manifest["slope_fit"].is_object()) {
        const auto& f = manifest["slope_fit"];
        std::printf("slope fit:    %.6g (r2 %.4f, threshold %.6g, %s)\n",
                    f.value("slope", 0.0), f.value("r2", 0.0), f.value("threshold", 0.0),
                    f.value("pass", false) ? "pass" : "FAIL");
    }
    if (manifest.contains("final_row")) {
        const auto& r = manifest["final_row"];
        std::printf("final row:    t %.6g perimeter %.6g area %.6g turns %.4f/%.4f nodes %zu\n",
                    r.value("t", 0.0), r.value("perimeter", 0.0), r.value("area", 0.0),
                    r.value("turns_inner", 0.0), r.value("turns_outer", 0.0),
                    static_cast<std::size_t>(r.value("node_count", 0)));
    }
    if (manifest.contains("measured_period"))
        std::printf("period:       %.4f\n", manifest.value("measured_period", 0.0));
    if (manifest.contains("containment_first_failure")) {
        const auto& ff = manifest["containment_first_failure"];
        const auto show = [&](const char* k) {
            return ff[k].is_null() ? std::string("never") : fmt12(ff[k].get<double>());
        };
        std::printf("flag breaks:  inner %s, outer %s, arc %s\n", show("inner").c_str(),
                    show("outer").c_str(), show("arc").c_str());
    }
    if (manifest.contains("warnings"))
        for (const auto& w : manifest["warnings"])
            std::printf("warning:      %s\n", w.get<std::string>().c_str());
    const fs::path cpath = fs::path(dir) / "diagnostics.csv";
    std::ifstream csv(cpath);
    if (csv) {
        std::string line;
        std::size_t count = 0;
        while (std::getline(csv, line)) ++count;
        std::printf("csv rows:     %zu (%s)\n", count > 0 ? count - 1 : 0, cpath.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"patchwind: contour dynamics for perimeter growth of 2D Euler vortex patches"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path, scenario, output_dir, resume_path, suite = "all";
    int threads = 2;
    long snapshot_stride = -1;  // default: one snapshot per output row
    unsigned seed = 12345;

    auto* gen = app.add_subcommand("generate", "generate an initial boundary + report");
    gen->add_option("--config", config_path, "config file (key = value)");
    gen->add_option("--scenario", scenario, "preset scenario name");
    gen->add_option("--output", output_dir, "output directory");

    auto* run = app.add_subcommand("run", "run an experiment, writing CSV + snapshots + manifest");
    run->add_option("--config", config_path, "config file (key = value)");
    run->add_option("--scenario", scenario, "preset scenario name");
    run->add_option("--output", output_dir, "output directory");
    run->add_option("--threads", threads, "worker threads (results are bitwise independent)");
    run->add_option("--snapshot-stride", snapshot_stride,
                    "steps between snapshots (default: one per output row; 0 = final only)");
    run->add_option("--resume", resume_path, "resume from a snapshot file");

    auto* ver = app.add_subcommand("verify", "run invariant suites");
    ver->add_option("--suite", suite, "geometry | fields | engines | all");
    ver->add_option("--seed", seed, "seed for randomized property cases");
    ver->add_option("--output", output_dir, "directory for the JSON report (optional)");

    auto* rep = app.add_subcommand("report", "summarize a run directory");
    rep->add_option("--input", output_dir, "run directory (with manifest.json)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(load_config(config_path, scenario, output_dir));
        if (run->parsed())
            return cmd_run(load_config(config_path, scenario, output_dir), threads,
                           snapshot_stride, resume_path);
        if (ver->parsed()) return cmd_verify(suite, seed, output_dir);
        if (rep->parsed()) return cmd_report(output_dir);
    } catch (const GenerationError& e) {
        std::fprintf(stderr, "generation infeasible: %s (achieved %.6g, required %.6g)\n",
                     e.what(), e.achieved, e.required);
        return 3;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
