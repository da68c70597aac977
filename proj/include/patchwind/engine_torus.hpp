#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "patchwind/core.hpp"
#include "patchwind/curve.hpp"
#include "patchwind/diagnostics.hpp"
#include "patchwind/engine_free.hpp"  // RowSink, HaltReason, FlatBoundary
#include "patchwind/fields.hpp"
#include "patchwind/grid.hpp"

namespace patchwind {

// ---------------------------------------------------------------------------
// Torus evolution with odd symmetry: markers carry the patch; each stage the
// indicator is re-rasterized onto the grid, the Dirichlet Poisson problem is
// solved by the odd-odd sine transform, and marker velocities are read off
// the stream interpolant.
//
// With bicubic interpolation the marker velocity is the analytic grad^perp of
// the C1 stream interpolant, so the advecting field is exactly divergence-
// free and the walls of [0,pi]^2 are exact streamlines; area drift then comes
// only from time stepping and node maintenance.
// ---------------------------------------------------------------------------

enum class TorusInterp { bilinear, bicubic };

struct TorusRunConfig {
    double dt = 0.005;
    double t_end = 30.0;
    int n = 512;
    double h_min = 0.004;
    double h_max = 0.012;
    TorusInterp interp = TorusInterp::bicubic;
    int output_stride = 100;
    std::size_t node_cap = 20000;
    SpectralTruncation trunc{399};  // reference-field truncation
    bool compute_gap = true;        // per-row sup |u(t) - u_BC| on the grid

    void validate() const {
        if (!(dt > 0) || !(t_end > 0)) throw DomainError("TorusRunConfig: dt, t_end must be > 0");
        if (n < 16) throw DomainError("TorusRunConfig: n too small");
        if (!(h_min > 0 && h_min < 0.5 * h_max))
            throw DomainError("TorusRunConfig: need 0 < h_min < h_max/2");
        const double steps = t_end / dt;
        if (std::abs(steps - std::round(steps)) > 1e-9)
            throw DomainError("TorusRunConfig: t_end/dt must be an integer");
        if (output_stride < 1) throw DomainError("TorusRunConfig: output_stride must be >= 1");
    }
};

// ---------------------------------------------------------------------------
// Rasterization: cell-averaged indicator on the interior nodes, scanline
// with four sample rows per cell and exact interval coverage along x1.
// Material within half a cell of a wall cancels against its odd image and is
// dropped.  Exact 0/1 away from the boundary band.
// ---------------------------------------------------------------------------

inline GridField rasterize(const PatchBoundary& boundary, int n) {
    for (const auto& c : boundary.components)
        for (const auto& p : c.nodes)
            if (!(p.x1 > 0.0 && p.x1 < kPi && p.x2 > 0.0 && p.x2 < kPi))
                throw DomainError("rasterize: boundary leaves (0,pi)^2");
    GridField w(n, GridField::Kind::vorticity);
    const double h = w.h();
    static constexpr double kRowOffset[4] = {-0.375, -0.125, 0.125, 0.375};
    std::vector<double> xs;
    for (int j = 1; j < n; ++j) {
        for (double off : kRowOffset) {
            const double y = (j + off) * h;
            horizontal_crossings(boundary, y, xs);
            for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
                double xa = std::max(xs[k], 0.5 * h);
                double xb = std::min(xs[k + 1], kPi - 0.5 * h);
                if (xb <= xa) continue;
                int i_first = std::max(1, static_cast<int>(std::floor(xa / h + 0.5)));
                int i_last = std::min(n - 1, static_cast<int>(std::floor(xb / h + 0.5)));
                for (int i = i_first; i <= i_last; ++i) {
                    const double c_lo = (i - 0.5) * h, c_hi = (i + 0.5) * h;
                    const double overlap = std::min(xb, c_hi) - std::max(xa, c_lo);
                    if (overlap > 0.0) w.at(i, j) += overlap / (4.0 * h);
                }
            }
        }
    }
    // Fully covered and fully empty cells are exact 0/1; strip the rounding
    // dust the overlap sums leave behind.
    for (double& v : w.v) {
        if (std::abs(v - 1.0) < 1e-9) v = 1.0;
        else if (std::abs(v) < 1e-9) v = 0.0;
    }
    return w;
}

// ---------------------------------------------------------------------------
// Velocity sampling from the stream grid
// ---------------------------------------------------------------------------

inline Velocity2 stream_velocity_bicubic(const GridField& psi, Point2 p) {
    const SampledValue s = bicubic_sample(psi, p);
    return {-s.gradient.x2, s.gradient.x1};
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

struct TorusRunResult {
    PatchState final_state;
    std::vector<DiagnosticsRow> rows;
    HaltReason halt = HaltReason::completed;
    std::vector<std::string> warnings;
    double max_area_drift = 0.0;       // marker-polygon area, relative
    double max_grid_area_drift = 0.0;  // rasterized integral, relative
    double dt_final = 0.0;             // after any CFL halvings
};

class TorusEngine {
public:
    explicit TorusEngine(const TorusRunConfig& cfg) : cfg_(cfg), solver_(cfg.n) {
        cfg_.validate();
    }

    const TorusRunConfig& config() const { return cfg_; }

    // Reference Bahouri-Chemin grids (vorticity = 1 on the open quarter-cell).
    const GridField& bc_reference_u1() {
        ensure_reference();
        return ref_u1_;
    }
    const GridField& bc_reference_u2() {
        ensure_reference();
        return ref_u2_;
    }

    // One RK4 step with a fresh rasterize + solve per stage.  Returns the max
    // marker speed seen at the first stage (CFL bookkeeping).
    double step(PatchState& state) {
        const double dt = dt_current_ > 0 ? dt_current_ : cfg_.dt;
        double vmax = 0.0;
        bool first = true;
        const auto eval = [&](const std::vector<Point2>& p, std::span<Velocity2> out) {
            const double v = eval_stage(state, p, out);
            if (first) {
                vmax = v;
                first = false;
            }
        };
        detail::rk4_march(state, dt, eval, [&](Point2 p) { return clamp_point(p, state); });
        maintain_boundary(state, cfg_.h_min, cfg_.h_max);
        return vmax;
    }

    // Velocity grids of the current boundary (diagnostics use).
    std::pair<GridField, GridField> velocity_grids(const PatchBoundary& b) {
        return solver_.velocity_from_vorticity(rasterize(b, cfg_.n));
    }

    TorusRunResult run(PatchState state, const ContainmentSpec& contain,
                       const RowSink& sink = {}) {
        TorusRunResult result;
        state.area0 = patch_area(state.boundary);
        if (state.has_tracked) state.arc_winding0 = tracked_arc_winding(state);
        dt_current_ = cfg_.dt;
        double grid_area0 = -1.0;

        const auto emit = [&](PatchState& s) {
            DiagnosticsRow row;
            row.t = s.t;
            row.perimeter = patch_perimeter(s.boundary);
            row.area = patch_area(s.boundary);
            std::size_t nodes = 0;
            for (const auto& c : s.boundary.components) nodes += c.nodes.size();
            row.node_count = nodes;
            if (s.has_tracked) {
                row.turns_inner = s.inner_ledger.turns();
                row.turns_outer = s.outer_ledger.turns();
                const ContainmentFlags f = containment_check(s, contain);
                row.contain_inner = f.inner;
                row.contain_outer = f.outer;
                row.contain_arc = f.arc;
            }
            if (cfg_.compute_gap) {
                ensure_reference();
                auto [u1, u2] = velocity_grids(s.boundary);
                double gap = 0.0;
                for (std::size_t i = 0; i < u1.v.size(); ++i) {
                    const double d1 = u1.v[i] - ref_u1_.v[i];
                    const double d2 = u2.v[i] - ref_u2_.v[i];
                    gap = std::max(gap, std::hypot(d1, d2));
                }
                row.stability_gap = gap;
                const double ga = rasterize(s.boundary, cfg_.n).integral();
                if (grid_area0 < 0.0) grid_area0 = ga;
                else if (grid_area0 > 0.0)
                    result.max_grid_area_drift = std::max(
                        result.max_grid_area_drift, std::abs(ga - grid_area0) / grid_area0);
            }
            if (s.area0 != 0.0)
                result.max_area_drift = std::max(
                    result.max_area_drift, std::abs(row.area - s.area0) / std::abs(s.area0));
            result.rows.push_back(row);
            if (sink) sink(s, row);
        };

        emit(state);
        const double h = kPi / cfg_.n;
        const double t_emit_stride = cfg_.output_stride * cfg_.dt;
        // t_end is a duration: resumed runs continue from the snapshot time
        // on the same absolute emission grid.
        const double t_final = state.t + cfg_.t_end;
        double next_emit = state.t + t_emit_stride;
        // CFL guard: halve dt (for the rest of the run) if a marker would
        // cross more than one cell per step.  After the initial probe the
        // max speed from each step's first stage is reused.
        double vmax = probe_vmax(state);
        while (state.t < t_final - 1e-12) {
            while (dt_current_ * vmax > h && dt_current_ > cfg_.dt / 64.0) {
                dt_current_ *= 0.5;
                result.warnings.push_back("CFL: dt halved to " + std::to_string(dt_current_) +
                                          " at t = " + std::to_string(state.t));
            }
            vmax = step(state);
            std::size_t nodes = 0;
            for (const auto& c : state.boundary.components) nodes += c.nodes.size();
            if (nodes > cfg_.node_cap) {
                result.warnings.push_back("node cap exceeded at t = " + std::to_string(state.t));
                result.halt = HaltReason::node_cap;
                emit(state);
                break;
            }
            if (state.t >= next_emit - 1e-12 || state.t >= t_final - 1e-12) {
                emit(state);
                next_emit += t_emit_stride;
            }
        }
        result.dt_final = dt_current_;
        result.final_state = std::move(state);
        return result;
    }

    // Advect markers in a frozen stream grid (no patch feedback).  Used for
    // the Bahouri-Chemin proposition and for single-marker probes.
    void advect_in_frozen(PatchState& state, const GridField& psi, double dt) {
        const auto eval = [&](const std::vector<Point2>& p, std::span<Velocity2> out) {
            for (std::size_t i = 0; i < p.size(); ++i) out[i] = stream_velocity_bicubic(psi, p[i]);
        };
        detail::rk4_march(state, dt, eval, [&](Point2 p) { return clamp_point(p, state); });
        maintain_boundary(state, cfg_.h_min, cfg_.h_max);
    }

private:
    void ensure_reference() {
        if (have_ref_) return;
        GridField ones(cfg_.n, GridField::Kind::vorticity);
        for (int j = 1; j < cfg_.n; ++j)
            for (int i = 1; i < cfg_.n; ++i) ones.at(i, j) = 1.0;
        auto uv = solver_.velocity_from_vorticity(ones);
        ref_u1_ = std::move(uv.first);
        ref_u2_ = std::move(uv.second);
        have_ref_ = true;
    }

    Point2 clamp_point(Point2 p, PatchState& state) {
        // The axes are invariant streamlines (the stream interpolant vanishes
        // on them), so leaving the closed quarter-cell is a numerical
        // symmetry violation: clamp and flag.  Points exactly on a wall stay
        // on it, corners are exact stagnation points of the interpolant.
        Point2 q{std::clamp(p.x1, 0.0, kPi), std::clamp(p.x2, 0.0, kPi)};
        if (q.x1 != p.x1 || q.x2 != p.x2) state.symmetry_clamped = true;
        return q;
    }

    // Stage velocities from a fresh rasterize + stream solve at the given
    // positions; returns the max marker speed.
    double eval_stage(PatchState& proto, const std::vector<Point2>& pos,
                      std::span<Velocity2> out) {
        detail::FlatBoundary flat(proto.boundary);
        const PatchBoundary b = flat.as_boundary(proto.boundary, pos);
        const GridField w = rasterize(b, cfg_.n);
        psi_ = solver_.solve_stream(w);
        double vmax = 0.0;
        if (cfg_.interp == TorusInterp::bicubic) {
            for (std::size_t i = 0; i < pos.size(); ++i) {
                out[i] = stream_velocity_bicubic(psi_, pos[i]);
                vmax = std::max(vmax, out[i].norm());
            }
        } else {
            auto [u1, u2] = solver_.velocity_from_vorticity(w);
            for (std::size_t i = 0; i < pos.size(); ++i) {
                out[i] = {bilinear_sample(u1, pos[i]), bilinear_sample(u2, pos[i])};
                vmax = std::max(vmax, out[i].norm());
            }
        }
        return vmax;
    }

    double probe_vmax(PatchState& state) {
        detail::FlatBoundary flat(state.boundary);
        std::vector<Velocity2> u(flat.pos.size());
        return eval_stage(state, flat.pos, u);
    }

    TorusRunConfig cfg_;
    DirichletSpectral solver_;
    GridField psi_;
    GridField ref_u1_, ref_u2_;
    bool have_ref_ = false;
    double dt_current_ = 0.0;
};

// One-shot conveniences (solve_velocity lives in grid.hpp).
inline double step_torus(PatchState& state, TorusEngine& engine) { return engine.step(state); }

inline TorusRunResult run_torus(const TorusRunConfig& cfg, PatchState initial,
                                const ContainmentSpec& contain, const RowSink& sink = {}) {
    TorusEngine engine(cfg);
    return engine.run(std::move(initial), contain, sink);
}

// ---------------------------------------------------------------------------
// Passive advection of a material curve in the frozen Bahouri-Chemin field
// (Proposition-style runs).  The stream grid is the truncated series
// evaluated on the solver grid; marker velocities are its bicubic grad-perp.
// ---------------------------------------------------------------------------

struct BcRunResult {
    PatchState final_state;
    std::vector<DiagnosticsRow> rows;
    std::vector<std::string> warnings;
    double measured_period = 0.0;  // first full turn of the inner marker
};

inline GridField bc_stream_field(int n, const SpectralTruncation& trunc = {}) {
    GridField psi(n, GridField::Kind::stream);
    psi.v = bc_stream_grid(n, trunc);
    return psi;
}

inline BcRunResult run_bc_curve(const TorusRunConfig& cfg, PatchState state,
                                const ContainmentSpec& contain, const RowSink& sink = {}) {
    cfg.validate();
    TorusEngine engine(cfg);
    const GridField psi = bc_stream_field(cfg.n, cfg.trunc);
    BcRunResult result;
    if (state.has_tracked) state.arc_winding0 = tracked_arc_winding(state);

    const auto emit = [&](PatchState& s) {
        DiagnosticsRow row;
        row.t = s.t;
        row.perimeter = patch_perimeter(s.boundary);
        row.area = 0.0;  // material line, not a patch
        std::size_t nodes = 0;
        for (const auto& c : s.boundary.components) nodes += c.nodes.size();
        row.node_count = nodes;
        if (s.has_tracked) {
            row.turns_inner = s.inner_ledger.turns();
            row.turns_outer = s.outer_ledger.turns();
            const ContainmentFlags f = containment_check(s, contain);
            row.contain_inner = f.inner;
            row.contain_outer = f.outer;
            row.contain_arc = f.arc;
        }
        result.rows.push_back(row);
        if (sink) sink(s, row);
    };

    const long total_steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
    emit(state);
    for (long step = 1; step <= total_steps; ++step) {
        engine.advect_in_frozen(state, psi, cfg.dt);
        if (result.measured_period == 0.0 && state.has_tracked &&
            state.inner_ledger.turns() >= 1.0)
            result.measured_period = state.t;
        std::size_t nodes = 0;
        for (const auto& c : state.boundary.components) nodes += c.nodes.size();
        if (nodes > cfg.node_cap) {
            result.warnings.push_back("node cap exceeded at t = " + std::to_string(state.t));
            emit(state);
            break;
        }
        if (step % cfg.output_stride == 0 || step == total_steps) emit(state);
    }
    result.final_state = std::move(state);
    return result;
}

// Period of a single passive marker about `center` in a frozen stream grid.
inline double measure_period(const GridField& psi, Point2 start, Point2 center, double dt,
                             double t_max = 100.0) {
    Point2 p = start;
    AngleLift lift(center, p);
    const double a0 = lift.lifted_angle;
    double t = 0.0;
    while (std::abs(lift.lifted_angle - a0) < kTwoPi && t < t_max) {
        const Velocity2 k1 = stream_velocity_bicubic(psi, p);
        const Velocity2 k2 = stream_velocity_bicubic(psi, p + k1 * (0.5 * dt));
        const Velocity2 k3 = stream_velocity_bicubic(psi, p + k2 * (0.5 * dt));
        const Velocity2 k4 = stream_velocity_bicubic(psi, p + k3 * dt);
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        lift.update(p);
        t += dt;
    }
    return t;
}

}  // namespace patchwind
