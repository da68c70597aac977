#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "patchwind/core.hpp"
#include "patchwind/curve.hpp"
#include "patchwind/diagnostics.hpp"
#include "patchwind/fields.hpp"

namespace patchwind {

// ---------------------------------------------------------------------------
// Whole-plane contour dynamics.  For a unit-strength patch the Biot-Savart
// area integral reduces to a boundary integral of the log kernel,
//
//   u(x) = -(1/2pi) sum_segments tau * integral_segment ln|x-y| ds(y),
//
// with the counterclockwise tangent tau; each straight-segment integral has a
// closed form, so the velocity of the polygonal patch is exact up to
// rounding.  Summation order is fixed (component, then ascending segment) to
// keep runs bitwise reproducible.
// ---------------------------------------------------------------------------

enum class Quadrature { analytic_segment, gauss };

// Closed form of int_0^L ln|x - (a + s tau)| ds.  Valid for x anywhere,
// including on the segment (the integrable log endpoint limits are taken).
inline double segment_log_integral(Point2 x, Point2 a, Point2 b) {
    const Vec2 ab = b - a;
    const double L = ab.norm();
    if (L == 0.0) return 0.0;
    const Vec2 tau = ab / L;
    const Vec2 pa = x - a;
    const double s0 = dot(pa, tau);
    const double d = cross(tau, pa);  // signed normal offset of x from the line
    const double d2 = d * d;
    const auto F = [&](double t) {
        const double r2 = t * t + d2;
        double val = (r2 > 0.0) ? 0.5 * t * std::log(r2) - t : 0.0;
        if (d != 0.0) val += d * std::atan(t / d);
        return val;
    };
    return F(L - s0) - F(-s0);
}

namespace detail {

inline constexpr double kGaussX[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr double kGaussW[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

inline double segment_log_gauss(Point2 x, Point2 a, Point2 b) {
    const Vec2 ab = b - a;
    const double L = ab.norm();
    if (L == 0.0) return 0.0;
    // Near or on the segment the quadrature degrades; fall back to the exact
    // integral there (endpoint desingularization).
    const double dist = point_segment_distance(x, a, b);
    if (dist < 2.0 * L) return segment_log_integral(x, a, b);
    double acc = 0.0;
    for (int g = 0; g < 8; ++g) {
        const double s = 0.5 * (1.0 + kGaussX[g]) * L;
        acc += kGaussW[g] * std::log((x - (a + ab * (s / L))).norm());
    }
    return acc * 0.5 * L;
}

}  // namespace detail

inline Velocity2 cd_velocity(Point2 x, const PatchBoundary& boundary,
                             Quadrature quad = Quadrature::analytic_segment) {
    Vec2 acc{0.0, 0.0};
    for (const auto& comp : boundary.components) {
        const std::size_t nseg = comp.segment_count();
        for (std::size_t s = 0; s < nseg; ++s) {
            const Point2 a = comp.seg_a(s);
            const Point2 b = comp.seg_b(s);
            const Vec2 ab = b - a;
            const double L = ab.norm();
            if (L == 0.0) continue;
            const double I = (quad == Quadrature::analytic_segment)
                                 ? segment_log_integral(x, a, b)
                                 : detail::segment_log_gauss(x, a, b);
            acc += ab * (I / L);
        }
    }
    return acc * (-boundary.strength / kTwoPi);
}

// Batch evaluation, data-parallel over evaluation points.  Each point's
// segment sum runs sequentially in fixed order, so results are bitwise
// independent of the worker count.
inline void cd_velocities(std::span<const Point2> points, const PatchBoundary& boundary,
                          Quadrature quad, int threads, std::span<Velocity2> out) {
    const std::size_t n = points.size();
    if (threads <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) out[i] = cd_velocity(points[i], boundary, quad);
        return;
    }
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) out[i] = cd_velocity(points[i], boundary, quad);
        });
    }
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Time stepping
// ---------------------------------------------------------------------------

struct FreeRunConfig {
    double dt = 0.01;
    double t_end = 10.0;
    double h_min = 0.01;
    double h_max = 0.025;
    Quadrature quadrature = Quadrature::analytic_segment;
    int output_stride = 50;        // rows every this many steps
    std::size_t node_cap = 20000;  // halt (with partial results) beyond this
    int threads = 1;
    int gap_resolution = 0;  // per-row stability lattice over [-3,3]^2; 0 = skip
    bool check_self_intersection = false;

    void validate() const {
        if (!(dt > 0) || !(t_end > 0)) throw DomainError("FreeRunConfig: dt, t_end must be > 0");
        if (!(dt <= h_min))
            throw DomainError("FreeRunConfig: need dt <= h_min (|u| <= 1/2 for these patches)");
        if (!(h_min < 0.5 * h_max)) throw DomainError("FreeRunConfig: need h_min < h_max/2");
        const double steps = t_end / dt;
        if (std::abs(steps - std::round(steps)) > 1e-9)
            throw DomainError("FreeRunConfig: t_end/dt must be an integer");
        if (output_stride < 1) throw DomainError("FreeRunConfig: output_stride must be >= 1");
        if (threads < 1) throw DomainError("FreeRunConfig: threads must be >= 1");
    }
};

enum class HaltReason { completed, node_cap };

namespace detail {

struct FlatBoundary {
    std::vector<Point2> pos;
    std::vector<std::size_t> offsets;  // component start indices, plus total

    explicit FlatBoundary(const PatchBoundary& b) {
        offsets.push_back(0);
        for (const auto& c : b.components) {
            pos.insert(pos.end(), c.nodes.begin(), c.nodes.end());
            offsets.push_back(pos.size());
        }
    }
    void store_into(PatchBoundary& b, const std::vector<Point2>& p) const {
        for (std::size_t k = 0; k < b.components.size(); ++k) {
            auto& nd = b.components[k].nodes;
            std::copy(p.begin() + offsets[k], p.begin() + offsets[k + 1], nd.begin());
        }
    }
    PatchBoundary as_boundary(const PatchBoundary& proto, const std::vector<Point2>& p) const {
        PatchBoundary b = proto;
        store_into(b, p);
        return b;
    }
};

inline double angular_rate(Velocity2 u, Point2 x, Point2 center) {
    const Vec2 r = x - center;
    return dot(u, r.perp()) / r.norm2();
}

// One classical RK4 step over all marker nodes.  `eval` computes stage
// velocities from stage positions (the self-consistent patch field or a
// frozen one); `clamp` constrains stage and final positions to the domain.
// Kinematic ledgers accumulate the winding rate with the Simpson stage rule;
// geometric ledgers lift the final marker positions.
template <typename EvalFn, typename ClampFn>
void rk4_march(PatchState& state, double dt, const EvalFn& eval, const ClampFn& clamp) {
    FlatBoundary flat(state.boundary);
    const std::size_t n = flat.pos.size();
    std::vector<Point2> stage1(n), stage2(n), stage3(n);
    std::vector<Velocity2> k1(n), k2(n), k3(n), k4(n);

    eval(flat.pos, std::span<Velocity2>(k1));
    for (std::size_t i = 0; i < n; ++i) stage1[i] = clamp(flat.pos[i] + k1[i] * (0.5 * dt));
    eval(stage1, std::span<Velocity2>(k2));
    for (std::size_t i = 0; i < n; ++i) stage2[i] = clamp(flat.pos[i] + k2[i] * (0.5 * dt));
    eval(stage2, std::span<Velocity2>(k3));
    for (std::size_t i = 0; i < n; ++i) stage3[i] = clamp(flat.pos[i] + k3[i] * dt);
    eval(stage3, std::span<Velocity2>(k4));

    if (state.has_tracked) {
        const std::size_t base = flat.offsets[state.tracked.component];
        const auto accumulate = [&](WindingLedger& led, std::size_t node) {
            const std::size_t i = base + node;
            const double w1 = angular_rate(k1[i], flat.pos[i], led.center);
            const double w2 = angular_rate(k2[i], stage1[i], led.center);
            const double w3 = angular_rate(k3[i], stage2[i], led.center);
            const double w4 = angular_rate(k4[i], stage3[i], led.center);
            led.add_kinematic(dt / 6.0 * (w1 + 2.0 * w2 + 2.0 * w3 + w4));
        };
        accumulate(state.inner_ledger, state.tracked.inner_node);
        accumulate(state.outer_ledger, state.tracked.outer_node);
    }

    for (std::size_t i = 0; i < n; ++i)
        flat.pos[i] = clamp(flat.pos[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0));
    flat.store_into(state.boundary, flat.pos);
    state.t += dt;

    if (state.has_tracked) {
        state.inner_ledger.update_geometric(state.inner_marker());
        state.outer_ledger.update_geometric(state.outer_marker());
    }
}

}  // namespace detail

// One classical RK4 step; the velocity field is re-evaluated from the stage
// positions themselves (the patch moves with its own induced field).
inline void free_step(PatchState& state, const FreeRunConfig& cfg) {
    const detail::FlatBoundary proto(state.boundary);
    const auto eval = [&](const std::vector<Point2>& p, std::span<Velocity2> out) {
        const PatchBoundary b = proto.as_boundary(state.boundary, p);
        cd_velocities(p, b, cfg.quadrature, cfg.threads, out);
    };
    detail::rk4_march(state, cfg.dt, eval, [](Point2 p) { return p; });
    maintain_boundary(state, cfg.h_min, cfg.h_max);
}

struct FreeRunResult {
    PatchState final_state;
    std::vector<DiagnosticsRow> rows;
    std::vector<double> radial_sup;  // sup |u_rad| over the gap lattice, per row
    HaltReason halt = HaltReason::completed;
    std::vector<std::string> warnings;
    double max_area_drift = 0.0;  // relative to area at t = 0
};

using RowSink = std::function<void(const PatchState&, const DiagnosticsRow&)>;

// Drives free_step from t to t_end, emitting diagnostics every output_stride
// steps (plus the initial and final states).  Deterministic for a given
// config: fixed summation order, no randomness.
inline FreeRunResult run_free(const FreeRunConfig& cfg, PatchState state,
                              const ContainmentSpec& contain, const RowSink& sink = {}) {
    cfg.validate();
    FreeRunResult result;
    state.area0 = patch_area(state.boundary);
    if (state.has_tracked) state.arc_winding0 = tracked_arc_winding(state);

    // Stability lattice over [-3,3]^2 (cell centers), row-major.
    std::vector<Point2> lattice;
    if (cfg.gap_resolution > 0) {
        lattice.reserve(static_cast<std::size_t>(cfg.gap_resolution) * cfg.gap_resolution);
        const double dx = 6.0 / cfg.gap_resolution;
        for (int j = 0; j < cfg.gap_resolution; ++j)
            for (int i = 0; i < cfg.gap_resolution; ++i)
                lattice.push_back({-3.0 + (i + 0.5) * dx, -3.0 + (j + 0.5) * dx});
    }
    std::vector<Velocity2> lattice_u(lattice.size());

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
        if (!lattice.empty()) {
            cd_velocities(lattice, s.boundary, cfg.quadrature, cfg.threads, lattice_u);
            double gap = 0.0, rad = 0.0;
            for (std::size_t i = 0; i < lattice.size(); ++i) {
                gap = std::max(gap, (lattice_u[i] - disk_velocity(lattice[i])).norm());
                rad = std::max(rad, std::abs(radial_component(lattice_u[i], lattice[i])));
            }
            row.stability_gap = gap;
            result.radial_sup.push_back(rad);
        }
        if (s.area0 != 0.0)
            result.max_area_drift =
                std::max(result.max_area_drift, std::abs(row.area - s.area0) / std::abs(s.area0));
        result.rows.push_back(row);
        if (sink) sink(s, row);
    };

    const long total_steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
    emit(state);
    for (long step = 1; step <= total_steps; ++step) {
        free_step(state, cfg);
        std::size_t nodes = 0;
        for (const auto& c : state.boundary.components) nodes += c.nodes.size();
        if (nodes > cfg.node_cap) {
            result.warnings.push_back("node cap exceeded at t = " + std::to_string(state.t));
            result.halt = HaltReason::node_cap;
            emit(state);
            break;
        }
        if (step % cfg.output_stride == 0 || step == total_steps) {
            if (cfg.check_self_intersection) {
                for (const auto& c : state.boundary.components)
                    if (!curve_is_simple(c)) {
                        result.warnings.push_back("self-intersection at t = " +
                                                  std::to_string(state.t));
                        break;
                    }
            }
            emit(state);
        }
    }
    result.final_state = std::move(state);
    return result;
}

}  // namespace patchwind
