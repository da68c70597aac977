#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "patchwind/core.hpp"
#include "patchwind/curve.hpp"

namespace patchwind {

// ---------------------------------------------------------------------------
// Winding ledgers: continuously lifted angle of one tracked marker about a
// fixed center.  Two independent books are kept:
//   * geometric: shortest-arc lifting of the marker positions (exact for the
//     discrete trajectory while per-step rotations stay below pi);
//   * kinematic: the time integral of u.(x-c)^perp/|x-c|^2 accumulated with
//     the RK4 stage quadrature.
// Their agreement is the winding-increment identity the growth argument
// rests on, so both are kept for the life of a run.
// ---------------------------------------------------------------------------

struct WindingLedger {
    Point2 center;
    double initial_angle = 0.0;
    AngleLift lift;
    double kinematic_angle = 0.0;

    WindingLedger() = default;
    WindingLedger(Point2 c, Point2 marker) : center(c), lift(c, marker) {
        initial_angle = lift.lifted_angle;
    }

    double lifted_angle() const { return lift.lifted_angle; }
    double turns() const { return (lift.lifted_angle - initial_angle) / kTwoPi; }
    double kinematic_turns() const { return kinematic_angle / kTwoPi; }

    void update_geometric(Point2 marker) { lift.update(marker); }
    void add_kinematic(double dtheta) { kinematic_angle += dtheta; }
};

// Per-step angular increment dt * u.(marker-center)^perp / |marker-center|^2.
inline double winding_increment(Velocity2 u_at_marker, Point2 marker, Point2 center,
                                double dt) {
    const Vec2 r = marker - center;
    const double r2 = r.norm2();
    if (r2 == 0.0) throw SingularKernelError("winding_increment: marker equals center");
    return dt * dot(u_at_marker, r.perp()) / r2;
}

// ---------------------------------------------------------------------------
// Tracked markers and run state
// ---------------------------------------------------------------------------

// gamma is the node range [arc_begin, arc_end] (forward traversal) on one
// boundary component; inner/outer are its endpoints, the two trajectory
// trackers (x_c* and x_o* on the torus, x_1 and x_2 in the plane).
struct TrackedArc {
    std::size_t component = 0;
    std::size_t inner_node = 0;
    std::size_t outer_node = 0;
    std::size_t arc_begin = 0;
    std::size_t arc_end = 0;
};

struct PatchState {
    double t = 0.0;
    PatchBoundary boundary;
    bool has_tracked = false;
    TrackedArc tracked;
    WindingLedger inner_ledger;
    WindingLedger outer_ledger;
    double area0 = 0.0;         // area at t = 0, for drift diagnostics
    double arc_winding0 = 0.0;  // N_center[gamma] at t = 0
    bool symmetry_clamped = false;

    Point2 inner_marker() const {
        return boundary.components[tracked.component].nodes[tracked.inner_node];
    }
    Point2 outer_marker() const {
        return boundary.components[tracked.component].nodes[tracked.outer_node];
    }
};

// Node maintenance for a full state: refine every component, protect the
// tracked nodes, and remap the tracked indices through the survivor map.
inline void maintain_boundary(PatchState& state, double h_min, double h_max) {
    for (std::size_t k = 0; k < state.boundary.components.size(); ++k) {
        std::vector<std::size_t> keep;
        if (state.has_tracked && k == state.tracked.component)
            keep = {state.tracked.inner_node, state.tracked.outer_node, state.tracked.arc_begin,
                    state.tracked.arc_end};
        RefineResult r = refine_and_redistribute(state.boundary.components[k], h_min, h_max, keep);
        if (state.has_tracked && k == state.tracked.component) {
            state.tracked.inner_node = static_cast<std::size_t>(r.index_map[state.tracked.inner_node]);
            state.tracked.outer_node = static_cast<std::size_t>(r.index_map[state.tracked.outer_node]);
            state.tracked.arc_begin = static_cast<std::size_t>(r.index_map[state.tracked.arc_begin]);
            state.tracked.arc_end = static_cast<std::size_t>(r.index_map[state.tracked.arc_end]);
        }
        state.boundary.components[k] = std::move(r.curve);
    }
}

// Winding number of the tracked arc about the ledgers' center.
inline double tracked_arc_winding(const PatchState& state) {
    if (!state.has_tracked) throw DomainError("tracked_arc_winding: no tracked arc");
    const auto& c = state.boundary.components[state.tracked.component];
    const std::size_t n = c.nodes.size();
    std::size_t i = state.tracked.arc_begin;
    AngleLift lift(state.inner_ledger.center, c.nodes[i]);
    const double start = lift.lifted_angle;
    while (i != state.tracked.arc_end) {
        i = (i + 1) % n;
        lift.update(c.nodes[i]);
    }
    return (lift.lifted_angle - start) / kTwoPi;
}

// ---------------------------------------------------------------------------
// Diagnostics rows (one CSV line per output stride)
// ---------------------------------------------------------------------------

struct DiagnosticsRow {
    double t = 0.0;
    double perimeter = 0.0;
    double area = 0.0;
    double turns_inner = 0.0;
    double turns_outer = 0.0;
    double stability_gap = 0.0;
    bool contain_inner = true;
    bool contain_outer = true;
    bool contain_arc = true;
    std::size_t node_count = 0;
};

// ---------------------------------------------------------------------------
// Containment checks
// ---------------------------------------------------------------------------

enum class ContainmentMode {
    torus_annulus,  // inner in the [d/2, 3d/2] annulus about x_c, outer in B(x_o, d),
                    // arc outside B(x_c, d/2)
    bc_annulus,     // frozen-field variant: inner in [d/4, d], arc outside B(x_c, d/4)
    plane_rings,    // |inner| in [3/4, 5/4], |outer| in [7/4, 9/4], arc outside B(0, 3/4)
};

struct ContainmentSpec {
    ContainmentMode mode = ContainmentMode::torus_annulus;
    double delta = 0.25;
};

struct ContainmentFlags {
    bool inner = true;
    bool outer = true;
    bool arc = true;
    bool all() const { return inner && outer && arc; }
};

inline ContainmentFlags containment_check(const PatchState& state, const ContainmentSpec& spec) {
    if (!state.has_tracked) throw DomainError("containment_check: no tracked markers");
    ContainmentFlags f;
    const auto& c = state.boundary.components[state.tracked.component];
    const std::size_t n = c.nodes.size();
    const double d = spec.delta;

    const auto arc_clear_of = [&](Point2 center, double radius) {
        std::size_t i = state.tracked.arc_begin;
        for (;;) {
            if ((c.nodes[i] - center).norm() < radius) return false;
            if (i == state.tracked.arc_end) break;
            i = (i + 1) % n;
        }
        return true;
    };

    switch (spec.mode) {
        case ContainmentMode::torus_annulus: {
            const double ri = (state.inner_marker() - kSquareCenter).norm();
            f.inner = (ri >= 0.5 * d) && (ri <= 1.5 * d);
            f.outer = (state.outer_marker() - kOrigin).norm() <= d;
            f.arc = arc_clear_of(kSquareCenter, 0.5 * d);
            break;
        }
        case ContainmentMode::bc_annulus: {
            const double ri = (state.inner_marker() - kSquareCenter).norm();
            f.inner = (ri >= 0.25 * d) && (ri <= d);
            f.outer = (state.outer_marker() - kOrigin).norm() <= d;
            f.arc = arc_clear_of(kSquareCenter, 0.25 * d);
            break;
        }
        case ContainmentMode::plane_rings: {
            const double ri = state.inner_marker().norm();
            const double ro = state.outer_marker().norm();
            f.inner = (ri >= 0.75) && (ri <= 1.25);
            f.outer = (ro >= 1.75) && (ro <= 2.25);
            f.arc = arc_clear_of(kOrigin, 0.75);
            break;
        }
    }
    return f;
}

// Exclusion radius gating the perimeter-winding chain for each mode.
inline double exclusion_radius(const ContainmentSpec& spec) {
    switch (spec.mode) {
        case ContainmentMode::torus_annulus: return 0.5 * spec.delta;
        case ContainmentMode::bc_annulus: return 0.25 * spec.delta;
        case ContainmentMode::plane_rings: return 0.75;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Slope fits and stability gaps
// ---------------------------------------------------------------------------

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

inline SlopeFit slope_fit(std::span<const std::pair<double, double>> series) {
    if (series.size() < 10)
        throw InsufficientDataError("slope_fit: need at least 10 samples");
    const double n = static_cast<double>(series.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (const auto& [t, y] : series) {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double denom = n * stt - st * st;
    if (denom == 0.0) throw InsufficientDataError("slope_fit: degenerate abscissae");
    SlopeFit fit;
    fit.slope = (n * sty - st * sy) / denom;
    fit.intercept = (sy - fit.slope * st) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (const auto& [t, y] : series) {
        const double e = y - (fit.slope * t + fit.intercept);
        ss_res += e * e;
        ss_tot += (y - ybar) * (y - ybar);
    }
    fit.r2 = (ss_tot == 0.0) ? 1.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

// Drops the leading transient (default: first 10% of the time span) before
// fitting; both theorems give max(constant, linear) bounds, so early times
// are slope-flat.
inline SlopeFit slope_fit_after_transient(std::span<const std::pair<double, double>> series,
                                          double transient_fraction = 0.1) {
    if (series.empty()) throw InsufficientDataError("slope_fit: empty series");
    const double t0 = series.front().first;
    const double t1 = series.back().first;
    // Small slack so accumulated time stamps sitting on the cutoff survive.
    const double cut = t0 + transient_fraction * (t1 - t0) - 1e-9 * std::max(1.0, std::abs(t1));
    std::vector<std::pair<double, double>> tail;
    for (const auto& p : series)
        if (p.first >= cut) tail.push_back(p);
    return slope_fit(tail);
}

// Max over a common sample set of |u - u_ref| (sup over samples, not a true
// L-infinity norm).
inline double stability_gap(std::span<const Point2> samples,
                            const std::function<Velocity2(Point2)>& u,
                            const std::function<Velocity2(Point2)>& u_ref) {
    double gap = 0.0;
    for (const Point2& p : samples) gap = std::max(gap, (u(p) - u_ref(p)).norm());
    return gap;
}

}  // namespace patchwind
