#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "patchwind/core.hpp"
#include "patchwind/curve.hpp"
#include "patchwind/diagnostics.hpp"

namespace patchwind {

// ---------------------------------------------------------------------------
// Initial-patch generators.
//
// Torus case: the square [margin, pi-margin]^2 with rounded corners, minus a
// thin straight slit running along the diagonal from the corner arc nearest
// x_o to a semicircular cap just outside B(x_c, delta).  The slit walls form
// the tracked arc gamma from B(x_o, epsilon_tilde) to B(x_c, delta).
//
// Plane case: the unit disk with a thin radial finger along the positive
// x1-axis reaching radius 2 + corner_rounding; gamma runs along the lower
// finger wall from {|x|=1} to {|x|=2}.
//
// A straight slit/finger with a semicircular cap is the simplest geometry
// meeting the area budgets while keeping the boundary simple.
// ---------------------------------------------------------------------------

struct GeneratorParams {
    double epsilon = 0.3;          // area-deficit scale
    double delta = 0.25;           // core exclusion radius about x_c
    double epsilon_tilde = 0.05;   // corner ball radius for the gamma endpoint
    double stick_width = 0.0066;
    double corner_rounding = 0.048;
    double margin = 0.0055;
    double plane_budget_c1 = 1e-2;  // c1 in area(Omega ^ D) <= c1 eps^4
    // Node spacing band the emitted polyline is built for.
    double h_min = 0.004;
    double h_max = 0.012;

    void validate() const {
        if (!(epsilon > 0)) throw DomainError("GeneratorParams: epsilon must be > 0");
        if (!(delta > 0 && delta <= 0.25))
            throw DomainError("GeneratorParams: delta must be in (0, 1/4]");
        if (!(epsilon_tilde > 0 && epsilon_tilde < delta))
            throw DomainError("GeneratorParams: need 0 < epsilon_tilde < delta");
        if (!(stick_width > 0)) throw DomainError("GeneratorParams: stick_width must be > 0");
        if (!(corner_rounding > 0.5 * stick_width))
            throw DomainError("GeneratorParams: corner_rounding must exceed stick_width/2");
        if (!(margin > 0)) throw DomainError("GeneratorParams: margin must be > 0");
        if (!(h_min > 0 && h_min < 0.5 * h_max))
            throw DomainError("GeneratorParams: need 0 < h_min < h_max/2");
    }
};

struct GenerationReport {
    double area_deficit = 0.0;  // torus: area([0,pi]^2 \ Omega); plane: area(Omega ^ D)
    double budget = 0.0;
    double perimeter = 0.0;
    double gamma_outer_dist = 0.0;  // |gamma(0) - x_o| (torus) / |r(gamma end) - 2| (plane)
    double gamma_inner_dist = 0.0;  // |gamma(1) - x_c| (torus) / |r(gamma begin) - 1| (plane)
    double arc_winding = 0.0;       // N_center[gamma]
    bool simple = false;
    double stick_rect_area = 0.0;   // analytic width x length oracle
    Point2 stick_probe;             // a point inside the removed slit (torus)
                                    // or inside the finger (plane)
};

struct GeneratedPatch {
    PatchBoundary boundary;
    TrackedArc tracked;
    GenerationReport report;
};

namespace detail {

// All emitters append the start point and interior points, never the end
// point; consecutive pieces share nodes without duplication.
inline void emit_line(std::vector<Point2>& out, Point2 a, Point2 b, double h) {
    const double len = (b - a).norm();
    const int steps = std::max(1, static_cast<int>(std::ceil(len / h)));
    for (int i = 0; i < steps; ++i)
        out.push_back(a + (b - a) * (static_cast<double>(i) / steps));
}

inline void emit_arc(std::vector<Point2>& out, Point2 center, double radius, double a0,
                     double a1, double h) {
    const double span = a1 - a0;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) * radius / h)));
    for (int i = 0; i < steps; ++i) {
        const double th = a0 + span * (static_cast<double>(i) / steps);
        out.push_back(center + Vec2{radius * std::cos(th), radius * std::sin(th)});
    }
}

}  // namespace detail

inline GeneratedPatch gen_torus_patch(const GeneratorParams& p) {
    p.validate();
    const double m = p.margin, rc = p.corner_rounding, w = p.stick_width;
    const double h = 0.8 * p.h_max;

    const Vec2 diag{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    const Vec2 perp = diag.perp();
    const double s_corner = std::sqrt(2.0) * (m + rc);           // corner-arc center
    const double q = std::sqrt(rc * rc - 0.25 * w * w);
    const double s_open = s_corner - q;                          // slit opening
    const double delta_apex = 0.995 * p.delta;
    const double s_center = kSquareCenter.norm();                // |x_c| = pi/sqrt(2)
    const double s_cap = s_center - (delta_apex + 0.5 * w);
    const double wall_len = s_cap - s_open;
    if (wall_len <= w)
        throw GenerationError("gen_torus_patch: slit geometry degenerate", wall_len, w);

    // Feasibility estimate before building anything.
    const double budget = p.epsilon * p.epsilon;
    const double frame = kPi * kPi - (kPi - 2 * m) * (kPi - 2 * m);
    const double corners = 4.0 * rc * rc * (1.0 - kPi / 4.0);
    const double slit = w * wall_len + 0.5 * kPi * 0.25 * w * w;
    const double estimate = frame + corners + slit;
    if (estimate > budget)
        throw GenerationError(
            "gen_torus_patch: estimated deficit " + std::to_string(estimate) +
                " exceeds budget " + std::to_string(budget) +
                " (margin/corner_rounding/stick_width too large)",
            estimate, budget);

    const Point2 corner_ctr{m + rc, m + rc};
    const Point2 j_in = diag * s_open + perp * (0.5 * w);   // met first sweeping 180->270
    const Point2 j_out = diag * s_open - perp * (0.5 * w);
    const double ang_in = std::atan2(j_in.x2 - corner_ctr.x2, j_in.x1 - corner_ctr.x1);
    const double ang_out = std::atan2(j_out.x2 - corner_ctr.x2, j_out.x1 - corner_ctr.x1);
    const Point2 cap_ctr = diag * s_cap;
    const Point2 apex = diag * (s_cap + 0.5 * w);

    MarkedCurve c;
    c.closed = true;
    c.orientation = +1;
    auto& nodes = c.nodes;
    const double lo = m, hi = kPi - m;

    detail::emit_line(nodes, {lo + rc, lo}, {hi - rc, lo}, h);
    detail::emit_arc(nodes, {hi - rc, lo + rc}, rc, -kPi / 2, 0.0, h);
    detail::emit_line(nodes, {hi, lo + rc}, {hi, hi - rc}, h);
    detail::emit_arc(nodes, {hi - rc, hi - rc}, rc, 0.0, kPi / 2, h);
    detail::emit_line(nodes, {hi - rc, hi}, {lo + rc, hi}, h);
    detail::emit_arc(nodes, {lo + rc, hi - rc}, rc, kPi / 2, kPi, h);
    detail::emit_line(nodes, {lo, hi - rc}, {lo, lo + rc}, h);
    // Corner arc up to the slit opening (angles measured about corner_ctr;
    // the 180-degree point is (lo, lo+rc)).
    detail::emit_arc(nodes, corner_ctr, rc, kPi, ang_in + kTwoPi * (ang_in < kPi ? 1 : 0), h);

    // Into the slit: wall A from the opening toward the cap.
    const std::size_t gamma_begin = nodes.size();
    detail::emit_line(nodes, j_in, cap_ctr + perp * (0.5 * w), h);
    // Cap, apex as an explicit node (it is the tracked x_c* marker).
    const double cap_h = std::min(h, std::max(0.45 * p.h_min, 0.25 * w));
    {
        const auto cap_pt = [&](double phi) { return cap_ctr + (perp * std::cos(phi) + diag * std::sin(phi)) * (0.5 * w); };
        const int steps = std::max(2, static_cast<int>(std::ceil(0.5 * kPi * 0.5 * w / cap_h)));
        for (int i = 0; i < steps; ++i)
            nodes.push_back(cap_pt(0.5 * kPi * static_cast<double>(i) / steps));
    }
    const std::size_t gamma_end = nodes.size();  // apex node
    {
        const auto cap_pt = [&](double phi) { return cap_ctr + (perp * std::cos(phi) + diag * std::sin(phi)) * (0.5 * w); };
        const int steps = std::max(2, static_cast<int>(std::ceil(0.5 * kPi * 0.5 * w / cap_h)));
        for (int i = 0; i < steps; ++i)
            nodes.push_back(cap_pt(0.5 * kPi + 0.5 * kPi * static_cast<double>(i) / steps));
    }
    // Wall B back out, then the rest of the corner arc down to 270 degrees.
    detail::emit_line(nodes, cap_ctr - perp * (0.5 * w), j_out, h);
    detail::emit_arc(nodes, corner_ctr, rc,
                     ang_out + kTwoPi * (ang_out < kPi ? 1 : 0), 1.5 * kPi, h);

    GeneratedPatch out;
    out.boundary.components.push_back(std::move(c));
    out.boundary.strength = 1.0;
    out.tracked.component = 0;
    out.tracked.outer_node = gamma_begin;
    out.tracked.inner_node = gamma_end;
    out.tracked.arc_begin = gamma_begin;
    out.tracked.arc_end = gamma_end;

    auto& rep = out.report;
    rep.budget = budget;
    rep.area_deficit = kPi * kPi - polygon_area(out.boundary.components[0]);
    rep.perimeter = polygon_perimeter(out.boundary.components[0]);
    rep.gamma_outer_dist = (out.boundary.components[0].nodes[gamma_begin] - kOrigin).norm();
    rep.gamma_inner_dist = (out.boundary.components[0].nodes[gamma_end] - kSquareCenter).norm();
    {
        MarkedCurve arc;
        arc.closed = false;
        for (std::size_t i = gamma_begin; i <= gamma_end; ++i)
            arc.nodes.push_back(out.boundary.components[0].nodes[i]);
        rep.arc_winding = winding_number(arc, kSquareCenter);
    }
    rep.simple = curve_is_simple(out.boundary.components[0]);
    rep.stick_rect_area = w * wall_len;
    rep.stick_probe = diag * (0.5 * (s_open + s_cap));

    if (rep.area_deficit > budget)
        throw GenerationError("gen_torus_patch: measured deficit exceeds budget",
                              rep.area_deficit, budget);
    if (rep.perimeter > 20.0)
        throw GenerationError("gen_torus_patch: perimeter exceeds 20", rep.perimeter, 20.0);
    if (!rep.simple)
        throw GenerationError("gen_torus_patch: boundary is not simple", 0.0, 0.0);
    if (rep.gamma_outer_dist > p.epsilon_tilde)
        throw GenerationError("gen_torus_patch: gamma misses B(x_o, epsilon_tilde)",
                              rep.gamma_outer_dist, p.epsilon_tilde);
    if (rep.gamma_inner_dist >= p.delta)
        throw GenerationError("gen_torus_patch: gamma misses B(x_c, delta)",
                              rep.gamma_inner_dist, p.delta);
    if (std::abs(rep.arc_winding) > 1.0)
        throw GenerationError("gen_torus_patch: |N_xc[gamma]| > 1", rep.arc_winding, 1.0);
    if (polygon_area(out.boundary.components[0]) <= 0)
        throw GenerationError("gen_torus_patch: orientation flipped", 0.0, 0.0);
    return out;
}

inline GeneratedPatch gen_handle_patch(const GeneratorParams& p) {
    p.validate();
    const double w = p.stick_width, rc = p.corner_rounding;
    const double h = 0.8 * p.h_max;
    const double theta0 = std::asin(0.5 * w);  // junction half-angle on the unit circle
    const double x_cap = 2.0 + rc - 0.5 * w;   // finger reaches radius 2 + rc
    const double cos0 = std::cos(theta0);

    // Closed-form symmetric difference: finger rectangle outside the disk,
    // plus the cap half-disk, minus the lens between chord and circle.
    const double budget = p.plane_budget_c1 * std::pow(p.epsilon, 4);
    const double lens = theta0 - 0.5 * w * cos0;
    const double sym_diff = w * (x_cap - cos0) + kPi * w * w / 8.0 - lens;
    if (sym_diff > budget)
        throw GenerationError("gen_handle_patch: area(Omega ^ D) exceeds budget", sym_diff,
                              budget);

    MarkedCurve c;
    c.closed = true;
    c.orientation = +1;
    auto& nodes = c.nodes;

    // Unit circle from the upper junction counterclockwise to the lower one.
    {
        const double a0 = theta0, a1 = kTwoPi - theta0;
        const int steps = std::max(3, static_cast<int>(std::ceil((a1 - a0) / h)));
        for (int i = 0; i < steps; ++i) {
            const double th = a0 + (a1 - a0) * (static_cast<double>(i) / steps);
            nodes.push_back({std::cos(th), std::sin(th)});
        }
    }
    // Lower wall with an exact node at radius 2 (the tracked x_2 marker).
    const std::size_t gamma_begin = nodes.size();  // lower junction, radius exactly 1
    const double x_r2 = std::sqrt(4.0 - 0.25 * w * w);
    detail::emit_line(nodes, {cos0, -0.5 * w}, {x_r2, -0.5 * w}, h);
    const std::size_t gamma_end = nodes.size();  // the radius-2 node
    detail::emit_line(nodes, {x_r2, -0.5 * w}, {x_cap, -0.5 * w}, h);
    // Cap through the apex (x_cap + w/2, 0).
    {
        const double cap_h = std::min(h, std::max(0.45 * p.h_min, 0.25 * w));
        const int steps = std::max(3, static_cast<int>(std::ceil(kPi * 0.5 * w / cap_h)));
        for (int i = 0; i < steps; ++i) {
            const double phi = kPi * static_cast<double>(i) / steps;
            nodes.push_back(Point2{x_cap, 0.0} + Vec2{std::sin(phi), -std::cos(phi)} * (0.5 * w));
        }
    }
    // Upper wall back toward the circle; the wrap segment closes onto the
    // first circle node, which coincides with (cos0, +w/2).
    detail::emit_line(nodes, {x_cap, 0.5 * w}, {cos0, 0.5 * w}, h);

    GeneratedPatch out;
    out.boundary.components.push_back(std::move(c));
    out.boundary.strength = 1.0;
    out.tracked.component = 0;
    out.tracked.inner_node = gamma_begin;  // x_1, |x| = 1
    out.tracked.outer_node = gamma_end;    // x_2, |x| = 2
    out.tracked.arc_begin = gamma_begin;
    out.tracked.arc_end = gamma_end;

    auto& rep = out.report;
    rep.budget = budget;
    rep.area_deficit = sym_diff;
    rep.perimeter = polygon_perimeter(out.boundary.components[0]);
    rep.gamma_inner_dist = std::abs(out.boundary.components[0].nodes[gamma_begin].norm() - 1.0);
    rep.gamma_outer_dist = std::abs(out.boundary.components[0].nodes[gamma_end].norm() - 2.0);
    {
        MarkedCurve arc;
        arc.closed = false;
        for (std::size_t i = gamma_begin; i <= gamma_end; ++i)
            arc.nodes.push_back(out.boundary.components[0].nodes[i]);
        rep.arc_winding = winding_number(arc, kOrigin);
    }
    rep.simple = curve_is_simple(out.boundary.components[0]);
    rep.stick_rect_area = w * (x_cap - cos0);
    rep.stick_probe = {0.5 * (1.0 + x_cap), 0.0};

    if (rep.perimeter > 20.0)
        throw GenerationError("gen_handle_patch: perimeter exceeds 20", rep.perimeter, 20.0);
    if (!rep.simple)
        throw GenerationError("gen_handle_patch: boundary is not simple", 0.0, 0.0);
    if (rep.gamma_inner_dist > 1e-9 || rep.gamma_outer_dist > 1e-9)
        throw GenerationError("gen_handle_patch: gamma endpoints off the target radii",
                              std::max(rep.gamma_inner_dist, rep.gamma_outer_dist), 1e-9);
    if (std::abs(rep.arc_winding) > 1.0)
        throw GenerationError("gen_handle_patch: |N_xo[gamma]| > 1", rep.arc_winding, 1.0);
    double max_r = 0.0;
    for (const auto& q : out.boundary.components[0].nodes) max_r = std::max(max_r, q.norm());
    if (max_r >= 3.0)
        throw GenerationError("gen_handle_patch: patch leaves B(x_o, 3)", max_r, 3.0);
    return out;
}

// Plain disk patch (the stationary Rankine benchmark / degenerate handle case).
inline PatchBoundary make_disk_patch(std::size_t n_nodes, double radius = 1.0,
                                     Point2 center = {}) {
    PatchBoundary b;
    b.strength = 1.0;
    b.components.push_back(make_circle(center, radius, n_nodes));
    return b;
}

// Kirchhoff ellipse with semi-axes a >= b; rotates rigidly at ab/(a+b)^2.
inline PatchBoundary make_kirchhoff_patch(double a, double b, double h_target) {
    PatchBoundary bd;
    bd.strength = 1.0;
    MarkedCurve probe = make_ellipse({}, a, b, 64);
    const double per = polygon_perimeter(probe);
    const std::size_t n = static_cast<std::size_t>(std::ceil(per / (0.8 * h_target)));
    bd.components.push_back(make_ellipse({}, a, b, n));
    return bd;
}

inline double kirchhoff_rotation_rate(double a, double b) { return a * b / ((a + b) * (a + b)); }

}  // namespace patchwind
