#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "patchwind/core.hpp"

namespace patchwind {

// ---------------------------------------------------------------------------
// MarkedCurve: an oriented polyline of marker nodes.  Closed curves own the
// wrap-around segment; orientation is +1 for counterclockwise node order.
// ---------------------------------------------------------------------------

struct MarkedCurve {
    std::vector<Point2> nodes;
    bool closed = true;
    int orientation = +1;

    std::size_t size() const { return nodes.size(); }
    std::size_t segment_count() const {
        if (nodes.size() < 2) return 0;
        return closed ? nodes.size() : nodes.size() - 1;
    }
    // Endpoints of segment s, wrapping for closed curves.
    Point2 seg_a(std::size_t s) const { return nodes[s]; }
    Point2 seg_b(std::size_t s) const { return nodes[(s + 1) % nodes.size()]; }
};

struct PatchBoundary {
    std::vector<MarkedCurve> components;
    double strength = 1.0;
};

inline MarkedCurve reversed(const MarkedCurve& c) {
    MarkedCurve r = c;
    std::reverse(r.nodes.begin(), r.nodes.end());
    r.orientation = -c.orientation;
    return r;
}

// ---------------------------------------------------------------------------
// Areas and perimeters
// ---------------------------------------------------------------------------

// Signed shoelace area; positive for counterclockwise node order.
inline double polygon_area(const MarkedCurve& curve) {
    if (!curve.closed || curve.nodes.size() < 3)
        throw InvalidCurveError("polygon_area: need a closed curve with >= 3 nodes");
    double twice = 0.0;
    const std::size_t n = curve.nodes.size();
    for (std::size_t i = 0; i < n; ++i)
        twice += cross(curve.nodes[i], curve.nodes[(i + 1) % n]);
    return 0.5 * twice;
}

inline double polygon_perimeter(const MarkedCurve& curve) {
    if (curve.nodes.size() < 2)
        throw InvalidCurveError("polygon_perimeter: need >= 2 nodes");
    double len = 0.0;
    for (std::size_t s = 0; s < curve.segment_count(); ++s)
        len += (curve.seg_b(s) - curve.seg_a(s)).norm();
    return len;
}

inline double patch_area(const PatchBoundary& b) {
    double a = 0.0;
    for (const auto& c : b.components) a += polygon_area(c);
    return a;
}

inline double patch_perimeter(const PatchBoundary& b) {
    double p = 0.0;
    for (const auto& c : b.components) p += polygon_perimeter(c);
    return p;
}

// ---------------------------------------------------------------------------
// Angle lifting and winding numbers
// ---------------------------------------------------------------------------

// Continuous lift of the polar angle about a fixed center.  Updates pick the
// shortest-arc branch and refuse steps subtending >= pi (the lift would be
// ambiguous); callers must refine first.
struct AngleLift {
    Point2 center;
    double lifted_angle = 0.0;
    Point2 last_point;

    AngleLift() = default;
    AngleLift(Point2 c, Point2 start) : center(c), last_point(start) {
        const Vec2 r = start - c;
        if (r.norm2() == 0.0)
            throw RefinementRequiredError("AngleLift: start point equals center");
        lifted_angle = std::atan2(r.x2, r.x1);
    }

    // Returns the increment added (radians).
    double update(Point2 next) {
        const Vec2 a = last_point - center;
        const Vec2 b = next - center;
        if (b.norm2() == 0.0)
            throw RefinementRequiredError("AngleLift: point equals center");
        const double inc = std::atan2(cross(a, b), dot(a, b));
        if (!(std::abs(inc) < kPi - 1e-9))
            throw RefinementRequiredError(
                "AngleLift: step subtends an angle >= pi at the center; refine first");
        lifted_angle += inc;
        last_point = next;
        return inc;
    }
};

// Winding number N_center[curve] = (lifted end angle - lifted start angle)/2pi.
// Real-valued: open arcs wind fractionally.  Closed curves include the
// wrap-around segment, so simple CCW loops about an enclosed center give 1.
inline double winding_number(const MarkedCurve& curve, Point2 center) {
    if (curve.nodes.size() < 2)
        throw InvalidCurveError("winding_number: need >= 2 nodes");
    AngleLift lift(center, curve.nodes.front());
    const double start = lift.lifted_angle;
    for (std::size_t i = 1; i < curve.nodes.size(); ++i) lift.update(curve.nodes[i]);
    if (curve.closed) lift.update(curve.nodes.front());
    return (lift.lifted_angle - start) / kTwoPi;
}

// Any curve avoiding B(center, r0) with winding N has length >= 2 pi r0 |N|.
inline double length_lower_bound(double r0, double winding) {
    return kTwoPi * r0 * std::abs(winding);
}

// ---------------------------------------------------------------------------
// Point location (even-odd rule) and scanline support
// ---------------------------------------------------------------------------

// Even-odd crossing rule over all components.  Half-open vertex rule keeps the
// result consistent when the ray passes through nodes.
inline bool point_in_patch(Point2 p, const PatchBoundary& boundary) {
    bool inside = false;
    for (const auto& c : boundary.components) {
        if (!c.closed || c.nodes.size() < 3) continue;
        const std::size_t n = c.nodes.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 a = c.nodes[i];
            const Point2 b = c.nodes[(i + 1) % n];
            if ((a.x2 <= p.x2) != (b.x2 <= p.x2)) {
                const double xc = a.x1 + (p.x2 - a.x2) * (b.x1 - a.x1) / (b.x2 - a.x2);
                if (xc > p.x1) inside = !inside;
            }
        }
    }
    return inside;
}

// Sorted x-coordinates where the boundary crosses the horizontal line x2 = y.
// Even-odd intervals between consecutive crossings are inside the patch.
inline void horizontal_crossings(const PatchBoundary& boundary, double y,
                                 std::vector<double>& out) {
    out.clear();
    for (const auto& c : boundary.components) {
        if (!c.closed || c.nodes.size() < 3) continue;
        const std::size_t n = c.nodes.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 a = c.nodes[i];
            const Point2 b = c.nodes[(i + 1) % n];
            if ((a.x2 <= y) != (b.x2 <= y))
                out.push_back(a.x1 + (y - a.x2) * (b.x1 - a.x1) / (b.x2 - a.x2));
        }
    }
    std::sort(out.begin(), out.end());
}

// ---------------------------------------------------------------------------
// Node maintenance
// ---------------------------------------------------------------------------

struct RefineResult {
    MarkedCurve curve;
    // old node index -> new node index; -1 for removed nodes.
    std::vector<std::int64_t> index_map;
    std::size_t inserted = 0;
    std::size_t removed = 0;
};

namespace detail {

inline bool circumcenter(Point2 a, Point2 b, Point2 c, Point2& out) {
    const Vec2 ab = b - a, ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    if (std::abs(d) <= 1e-9 * ab.norm() * ac.norm()) return false;  // collinear
    const double ab2 = ab.norm2(), ac2 = ac.norm2();
    out = a + Vec2{(ac.x2 * ab2 - ab.x2 * ac2) / d, (ab.x1 * ac2 - ac.x1 * ab2) / d};
    return true;
}

// Midpoint for the segment (p1, p2) from the two local circumcircles through
// the outer neighbors.  Exact on circular arcs (caps and rounded corners
// reproduce themselves under refinement); straight chains fall back to the
// chord midpoint.  A 4-point interpolating cubic cannot do this: its limit
// curve on the coarse 8-node circle sits ~0.4% inside, far outside the
// refinement contract.
inline Point2 arc_midpoint(Point2 p0, Point2 p1, Point2 p2, Point2 p3) {
    const Point2 chord_mid = (p1 + p2) * 0.5;
    const double L = (p2 - p1).norm();
    // Kinks keep their chord midpoint: only stencils turning less than 60
    // degrees at both ends count as smooth.  (A coarse square is concyclic,
    // so the candidate-agreement test alone would happily round its corners.)
    const auto turn = [](Point2 a, Point2 b, Point2 c) {
        const Vec2 u = b - a, v = c - b;
        const double d = u.norm() * v.norm();
        if (d == 0.0) return kPi;
        return std::acos(std::clamp(dot(u, v) / d, -1.0, 1.0));
    };
    if (turn(p0, p1, p2) > kPi / 3.0 || turn(p1, p2, p3) > kPi / 3.0) return chord_mid;
    Point2 cand[2];
    int count = 0;
    for (int side = 0; side < 2; ++side) {
        const Point2 outer = (side == 0) ? p0 : p3;
        Point2 c;
        if (!circumcenter(outer, p1, p2, c)) continue;
        const double radius = (p1 - c).norm();
        const Vec2 dir = chord_mid - c;
        const double dn = dir.norm();
        if (dn < 1e-12 * radius) continue;  // chord through the center; ambiguous side
        const Point2 m = c + dir * (radius / dn);
        if ((m - chord_mid).norm() > 0.5 * L) continue;  // reject wild fits on kinks
        cand[count++] = m;
    }
    // The two one-sided fits must agree, and both must exist: a straight or
    // kinked stencil keeps its chord midpoint (corners stay corners).
    if (count < 2) return chord_mid;
    if ((cand[0] - cand[1]).norm() > 0.05 * L) return chord_mid;
    Point2 m = (cand[0] + cand[1]) * 0.5;
    const Vec2 dev = m - chord_mid;
    const double dn = dev.norm();
    if (dn > 0.25 * L) m = chord_mid + dev * (0.25 * L / dn);
    return m;
}

}  // namespace detail

// Inserts locally fitted midpoints on segments longer than h_max
// (repeatedly, until none remain) and removes nodes both of whose segments
// are shorter than h_min.  Nodes listed in `keep` are never removed;
// `index_map` tracks where every original node went.
inline RefineResult refine_and_redistribute(const MarkedCurve& curve, double h_min,
                                            double h_max,
                                            std::span<const std::size_t> keep = {}) {
    if (!(h_min > 0.0) || !(h_min < 0.5 * h_max))
        throw DomainError("refine_and_redistribute: need 0 < h_min < h_max/2");
    if (curve.nodes.size() < (curve.closed ? 3u : 2u))
        throw DegenerateCurveError("refine_and_redistribute: too few nodes");

    RefineResult res;
    res.curve = curve;
    res.index_map.resize(curve.nodes.size());

    // live_of[i]: position of original node i in the working list (always alive
    // during insertion; removal may drop unprotected ones later).
    std::vector<std::int64_t> live_of(curve.nodes.size());
    for (std::size_t i = 0; i < curve.nodes.size(); ++i) live_of[i] = static_cast<std::int64_t>(i);

    auto& nodes = res.curve.nodes;
    const bool closed = curve.closed;

    // Insertion passes.
    for (int pass = 0; pass < 64; ++pass) {
        const std::size_t n = nodes.size();
        const std::size_t nseg = closed ? n : n - 1;
        bool any_long = false;
        for (std::size_t s = 0; s < nseg; ++s) {
            if ((nodes[(s + 1) % n] - nodes[s]).norm() > h_max) { any_long = true; break; }
        }
        if (!any_long) break;

        std::vector<Point2> out;
        out.reserve(n * 2);
        std::vector<std::int64_t> shift(n);  // old working index -> new working index
        for (std::size_t i = 0; i < n; ++i) {
            shift[i] = static_cast<std::int64_t>(out.size());
            out.push_back(nodes[i]);
            const bool has_seg = closed || i + 1 < n;
            if (!has_seg) continue;
            const std::size_t j = (i + 1) % n;
            if ((nodes[j] - nodes[i]).norm() > h_max) {
                Point2 p0, p3;
                if (closed) {
                    p0 = nodes[(i + n - 1) % n];
                    p3 = nodes[(j + 1) % n];
                } else {
                    p0 = (i > 0) ? nodes[i - 1] : nodes[i];
                    p3 = (j + 1 < n) ? nodes[j + 1] : nodes[j];
                }
                // Endpoint stencils degenerate to the chord midpoint.
                Point2 m = (p0 == nodes[i] || p3 == nodes[j])
                               ? (nodes[i] + nodes[j]) * 0.5
                               : detail::arc_midpoint(p0, nodes[i], nodes[j], p3);
                out.push_back(m);
                ++res.inserted;
            }
        }
        for (auto& v : live_of)
            if (v >= 0) v = shift[static_cast<std::size_t>(v)];
        nodes = std::move(out);
    }

    // Removal pass(es): drop nodes whose both adjacent segments are short.
    std::vector<bool> protected_node(nodes.size(), false);
    for (std::size_t orig : keep)
        if (orig < live_of.size() && live_of[orig] >= 0)
            protected_node[static_cast<std::size_t>(live_of[orig])] = true;

    for (int pass = 0; pass < 64; ++pass) {
        const std::size_t n = nodes.size();
        if (n <= (closed ? 3u : 2u)) break;
        std::vector<bool> drop(n, false);
        bool any = false;
        // Greedy ascending scan; a node survives if its predecessor in the scan
        // was just dropped (segment to it has grown).
        double prev_len_accum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool interior = closed || (i > 0 && i + 1 < n);
            if (!interior || protected_node[i]) { prev_len_accum = 0.0; continue; }
            const std::size_t ip = (i + n - 1) % n;
            const std::size_t in = (i + 1) % n;
            const double la = (nodes[i] - nodes[ip]).norm() + prev_len_accum;
            const double lb = (nodes[in] - nodes[i]).norm();
            if (la < h_min && lb < h_min && !drop[ip]) {
                drop[i] = true;
                any = true;
                prev_len_accum = la;  // merged segment length carried forward
            } else {
                prev_len_accum = 0.0;
            }
        }
        if (!any) break;
        std::vector<Point2> out;
        out.reserve(n);
        std::vector<std::int64_t> shift(n, -1);
        for (std::size_t i = 0; i < n; ++i) {
            if (drop[i]) { ++res.removed; continue; }
            shift[i] = static_cast<std::int64_t>(out.size());
            out.push_back(nodes[i]);
        }
        std::vector<bool> prot;
        prot.reserve(out.size());
        for (std::size_t i = 0; i < n; ++i)
            if (!drop[i]) prot.push_back(protected_node[i]);
        protected_node = std::move(prot);
        for (auto& v : live_of)
            if (v >= 0) v = shift[static_cast<std::size_t>(v)];
        nodes = std::move(out);
    }

    if (nodes.size() < (closed ? 3u : 2u))
        throw DegenerateCurveError("refine_and_redistribute: curve collapsed");

    res.index_map = std::move(live_of);
    return res;
}

// ---------------------------------------------------------------------------
// Symmetric difference vs a disk, by midpoint rule on a grid over B(0,3).
// Exact polygon clipping is deliberately avoided: filamented boundaries make
// it fragile, while the grid error stays bounded by C*perimeter*spacing.
// ---------------------------------------------------------------------------

inline double symmetric_difference_area(const PatchBoundary& boundary, Point2 disk_center,
                                        double disk_radius, int resolution) {
    if (resolution < 64)
        throw DomainError("symmetric_difference_area: resolution must be >= 64");
    const double lo = -3.0, hi = 3.0;
    const double dx = (hi - lo) / resolution;
    const double cell = dx * dx;
    double area = 0.0;
    std::vector<double> xs;
    const double r2 = disk_radius * disk_radius;
    for (int row = 0; row < resolution; ++row) {
        const double y = lo + (row + 0.5) * dx;
        horizontal_crossings(boundary, y, xs);
        std::size_t k = 0;
        bool in_patch = false;
        const double dy2 = (y - disk_center.x2) * (y - disk_center.x2);
        for (int col = 0; col < resolution; ++col) {
            const double x = lo + (col + 0.5) * dx;
            while (k < xs.size() && xs[k] <= x) { in_patch = !in_patch; ++k; }
            const double ddx = x - disk_center.x1;
            const bool in_disk = ddx * ddx + dy2 < r2;
            if (in_patch != in_disk) area += cell;
        }
    }
    return area;
}

// ---------------------------------------------------------------------------
// Simplicity test and Hausdorff distance (post-check / validation helpers)
// ---------------------------------------------------------------------------

namespace detail {

inline bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
    // Orientation with a relative tolerance: collinear chains (straight wall
    // segments) must classify as degenerate, not as noise-sign crossings.
    const auto orient = [](Point2 p, Point2 q, Point2 r) {
        const double v = cross(q - p, r - p);
        const double scale = (q - p).norm() * (r - p).norm();
        if (std::abs(v) <= 1e-12 * scale) return 0;
        return (v > 0.0) ? 1 : -1;
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    const auto on_seg = [](Point2 p, Point2 q, Point2 r) {
        return std::min(p.x1, q.x1) <= r.x1 && r.x1 <= std::max(p.x1, q.x1) &&
               std::min(p.x2, q.x2) <= r.x2 && r.x2 <= std::max(p.x2, q.x2);
    };
    if (o1 == 0 && on_seg(a, b, c)) return true;
    if (o2 == 0 && on_seg(a, b, d)) return true;
    if (o3 == 0 && on_seg(c, d, a)) return true;
    if (o4 == 0 && on_seg(c, d, b)) return true;
    return false;
}

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    const Vec2 ab = b - a;
    const double L2 = ab.norm2();
    if (L2 == 0.0) return (p - a).norm();
    const double t = std::clamp(dot(p - a, ab) / L2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

}  // namespace detail

// No two non-adjacent segments intersect.  O(N^2); post-check use only.
inline bool curve_is_simple(const MarkedCurve& c) {
    const std::size_t n = c.nodes.size();
    const std::size_t nseg = c.segment_count();
    for (std::size_t i = 0; i + 1 < nseg; ++i) {
        for (std::size_t j = i + 1; j < nseg; ++j) {
            const bool adjacent =
                (j == i + 1) || (c.closed && i == 0 && j == nseg - 1);
            if (adjacent) continue;
            if (detail::segments_intersect(c.nodes[i], c.nodes[(i + 1) % n],
                                           c.nodes[j], c.nodes[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

inline double hausdorff_distance(const MarkedCurve& a, const MarkedCurve& b) {
    const auto one_sided = [](const MarkedCurve& p, const MarkedCurve& q) {
        double worst = 0.0;
        for (const auto& x : p.nodes) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < q.segment_count(); ++s)
                best = std::min(best, detail::point_segment_distance(x, q.seg_a(s), q.seg_b(s)));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

// ---------------------------------------------------------------------------
// Curve builders
// ---------------------------------------------------------------------------

inline MarkedCurve make_circle(Point2 center, double radius, std::size_t n) {
    MarkedCurve c;
    c.closed = true;
    c.orientation = +1;
    c.nodes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
        c.nodes.push_back(center + Vec2{radius * std::cos(th), radius * std::sin(th)});
    }
    return c;
}

// Ellipse with semi-axes (a, b), nodes equispaced in arc length.
inline MarkedCurve make_ellipse(Point2 center, double a, double b, std::size_t n) {
    // Oversample the parameter, accumulate arc length, then resample.
    const std::size_t m = 64 * n;
    std::vector<double> s(m + 1, 0.0);
    Point2 prev{center.x1 + a, center.x2};
    for (std::size_t i = 1; i <= m; ++i) {
        const double th = kTwoPi * static_cast<double>(i) / static_cast<double>(m);
        const Point2 p{center.x1 + a * std::cos(th), center.x2 + b * std::sin(th)};
        s[i] = s[i - 1] + (p - prev).norm();
        prev = p;
    }
    MarkedCurve c;
    c.closed = true;
    c.orientation = +1;
    c.nodes.reserve(n);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double target = s[m] * static_cast<double>(i) / static_cast<double>(n);
        while (j < m && s[j + 1] < target) ++j;
        const double seg = s[j + 1] - s[j];
        const double f = seg > 0.0 ? (target - s[j]) / seg : 0.0;
        const double th0 = kTwoPi * static_cast<double>(j) / static_cast<double>(m);
        const double th1 = kTwoPi * static_cast<double>(j + 1) / static_cast<double>(m);
        const double th = th0 + f * (th1 - th0);
        c.nodes.push_back({center.x1 + a * std::cos(th), center.x2 + b * std::sin(th)});
    }
    return c;
}

inline MarkedCurve make_segment_curve(Point2 a, Point2 b, std::size_t n_nodes) {
    MarkedCurve c;
    c.closed = false;
    c.orientation = +1;
    c.nodes.reserve(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n_nodes - 1);
        c.nodes.push_back(a + (b - a) * t);
    }
    return c;
}

}  // namespace patchwind
