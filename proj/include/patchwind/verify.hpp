#pragma once

#include <random>
#include <string>
#include <vector>

#include "patchwind/engine_free.hpp"
#include "patchwind/engine_torus.hpp"
#include "patchwind/fields.hpp"
#include "patchwind/generators.hpp"

namespace patchwind {

// ---------------------------------------------------------------------------
// Invariant suites behind `patchwind verify`.  Each case is small enough to
// run interactively; the heavyweight quantitative reproductions live in the
// acceptance test binary.
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline void check(std::vector<CheckResult>& out, const std::string& name, bool pass,
                  const std::string& detail) {
    out.push_back({name, pass, detail});
}

// Spiral polyline r = r0 + slope * theta, theta in [0, 2 pi turns], about c.
inline MarkedCurve spiral(Point2 c, double r0, double slope, double turns, int pts_per_turn) {
    MarkedCurve s;
    s.closed = false;
    const int n = std::max(16, static_cast<int>(pts_per_turn * turns));
    for (int i = 0; i <= n; ++i) {
        const double th = kTwoPi * turns * static_cast<double>(i) / n;
        const double r = r0 + slope * th;
        s.nodes.push_back(c + Vec2{r * std::cos(th), r * std::sin(th)});
    }
    return s;
}

}  // namespace detail

inline std::vector<CheckResult> verify_geometry(unsigned seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    {  // shoelace area is orientation-odd
        bool ok = true;
        double worst = 0.0;
        for (int k = 0; k < 25; ++k) {
            const std::size_t n = 8 + static_cast<std::size_t>(u01(rng) * 40);
            MarkedCurve c = make_circle({u01(rng), u01(rng)}, 0.3 + u01(rng), n);
            for (auto& p : c.nodes) p += Vec2{0.05 * (u01(rng) - 0.5), 0.05 * (u01(rng) - 0.5)};
            const double a = polygon_area(c);
            const double b = polygon_area(reversed(c));
            worst = std::max(worst, std::abs(a + b));
            ok = ok && std::abs(a + b) < 1e-12;
        }
        detail::check(out, "geometry/area_orientation_odd", ok,
                      "max |area(c)+area(rev c)| = " + fmt12(worst));
    }
    {  // winding invariant under node insertion
        bool ok = true;
        double worst = 0.0;
        for (int k = 0; k < 25; ++k) {
            MarkedCurve s = detail::spiral({0, 0}, 0.5 + u01(rng), 0.05 + 0.05 * u01(rng),
                                           0.5 + 2.0 * u01(rng), 64);
            const double w0 = winding_number(s, {0, 0});
            MarkedCurve fine;
            fine.closed = false;
            for (std::size_t i = 0; i + 1 < s.nodes.size(); ++i) {
                fine.nodes.push_back(s.nodes[i]);
                fine.nodes.push_back((s.nodes[i] + s.nodes[i + 1]) * 0.5);
            }
            fine.nodes.push_back(s.nodes.back());
            const double w1 = winding_number(fine, {0, 0});
            worst = std::max(worst, std::abs(w1 - w0));
            ok = ok && std::abs(w1 - w0) < 1e-12;
        }
        detail::check(out, "geometry/winding_insertion_invariant", ok,
                      "max drift = " + fmt12(worst) + " turns");
    }
    {  // closed curves: 0 outside, +-1 inside
        bool ok = true;
        for (int k = 0; k < 25; ++k) {
            MarkedCurve c = make_circle({0, 0}, 1.0 + u01(rng), 48 + k);
            const Point2 inside{0.3 * u01(rng), 0.3 * u01(rng)};
            const double th = kTwoPi * u01(rng);
            const Point2 outside = Point2{} + Vec2{std::cos(th), std::sin(th)} * (3.0 + u01(rng));
            ok = ok && std::abs(winding_number(c, inside) - 1.0) < 1e-12;
            ok = ok && std::abs(winding_number(c, outside)) < 1e-12;
            ok = ok && std::abs(winding_number(reversed(c), inside) + 1.0) < 1e-12;
        }
        detail::check(out, "geometry/winding_enclosed_exterior", ok, "");
    }
    {  // perimeter >= 2 pi r0 |N| on random spirals avoiding B(c, r0)
        bool ok = true;
        double min_slack = 1e30;
        for (int k = 0; k < 50; ++k) {
            const double r0 = 0.2 + u01(rng);
            MarkedCurve s = detail::spiral({0, 0}, r0, 0.02 + 0.1 * u01(rng),
                                           0.5 + 4.0 * u01(rng), 96);
            const double lhs = polygon_perimeter(s);
            const double rhs = length_lower_bound(r0, winding_number(s, {0, 0}));
            min_slack = std::min(min_slack, lhs - rhs);
            ok = ok && lhs >= rhs;
        }
        detail::check(out, "geometry/length_lower_bound_spirals", ok,
                      "min(perimeter - bound) = " + fmt12(min_slack));
    }
    {  // refine: fixed point, bisection, circle convergence
        const MarkedCurve band = make_circle({0, 0}, 0.0118, 8);  // spacing ~0.009
        auto r = refine_and_redistribute(band, 0.004, 0.012);
        const bool fixed_point = r.curve.nodes.size() == band.nodes.size() && r.inserted == 0 &&
                                 r.removed == 0;
        MarkedCurve two;
        two.closed = false;
        two.nodes = {{0, 0}, {0.024, 0}};
        auto r2 = refine_and_redistribute(two, 0.004, 0.012);
        bool bisect = r2.inserted == 1 && r2.curve.nodes.size() == 3;
        for (std::size_t i = 0; i + 1 < r2.curve.nodes.size(); ++i)
            bisect = bisect &&
                     (r2.curve.nodes[i + 1] - r2.curve.nodes[i]).norm() <= 0.012 + 1e-15;
        MarkedCurve coarse8 = make_circle({0, 0}, 1.0, 8);
        auto r3 = refine_and_redistribute(coarse8, 0.004, 0.01);
        const double per = polygon_perimeter(r3.curve);
        const bool circle_ok = std::abs(per - kTwoPi) < 1e-3;
        detail::check(out, "geometry/refine_contracts", fixed_point && bisect && circle_ok,
                      "refined 8-gon perimeter = " + fmt12(per));
    }
    {  // generator post-checks at the documented presets
        bool ok = true;
        std::string detail_str;
        try {
            GeneratorParams tp;
            auto g = gen_torus_patch(tp);
            ok = ok && g.report.area_deficit <= g.report.budget && g.report.perimeter <= 20.0;
            ok = ok && !point_in_patch(g.report.stick_probe, g.boundary);
            ok = ok && point_in_patch(kSquareCenter + Vec2{0.5, 0}, g.boundary);
            detail_str += "torus deficit " + fmt12(g.report.area_deficit);
            GeneratorParams pp;
            pp.epsilon = 1.0;
            pp.stick_width = 0.008;
            pp.corner_rounding = 0.03;
            pp.h_min = 0.015;
            pp.h_max = 0.035;
            auto h = gen_handle_patch(pp);
            ok = ok && h.report.area_deficit <= h.report.budget;
            ok = ok && point_in_patch(h.report.stick_probe, h.boundary);
            detail_str += ", handle sym-diff " + fmt12(h.report.area_deficit);
        } catch (const Error& e) {
            ok = false;
            detail_str = e.what();
        }
        detail::check(out, "geometry/generator_postchecks", ok, detail_str);
    }
    {  // symmetric difference trivials
        PatchBoundary disk = make_disk_patch(512);
        const double same = symmetric_difference_area(disk, {0, 0}, 1.0, 256);
        const double annulus = symmetric_difference_area(disk, {0, 0}, 2.0, 256);
        const double grid_err = 2.0 * (kTwoPi * 3.0) * (6.0 / 256);
        const bool ok = same < grid_err && std::abs(annulus - 3.0 * kPi) < grid_err;
        detail::check(out, "geometry/symmetric_difference_disk", ok,
                      "same " + fmt12(same) + ", annulus " + fmt12(annulus));
    }
    return out;
}

inline std::vector<CheckResult> verify_fields(unsigned seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const SpectralTruncation trunc{399};

    {  // kernel values and homogeneity
        const Velocity2 k1 = biot_savart_kernel({1, 0});
        const Velocity2 k2 = biot_savart_kernel({0, 2});
        bool ok = (k1 - Velocity2{0, 1.0 / kTwoPi}).norm() < 1e-15 &&
                  (k2 - Velocity2{-1.0 / (4.0 * kPi), 0}).norm() < 1e-15;
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double th = kTwoPi * u01(rng);
            const double r = 0.1 + 3.0 * u01(rng);
            const Point2 x = Vec2{std::cos(th), std::sin(th)} * r;
            worst = std::max(worst,
                             std::abs(biot_savart_kernel(x).norm() * x.norm() - 1.0 / kTwoPi));
        }
        ok = ok && worst < 1e-14;
        detail::check(out, "fields/biot_savart_kernel", ok,
                      "max ||K(x)||x| - 1/2pi| = " + fmt12(worst));
    }
    {  // disk velocity continuity and flux-free property
        const double inner = tangential_component(disk_velocity({1 - 1e-12, 0}), {1, 0});
        const double outer = tangential_component(disk_velocity({1 + 1e-12, 0}), {1, 0});
        bool ok = std::abs(inner - 0.5) < 1e-9 && std::abs(outer - 0.5) < 1e-9;
        double worst_flux = 0.0;
        for (int k = 0; k < 10; ++k) {
            const double r = 0.2 + 2.5 * u01(rng);
            double flux = 0.0;
            const int nq = 512;
            for (int i = 0; i < nq; ++i) {
                const double th = kTwoPi * (i + 0.5) / nq;
                const Point2 x = Vec2{std::cos(th), std::sin(th)} * r;
                flux += radial_component(disk_velocity(x), x) * (kTwoPi * r / nq);
            }
            worst_flux = std::max(worst_flux, std::abs(flux));
        }
        ok = ok && worst_flux < 1e-12;
        detail::check(out, "fields/disk_velocity", ok, "max circle flux = " + fmt12(worst_flux));
    }
    {  // bc vorticity signs
        const bool ok = bc_vorticity({1, 1}) == 1.0 && bc_vorticity({-1, 1}) == -1.0 &&
                        bc_vorticity({0, 2}) == 0.0 && bc_vorticity({-1, -1}) == 1.0;
        detail::check(out, "fields/bc_vorticity", ok, "");
    }
    {  // stream boundary zeros and quarter-turn symmetry
        bool ok = true;
        double worst_b = 0.0, worst_s = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double s = kPi * u01(rng);
            worst_b = std::max({worst_b, std::abs(bc_stream({s, 0.0}, trunc)),
                                std::abs(bc_stream({0.0, s}, trunc)),
                                std::abs(bc_stream({s, kPi}, trunc)),
                                std::abs(bc_stream({kPi, s}, trunc))});
            const Point2 x{0.2 + (kPi - 0.4) * u01(rng), 0.2 + (kPi - 0.4) * u01(rng)};
            const Vec2 d = x - kSquareCenter;
            const Point2 rot = kSquareCenter + Vec2{-d.x2, d.x1};
            worst_s = std::max(worst_s, std::abs(bc_stream(x, trunc) - bc_stream(rot, trunc)));
        }
        ok = worst_b < 1e-12 && worst_s < 1e-10;
        detail::check(out, "fields/bc_stream_symmetry", ok,
                      "boundary " + fmt12(worst_b) + ", rotation " + fmt12(worst_s));
    }
    {  // independent finite-difference Poisson oracle (exact 5-point solve)
        const int n = 256;
        GridField w(n, GridField::Kind::vorticity);
        for (int j = 1; j < n; ++j)
            for (int i = 1; i < n; ++i) w.at(i, j) = 1.0;
        // FD eigenvalues (2 - 2 cos) / h^2 give the exact solution of the
        // 5-point scheme; an independent discretization of the same problem.
        const int N = n - 1;
        std::vector<double> buf(static_cast<std::size_t>(N) * N);
        for (int k = 1; k <= N; ++k)
            for (int j = 1; j <= N; ++j)
                buf[static_cast<std::size_t>(k - 1) * N + (j - 1)] = w.at(j, k);
        fftw_plan plan = fftw_plan_r2r_2d(N, N, buf.data(), buf.data(), FFTW_RODFT00,
                                          FFTW_RODFT00, FFTW_ESTIMATE);
        fftw_execute(plan);
        const double h = kPi / n;
        const double scale = 1.0 / (4.0 * n * n);
        for (int k = 1; k <= N; ++k)
            for (int j = 1; j <= N; ++j) {
                const double lj = (2.0 - 2.0 * std::cos(j * kPi / n)) / (h * h);
                const double lk = (2.0 - 2.0 * std::cos(k * kPi / n)) / (h * h);
                buf[static_cast<std::size_t>(k - 1) * N + (j - 1)] *= -scale / (lj + lk);
            }
        fftw_execute(plan);
        fftw_destroy_plan(plan);
        double worst = 0.0;
        for (int a = 1; a <= 16; ++a)
            for (int b = 1; b <= 16; ++b) {
                const int i = a * 15, j = b * 15;
                if (i >= n || j >= n) continue;
                const double fd = buf[static_cast<std::size_t>(j - 1) * N + (i - 1)];
                worst = std::max(worst, std::abs(fd - bc_stream({i * h, j * h}, trunc)));
            }
        detail::check(out, "fields/bc_stream_vs_fd_oracle", worst < 2e-5,
                      "sup diff at n=256: " + fmt12(worst));
    }
    {  // velocity: stagnation, independent-gradient tangency, quadratic model
        bool ok = bc_velocity(kSquareCenter, trunc).norm() < 1e-12;
        double worst_t = 0.0, worst_q = 0.0;
        for (int k = 0; k < 20; ++k) {
            const Point2 x{0.4 + (kPi - 0.8) * u01(rng), 0.4 + (kPi - 0.8) * u01(rng)};
            // central-difference gradient of the series vs term-wise u
            const double fd = 1e-5;
            const Vec2 grad{(bc_stream({x.x1 + fd, x.x2}, trunc) -
                             bc_stream({x.x1 - fd, x.x2}, trunc)) /
                                (2 * fd),
                            (bc_stream({x.x1, x.x2 + fd}, trunc) -
                             bc_stream({x.x1, x.x2 - fd}, trunc)) /
                                (2 * fd)};
            const Velocity2 u = bc_velocity(x, trunc);
            worst_t = std::max(worst_t, (u - grad.perp()).norm());
            const double r = (x - kSquareCenter).norm();
            if (r <= 0.5)
                worst_q = std::max(worst_q,
                                   (u - bc_velocity_quadratic(x)).norm() / (r * r));
        }
        ok = ok && worst_t < 1e-8;
        detail::check(out, "fields/bc_velocity_gradient", ok,
                      "max |u - grad_perp psi| = " + fmt12(worst_t));
    }
    {  // Taylor bounds on the sampled disk |x - x_c| <= 1/2
        const double psic = bc_stream(kSquareCenter, trunc);
        const double tail_psi = trunc.stream_tail_bound();
        const double tail_u = trunc.velocity_tail_bound();
        double worst_psi = 0.0, worst_u = 0.0;
        for (int ir = 1; ir <= 25; ++ir) {
            const double r = 0.5 * ir / 25.0;
            for (int it = 0; it < 32; ++it) {
                const double th = kTwoPi * it / 32.0;
                const Point2 x = kSquareCenter + Vec2{r * std::cos(th), r * std::sin(th)};
                worst_psi = std::max(worst_psi,
                                     std::abs(bc_stream(x, trunc) - psic - 0.25 * r * r) -
                                         r * r * r / 16.0 - tail_psi);
                worst_u = std::max(worst_u, (bc_velocity(x, trunc) - bc_velocity_quadratic(x)).norm() -
                                                0.25 * r * r - tail_u);
            }
        }
        detail::check(out, "fields/taylor_bounds", worst_psi <= 0.0 && worst_u <= 0.0,
                      "margins: psi " + fmt12(-worst_psi) + ", u " + fmt12(-worst_u));
    }
    return out;
}

inline std::vector<CheckResult> verify_engines(unsigned seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    {  // contour-dynamics velocity of the 512-node circle vs the disk law
        PatchBoundary disk = make_disk_patch(512);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double r = 0.1 + 2.9 * u01(rng);
            const double th = kTwoPi * u01(rng);
            const Point2 x = Vec2{std::cos(th), std::sin(th)} * r;
            worst = std::max(worst, (cd_velocity(x, disk) - disk_velocity(x)).norm());
        }
        detail::check(out, "engines/cd_disk_velocity", worst < 1e-4,
                      "max |u_cd - u_disk| = " + fmt12(worst));
    }
    {  // one RK4 step keeps disk nodes on their radius; zero strength freezes
        FreeRunConfig cfg;
        cfg.dt = 0.005;
        cfg.t_end = cfg.dt;
        cfg.h_min = 0.006;
        cfg.h_max = 0.0125;
        PatchState st;
        st.boundary = make_disk_patch(512);
        free_step(st, cfg);
        double worst_r = 0.0;
        for (const auto& p : st.boundary.components[0].nodes)
            worst_r = std::max(worst_r, std::abs(p.norm() - 1.0));
        FreeRunConfig cfg0 = cfg;  // band fitted to the 128-node spacing
        cfg0.h_min = 0.02;
        cfg0.h_max = 0.06;
        PatchState frozen;
        frozen.boundary = make_disk_patch(128);
        frozen.boundary.strength = 0.0;
        const MarkedCurve before = frozen.boundary.components[0];
        free_step(frozen, cfg0);
        double moved = 0.0;
        for (std::size_t i = 0; i < before.nodes.size(); ++i)
            moved = std::max(moved,
                             (frozen.boundary.components[0].nodes[i] - before.nodes[i]).norm());
        detail::check(out, "engines/disk_step", worst_r < 1e-10 && moved == 0.0,
                      "radius drift " + fmt12(worst_r));
    }
    {  // Kirchhoff: one eighth period matches rigid rotation at ab/(a+b)^2
        FreeRunConfig cfg;
        cfg.dt = 0.0075;
        cfg.h_min = 0.008;
        cfg.h_max = 0.02;
        const double om = kirchhoff_rotation_rate(1.0, 0.5);
        const double period = kTwoPi / om;
        cfg.t_end = std::round(period / 8.0 / cfg.dt) * cfg.dt;
        cfg.output_stride = 1 << 20;
        cfg.threads = 2;
        PatchState st;
        st.boundary = make_kirchhoff_patch(1.0, 0.5, cfg.h_max);
        const MarkedCurve initial = st.boundary.components[0];
        auto res = run_free(cfg, st, {ContainmentMode::plane_rings, 0.25});
        MarkedCurve expect = initial;
        const double ang = om * cfg.t_end;
        for (auto& p : expect.nodes)
            p = {std::cos(ang) * p.x1 - std::sin(ang) * p.x2,
                 std::sin(ang) * p.x1 + std::cos(ang) * p.x2};
        const double hd = hausdorff_distance(res.final_state.boundary.components[0], expect);
        detail::check(out, "engines/kirchhoff_eighth_period", hd < 2e-3,
                      "hausdorff vs rigid rotation = " + fmt12(hd));
    }
    {  // spectral solve: eigenfunction, zero field, rasterized area
        const int n = 128;
        GridField w(n, GridField::Kind::vorticity);
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i)
                w.at(i, j) = std::sin(i * w.h()) * std::sin(j * w.h());
        GridField psi = solve_stream_dirichlet(w);
        double worst = 0.0;
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i)
                worst = std::max(worst, std::abs(psi.at(i, j) + 0.5 * w.at(i, j)));
        GridField z(n, GridField::Kind::vorticity);
        auto [u1, u2] = solve_velocity(z);
        const bool zero_ok = u1.max_abs() == 0.0 && u2.max_abs() == 0.0;
        PatchBoundary disk = make_disk_patch(256, 0.8, kSquareCenter);
        const GridField r = rasterize(disk, 256);
        const double area_err = std::abs(r.integral() - polygon_area(disk.components[0]));
        detail::check(out, "engines/spectral_solve", worst < 1e-13 && zero_ok &&
                          area_err < kTwoPi * 0.8 * (kPi / 256),
                      "eigenfunction err " + fmt12(worst) + ", raster area err " +
                          fmt12(area_err));
    }
    {  // frozen BC advection: fixed endpoints, near 4-pi period marker
        const GridField psi = bc_stream_field(256, SpectralTruncation{399});
        const double T = measure_period(psi, kSquareCenter + Vec2{0.125, 0.0}, kSquareCenter,
                                        0.005, 40.0);
        const bool period_ok = std::abs(T - 4.0 * kPi) < 0.15 * 4.0 * kPi;
        const Velocity2 at_corner = stream_velocity_bicubic(psi, {0, 0});
        const Velocity2 at_center = stream_velocity_bicubic(psi, kSquareCenter);
        detail::check(out, "engines/bc_marker_period", period_ok &&
                          at_corner.norm() == 0.0 && at_center.norm() < 1e-12,
                      "T = " + fmt12(T) + " vs 4pi = " + fmt12(4.0 * kPi));
    }
    return out;
}

inline std::vector<CheckResult> verify_suite(const std::string& which, unsigned seed) {
    std::vector<CheckResult> all;
    const auto append = [&](std::vector<CheckResult> v) {
        for (auto& r : v) all.push_back(std::move(r));
    };
    if (which == "geometry" || which == "all") append(verify_geometry(seed));
    if (which == "fields" || which == "all") append(verify_fields(seed + 1));
    if (which == "engines" || which == "all") append(verify_engines(seed + 2));
    if (all.empty()) throw ConfigError("verify: unknown suite '" + which + "'");
    return all;
}

}  // namespace patchwind
