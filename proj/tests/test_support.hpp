#pragma once

// Shared test oracles.  These deliberately avoid the implementation paths
// they are used to check: the Poisson oracle is a finite-difference solve,
// the velocity oracle is area quadrature of the Biot-Savart kernel, and the
// segment-integral oracle is adaptive Simpson quadrature.

#include <fftw3.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "patchwind/core.hpp"
#include "patchwind/curve.hpp"
#include "patchwind/grid.hpp"

namespace pwtest {

using namespace patchwind;

// Exact solution of the 5-point finite-difference Dirichlet problem
// (diagonalized by DST with the discrete cosine eigenvalues).  Independent
// discretization from the spectral solver and from the sine series.
inline GridField fd_poisson_dirichlet(const GridField& rhs) {
    const int n = rhs.n;
    const int N = n - 1;
    const double h = kPi / n;
    std::vector<double> buf(static_cast<std::size_t>(N) * N);
    for (int k = 1; k <= N; ++k)
        for (int j = 1; j <= N; ++j)
            buf[static_cast<std::size_t>(k - 1) * N + (j - 1)] = rhs.at(j, k);
    fftw_plan plan = fftw_plan_r2r_2d(N, N, buf.data(), buf.data(), FFTW_RODFT00, FFTW_RODFT00,
                                      FFTW_ESTIMATE);
    fftw_execute(plan);
    const double scale = 1.0 / (4.0 * static_cast<double>(n) * n);
    for (int k = 1; k <= N; ++k)
        for (int j = 1; j <= N; ++j) {
            const double lj = (2.0 - 2.0 * std::cos(j * kPi / n)) / (h * h);
            const double lk = (2.0 - 2.0 * std::cos(k * kPi / n)) / (h * h);
            buf[static_cast<std::size_t>(k - 1) * N + (j - 1)] *= -scale / (lj + lk);
        }
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    GridField psi(n, GridField::Kind::stream);
    for (int k = 1; k <= N; ++k)
        for (int j = 1; j <= N; ++j) psi.at(j, k) = buf[static_cast<std::size_t>(k - 1) * N + (j - 1)];
    return psi;
}

// Adaptive Simpson quadrature for the log-kernel segment integral.
inline double simpson_log_integral(Point2 x, Point2 a, Point2 b) {
    const Vec2 ab = b - a;
    const double L = ab.norm();
    const auto f = [&](double s) {
        const double r = (x - (a + ab * (s / L))).norm();
        return r > 0.0 ? std::log(r) : -60.0;  // integrable endpoint, clipped
    };
    std::function<double(double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, int depth) -> double {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (depth > 24 || std::abs(left + right - whole) < 1e-12)
            return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, flo, flm, fmid, depth + 1) + rec(mid, hi, fmid, frm, fhi, depth + 1);
    };
    return rec(0.0, L, f(0.0), f(0.5 * L), f(L), 0);
}

// Velocity of a unit-strength elliptical patch by brute-force area
// quadrature, skipping a symmetric neighbourhood of the evaluation point
// (constant vorticity there gives zero principal value).
inline Velocity2 ellipse_velocity_quadrature(Point2 x, double a, double b, int cells_x) {
    const double hx = 2.0 * a / cells_x;
    const int cells_y = static_cast<int>(std::ceil(2.0 * b / hx));
    const double hy = 2.0 * b / cells_y;
    const double excl2 = 16.0 * hx * hx;
    Vec2 acc{0.0, 0.0};
    for (int j = 0; j < cells_y; ++j) {
        const double y2 = -b + (j + 0.5) * hy;
        for (int i = 0; i < cells_x; ++i) {
            const double y1 = -a + (i + 0.5) * hx;
            if ((y1 * y1) / (a * a) + (y2 * y2) / (b * b) > 1.0) continue;
            const Vec2 d{x.x1 - y1, x.x2 - y2};
            const double r2 = d.norm2();
            if (r2 < excl2) continue;
            acc += d.perp() / r2;
        }
    }
    return acc * (hx * hy / kTwoPi);
}

// Two-turn spiral r = 1 + theta/2pi, theta in [0, 4pi] (fine discretization).
inline MarkedCurve two_turn_spiral(int n = 4096) {
    MarkedCurve s;
    s.closed = false;
    for (int i = 0; i <= n; ++i) {
        const double th = 4.0 * kPi * static_cast<double>(i) / n;
        const double r = 1.0 + th / kTwoPi;
        s.nodes.push_back({r * std::cos(th), r * std::sin(th)});
    }
    return s;
}

// Random odd-odd vorticity sample built from signed bumps (used by the
// interpolation-inequality property suite).  Values are taken on the open
// quarter-cell; the odd extension is implicit in the solver.
inline GridField random_bump_field(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<int> nblob(1, 5);
    GridField f(n, GridField::Kind::vorticity);
    const int blobs = nblob(rng);
    struct Blob {
        Point2 c;
        double r, amp;
    };
    std::vector<Blob> bs;
    for (int b = 0; b < blobs; ++b) {
        Blob bl;
        bl.c = {0.2 + (kPi - 0.4) * u01(rng), 0.2 + (kPi - 0.4) * u01(rng)};
        bl.r = 0.05 + 0.95 * u01(rng);
        bl.amp = (u01(rng) < 0.5 ? -1.0 : 1.0) * (0.2 + 0.8 * u01(rng));
        bs.push_back(bl);
    }
    const double h = f.h();
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            double v = 0.0;
            for (const auto& bl : bs) {
                const double d2 = (Point2{i * h, j * h} - bl.c).norm2();
                if (d2 < bl.r * bl.r) v += bl.amp;
            }
            f.at(i, j) = std::clamp(v, -1.0, 1.0);
        }
    return f;
}

}  // namespace pwtest
