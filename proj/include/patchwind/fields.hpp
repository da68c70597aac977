#pragma once

#include <cmath>
#include <vector>

#include "patchwind/core.hpp"

namespace patchwind {

// ---------------------------------------------------------------------------
// Closed-form reference fields
// ---------------------------------------------------------------------------

// K(x) = (1/2pi) x^perp / |x|^2
inline Velocity2 biot_savart_kernel(Point2 x) {
    const double r2 = x.norm2();
    if (r2 == 0.0) throw SingularKernelError("biot_savart_kernel: x = 0");
    return x.perp() * (1.0 / (kTwoPi * r2));
}

// Velocity of the unit-disk patch (Rankine vortex): purely tangential,
// |x|/2 inside and 1/(2|x|) outside, continuous across |x| = 1.
inline Velocity2 disk_velocity(Point2 x) {
    const double r = x.norm();
    if (r == 0.0) return {0.0, 0.0};
    const double u_tan = (r <= 1.0) ? 0.5 * r : 0.5 / r;
    return x.perp() * (u_tan / r);
}

// omega^BC(x) = sgn(x1) sgn(x2); zero on the axes.
inline double bc_vorticity(Point2 x) {
    const auto sgn = [](double v) { return (v > 0.0) - (v < 0.0); };
    return static_cast<double>(sgn(x.x1) * sgn(x.x2));
}

// ---------------------------------------------------------------------------
// Bahouri-Chemin stream function on (0,pi)^2 as an odd-odd sine series.
//
//   psi(x) = sum_{m,n odd} c_mn sin(m x1) sin(n x2),
//   c_mn   = -(16/pi^2) / (m n (m^2+n^2)),
//
// which solves  Delta psi = 1  in (0,pi)^2, psi = 0 on the boundary; the
// odd-odd extension to the torus then solves Delta psi = sgn(x1)sgn(x2).
// ---------------------------------------------------------------------------

struct SpectralTruncation {
    int max_mode = 399;  // both sine indices run over odd values <= max_mode

    SpectralTruncation() = default;
    explicit SpectralTruncation(int m) : max_mode(m) {
        if (m < 1 || m % 2 == 0)
            throw DomainError("SpectralTruncation: max_mode must be odd and >= 1");
    }

    // Conservative absolute bound on the discarded stream-series tail.
    double stream_tail_bound() const {
        const double M = static_cast<double>(max_mode);
        return (16.0 / (kPi * kPi)) * (std::log(M) + 4.0) / (2.0 * M * M);
    }
    // Conservative bound on the discarded velocity tail (one power worse).
    double velocity_tail_bound() const {
        const double M = static_cast<double>(max_mode);
        return (16.0 / (kPi * kPi)) * (kPi / 2.0) / M;
    }
};

namespace detail {

// sin(kx) and cos(kx) for odd k = 1, 3, ..., M via the two-step recurrence
// f((k+2)x) = 2 cos(2x) f(kx) - f((k-2)x).
struct OddHarmonics {
    std::vector<double> s;  // s[j] = sin((2j+1) x)
    std::vector<double> c;  // c[j] = cos((2j+1) x)

    OddHarmonics(double x, int max_mode) {
        const int count = (max_mode + 1) / 2;
        s.resize(count);
        c.resize(count);
        const double s1 = std::sin(x), c1 = std::cos(x);
        const double r = 2.0 * std::cos(2.0 * x);
        double s_prev = -s1, c_prev = c1;  // k = -1 terms
        double s_cur = s1, c_cur = c1;     // k = +1 terms
        for (int j = 0; j < count; ++j) {
            s[j] = s_cur;
            c[j] = c_cur;
            const double s_next = r * s_cur - s_prev;
            const double c_next = r * c_cur - c_prev;
            s_prev = s_cur;
            c_prev = c_cur;
            s_cur = s_next;
            c_cur = c_next;
        }
    }
};

inline double bc_coeff(int m, int n) {
    const double dm = m, dn = n;
    return -(16.0 / (kPi * kPi)) / (dm * dn * (dm * dm + dn * dn));
}

}  // namespace detail

inline double bc_stream(Point2 x, const SpectralTruncation& trunc = {}) {
    const detail::OddHarmonics h1(x.x1, trunc.max_mode);
    const detail::OddHarmonics h2(x.x2, trunc.max_mode);
    double psi = 0.0;
    for (int m = 1; m <= trunc.max_mode; m += 2) {
        const double sm = h1.s[(m - 1) / 2];
        if (sm == 0.0) continue;
        double inner = 0.0;
        for (int n = 1; n <= trunc.max_mode; n += 2)
            inner += detail::bc_coeff(m, n) * h2.s[(n - 1) / 2];
        psi += sm * inner;
    }
    return psi;
}

// u^BC = grad^perp psi^BC, summed term-wise (analytic derivatives).
inline Velocity2 bc_velocity(Point2 x, const SpectralTruncation& trunc = {}) {
    const detail::OddHarmonics h1(x.x1, trunc.max_mode);
    const detail::OddHarmonics h2(x.x2, trunc.max_mode);
    double u1 = 0.0, u2 = 0.0;
    for (int m = 1; m <= trunc.max_mode; m += 2) {
        const double sm = h1.s[(m - 1) / 2];
        const double cm = h1.c[(m - 1) / 2];
        double du1 = 0.0, du2 = 0.0;
        for (int n = 1; n <= trunc.max_mode; n += 2) {
            const double coef = detail::bc_coeff(m, n);
            du1 -= coef * n * h2.c[(n - 1) / 2];  // -d(psi)/dx2 terms
            du2 += coef * m * h2.s[(n - 1) / 2];  // +d(psi)/dx1 terms
        }
        u1 += sm * du1;
        u2 += cm * du2;
    }
    return {u1, u2};
}

// Rigid-rotation model of u^BC about the square center (rate 1/2).
inline Velocity2 bc_velocity_quadratic(Point2 x) {
    return {-0.5 * (x.x2 - kSquareCenter.x2), 0.5 * (x.x1 - kSquareCenter.x1)};
}

// Stream samples on the (n+1)^2 uniform grid over [0,pi]^2, exploiting the
// tensor structure of the series (cost ~ M n^2 / 2, not M^2 n^2).
inline std::vector<double> bc_stream_grid(int n, const SpectralTruncation& trunc = {}) {
    const int pts = n + 1;
    const double h = kPi / n;
    const int count = (trunc.max_mode + 1) / 2;
    // sin(m x_i) table for odd m and all grid abscissae.
    std::vector<double> sin_tab(static_cast<std::size_t>(count) * pts);
    for (int i = 0; i < pts; ++i) {
        const detail::OddHarmonics h1(i * h, trunc.max_mode);
        for (int j = 0; j < count; ++j) sin_tab[static_cast<std::size_t>(j) * pts + i] = h1.s[j];
    }
    // G[m][j] = sum_n c_mn sin(n x_j)
    std::vector<double> G(static_cast<std::size_t>(count) * pts, 0.0);
    for (int jm = 0; jm < count; ++jm) {
        const int m = 2 * jm + 1;
        for (int jn = 0; jn < count; ++jn) {
            const int nn = 2 * jn + 1;
            const double coef = detail::bc_coeff(m, nn);
            const double* srow = &sin_tab[static_cast<std::size_t>(jn) * pts];
            double* grow = &G[static_cast<std::size_t>(jm) * pts];
            for (int j = 0; j < pts; ++j) grow[j] += coef * srow[j];
        }
    }
    std::vector<double> psi(static_cast<std::size_t>(pts) * pts, 0.0);
    for (int jm = 0; jm < count; ++jm) {
        const double* srow = &sin_tab[static_cast<std::size_t>(jm) * pts];
        const double* grow = &G[static_cast<std::size_t>(jm) * pts];
        for (int j = 0; j < pts; ++j) {
            const double gj = grow[j];
            if (gj == 0.0) continue;
            double* prow = &psi[static_cast<std::size_t>(j) * pts];
            for (int i = 0; i < pts; ++i) prow[i] += srow[i] * gj;
        }
    }
    return psi;
}

}  // namespace patchwind
