#pragma once

#include <fftw3.h>

#include <cstddef>
#include <utility>
#include <vector>

#include "patchwind/core.hpp"

namespace patchwind {

// ---------------------------------------------------------------------------
// GridField: samples on the uniform (n+1)^2 node grid over [0,pi]^2, nodes at
// x_i = i*pi/n.  Values on the axes/boundary represent the odd-odd extension
// to the torus (stream and vorticity vanish there identically).
// ---------------------------------------------------------------------------

struct GridField {
    enum class Kind { vorticity, stream, velocity_component };

    int n = 0;  // cells per side; node count per side is n+1
    Kind kind = Kind::vorticity;
    std::vector<double> v;  // row-major, v[j*(n+1)+i] = value at (i*h, j*h)

    GridField() = default;
    GridField(int n_, Kind k) : n(n_), kind(k), v(static_cast<std::size_t>(n_ + 1) * (n_ + 1), 0.0) {}

    double h() const { return kPi / n; }
    double& at(int i, int j) { return v[static_cast<std::size_t>(j) * (n + 1) + i]; }
    double at(int i, int j) const { return v[static_cast<std::size_t>(j) * (n + 1) + i]; }

    double max_abs() const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    // Sum of interior samples times cell area (the discrete integral).
    double integral() const {
        double s = 0.0;
        for (int j = 1; j < n; ++j)
            for (int i = 1; i < n; ++i) s += at(i, j);
        return s * h() * h();
    }
};

// ---------------------------------------------------------------------------
// FFTW r2r plans for the odd-odd Dirichlet problem.  RODFT00 (DST-I) on the
// (n-1)^2 interior nodes diagonalizes the Laplacian with eigenfunctions
// sin(j x1) sin(k x2); REDFT00 passes evaluate the cosine series needed for
// spectral derivatives on the full (n+1)-point axis.
// All plans use FFTW_ESTIMATE so planning is reproducible run to run.
// ---------------------------------------------------------------------------

class DirichletSpectral {
public:
    explicit DirichletSpectral(int n) : n_(n), buf_(static_cast<std::size_t>(n - 1) * (n - 1)) {
        const int N = n_ - 1;
        dst2d_ = fftw_plan_r2r_2d(N, N, buf_.data(), buf_.data(), FFTW_RODFT00, FFTW_RODFT00,
                                  FFTW_ESTIMATE);
        // 1-D passes for velocity grids: DCT-I over rows of length n+1, and
        // DST-I over columns of length n-1, both batched.
        cos_buf_.assign(static_cast<std::size_t>(N) * (n_ + 1), 0.0);
        {
            int sz = n_ + 1;
            fftw_r2r_kind kind = FFTW_REDFT00;
            dct_rows_ = fftw_plan_many_r2r(1, &sz, N, cos_buf_.data(), nullptr, 1, sz,
                                           cos_buf_.data(), nullptr, 1, sz, &kind, FFTW_ESTIMATE);
        }
        sin_buf_.assign(static_cast<std::size_t>(n_ + 1) * N, 0.0);
        {
            int sz = N;
            fftw_r2r_kind kind = FFTW_RODFT00;
            dst_cols_ = fftw_plan_many_r2r(1, &sz, n_ + 1, sin_buf_.data(), nullptr, 1, sz,
                                           sin_buf_.data(), nullptr, 1, sz, &kind, FFTW_ESTIMATE);
        }
    }

    ~DirichletSpectral() {
        fftw_destroy_plan(dst2d_);
        fftw_destroy_plan(dct_rows_);
        fftw_destroy_plan(dst_cols_);
    }
    DirichletSpectral(const DirichletSpectral&) = delete;
    DirichletSpectral& operator=(const DirichletSpectral&) = delete;

    int n() const { return n_; }

    // Solve Delta psi = omega with psi = 0 on the boundary of [0,pi]^2,
    // dividing DST coefficients by the analytic eigenvalues -(j^2+k^2).
    GridField solve_stream(const GridField& vorticity) {
        if (vorticity.n != n_) throw DomainError("DirichletSpectral: grid size mismatch");
        coeffs_from(vorticity);
        const int N = n_ - 1;
        const double scale = 1.0 / (4.0 * static_cast<double>(n_) * n_);
        for (int k = 1; k <= N; ++k)
            for (int j = 1; j <= N; ++j)
                buf_[idx(j, k)] *= -scale / (static_cast<double>(j) * j + static_cast<double>(k) * k);
        // buf_ now holds scaled psi-hat; a second DST evaluates the series.
        GridField psi(n_, GridField::Kind::stream);
        fftw_execute(dst2d_);
        for (int k = 1; k <= N; ++k)
            for (int j = 1; j <= N; ++j) psi.at(j, k) = buf_[idx(j, k)];
        return psi;
    }

    // Spectral coefficients a_jk of psi (basis sin(j x1) sin(k x2)) from a
    // vorticity grid, left in an internal buffer for velocity evaluation.
    // Returns psi and fills u = grad^perp psi on the full node grid.
    std::pair<GridField, GridField> velocity_from_vorticity(const GridField& vorticity,
                                                            GridField* psi_out = nullptr) {
        if (vorticity.n != n_) throw DomainError("DirichletSpectral: grid size mismatch");
        coeffs_from(vorticity);
        const int N = n_ - 1;
        const double scale = 1.0 / (4.0 * static_cast<double>(n_) * n_);
        // a[j][k], packed like buf_
        std::vector<double> a(buf_);
        for (int k = 1; k <= N; ++k)
            for (int j = 1; j <= N; ++j)
                a[idx(j, k)] *= -scale / (static_cast<double>(j) * j + static_cast<double>(k) * k);

        if (psi_out != nullptr) {
            buf_ = a;
            fftw_execute(dst2d_);
            *psi_out = GridField(n_, GridField::Kind::stream);
            for (int k = 1; k <= N; ++k)
                for (int j = 1; j <= N; ++j) psi_out->at(j, k) = buf_[idx(j, k)];
        }

        // u1 = -dpsi/dx2 = sum_jk (-k a_jk) sin(j x1) cos(k x2)
        GridField u1(n_, GridField::Kind::velocity_component);
        mixed_eval(a, /*deriv_axis=*/2, u1);
        // u2 = +dpsi/dx1 = sum_jk (+j a_jk) cos(j x1) sin(k x2)
        GridField u2(n_, GridField::Kind::velocity_component);
        mixed_eval(a, /*deriv_axis=*/1, u2);
        return {std::move(u1), std::move(u2)};
    }

private:
    std::size_t idx(int j, int k) const {  // 1-based mode/node indices
        return static_cast<std::size_t>(k - 1) * (n_ - 1) + (j - 1);
    }

    // Forward DST of the interior samples into buf_ (unnormalized FFTW sums).
    void coeffs_from(const GridField& f) {
        const int N = n_ - 1;
        for (int k = 1; k <= N; ++k)
            for (int j = 1; j <= N; ++j) buf_[idx(j, k)] = f.at(j, k);
        fftw_execute(dst2d_);
    }

    // Evaluate sum_jk b_jk sin(.) cos(.) patterns on the full grid, where the
    // cosine factor sits on deriv_axis and b includes the mode-number weight.
    // The stored coefficients carry 1/(4 n^2); each FFTW pass contributes a
    // factor 2, so the two passes restore the true series values.
    void mixed_eval(const std::vector<double>& a, int deriv_axis, GridField& out) {
        const int N = n_ - 1;
        const int pts = n_ + 1;
        if (deriv_axis == 2) {
            // Row r of cos_buf_ is the k-coefficient vector for fixed j,
            // padded with zeros at k = 0 and k = n.  REDFT00 gives
            // Y_i = 2 sum_k X_k cos(k i pi / n).
            std::fill(cos_buf_.begin(), cos_buf_.end(), 0.0);
            for (int j = 1; j <= N; ++j)
                for (int k = 1; k <= N; ++k)
                    cos_buf_[static_cast<std::size_t>(j - 1) * pts + k] = -k * a[idx(j, k)];
            fftw_execute(dct_rows_);
            // Now transform along j (DST) for every x2 node; sin vanishes at
            // i = 0, n so u1 is zero on the x1 walls automatically.
            std::fill(sin_buf_.begin(), sin_buf_.end(), 0.0);
            for (int i2 = 0; i2 < pts; ++i2)
                for (int j = 1; j <= N; ++j)
                    sin_buf_[static_cast<std::size_t>(i2) * N + (j - 1)] =
                        cos_buf_[static_cast<std::size_t>(j - 1) * pts + i2];
            fftw_execute(dst_cols_);
            for (int i2 = 0; i2 < pts; ++i2)
                for (int i1 = 1; i1 <= N; ++i1)
                    out.at(i1, i2) = sin_buf_[static_cast<std::size_t>(i2) * N + (i1 - 1)];
        } else {
            std::fill(cos_buf_.begin(), cos_buf_.end(), 0.0);
            for (int k = 1; k <= N; ++k)
                for (int j = 1; j <= N; ++j)
                    cos_buf_[static_cast<std::size_t>(k - 1) * pts + j] = j * a[idx(j, k)];
            fftw_execute(dct_rows_);
            std::fill(sin_buf_.begin(), sin_buf_.end(), 0.0);
            for (int i1 = 0; i1 < pts; ++i1)
                for (int k = 1; k <= N; ++k)
                    sin_buf_[static_cast<std::size_t>(i1) * N + (k - 1)] =
                        cos_buf_[static_cast<std::size_t>(k - 1) * pts + i1];
            fftw_execute(dst_cols_);
            for (int i1 = 0; i1 < pts; ++i1)
                for (int i2 = 1; i2 <= N; ++i2)
                    out.at(i1, i2) = sin_buf_[static_cast<std::size_t>(i1) * N + (i2 - 1)];
        }
    }

    int n_;
    std::vector<double> buf_;
    std::vector<double> cos_buf_;
    std::vector<double> sin_buf_;
    fftw_plan dst2d_ = nullptr;
    fftw_plan dct_rows_ = nullptr;
    fftw_plan dst_cols_ = nullptr;
};

// One-shot convenience wrappers.
inline GridField solve_stream_dirichlet(const GridField& vorticity) {
    DirichletSpectral solver(vorticity.n);
    return solver.solve_stream(vorticity);
}

inline std::pair<GridField, GridField> solve_velocity(const GridField& vorticity) {
    DirichletSpectral solver(vorticity.n);
    return solver.velocity_from_vorticity(vorticity);
}

// ---------------------------------------------------------------------------
// C1 bicubic (Catmull-Rom) sampling of a grid scalar with odd-odd ghost
// extension.  The gradient of the interpolant is analytic, so velocities
// derived as grad^perp of an interpolated stream function are divergence-free
// and keep the domain walls exact streamlines.
// ---------------------------------------------------------------------------

namespace detail {

// Value with odd reflection across all four walls (psi and vorticity both
// extend odd; velocity grids must not use this sampler across walls).
inline double odd_sample(const GridField& g, int i, int j) {
    const int n = g.n;
    double sign = 1.0;
    if (i < 0) { i = -i; sign = -sign; }
    if (i > n) { i = 2 * n - i; sign = -sign; }
    if (j < 0) { j = -j; sign = -sign; }
    if (j > n) { j = 2 * n - j; sign = -sign; }
    return sign * g.at(i, j);
}

inline void catmull_rom_weights(double t, double w[4], double dw[4]) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
    w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
    w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
    dw[0] = 0.5 * (-3.0 * t2 + 4.0 * t - 1.0);
    dw[1] = 0.5 * (9.0 * t2 - 10.0 * t);
    dw[2] = 0.5 * (-9.0 * t2 + 8.0 * t + 1.0);
    dw[3] = 0.5 * (3.0 * t2 - 2.0 * t);
}

}  // namespace detail

struct SampledValue {
    double value = 0.0;
    Vec2 gradient;
};

inline SampledValue bicubic_sample(const GridField& g, Point2 p) {
    const int n = g.n;
    const double h = g.h();
    double fx = p.x1 / h, fy = p.x2 / h;
    int i0 = static_cast<int>(std::floor(fx));
    int j0 = static_cast<int>(std::floor(fy));
    i0 = std::clamp(i0, 0, n - 1);
    j0 = std::clamp(j0, 0, n - 1);
    const double tx = fx - i0, ty = fy - j0;
    double wx[4], dwx[4], wy[4], dwy[4];
    detail::catmull_rom_weights(tx, wx, dwx);
    detail::catmull_rom_weights(ty, wy, dwy);
    double val = 0.0, gx = 0.0, gy = 0.0;
    for (int b = 0; b < 4; ++b) {
        double row = 0.0, drow = 0.0;
        for (int a = 0; a < 4; ++a) {
            const double s = detail::odd_sample(g, i0 - 1 + a, j0 - 1 + b);
            row += wx[a] * s;
            drow += dwx[a] * s;
        }
        val += wy[b] * row;
        gx += wy[b] * drow;
        gy += dwy[b] * row;
    }
    return {val, {gx / h, gy / h}};
}

inline double bilinear_sample(const GridField& g, Point2 p) {
    const int n = g.n;
    const double h = g.h();
    double fx = p.x1 / h, fy = p.x2 / h;
    int i0 = std::clamp(static_cast<int>(std::floor(fx)), 0, n - 1);
    int j0 = std::clamp(static_cast<int>(std::floor(fy)), 0, n - 1);
    const double tx = fx - i0, ty = fy - j0;
    return (1 - tx) * (1 - ty) * g.at(i0, j0) + tx * (1 - ty) * g.at(i0 + 1, j0) +
           (1 - tx) * ty * g.at(i0, j0 + 1) + tx * ty * g.at(i0 + 1, j0 + 1);
}

}  // namespace patchwind
