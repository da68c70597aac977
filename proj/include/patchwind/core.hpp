#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace patchwind {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Plane vectors.  Points, displacements and velocities share one value type;
// the distinction lives in the function signatures.
// ---------------------------------------------------------------------------

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double a, double b) : x1(a), x2(b) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x1 + o.x1, x2 + o.x2}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x1 - o.x1, x2 - o.x2}; }
    constexpr Vec2 operator*(double s) const { return {x1 * s, x2 * s}; }
    constexpr Vec2 operator/(double s) const { return {x1 / s, x2 / s}; }
    constexpr Vec2& operator+=(Vec2 o) { x1 += o.x1; x2 += o.x2; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x1 -= o.x1; x2 -= o.x2; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    // 90-degree counterclockwise rotation, x^perp = (-x2, x1).
    constexpr Vec2 perp() const { return {-x2, x1}; }

    double norm() const { return std::hypot(x1, x2); }
    constexpr double norm2() const { return x1 * x1 + x2 * x2; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x1 * b.x2 - a.x2 * b.x1; }

using Point2 = Vec2;
using Velocity2 = Vec2;

inline bool is_finite(Vec2 v) { return std::isfinite(v.x1) && std::isfinite(v.x2); }

// Decomposition u = u_rad * x/|x| + u_tan * x^perp/|x| about a center.
inline double radial_component(Velocity2 u, Point2 x, Point2 center = {}) {
    const Vec2 r = x - center;
    const double n = r.norm();
    return n == 0.0 ? 0.0 : dot(u, r) / n;
}

inline double tangential_component(Velocity2 u, Point2 x, Point2 center = {}) {
    const Vec2 r = x - center;
    const double n = r.norm();
    return n == 0.0 ? 0.0 : dot(u, r.perp()) / n;
}

// Distinguished points of the quarter-cell [0,pi]^2.
inline constexpr Point2 kOrigin{0.0, 0.0};
inline constexpr Point2 kSquareCenter{kPi / 2.0, kPi / 2.0};

// ---------------------------------------------------------------------------
// Error taxonomy.  Every precondition violation maps to one of these.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidCurveError : Error {
    using Error::Error;
};

// Angle lifting hit a segment subtending >= pi at the center (or through it).
struct RefinementRequiredError : Error {
    using Error::Error;
};

struct DegenerateCurveError : Error {
    using Error::Error;
};

struct SingularKernelError : Error {
    using Error::Error;
};

struct InsufficientDataError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

// Generator could not meet its area budget; carries achieved vs. required.
struct GenerationError : Error {
    GenerationError(const std::string& what, double achieved_, double required_)
        : Error(what), achieved(achieved_), required(required_) {}
    double achieved = 0.0;
    double required = 0.0;
};

struct IoError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace patchwind
