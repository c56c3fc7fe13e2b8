#pragma once

#include <array>
#include <cmath>
#include <string>

namespace relepr {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
    constexpr explicit Vec3(const std::array<double, 3>& c) : x(c[0]), y(c[1]), z(c[2]) {}

    constexpr std::array<double, 3> array() const { return {x, y, z}; }

    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

constexpr double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

bool is_finite(const Vec3& a);

std::string to_string(const Vec3& a);

/// Unit 3-vector: a measurement axis or a unit velocity direction.
///
/// Inputs within 1e-6 of unit length are renormalized; anything farther
/// is rejected with DomainError.
class Direction {
public:
    static constexpr double kNormSlack = 1e-6;

    /// z axis
    constexpr Direction() : v_{0.0, 0.0, 1.0} {}
    explicit Direction(const Vec3& v);
    Direction(double x, double y, double z) : Direction(Vec3{x, y, z}) {}

    /// Normalizes any non-zero finite vector.
    static Direction normalized(const Vec3& v);
    /// (sin p cos a, sin p sin a, cos p) for azimuth a and polar angle p.
    static Direction spherical(double azimuth, double polar);

    constexpr const Vec3& vec() const { return v_; }
    constexpr operator const Vec3&() const { return v_; }
    Direction operator-() const { return Direction::unchecked(-v_); }

private:
    static Direction unchecked(const Vec3& v)
    {
        Direction d;
        d.v_ = v;
        return d;
    }
    Vec3 v_;
};

/// 3-velocity in units of c with |v| < 1.
class Velocity {
public:
    constexpr Velocity() = default;
    explicit Velocity(const Vec3& v);
    Velocity(double x, double y, double z) : Velocity(Vec3{x, y, z}) {}

    static Velocity along(const Direction& dir, double speed);

    constexpr const Vec3& vec() const { return v_; }
    constexpr operator const Vec3&() const { return v_; }
    double speed() const { return norm(v_); }
    /// 1 / sqrt(1 - v²)
    double gamma() const { return 1.0 / std::sqrt(1.0 - norm2(v_)); }
    Velocity operator-() const { return Velocity(-v_); }

private:
    Vec3 v_;
};

}  // namespace relepr
