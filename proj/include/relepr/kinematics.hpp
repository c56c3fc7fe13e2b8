#pragma once

#include <array>
#include <utility>

#include "relepr/vec3.hpp"

namespace relepr {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Pure Lorentz boost, row-major, signature (+,-,-,-).
///
/// Acting on column four-vectors (t, x, y, z), boost(u) maps the rest vector
/// (1, 0, 0, 0) to the four-velocity (γ, γu).
class Boost4 {
public:
    explicit Boost4(const Velocity& u);

    const Mat4& matrix() const { return m_; }
    double operator()(int row, int col) const { return m_[row][col]; }
    Vec4 operator*(const Vec4& x) const;
    Mat4 operator*(const Mat4& x) const;
    Mat4 operator*(const Boost4& x) const { return *this * x.m_; }
    const Velocity& velocity() const { return u_; }
    Boost4 inverse() const { return Boost4(-u_); }

private:
    Velocity u_;
    Mat4 m_{};
};

/// Proper orthogonal 3x3 matrix.
class Rotation3 {
public:
    Rotation3();
    explicit Rotation3(const Mat3& m) : m_(m) {}

    const Mat3& matrix() const { return m_; }
    double operator()(int row, int col) const { return m_[row][col]; }
    Vec3 operator*(const Vec3& v) const;
    Rotation3 transpose() const;
    double determinant() const;
    /// Rotation angle in [0, π], accurate for small angles.
    double angle() const;
    /// max |RᵀR - I| entry
    double orthogonality_defect() const;

private:
    Mat3 m_;
};

Mat4 multiply(const Mat4& lhs, const Mat4& rhs);
Mat4 minkowski_metric();

/// Pure boost with velocity u. Throws DomainError("superluminal velocity")
/// when |u| >= 1 (enforced by Velocity).
Boost4 boost_matrix(const Velocity& u);

/// Velocity whose four-velocity is boost(w) · (γ_u, γ_u u).
Velocity compose_velocity(const Velocity& u, const Velocity& w);

/// Velocity extracted from a timelike four-vector.
Velocity velocity_of(const Vec4& four);

struct WignerResult {
    Rotation3 rotation;
    Velocity u_b;  ///< preferred-frame velocity seen by Bob
};

/// Wigner rotation relating the spin frames of two observers.
///
/// `u_a` is the preferred-frame velocity in Alice's frame and `v_rel` is
/// Bob's velocity measured in Alice's frame, so Λ = boost(v_rel)⁻¹ takes
/// Alice's coordinates to Bob's. Returns the spatial block of
/// boost(u_B)⁻¹ Λ boost(u_A), which fixes the time axis.
WignerResult wigner_rotation(const Velocity& u_a, const Velocity& v_rel);

/// Inverse problem of wigner_rotation: the relative velocity v_rel for which
/// the preferred frame moves with `u_b` in Bob's frame. Solved by fixed-point
/// iteration to round-off.
Velocity relative_velocity_for(const Velocity& u_a, const Velocity& u_b);

inline constexpr double kProtonMassMeV = 938.272;

/// Speed (units of c) of a particle with kinetic energy T and mass m, both MeV.
double kinetic_energy_to_speed(double kinetic_mev, double mass_mev);

/// Kinetic energy in MeV for speed v (units of c) and mass m in MeV.
double speed_to_kinetic_energy(double speed, double mass_mev);

}  // namespace relepr
