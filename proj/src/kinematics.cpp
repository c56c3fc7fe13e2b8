#include "relepr/kinematics.hpp"

#include <algorithm>

#include "relepr/errors.hpp"

namespace relepr {

Boost4::Boost4(const Velocity& u) : u_(u)
{
    const Vec3& v = u.vec();
    const double g = u.gamma();
    // (γ - 1)/v² written as γ²/(γ + 1), finite at v = 0
    const double k = g * g / (g + 1.0);
    const std::array<double, 3> c = v.array();

    m_[0][0] = g;
    for (int i = 0; i < 3; ++i) {
        m_[0][i + 1] = m_[i + 1][0] = g * c[i];
        for (int j = 0; j < 3; ++j) m_[i + 1][j + 1] = (i == j ? 1.0 : 0.0) + k * (c[i] * c[j]);
    }
}

Vec4 Boost4::operator*(const Vec4& x) const
{
    Vec4 r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i] += m_[i][j] * x[j];
    return r;
}

Mat4 Boost4::operator*(const Mat4& x) const { return multiply(m_, x); }

Mat4 multiply(const Mat4& lhs, const Mat4& rhs)
{
    Mat4 r{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j) r[i][j] += lhs[i][k] * rhs[k][j];
    return r;
}

Mat4 minkowski_metric()
{
    Mat4 eta{};
    eta[0][0] = 1.0;
    eta[1][1] = eta[2][2] = eta[3][3] = -1.0;
    return eta;
}

Rotation3::Rotation3() : m_{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}} {}

Vec3 Rotation3::operator*(const Vec3& v) const
{
    return {m_[0][0] * v.x + m_[0][1] * v.y + m_[0][2] * v.z,
            m_[1][0] * v.x + m_[1][1] * v.y + m_[1][2] * v.z,
            m_[2][0] * v.x + m_[2][1] * v.y + m_[2][2] * v.z};
}

Rotation3 Rotation3::transpose() const
{
    Mat3 t{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t[i][j] = m_[j][i];
    return Rotation3(t);
}

double Rotation3::determinant() const
{
    const auto& m = m_;
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double Rotation3::angle() const
{
    const auto& m = m_;
    const Vec3 axis{m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]};
    const double cos_part = (m[0][0] + m[1][1] + m[2][2] - 1.0) / 2.0;
    return std::atan2(norm(axis) / 2.0, cos_part);
}

double Rotation3::orthogonality_defect() const
{
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m_[k][i] * m_[k][j];
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

Boost4 boost_matrix(const Velocity& u) { return Boost4(u); }

Velocity velocity_of(const Vec4& four)
{
    if (!(four[0] > 0.0)) throw DomainError("four-vector is not future-pointing");
    const Vec3 v = Vec3{four[1], four[2], four[3]} / four[0];
    // Round-off can push a composed speed of 1 - O(1e-17) onto 1.
    const double v2 = norm2(v);
    if (v2 >= 1.0) return Velocity(v * (std::nextafter(1.0, 0.0) / std::sqrt(v2)));
    return Velocity(v);
}

Velocity compose_velocity(const Velocity& u, const Velocity& w)
{
    const double g = u.gamma();
    return velocity_of(boost_matrix(w) * Vec4{g, g * u.vec().x, g * u.vec().y, g * u.vec().z});
}

WignerResult wigner_rotation(const Velocity& u_a, const Velocity& v_rel)
{
    const Boost4 lambda = boost_matrix(-v_rel);
    const Boost4 to_pf = boost_matrix(u_a);
    const Vec4 pf_in_bob = lambda * (to_pf * Vec4{1.0, 0.0, 0.0, 0.0});
    const Velocity u_b = velocity_of(pf_in_bob);

    const Mat4 w = multiply(boost_matrix(-u_b).matrix(), multiply(lambda.matrix(), to_pf.matrix()));
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = w[i + 1][j + 1];
    return {Rotation3(r), u_b};
}

Velocity relative_velocity_for(const Velocity& u_a, const Velocity& u_b)
{
    // u_B ≈ u_A - v_rel to first order, so correct v_rel by the miss.
    Vec3 v = u_a.vec() - u_b.vec();
    if (norm2(v) >= 1.0) throw DomainError("no subluminal relative velocity links these frames");
    for (int it = 0; it < 200; ++it) {
        const Vec3 miss = wigner_rotation(u_a, Velocity(v)).u_b.vec() - u_b.vec();
        const Vec3 next = v + miss;
        if (norm2(next) >= 1.0) throw DomainError("relative velocity iteration left the light cone");
        const double step = norm(miss);
        v = next;
        if (step <= 1e-16 * std::max(1.0, norm(v))) break;
    }
    return Velocity(v);
}

double kinetic_energy_to_speed(double kinetic_mev, double mass_mev)
{
    if (!(kinetic_mev >= 0.0)) throw DomainError("kinetic energy must be non-negative");
    if (!(mass_mev > 0.0)) throw DomainError("mass must be positive");
    // sqrt(1 - (m/(m+T))²) without the cancellation at small T
    return std::sqrt(kinetic_mev * (kinetic_mev + 2.0 * mass_mev)) / (mass_mev + kinetic_mev);
}

double speed_to_kinetic_energy(double speed, double mass_mev)
{
    if (!(speed >= 0.0)) throw DomainError("speed must be non-negative");
    if (speed >= 1.0) throw DomainError("superluminal velocity");
    if (!(mass_mev > 0.0)) throw DomainError("mass must be positive");
    // m(γ - 1) = m v²γ²/(γ + 1), stable at small v
    const double g = 1.0 / std::sqrt(1.0 - speed * speed);
    return mass_mev * speed * speed * g * g / (g + 1.0);
}

}  // namespace relepr
