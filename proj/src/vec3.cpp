#include "relepr/vec3.hpp"

#include <sstream>

#include "relepr/errors.hpp"

namespace relepr {

bool is_finite(const Vec3& a)
{
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

std::string to_string(const Vec3& a)
{
    std::ostringstream os;
    os.precision(17);
    os << '(' << a.x << ", " << a.y << ", " << a.z << ')';
    return os.str();
}

Direction::Direction(const Vec3& v)
{
    if (!is_finite(v)) throw DomainError("direction has non-finite components");
    const double n = norm(v);
    if (std::abs(n - 1.0) > kNormSlack) {
        throw DomainError("direction " + to_string(v) + " is not a unit vector (|v| = " +
                          std::to_string(n) + ")");
    }
    v_ = v / n;
}

Direction Direction::normalized(const Vec3& v)
{
    const double n = norm(v);
    if (!is_finite(v) || n == 0.0) throw DomainError("cannot normalize " + to_string(v));
    return unchecked(v / n);
}

Direction Direction::spherical(double azimuth, double polar)
{
    const double s = std::sin(polar);
    return unchecked({s * std::cos(azimuth), s * std::sin(azimuth), std::cos(polar)});
}

Velocity::Velocity(const Vec3& v) : v_(v)
{
    if (!is_finite(v)) throw DomainError("velocity has non-finite components");
    if (norm2(v) >= 1.0) throw DomainError("superluminal velocity " + to_string(v));
}

Velocity Velocity::along(const Direction& dir, double speed) { return Velocity(dir.vec() * speed); }

}  // namespace relepr
