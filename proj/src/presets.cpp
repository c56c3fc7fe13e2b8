#include "relepr/presets.hpp"

#include <cmath>

#include "relepr/errors.hpp"

namespace relepr {
namespace {

const double kRoot3Half = std::sqrt(3.0) / 2.0;
const double kInvRoot2 = 1.0 / std::sqrt(2.0);

Frames fig2_frames(double v)
{
    return {Velocity(Vec3{-0.5, -kRoot3Half, 0.0} * v), Velocity(Vec3{0.5, -kRoot3Half, 0.0} * v),
            Velocity(), Velocity()};
}

}  // namespace

std::string_view to_string(Preset preset)
{
    switch (preset) {
    case Preset::fig2: return "fig2";
    case Preset::fig5: return "fig5";
    case Preset::fig9: return "fig9";
    case Preset::fig10: return "fig10";
    }
    return "?";
}

Preset parse_preset(std::string_view name)
{
    for (Preset p : {Preset::fig2, Preset::fig5, Preset::fig9, Preset::fig10})
        if (to_string(p) == name) return p;
    throw UsageError("unknown preset '" + std::string(name) + "' (expected fig2, fig5, fig9, fig10)");
}

std::string_view preset_angle_name(Preset preset)
{
    switch (preset) {
    case Preset::fig2: return "theta";
    case Preset::fig5: return "omega";
    default: return "";
    }
}

Setup preset_setup(Preset preset, double speed, double angle)
{
    if (!(speed >= 0.0)) throw DomainError("speed must be non-negative");
    Setup s;
    switch (preset) {
    case Preset::fig2:
        s.frames = fig2_frames(speed);
        s.a = Direction::normalized({std::cos(angle), std::sin(angle), 0.0});
        s.b = Direction(1.0, 0.0, 0.0);
        break;
    case Preset::fig5:
        s.frames = {Velocity(-speed, 0.0, 0.0), Velocity(speed, 0.0, 0.0), Velocity(), Velocity()};
        s.a = s.b = Direction::normalized({std::cos(angle), std::sin(angle), 0.0});
        break;
    case Preset::fig9:
        s.a = Direction(0.0, 0.0, 1.0);
        s.b = Direction(kRoot3Half, 0.0, -0.5);
        s.c = Direction(-kRoot3Half, 0.0, -0.5);
        s.frames = {Velocity(0.0, -speed, 0.0), Velocity(0.0, speed, 0.0), Velocity(), Velocity()};
        break;
    case Preset::fig10:
        s.frames = fig2_frames(speed);
        s.a = Direction(-kInvRoot2, kInvRoot2, 0.0);
        s.c = Direction(kInvRoot2, kInvRoot2, 0.0);
        s.b = Direction(0.0, 1.0, 0.0);
        s.d = Direction(1.0, 0.0, 0.0);
        break;
    }
    return s;
}

std::string describe(Preset preset)
{
    switch (preset) {
    case Preset::fig2:
        return "fig2: vA=v(-1/2,-sqrt3/2,0) vB=v(1/2,-sqrt3/2,0) a=(cos theta,sin theta,0) b=(1,0,0)";
    case Preset::fig5:
        return "fig5: vA=v(-1,0,0) vB=v(1,0,0) a=b=(cos omega,sin omega,0)";
    case Preset::fig9:
        return "fig9: a=(0,0,1) b=(sqrt3/2,0,-1/2) c=(-sqrt3/2,0,-1/2) vA=v(0,-1,0)=-vB";
    case Preset::fig10:
        return "fig10: a=(-1/sqrt2,1/sqrt2,0) c=(1/sqrt2,1/sqrt2,0) b=(0,1,0) d=(1,0,0) "
               "vA=v(-1/2,-sqrt3/2,0) vB=v(1/2,-sqrt3/2,0)";
    }
    return "";
}

}  // namespace relepr
