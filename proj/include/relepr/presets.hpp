#pragma once

#include <string>
#include <string_view>

#include "relepr/correlations.hpp"
#include "relepr/inequalities.hpp"

namespace relepr {

/// Named measurement geometries of the reference figures.
///
///   fig2   v_A = v(-1/2, -√3/2, 0), v_B = v(1/2, -√3/2, 0),
///          a = (cos θ, sin θ, 0), b = (1, 0, 0)
///   fig5   v_A = v(-1, 0, 0), v_B = v(1, 0, 0), a = b = (cos ω, sin ω, 0)
///   fig9   a = (0, 0, 1), b = (√3/2, 0, -1/2), c = (-√3/2, 0, -1/2),
///          v_A = v(0, -1, 0) = -v_B
///   fig10  a = (-1/√2, 1/√2, 0), c = (1/√2, 1/√2, 0), b = (0, 1, 0),
///          d = (1, 0, 0), fig2 velocities
enum class Preset { fig2, fig5, fig9, fig10 };

std::string_view to_string(Preset preset);
Preset parse_preset(std::string_view name);

/// Up to four axes plus the velocity geometry. Axes a preset does not
/// define stay at the z axis. PF velocities are zero.
struct Setup {
    Direction a;
    Direction b;
    Direction c;
    Direction d;
    Frames frames;

    Geometry geometry() const { return {a, b, frames}; }
    ChshConfig chsh() const { return {a, c, b, d, frames}; }
    /// Uses frames.v_a as the pair rest-frame velocity.
    MerminConfig mermin() const { return {a, b, c, frames.v_a}; }
};

/// `angle` is θ for fig2 and ω for fig5; ignored otherwise.
Setup preset_setup(Preset preset, double speed, double angle = 0.0);

/// Name of the angle parameter a preset uses ("theta", "omega") or "".
std::string_view preset_angle_name(Preset preset);

/// One-line human description of the preset vectors.
std::string describe(Preset preset);

}  // namespace relepr
