#pragma once

#include "relepr/correlations.hpp"

namespace relepr {

/// Alice measures along a or c, Bob along b or d.
struct ChshConfig {
    Direction a;
    Direction c;
    Direction b;
    Direction d;
    Frames frames;
};

/// Three spin-1 axes and the pair rest-frame velocity v (v_A = -v_B = v).
struct MerminConfig {
    Direction a;
    Direction b;
    Direction c;
    Velocity v;
};

struct InequalityResult {
    double value = 0.0;
    double bound = 0.0;
    double margin = 0.0;  ///< value - bound
    bool violated = false;  ///< margin beyond kViolationTolerance

    /// Round-off allowance: a value at its bound to the last few ulps is not a violation.
    static constexpr double kViolationTolerance = 1e-12;

    static InequalityResult make(double value, double bound)
    {
        return {value, bound, value - bound, value - bound > kViolationTolerance};
    }
};

inline constexpr double kChshBound = 2.0;
inline constexpr double kBellMerminBound = 1.0;

/// |C(a,b) - C(a,d) + C(c,b) + C(c,d)| against the local bound 2.
/// UsageError for spin-1 models.
InequalityResult chsh(const Model& model, const ChshConfig& cfg);

/// C(a,b) + C(b,c) + C(c,a) against the local bound 1, with the spin-1
/// correlations evaluated at v_A = -v_B = cfg.v. UsageError for spin-1/2
/// models.
InequalityResult bell_mermin(const Model& model, const MerminConfig& cfg);

}  // namespace relepr
