#include "relepr/inequalities.hpp"

#include "relepr/errors.hpp"

namespace relepr {

InequalityResult chsh(const Model& model, const ChshConfig& cfg)
{
    if (model.spin() != Spin::half) throw UsageError("CHSH needs a spin-1/2 model, got " + model.name());
    const auto corr = [&](const Direction& x, const Direction& y) {
        return correlation(model, Geometry{x, y, cfg.frames});
    };
    const double value =
        std::abs(corr(cfg.a, cfg.b) - corr(cfg.a, cfg.d) + corr(cfg.c, cfg.b) + corr(cfg.c, cfg.d));
    return InequalityResult::make(value, kChshBound);
}

InequalityResult bell_mermin(const Model& model, const MerminConfig& cfg)
{
    if (model.spin() != Spin::one) {
        throw UsageError("Bell-Mermin needs a spin-1 model, got " + model.name());
    }
    const Frames frames{cfg.v, -cfg.v, Velocity(), Velocity()};
    const auto corr = [&](const Direction& x, const Direction& y) {
        return correlation(model, Geometry{x, y, frames});
    };
    return InequalityResult::make(corr(cfg.a, cfg.b) + corr(cfg.b, cfg.c) + corr(cfg.c, cfg.a),
                                  kBellMerminBound);
}

}  // namespace relepr
