#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "relepr/errors.hpp"
#include "relepr/inequalities.hpp"
#include "relepr/presets.hpp"

using namespace relepr;
using doctest::Approx;

namespace {
const double kTsirelson = 2.0 * std::sqrt(2.0);
}

TEST_CASE("CHSH")
{
    const Model pf = Model::baseline(Spin::half);
    SUBCASE("fig10 axes reach 2 sqrt 2 for the preferred frame")
    {
        const InequalityResult r = chsh(pf, preset_setup(Preset::fig10, 0.0).chsh());
        CHECK(std::abs(r.value - kTsirelson) < 1e-12);
        CHECK(r.bound == 2.0);
        CHECK(r.violated);
        CHECK(r.margin == Approx(kTsirelson - 2.0));
    }
    SUBCASE("relativistic models at rest")
    {
        for (ModelKind k : {ModelKind::nw_half, ModelKind::cm_half, ModelKind::pf_exact, ModelKind::pf_small_u}) {
            CHECK(std::abs(chsh(Model(k), preset_setup(Preset::fig10, 0.0).chsh()).value - kTsirelson) < 1e-12);
        }
    }
    SUBCASE("degrades with speed in the fig2 velocity geometry")
    {
        // mpmath, 30 digits
        CHECK(chsh(Model(ModelKind::nw_half), preset_setup(Preset::fig10, 0.8).chsh()).value ==
              Approx(2.50207014881394).epsilon(1e-12));
        CHECK(chsh(Model(ModelKind::cm_half), preset_setup(Preset::fig10, 0.8).chsh()).value ==
              Approx(2.38396219820587).epsilon(1e-12));
        CHECK(chsh(Model(ModelKind::nw_half), preset_setup(Preset::fig10, 0.5).chsh()).value ==
              Approx(2.80499574809720).epsilon(1e-12));
        double previous = kTsirelson + 1e-12;
        for (double v = 0.0; v < 0.99; v += 0.05) {
            const double value = chsh(Model(ModelKind::nw_half), preset_setup(Preset::fig10, v).chsh()).value;
            REQUIRE(value <= previous);
            previous = value;
        }
    }
    SUBCASE("bounded by 2 sqrt 2 for the preferred frame")
    {
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 100000; ++trial) {
            const ChshConfig cfg{Direction(oracle::random_unit(rng)), Direction(oracle::random_unit(rng)),
                                 Direction(oracle::random_unit(rng)), Direction(oracle::random_unit(rng)), {}};
            REQUIRE(chsh(pf, cfg).value <= kTsirelson + 1e-12);
        }
    }
    CHECK_THROWS_AS(chsh(Model(ModelKind::nw_one), preset_setup(Preset::fig10, 0.0).chsh()), UsageError);
}

TEST_CASE("Bell-Mermin")
{
    const Model pf = Model::baseline(Spin::one);
    const Model nw(ModelKind::nw_one);
    const Model cm(ModelKind::cm_one);

    const InequalityResult base = bell_mermin(pf, preset_setup(Preset::fig9, 0.3).mermin());
    CHECK(std::abs(base.value - 1.0) < 1e-12);
    CHECK(base.bound == 1.0);
    CHECK_FALSE(base.violated);

    CHECK(std::abs(bell_mermin(nw, preset_setup(Preset::fig9, 0.0).mermin()).value - 1.0) < 1e-12);

    const InequalityResult top = bell_mermin(nw, preset_setup(Preset::fig9, oracle::kBellMerminArgmax).mermin());
    CHECK(top.value == Approx(oracle::kBellMerminMax).epsilon(1e-13));
    CHECK(top.value == Approx(1.06066017177982).epsilon(1e-13));
    CHECK(top.violated);

    for (double v = 0.0; v < 0.999; v += 0.0127) {
        const MerminConfig cfg = preset_setup(Preset::fig9, v).mermin();
        const double n = bell_mermin(nw, cfg).value;
        REQUIRE(n == Approx(oracle::bell_mermin_fig9(v)).epsilon(1e-13));
        REQUIRE(std::abs(n - bell_mermin(cm, cfg).value) < 1e-12);
        // 3(1-t²)/(3-2t+3t²) > 1  <=>  0 < t = v² < 1/3
        if (v > 0.0 && v * v < 1.0 / 3.0) REQUIRE(n > 1.0);
        if (v * v > 1.0 / 3.0) REQUIRE(n < 1.0);
    }
    CHECK(bell_mermin(nw, preset_setup(Preset::fig9, 0.41).mermin()).violated);

    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100000; ++trial) {
        const MerminConfig cfg{Direction(oracle::random_unit(rng)), Direction(oracle::random_unit(rng)),
                               Direction(oracle::random_unit(rng)), Velocity()};
        REQUIRE(bell_mermin(pf, cfg).value <= 1.0 + 1e-12);
    }

    CHECK_THROWS_AS(bell_mermin(Model(ModelKind::nw_half), preset_setup(Preset::fig9, 0.1).mermin()), UsageError);
    CHECK_THROWS_AS(bell_mermin(Model::baseline(Spin::half), preset_setup(Preset::fig9, 0.1).mermin()), UsageError);
}
