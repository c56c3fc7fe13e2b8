#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "relepr/errors.hpp"
#include "relepr/presets.hpp"
#include "relepr/sampling.hpp"

using namespace relepr;
using doctest::Approx;

namespace {

const Direction kX(1, 0, 0);
const Direction kY(0, 1, 0);

Geometry axes_at(double angle)
{
    return {kX, Direction(std::cos(angle), std::sin(angle), 0.0), {}};
}

template <typename Fn>
void for_each_seed(int seeds, Fn&& fn)
{
    const unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int s = static_cast<int>(w); s < seeds; s += static_cast<int>(workers)) fn(s);
        });
}

}  // namespace

TEST_CASE("sample")
{
    const Model pf = Model::baseline(Spin::half);
    SUBCASE("perfect anticorrelation fills only the mixed cells")
    {
        const SampleBatch b = sample(pf, {kX, kX, {}}, 100000, 7);
        CHECK(b.correlation == -1.0);
        CHECK(b.counts[0] == 0);
        CHECK(b.counts[3] == 0);
        CHECK(b.counts[1] + b.counts[2] == 100000);
    }
    SUBCASE("uncorrelated axes fill all four cells evenly")
    {
        const std::uint64_t n = 1000000;
        const SampleBatch b = sample(pf, {kX, kY, {}}, n, 8);
        const double sigma = std::sqrt(n * 0.25 * 0.75);
        for (auto c : b.counts) CHECK(std::abs(static_cast<double>(c) - n / 4.0) < 4 * sigma);
    }
    SUBCASE("estimator recovers -1/sqrt2")
    {
        const double c = -1.0 / std::sqrt(2.0);
        const SampleBatch b = sample(pf, axes_at(std::numbers::pi / 4), 1000000, 2024);
        CHECK(b.correlation == Approx(c).epsilon(1e-15));
        const CorrelationEstimate e = estimate_correlation(b);
        CHECK(std::abs(e.value - c) < 3 * std::sqrt((1 - c * c) / 1e6));
        CHECK(std::abs(e.value - c) < 3 * e.standard_error * 1.01);
    }
    SUBCASE("reproducible for a seed, different across seeds")
    {
        const Geometry g = axes_at(1.0);
        CHECK(sample(pf, g, 50000, 42).counts == sample(pf, g, 50000, 42).counts);
        CHECK(sample(pf, g, 50000, 42).counts != sample(pf, g, 50000, 43).counts);
    }
    SUBCASE("frozen stream")
    {
        // guards the documented generator against silent changes
        const CellCounts first = sample_counts(0.0, 10, 1);
        std::uint64_t total = 0;
        for (auto c : first) total += c;
        CHECK(total == 10);
        CHECK(sample_counts(0.0, 10, 1) == first);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_WITH_AS(sample_counts(1.5, 10, 1), doctest::Contains("C = 1.5"), DomainError);
        CHECK_THROWS_AS(sample(Model(ModelKind::nw_one), {kX, kX, {}}, 10, 1), UsageError);
        CHECK_THROWS_AS(sample(pf, {kX, kX, {}}, 0, 1), UsageError);
    }
}

TEST_CASE("relativistic models sample at their own correlation")
{
    const Geometry g = preset_setup(Preset::fig2, 0.8, 0.0).geometry();
    const SampleBatch b = sample(Model(ModelKind::nw_half), g, 1000000, 5);
    CHECK(b.correlation == Approx(-0.884615384615385).epsilon(1e-12));
    const CorrelationEstimate e = estimate_correlation(b);
    CHECK(std::abs(e.value - b.correlation) < 4 * e.standard_error);
}

TEST_CASE("cell frequencies converge for almost every seed")
{
    const double c = -1.0 / std::sqrt(2.0);
    const auto p = cell_probabilities(c);
    const std::uint64_t n = 1000000;
    std::atomic<int> good{0};
    for_each_seed(1000, [&](int seed) {
        const CellCounts counts = sample_counts(c, n, 1000 + static_cast<std::uint64_t>(seed));
        bool ok = true;
        for (int i = 0; i < 4; ++i) {
            const double freq = static_cast<double>(counts[i]) / n;
            ok = ok && std::abs(freq - p[i]) < 5 * std::sqrt(p[i] * (1 - p[i]) / n);
        }
        if (ok) ++good;
    });
    CHECK(good.load() >= 999);
}

TEST_CASE("estimator is unbiased over seeds")
{
    const double c = 0.3;
    const std::uint64_t n = 10000;
    std::vector<double> estimates(1000);
    for_each_seed(1000, [&](int seed) {
        estimates[static_cast<std::size_t>(seed)] = estimate_correlation(sample_counts(c, n, static_cast<std::uint64_t>(seed))).value;
    });
    double mean = 0.0;
    for (double e : estimates) mean += e / 1000.0;
    const double stderr_one = std::sqrt((1 - c * c) / n);
    CHECK(std::abs(mean - c) < 4 * stderr_one / std::sqrt(1000.0));
}

TEST_CASE("sharded sampling")
{
    const Model pf = Model::baseline(Spin::half);
    const Geometry g = axes_at(2.0);
    const SampleBatch a = sample_sharded(pf, g, 1000001, 9, 8, 4);
    const SampleBatch b = sample_sharded(pf, g, 1000001, 9, 8, 1);
    CHECK(a.counts == b.counts);
    std::uint64_t total = 0;
    for (auto c : a.counts) total += c;
    CHECK(total == 1000001);
    const CorrelationEstimate e = estimate_correlation(a);
    CHECK(std::abs(e.value - a.correlation) < 4 * e.standard_error);
    CHECK(shard_seed(9, 0) != shard_seed(9, 1));
}

TEST_CASE("estimate_correlation")
{
    const CorrelationEstimate anti = estimate_correlation(CellCounts{0, 500, 500, 0});
    CHECK(anti.value == -1.0);
    CHECK(anti.standard_error == 0.0);
    const CorrelationEstimate even = estimate_correlation(CellCounts{250, 250, 250, 250});
    CHECK(even.value == 0.0);
    CHECK(even.standard_error == Approx(1.0 / std::sqrt(1000.0)).epsilon(1e-15));
    CHECK(even.standard_error == Approx(0.03162).epsilon(1e-4));
    CHECK_THROWS_AS(estimate_correlation(CellCounts{0, 0, 0, 0}), UsageError);
    CHECK_THROWS_AS(estimate_correlation(CellCounts{1, 0, 0, 0}), UsageError);
}

TEST_CASE("normal_quantile")
{
    for (double p : {1e-12, 1e-8, 1e-4, 0.001, 0.01, 0.02425, 0.05, 0.2, 0.5, 0.7, 0.8, 0.95, 0.975, 0.999, 1 - 1e-6}) {
        CAPTURE(p);
        REQUIRE(std::abs(normal_quantile(p) - oracle::normal_quantile_bisect(p)) < 1e-8);
    }
    CHECK(normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.8) == Approx(0.8416212335729143).epsilon(1e-12));
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}

TEST_CASE("required_events")
{
    const Geometry fast = preset_setup(Preset::fig2, 0.8, 0.0).geometry();
    const Geometry slow = preset_setup(Preset::fig2, 0.17, 0.0).geometry();
    const PowerSpec spec;  // pf baseline vs nw-half, alpha 0.05, power 0.8

    // scipy.stats.norm.ppf for the quantiles, ΔC from the closed form
    CHECK(required_events(spec, fast) == 129);
    CHECK(required_events(spec, slow) == 193283);
    CHECK(required_events(spec, slow) > required_events(spec, fast));

    CHECK(required_events(-1.0, 0.99, 0.05, 0.8) >= 1);
    CHECK(required_events(-1.0, 1.0, 0.05, 0.8) == 1);

    std::uint64_t previous = UINT64_MAX;
    for (double delta = 0.01; delta < 1.0; delta += 0.05) {
        const std::uint64_t n = required_events(0.0, delta, 0.05, 0.8);
        REQUIRE(n <= previous);
        previous = n;
    }
    CHECK(required_events(0.0, 0.1, 0.05, 0.9) > required_events(0.0, 0.1, 0.05, 0.8));

    CHECK_THROWS_WITH_AS(required_events(0.2, 0.2, 0.05, 0.8), doctest::Contains("indistinguishable"), DomainError);
    CHECK_THROWS_AS(required_events(0.2, 0.3, 0.0, 0.8), DomainError);
    CHECK_THROWS_AS(required_events(PowerSpec{Model::baseline(Spin::one), Model(ModelKind::nw_one)}, fast), UsageError);
}
