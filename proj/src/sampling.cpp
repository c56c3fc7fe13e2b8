#include "relepr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "relepr/errors.hpp"

namespace relepr {
namespace {

// |C| may exceed 1 by round-off in the closed forms; beyond this it is an error.
constexpr double kRangeSlack = 1e-12;

double checked_correlation(double c)
{
    if (!std::isfinite(c) || std::abs(c) > 1.0 + kRangeSlack) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "model outside dichotomic-outcome representation: C = " << c;
        throw DomainError(msg.str());
    }
    return std::clamp(c, -1.0, 1.0);
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::array<double, 4> cell_probabilities(double correlation)
{
    const double c = checked_correlation(correlation);
    return {(1.0 + c) / 4.0, (1.0 - c) / 4.0, (1.0 - c) / 4.0, (1.0 + c) / 4.0};
}

CellCounts sample_counts(double correlation, std::uint64_t events, std::uint64_t seed)
{
    const auto p = cell_probabilities(correlation);
    const double c0 = p[0];
    const double c1 = p[0] + p[1];
    const double c2 = p[0] + p[1] + p[2];

    std::mt19937_64 gen(seed);
    CellCounts counts{};
    for (std::uint64_t i = 0; i < events; ++i) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        const int cell = u < c0 ? 0 : u < c1 ? 1 : u < c2 ? 2 : 3;
        ++counts[cell];
    }
    return counts;
}

std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard)
{
    return splitmix64(splitmix64(seed) ^ (shard + 1));
}

namespace {

double sampled_correlation(const Model& model, const Geometry& geometry)
{
    if (model.spin() != Spin::half) {
        throw UsageError("sampling supports spin-1/2 models only, got " + model.name());
    }
    const double c = correlation(model, geometry);
    checked_correlation(c);
    return c;
}

}  // namespace

SampleBatch sample(const Model& model, const Geometry& geometry, std::uint64_t events, std::uint64_t seed)
{
    if (events < 1) throw UsageError("sample needs at least one event");
    SampleBatch batch;
    batch.model = model;
    batch.geometry = geometry;
    batch.seed = seed;
    batch.events = events;
    batch.correlation = sampled_correlation(model, geometry);
    batch.counts = sample_counts(batch.correlation, events, seed);
    return batch;
}

SampleBatch sample_sharded(const Model& model, const Geometry& geometry, std::uint64_t events,
                           std::uint64_t seed, unsigned shards, unsigned threads)
{
    if (events < 1) throw UsageError("sample needs at least one event");
    if (shards < 1) throw UsageError("sample needs at least one shard");
    SampleBatch batch;
    batch.model = model;
    batch.geometry = geometry;
    batch.seed = seed;
    batch.events = events;
    batch.correlation = sampled_correlation(model, geometry);

    std::vector<CellCounts> parts(shards);
    const auto shard_events = [&](unsigned s) {
        return events / shards + (s < events % shards ? 1 : 0);
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, shards);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (unsigned s = t; s < shards; s += threads)
                    parts[s] = sample_counts(batch.correlation, shard_events(s), shard_seed(seed, s));
            });
        }
    }
    for (const CellCounts& part : parts)
        for (int i = 0; i < 4; ++i) batch.counts[i] += part[i];
    return batch;
}

CorrelationEstimate estimate_correlation(const CellCounts& counts)
{
    const std::uint64_t n = counts[0] + counts[1] + counts[2] + counts[3];
    if (n < 2) throw UsageError("correlation estimate needs at least two events");
    const double total = static_cast<double>(n);
    const double same = static_cast<double>(counts[0] + counts[3]);
    const double opposite = static_cast<double>(counts[1] + counts[2]);
    const double c = (same - opposite) / total;
    return {c, std::sqrt(std::max(0.0, 1.0 - c * c) / total)};
}

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile needs p in (0, 1)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double low = 0.02425;

    double x;
    if (p < low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley step against the exact CDF.
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

std::uint64_t required_events(double c_null, double c_alt, double alpha, double power)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("significance must lie in (0, 1)");
    if (!(power > 0.0 && power < 1.0)) throw DomainError("power must lie in (0, 1)");
    const double delta = c_alt - c_null;
    if (delta == 0.0) throw DomainError("models indistinguishable at this geometry");
    const double z = normal_quantile(1.0 - alpha / 2.0) + normal_quantile(power);
    const double variance = std::max(1.0 - c_null * c_null, 1.0 - c_alt * c_alt);
    const double n = std::ceil(z * z * variance / (delta * delta));
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n));
}

std::uint64_t required_events(const PowerSpec& spec, const Geometry& geometry)
{
    if (spec.null_model.spin() != Spin::half || spec.alt_model.spin() != Spin::half) {
        throw UsageError("power analysis supports spin-1/2 models only");
    }
    return required_events(correlation(spec.null_model, geometry), correlation(spec.alt_model, geometry),
                           spec.alpha, spec.power);
}

}  // namespace relepr
