#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "relepr/correlations.hpp"

namespace relepr {

/// Generator used by every sampling routine: std::mt19937_64 (whose output
/// sequence is fixed by the C++ standard) with uniforms built from the top
/// 53 bits, and categorical draws by inverse CDF over the four cells.
inline constexpr std::string_view kPrngAlgorithm = "mt19937_64/u53/inverse-cdf";

/// Dichotomic outcome pair; cell order is (++, +-, -+, --).
struct OutcomePair {
    int alpha = 1;
    int beta = 1;
};

using CellCounts = std::array<std::uint64_t, 4>;

/// Cell probabilities p(α, β) = (1 + αβC)/4 in (++, +-, -+, --) order.
std::array<double, 4> cell_probabilities(double correlation);

struct SampleBatch {
    Model model = Model(ModelKind::pf_same_frame);
    Geometry geometry;
    std::uint64_t seed = 0;
    std::uint64_t events = 0;
    double correlation = 0.0;  ///< model value that generated the counts
    CellCounts counts{};
};

/// Draws `events` coincidences from the singlet outcome distribution with
/// correlation `correlation`. Throws DomainError if |C| > 1.
CellCounts sample_counts(double correlation, std::uint64_t events, std::uint64_t seed);

/// Per-shard seed: splitmix64 of seed and shard index.
std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard);

/// Samples the model at the geometry. Spin-1 models raise UsageError;
/// |C| > 1 raises DomainError naming the offending value.
SampleBatch sample(const Model& model, const Geometry& geometry, std::uint64_t events,
                   std::uint64_t seed);

/// Splits the events over `shards` independent streams (seeded by
/// shard_seed) and sums their counts. Agrees with sample() in distribution,
/// not bit for bit.
SampleBatch sample_sharded(const Model& model, const Geometry& geometry, std::uint64_t events,
                           std::uint64_t seed, unsigned shards, unsigned threads = 0);

struct CorrelationEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

/// C_hat = (n++ + n-- - n+- - n-+)/N, standard error sqrt((1 - C_hat²)/N).
/// Throws UsageError for fewer than two events.
CorrelationEstimate estimate_correlation(const CellCounts& counts);
inline CorrelationEstimate estimate_correlation(const SampleBatch& batch)
{
    return estimate_correlation(batch.counts);
}

/// Standard normal quantile (Acklam's rational approximation polished with a
/// Halley step on erfc). p must lie in (0, 1).
double normal_quantile(double p);

struct PowerSpec {
    Model null_model = Model::baseline(Spin::half);
    Model alt_model = Model(ModelKind::nw_half);
    double alpha = 0.05;  ///< two-sided significance
    double power = 0.8;   ///< 1 - β
};

/// Events needed to separate two correlation values:
/// ceil((z_{1-α/2} + z_{power})² · max(1 - C_null², 1 - C_alt²) / ΔC²).
/// Throws DomainError when ΔC = 0.
std::uint64_t required_events(double c_null, double c_alt, double alpha, double power);

std::uint64_t required_events(const PowerSpec& spec, const Geometry& geometry);

}  // namespace relepr
