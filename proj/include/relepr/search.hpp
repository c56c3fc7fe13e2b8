#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relepr/correlations.hpp"
#include "relepr/presets.hpp"

namespace relepr {

enum class Objective { correlation, deviation, chsh, bell_mermin, model_gap };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view name);

using ParamMap = std::map<std::string, double, std::less<>>;

/// Objective evaluated on a preset geometry.
///
/// Recognized parameter names: "v" (speed), the preset angle ("theta" for
/// fig2, "omega" for fig5), and axis overrides "<axis>.az" / "<axis>.pol"
/// for axis in a, b, c, d (both must be present to override an axis).
/// model_gap evaluates models[0] - models[1]; the other objectives evaluate
/// each model as its own series.
struct Problem {
    std::vector<Model> models;
    Preset preset = Preset::fig2;
    Objective objective = Objective::correlation;
    ParamMap fixed;
};

/// Values reported for one evaluation.
///
///   correlation, deviation  c = C, delta = C - baseline
///   chsh, bell_mermin       c = inequality value, delta = value - PF value,
///                           extra = margin
///   model_gap               c = C_first, delta = C_first - C_second,
///                           extra = C_second
struct Evaluation {
    double value = 0.0;  ///< the objective itself
    double c = 0.0;
    double delta = 0.0;
    std::optional<double> extra;
};

/// Builds the preset setup with `params` (falling back to problem.fixed).
Setup make_setup(const Problem& problem, const ParamMap& params);

/// Evaluates series `series` (model index, or the gap pair) at `params`.
Evaluation evaluate(const Problem& problem, std::size_t series, const ParamMap& params);

std::size_t series_count(const Problem& problem);
std::string series_name(const Problem& problem, std::size_t series);

struct Sweep {
    std::string name;
    double start = 0.0;
    double stop = 0.0;
    int steps = 0;

    double at(int i) const { return start + (stop - start) * i / (steps - 1); }
};

/// Parses "start:stop:steps".
Sweep parse_sweep(std::string_view name, std::string_view text);

struct ScanSpec {
    Problem problem;
    std::vector<Sweep> sweeps;  ///< row-major: last sweep varies fastest
};

inline constexpr double kMaxScanSpeed = 1.0 - 1e-9;

struct ScanRow {
    std::string series;
    std::vector<double> params;  ///< in ScanSpec::sweeps order
    Evaluation eval;
    std::string error;  ///< non-empty for singular points

    bool ok() const { return error.empty(); }
};

struct ScanTable {
    std::vector<std::string> param_names;
    std::vector<ScanRow> rows;
};

/// Throws UsageError on an invalid ScanSpec (no sweeps, fewer than two steps,
/// empty range, speed outside [0, kMaxScanSpeed], missing second model for
/// model_gap).
void validate(const ScanSpec& spec);

/// Dense grid evaluation, series-major then sweep order. Points are spread
/// over `threads` workers but the row order never depends on it.
ScanTable scan(const ScanSpec& spec, unsigned threads = 1);

struct FreeParam {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
    /// Clamped to [lower, upper] during the search; otherwise the bounds only
    /// shape the start points (periodic angles).
    bool bounded = true;
};

inline constexpr double kMaxOptimizeSpeed = 1.0 - 1e-6;

FreeParam speed_param();
FreeParam angle_param(std::string name);
/// Azimuth/polar pairs "<axis>.az", "<axis>.pol" for each letter of `axes`.
std::vector<FreeParam> axis_params(std::string_view axes);

struct OptOptions {
    bool maximize = true;
    int starts = 32;
    int max_evaluations = 20000;  ///< per start
    double tolerance = 1e-8;      ///< simplex diameter for convergence
    bool record_trace = false;
    unsigned threads = 1;
    /// Coarse grid evaluated before the local searches when
    /// prescan_points^dim <= prescan_limit; its best point joins the starts.
    int prescan_points = 17;
    std::size_t prescan_limit = 100000;
};

struct TracePoint {
    std::vector<double> params;
    double value = 0.0;
};

struct OptResult {
    std::vector<std::string> names;
    std::vector<double> best_params;
    double best_value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
    /// Final point of every surviving start, in start order.
    std::vector<TracePoint> trace;

    ParamMap best_map() const;
};

using ObjectiveFn = std::function<double(std::span<const double>)>;

/// Multi-start Nelder-Mead over `params`. Start points are the Halton
/// sequence mapped into the bounds, plus the best prescan grid point. Starts
/// whose first evaluation throws are dropped with a warning; throws
/// DomainError if every start fails. Equal values resolve to the
/// lexicographically smallest parameter vector.
OptResult optimize(const ObjectiveFn& objective, std::span<const FreeParam> params,
                   const OptOptions& options = {});

/// Optimizes series 0 of `problem` over `params`.
OptResult optimize(const Problem& problem, std::span<const FreeParam> params,
                   const OptOptions& options = {});

}  // namespace relepr
