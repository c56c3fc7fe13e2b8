#include "relepr/search.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "relepr/errors.hpp"
#include "relepr/inequalities.hpp"

namespace relepr {
namespace {

double lookup(const Problem& problem, const ParamMap& params, std::string_view name, double fallback)
{
    if (auto it = params.find(name); it != params.end()) return it->second;
    if (auto it = problem.fixed.find(name); it != problem.fixed.end()) return it->second;
    return fallback;
}

std::optional<double> lookup(const Problem& problem, const ParamMap& params, std::string_view name)
{
    if (auto it = params.find(name); it != params.end()) return it->second;
    if (auto it = problem.fixed.find(name); it != problem.fixed.end()) return it->second;
    return std::nullopt;
}

double parse_double(std::string_view text, std::string_view what)
{
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw UsageError("cannot parse " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += threads) fn(i);
        });
    }
}

// --- simplex search ----------------------------------------------------------

constexpr std::array<int, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t index, int base)
{
    double inv = 1.0 / base;
    double factor = inv;
    double result = 0.0;
    while (index > 0) {
        result += static_cast<double>(index % base) * factor;
        index /= base;
        factor *= inv;
    }
    return result;
}

struct LocalResult {
    std::vector<double> params;
    double value = 0.0;  // objective, not the minimized sign-flipped one
    std::size_t evaluations = 0;
    bool converged = false;
    bool failed = false;
};

class Simplex {
public:
    Simplex(const ObjectiveFn& objective, std::span<const FreeParam> params, const OptOptions& opt)
        : objective_(objective), params_(params), opt_(opt)
    {
    }

    LocalResult run(std::vector<double> start)
    {
        const std::size_t n = start.size();
        LocalResult out;
        project(start);
        double f0;
        try {
            f0 = sense(objective_(start));
            ++out.evaluations;
        } catch (const std::exception& e) {
            warn(std::string("optimizer start discarded: ") + e.what());
            out.failed = true;
            out.evaluations = 1;
            return out;
        }

        std::vector<std::vector<double>> x(n + 1, start);
        std::vector<double> f(n + 1, f0);
        for (std::size_t i = 0; i < n; ++i) {
            const FreeParam& p = params_[i];
            double h = 0.05 * (p.upper - p.lower);
            if (h == 0.0) h = 0.05;
            if (p.bounded && x[i + 1][i] + h > p.upper) h = -h;
            x[i + 1][i] += h;
            project(x[i + 1]);
            f[i + 1] = eval(x[i + 1], out);
        }

        std::vector<std::size_t> order(n + 1);
        std::vector<double> centroid(n), xr(n), xe(n), xc(n);
        while (true) {
            for (std::size_t i = 0; i <= n; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
                if (f[l] != f[r]) return f[l] < f[r];
                return x[l] < x[r];
            });
            const std::size_t best = order.front();
            const std::size_t worst = order.back();
            const std::size_t second = order[n - 1];

            double diameter = 0.0;
            for (std::size_t i = 0; i <= n; ++i)
                for (std::size_t k = 0; k < n; ++k)
                    diameter = std::max(diameter, std::abs(x[i][k] - x[best][k]));
            if (diameter < opt_.tolerance || out.evaluations >= static_cast<std::size_t>(opt_.max_evaluations)) {
                out.converged = diameter < opt_.tolerance;
                out.params = x[best];
                out.value = opt_.maximize ? -f[best] : f[best];
                return out;
            }

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == worst) continue;
                for (std::size_t k = 0; k < n; ++k) centroid[k] += x[i][k] / static_cast<double>(n);
            }
            const auto along = [&](std::vector<double>& dst, double t) {
                for (std::size_t k = 0; k < n; ++k) dst[k] = centroid[k] + t * (x[worst][k] - centroid[k]);
                project(dst);
            };

            along(xr, -1.0);
            const double fr = eval(xr, out);
            if (fr < f[best]) {
                along(xe, -2.0);
                const double fe = eval(xe, out);
                if (fe < fr) {
                    x[worst] = xe;
                    f[worst] = fe;
                } else {
                    x[worst] = xr;
                    f[worst] = fr;
                }
                continue;
            }
            if (fr < f[second]) {
                x[worst] = xr;
                f[worst] = fr;
                continue;
            }
            const bool outside = fr < f[worst];
            along(xc, outside ? -0.5 : 0.5);
            const double fc = eval(xc, out);
            if (outside ? fc <= fr : fc < f[worst]) {
                x[worst] = xc;
                f[worst] = fc;
                continue;
            }
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == best) continue;
                for (std::size_t k = 0; k < n; ++k) x[i][k] = x[best][k] + 0.5 * (x[i][k] - x[best][k]);
                project(x[i]);
                f[i] = eval(x[i], out);
            }
        }
    }

private:
    double sense(double v) const { return opt_.maximize ? -v : v; }

    double eval(const std::vector<double>& point, LocalResult& out) const
    {
        ++out.evaluations;
        try {
            const double v = sense(objective_(point));
            return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    }

    void project(std::vector<double>& point) const
    {
        for (std::size_t k = 0; k < point.size(); ++k) {
            if (params_[k].bounded) point[k] = std::clamp(point[k], params_[k].lower, params_[k].upper);
        }
    }

    const ObjectiveFn& objective_;
    std::span<const FreeParam> params_;
    const OptOptions& opt_;
};

std::vector<double> best_prescan_point(const ObjectiveFn& objective, std::span<const FreeParam> params,
                                       const OptOptions& opt, std::size_t& evaluations)
{
    const std::size_t dim = params.size();
    const auto points = static_cast<std::size_t>(opt.prescan_points);
    std::size_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) {
        total *= points;
        if (total > opt.prescan_limit) return {};
    }

    std::vector<double> candidate(dim), best;
    double best_value = 0.0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (std::size_t k = dim; k-- > 0;) {
            const std::size_t idx = rest % points;
            rest /= points;
            const FreeParam& p = params[k];
            candidate[k] = p.lower + (p.upper - p.lower) * static_cast<double>(idx) /
                                         static_cast<double>(points - 1);
        }
        ++evaluations;
        double value;
        try {
            value = objective(candidate);
        } catch (const std::exception&) {
            continue;
        }
        if (std::isnan(value)) continue;
        if (best.empty() || (opt.maximize ? value > best_value : value < best_value)) {
            best = candidate;
            best_value = value;
        }
    }
    return best;
}

}  // namespace

std::string_view to_string(Objective objective)
{
    switch (objective) {
    case Objective::correlation: return "correlation";
    case Objective::deviation: return "deviation";
    case Objective::chsh: return "chsh";
    case Objective::bell_mermin: return "bell-mermin";
    case Objective::model_gap: return "model-gap";
    }
    return "?";
}

Objective parse_objective(std::string_view name)
{
    for (Objective o : {Objective::correlation, Objective::deviation, Objective::chsh,
                        Objective::bell_mermin, Objective::model_gap}) {
        if (to_string(o) == name) return o;
    }
    if (name == "bell_mermin") return Objective::bell_mermin;
    if (name == "model_gap") return Objective::model_gap;
    throw UsageError("unknown objective '" + std::string(name) + "'");
}

Setup make_setup(const Problem& problem, const ParamMap& params)
{
    const double speed = lookup(problem, params, "v", 0.0);
    const std::string_view angle_name = preset_angle_name(problem.preset);
    const double angle = angle_name.empty() ? 0.0 : lookup(problem, params, angle_name, 0.0);
    Setup s = preset_setup(problem.preset, speed, angle);

    const std::array<std::pair<char, Direction*>, 4> axes{{{'a', &s.a}, {'b', &s.b}, {'c', &s.c}, {'d', &s.d}}};
    for (const auto& [letter, axis] : axes) {
        const std::string base(1, letter);
        const auto az = lookup(problem, params, base + ".az");
        const auto pol = lookup(problem, params, base + ".pol");
        if (az && pol) *axis = Direction::spherical(*az, *pol);
    }
    return s;
}

std::size_t series_count(const Problem& problem)
{
    return problem.objective == Objective::model_gap ? 1 : problem.models.size();
}

std::string series_name(const Problem& problem, std::size_t series)
{
    if (problem.objective == Objective::model_gap) {
        if (problem.models.size() < 2) throw UsageError("model-gap needs two models");
        return problem.models[0].name() + "/" + problem.models[1].name();
    }
    return problem.models.at(series).name();
}

Evaluation evaluate(const Problem& problem, std::size_t series, const ParamMap& params)
{
    const Setup s = make_setup(problem, params);
    Evaluation e;
    switch (problem.objective) {
    case Objective::correlation:
    case Objective::deviation: {
        const Model& m = problem.models.at(series);
        const Geometry g = s.geometry();
        e.c = correlation(m, g);
        e.delta = e.c - baseline_correlation(m, g.a, g.b);
        e.value = problem.objective == Objective::correlation ? e.c : e.delta;
        break;
    }
    case Objective::chsh: {
        const Model& m = problem.models.at(series);
        const InequalityResult r = chsh(m, s.chsh());
        e.value = e.c = r.value;
        e.delta = r.value - chsh(Model::baseline(Spin::half), s.chsh()).value;
        e.extra = r.margin;
        break;
    }
    case Objective::bell_mermin: {
        const Model& m = problem.models.at(series);
        const InequalityResult r = bell_mermin(m, s.mermin());
        e.value = e.c = r.value;
        e.delta = r.value - bell_mermin(Model::baseline(Spin::one), s.mermin()).value;
        e.extra = r.margin;
        break;
    }
    case Objective::model_gap: {
        if (problem.models.size() < 2) throw UsageError("model-gap needs two models");
        const Geometry g = s.geometry();
        if (problem.models[0].spin() != problem.models[1].spin()) {
            throw UsageError("model-gap needs one spin sector");
        }
        e.c = correlation(problem.models[0], g);
        const double second = correlation(problem.models[1], g);
        e.value = e.delta = e.c - second;
        e.extra = second;
        break;
    }
    }
    return e;
}

Sweep parse_sweep(std::string_view name, std::string_view text)
{
    const auto first = text.find(':');
    const auto last = text.rfind(':');
    if (first == std::string_view::npos || first == last) {
        throw UsageError("grid '" + std::string(text) + "' must be start:stop:steps");
    }
    Sweep s;
    s.name = std::string(name);
    s.start = parse_double(text.substr(0, first), "grid start");
    s.stop = parse_double(text.substr(first + 1, last - first - 1), "grid stop");
    const std::string_view steps = text.substr(last + 1);
    auto [ptr, ec] = std::from_chars(steps.data(), steps.data() + steps.size(), s.steps);
    if (ec != std::errc() || ptr != steps.data() + steps.size()) {
        throw UsageError("cannot parse grid steps '" + std::string(steps) + "'");
    }
    return s;
}

void validate(const ScanSpec& spec)
{
    if (spec.problem.models.empty()) throw UsageError("scan needs at least one model");
    if (spec.problem.objective == Objective::model_gap && spec.problem.models.size() != 2) {
        throw UsageError("model-gap scans need exactly two models");
    }
    if (spec.sweeps.empty()) throw UsageError("scan needs at least one swept parameter");
    for (const Sweep& s : spec.sweeps) {
        if (s.steps < 2) throw UsageError("sweep '" + s.name + "' needs at least 2 steps");
        if (!(s.start < s.stop)) throw UsageError("sweep '" + s.name + "' has an empty range");
        if (s.name == "v" && (s.start < 0.0 || s.stop > kMaxScanSpeed)) {
            throw UsageError("speed sweep must stay within [0, 1 - 1e-9]");
        }
    }
}

ScanTable scan(const ScanSpec& spec, unsigned threads)
{
    validate(spec);
    ScanTable table;
    for (const Sweep& s : spec.sweeps) table.param_names.push_back(s.name);

    std::size_t points = 1;
    for (const Sweep& s : spec.sweeps) points *= static_cast<std::size_t>(s.steps);
    const std::size_t series = series_count(spec.problem);
    table.rows.resize(series * points);

    parallel_for(table.rows.size(), threads, [&](std::size_t index) {
        ScanRow& row = table.rows[index];
        const std::size_t s = index / points;
        std::size_t rest = index % points;
        row.series = series_name(spec.problem, s);
        row.params.resize(spec.sweeps.size());
        ParamMap params;
        for (std::size_t k = spec.sweeps.size(); k-- > 0;) {
            const Sweep& sw = spec.sweeps[k];
            const int i = static_cast<int>(rest % static_cast<std::size_t>(sw.steps));
            rest /= static_cast<std::size_t>(sw.steps);
            row.params[k] = sw.at(i);
            params[sw.name] = row.params[k];
        }
        try {
            row.eval = evaluate(spec.problem, s, params);
        } catch (const std::exception& e) {
            row.error = e.what();
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.eval = {nan, nan, nan, std::nullopt};
        }
    });
    return table;
}

FreeParam speed_param() { return {"v", 0.0, kMaxOptimizeSpeed, true}; }

FreeParam angle_param(std::string name) { return {std::move(name), 0.0, 2.0 * std::numbers::pi, false}; }

std::vector<FreeParam> axis_params(std::string_view axes)
{
    std::vector<FreeParam> out;
    for (char letter : axes) {
        if (letter < 'a' || letter > 'd') throw UsageError(std::string("unknown axis '") + letter + "'");
        out.push_back({std::string(1, letter) + ".az", 0.0, 2.0 * std::numbers::pi, false});
        out.push_back({std::string(1, letter) + ".pol", 0.0, std::numbers::pi, false});
    }
    return out;
}

ParamMap OptResult::best_map() const
{
    ParamMap m;
    for (std::size_t i = 0; i < names.size(); ++i) m[names[i]] = best_params[i];
    return m;
}

OptResult optimize(const ObjectiveFn& objective, std::span<const FreeParam> params, const OptOptions& options)
{
    if (params.empty()) throw UsageError("optimize needs at least one free parameter");
    if (params.size() > kPrimes.size()) throw UsageError("too many free parameters");
    if (options.starts < 1) throw UsageError("optimize needs at least one start");
    for (const FreeParam& p : params) {
        if (!(p.lower < p.upper)) throw UsageError("parameter '" + p.name + "' has empty bounds");
    }

    OptResult result;
    for (const FreeParam& p : params) result.names.push_back(p.name);

    std::vector<std::vector<double>> starts;
    for (int s = 0; s < options.starts; ++s) {
        std::vector<double> x(params.size());
        for (std::size_t k = 0; k < params.size(); ++k) {
            const double u = radical_inverse(static_cast<std::uint64_t>(s) + 1, kPrimes[k]);
            x[k] = params[k].lower + u * (params[k].upper - params[k].lower);
        }
        starts.push_back(std::move(x));
    }
    std::size_t prescan_evals = 0;
    if (auto grid_best = best_prescan_point(objective, params, options, prescan_evals); !grid_best.empty()) {
        starts.push_back(std::move(grid_best));
    }

    std::vector<LocalResult> locals(starts.size());
    parallel_for(starts.size(), options.threads, [&](std::size_t i) {
        locals[i] = Simplex(objective, params, options).run(starts[i]);
    });

    result.evaluations = prescan_evals;
    const LocalResult* best = nullptr;
    for (const LocalResult& local : locals) {
        result.evaluations += local.evaluations;
        if (local.failed) continue;
        if (options.record_trace) result.trace.push_back({local.params, local.value});
        if (std::isnan(local.value)) continue;
        if (best == nullptr) {
            best = &local;
            continue;
        }
        const bool better = options.maximize ? local.value > best->value : local.value < best->value;
        if (better || (local.value == best->value && local.params < best->params)) best = &local;
    }
    if (best == nullptr) throw DomainError("every optimizer start failed to evaluate");
    result.best_params = best->params;
    result.best_value = best->value;
    result.converged = best->converged;
    return result;
}

OptResult optimize(const Problem& problem, std::span<const FreeParam> params, const OptOptions& options)
{
    std::vector<std::string> names;
    for (const FreeParam& p : params) names.push_back(p.name);
    const ObjectiveFn fn = [&](std::span<const double> x) {
        ParamMap m;
        for (std::size_t i = 0; i < x.size(); ++i) m[names[i]] = x[i];
        return evaluate(problem, 0, m).value;
    };
    return optimize(fn, params, options);
}

}  // namespace relepr
