#include "relepr/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "relepr/errors.hpp"
#include "relepr/inequalities.hpp"
#include "relepr/output.hpp"
#include "relepr/presets.hpp"
#include "relepr/sampling.hpp"
#include "relepr/search.hpp"

namespace relepr::cli {
namespace {

namespace fs = std::filesystem;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::vector<std::string> models;
    std::string spin;
    std::string null_model = "pf-same-frame";
    std::string preset;
    std::string a, b, c, d;
    std::string v_a, v_b, u_a, v_rel;
    std::optional<double> speed;
    std::string theta, omega;
    std::string grid;
    std::string angle_grid;
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 1;
    int digits = kDefaultDigits;
    std::string objective;
    std::string kind;
    std::vector<std::string> free;
    int starts = 32;
    bool minimize = false;
    bool trace = false;
    unsigned threads = 1;
    double alpha = 0.05;
    double power = 0.8;
    std::uint64_t events = 1000000;
    unsigned shards = 0;
};

double parse_number(std::string_view text, std::string_view field)
{
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw UsageError("--" + std::string(field) + ": cannot parse '" + std::string(text) + "'");
    }
    return value;
}

/// Radians, or degrees with a "deg" suffix.
double parse_angle(std::string_view text, std::string_view field)
{
    if (text.size() > 3 && text.substr(text.size() - 3) == "deg") {
        return parse_number(text.substr(0, text.size() - 3), field) * std::numbers::pi / 180.0;
    }
    return parse_number(text, field);
}

Vec3 parse_vec(std::string_view text, std::string_view field)
{
    std::array<double, 3> c{};
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        const std::size_t comma = text.find(',', pos);
        const bool last = i == 2;
        if (last != (comma == std::string_view::npos)) {
            throw UsageError("--" + std::string(field) + ": expected a comma triple x,y,z, got '" +
                             std::string(text) + "'");
        }
        c[i] = parse_number(text.substr(pos, last ? std::string_view::npos : comma - pos), field);
        pos = comma + 1;
    }
    return Vec3(c);
}

template <typename T, typename Fn>
T field_checked(std::string_view field, Fn&& make)
{
    try {
        return make();
    } catch (const DomainError& e) {
        throw UsageError("--" + std::string(field) + ": " + e.what());
    }
}

Direction parse_direction(const std::string& text, std::string_view field)
{
    const Vec3 v = parse_vec(text, field);
    return field_checked<Direction>(field, [&] { return Direction(v); });
}

Velocity parse_velocity(const std::string& text, std::string_view field)
{
    const Vec3 v = parse_vec(text, field);
    return field_checked<Velocity>(field, [&] { return Velocity(v); });
}

std::vector<std::string> split_list(const std::vector<std::string>& items)
{
    std::vector<std::string> out;
    for (const std::string& item : items) {
        std::size_t pos = 0;
        while (pos <= item.size()) {
            const std::size_t comma = item.find(',', pos);
            const std::string part = item.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (!part.empty()) out.push_back(part);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    return out;
}

std::optional<Spin> parse_spin(const std::string& text)
{
    if (text.empty()) return std::nullopt;
    if (text == "half" || text == "1/2") return Spin::half;
    if (text == "one" || text == "1") return Spin::one;
    throw UsageError("--spin: expected half or one, got '" + text + "'");
}

std::vector<Model> parse_models(const Options& o)
{
    std::vector<Model> models;
    for (const std::string& name : split_list(o.models)) models.push_back(Model::parse(name, parse_spin(o.spin)));
    if (models.empty()) throw UsageError("--model is required");
    return models;
}

std::optional<double> angle_option(const Options& o, std::optional<Preset> preset)
{
    if (!o.theta.empty() && !o.omega.empty()) throw UsageError("give --theta or --omega, not both");
    if (!o.theta.empty()) {
        if (preset && *preset == Preset::fig5) throw UsageError("--theta: fig5 is parametrized by --omega");
        return parse_angle(o.theta, "theta");
    }
    if (!o.omega.empty()) {
        if (preset && *preset == Preset::fig2) throw UsageError("--omega: fig2 is parametrized by --theta");
        return parse_angle(o.omega, "omega");
    }
    return std::nullopt;
}

/// Preset vectors (if any) with explicit flags layered on top.
struct Resolved {
    Setup setup;
    std::optional<Preset> preset;
    std::optional<double> speed;
    std::optional<double> angle;
};

Resolved resolve_geometry(const Options& o, bool spin_one)
{
    Resolved r;
    if (!o.preset.empty()) r.preset = parse_preset(o.preset);
    r.angle = angle_option(o, r.preset);
    if (o.speed) {
        if (!r.preset) throw UsageError("--v needs --preset; give explicit --vA/--vB otherwise");
        if (*o.speed < 0.0 || *o.speed >= 1.0) throw UsageError("--v: speed must lie in [0, 1)");
        r.speed = *o.speed;
    }
    if (r.preset) {
        r.setup = field_checked<Setup>("v", [&] { return preset_setup(*r.preset, r.speed.value_or(0.0), r.angle.value_or(0.0)); });
    } else if (r.angle) {
        throw UsageError("--theta/--omega need --preset");
    }

    if (!o.a.empty()) r.setup.a = parse_direction(o.a, "a");
    if (!o.b.empty()) r.setup.b = parse_direction(o.b, "b");
    if (!o.c.empty()) r.setup.c = parse_direction(o.c, "c");
    if (!o.d.empty()) r.setup.d = parse_direction(o.d, "d");
    if (!o.v_a.empty()) {
        r.setup.frames.v_a = parse_velocity(o.v_a, "vA");
        if (o.v_b.empty() && spin_one) r.setup.frames.v_b = -r.setup.frames.v_a;
    }
    if (!o.v_b.empty()) r.setup.frames.v_b = parse_velocity(o.v_b, "vB");
    if (!o.u_a.empty()) r.setup.frames.u_a = parse_velocity(o.u_a, "uA");
    if (!o.v_rel.empty()) r.setup.frames.v_rel = parse_velocity(o.v_rel, "vrel");
    if (!r.speed) r.speed = r.setup.frames.v_a.speed();
    return r;
}

std::string vec_text(const Vec3& v, int digits)
{
    return format_number(v.x, digits) + "," + format_number(v.y, digits) + "," + format_number(v.z, digits);
}

std::vector<std::pair<std::string, std::string>> geometry_header(const Resolved& r, int digits, bool four_axes)
{
    std::vector<std::pair<std::string, std::string>> h;
    h.emplace_back("preset", r.preset ? describe(*r.preset) : "explicit");
    h.emplace_back("a", vec_text(r.setup.a, digits));
    h.emplace_back("b", vec_text(r.setup.b, digits));
    if (four_axes) {
        h.emplace_back("c", vec_text(r.setup.c, digits));
        h.emplace_back("d", vec_text(r.setup.d, digits));
    }
    h.emplace_back("vA", vec_text(r.setup.frames.v_a, digits));
    h.emplace_back("vB", vec_text(r.setup.frames.v_b, digits));
    h.emplace_back("uA", vec_text(r.setup.frames.u_a, digits));
    h.emplace_back("vrel", vec_text(r.setup.frames.v_rel, digits));
    return h;
}

void tool_header(Dataset& data, const Options& o)
{
    data.header.emplace_back("tool", std::string("relepr ") + kVersion);
    data.header.emplace_back("digits", std::to_string(o.digits));
}

/// Writes through `fn` to --out (or `out` when unset). Failures map to IoError.
template <typename Fn>
void emit(const Options& o, std::ostream& out, Fn&& fn)
{
    if (o.out.empty()) {
        fn(out);
        return;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) throw IoError("cannot open '" + o.out + "' for writing");
    fn(file);
    file.flush();
    if (!file) throw IoError("write to '" + o.out + "' failed");
}

Format format_of(const Options& o) { return parse_format(o.format); }

void check_digits(const Options& o)
{
    if (o.digits < 1 || o.digits > 17) throw UsageError("--digits must lie in [1, 17]");
}

// --- subcommands -------------------------------------------------------------

int cmd_correlate(const Options& o, std::ostream& out)
{
    check_digits(o);
    const Format format = format_of(o);
    const std::vector<Model> models = parse_models(o);
    if (models.size() != 1) throw UsageError("correlate takes a single --model");
    const Model& model = models.front();
    const Resolved r = resolve_geometry(o, model.spin() == Spin::one);
    const Geometry g = r.setup.geometry();
    const double c = correlation(model, g);

    Dataset data;
    data.header.emplace_back("command", "correlate");
    data.header.emplace_back("model", model.name());
    for (auto& kv : geometry_header(r, o.digits, false)) data.header.push_back(std::move(kv));
    tool_header(data, o);
    data.rows.push_back({r.speed, r.angle, model.name(), c, c - baseline_correlation(model, g.a, g.b), std::nullopt});
    emit(o, out, [&](std::ostream& s) { write_dataset(s, data, format, o.digits); });
    return kExitOk;
}

int cmd_inequality(const Options& o, std::ostream& out)
{
    check_digits(o);
    const Format format = format_of(o);
    const std::vector<Model> models = parse_models(o);
    if (models.size() != 1) throw UsageError("inequality takes a single --model");
    const Model& model = models.front();
    std::string kind = o.kind;
    if (kind.empty()) kind = model.spin() == Spin::half ? "chsh" : "bell-mermin";
    const Resolved r = resolve_geometry(o, model.spin() == Spin::one);

    InequalityResult result;
    InequalityResult pf;
    if (kind == "chsh") {
        result = chsh(model, r.setup.chsh());
        pf = chsh(Model::baseline(Spin::half), r.setup.chsh());
    } else if (kind == "bell-mermin") {
        result = bell_mermin(model, r.setup.mermin());
        pf = bell_mermin(Model::baseline(Spin::one), r.setup.mermin());
    } else {
        throw UsageError("--kind: expected chsh or bell-mermin, got '" + kind + "'");
    }

    Dataset data;
    data.header.emplace_back("command", "inequality");
    data.header.emplace_back("inequality", kind);
    data.header.emplace_back("model", model.name());
    for (auto& kv : geometry_header(r, o.digits, true)) data.header.push_back(std::move(kv));
    data.header.emplace_back("value", format_number(result.value, o.digits));
    data.header.emplace_back("bound", format_number(result.bound, o.digits));
    data.header.emplace_back("margin", format_number(result.margin, o.digits));
    data.header.emplace_back("violated", result.violated ? "true" : "false");
    tool_header(data, o);
    data.rows.push_back({r.speed, r.angle, model.name(), result.value, result.value - pf.value, result.margin});
    emit(o, out, [&](std::ostream& s) { write_dataset(s, data, format, o.digits); });
    return kExitOk;
}

Objective objective_or(const Options& o, Objective fallback)
{
    return o.objective.empty() ? fallback : parse_objective(o.objective);
}

/// Fixed parameters of a preset problem from the shared flags.
ParamMap fixed_params(const Options& o, const Resolved& r)
{
    ParamMap fixed;
    if (r.speed) fixed["v"] = *r.speed;
    if (r.preset && r.angle) fixed[std::string(preset_angle_name(*r.preset))] = *r.angle;
    const std::array<std::pair<const std::string*, char>, 4> axes{{{&o.a, 'a'}, {&o.b, 'b'}, {&o.c, 'c'}, {&o.d, 'd'}}};
    const std::array<const Direction*, 4> dirs{&r.setup.a, &r.setup.b, &r.setup.c, &r.setup.d};
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i].first->empty()) continue;
        const Vec3& v = dirs[i]->vec();
        const std::string base(1, axes[i].second);
        fixed[base + ".az"] = std::atan2(v.y, v.x);
        fixed[base + ".pol"] = std::acos(std::clamp(v.z, -1.0, 1.0));
    }
    return fixed;
}

Problem make_problem(const Options& o, Objective fallback, Resolved& r)
{
    Problem p;
    p.models = parse_models(o);
    p.objective = objective_or(o, fallback);
    if (o.preset.empty()) throw UsageError("--preset is required");
    if (!o.v_a.empty() || !o.v_b.empty() || !o.u_a.empty() || !o.v_rel.empty()) {
        throw UsageError("scan and optimize take velocities from --preset and --v only");
    }
    r = resolve_geometry(o, false);
    p.preset = *r.preset;
    if (!o.speed) r.speed.reset();
    p.fixed = fixed_params(o, r);
    return p;
}

int cmd_scan(const Options& o, std::ostream& out, unsigned threads)
{
    check_digits(o);
    const Format format = format_of(o);
    Resolved r;
    ScanSpec spec;
    spec.problem = make_problem(o, Objective::correlation, r);
    const std::string_view angle = preset_angle_name(spec.problem.preset);
    if (!o.angle_grid.empty()) {
        if (angle.empty()) throw UsageError("--angle-grid: preset " + o.preset + " has no angle parameter");
        Sweep s = parse_sweep(angle, o.angle_grid);
        spec.sweeps.push_back(s);
    }
    if (!o.grid.empty() || spec.sweeps.empty()) {
        spec.sweeps.push_back(parse_sweep("v", o.grid.empty() ? "0:0.995:201" : o.grid));
    }
    validate(spec);
    const ScanTable table = scan(spec, threads);

    Dataset data = to_dataset(spec, table);
    std::vector<std::pair<std::string, std::string>> header{
        {"command", "scan"},
        {"objective", std::string(to_string(spec.problem.objective))},
        {"geometry", describe(spec.problem.preset)}};
    for (const Sweep& s : spec.sweeps) {
        header.emplace_back("grid " + s.name, format_number(s.start) + ":" + format_number(s.stop) + ":" +
                                                  std::to_string(s.steps));
    }
    for (const auto& [k, v] : spec.problem.fixed) header.emplace_back("fixed " + k, format_number(v, o.digits));
    header.emplace_back("tool", std::string("relepr ") + kVersion);
    header.emplace_back("digits", std::to_string(o.digits));
    data.header.insert(data.header.begin(), header.begin(), header.end());
    emit(o, out, [&](std::ostream& s) { write_dataset(s, data, format, o.digits); });
    return kExitOk;
}

std::vector<FreeParam> parse_free(const Options& o, Preset preset)
{
    std::vector<FreeParam> params;
    for (const std::string& item : split_list(o.free)) {
        if (item == "v") {
            params.push_back(speed_param());
        } else if (item == "theta" || item == "omega") {
            if (preset_angle_name(preset) != item) {
                throw UsageError("--free: preset " + std::string(to_string(preset)) + " has no '" + item + "'");
            }
            params.push_back(angle_param(item));
        } else if (item == "axes") {
            for (auto& p : axis_params("abcd")) params.push_back(std::move(p));
        } else if (item.size() == 1) {
            for (auto& p : axis_params(item)) params.push_back(std::move(p));
        } else {
            throw UsageError("--free: unknown parameter '" + item + "'");
        }
    }
    if (params.empty()) throw UsageError("--free is required (v, theta, omega, axes, or axis letters)");
    return params;
}

int cmd_optimize(const Options& o, std::ostream& out, unsigned threads)
{
    check_digits(o);
    const Format format = format_of(o);
    Resolved r;
    const Problem problem = make_problem(o, Objective::chsh, r);
    const std::vector<FreeParam> params = parse_free(o, problem.preset);
    OptOptions opt;
    opt.maximize = !o.minimize;
    opt.starts = o.starts;
    opt.record_trace = o.trace;
    opt.threads = threads;
    const OptResult res = optimize(problem, params, opt);

    nlohmann::ordered_json doc;
    doc["objective"] = std::string(to_string(problem.objective));
    doc["series"] = series_name(problem, 0);
    doc["preset"] = std::string(to_string(problem.preset));
    doc["sense"] = opt.maximize ? "maximize" : "minimize";
    nlohmann::ordered_json best = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < res.names.size(); ++i) best[res.names[i]] = round_digits(res.best_params[i], o.digits);
    doc["best_params"] = best;
    doc["best_value"] = round_digits(res.best_value, o.digits);
    doc["evaluations"] = res.evaluations;
    doc["converged"] = res.converged;
    if (o.trace) {
        nlohmann::ordered_json trace = nlohmann::ordered_json::array();
        for (const TracePoint& t : res.trace) {
            nlohmann::ordered_json point = nlohmann::ordered_json::object();
            for (std::size_t i = 0; i < res.names.size(); ++i) point[res.names[i]] = round_digits(t.params[i], o.digits);
            trace.push_back({{"params", point}, {"value", round_digits(t.value, o.digits)}});
        }
        doc["trace"] = trace;
    }

    emit(o, out, [&](std::ostream& s) {
        if (format == Format::json) {
            s << doc.dump(1) << '\n';
            return;
        }
        s << "objective: " << to_string(problem.objective) << '\n'
          << "series: " << series_name(problem, 0) << '\n'
          << "preset: " << to_string(problem.preset) << '\n'
          << "sense: " << (opt.maximize ? "maximize" : "minimize") << '\n';
        for (std::size_t i = 0; i < res.names.size(); ++i)
            s << "param " << res.names[i] << ": " << format_number(res.best_params[i], o.digits) << '\n';
        s << "best_value: " << format_number(res.best_value, o.digits) << '\n'
          << "evaluations: " << res.evaluations << '\n'
          << "converged: " << (res.converged ? "true" : "false") << '\n';
        for (const TracePoint& t : res.trace) {
            s << "trace:";
            for (double x : t.params) s << ' ' << format_number(x, o.digits);
            s << " -> " << format_number(t.value, o.digits) << '\n';
        }
    });
    return kExitOk;
}

int cmd_power(const Options& o, std::ostream& out)
{
    check_digits(o);
    const std::vector<Model> models = parse_models(o);
    if (models.size() != 1) throw UsageError("power takes a single --model (the alternative)");
    PowerSpec spec;
    spec.alt_model = models.front();
    spec.null_model = Model::parse(o.null_model, parse_spin(o.spin));
    spec.alpha = o.alpha;
    spec.power = o.power;
    const Resolved r = resolve_geometry(o, false);
    const Geometry g = r.setup.geometry();
    const std::uint64_t n = required_events(spec, g);
    const double c_null = correlation(spec.null_model, g);
    const double c_alt = correlation(spec.alt_model, g);

    emit(o, out, [&](std::ostream& s) {
        Resolved echo = r;
        for (const auto& [k, v] : geometry_header(echo, o.digits, false)) s << k << ": " << v << '\n';
        s << "null_model: " << spec.null_model.name() << '\n'
          << "alt_model: " << spec.alt_model.name() << '\n'
          << "alpha: " << format_number(spec.alpha, o.digits) << '\n'
          << "power: " << format_number(spec.power, o.digits) << '\n'
          << "C_null: " << format_number(c_null, o.digits) << '\n'
          << "C_alt: " << format_number(c_alt, o.digits) << '\n'
          << "delta: " << format_number(c_alt - c_null, o.digits) << '\n'
          << "required_events: " << n << '\n';
    });
    return kExitOk;
}

int cmd_sample(const Options& o, std::ostream& out)
{
    check_digits(o);
    const std::vector<Model> models = parse_models(o);
    if (models.size() != 1) throw UsageError("sample takes a single --model");
    const Resolved r = resolve_geometry(o, false);
    if (o.events < 1) throw UsageError("--events must be at least 1");
    const SampleBatch batch = o.shards > 0
        ? sample_sharded(models.front(), r.setup.geometry(), o.events, o.seed, o.shards)
        : sample(models.front(), r.setup.geometry(), o.events, o.seed);
    emit(o, out, [&](std::ostream& s) { s << batch_record_json(batch, o.digits) << '\n'; });
    return kExitOk;
}

// --- figures -----------------------------------------------------------------

const std::array<double, 4> kFigureAngles{0.0, std::numbers::pi / 4.0, std::numbers::pi / 3.0,
                                          2.0 * std::numbers::pi / 3.0};

std::string angle_list() { return "0, pi/4, pi/3, 2pi/3"; }

ScanTable run_scan(Problem problem, const Sweep& grid, unsigned threads)
{
    ScanSpec spec{std::move(problem), {grid}};
    return scan(spec, threads);
}

void append_rows(Dataset& data, const ScanSpec& spec, const ScanTable& table)
{
    Dataset part = to_dataset(spec, table);
    for (auto& h : part.header) data.header.push_back(std::move(h));
    for (auto& row : part.rows) data.rows.push_back(std::move(row));
}

/// Deviation curves per angle, with the NW - c.m. gap in `extra`.
Dataset deviation_figure(const Model& model, Preset preset, const Sweep& grid, unsigned threads, bool gap_extra)
{
    Dataset data;
    const std::string angle(preset_angle_name(preset));
    const Model nw = model.spin() == Spin::half ? Model(ModelKind::nw_half) : Model(ModelKind::nw_one);
    const Model cm = model.spin() == Spin::half ? Model(ModelKind::cm_half) : Model(ModelKind::cm_one);
    for (double theta : kFigureAngles) {
        Problem p{{model}, preset, Objective::deviation, {{angle, theta}}};
        ScanSpec spec{p, {grid}};
        ScanTable table = scan(spec, threads);
        if (gap_extra) {
            const ScanTable gap = run_scan({{nw, cm}, preset, Objective::model_gap, {{angle, theta}}}, grid, threads);
            for (std::size_t i = 0; i < table.rows.size(); ++i) {
                if (table.rows[i].ok() && gap.rows[i].ok()) table.rows[i].eval.extra = gap.rows[i].eval.delta;
            }
        }
        append_rows(data, spec, table);
    }
    return data;
}

Dataset inequality_figure(const std::vector<Model>& models, Preset preset, Objective objective, const Sweep& grid,
                          unsigned threads)
{
    Dataset data;
    ScanSpec spec{{models, preset, objective, {}}, {grid}};
    append_rows(data, spec, scan(spec, threads));
    return data;
}

int cmd_figures(const Options& o, std::ostream& out, unsigned threads)
{
    check_digits(o);
    const Format format = format_of(o);
    const Sweep grid = parse_sweep("v", o.grid.empty() ? "0:0.995:201" : o.grid);
    validate(ScanSpec{{{Model::baseline(Spin::half)}, Preset::fig2, Objective::correlation, {}}, {grid}});
    const std::string grid_text = format_number(grid.start) + ":" + format_number(grid.stop) + ":" +
                                  std::to_string(grid.steps);

    struct Panel {
        std::string name;
        std::string description;
        std::string models;
        Preset preset;
        std::string columns;
        Dataset data;
    };
    std::vector<Panel> panels;
    panels.push_back({"fig4a", "deviation of the Newton-Wigner spin-1/2 correlation from -a.b", "nw-half",
                      Preset::fig2, "param=theta; C=correlation; delta=C-(-a.b); extra empty",
                      deviation_figure(Model(ModelKind::nw_half), Preset::fig2, grid, threads, false)});
    panels.push_back({"fig4b", "deviation of the centre-of-mass spin-1/2 correlation from -a.b", "cm-half",
                      Preset::fig2, "param=theta; C=correlation; delta=C-(-a.b); extra=C_nw-C_cm",
                      deviation_figure(Model(ModelKind::cm_half), Preset::fig2, grid, threads, true)});
    panels.push_back({"fig7", "deviation of the Newton-Wigner spin-1 correlation from -2a.b/3", "nw-one",
                      Preset::fig5, "param=omega; C=correlation; delta=C-(-2a.b/3); extra=C_nw-C_cm",
                      deviation_figure(Model(ModelKind::nw_one), Preset::fig5, grid, threads, true)});
    panels.push_back({"fig9", "Bell-Mermin value against velocity", "nw-one, cm-one, pf-same-frame-one",
                      Preset::fig9, "param empty; C=Bell-Mermin value; delta=value-PF value; extra=value-1",
                      inequality_figure({Model(ModelKind::nw_one), Model(ModelKind::cm_one), Model::baseline(Spin::one)},
                                        Preset::fig9, Objective::bell_mermin, grid, threads)});
    panels.push_back({"fig10", "CHSH value against velocity", "pf-same-frame, nw-half, cm-half", Preset::fig10,
                      "param empty; C=CHSH value; delta=value-PF value; extra=value-2",
                      inequality_figure({Model::baseline(Spin::half), Model(ModelKind::nw_half), Model(ModelKind::cm_half)},
                                        Preset::fig10, Objective::chsh, grid, threads)});

    const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

    for (Panel& panel : panels) {
        std::vector<std::pair<std::string, std::string>> header{
            {"figure", panel.name},
            {"description", panel.description},
            {"models", panel.models},
            {"geometry", describe(panel.preset)},
            {"grid v", grid_text},
            {"columns", panel.columns},
            {"seed", "none"},
            {"tool", std::string("relepr ") + kVersion},
            {"digits", std::to_string(o.digits)}};
        if (!preset_angle_name(panel.preset).empty()) {
            header.insert(header.begin() + 5, {"angles " + std::string(preset_angle_name(panel.preset)), angle_list()});
        }
        panel.data.header.insert(panel.data.header.begin(), header.begin(), header.end());

        const fs::path path = dir / (panel.name + std::string(extension(format)));
        std::ofstream file(path, std::ios::binary);
        if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
        write_dataset(file, panel.data, format, o.digits);
        file.flush();
        if (!file) throw IoError("write to '" + path.string() + "' failed");
        out << path.string() << '\n';
    }
    return kExitOk;
}

// --- option wiring -----------------------------------------------------------

void add_model(CLI::App* cmd, Options& o)
{
    cmd->add_option("--model", o.models,
                    "pf-exact, pf-small-u, pf-same-frame, nw-half, cm-half, nw-one, cm-one "
                    "(comma separated where several are allowed)");
    cmd->add_option("--spin", o.spin, "spin sector of pf-same-frame: half or one");
}

void add_geometry(CLI::App* cmd, Options& o)
{
    cmd->add_option("--preset", o.preset, "fig2, fig5, fig9 or fig10");
    cmd->add_option("--a", o.a, "axis a as x,y,z");
    cmd->add_option("--b", o.b, "axis b as x,y,z");
    cmd->add_option("--c", o.c, "axis c as x,y,z");
    cmd->add_option("--d", o.d, "axis d as x,y,z");
    cmd->add_option("--vA", o.v_a, "particle velocity at Alice as x,y,z");
    cmd->add_option("--vB", o.v_b, "particle velocity at Bob as x,y,z");
    cmd->add_option("--uA", o.u_a, "preferred-frame velocity seen by Alice as x,y,z");
    cmd->add_option("--vrel", o.v_rel, "Bob's velocity relative to Alice as x,y,z");
    cmd->add_option("--v", o.speed, "speed for the preset geometry (units of c)");
    cmd->add_option("--theta", o.theta, "fig2 angle in radians, or degrees with a 'deg' suffix");
    cmd->add_option("--omega", o.omega, "fig5 angle in radians, or degrees with a 'deg' suffix");
}

void add_output(CLI::App* cmd, Options& o)
{
    cmd->add_option("--out", o.out, "output path (stdout when omitted)");
    cmd->add_option("--format", o.format, "csv or json");
    cmd->add_option("--digits", o.digits, "significant digits (default 9)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Relativistic EPR correlations, Bell inequalities and experiment planning", "relepr"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string("relepr ") + kVersion);
    Options o;
    unsigned threads = 1;
    app.add_option("--threads", threads, "worker threads for scans and optimizer starts");

    CLI::App* correlate = app.add_subcommand("correlate", "evaluate one correlation function");
    add_model(correlate, o);
    add_geometry(correlate, o);
    add_output(correlate, o);

    CLI::App* inequality = app.add_subcommand("inequality", "evaluate CHSH or Bell-Mermin");
    add_model(inequality, o);
    add_geometry(inequality, o);
    add_output(inequality, o);
    inequality->add_option("--kind", o.kind, "chsh or bell-mermin (default by spin)");

    CLI::App* scan_cmd = app.add_subcommand("scan", "grid scan over v (and the preset angle)");
    add_model(scan_cmd, o);
    add_geometry(scan_cmd, o);
    add_output(scan_cmd, o);
    scan_cmd->add_option("--objective", o.objective, "correlation, deviation, chsh, bell-mermin, model-gap");
    scan_cmd->add_option("--grid", o.grid, "speed grid start:stop:steps (default 0:0.995:201)");
    scan_cmd->add_option("--angle-grid", o.angle_grid, "preset angle grid start:stop:steps");

    CLI::App* optimize_cmd = app.add_subcommand("optimize", "multi-start simplex search");
    add_model(optimize_cmd, o);
    add_geometry(optimize_cmd, o);
    add_output(optimize_cmd, o);
    optimize_cmd->add_option("--objective", o.objective, "correlation, deviation, chsh, bell-mermin, model-gap");
    optimize_cmd->add_option("--free", o.free, "free parameters: v, theta, omega, axes, or axis letters a-d");
    optimize_cmd->add_option("--starts", o.starts, "number of low-discrepancy starts (default 32)");
    optimize_cmd->add_flag("--minimize", o.minimize, "minimize instead of maximize");
    optimize_cmd->add_flag("--trace", o.trace, "report the final point of every start");

    CLI::App* power_cmd = app.add_subcommand("power", "events needed to separate two models");
    add_model(power_cmd, o);
    add_geometry(power_cmd, o);
    add_output(power_cmd, o);
    power_cmd->add_option("--null", o.null_model, "null-hypothesis model (default pf-same-frame)");
    power_cmd->add_option("--alpha", o.alpha, "two-sided significance (default 0.05)");
    power_cmd->add_option("--power", o.power, "power 1-beta (default 0.8)");

    CLI::App* sample_cmd = app.add_subcommand("sample", "simulate coincidence counts");
    add_model(sample_cmd, o);
    add_geometry(sample_cmd, o);
    add_output(sample_cmd, o);
    sample_cmd->add_option("--seed", o.seed, "64-bit seed (default 1)");
    sample_cmd->add_option("--events", o.events, "number of pairs (default 1000000)");
    sample_cmd->add_option("--shards", o.shards, "independent streams summed together (default: one stream)");

    CLI::App* figures = app.add_subcommand("figures", "write the figure datasets");
    figures->add_option("--out", o.out, "output directory (default .)");
    figures->add_option("--format", o.format, "csv or json");
    figures->add_option("--digits", o.digits, "significant digits (default 9)");
    figures->add_option("--grid", o.grid, "speed grid start:stop:steps (default 0:0.995:201)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*correlate) return cmd_correlate(o, out);
        if (*inequality) return cmd_inequality(o, out);
        if (*scan_cmd) return cmd_scan(o, out, threads);
        if (*optimize_cmd) return cmd_optimize(o, out, threads);
        if (*power_cmd) return cmd_power(o, out);
        if (*sample_cmd) return cmd_sample(o, out);
        if (*figures) return cmd_figures(o, out, threads);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace relepr::cli
