#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relepr/correlations.hpp"
#include "relepr/errors.hpp"
#include "relepr/inequalities.hpp"
#include "relepr/kinematics.hpp"
#include "relepr/presets.hpp"
#include "relepr/sampling.hpp"
#include "relepr/search.hpp"

namespace py = pybind11;
using namespace relepr;

namespace {

using Triple = std::array<double, 3>;

Direction dir(const Triple& t) { return Direction(Vec3(t)); }
Velocity vel(const Triple& t) { return Velocity(Vec3(t)); }

Model model_arg(const std::string& name, const std::optional<std::string>& spin)
{
    std::optional<Spin> s;
    if (spin) s = (*spin == "one") ? Spin::one : Spin::half;
    return Model::parse(name, s);
}

Geometry geometry_arg(const Triple& a, const Triple& b, const Triple& v_a, const Triple& v_b, const Triple& u_a,
                      const Triple& v_rel)
{
    return {dir(a), dir(b), {vel(v_a), vel(v_b), vel(u_a), vel(v_rel)}};
}

py::dict result_dict(const InequalityResult& r)
{
    py::dict d;
    d["value"] = r.value;
    d["bound"] = r.bound;
    d["margin"] = r.margin;
    d["violated"] = r.violated;
    return d;
}

constexpr Triple kZero{0.0, 0.0, 0.0};

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Relativistic EPR correlation functions, Bell inequalities and sampling";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

    m.def("boost_matrix", [](const Triple& u) { return boost_matrix(vel(u)).matrix(); }, py::arg("u"));
    m.def("compose_velocity", [](const Triple& u, const Triple& w) { return compose_velocity(vel(u), vel(w)).vec().array(); },
          py::arg("u"), py::arg("w"));
    m.def(
        "wigner_rotation",
        [](const Triple& u_a, const Triple& v_rel) {
            const WignerResult w = wigner_rotation(vel(u_a), vel(v_rel));
            return py::make_tuple(w.rotation.matrix(), w.u_b.vec().array());
        },
        py::arg("u_a"), py::arg("v_rel"));
    m.def("kinetic_energy_to_speed", &kinetic_energy_to_speed, py::arg("kinetic_mev"),
          py::arg("mass_mev") = kProtonMassMeV);
    m.def("speed_to_kinetic_energy", &speed_to_kinetic_energy, py::arg("speed"), py::arg("mass_mev") = kProtonMassMeV);
    m.attr("PROTON_MASS_MEV") = kProtonMassMeV;

    m.def("pf_same_frame",
          [](const Triple& a, const Triple& b, const std::string& spin) {
              return pf_same_frame(dir(a), dir(b), spin == "one" ? Spin::one : Spin::half);
          },
          py::arg("a"), py::arg("b"), py::arg("spin") = "half");
    m.def("pf_small_u",
          [](const Triple& a, const Triple& b, const Triple& u_a, const Triple& u_b) {
              return pf_small_u(dir(a), dir(b), vel(u_a), vel(u_b));
          },
          py::arg("a"), py::arg("b"), py::arg("u_a"), py::arg("u_b"));
    m.def("pf_exact",
          [](const Triple& a, const Triple& b, const Triple& u_a, const Triple& v_rel) {
              return pf_exact({dir(a), dir(b), vel(u_a), vel(v_rel)});
          },
          py::arg("a"), py::arg("b"), py::arg("u_a"), py::arg("v_rel"));
    m.def("half_nw",
          [](const Triple& a, const Triple& b, const Triple& v_a, const Triple& v_b) {
              return half_nw({dir(a), dir(b), vel(v_a), vel(v_b)});
          },
          py::arg("a"), py::arg("b"), py::arg("v_a"), py::arg("v_b"));
    m.def("half_cm",
          [](const Triple& a, const Triple& b, const Triple& v_a, const Triple& v_b) {
              return half_cm({dir(a), dir(b), vel(v_a), vel(v_b)});
          },
          py::arg("a"), py::arg("b"), py::arg("v_a"), py::arg("v_b"));
    m.def("one_nw", [](const Triple& a, const Triple& b, const Triple& v) { return one_nw(dir(a), dir(b), vel(v)); },
          py::arg("a"), py::arg("b"), py::arg("v"));
    m.def("one_cm", [](const Triple& a, const Triple& b, const Triple& v) { return one_cm(dir(a), dir(b), vel(v)); },
          py::arg("a"), py::arg("b"), py::arg("v"));

    m.def("correlation",
          [](const std::string& model, const Triple& a, const Triple& b, const Triple& v_a, const Triple& v_b,
             const Triple& u_a, const Triple& v_rel, const std::optional<std::string>& spin) {
              return correlation(model_arg(model, spin), geometry_arg(a, b, v_a, v_b, u_a, v_rel));
          },
          py::arg("model"), py::arg("a"), py::arg("b"), py::arg("v_a") = kZero, py::arg("v_b") = kZero,
          py::arg("u_a") = kZero, py::arg("v_rel") = kZero, py::arg("spin") = py::none());
    m.def("deviation",
          [](const std::string& model, const Triple& a, const Triple& b, const Triple& v_a, const Triple& v_b,
             const Triple& u_a, const Triple& v_rel, const std::optional<std::string>& spin) {
              return deviation(model_arg(model, spin), geometry_arg(a, b, v_a, v_b, u_a, v_rel));
          },
          py::arg("model"), py::arg("a"), py::arg("b"), py::arg("v_a") = kZero, py::arg("v_b") = kZero,
          py::arg("u_a") = kZero, py::arg("v_rel") = kZero, py::arg("spin") = py::none());

    m.def("chsh",
          [](const std::string& model, const Triple& a, const Triple& c, const Triple& b, const Triple& d,
             const Triple& v_a, const Triple& v_b, const Triple& u_a, const Triple& v_rel) {
              const ChshConfig cfg{dir(a), dir(c), dir(b), dir(d), {vel(v_a), vel(v_b), vel(u_a), vel(v_rel)}};
              return result_dict(chsh(model_arg(model, std::nullopt), cfg));
          },
          py::arg("model"), py::arg("a"), py::arg("c"), py::arg("b"), py::arg("d"), py::arg("v_a") = kZero,
          py::arg("v_b") = kZero, py::arg("u_a") = kZero, py::arg("v_rel") = kZero);
    m.def("bell_mermin",
          [](const std::string& model, const Triple& a, const Triple& b, const Triple& c, const Triple& v) {
              std::optional<std::string> spin;
              if (model == "pf-same-frame") spin = "one";
              return result_dict(bell_mermin(model_arg(model, spin), {dir(a), dir(b), dir(c), vel(v)}));
          },
          py::arg("model"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("v") = kZero);

    m.def("preset_inequality",
          [](const std::string& preset, const std::string& model, double speed) {
              const Preset p = parse_preset(preset);
              const Setup s = preset_setup(p, speed);
              // fig9 is the Bell-Mermin configuration, every other preset is read as CHSH
              const bool mermin = p == Preset::fig9;
              const Model mdl = model_arg(model, mermin && model == "pf-same-frame" ? std::optional<std::string>("one")
                                                                                    : std::nullopt);
              return result_dict(mermin ? bell_mermin(mdl, s.mermin()) : chsh(mdl, s.chsh()));
          },
          py::arg("preset"), py::arg("model"), py::arg("speed"));

    m.def("scan",
          [](const std::vector<std::string>& models, const std::string& preset, const std::string& objective,
             const std::vector<std::tuple<std::string, double, double, int>>& sweeps, const ParamMap& fixed,
             unsigned threads) {
              ScanSpec spec;
              for (const auto& name : models) spec.problem.models.push_back(Model::parse(name));
              spec.problem.preset = parse_preset(preset);
              spec.problem.objective = parse_objective(objective);
              spec.problem.fixed = fixed;
              for (const auto& [name, start, stop, steps] : sweeps) spec.sweeps.push_back({name, start, stop, steps});
              const ScanTable table = scan(spec, threads);
              py::list rows;
              for (const ScanRow& r : table.rows) {
                  py::dict d;
                  d["series"] = r.series;
                  for (std::size_t i = 0; i < table.param_names.size(); ++i) d[py::str(table.param_names[i])] = r.params[i];
                  d["value"] = r.eval.value;
                  d["C"] = r.eval.c;
                  d["delta"] = r.eval.delta;
                  d["extra"] = r.eval.extra ? py::cast(*r.eval.extra) : py::none();
                  d["error"] = r.error;
                  rows.append(d);
              }
              return rows;
          },
          py::arg("models"), py::arg("preset"), py::arg("objective"), py::arg("sweeps"), py::arg("fixed") = ParamMap{},
          py::arg("threads") = 1);

    m.def("optimize",
          [](const std::vector<std::string>& models, const std::string& preset, const std::string& objective,
             const std::vector<std::string>& free, const ParamMap& fixed, bool maximize, int starts) {
              Problem p;
              for (const auto& name : models) p.models.push_back(Model::parse(name));
              p.preset = parse_preset(preset);
              p.objective = parse_objective(objective);
              p.fixed = fixed;
              std::vector<FreeParam> params;
              for (const std::string& f : free) {
                  if (f == "v") params.push_back(speed_param());
                  else if (f == "theta" || f == "omega") params.push_back(angle_param(f));
                  else for (auto& q : axis_params(f)) params.push_back(q);
              }
              OptOptions opt;
              opt.maximize = maximize;
              opt.starts = starts;
              const OptResult r = optimize(p, params, opt);
              py::dict d;
              d["best_params"] = r.best_map();
              d["best_value"] = r.best_value;
              d["evaluations"] = r.evaluations;
              d["converged"] = r.converged;
              return d;
          },
          py::arg("models"), py::arg("preset"), py::arg("objective"), py::arg("free"), py::arg("fixed") = ParamMap{},
          py::arg("maximize") = true, py::arg("starts") = 32);

    m.def("sample_counts", &sample_counts, py::arg("correlation"), py::arg("events"), py::arg("seed"));
    m.def("estimate_correlation",
          [](const CellCounts& counts) {
              const CorrelationEstimate e = estimate_correlation(counts);
              return py::make_tuple(e.value, e.standard_error);
          },
          py::arg("counts"));
    m.def("normal_quantile", &normal_quantile, py::arg("p"));
    m.def("required_events", py::overload_cast<double, double, double, double>(&required_events), py::arg("c_null"),
          py::arg("c_alt"), py::arg("alpha") = 0.05, py::arg("power") = 0.8);
    m.attr("PRNG_ALGORITHM") = std::string(kPrngAlgorithm);
}
