#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ccc/config.hpp"
#include "ccc/errors.hpp"
#include "ccc/presets.hpp"
#include "ccc/safety.hpp"
#include "ccc/sim.hpp"
#include "ccc/stability.hpp"

namespace py = pybind11;
using namespace ccc;

namespace {

Chain make_chain(double A, double B1, double B_head, double xi, int n_hv) {
  Chain chain;
  chain.cav = presets::cav({A, B1, B_head}, xi, n_hv);
  chain.hvs.assign(static_cast<std::size_t>(n_hv), presets::human_driver());
  chain.validate();
  return chain;
}

py::dict trajectory_columns(const Trajectory& traj) {
  std::vector<double> t, D0, v0, a0, u_nom, u_safe, u_app, h, h_e, v_head;
  std::vector<bool> active;
  const std::size_t n = traj.rows.empty() ? 0 : traj.rows.front().hvs.size();
  std::vector<std::vector<double>> D(n), v(n);
  for (const auto& r : traj.rows) {
    t.push_back(r.t);
    D0.push_back(r.D0);
    v0.push_back(r.v0);
    a0.push_back(r.a0);
    u_nom.push_back(r.u_nom);
    u_safe.push_back(r.u_safe);
    u_app.push_back(r.u_app);
    h.push_back(r.h);
    h_e.push_back(r.h_e);
    v_head.push_back(r.v_head);
    active.push_back(r.filter_active);
    for (std::size_t i = 0; i < n; ++i) {
      D[i].push_back(r.hvs[i].D);
      v[i].push_back(r.hvs[i].v);
    }
  }
  py::dict out;
  out["t"] = t;
  out["D0"] = D0;
  out["v0"] = v0;
  out["a0"] = a0;
  out["u_nom"] = u_nom;
  out["u_safe"] = u_safe;
  out["u_app"] = u_app;
  out["h"] = h;
  out["h_e"] = h_e;
  out["v_head"] = v_head;
  out["filter_active"] = active;
  for (std::size_t i = 0; i < n; ++i) {
    out[py::str("D" + std::to_string(i + 1))] = D[i];
    out[py::str("v" + std::to_string(i + 1))] = v[i];
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Connected cruise control: simulation, stability boundaries and safe-gain charts.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PoleError>(m, "PoleError", PyExc_ArithmeticError);
  py::register_exception<IntegrationFault>(m, "IntegrationFault", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<HvParams>(m, "HvParams")
      .def(py::init<>())
      .def_readwrite("A_h", &HvParams::A_h)
      .def_readwrite("B_h", &HvParams::B_h)
      .def_readwrite("kappa_h", &HvParams::kappa_h)
      .def_readwrite("tau", &HvParams::tau)
      .def_readwrite("D_st", &HvParams::D_st)
      .def_readwrite("v_max", &HvParams::v_max);

  py::class_<CavParams>(m, "CavParams")
      .def(py::init<>())
      .def_readwrite("A", &CavParams::A)
      .def_readwrite("B", &CavParams::B)
      .def_readwrite("C", &CavParams::C)
      .def_readwrite("kappa", &CavParams::kappa)
      .def_readwrite("xi", &CavParams::xi)
      .def_readwrite("D_st", &CavParams::D_st)
      .def_readwrite("v_max", &CavParams::v_max)
      .def_readwrite("phi", &CavParams::phi)
      .def("validate", &CavParams::validate);

  py::class_<CbfParams>(m, "CbfParams")
      .def(py::init<>())
      .def_readwrite("kappa_sf", &CbfParams::kappa_sf)
      .def_readwrite("D_sf", &CbfParams::D_sf)
      .def_readwrite("gamma", &CbfParams::gamma)
      .def_readwrite("gamma_e", &CbfParams::gamma_e);

  py::class_<SafetyEnvelope>(m, "SafetyEnvelope")
      .def(py::init<>())
      .def_readwrite("v_bar", &SafetyEnvelope::v_bar)
      .def_readwrite("a_min", &SafetyEnvelope::a_min)
      .def_readwrite("a_bar", &SafetyEnvelope::a_bar)
      .def_readwrite("gamma", &SafetyEnvelope::gamma);

  py::class_<Chain>(m, "Chain")
      .def(py::init<>())
      .def_readwrite("cav", &Chain::cav)
      .def_readwrite("hvs", &Chain::hvs)
      .def_property_readonly("n", &Chain::n)
      .def("validate", &Chain::validate);

  m.def("reference_chain", &make_chain, py::arg("A") = 0.6, py::arg("B1") = 0.53, py::arg("B_head") = 0.03,
        py::arg("xi") = 0.2, py::arg("n_hv") = 1,
        "CAV behind n_hv identical reference drivers, connected to the head vehicle.");

  // Safety
  py::class_<SafeBounds>(m, "SafeBounds")
      .def_readonly("A_lower", &SafeBounds::A_lower)
      .def_readonly("A_upper", &SafeBounds::A_upper)
      .def_readonly("feasible", &SafeBounds::feasible)
      .def_readonly("lag_free_limit", &SafeBounds::lag_free_limit)
      .def("contains", &SafeBounds::contains);

  m.def("theorem3_bounds", &theorem3_bounds, py::arg("cav"), py::arg("cbf") = CbfParams{},
        py::arg("envelope") = SafetyEnvelope{});
  m.def("theorem4_bounds", &theorem4_bounds, py::arg("cav"), py::arg("cbf") = CbfParams{},
        py::arg("envelope") = SafetyEnvelope{});
  m.def("critical_lag", &critical_lag, py::arg("cbf") = CbfParams{}, py::arg("envelope") = SafetyEnvelope{},
        py::arg("kappa") = 0.6, py::arg("D_st") = 5.0);
  m.def(
      "vbar_infinity_region",
      [](double xi, const CbfParams& c, const SafetyEnvelope& env, double kappa, double D_st) {
        const auto s = vbar_infinity_region(xi, c, env, kappa, D_st);
        py::dict d;
        d["B1"] = s.B1;
        d["B_connected"] = s.B_connected;
        d["A_lower"] = s.A_lower;
        d["A_upper"] = s.A_upper;
        d["feasible"] = s.feasible;
        return d;
      },
      py::arg("xi"), py::arg("cbf") = CbfParams{}, py::arg("envelope") = SafetyEnvelope{}, py::arg("kappa") = 0.6,
      py::arg("D_st") = 5.0);

  // Stability
  py::class_<StabilityFlags>(m, "StabilityFlags")
      .def_readonly("plant_stable", &StabilityFlags::plant_stable)
      .def_readonly("string_stable", &StabilityFlags::string_stable)
      .def_readonly("sup_gain", &StabilityFlags::sup_gain)
      .def_readonly("omega_at_sup", &StabilityFlags::omega_at_sup)
      .def_readonly("diagnostic", &StabilityFlags::diagnostic);

  m.def("head_to_tail_G", &head_to_tail_G, py::arg("s"), py::arg("chain"));
  m.def("plant_stable", &plant_stable, py::arg("cav"));
  m.def(
      "string_stable", [](const Chain& chain) { return string_stable_numeric(chain); }, py::arg("chain"));
  m.def("P_criterion", &P_criterion, py::arg("omega"), py::arg("chain"));
  m.def("curvature_L_h", &curvature_L_h, py::arg("hv"), py::arg("n"));
  m.def(
      "string_boundary_wK",
      [](const std::string& plane, double fixed, const Chain& chain, const std::vector<double>& omegas,
         const std::vector<double>& Ks) {
        py::list out;
        for (const auto& p : string_boundary_wK(plane_from_string(plane), fixed, chain, omegas, Ks)) {
          out.append(py::make_tuple(p.x, p.y, *p.param1, *p.param2));
        }
        return out;
      },
      py::arg("plane"), py::arg("fixed"), py::arg("chain"), py::arg("omegas"), py::arg("Ks"),
      "Points (x, y, omega, K) where G(j omega) = exp(-j K).");

  // Simulation
  m.def(
      "simulate",
      [](const Chain& chain, const std::string& variant, double t_final, double dt, const CbfParams& cbf) {
        Scenario s;
        s.n_hv = chain.n();
        s.t_final = t_final;
        s.dt = dt;
        const Trajectory traj = simulate(s, chain, cbf, controller_from_string(variant));
        py::dict out = trajectory_columns(traj);
        out["min_h"] = traj.min_h();
        out["min_D0"] = traj.min_D0();
        out["filter_active_duration"] = traj.filter_active_duration();
        return out;
      },
      py::arg("chain"), py::arg("variant") = "nominal", py::arg("t_final") = 40.0, py::arg("dt") = 0.01,
      py::arg("cbf") = CbfParams{}, "Brake-resume run from equilibrium; returns columns and summary values.");

  // Charts
  m.def(
      "classify_chart",
      [](const Chain& chain, const std::string& plane, double fixed, std::size_t nx, std::size_t ny,
         const CbfParams& cbf, const SafetyEnvelope& env) {
        ChartSpec spec;
        spec.plane = plane_from_string(plane);
        spec.fixed = fixed;
        spec.nx = nx;
        spec.ny = ny;
        const ChartGrid grid = classify_chart(spec, chain, cbf, env);
        std::vector<double> x, y, sup;
        std::vector<bool> plant, string, safe;
        for (const auto& c : grid.cells) {
          x.push_back(c.x);
          y.push_back(c.y);
          plant.push_back(c.plant);
          string.push_back(c.string);
          safe.push_back(c.safe);
          sup.push_back(c.sup_gain);
        }
        py::dict d;
        d["x"] = x;
        d["y"] = y;
        d["plant"] = plant;
        d["string"] = string;
        d["safe"] = safe;
        d["sup_gain"] = sup;
        d["safe_count"] = grid.safe_count();
        d["lag_free_limit"] = grid.lag_free_limit;
        return d;
      },
      py::arg("chain"), py::arg("plane") = "B1-BN", py::arg("fixed") = 0.6, py::arg("nx") = 200,
      py::arg("ny") = 200, py::arg("cbf") = CbfParams{}, py::arg("envelope") = SafetyEnvelope{});
}
