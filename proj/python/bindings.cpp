#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "scgk/checkpoint.hpp"
#include "scgk/config.hpp"
#include "scgk/fields.hpp"
#include "scgk/mhd.hpp"
#include "scgk/run.hpp"
#include "scgk/solvers_1d.hpp"

namespace py = pybind11;
using namespace scgk;

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

py::array_t<cplx> field_to_numpy(const SpectralField3D& f) {
  const ModeGrid& g = f.grid();
  py::array_t<cplx> a({g.m1(), g.m2(), int(g.len())});
  auto r = a.mutable_unchecked<3>();
  for (int n1 = -g.N1; n1 <= g.N1; ++n1)
    for (int n2 = -g.N2; n2 <= g.N2; ++n2)
      for (int k = 0; k < int(g.len()); ++k) r(n1 + g.N1, n2 + g.N2, k) = f(n1, n2, k);
  return a;
}

void numpy_to_field(SpectralField3D& f, const py::array_t<cplx, py::array::c_style | py::array::forcecast>& a) {
  const ModeGrid& g = f.grid();
  if (a.ndim() != 3 || a.shape(0) != g.m1() || a.shape(1) != g.m2() || a.shape(2) != py::ssize_t(g.len()))
    throw std::invalid_argument("expected shape (2*N1+1, 2*N2+1, N3+2)");
  auto r = a.unchecked<3>();
  for (int n1 = -g.N1; n1 <= g.N1; ++n1)
    for (int n2 = -g.N2; n2 <= g.N2; ++n2)
      for (int k = 0; k < int(g.len()); ++k) f(n1, n2, k) = r(n1 + g.N1, n2 + g.N2, k);
  f.enforce_reality();
}

Component component_from(const std::string& name) {
  for (auto c : {Component::kTemperature, Component::kToroidalB, Component::kPoloidalB, Component::kMeanB,
                 Component::kToroidalV, Component::kPoloidalV, Component::kMeanV})
    if (component_name(c) == name) return c;
  throw std::invalid_argument("unknown component " + name);
}

HarmonicSign harmonic_from(const std::string& s) {
  if (s == "growing") return HarmonicSign::kGrowing;
  if (s == "decaying") return HarmonicSign::kDecaying;
  throw std::invalid_argument("harmonic must be 'growing' or 'decaying'");
}

Scheme scheme_from(const std::string& s) {
  if (s == "euler") return Scheme::kEuler;
  if (s == "rk4") return Scheme::kRK4;
  if (s == "imex") return Scheme::kIMEX;
  throw std::invalid_argument("scheme must be 'euler', 'rk4' or 'imex'");
}

cheb::WeightConvention weights_from(const std::string& s) {
  if (s == "chebyshev") return cheb::WeightConvention::kChebyshevIntegral;
  if (s == "halved_t0") return cheb::WeightConvention::kHalvedT0;
  throw std::invalid_argument("weights must be 'chebyshev' or 'halved_t0'");
}

}  // namespace

PYBIND11_MODULE(_scgk, m) {
  m.doc() = "spectral Galerkin correction step and a plane-layer magnetoconvection simulator";

  py::register_exception<SingularOperatorError>(m, "SingularOperatorError", PyExc_ArithmeticError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<CheckpointError>(m, "CheckpointError", PyExc_IOError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // chebyshev
  m.def("weights", [](std::size_t n, const std::string& convention) { return cheb::weights(n, weights_from(convention)); },
        py::arg("n"), py::arg("convention") = "halved_t0");
  m.def("boundary_row", &cheb::boundary_row, py::arg("order"), py::arg("endpoint"), py::arg("M"));
  m.def("differentiate", [](const std::vector<double>& a) { return cheb::differentiate(ChebSeries<double>(a)).coeffs(); });
  m.def("eval_at", [](const std::vector<double>& a, double x) { return cheb::eval_at(ChebSeries<double>(a), x); });

  // galerkin core
  m.def("complement_basis",
        [](const MatrixXd& C, const std::vector<double>& w) { return complement_basis(ConstraintSet(C), w); });
  py::class_<CorrectionBasis>(m, "CorrectionBasis")
      .def_property_readonly("s", &CorrectionBasis::s)
      .def_property_readonly("q", &CorrectionBasis::q)
      .def_property_readonly("q_tilde", &CorrectionBasis::q_tilde)
      .def_property_readonly("operator_id", &CorrectionBasis::operator_id)
      .def("correct", [](const CorrectionBasis& cb, const Eigen::VectorXd& w) { return cb.correct<double>(w); });
  m.def(
      "prepare_correction",
      [](const MatrixXd& C, const MatrixXd& B, const std::vector<double>& w, const std::string& id) {
        return prepare_correction(ConstraintSet(C), B, w, id);
      },
      py::arg("C"), py::arg("B"), py::arg("weights"), py::arg("operator_id") = "B");
  m.def("galerkin_solve_dense", [](const MatrixXd& B, const MatrixXd& C, const Eigen::VectorXd& f,
                                   const std::vector<double>& w) { return galerkin_solve_dense(B, ConstraintSet(C), f, w); });

  // one-dimensional solvers
  m.def("project_dirichlet",
        [](const std::vector<double>& f, std::size_t N) { return project_dirichlet(ChebSeries<double>(f), N).coeffs(); });
  m.def(
      "solve_helmholtz",
      [](double alpha, double beta, const std::vector<double>& f, std::size_t N) {
        const std::size_t n = N + 2;
        const auto cb = prepare_correction(dirichlet_constraints(n), ConstCoeffOperator{alpha, beta, 0}.dense(Index(n)),
                                           cheb::weights(n), "helmholtz");
        return solve_helmholtz(HelmholtzProblem{alpha, beta, ChebSeries<double>(f), N}, cb).coeffs();
      },
      py::arg("alpha"), py::arg("beta"), py::arg("f"), py::arg("N"));
  m.def(
      "solve_constrained",
      [](double c0, double c2, double c4, const MatrixXd& C, const std::vector<double>& f) {
        ConstrainedSolver s(ConstCoeffOperator{c0, c2, c4}, ConstraintSet(C));
        return s.solve(ChebSeries<double>(f)).coeffs();
      },
      py::arg("c0"), py::arg("c2"), py::arg("c4"), py::arg("C"), py::arg("f"));
  m.def(
      "constraints_for",
      [](const std::string& c, int N3, double k, const std::string& h) {
        return constraints_for(component_from(c), N3, k, harmonic_from(h)).rows();
      },
      py::arg("component"), py::arg("N3"), py::arg("k") = 0.0, py::arg("harmonic") = "growing");

  // simulator
  py::class_<Params>(m, "Params")
      .def(py::init<>())
      .def_readwrite("P", &Params::P)
      .def_readwrite("R", &Params::R)
      .def_readwrite("tau", &Params::tau)
      .def_readwrite("Pm", &Params::Pm)
      .def_readwrite("eta", &Params::eta)
      .def_readwrite("e_r", &Params::e_r)
      .def_readwrite("L1", &Params::L1)
      .def_readwrite("L2", &Params::L2)
      .def_readwrite("linear_only", &Params::linear_only)
      .def_property(
          "harmonic", [](const Params& p) { return p.harmonic == HarmonicSign::kGrowing ? "growing" : "decaying"; },
          [](Params& p, const std::string& s) { p.harmonic = harmonic_from(s); })
      .def_property(
          "weights",
          [](const Params& p) {
            return p.weights == cheb::WeightConvention::kChebyshevIntegral ? "chebyshev" : "halved_t0";
          },
          [](Params& p, const std::string& s) { p.weights = weights_from(s); })
      .def("eta_value", &Params::eta_value);

  py::class_<SpectralState>(m, "SpectralState")
      .def_readwrite("t", &SpectralState::t)
      .def("max_abs", &SpectralState::max_abs)
      .def("all_finite", &SpectralState::all_finite)
      .def(
          "get",
          [](const SpectralState& s, const std::string& name) -> py::object {
            if (name == "theta") return field_to_numpy(s.theta);
            if (name == "vT") return field_to_numpy(s.vT);
            if (name == "vP") return field_to_numpy(s.vP);
            if (name == "bT") return field_to_numpy(s.bT);
            if (name == "bP") return field_to_numpy(s.bP);
            if (name == "vM1") return py::cast(s.vM1.coeffs());
            if (name == "vM2") return py::cast(s.vM2.coeffs());
            if (name == "bM1") return py::cast(s.bM1.coeffs());
            if (name == "bM2") return py::cast(s.bM2.coeffs());
            throw std::invalid_argument("unknown state component " + name);
          })
      .def("set", [](SpectralState& s, const std::string& name, py::object value) {
        auto series = [&](ChebSeries<double>& c) {
          auto v = value.cast<std::vector<double>>();
          if (v.size() != c.size()) throw std::invalid_argument("mean field length must be N3+2");
          c = ChebSeries<double>(v);
        };
        auto arr = [&] { return value.cast<py::array_t<cplx, py::array::c_style | py::array::forcecast>>(); };
        if (name == "theta") return numpy_to_field(s.theta, arr());
        if (name == "vT") return numpy_to_field(s.vT, arr());
        if (name == "vP") return numpy_to_field(s.vP, arr());
        if (name == "bT") return numpy_to_field(s.bT, arr());
        if (name == "bP") return numpy_to_field(s.bP, arr());
        if (name == "vM1") return series(s.vM1);
        if (name == "vM2") return series(s.vM2);
        if (name == "bM1") return series(s.bM1);
        if (name == "bM2") return series(s.bM2);
        throw std::invalid_argument("unknown state component " + name);
      });

  py::class_<Simulator>(m, "Simulator")
      .def(py::init<int, int, int, Params>(), py::arg("N1"), py::arg("N2"), py::arg("N3"), py::arg("params") = Params())
      .def_property_readonly("params", &Simulator::params)
      .def_property_readonly("shape",
                             [](const Simulator& s) {
                               const ModeGrid& g = s.grid();
                               return py::make_tuple(g.m1(), g.m2(), int(g.len()));
                             })
      .def("zero_state", &Simulator::zero_state)
      .def(
          "random_state",
          [](const Simulator& s, std::uint64_t seed, double theta, double v, double b, int max_mode, int max_degree) {
            return s.random_state(seed, RandomAmplitudes{theta, v, b, max_mode, max_degree});
          },
          py::arg("seed"), py::arg("theta") = 1e-2, py::arg("v") = 1e-2, py::arg("b") = 1e-4, py::arg("max_mode") = 2,
          py::arg("max_degree") = 6)
      .def("roll_state", &Simulator::roll_state, py::arg("theta_amp"), py::arg("v_amp"), py::arg("b_amp"))
      .def("project", [](const Simulator& sim, SpectralState s) {
        sim.project(s);
        return s;
      })
      .def("rhs", &Simulator::rhs, py::call_guard<py::gil_scoped_release>())
      .def(
          "step",
          [](const Simulator& sim, const SpectralState& s, double dt, const std::string& scheme, int n) {
            const Scheme sc = scheme_from(scheme);
            py::gil_scoped_release release;
            SpectralState x = s;
            for (int i = 0; i < n; ++i) x = sim.step(sc, x, dt);
            return x;
          },
          py::arg("state"), py::arg("dt"), py::arg("scheme") = "rk4", py::arg("steps") = 1)
      .def("energies",
           [](const Simulator& sim, const SpectralState& s) {
             const auto e = sim.energies(s);
             return py::make_tuple(e.t, e.E_v, e.E_b);
           })
      .def("max_constraint_violation", &Simulator::max_constraint_violation)
      .def("divergence", [](const Simulator& sim, const SpectralState& s) {
        return std::max(relative_divergence(sim.velocity(s)), relative_divergence(sim.magnetic(s)));
      });

  // persistence and batch runs
  m.def("write_checkpoint", &write_checkpoint, py::arg("path"), py::arg("state"), py::arg("params"));
  m.def("read_checkpoint", [](const std::string& path) {
    Checkpoint c = read_checkpoint(path);
    return py::make_tuple(c.state, c.params);
  });
  m.def(
      "run",
      [](const std::string& config_text, std::optional<std::string> output_dir, std::optional<std::string> resume) {
        std::istringstream is(config_text);
        const RunConfig cfg = parse_config(is);
        std::ostringstream log;
        int rc;
        {
          py::gil_scoped_release release;
          rc = run(cfg, RunOptions{output_dir, resume}, log);
        }
        return py::make_tuple(rc, log.str());
      },
      py::arg("config"), py::arg("output_dir") = py::none(), py::arg("resume") = py::none());
}
