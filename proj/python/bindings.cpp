#include "dnflow/config.hpp"
#include "dnflow/errors.hpp"
#include "dnflow/flow.hpp"
#include "dnflow/invariants.hpp"
#include "dnflow/oracle.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace dnflow;

namespace {

Bitmap bitmap_from_array(py::array_t<bool, py::array::c_style | py::array::forcecast> mask, double h) {
  if (mask.ndim() != 2) throw InvalidParameter("mask must be a 2-D boolean array");
  Bitmap b;
  b.rows = static_cast<int>(mask.shape(0));
  b.cols = static_cast<int>(mask.shape(1));
  b.h = h;
  b.cells.resize(static_cast<std::size_t>(b.rows) * b.cols);
  const bool* data = mask.data();
  for (std::size_t i = 0; i < b.cells.size(); ++i) b.cells[i] = data[i] ? 1 : 0;
  return b;
}

py::dict row_dict(const std::vector<DiagnosticsRow>& rows) {
  std::vector<double> k, t, np, energy, rayleigh, dual_q, lambda_decay, mu, conservation, residual;
  for (const auto& r : rows) {
    k.push_back(static_cast<double>(r.k));
    t.push_back(r.t);
    np.push_back(r.Np);
    energy.push_back(r.energy);
    rayleigh.push_back(r.rayleigh);
    dual_q.push_back(r.dual_q);
    lambda_decay.push_back(r.lambda_decay);
    mu.push_back(r.mu_from_dual);
    conservation.push_back(r.conservation);
    residual.push_back(r.energy_residual);
  }
  py::dict d;
  auto arr = [](const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); };
  d["k"] = arr(k);
  d["t"] = arr(t);
  d["Np"] = arr(np);
  d["energy"] = arr(energy);
  d["rayleigh"] = arr(rayleigh);
  d["dual_q"] = arr(dual_q);
  d["lambda_decay"] = arr(lambda_decay);
  d["mu_from_dual"] = arr(mu);
  d["conservation"] = arr(conservation);
  d["energy_residual"] = arr(residual);
  return d;
}

SolverConfig solver(double grad_tol, long max_iters) {
  SolverConfig c;
  c.grad_tol = grad_tol;
  c.max_iters = max_iters;
  return c;
}

}  // namespace

PYBIND11_MODULE(_dnflow, m) {
  m.doc() = "Doubly nonlinear flow solver: optimal Poincare constants from large-time limits";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<NonConvergence>(m, "NonConvergence", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<UnsupportedRegime>(m, "UnsupportedRegime", error.ptr());
  py::register_exception<CompatibilityError>(m, "CompatibilityError", error.ptr());
  py::register_exception<DegenerateInput>(m, "DegenerateInput", error.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
  py::register_exception<InvalidParameter>(m, "InvalidParameter", error.ptr());
  py::register_exception<InvalidResolution>(m, "InvalidResolution", error.ptr());
  py::register_exception<EmptyDomain>(m, "EmptyDomain", error.ptr());
  py::register_exception<RangeError>(m, "RangeError", error.ptr());

  py::class_<Domain>(m, "Domain")
      .def_static("interval", &Domain::interval, py::arg("n"))
      .def_static("rectangle", &Domain::rectangle, py::arg("nx"), py::arg("ny"), py::arg("lx") = 1.0,
                  py::arg("ly") = 1.0)
      .def_static(
          "masked", [](py::array_t<bool, py::array::c_style | py::array::forcecast> mask,
                       double h) { return Domain::masked(bitmap_from_array(mask, h)); },
          py::arg("mask"), py::arg("h"))
      .def_property_readonly("kind", [](const Domain& d) { return std::string(to_string(d.kind())); })
      .def_property_readonly("size", &Domain::size)
      .def_property_readonly("dimension", &Domain::dimension)
      .def_property_readonly("hx", &Domain::hx)
      .def_property_readonly("hy", &Domain::hy)
      .def_property_readonly("volume_weight", &Domain::volume_weight)
      .def_property_readonly("coordinates",
                             [](const Domain& d) {
                               Eigen::MatrixXd xy(d.size(), d.dimension());
                               for (Eigen::Index i = 0; i < d.size(); ++i)
                                 for (int c = 0; c < d.dimension(); ++c) xy(i, c) = d.coordinates()[i][c];
                               return xy;
                             })
      .def("__len__", [](const Domain& d) { return d.size(); });

  py::class_<BoundaryRegime>(m, "BoundaryRegime")
      .def_static("dirichlet", &BoundaryRegime::dirichlet)
      .def_static("robin", &BoundaryRegime::robin, py::arg("beta"))
      .def_static("neumann", &BoundaryRegime::neumann)
      .def_static("fractional", &BoundaryRegime::fractional, py::arg("s"))
      .def_property_readonly("kind", [](const BoundaryRegime& r) { return std::string(to_string(r.kind)); })
      .def_readonly("beta", &BoundaryRegime::beta)
      .def_readonly("s", &BoundaryRegime::s)
      .def("__repr__", &BoundaryRegime::describe);

  py::class_<EnergyOperator>(m, "EnergyOperator")
      .def(py::init<const Domain&, const BoundaryRegime&, double>(), py::arg("domain"), py::arg("regime"),
           py::arg("p"))
      .def_property_readonly("p", &EnergyOperator::p)
      .def_property_readonly("domain", &EnergyOperator::domain, py::return_value_policy::reference_internal)
      .def_property_readonly("regime", &EnergyOperator::regime)
      .def("energy", &EnergyOperator::energy, py::arg("u"), py::arg("eps") = 0.0)
      .def("gradient", &EnergyOperator::gradient, py::arg("u"), py::arg("eps") = 0.0);

  py::class_<EigenResult>(m, "EigenResult")
      .def_readonly("lam", &EigenResult::lambda)
      .def_readonly("mu", &EigenResult::mu)
      .def_readonly("extremal", &EigenResult::extremal)
      .def_readonly("iterations", &EigenResult::iterations)
      .def_readonly("residual", &EigenResult::residual);

  py::class_<FlowTrajectory>(m, "FlowTrajectory")
      .def_readonly("tau", &FlowTrajectory::tau)
      .def_readonly("states", &FlowTrajectory::states)
      .def_property_readonly("steps", &FlowTrajectory::steps)
      .def_property_readonly("diagnostics", [](const FlowTrajectory& t) { return row_dict(t.diagnostics); });

  py::class_<LimitResult>(m, "LimitResult")
      .def_readonly("lam", &LimitResult::lambda)
      .def_readonly("mu", &LimitResult::mu)
      .def_readonly("rayleigh", &LimitResult::rayleigh)
      .def_readonly("profile", &LimitResult::profile)
      .def_readonly("profile_gap", &LimitResult::profile_gap)
      .def_readonly("steps", &LimitResult::steps)
      .def_readonly("tau", &LimitResult::tau)
      .def_readonly("degenerate", &LimitResult::degenerate)
      .def_readonly("converged", &LimitResult::converged)
      .def_readonly("trajectory", &LimitResult::trajectory);

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("passed", &CheckResult::passed)
      .def_readonly("worst", &CheckResult::worst)
      .def_readonly("limit", &CheckResult::limit)
      .def_readonly("samples", &CheckResult::samples)
      .def_readonly("detail", &CheckResult::detail)
      .def("__repr__", [](const CheckResult& r) {
        return "<CheckResult " + r.name + (r.passed ? " pass" : " FAIL") + ">";
      });

  m.def("integrate_power", &integrate_power, py::arg("domain"), py::arg("u"), py::arg("r"));
  m.def("lp_norm", &lp_norm, py::arg("domain"), py::arg("u"), py::arg("r"));
  m.def("trace_lp", &trace_lp, py::arg("domain"), py::arg("u"), py::arg("p"));
  m.def("zero_pmean_shift", &zero_pmean_shift, py::arg("domain"), py::arg("u"), py::arg("p"));

  m.def(
      "implicit_step",
      [](const EnergyOperator& op, const Field& u_prev, double tau, double epsilon, double grad_tol, long max_iters) {
        return implicit_step(op, u_prev, tau, EnergyParams{op.p(), epsilon}, solver(grad_tol, max_iters)).u;
      },
      py::arg("op"), py::arg("u_prev"), py::arg("tau"), py::arg("epsilon") = 1e-6, py::arg("grad_tol") = 1e-9,
      py::arg("max_iters") = 200000);
  m.def(
      "inverse_operator",
      [](const EnergyOperator& op, const Field& f, double epsilon, double grad_tol, long max_iters) {
        return inverse_operator(op, f, EnergyParams{op.p(), epsilon}, solver(grad_tol, max_iters));
      },
      py::arg("op"), py::arg("f"), py::arg("epsilon") = 1e-6, py::arg("grad_tol") = 1e-9,
      py::arg("max_iters") = 200000);
  m.def(
      "evolve",
      [](const EnergyOperator& op, const Field& g, double tau, long steps, double epsilon, double grad_tol,
         bool dual) {
        EvolveOptions opts;
        opts.dual = dual;
        py::gil_scoped_release release;
        return evolve(op, g, tau, steps, EnergyParams{op.p(), epsilon}, solver(grad_tol, 200000), opts);
      },
      py::arg("op"), py::arg("g"), py::arg("tau"), py::arg("steps"), py::arg("epsilon") = 1e-6,
      py::arg("grad_tol") = 1e-9, py::arg("dual") = true);
  m.def(
      "run_to_limit",
      [](const EnergyOperator& op, const Field& g, std::optional<double> tau, double rel_tol, long max_steps,
         double epsilon, double grad_tol) {
        LimitOptions opts;
        opts.tau = tau;
        opts.rel_tol = rel_tol;
        opts.max_steps = max_steps;
        py::gil_scoped_release release;
        return run_to_limit(op, g, EnergyParams{op.p(), epsilon}, solver(grad_tol, 200000), opts);
      },
      py::arg("op"), py::arg("g"), py::arg("tau") = py::none(), py::arg("rel_tol") = 1e-8,
      py::arg("max_steps") = 5000, py::arg("epsilon") = 1e-6, py::arg("grad_tol") = 1e-9);
  m.def(
      "minimize_rayleigh",
      [](const EnergyOperator& op, std::uint64_t seed, double epsilon, double grad_tol) {
        py::gil_scoped_release release;
        return minimize_rayleigh(op, EnergyParams{op.p(), epsilon}, solver(grad_tol, 200000), seed);
      },
      py::arg("op"), py::arg("seed") = 1, py::arg("epsilon") = 1e-6, py::arg("grad_tol") = 1e-9);
  m.def("dense_linear_reference", &dense_linear_reference, py::arg("domain"), py::arg("regime"));
  m.def(
      "dual_quotient",
      [](const EnergyOperator& op, const Field& u, double epsilon, double grad_tol) {
        return dual_quotient(op, u, EnergyParams{op.p(), epsilon}, solver(grad_tol, 200000));
      },
      py::arg("op"), py::arg("u"), py::arg("epsilon") = 1e-6, py::arg("grad_tol") = 1e-9);
  m.def(
      "rayleigh_quotient",
      [](const EnergyOperator& op, const Field& u, double epsilon) {
        return rayleigh_quotient(op, u, EnergyParams{op.p(), epsilon});
      },
      py::arg("op"), py::arg("u"), py::arg("epsilon") = 1e-6);
  m.def("mu_lambda_consistency", &mu_lambda_consistency, py::arg("lam"), py::arg("mu"), py::arg("p"));
  m.def(
      "verify",
      [](const EnergyOperator& op, long steps, long samples, std::uint64_t seed, double epsilon, double grad_tol) {
        const EnergyParams params{op.p(), epsilon};
        const auto cfg = solver(grad_tol, 200000);
        SuiteOptions opts;
        opts.steps = steps;
        opts.samples = samples;
        opts.seed = seed;
        py::gil_scoped_release release;
        const auto eig = minimize_rayleigh(op, params, cfg, seed);
        return run_invariant_suite(op, params, cfg, eig, opts);
      },
      py::arg("op"), py::arg("steps") = 200, py::arg("samples") = 200, py::arg("seed") = 1,
      py::arg("epsilon") = 1e-6, py::arg("grad_tol") = 1e-9);
  m.def(
      "parse_config",
      [](const std::string& text) {
        const auto c = parse_config_text(text);
        py::dict d;
        for (const auto& key : config_keys()) d[py::str(key)] = py::none();
        d["domain.kind"] = c.domain_kind;
        d["domain.n"] = c.n;
        d["domain.ny"] = c.ny;
        d["domain.lx"] = c.lx;
        d["domain.ly"] = c.ly;
        d["domain.mask"] = c.mask_path;
        d["p"] = c.p;
        d["regime.kind"] = c.regime_kind;
        d["regime.beta"] = c.beta;
        d["regime.s"] = c.s;
        d["tau"] = c.tau ? py::object(py::float_(*c.tau)) : py::object(py::str("auto"));
        d["steps"] = c.steps;
        d["grad_tol"] = c.grad_tol;
        d["epsilon"] = c.epsilon;
        d["max_iters"] = c.max_iters;
        d["seed"] = c.seed;
        d["init.kind"] = c.init_kind;
        d["init.path"] = c.init_path;
        d["out.dir"] = c.out_dir;
        d["snapshots"] = c.snapshots;
        d["eigen.rel_tol"] = c.eigen_rel_tol;
        d["eigen.max_steps"] = c.eigen_max_steps;
        d["verify.samples"] = c.verify_samples;
        d["verify.steps"] = c.verify_steps;
        return d;
      },
      py::arg("text"));
}
