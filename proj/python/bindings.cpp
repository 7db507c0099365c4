#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "robustbo/bench.hpp"
#include "robustbo/campaign.hpp"
#include "robustbo/config.hpp"
#include "robustbo/diagnostics.hpp"
#include "robustbo/errors.hpp"
#include "robustbo/gp.hpp"
#include "robustbo/measures.hpp"
#include "robustbo/policy.hpp"
#include "robustbo/sampling.hpp"

namespace py = pybind11;
using namespace robustbo;

namespace {

using Vec = std::vector<double>;

py::dict bounds_dict(const BoundPair& b) {
  py::dict d;
  d["lcb"] = b.lcb;
  d["ucb"] = b.ucb;
  return d;
}

py::dict trace_dict(const RunTrace& trace) {
  std::vector<int> t, x, w, xhat;
  Vec beta, y, regret, gain;
  for (const auto& r : trace.records) {
    t.push_back(r.t);
    beta.push_back(r.beta);
    x.push_back(static_cast<int>(r.query.x));
    w.push_back(static_cast<int>(r.query.w));
    y.push_back(r.y);
    xhat.push_back(static_cast<int>(r.x_hat));
    regret.push_back(r.regret);
    gain.push_back(r.info_gain);
  }
  py::dict d;
  d["t"] = t;
  d["beta"] = beta;
  d["x_index"] = x;
  d["w_index"] = w;
  d["y"] = y;
  d["xhat_index"] = xhat;
  d["regret"] = regret;
  d["info_gain"] = gain;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust Bayesian optimization on finite grids";
  m.attr("__version__") = "0.1.0";

  // Messages carry the error kind as a prefix, e.g. "data-error: ...".
  py::register_exception<Error>(m, "RobustboError", PyExc_RuntimeError);

  // grids and kernels
  py::class_<EnvDist>(m, "EnvDist")
      .def(py::init<std::vector<double>>(), py::arg("pmf"))
      .def_static("uniform", &EnvDist::uniform)
      .def_static("from_weights", [](const Vec& w) { return EnvDist::from_weights(w); })
      .def_property_readonly("pmf", [](const EnvDist& d) { return Vec(d.pmf().begin(), d.pmf().end()); })
      .def_property_readonly("p_min", &EnvDist::p_min)
      .def("__len__", &EnvDist::size);

  py::class_<JointPoint>(m, "JointPoint")
      .def(py::init([](Index x, Index w) { return JointPoint{x, w}; }), py::arg("x"), py::arg("w"))
      .def_readwrite("x", &JointPoint::x)
      .def_readwrite("w", &JointPoint::w)
      .def("__eq__", [](const JointPoint& a, const JointPoint& b) { return a == b; })
      .def("__repr__", [](const JointPoint& p) {
        return "JointPoint(" + std::to_string(p.x) + ", " + std::to_string(p.w) + ")";
      });

  py::class_<ProblemGrid>(m, "ProblemGrid")
      .def(py::init<Eigen::MatrixXd, Eigen::MatrixXd, EnvDist>(), py::arg("design"), py::arg("env"), py::arg("dist"))
      .def_property_readonly("design", &ProblemGrid::design)
      .def_property_readonly("env", &ProblemGrid::env)
      .def_property_readonly("dist", &ProblemGrid::dist)
      .def_property_readonly("design_count", &ProblemGrid::design_count)
      .def_property_readonly("env_count", &ProblemGrid::env_count)
      .def("__len__", &ProblemGrid::size)
      .def("joint_index", &ProblemGrid::joint_index)
      .def("point", &ProblemGrid::point);

  py::class_<KernelSpec>(m, "KernelSpec")
      .def_static("squared_exponential", &KernelSpec::squared_exponential, py::arg("lengthscale"),
                  py::arg("variance") = 1.0)
      .def_static("matern32", &KernelSpec::matern32, py::arg("lengthscale"), py::arg("variance") = 1.0)
      .def("__call__", [](const KernelSpec& k, const Vec& a, const Vec& b) { return k(a, b); })
      .def("__repr__", &KernelSpec::describe);

  // GP posterior
  py::class_<GPosterior>(m, "GPosterior")
      .def(py::init<KernelSpec, double, const ProblemGrid&>(), py::arg("kernel"), py::arg("noise_var"),
           py::arg("grid"))
      .def("update", &GPosterior::update, py::arg("point"), py::arg("y"))
      .def_property_readonly("mean", &GPosterior::mean_vector)
      .def_property_readonly("variance", &GPosterior::variance_vector)
      .def_property_readonly("observation_count", &GPosterior::observation_count)
      .def("realized_info_gain", &GPosterior::realized_info_gain)
      .def("field", [](const GPosterior& g) {
        auto f = posterior_field(g);
        return py::make_tuple(f.mean, f.sd);
      });

  m.def(
      "sample_paths",
      [](const GPosterior& g, int count, std::uint64_t seed) {
        Rng rng(seed);
        return sample_paths(g, count, rng);
      },
      py::arg("state"), py::arg("count"), py::arg("seed"));
  m.def(
      "greedy_max_info_gain",
      [](const KernelSpec& k, double noise, const ProblemGrid& grid, int horizon) {
        auto c = greedy_max_info_gain(k, noise, grid, horizon);
        return py::make_tuple(c.greedy, c.certified);
      },
      py::arg("kernel"), py::arg("noise_var"), py::arg("grid"), py::arg("horizon"));

  // measures
  py::class_<MeasureSpec>(m, "MeasureSpec")
      .def_static("expectation", &MeasureSpec::expectation)
      .def_static("worst_case", &MeasureSpec::worst_case)
      .def_static("best_case", &MeasureSpec::best_case)
      .def_static("value_at_risk", &MeasureSpec::value_at_risk)
      .def_static("cvar", &MeasureSpec::cvar)
      .def_static("mean_abs_dev", &MeasureSpec::mean_abs_dev)
      .def_static("std_dev", &MeasureSpec::std_dev)
      .def_static("variance", &MeasureSpec::variance)
      .def_static("dist_robust", &MeasureSpec::dist_robust)
      .def_static("monotone_lipschitz", &MeasureSpec::monotone_lipschitz)
      .def_static("weighted_sum", &MeasureSpec::weighted_sum)
      .def_static("prob_threshold", &MeasureSpec::prob_threshold)
      .def_static("exp_minus_mad", &MeasureSpec::exp_minus_mad)
      .def("__repr__", &MeasureSpec::describe);

  m.def(
      "measure_eval", [](const MeasureSpec& s, const Vec& g, const EnvDist& d) { return measure_eval(s, g, d); },
      py::arg("spec"), py::arg("g"), py::arg("dist"));
  m.def(
      "bounds_exact",
      [](const MeasureSpec& s, const Vec& l, const Vec& u, const EnvDist& d) {
        return bounds_dict(bounds_exact(s, l, u, d));
      },
      py::arg("spec"), py::arg("lower"), py::arg("upper"), py::arg("dist"));
  m.def("q_value", &q_value, py::arg("spec"), py::arg("a"));

  // policy
  m.def(
      "beta_from_xi", [](std::size_t n, double xi) { return beta_from_xi(n, xi).beta; }, py::arg("grid_size"),
      py::arg("xi"));
  m.def(
      "credible_bounds",
      [](const GPosterior& g, double beta, const MeasureSpec& s, const EnvDist& d) {
        auto f = credible_field(g, beta, s, d);
        Vec lcb, ucb;
        for (const auto& b : f.bounds) {
          lcb.push_back(b.lcb);
          ucb.push_back(b.ucb);
        }
        return py::make_tuple(lcb, ucb);
      },
      py::arg("state"), py::arg("beta"), py::arg("spec"), py::arg("dist"));
  m.def("estimate_solution", &estimate_solution, py::arg("state"), py::arg("spec"), py::arg("dist"));
  m.def(
      "select_proposed",
      [](const GPosterior& g, double beta, const MeasureSpec& s, const EnvDist& d) {
        auto f = credible_field(g, beta, s, d);
        const Index x = select_x_proposed(f, estimate_solution(g, s, d));
        return JointPoint{x, select_w_simulator(g, x)};
      },
      py::arg("state"), py::arg("beta"), py::arg("spec"), py::arg("dist"));

  // benchmarks
  m.def("gen_grid", &gen_grid, py::arg("M"), py::arg("D"), py::arg("s"), py::arg("dist") = EnvDist{});
  m.def("himmelblau_scaled", &himmelblau_scaled);
  m.def(
      "synthetic_2d",
      [](const ProblemGrid& grid, const KernelSpec& k, std::uint64_t seed) {
        return Eigen::MatrixXd(synthetic_2d(grid, k, seed).values);
      },
      py::arg("grid"), py::arg("kernel"), py::arg("seed"));
  m.def(
      "true_optimum",
      [](const Eigen::MatrixXd& values, const MeasureSpec& s, const EnvDist& d) {
        TabulatedOracle o{values, 0.0};
        auto r = true_optimum(o, s, d);
        return py::make_tuple(r.x_star, r.f_star, r.values);
      },
      py::arg("values"), py::arg("spec"), py::arg("dist"));
  m.def("write_carrier_standin", &write_carrier_standin, py::arg("path"), py::arg("seed") = 0);

  // bounds
  m.def("c0", &c0);
  m.def("c1", &c1);
  m.def("markov_bound", &markov_bound);
  m.def(
      "bound_simple",
      [](bool mad, std::size_t n, double noise, const Vec& gamma) {
        return bound_simple(mad ? MeasureClass::MeanAbsDev : MeasureClass::Other, n, noise, gamma);
      },
      py::arg("mad"), py::arg("grid_size"), py::arg("noise_var"), py::arg("gamma"));

  // campaigns
  m.def(
      "run_config",
      [](const std::string& text, const std::string& output) {
        auto cfg = parse_config_text(text, "<python>");
        CampaignResult r;
        {
          py::gil_scoped_release release;
          r = run_campaign(cfg);
          if (!output.empty()) emit_csv(r, output);
        }
        py::dict out;
        for (const auto& s : r.strategies) {
          py::dict d;
          d["mean_regret"] = s.mean_regret;
          d["se2"] = s.se2;
          py::list traces;
          for (const auto& t : s.traces) traces.append(trace_dict(t));
          d["traces"] = traces;
          out[py::str(std::string(to_string(s.strategy)))] = d;
        }
        py::dict result;
        result["strategies"] = out;
        result["x_star"] = r.x_star;
        result["warnings"] = r.config.warnings;
        if (r.bounds) {
          py::dict b;
          b["gamma_hat"] = r.bounds->gamma_hat;
          b["bound_cumulative"] = r.bounds->bound_cumulative;
          b["guaranteed"] = r.bounds->guaranteed;
          result["bounds"] = b;
        }
        return result;
      },
      py::arg("config_text"), py::arg("output") = "");
}
