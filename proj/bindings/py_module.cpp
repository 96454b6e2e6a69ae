#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dokl/config.hpp"
#include "dokl/errors.hpp"
#include "dokl/komp.hpp"
#include "dokl/metrics_io.hpp"
#include "dokl/theory.hpp"

namespace py = pybind11;

namespace {

Eigen::MatrixXd metrics_matrix(const std::vector<dokl::RoundMetrics>& rows) {
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), 9);
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    const auto& m = rows[static_cast<std::size_t>(r)];
    M(r, 0) = static_cast<double>(m.t);
    M(r, 1) = m.global_loss;
    M(r, 2) = m.avg_loss;
    M(r, 3) = m.max_violation;
    M(r, 4) = m.avg_violation;
    M(r, 5) = m.mean_violation_pos;
    M(r, 6) = static_cast<double>(m.total_model_order);
    M(r, 7) = static_cast<double>(m.max_model_order);
    M(r, 8) = m.dual_norm;
  }
  return M;
}

py::dict run_result_dict(const dokl::RunResult& r) {
  py::dict out;
  out["metrics"] = metrics_matrix(r.metrics);
  out["rounds"] = r.rounds_completed;
  out["early_stop"] = r.early_stop;
  out["warning"] = r.warning;
  return out;
}

}  // namespace

PYBIND11_MODULE(dokl, m) {
  m.doc() = "decentralized online kernel learning";

  py::register_exception<dokl::NumericError>(m, "NumericError",
                                             PyExc_RuntimeError);
  py::register_exception<dokl::ProtocolError>(m, "ProtocolError",
                                              PyExc_RuntimeError);

  py::class_<dokl::KernelSpec>(m, "KernelSpec")
      .def(py::init([](double bandwidth) {
             return dokl::KernelSpec{dokl::KernelFamily::Gaussian, bandwidth};
           }),
           py::arg("bandwidth"))
      .def_readwrite("bandwidth", &dokl::KernelSpec::bandwidth);

  m.def("kernel_eval", &dokl::kernel_eval, py::arg("spec"), py::arg("x"),
        py::arg("y"));

  py::class_<dokl::KernelExpansion>(m, "KernelExpansion")
      .def(py::init([](const dokl::KernelSpec& spec, Eigen::MatrixXd D,
                       Eigen::VectorXd w) {
             dokl::KernelExpansion f{spec, std::move(D), std::move(w)};
             dokl::validate(f);
             return f;
           }),
           py::arg("spec"), py::arg("dictionary"), py::arg("weights"))
      .def_readwrite("spec", &dokl::KernelExpansion::spec)
      .def_readwrite("dictionary", &dokl::KernelExpansion::D)
      .def_readwrite("weights", &dokl::KernelExpansion::w)
      .def("order", &dokl::KernelExpansion::order)
      .def("__call__",
           [](const dokl::KernelExpansion& f, const Eigen::VectorXd& x) {
             return dokl::evaluate(f, x);
           });

  m.def("evaluate", &dokl::evaluate, py::arg("f"), py::arg("x"));
  m.def("hilbert_norm", &dokl::hilbert_norm, py::arg("f"));
  m.def("hilbert_inner", &dokl::hilbert_inner, py::arg("f"), py::arg("g"));
  m.def("difference", &dokl::difference, py::arg("f"), py::arg("g"));
  m.def("ball_project", &dokl::ball_project, py::arg("f"), py::arg("radius"));

  m.def(
      "komp_prune",
      [](const dokl::KernelExpansion& target, double epsilon, double jitter) {
        const auto res = dokl::komp_prune(target, {epsilon, jitter});
        return py::make_tuple(res.expansion, res.pruned_count);
      },
      py::arg("target"), py::arg("epsilon"), py::arg("jitter") = 1e-10,
      "Greedy destructive pruning; returns (expansion, pruned_count).");
  m.def("refit_weights", &dokl::refit_weights, py::arg("target"),
        py::arg("dictionary"), py::arg("jitter") = 1e-10);
  m.def("removal_error", &dokl::removal_error, py::arg("target"),
        py::arg("keep"), py::arg("jitter") = 1e-10);

  py::class_<dokl::HyperParams>(m, "HyperParams")
      .def(py::init<>())
      .def_readwrite("eta", &dokl::HyperParams::eta)
      .def_readwrite("lam", &dokl::HyperParams::lambda)
      .def_readwrite("delta", &dokl::HyperParams::delta)
      .def_readwrite("nu", &dokl::HyperParams::nu)
      .def_readwrite("parsimony", &dokl::HyperParams::parsimony)
      .def_readwrite("epsilon_override", &dokl::HyperParams::epsilon_override)
      .def_readwrite("radius_RB", &dokl::HyperParams::radius_RB)
      .def_readwrite("adapt_bandwidth", &dokl::HyperParams::adapt_bandwidth)
      .def_readwrite("komp_jitter", &dokl::HyperParams::komp_jitter)
      .def("epsilon", &dokl::HyperParams::epsilon)
      .def("alpha", &dokl::HyperParams::alpha);

  py::class_<dokl::TheoryConstants>(m, "TheoryConstants")
      .def(py::init<>())
      .def_readwrite("R_B", &dokl::TheoryConstants::R_B)
      .def_readwrite("V", &dokl::TheoryConstants::V)
      .def_readwrite("C", &dokl::TheoryConstants::C)
      .def_readwrite("X", &dokl::TheoryConstants::X)
      .def_readwrite("lam", &dokl::TheoryConstants::lambda)
      .def_readwrite("xi", &dokl::TheoryConstants::xi)
      .def_readwrite("L_h", &dokl::TheoryConstants::L_h)
      .def_readwrite("E", &dokl::TheoryConstants::E)
      .def_readwrite("K1", &dokl::TheoryConstants::K1)
      .def_readwrite("delta", &dokl::TheoryConstants::delta);
  m.def("compute_nu", &dokl::compute_nu, py::arg("constants"), py::arg("T"),
        py::arg("alpha"));

  py::class_<dokl::ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("T", &dokl::ExperimentConfig::T)
      .def_readwrite("seed", &dokl::ExperimentConfig::seed)
      .def_readwrite("out", &dokl::ExperimentConfig::out)
      .def_readwrite("parallel", &dokl::ExperimentConfig::parallel)
      .def_readwrite("threads", &dokl::ExperimentConfig::threads)
      .def_readwrite("hp", &dokl::ExperimentConfig::hp)
      .def_readwrite("kernel_sigma", &dokl::ExperimentConfig::kernel_sigma)
      .def_readwrite("V", &dokl::ExperimentConfig::V)
      .def_readwrite("connect_radius", &dokl::ExperimentConfig::connect_radius)
      .def_readwrite("gamma_scale", &dokl::ExperimentConfig::gamma_scale)
      .def_readwrite("csv_path", &dokl::ExperimentConfig::csv_path)
      .def("set", &dokl::set_key, py::arg("key"), py::arg("value"),
           "Apply one config key=value pair (same keys as the config file).");

  m.def("dump_config", &dokl::dump_config, py::arg("config"));
  m.def(
      "config_from_string",
      [](const std::string& text) {
        std::istringstream in(text);
        return dokl::parse_config(in);
      },
      py::arg("text"));
  m.def("load_config",
        [](const std::string& path) { return dokl::load_config(path); },
        py::arg("path"));

  m.attr("METRIC_COLUMNS") =
      py::make_tuple("t", "global_loss", "avg_loss", "max_violation",
                     "avg_violation", "mean_violation_pos",
                     "total_model_order", "max_model_order", "dual_norm");

  m.def(
      "run",
      [](dokl::ExperimentConfig& c) {
        dokl::ExperimentSetup s = dokl::build_setup(c);
        auto agents = dokl::make_agents(s.topology, s.kernel, c.loss, c.prox);
        dokl::RunOptions opt;
        opt.parallel = c.parallel;
        opt.threads = c.threads;
        const auto r = dokl::run_primal_dual(s.topology, std::move(agents),
                                             *s.source, c.hp, c.T, opt);
        return run_result_dict(r);
      },
      py::arg("config"),
      "Full constrained run; returns a dict with a (rounds, 9) metrics "
      "matrix in METRIC_COLUMNS order.");
}
