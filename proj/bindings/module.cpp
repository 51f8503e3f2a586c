#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dpbalm/bench.hpp"
#include "dpbalm/instances.hpp"
#include "dpbalm/solvers.hpp"

namespace py = pybind11;
using namespace dpbalm;

namespace {

Mat mat_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("matrix must be non-empty");
  const int m = static_cast<int>(rows.size());
  const int n = static_cast<int>(rows[0].size());
  Mat A(m, n);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw std::invalid_argument("ragged matrix rows");
    for (int j = 0; j < n; ++j) A(i, j) = rows[i][j];
  }
  return A;
}

std::vector<std::vector<double>> mat_to_rows(const Mat& A) {
  std::vector<std::vector<double>> rows(A.rows);
  for (int i = 0; i < A.rows; ++i) {
    rows[i].resize(A.cols);
    for (int j = 0; j < A.cols; ++j) rows[i][j] = A(i, j);
  }
  return rows;
}

SolveReport solve_named(const Problem& problem, const std::string& algo,
                        std::optional<SolverConfig> config) {
  if (!is_known_algorithm(algo))
    throw std::invalid_argument("unknown algorithm: " + algo);
  const double rho = spectral_radius_gram(problem.A).value;
  const SolverConfig cfg = algorithm_config(
      algo, config.value_or(SolverConfig{}), rho, config.has_value());
  return run_algorithm(algo, problem, cfg);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "balanced augmented Lagrangian solvers";

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("beta", &SolverConfig::beta)
      .def_readwrite("delta", &SolverConfig::delta)
      .def_readwrite("alpha", &SolverConfig::alpha)
      .def_readwrite("r", &SolverConfig::r)
      .def_readwrite("s", &SolverConfig::s)
      .def_readwrite("tol", &SolverConfig::tol)
      .def_readwrite("max_iter", &SolverConfig::max_iter)
      .def_property(
          "stop_rule",
          [](const SolverConfig& c) {
            return c.stop_rule == StopRule::FixedPointResidual
                       ? "fp-res"
                       : "rel-err";
          },
          [](SolverConfig& c, const std::string& v) {
            if (v == "fp-res")
              c.stop_rule = StopRule::FixedPointResidual;
            else if (v == "rel-err")
              c.stop_rule = StopRule::RelativeError;
            else
              throw std::invalid_argument("stop_rule: rel-err or fp-res");
          });

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("n", &Problem::n)
      .def_property_readonly("m", &Problem::m)
      .def_property_readonly("A",
                             [](const Problem& p) { return mat_to_rows(p.A); })
      .def_readonly("b", &Problem::b)
      .def_readonly("known_solution", &Problem::known_solution);

  py::class_<HistoryRecord>(m, "HistoryRecord")
      .def_readonly("iter", &HistoryRecord::iter)
      .def_readonly("rel_err", &HistoryRecord::rel_err)
      .def_readonly("primal_res", &HistoryRecord::primal_res)
      .def_readonly("fp_res_h", &HistoryRecord::fp_res_h)
      .def_readonly("elapsed_s", &HistoryRecord::elapsed_s);

  py::class_<SolveReport>(m, "SolveReport")
      .def_property_readonly(
          "status", [](const SolveReport& r) { return to_string(r.status); })
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("wall_time_s", &SolveReport::wall_time_s)
      .def_readonly("message", &SolveReport::message)
      .def_readonly("history", &SolveReport::history)
      .def_property_readonly(
          "x", [](const SolveReport& r) { return r.final_iterate.x0(); })
      .def_property_readonly("lam", [](const SolveReport& r) {
        return r.final_iterate.lambda;
      });

  py::class_<CertifyReport>(m, "CertifyReport")
      .def_readonly("passed", &CertifyReport::passed)
      .def_readonly("contraction_checks", &CertifyReport::contraction_checks)
      .def_readonly("worst_contraction_violation",
                    &CertifyReport::worst_contraction_violation)
      .def_readonly("worst_margin", &CertifyReport::worst_margin)
      .def_readonly("worst_margin_multiblock",
                    &CertifyReport::worst_margin_multiblock)
      .def_readonly("worst_skew", &CertifyReport::worst_skew)
      .def_readonly("worst_pd_identity_rel_err",
                    &CertifyReport::worst_pd_identity_rel_err)
      .def_readonly("notes", &CertifyReport::notes);

  m.def(
      "generate_basis_pursuit",
      [](int n, int m_, int s, uint64_t seed) {
        return generate_basis_pursuit({n, m_, s, seed});
      },
      py::arg("n"), py::arg("m") = 0, py::arg("s") = 0, py::arg("seed") = 0);

  m.def("solve", &solve_named, py::arg("problem"),
        py::arg("algo") = "dp-balm", py::arg("config") = py::none(),
        "Run one of dp-balm, balm, lalm, pda from the zero iterate.");

  m.def(
      "tiny_bp_oracle",
      [](const std::vector<std::vector<double>>& A, const Vec& b) {
        return tiny_bp_oracle(mat_from_rows(A), b);
      },
      py::arg("A"), py::arg("b"),
      "Exhaustive l1-minimal solution of Ax = b for n <= 12.");

  m.def(
      "spectral_radius_gram",
      [](const std::vector<std::vector<double>>& A) {
        return spectral_radius_gram(mat_from_rows(A)).value;
      },
      py::arg("A"));

  m.def(
      "certify",
      [](const std::vector<int>& sizes, const std::vector<uint64_t>& seeds,
         int samples, int steps) {
        CertifyOptions opts;
        opts.sizes = sizes;
        opts.seeds = seeds;
        opts.margin_samples = samples;
        opts.margin_steps = steps;
        return run_certification(opts);
      },
      py::arg("sizes"), py::arg("seeds"), py::arg("samples") = 100,
      py::arg("steps") = 20);

  m.def(
      "save_instance",
      [](const Problem& p, int n, int m_, int s, uint64_t seed,
         const std::string& path) {
        save_instance(p, {n, m_, s, seed}, path);
      },
      py::arg("problem"), py::arg("n"), py::arg("m"), py::arg("s"),
      py::arg("seed"), py::arg("path"));

  m.def("load_instance", [](const std::string& path) {
    return load_instance(path).first;
  });
}
