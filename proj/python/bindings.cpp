#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "simrec/constructions.hpp"
#include "simrec/geometry.hpp"
#include "simrec/harness.hpp"
#include "simrec/measurements.hpp"
#include "simrec/norms.hpp"
#include "simrec/solvers.hpp"

namespace py = pybind11;
using namespace simrec;

namespace {

Mat mat_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() == 1) {
        Mat m(static_cast<int>(arr.shape(0)), 1);
        std::copy(arr.data(), arr.data() + arr.size(), m.data());
        return m;
    }
    if (arr.ndim() != 2) throw std::invalid_argument("expected a 1-D or 2-D array");
    Mat m(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
    std::copy(arr.data(), arr.data() + arr.size(), m.data());
    return m;
}

py::array_t<double> mat_to_array(const Mat& m) {
    py::array_t<double> arr({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.size(), arr.mutable_data());
    return arr;
}

norms::NormKind parse_norm(const std::string& name) { return norms::norm_kind_from_string(name); }

geometry::ObjectiveSpec build_objective(const std::vector<std::pair<std::string, double>>& terms,
                                        const std::string& mode, const std::string& cone) {
    geometry::ObjectiveSpec spec;
    spec.mode = (mode == "max_ratio" || mode == "fbest") ? geometry::ObjectiveMode::MaxRatio
                                                         : geometry::ObjectiveMode::WeightedSum;
    spec.cone = geometry::cone_kind_from_string(cone);
    for (const auto& [kind, weight] : terms) spec.terms.push_back({parse_norm(kind), weight, 0.0});
    return spec;
}

py::dict result_to_dict(const solvers::SolveResult& r) {
    py::dict d;
    d["x_hat"] = mat_to_array(r.x_hat);
    d["normalized_error"] = r.normalized_error;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["objective_value"] = r.objective_value;
    d["feasibility_residual"] = r.feasibility_residual;
    d["unique"] = r.unique;
    d["status"] = r.status;
    return d;
}

py::dict bound_report_to_dict(const geometry::BoundReport& rep) {
    py::dict d;
    d["m_low"] = rep.m_low;
    d["m_low_weighted"] = rep.m_low_weighted;
    d["m_low_constant_free"] = rep.m_low_constant_free;
    d["m_up"] = rep.m_up;
    d["kappa_min"] = rep.kappa_min;
    d["dbar_cone"] = rep.dbar_cone;
    d["kappa"] = rep.kappa;
    d["lipschitz"] = rep.lipschitz;
    d["lambda_bar"] = rep.lambda_bar;
    d["alpha"] = rep.alpha;
    d["dilated_distance"] = rep.dilated_distance;
    return d;
}

}  // namespace

PYBIND11_MODULE(_simrec, m) {
    m.doc() = "structured-recovery toolkit: norms, measurement ensembles, solvers and bounds";

    py::register_exception<simrec::Error>(m, "SimrecError");

    m.def("norm_eval",
          [](const std::string& kind, py::array_t<double> x) { return norms::eval(parse_norm(kind), mat_from_array(x)); },
          py::arg("kind"), py::arg("x"));
    m.def("dual_norm_eval",
          [](const std::string& kind, py::array_t<double> x) {
              return norms::dual_eval(parse_norm(kind), mat_from_array(x));
          });
    m.def("prox",
          [](const std::string& kind, py::array_t<double> x, double tau) {
              return mat_to_array(norms::prox(parse_norm(kind), mat_from_array(x), tau));
          },
          py::arg("kind"), py::arg("x"), py::arg("tau"));
    m.def("ball_project",
          [](const std::string& kind, py::array_t<double> x, double radius) {
              return mat_to_array(norms::ball_project(parse_norm(kind), mat_from_array(x), radius));
          });
    m.def("kappa",
          [](const std::string& kind, py::array_t<double> x) {
              const auto p = norms::kappa_profile(parse_norm(kind), mat_from_array(x));
              py::dict d;
              d["value"] = p.value;
              d["lipschitz"] = p.lipschitz;
              d["kappa"] = p.kappa;
              return d;
          });
    m.def("sign_support", [](const std::string& kind, py::array_t<double> x) {
        const auto ss = norms::sign_support(parse_norm(kind), mat_from_array(x));
        py::dict d;
        d["e"] = mat_to_array(ss.e);
        d["rank"] = ss.rank;
        return d;
    });

    m.def("cone_project", [](const std::string& cone, py::array_t<double> x) {
        return mat_to_array(geometry::cone_project(geometry::cone_kind_from_string(cone), mat_from_array(x)));
    });
    m.def("correlation", [](py::array_t<double> x, const std::string& kind) {
        return geometry::correlation(mat_from_array(x), parse_norm(kind));
    });
    m.def("cone_gaussian_distance",
          [](const std::string& cone, int d, int samples, std::uint64_t seed) {
              Rng rng(seed);
              const auto kind = geometry::cone_kind_from_string(cone);
              auto est = geometry::gaussian_distance(
                  [&](const Mat& h) { return geometry::cone_project(kind, h); }, d, d, samples, rng);
              py::dict out;
              out["mean"] = est.mean;
              out["stderr"] = est.stderr_of_mean;
              out["analytic_dbar"] = geometry::cone_dbar(kind, d);
              return out;
          },
          py::arg("cone"), py::arg("d"), py::arg("samples") = 1000, py::arg("seed") = 7);
    m.def("lower_bound",
          [](py::array_t<double> x0, const std::vector<std::pair<std::string, double>>& terms,
             const std::string& mode, const std::string& cone) {
              Mat x = mat_from_array(x0);
              auto spec = build_objective(terms, mode, cone).with_references(x);
              return bound_report_to_dict(geometry::lower_bound(x, spec));
          },
          py::arg("x0"), py::arg("terms"), py::arg("mode") = "weighted", py::arg("cone") = "full");
    m.def("upper_bound",
          [](py::array_t<double> x0, const std::vector<std::pair<std::string, double>>& terms,
             const std::string& cone, int samples, std::uint64_t seed) {
              Mat x = mat_from_array(x0);
              auto spec = build_objective(terms, "weighted", cone);
              Rng rng(seed);
              return bound_report_to_dict(geometry::upper_bound(x, spec, rng, {}, samples));
          },
          py::arg("x0"), py::arg("terms"), py::arg("cone") = "full", py::arg("samples") = 2000,
          py::arg("seed") = 7);

    py::class_<measurements::MeasurementOperator>(m, "MeasurementOperator")
        .def_property_readonly("m", [](const measurements::MeasurementOperator& op) { return op.m; })
        .def_property_readonly("shape",
                               [](const measurements::MeasurementOperator& op) {
                                   return py::make_tuple(op.d1, op.d2);
                               })
        .def_property_readonly("matrix",
                               [](const measurements::MeasurementOperator& op) { return mat_to_array(op.a); })
        .def("apply",
             [](const measurements::MeasurementOperator& op, py::array_t<double> x) {
                 return measurements::apply(op, mat_from_array(x));
             })
        .def("adjoint", [](const measurements::MeasurementOperator& op, const std::vector<double>& y) {
            return mat_to_array(measurements::adjoint(op, y));
        });

    m.def("draw_operator",
          [](const std::string& kind, int mm, int d1, int d2, std::uint64_t seed, bool dedup, bool sphere) {
              Rng rng(seed);
              return measurements::draw(measurements::ensemble_kind_from_string(kind), mm, d1, d2, rng,
                                        {dedup, sphere});
          },
          py::arg("kind"), py::arg("m"), py::arg("d1"), py::arg("d2"), py::arg("seed") = 7,
          py::arg("dedup") = false, py::arg("sphere") = false);
    m.def("operator_stats", [](const measurements::MeasurementOperator& op, py::array_t<double> x0) {
        const auto st = measurements::stats(op, mat_from_array(x0));
        py::dict d;
        d["sigma_min_adjoint"] = st.sigma_min_adjoint;
        d["ax0_norm"] = st.ax0_norm;
        d["ratio"] = st.ratio;
        if (st.coherence) d["coherence"] = *st.coherence;
        return d;
    });
    m.def("failure_certificate",
          [](const measurements::MeasurementOperator& op, py::array_t<double> x0,
             const std::vector<std::pair<std::string, double>>& terms, const std::string& mode) {
              Mat x = mat_from_array(x0);
              auto spec = build_objective(terms, mode, "full").with_references(x);
              const auto cert = measurements::failure_certificate(op, x, spec);
              py::dict d;
              d["certified"] = cert.certified;
              d["rho_lower"] = cert.rho_lower;
              d["rhs"] = cert.rhs;
              return d;
          },
          py::arg("op"), py::arg("x0"), py::arg("terms"), py::arg("mode") = "weighted");

    m.def("solve_weighted",
          [](const measurements::MeasurementOperator& op, const std::vector<double>& b,
             const std::vector<std::pair<std::string, double>>& terms, const std::string& cone,
             py::object x0, int max_iters) {
              auto spec = build_objective(terms, "weighted", cone);
              solvers::SolveConfig cfg;
              cfg.max_iters = max_iters;
              Mat x0m;
              const Mat* x0p = nullptr;
              if (!x0.is_none()) {
                  x0m = mat_from_array(x0.cast<py::array_t<double>>());
                  x0p = &x0m;
              }
              return result_to_dict(solvers::solve_weighted(op, b, spec, cfg, x0p));
          },
          py::arg("op"), py::arg("b"), py::arg("terms"), py::arg("cone") = "full",
          py::arg("x0") = py::none(), py::arg("max_iters") = 2000);
    m.def("solve_fbest",
          [](const measurements::MeasurementOperator& op, const std::vector<double>& b,
             const std::vector<std::string>& norm_kinds, const std::string& cone, py::array_t<double> x0,
             int max_iters) {
              std::vector<std::pair<std::string, double>> terms;
              for (const auto& k : norm_kinds) terms.emplace_back(k, 1.0);
              Mat x0m = mat_from_array(x0);
              auto spec = build_objective(terms, "max_ratio", cone).with_references(x0m);
              solvers::SolveConfig cfg;
              cfg.max_iters = max_iters;
              return result_to_dict(solvers::solve_fbest(op, b, spec, cfg, &x0m));
          },
          py::arg("op"), py::arg("b"), py::arg("norms"), py::arg("cone"), py::arg("x0"),
          py::arg("max_iters") = 2000);
    m.def("solve_nonconvex_rank1",
          [](const measurements::MeasurementOperator& op, const std::vector<double>& b, int d, int k_max,
             bool symmetric, std::uint64_t seed, py::object x0) {
              solvers::SolveConfig cfg;
              Rng rng(seed);
              Mat x0m;
              const Mat* x0p = nullptr;
              if (!x0.is_none()) {
                  x0m = mat_from_array(x0.cast<py::array_t<double>>());
                  x0p = &x0m;
              }
              return result_to_dict(solvers::solve_nonconvex_rank1(op, b, d, k_max, symmetric, cfg, rng, x0p));
          },
          py::arg("op"), py::arg("b"), py::arg("d"), py::arg("k_max"), py::arg("symmetric") = true,
          py::arg("seed") = 7, py::arg("x0") = py::none());

    m.def("planted_slr",
          [](int d, int k, int r, bool psd, std::uint64_t seed) {
              constructions::SlrSpec spec;
              spec.d1 = spec.d2 = d;
              spec.k1 = spec.k2 = k;
              spec.r = r;
              spec.psd = psd;
              Rng rng(seed);
              return mat_to_array(constructions::planted_gaussian(spec, rng).x);
          },
          py::arg("d"), py::arg("k"), py::arg("r") = 1, py::arg("psd") = true, py::arg("seed") = 7);
    m.def("hadamard_slr", [](int k1, int k2, int r, int d1, int d2) {
        return mat_to_array(constructions::hadamard_slr(k1, k2, r, d1, d2).x);
    });
    m.def("phase_retrieval_instance",
          [](int d, int k, std::uint64_t seed, bool gaussian_values) {
              Rng rng(seed);
              const auto inst = constructions::phase_retrieval_instance(d, k, rng, gaussian_values);
              py::dict out;
              out["x0"] = mat_to_array(inst.x0);
              out["a"] = mat_to_array(inst.a);
              out["abar_l1"] = inst.abar_l1;
              return out;
          },
          py::arg("d"), py::arg("k"), py::arg("seed") = 7, py::arg("gaussian_values") = false);

    m.def("run_cell_json",
          [](const std::string& config_json, int objective_index, int d, int mm, int instances, int threads) {
              auto config = harness::parse_config_json(config_json);
              const auto cell = harness::run_cell(config, objective_index, d, mm,
                                                  instances > 0 ? instances : config.instances_per_cell,
                                                  threads);
              py::dict out;
              out["d"] = cell.d;
              out["m"] = cell.m;
              out["trials"] = cell.trials;
              out["successes"] = cell.successes;
              out["mean_error"] = cell.mean_error;
              out["median_error"] = cell.median_error;
              return out;
          },
          py::arg("config_json"), py::arg("objective_index"), py::arg("d"), py::arg("m"),
          py::arg("instances") = 0, py::arg("threads") = 0);

    m.attr("__version__") = "0.1.0";
}
