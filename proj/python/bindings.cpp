#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dqr/data_io.hpp"
#include "dqr/distributions.hpp"
#include "dqr/functionals.hpp"
#include "dqr/identification.hpp"
#include "dqr/phi_select.hpp"
#include "dqr/scores.hpp"
#include "dqr/train.hpp"

namespace py = pybind11;
using namespace dqr;

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
}

}  // namespace

PYBIND11_MODULE(_dqr, m) {
  m.doc() = "Consistent scoring functions and deep composite regression";
  m.attr("__version__") = "0.1.0";

  py::register_exception<domain_error>(m, "DomainError", PyExc_ValueError);

  py::class_<PhiIndex>(m, "PhiIndex")
      .def(py::init<double, double>(), py::arg("b"), py::arg("c") = 2.0)
      .def_readwrite("b", &PhiIndex::b)
      .def_readwrite("c", &PhiIndex::c);

  py::class_<CompositeTriplet>(m, "CompositeTriplet")
      .def(py::init<double, double, double>(), py::arg("e_minus"), py::arg("v"),
           py::arg("e_plus"))
      .def_property_readonly("e_minus", &CompositeTriplet::e_minus)
      .def_property_readonly("v", &CompositeTriplet::v)
      .def_property_readonly("e_plus", &CompositeTriplet::e_plus)
      .def("__repr__", [](const CompositeTriplet& t) {
        return "CompositeTriplet(" + std::to_string(t.e_minus()) + ", " +
               std::to_string(t.v()) + ", " + std::to_string(t.e_plus()) + ")";
      });

  py::class_<ScoreSpec>(m, "ScoreSpec")
      .def_static("additive", &ScoreSpec::additive, py::arg("phi_minus"),
                  py::arg("phi_plus"), py::arg("g_scale"), py::arg("tau"))
      .def_static("revelation_plus", &ScoreSpec::revelation_plus, py::arg("phi"),
                  py::arg("phi_plus"), py::arg("g_scale"), py::arg("tau"))
      .def_static("revelation_minus", &ScoreSpec::revelation_minus, py::arg("phi"),
                  py::arg("phi_minus"), py::arg("g_scale"), py::arg("tau"))
      .def_property_readonly("tau", &ScoreSpec::tau)
      .def_property_readonly("g_scale", &ScoreSpec::g_scale);

  m.def("pinball_loss", &pinball_loss, py::arg("y"), py::arg("a"), py::arg("tau"));
  m.def("s_pair", &s_pair, py::arg("y"), py::arg("a"), py::arg("tau"));
  m.def("tweedie_phi", &tweedie_phi, py::arg("b"), py::arg("y"), py::arg("order"));
  m.def("bregman_loss", &bregman_loss, py::arg("y"), py::arg("a"), py::arg("b"));
  m.def("composite_score", &composite_score, py::arg("y"), py::arg("triplet"),
        py::arg("spec"));
  m.def("composite_score_gradient", &composite_score_gradient, py::arg("y"),
        py::arg("triplet"), py::arg("spec"));

  py::class_<QuantileSet>(m, "QuantileSet")
      .def_readonly("lower", &QuantileSet::lower)
      .def_readonly("upper", &QuantileSet::upper);

  py::class_<GammaParams>(m, "GammaParams")
      .def(py::init<double, double>(), py::arg("mu"), py::arg("gamma_shape"))
      .def_readwrite("mu", &GammaParams::mu)
      .def_readwrite("gamma_shape", &GammaParams::gamma_shape);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<double, double, double>(), py::arg("lo"), py::arg("hi"),
           py::arg("step"))
      .def_readwrite("lo", &GridSpec::lo)
      .def_readwrite("hi", &GridSpec::hi)
      .def_readwrite("step", &GridSpec::step);

  m.def("empirical_quantile_set", &empirical_quantile_set, py::arg("sample"),
        py::arg("tau"));
  m.def("empirical_es", &empirical_es, py::arg("sample"), py::arg("tau"));
  m.def("es_via_minimization", &es_via_minimization, py::arg("sample"),
        py::arg("tau"), py::arg("grid"));
  m.def("gamma_triplet", &gamma_triplet, py::arg("params"), py::arg("tau"));

  m.def("gamma_cdf", &gamma_cdf, py::arg("y"), py::arg("gamma_shape"), py::arg("mu"));
  m.def("gamma_quantile", &gamma_quantile, py::arg("p"), py::arg("gamma_shape"),
        py::arg("mu"));
  m.def("normal_cdf", &normal_cdf, py::arg("x"));
  m.def("normal_quantile", &normal_quantile, py::arg("p"));

  py::class_<CalibrationReport>(m, "CalibrationReport")
      .def_readonly("coverage", &CalibrationReport::coverage)
      .def_readonly("v_minus", &CalibrationReport::v_minus)
      .def_readonly("v_plus", &CalibrationReport::v_plus)
      .def_readonly("n", &CalibrationReport::n);

  m.def("identification_V", &identification_V, py::arg("y"), py::arg("triplet"),
        py::arg("tau"));
  m.def("calibration_report", &calibration_report, py::arg("predictions"),
        py::arg("observations"), py::arg("tau"));

  py::enum_<HeadKind>(m, "HeadKind")
      .value("MultiQuantileAdditive", HeadKind::MultiQuantileAdditive)
      .value("MultiQuantileMultiplicative", HeadKind::MultiQuantileMultiplicative)
      .value("CompositeAdditive", HeadKind::CompositeAdditive);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("responses", &Dataset::responses)
      .def_readonly("features", &Dataset::features)
      .def_readonly("response_name", &Dataset::response_name)
      .def_property_readonly("truth",
                             [](const Dataset& d) -> py::object {
                               if (!d.truth) return py::none();
                               return py::cast(*d.truth);
                             })
      .def_property_readonly("n_features", &Dataset::n_features)
      .def("__len__", [](const Dataset& d) { return d.size(); });

  m.def(
      "simulate_gamma",
      [](std::size_t n, std::uint64_t seed, const std::vector<double>& coeff_mu,
         double gamma_shape, double tau) {
        return simulate_gamma(n, seed, to_vector(coeff_mu), gamma_shape, tau);
      },
      py::arg("n"), py::arg("seed"), py::arg("coeff_mu"), py::arg("gamma_shape"),
      py::arg("tau"));
  m.def(
      "simulate_lognormal",
      [](std::size_t n, std::uint64_t seed, const std::vector<double>& coeff_m,
         const std::vector<double>& coeff_s, double tau) {
        return simulate_lognormal(n, seed, to_vector(coeff_m), to_vector(coeff_s), tau);
      },
      py::arg("n"), py::arg("seed"), py::arg("coeff_m"), py::arg("coeff_s"),
      py::arg("tau"));
  m.def("load_csv", &load_csv, py::arg("csv_path"), py::arg("schema_path"));
  m.def("split_stratified", &split_stratified, py::arg("data"),
        py::arg("test_fraction"), py::arg("seed"));

  py::class_<NetworkConfig>(m, "NetworkConfig")
      .def(py::init<>())
      .def_readwrite("input_dim", &NetworkConfig::input_dim)
      .def_readwrite("hidden_dims", &NetworkConfig::hidden_dims)
      .def_readwrite("head", &NetworkConfig::head)
      .def_readwrite("levels", &NetworkConfig::levels)
      .def_readwrite("seed", &NetworkConfig::seed)
      .def("parameter_count", &NetworkConfig::parameter_count);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("max_epochs", &TrainConfig::max_epochs)
      .def_readwrite("patience", &TrainConfig::patience)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("nesterov", &TrainConfig::nesterov)
      .def_readwrite("n_starts", &TrainConfig::n_starts)
      .def_readwrite("val_fraction", &TrainConfig::val_fraction)
      .def_readwrite("eta_weights", &TrainConfig::eta_weights)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("freeze_hidden", &TrainConfig::freeze_hidden)
      .def_readwrite("threads", &TrainConfig::threads);

  py::class_<Objective>(m, "Objective")
      .def_static("multi_quantile", &Objective::multi_quantile, py::arg("levels"),
                  py::arg("eta") = std::vector<double>{})
      .def_static("composite", &Objective::composite, py::arg("spec"))
      .def_static("bregman_mean", &Objective::bregman_mean, py::arg("b"),
                  py::arg("c") = 2.0);

  py::class_<EpochTrace>(m, "EpochTrace")
      .def_readonly("epoch", &EpochTrace::epoch)
      .def_readonly("train_loss", &EpochTrace::train_loss)
      .def_readonly("val_loss", &EpochTrace::val_loss);

  py::class_<StartResult>(m, "StartResult")
      .def_readonly("seed", &StartResult::seed)
      .def_readonly("best_val_loss", &StartResult::best_val_loss)
      .def_readonly("best_epoch", &StartResult::best_epoch)
      .def_readonly("trace", &StartResult::trace)
      .def_readonly("failed", &StartResult::failed)
      .def_readonly("diagnostic", &StartResult::diagnostic);

  py::class_<FitReport>(m, "FitReport")
      .def_readonly("starts", &FitReport::starts)
      .def_readonly("eta", &FitReport::eta)
      .def_readonly("eval_predictions", &FitReport::eval_predictions)
      .def_readonly("eval_objective", &FitReport::eval_objective)
      .def_property_readonly("calibration",
                             [](const FitReport& r) -> py::object {
                               if (!r.calibration) return py::none();
                               return py::cast(*r.calibration);
                             });

  m.def(
      "fit",
      [](const Dataset& learn, const NetworkConfig& cfg, const TrainConfig& tc,
         const Objective& obj, const std::optional<Dataset>& eval) {
        return fit(learn, eval, cfg, tc, obj);
      },
      py::arg("learn"), py::arg("network"), py::arg("train"), py::arg("objective"),
      py::arg("eval") = std::nullopt,
      py::call_guard<py::gil_scoped_release>());

  m.def("auto_eta", &auto_eta, py::arg("data"), py::arg("levels"));
  m.def("split_learn", &split_learn, py::arg("data"), py::arg("val_fraction"),
        py::arg("seed"));

  py::class_<PhiRegression>(m, "PhiRegression")
      .def_readonly("intercept", &PhiRegression::intercept)
      .def_readonly("slope", &PhiRegression::slope)
      .def_readonly("b", &PhiRegression::b)
      .def_readonly("c", &PhiRegression::c);

  m.def("residual_loglog_regression", &residual_loglog_regression,
        py::arg("mu_hat"), py::arg("y"));
}
