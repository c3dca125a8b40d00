// Python bindings for the core operations: comparison generation, noise
// models, the two estimators, the closed-form bound calculators, and the
// Monte Carlo validation oracles.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pairloc/adaptive.hpp"
#include "pairloc/bounds.hpp"
#include "pairloc/estimators.hpp"
#include "pairloc/mc_validation.hpp"
#include "pairloc/model.hpp"
#include "pairloc/noise.hpp"
#include "pairloc/version.hpp"

namespace py = pybind11;
using namespace pairloc;

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

PYBIND11_MODULE(_pairloc, m) {
    m.doc() = "Localization of a point from one-bit paired comparisons";
    m.attr("__version__") = kVersion;

    py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
    py::register_exception<LengthMismatch>(m, "LengthMismatch", PyExc_ValueError);
    py::register_exception<DegeneratePair>(m, "DegeneratePairError", PyExc_RuntimeError);

    py::class_<ItemPair>(m, "ItemPair")
        .def(py::init([](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
                 return ItemPair{p, q};
             }),
             py::arg("p"), py::arg("q"))
        .def_readwrite("p", &ItemPair::p)
        .def_readwrite("q", &ItemPair::q);

    py::class_<ComparisonFrame>(m, "ComparisonFrame")
        .def(py::init<Eigen::MatrixXd, Eigen::VectorXd>(), py::arg("normals"),
             py::arg("offsets"))
        .def_property_readonly("normals", &ComparisonFrame::normals)
        .def_property_readonly("offsets", &ComparisonFrame::offsets)
        .def_property_readonly("dimension", &ComparisonFrame::dimension)
        .def_property_readonly("count", &ComparisonFrame::count)
        .def("margins", &ComparisonFrame::margins, py::arg("x"))
        .def("save_csv",
             [](const ComparisonFrame& f, const std::string& path) { f.save_csv(path); },
             py::arg("path"))
        .def_static("load_csv",
                    [](const std::string& path) { return ComparisonFrame::load_csv(path); },
                    py::arg("path"));

    py::class_<SignVector>(m, "SignVector")
        .def(py::init<std::vector<int>>(), py::arg("signs"))
        .def("__len__", &SignVector::size)
        .def("__getitem__",
             [](const SignVector& s, int i) {
                 if (i < 0 || i >= s.size()) throw py::index_error();
                 return s[i];
             })
        .def("__eq__", [](const SignVector& a, const SignVector& b) { return a == b; })
        .def_property_readonly("values", &SignVector::values);

    m.def("sample_pairs",
          [](int m_, int n, const std::vector<double>& mean, double variance,
             std::uint64_t seed) { return sample_pairs(m_, n, to_vector(mean), variance, seed); },
          py::arg("m"), py::arg("n"), py::arg("mean"), py::arg("variance"), py::arg("seed"));
    m.def("derive_frame",
          [](const std::vector<ItemPair>& pairs) { return derive_frame(pairs); },
          py::arg("pairs"));
    m.def("sample_frame",
          [](int m_, int n, const std::vector<double>& mean, double variance,
             std::uint64_t seed) { return sample_frame(m_, n, to_vector(mean), variance, seed); },
          py::arg("m"), py::arg("n"), py::arg("mean"), py::arg("variance"), py::arg("seed"));
    m.def("observe", &observe, py::arg("x"), py::arg("frame"));
    m.def("hamming", &hamming, py::arg("s1"), py::arg("s2"));

    m.def("gaussian_prequant", &gaussian_prequant, py::arg("x"), py::arg("frame"),
          py::arg("sigma_z2"), py::arg("seed"));
    m.def("flip_random", &flip_random, py::arg("signs"), py::arg("flip_fraction"),
          py::arg("seed"));
    m.def("flip_adversarial", &flip_adversarial, py::arg("signs"), py::arg("frame"),
          py::arg("x"), py::arg("flip_fraction"));
    m.def("perturbed_point_observe", &perturbed_point_observe, py::arg("x"), py::arg("frame"),
          py::arg("sigma_z2"), py::arg("seed"));

    py::class_<EstimatorConfig>(m, "EstimatorConfig")
        .def(py::init<>())
        .def_readwrite("R", &EstimatorConfig::R)
        .def_readwrite("nu", &EstimatorConfig::nu)
        .def_readwrite("chi", &EstimatorConfig::chi)
        .def_readwrite("max_outer_iters", &EstimatorConfig::max_outer_iters)
        .def_readwrite("convergence_tol", &EstimatorConfig::convergence_tol)
        .def_readwrite("solver_tol", &EstimatorConfig::solver_tol)
        .def_readwrite("trust_box", &EstimatorConfig::trust_box);

    py::enum_<EstimateStatus>(m, "EstimateStatus")
        .value("converged", EstimateStatus::converged)
        .value("max_iters", EstimateStatus::max_iters)
        .value("infeasible", EstimateStatus::infeasible)
        .value("dehomogenization_failure", EstimateStatus::dehomogenization_failure);

    py::class_<EstimateResult>(m, "EstimateResult")
        .def_readonly("x_hat", &EstimateResult::x_hat)
        .def_property_readonly("rho",
                               [](const EstimateResult& r) -> py::object {
                                   if (r.rho) return py::float_(*r.rho);
                                   return py::none();
                               })
        .def_readonly("slack_fraction", &EstimateResult::slack_fraction)
        .def_readonly("iterations", &EstimateResult::iterations)
        .def_readonly("status", &EstimateResult::status)
        .def_readonly("w_homog", &EstimateResult::w_homog)
        .def_readonly("slack_bound_ok", &EstimateResult::slack_bound_ok)
        .def_readonly("slack_count", &EstimateResult::slack_count)
        .def("hamming_guarantee", &EstimateResult::hamming_guarantee);

    m.def("estimate_noise_free", &estimate_noise_free, py::arg("frame"), py::arg("signs"),
          py::arg("R"), py::arg("solver_tol") = 1e-8, py::arg("max_sweeps") = 100000);
    m.def("estimate_nu_svm", &estimate_nu_svm, py::arg("frame"), py::arg("signs"),
          py::arg("config"));
    m.def("select_nu", &select_nu, py::arg("kappa_estimate"));

    py::enum_<RoundingPreference>(m, "RoundingPreference")
        .value("earlier", RoundingPreference::earlier)
        .value("later", RoundingPreference::later);
    py::enum_<DyadicTarget>(m, "DyadicTarget")
        .value("sigma", DyadicTarget::sigma)
        .value("sigma2", DyadicTarget::sigma2);

    py::class_<Stage>(m, "Stage")
        .def_readonly("center", &Stage::center)
        .def_readonly("radius", &Stage::radius)
        .def_readonly("variance", &Stage::variance)
        .def_readonly("budget", &Stage::budget);

    py::class_<StageSchedule>(m, "StageSchedule")
        .def_readonly("stages", &StageSchedule::stages)
        .def_readonly("total_m", &StageSchedule::total_m);

    m.def("build_schedule", &build_schedule, py::arg("R"), py::arg("n"), py::arg("t"),
          py::arg("total_m"), py::arg("rounding") = RoundingPreference::earlier);

    py::class_<StageOutcome>(m, "StageOutcome")
        .def_readonly("stage", &StageOutcome::stage)
        .def_readonly("center", &StageOutcome::center)
        .def_readonly("radius", &StageOutcome::radius)
        .def_readonly("variance", &StageOutcome::variance)
        .def_readonly("budget", &StageOutcome::budget)
        .def_readonly("x_hat", &StageOutcome::x_hat)
        .def_readonly("status", &StageOutcome::status);

    py::class_<AdaptiveResult>(m, "AdaptiveResult")
        .def_readonly("trajectory", &AdaptiveResult::trajectory)
        .def_readonly("final_x_hat", &AdaptiveResult::final_x_hat)
        .def_readonly("completed", &AdaptiveResult::completed);

    m.def("run_adaptive",
          [](const Eigen::VectorXd& x_true, double R, int n, const StageSchedule& schedule,
             std::uint64_t seed) {
              return run_adaptive(x_true, R, n, schedule, std::nullopt, seed);
          },
          py::arg("x_true"), py::arg("R"), py::arg("n"), py::arg("schedule"), py::arg("seed"));

    py::class_<ItemCatalog>(m, "ItemCatalog")
        .def(py::init<Eigen::MatrixXd>(), py::arg("items"))
        .def_readonly("items", &ItemCatalog::items)
        .def("nearest", &ItemCatalog::nearest, py::arg("point"))
        .def_static("uniform_ball", &ItemCatalog::uniform_ball, py::arg("count"), py::arg("n"),
                    py::arg("radius"), py::arg("seed"));
    m.def("catalog_schedule_variance", &catalog_schedule_variance, py::arg("catalog"));
    m.def("nearest_item_frame",
          [](const std::vector<ItemPair>& pairs, const ItemCatalog& catalog,
             const std::vector<double>& mean, double variance, std::uint64_t seed) {
              return nearest_item_frame(pairs, catalog, to_vector(mean), variance, seed);
          },
          py::arg("pairs"), py::arg("catalog"), py::arg("mean"), py::arg("variance"),
          py::arg("seed"));

    m.def("sample_complexity_prefactor", &sample_complexity_prefactor);
    m.def("sufficient_m", &sufficient_m, py::arg("R"), py::arg("eps"), py::arg("n"),
          py::arg("eta"));
    m.def("lower_bound_m", &lower_bound_m, py::arg("R"), py::arg("eps"), py::arg("n"));
    m.def("cell_count_str", [](long m_, int n) { return cell_count(m_, n).str(); },
          py::arg("m"), py::arg("n"));
    m.def("kappa_n", &kappa_n, py::arg("sigma_z2"), py::arg("R"), py::arg("n"),
          py::arg("x_norm"));
    py::class_<EmbeddingConstants>(m, "EmbeddingConstants")
        .def_readonly("C1", &EmbeddingConstants::C1)
        .def_readonly("c1", &EmbeddingConstants::c1)
        .def_readonly("C2", &EmbeddingConstants::C2)
        .def_readonly("c2", &EmbeddingConstants::c2);
    m.def("embedding_constants", &embedding_constants);
    m.def("zeta_of_m", &zeta_of_m, py::arg("m"), py::arg("n"), py::arg("eta"));
    m.def("embedding_m", &embedding_m, py::arg("zeta"), py::arg("n"), py::arg("eta"));
    m.def("error_bound_flips", &error_bound_flips, py::arg("kappa"), py::arg("m"), py::arg("n"),
          py::arg("eta"), py::arg("R"));
    m.def("error_bound_gaussian", &error_bound_gaussian, py::arg("sigma_z2"), py::arg("m"),
          py::arg("n"), py::arg("eta"), py::arg("R"));
    m.def("error_bound_arbitrary", &error_bound_arbitrary, py::arg("perturb_norm"), py::arg("m"),
          py::arg("n"), py::arg("eta"), py::arg("R"));
    m.def("adaptive_m", &adaptive_m, py::arg("R"), py::arg("eps_t"), py::arg("n"),
          py::arg("eta"), py::arg("C") = 0.0);

    py::class_<MCEstimate>(m, "MCEstimate")
        .def_readonly("estimate", &MCEstimate::estimate)
        .def_readonly("trials", &MCEstimate::trials)
        .def_readonly("std_error", &MCEstimate::std_error)
        .def_readonly("seed", &MCEstimate::seed);

    m.def("mc_sep_probability", &mc_sep_probability, py::arg("w"), py::arg("z"),
          py::arg("delta"), py::arg("n"), py::arg("R"), py::arg("trials"), py::arg("seed"));
    m.def("sep_probability_lower_bound", &sep_probability_lower_bound, py::arg("eps0"),
          py::arg("delta"), py::arg("n"), py::arg("R"));
    m.def("mc_nonsep_probability", &mc_nonsep_probability, py::arg("w"), py::arg("z"),
          py::arg("delta"), py::arg("n"), py::arg("R"), py::arg("trials"), py::arg("seed"));
    m.def("nonsep_probability_upper_bound", &nonsep_probability_upper_bound, py::arg("dist"),
          py::arg("delta"), py::arg("n"), py::arg("R"));
    m.def("mc_flip_probability", &mc_flip_probability, py::arg("x"), py::arg("n"), py::arg("R"),
          py::arg("sigma_z2"), py::arg("trials"), py::arg("seed"));

    py::class_<SphereMeanAbs>(m, "SphereMeanAbs")
        .def_readonly("mc_mean", &SphereMeanAbs::mc_mean)
        .def_readonly("std_error", &SphereMeanAbs::std_error)
        .def_readonly("trials", &SphereMeanAbs::trials)
        .def_readonly("prediction_two_over_sqrt_pi",
                      &SphereMeanAbs::prediction_two_over_sqrt_pi)
        .def_readonly("prediction_one_over_sqrt_pi",
                      &SphereMeanAbs::prediction_one_over_sqrt_pi);
    m.def("mc_sphere_mean_abs", &mc_sphere_mean_abs, py::arg("delta_vec"), py::arg("n"),
          py::arg("trials"), py::arg("seed"));

    py::class_<CdfBoundsReport>(m, "CdfBoundsReport")
        .def_readonly("pairs", &CdfBoundsReport::pairs)
        .def_readonly("violations", &CdfBoundsReport::violations)
        .def_readonly("min_lower_slack", &CdfBoundsReport::min_lower_slack)
        .def_readonly("min_upper_slack", &CdfBoundsReport::min_upper_slack)
        .def_readonly("min_zero_slack", &CdfBoundsReport::min_zero_slack);
    m.def("check_cdf_bounds", &check_cdf_bounds, py::arg("a_lo"), py::arg("b_hi"),
          py::arg("grid"));
    m.def("normal_cdf", &normal_cdf, py::arg("x"));
}
