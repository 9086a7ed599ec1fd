#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <vector>

#include "pseudospec/ads3.hpp"
#include "pseudospec/cartan.hpp"
#include "pseudospec/errors.hpp"
#include "pseudospec/flat_spectra.hpp"
#include "pseudospec/quadform.hpp"
#include "pseudospec/version.hpp"

namespace py = pybind11;
using namespace pseudospec;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Discrete spectra of flat pseudo-Riemannian tori under deformation, "
      "dense/discrete diagnostics, Cartan-projection properness and "
      "sharpness, and stable eigenvalue sets of anti-de Sitter 3-manifolds";
  m.attr("__version__") = kVersion;

  py::register_exception<budget_error>(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception<input_error>(m, "InputError", PyExc_ValueError);

  // ---- quadratic forms ----
  py::class_<quadform::Signature>(m, "Signature")
      .def(py::init([](int p, int q, int z) {
             return quadform::Signature{p, q, z};
           }),
           py::arg("p"), py::arg("q"), py::arg("z") = 0)
      .def_readwrite("p", &quadform::Signature::p)
      .def_readwrite("q", &quadform::Signature::q)
      .def_readwrite("z", &quadform::Signature::z)
      .def("dim", &quadform::Signature::dim)
      .def("indefinite", &quadform::Signature::indefinite)
      .def("definite", &quadform::Signature::definite)
      .def("__repr__", [](const quadform::Signature& s) {
        return "Signature(p=" + std::to_string(s.p) +
               ", q=" + std::to_string(s.q) + ", z=" + std::to_string(s.z) +
               ")";
      });

  py::class_<quadform::QuadraticForm>(m, "QuadraticForm")
      .def(py::init<const Eigen::MatrixXd&>(), py::arg("matrix"))
      .def("dim", &quadform::QuadraticForm::dim)
      .def_property_readonly("matrix", &quadform::QuadraticForm::matrix);

  py::class_<quadform::IntegerProportionality>(m, "IntegerProportionality")
      .def_readonly("scale", &quadform::IntegerProportionality::scale)
      .def_readonly("matrix", &quadform::IntegerProportionality::matrix);

  m.def("evaluate", &quadform::evaluate, py::arg("form"), py::arg("m"));
  m.def("signature_of", &quadform::signature_of, py::arg("form"),
        py::arg("tol") = 1e-12);
  m.def("standard_form_matrix", &quadform::standard_form_matrix,
        py::arg("signature"));
  m.def(
      "deformed_form",
      [](const Eigen::MatrixXd& g, const quadform::Signature& sig) {
        return quadform::deformed_form(g, sig);
      },
      py::arg("g"), py::arg("signature"));
  m.def("integer_proportionality", &quadform::integer_proportionality,
        py::arg("form"), py::arg("search_bound") = 1'000'000,
        py::arg("tol") = 1e-9);

  // ---- flat torus spectra ----
  py::class_<flat::DeformationParameter>(m, "DeformationParameter")
      .def(py::init<const Eigen::MatrixXd&, const quadform::Signature&>(),
           py::arg("g"), py::arg("signature"))
      .def_readonly("g", &flat::DeformationParameter::g)
      .def_readonly("signature", &flat::DeformationParameter::signature)
      .def("dim", &flat::DeformationParameter::dim);

  py::class_<flat::SpectrumWindow>(m, "SpectrumWindow")
      .def(py::init([](double lambda_min, double lambda_max, int box_radius) {
             return flat::SpectrumWindow{lambda_min, lambda_max, box_radius};
           }),
           py::arg("lambda_min"), py::arg("lambda_max"), py::arg("box_radius"))
      .def_readwrite("lambda_min", &flat::SpectrumWindow::lambda_min)
      .def_readwrite("lambda_max", &flat::SpectrumWindow::lambda_max)
      .def_readwrite("box_radius", &flat::SpectrumWindow::box_radius);

  py::class_<flat::SpectrumEntry>(m, "SpectrumEntry")
      .def_readonly("eigenvalue", &flat::SpectrumEntry::eigenvalue)
      .def_readonly("witnesses", &flat::SpectrumEntry::witnesses)
      .def("multiplicity", &flat::SpectrumEntry::multiplicity);

  py::class_<flat::SpectrumSample>(m, "SpectrumSample")
      .def_readonly("entries", &flat::SpectrumSample::entries)
      .def_readonly("window", &flat::SpectrumSample::window)
      .def_readonly("complete_below_box",
                    &flat::SpectrumSample::complete_below_box);

  m.def("eigenvalue_of", &flat::eigenvalue_of, py::arg("param"), py::arg("m"));
  m.def(
      "enumerate_spectrum",
      [](const flat::DeformationParameter& param,
         const flat::SpectrumWindow& window, double dedupe_tol,
         std::int64_t budget) {
        return flat::enumerate_spectrum(param, window, {dedupe_tol, budget});
      },
      py::arg("param"), py::arg("window"), py::arg("dedupe_tol") = 1e-9,
      py::arg("budget") = 0);
  m.def("verify_eigenfunction", &flat::verify_eigenfunction, py::arg("param"),
        py::arg("m"), py::arg("grid_points_per_axis"));
  m.def(
      "stability_scan",
      [](const flat::DeformationParameter& g0, double radius, int samples,
         const flat::SpectrumWindow& window, double match_tol,
         std::uint64_t seed, double dedupe_tol, std::int64_t budget) {
        return flat::stability_scan(g0, radius, samples, window, match_tol,
                                    seed, {dedupe_tol, budget});
      },
      py::arg("g0"), py::arg("radius"), py::arg("samples"), py::arg("window"),
      py::arg("match_tol"), py::arg("seed"), py::arg("dedupe_tol") = 1e-9,
      py::arg("budget") = 0);

  py::enum_<flat::Classification>(m, "Classification")
      .value("DENSE_SUSPECTED", flat::Classification::DenseSuspected)
      .value("DISCRETE_SUSPECTED", flat::Classification::DiscreteSuspected)
      .value("INCONCLUSIVE", flat::Classification::Inconclusive);

  py::class_<flat::DensityReport::BoxStat>(m, "BoxStat")
      .def_readonly("box_radius", &flat::DensityReport::BoxStat::box_radius)
      .def_readonly("distinct_values",
                    &flat::DensityReport::BoxStat::distinct_values)
      .def_readonly("min_gap", &flat::DensityReport::BoxStat::min_gap);

  py::class_<flat::DensityReport>(m, "DensityReport")
      .def_readonly("boxes", &flat::DensityReport::boxes)
      .def_readonly("classification", &flat::DensityReport::classification)
      .def_readonly("rationality", &flat::DensityReport::rationality)
      .def_readonly("gap_shrink_factor",
                    &flat::DensityReport::gap_shrink_factor)
      .def_readonly("observed_shrink", &flat::DensityReport::observed_shrink)
      .def_readonly("rational_search_bound",
                    &flat::DensityReport::rational_search_bound)
      .def_readonly("rational_tol", &flat::DensityReport::rational_tol)
      .def_readonly("warning", &flat::DensityReport::warning);

  m.def(
      "density_diagnostics",
      [](const flat::DeformationParameter& param,
         const std::vector<flat::SpectrumWindow>& windows, double dedupe_tol,
         std::int64_t budget, std::int64_t rational_search_bound,
         double rational_tol, double gap_shrink_factor) {
        flat::DensityOptions opts;
        opts.dedupe_tol = dedupe_tol;
        opts.budget = budget;
        opts.rational_search_bound = rational_search_bound;
        opts.rational_tol = rational_tol;
        opts.gap_shrink_factor = gap_shrink_factor;
        return flat::density_diagnostics(param, windows, opts);
      },
      py::arg("param"), py::arg("windows"), py::arg("dedupe_tol") = 1e-9,
      py::arg("budget") = 0, py::arg("rational_search_bound") = 1000,
      py::arg("rational_tol") = 1e-9, py::arg("gap_shrink_factor") = 4.0);

  // ---- Cartan projections ----
  py::class_<cartan::AmbientGroup>(m, "AmbientGroup")
      .def_static("sl", &cartan::AmbientGroup::sl, py::arg("n"))
      .def_static("sl2_pair", &cartan::AmbientGroup::sl2_pair)
      .def("coord_dim", &cartan::AmbientGroup::coord_dim)
      .def("chamber_dim", &cartan::AmbientGroup::chamber_dim)
      .def("__eq__",
           [](const cartan::AmbientGroup& a, const cartan::AmbientGroup& b) {
             return a == b;
           },
           py::is_operator());

  py::class_<cartan::Element>(m, "Element")
      .def_static("sl", &cartan::Element::sl, py::arg("m"))
      .def_static("pair", &cartan::Element::pair, py::arg("first"),
                  py::arg("second"))
      .def_readonly("a", &cartan::Element::a)
      .def_readonly("b", &cartan::Element::b);

  py::class_<cartan::CartanVector>(m, "CartanVector")
      .def_readonly("group", &cartan::CartanVector::group)
      .def_readonly("coords", &cartan::CartanVector::coords)
      .def("norm", &cartan::CartanVector::norm);

  py::class_<cartan::ConeSubset>(m, "ConeSubset")
      .def(py::init<const cartan::AmbientGroup&,
                    std::vector<Eigen::VectorXd>>(),
           py::arg("group"), py::arg("generators"))
      .def_property_readonly("group", &cartan::ConeSubset::group)
      .def_property_readonly("generators", &cartan::ConeSubset::generators);

  m.def("diagonal_ray", &cartan::diagonal_ray, py::arg("group"));
  m.def("first_axis_ray", &cartan::first_axis_ray, py::arg("group"));
  m.def("full_chamber", &cartan::full_chamber, py::arg("group"));
  m.def("cartan_projection", &cartan::cartan_projection, py::arg("group"),
        py::arg("g"));
  m.def("distance_to_cone",
        py::overload_cast<const cartan::CartanVector&,
                          const cartan::ConeSubset&>(
            &cartan::distance_to_cone),
        py::arg("v"), py::arg("cone"));
  m.def("distance_to_cone",
        py::overload_cast<const Eigen::VectorXd&, const cartan::ConeSubset&>(
            &cartan::distance_to_cone),
        py::arg("v"), py::arg("cone"));

  py::enum_<cartan::PropernessVerdict>(m, "PropernessVerdict")
      .value("PROPER", cartan::PropernessVerdict::Proper)
      .value("NOT_PROPER", cartan::PropernessVerdict::NotProper)
      .value("BOUNDARY", cartan::PropernessVerdict::Boundary);

  py::class_<cartan::PropernessResult>(m, "PropernessResult")
      .def_readonly("verdict", &cartan::PropernessResult::verdict)
      .def_readonly("witness", &cartan::PropernessResult::witness)
      .def_readonly("min_probe_distance",
                    &cartan::PropernessResult::min_probe_distance);

  m.def("properness_check", &cartan::properness_check, py::arg("mu_l"),
        py::arg("mu_h"), py::arg("probe_count") = 64,
        py::arg("seed") = 0x5eed);

  py::class_<cartan::SharpnessEstimate>(m, "SharpnessEstimate")
      .def_readonly("C", &cartan::SharpnessEstimate::C)
      .def_readonly("c_prime", &cartan::SharpnessEstimate::c_prime)
      .def_readonly("word_radius", &cartan::SharpnessEstimate::word_radius)
      .def_readonly("samples", &cartan::SharpnessEstimate::samples)
      .def_readonly("skipped", &cartan::SharpnessEstimate::skipped)
      .def_readonly("sharp", &cartan::SharpnessEstimate::sharp)
      .def_readonly("pareto", &cartan::SharpnessEstimate::pareto);

  m.def(
      "estimate_sharpness",
      [](const cartan::AmbientGroup& group,
         const std::vector<cartan::Element>& words,
         const cartan::ConeSubset& mu_h, double c_prime_cap, int word_radius) {
        return cartan::estimate_sharpness(group, words, mu_h, c_prime_cap,
                                          word_radius);
      },
      py::arg("group"), py::arg("words"), py::arg("mu_h"),
      py::arg("c_prime_cap") = 0.0, py::arg("word_radius") = 0);

  // ---- anti-de Sitter 3-manifolds ----
  py::class_<ads3::GroupPresentation>(m, "GroupPresentation")
      .def(py::init<std::vector<cartan::Element>>(), py::arg("generators"))
      .def("free_rank", &ads3::GroupPresentation::free_rank)
      .def_property_readonly("generators",
                             &ads3::GroupPresentation::generators);

  py::class_<ads3::Letter>(m, "Letter")
      .def_readonly("gen", &ads3::Letter::gen)
      .def_readonly("exp", &ads3::Letter::exp);

  py::class_<ads3::GroupWord>(m, "GroupWord")
      .def_readonly("letters", &ads3::GroupWord::letters)
      .def_readonly("element", &ads3::GroupWord::element)
      .def("length", &ads3::GroupWord::length);

  py::class_<ads3::WordBall>(m, "WordBall")
      .def_readonly("words", &ads3::WordBall::words)
      .def_readonly("merged_duplicates", &ads3::WordBall::merged_duplicates);

  m.def("enumerate_ball", &ads3::enumerate_ball, py::arg("presentation"),
        py::arg("word_radius"), py::arg("dedupe_tol") = 1e-8);

  py::class_<ads3::StableSpectrum>(m, "StableSpectrum")
      .def_readonly("C", &ads3::StableSpectrum::C)
      .def_readonly("l_min", &ads3::StableSpectrum::l_min)
      .def_readonly("eigenvalues", &ads3::StableSpectrum::eigenvalues);

  m.def("stable_spectrum", &ads3::stable_spectrum, py::arg("C"),
        py::arg("l_max"));

  py::class_<ads3::OrbitCount>(m, "OrbitCount")
      .def_readonly("radii", &ads3::OrbitCount::radii)
      .def_readonly("counts", &ads3::OrbitCount::counts)
      .def_readonly("fitted_slope", &ads3::OrbitCount::fitted_slope)
      .def_readonly("fit_points", &ads3::OrbitCount::fit_points)
      .def_readonly("max_mu_norm", &ads3::OrbitCount::max_mu_norm)
      .def_readonly("complete", &ads3::OrbitCount::complete);

  m.def(
      "orbit_count",
      [](const ads3::GroupPresentation& presentation, int word_radius,
         const std::vector<double>& radii, double dedupe_tol) {
        return ads3::orbit_count(presentation, word_radius, radii, dedupe_tol);
      },
      py::arg("presentation"), py::arg("word_radius"), py::arg("radii"),
      py::arg("dedupe_tol") = 1e-8);

  py::class_<ads3::StabilityExperiment>(m, "StabilityExperiment")
      .def_readonly("unperturbed_c", &ads3::StabilityExperiment::unperturbed_c)
      .def_readonly("min_c", &ads3::StabilityExperiment::min_c)
      .def_readonly("sample_cs", &ads3::StabilityExperiment::sample_cs)
      .def_readonly("all_proper_on_sample",
                    &ads3::StabilityExperiment::all_proper_on_sample)
      .def_readonly("common_spectrum",
                    &ads3::StabilityExperiment::common_spectrum);

  m.def(
      "stability_experiment",
      [](const ads3::GroupPresentation& presentation,
         double perturbation_scale, int samples, int word_radius,
         long long l_max, std::uint64_t seed,
         const std::optional<cartan::ConeSubset>& mu_h, double dedupe_tol) {
        return ads3::stability_experiment(presentation, perturbation_scale,
                                          samples, word_radius, l_max, seed,
                                          mu_h ? &*mu_h : nullptr, dedupe_tol);
      },
      py::arg("presentation"), py::arg("perturbation_scale"),
      py::arg("samples"), py::arg("word_radius"), py::arg("l_max"),
      py::arg("seed"), py::arg("mu_h") = std::nullopt,
      py::arg("dedupe_tol") = 1e-8);

  py::class_<ads3::PoincareRow>(m, "PoincareRow")
      .def_readonly("radius", &ads3::PoincareRow::radius)
      .def_readonly("partial_sum", &ads3::PoincareRow::partial_sum)
      .def_readonly("increment", &ads3::PoincareRow::increment);

  py::class_<ads3::PoincareSums>(m, "PoincareSums")
      .def_readonly("rows", &ads3::PoincareSums::rows)
      .def_readonly("decay_rate", &ads3::PoincareSums::decay_rate)
      .def_readonly("c_est", &ads3::PoincareSums::c_est)
      .def_readonly("expected_divergent",
                    &ads3::PoincareSums::expected_divergent);

  m.def(
      "poincare_partial_sums",
      [](const ads3::GroupPresentation& presentation, double decay_rate,
         const std::vector<int>& schedule, double dedupe_tol) {
        return ads3::poincare_partial_sums(presentation, decay_rate, schedule,
                                           dedupe_tol);
      },
      py::arg("presentation"), py::arg("decay_rate"), py::arg("schedule"),
      py::arg("dedupe_tol") = 1e-8);

  m.def("standard_presentation", &ads3::standard_presentation);
  m.def("rank_one_presentation", &ads3::rank_one_presentation, py::arg("t"));
}
