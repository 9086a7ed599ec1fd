#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pseudospec/quadform.hpp"

namespace pseudospec::flat {

// Invertible lattice deformation g together with the ambient signature; the
// flat torus in question is g(Z^n) \ R^{p,q}.
struct DeformationParameter {
  Eigen::MatrixXd g;
  quadform::Signature signature;

  DeformationParameter(const Eigen::MatrixXd& g_in,
                       const quadform::Signature& sig);
  int dim() const { return static_cast<int>(g.rows()); }
};

// Eigenvalue range of interest plus the sup-norm radius of the lattice box
// that gets enumerated.
struct SpectrumWindow {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int box_radius = 0;
};

struct SpectrumEntry {
  double eigenvalue = 0.0;  // cluster anchor (smallest member)
  std::vector<quadform::LatticePoint> witnesses;  // lexicographically sorted

  std::size_t multiplicity() const { return witnesses.size(); }
};

struct SpectrumSample {
  std::vector<SpectrumEntry> entries;  // ascending by eigenvalue
  SpectrumWindow window;
  // True when the ambient form is definite and no lattice point outside the
  // box can land inside the value window, so the listing is exhaustive.
  bool complete_below_box = false;
};

struct EnumerationOptions {
  double dedupe_tol = 1e-9;
  std::int64_t budget = 0;  // 0: use enumeration_budget()
};

// -4 pi^2 * Q_{g^{-1} I_{p,q} t(g^{-1})}(m), the Laplacian eigenvalue of the
// lattice character attached to m on the deformed torus.
double eigenvalue_of(const DeformationParameter& param,
                     const quadform::LatticePoint& m);

// Walks the box |m|_inf <= box_radius, keeps eigenvalues inside the window,
// and merges values within dedupe_tol into one entry carrying every witness.
SpectrumSample enumerate_spectrum(const DeformationParameter& param,
                                  const SpectrumWindow& window,
                                  const EnumerationOptions& opts = {});

// Samples the mode attached to m on a uniform periodic grid over the
// fundamental domain (lattice chart), applies the signed second-difference
// Laplacian pulled back through g, and returns the max residual against
// eigenvalue_of, relative to max(|eigenvalue|, 4 pi^2). Second-order: halving
// the step shrinks the residual about fourfold.
double verify_eigenfunction(const DeformationParameter& param,
                            const quadform::LatticePoint& m,
                            int grid_points_per_axis);

// Eigenvalues shared (within match_tol) by every perturbed spectrum, where
// the perturbations g0 + delta have entries of delta uniform in
// [-radius, radius] and near-singular draws are rejected.
std::vector<double> stability_scan(const DeformationParameter& g0,
                                   double radius, int samples,
                                   const SpectrumWindow& window,
                                   double match_tol, std::uint64_t seed,
                                   const EnumerationOptions& opts = {});

enum class Classification { DenseSuspected, DiscreteSuspected, Inconclusive };

const char* to_string(Classification c);

struct DensityOptions {
  double dedupe_tol = 1e-9;
  std::int64_t budget = 0;
  std::int64_t rational_search_bound = 1000;
  double rational_tol = 1e-9;
  double gap_shrink_factor = 4.0;  // classification threshold, echoed in report
};

struct DensityReport {
  struct BoxStat {
    int box_radius = 0;
    std::size_t distinct_values = 0;
    double min_gap = 0.0;
  };
  std::vector<BoxStat> boxes;
  Classification classification = Classification::Inconclusive;
  std::optional<quadform::IntegerProportionality> rationality;
  double gap_shrink_factor = 4.0;
  double observed_shrink = 0.0;  // min_gap(first box) / min_gap(last box)
  std::int64_t rational_search_bound = 0;
  double rational_tol = 0.0;
  std::string warning;  // nonempty when the dichotomy hypotheses fail
};

// Gap statistics over a fixed value window as the lattice box grows, plus a
// rationality certificate search. The dense/discrete dichotomy needs n >= 3
// and an indefinite form with p >= 2, q >= 1; other inputs still get their
// statistics but are classified Inconclusive with a warning.
DensityReport density_diagnostics(const DeformationParameter& param,
                                  std::span<const SpectrumWindow> windows,
                                  const DensityOptions& opts = {});

}  // namespace pseudospec::flat
