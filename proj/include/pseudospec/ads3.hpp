#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pseudospec/cartan.hpp"

namespace pseudospec::ads3 {

// Free-group presentation acting through SL(2,R) x SL(2,R); generators are
// pairs of unit-determinant 2x2 matrices. Relations are not modeled: words
// are reduced strings and coincidences are only detected numerically.
class GroupPresentation {
 public:
  explicit GroupPresentation(std::vector<cartan::Element> generators);

  int free_rank() const { return static_cast<int>(gens_.size()); }
  const std::vector<cartan::Element>& generators() const { return gens_; }

 private:
  std::vector<cartan::Element> gens_;
};

struct Letter {
  int gen = 0;   // generator index
  int exp = 1;   // +1 or -1
};

struct GroupWord {
  std::vector<Letter> letters;  // freely reduced
  cartan::Element element;      // cached product

  int length() const { return static_cast<int>(letters.size()); }
};

struct WordBall {
  std::vector<GroupWord> words;  // identity excluded; breadth-first order
  std::size_t merged_duplicates = 0;  // numeric near-coincidences dropped
};

// All freely reduced words of length 1..word_radius. Words whose matrix pairs
// agree within dedupe_tol (Frobenius, both factors) are merged, keeping the
// earliest word, and the merge count flags the warning. Budget: the reduced
// word count 2k(2k-1)^(l-1) summed over lengths must stay within the
// enumeration budget (default 1e7 for words).
WordBall enumerate_ball(const GroupPresentation& presentation, int word_radius,
                        double dedupe_tol = 1e-8);

inline constexpr std::int64_t kWordBudgetFallback = 10'000'000;

// Stable L2 eigenvalue listing {l(l-2) : l integer, l_min <= l <= l_max} with
// l_min the smallest integer >= 10 / C^3. Exact integer arithmetic.
struct StableSpectrum {
  double C = 1.0;
  long long l_min = 0;
  std::vector<long long> eigenvalues;
};

StableSpectrum stable_spectrum(double C, long long l_max);

struct OrbitCount {
  std::vector<double> radii;
  std::vector<std::size_t> counts;  // group elements with |mu| <= R, id included
  double fitted_slope = 0.0;        // least-squares slope of log N against R
  int fit_points = 0;               // radii with N >= 2 entering the fit
  double max_mu_norm = 0.0;         // largest |mu| the ball reached
  bool complete = true;  // false when max_mu_norm < max radius (counts are
                         // lower bounds there)
};

// Pseudo-ball orbit counts N(R) = #{gamma : |mu(gamma)| <= R} over the
// enumerated word ball. Radii must be positive and strictly increasing.
OrbitCount orbit_count(const GroupPresentation& presentation, int word_radius,
                       std::span<const double> radii,
                       double dedupe_tol = 1e-8);

struct StabilityExperiment {
  double unperturbed_c = 0.0;
  double min_c = 0.0;                 // infimum over the perturbed samples
  std::vector<double> sample_cs;
  bool all_proper_on_sample = true;   // every sample C >= 0.05
  // (l, l(l-2)) rows of stable_spectrum(min_c, l_max): eigenvalues certified
  // for every sampled deformation at once.
  std::vector<std::pair<long long, long long>> common_spectrum;
};

inline constexpr double kPropernessFloorC = 0.05;

// Perturbs each generator multiplicatively by exp of random traceless 2x2
// pairs with entries uniform in [-scale, scale], re-normalizes determinants,
// re-estimates sharpness per sample against muH (default: diagonal ray), and
// intersects the stable spectra via min_c. Seeded and reproducible.
StabilityExperiment stability_experiment(const GroupPresentation& presentation,
                                         double perturbation_scale,
                                         int samples, int word_radius,
                                         long long l_max, std::uint64_t seed,
                                         const cartan::ConeSubset* muH = nullptr,
                                         double dedupe_tol = 1e-8);

struct PoincareRow {
  int radius = 0;
  double partial_sum = 0.0;  // identity term 1 included
  double increment = 0.0;    // against the previous schedule entry
};

struct PoincareSums {
  std::vector<PoincareRow> rows;
  double decay_rate = 0.0;
  double c_est = 0.0;               // sharpness estimate at the last radius
  bool expected_divergent = false;  // decay_rate <= 1/c_est
};

// Partial sums S_L = sum over words of length <= L of exp(-a |mu(gamma)|),
// evaluated along the given schedule of word radii (positive, increasing).
PoincareSums poincare_partial_sums(const GroupPresentation& presentation,
                                   double decay_rate,
                                   std::span<const int> schedule,
                                   double dedupe_tol = 1e-8);

// Rank-two Schottky pair in the first factor: diag(3, 1/3) and its conjugate
// by the quarter-turn, second factors trivial. Free, purely hyperbolic, and
// the reference subject for the sharpness and orbit-growth experiments.
GroupPresentation standard_presentation();

// Rank-one presentation generated by (diag(e^t, e^-t), id); mu-norms of
// powers are exact multiples of t, giving closed-form Poincare sums.
GroupPresentation rank_one_presentation(double t);

}  // namespace pseudospec::ads3
