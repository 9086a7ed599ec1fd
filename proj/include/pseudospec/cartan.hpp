#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pseudospec/errors.hpp"

namespace pseudospec::cartan {

enum class GroupKind { SLn, SL2xSL2 };

// The two reductive groups shipped: SL(n,R) with K = SO(n), and the rank-two
// product SL(2,R) x SL(2,R) with K = SO(2) x SO(2).
struct AmbientGroup {
  GroupKind kind = GroupKind::SLn;
  int n = 2;  // matrix size for SLn; fixed 2x2 factors otherwise

  // Dimension of the coordinate vector carrying a Cartan projection value.
  int coord_dim() const { return kind == GroupKind::SLn ? n : 2; }
  // Dimension of the flat the closed chamber spans.
  int chamber_dim() const { return kind == GroupKind::SLn ? n - 1 : 2; }

  static AmbientGroup sl(int n) { return {GroupKind::SLn, n}; }
  static AmbientGroup sl2_pair() { return {GroupKind::SL2xSL2, 2}; }
};

bool operator==(const AmbientGroup& a, const AmbientGroup& b);

// Group element; `b` is ignored for SLn and holds the second 2x2 factor for
// the product group.
struct Element {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;

  static Element sl(const Eigen::MatrixXd& m) { return {m, {}}; }
  static Element pair(const Eigen::Matrix2d& first,
                      const Eigen::Matrix2d& second) {
    return {first, second};
  }
};

// Value of the Cartan projection, constrained to the closed positive chamber:
// for SLn the sorted-descending log singular values renormalized to sum zero,
// for SL2xSL2 the pair (log sigma_1(a), log sigma_1(b)) with both entries
// nonnegative.
struct CartanVector {
  AmbientGroup group;
  Eigen::VectorXd coords;

  double norm() const { return coords.norm(); }
};

// Finitely many chamber generators; the cone is their nonnegative hull.
class ConeSubset {
 public:
  ConeSubset(const AmbientGroup& group,
             std::vector<Eigen::VectorXd> generators);

  const AmbientGroup& group() const { return group_; }
  const std::vector<Eigen::VectorXd>& generators() const { return gens_; }

 private:
  AmbientGroup group_;
  std::vector<Eigen::VectorXd> gens_;
};

// Ready-made chamber cones for the product group.
ConeSubset diagonal_ray(const AmbientGroup& group);
ConeSubset first_axis_ray(const AmbientGroup& group);
ConeSubset full_chamber(const AmbientGroup& group);

// Cartan projection via singular values. Elements must be finite with
// determinant within 1e-6 of one (per factor for the product group); the
// residual determinant drift is renormalized away so coords sum to zero
// exactly where the chamber demands it.
CartanVector cartan_projection(const AmbientGroup& group, const Element& g);

// Euclidean distance from v to the nonnegative hull of the cone generators.
// Exact up to roundoff: candidate projections are enumerated over the face
// lattice (span projections with nonnegative coefficients).
double distance_to_cone(const CartanVector& v, const ConeSubset& cone);
double distance_to_cone(const Eigen::VectorXd& v, const ConeSubset& cone);

enum class PropernessVerdict { Proper, NotProper, Boundary };

const char* to_string(PropernessVerdict v);

struct PropernessResult {
  PropernessVerdict verdict = PropernessVerdict::Proper;
  // Nontrivial common direction (NotProper) or the nearest-approach probe
  // (Boundary).
  std::optional<Eigen::VectorXd> witness;
  double min_probe_distance = 0.0;
};

// Decides whether cone(muL) and cone(muH) meet only at the origin. The exact
// part enumerates basic solutions of the feasibility system
// {muL a = muH b, a >= 0, b >= 0, sum a = 1}; unit probes sampled from each
// cone then guard the Boundary verdict (closest approach below 1e-9).
PropernessResult properness_check(const ConeSubset& muL, const ConeSubset& muH,
                                  int probe_count = 64,
                                  std::uint64_t seed = 0x5eed);

struct SharpnessEstimate {
  double C = 0.0;        // in (0, 1]
  double c_prime = 0.0;  // additive slack the estimate was taken at
  int word_radius = 0;
  int samples = 0;  // words contributing a ratio
  int skipped = 0;  // words with vanishing Cartan norm
  bool sharp = true;  // false when the raw ratio floor collapses to zero
  // (c_prime, C) trade-off at c_prime in {0, 1, 2, 5}.
  std::vector<std::pair<double, double>> pareto;
};

inline constexpr double kSharpnessFloor = 1e-12;

// Largest C with d(mu(gamma), cone(muH)) >= C * |mu(gamma)| - c_prime over
// the supplied words, clamped to (0, 1]. Words with |mu| = 0 are skipped and
// counted; all words skipped is an error.
SharpnessEstimate estimate_sharpness(const AmbientGroup& group,
                                     std::span<const Element> words,
                                     const ConeSubset& muH,
                                     double c_prime_cap = 0.0,
                                     int word_radius = 0);

}  // namespace pseudospec::cartan
