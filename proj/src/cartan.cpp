#include "pseudospec/cartan.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "pseudospec/detail/format.hpp"

namespace pseudospec::cartan {

namespace {

using detail::fmt;

void check_square(const Eigen::MatrixXd& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n)
    throw input_error(fmt("%s must be %dx%d, got %ldx%ld", what, n, n,
                          static_cast<long>(m.rows()),
                          static_cast<long>(m.cols())));
  if (!m.allFinite())
    throw input_error(fmt("%s has non-finite entries", what));
}

void check_unit_determinant(const Eigen::MatrixXd& m, const char* what) {
  const double det = m.determinant();
  if (!(std::abs(det - 1.0) <= 1e-6))
    throw input_error(
        fmt("%s determinant %.12g drifts more than 1e-6 from 1", what, det));
}

// Closed chamber membership up to 1e-9: sorted descending and summing to
// zero for SL_n, the nonnegative quadrant for the product group.
void check_chamber(const AmbientGroup& group, const Eigen::VectorXd& v,
                   const char* what) {
  const double tol = 1e-9 * std::max(1.0, v.cwiseAbs().maxCoeff());
  if (group.kind == GroupKind::SLn) {
    for (int i = 0; i + 1 < v.size(); ++i)
      if (v(i) < v(i + 1) - tol)
        throw input_error(
            fmt("%s is not sorted descending at position %d", what, i));
    if (std::abs(v.sum()) > tol)
      throw input_error(fmt("%s has nonzero trace %.3g", what, v.sum()));
  } else {
    for (int i = 0; i < v.size(); ++i)
      if (v(i) < -tol)
        throw input_error(
            fmt("%s has negative coordinate %d = %.3g", what, i, v(i)));
  }
}

// Distance from v to the nonnegative hull of gens: the projection onto the
// cone lies in the relative interior of some face, where it agrees with the
// unconstrained least-squares projection onto an independent generating
// subset with nonnegative coefficients. Enumerating every subset therefore
// finds it exactly (up to roundoff).
double cone_distance_impl(const Eigen::VectorXd& v,
                          const std::vector<Eigen::VectorXd>& gens) {
  const int k = static_cast<int>(gens.size());
  if (k == 0) return v.norm();
  if (k > 20)
    throw budget_error(
        fmt("cone has %d generators; exact face enumeration caps at 20", k));
  double best = v.norm();  // the origin face
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    const int cols = __builtin_popcount(mask);
    Eigen::MatrixXd g(v.size(), cols);
    int c = 0;
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) g.col(c++) = gens[i];
    const Eigen::VectorXd coeff =
        g.completeOrthogonalDecomposition().solve(v);
    if ((coeff.array() >= -1e-12).all())
      best = std::min(best, (v - g * coeff.cwiseMax(0.0)).norm());
  }
  return best;
}

}  // namespace

bool operator==(const AmbientGroup& a, const AmbientGroup& b) {
  if (a.kind != b.kind) return false;
  return a.kind == GroupKind::SL2xSL2 || a.n == b.n;
}

ConeSubset::ConeSubset(const AmbientGroup& group,
                       std::vector<Eigen::VectorXd> generators)
    : group_(group), gens_(std::move(generators)) {
  for (const auto& g : gens_) {
    if (g.size() != group_.coord_dim())
      throw input_error(fmt("cone generator has %ld coords, chamber needs %d",
                            static_cast<long>(g.size()), group_.coord_dim()));
    if (!g.allFinite())
      throw input_error("cone generator has non-finite entries");
    if (g.norm() <= 1e-12)
      throw input_error("cone generators must be nonzero");
    check_chamber(group_, g, "cone generator");
  }
}

ConeSubset diagonal_ray(const AmbientGroup& group) {
  if (group.kind != GroupKind::SL2xSL2)
    throw input_error("diagonal_ray is a product-chamber preset");
  return ConeSubset(group, {Eigen::Vector2d(1.0, 1.0)});
}

ConeSubset first_axis_ray(const AmbientGroup& group) {
  if (group.kind != GroupKind::SL2xSL2)
    throw input_error("first_axis_ray is a product-chamber preset");
  return ConeSubset(group, {Eigen::Vector2d(1.0, 0.0)});
}

ConeSubset full_chamber(const AmbientGroup& group) {
  if (group.kind != GroupKind::SL2xSL2)
    throw input_error("full_chamber is a product-chamber preset");
  return ConeSubset(group,
                    {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0)});
}

CartanVector cartan_projection(const AmbientGroup& group, const Element& g) {
  if (group.kind == GroupKind::SLn) {
    if (group.n < 2) throw input_error("SL_n needs n >= 2");
    check_square(g.a, group.n, "group element");
    check_unit_determinant(g.a, "group element");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g.a);
    Eigen::VectorXd logs = svd.singularValues().array().log();
    logs.array() -= logs.mean();  // strip determinant drift
    return CartanVector{group, logs};
  }
  check_square(g.a, 2, "first factor");
  check_square(g.b, 2, "second factor");
  check_unit_determinant(g.a, "first factor");
  check_unit_determinant(g.b, "second factor");
  Eigen::Vector2d coords;
  coords(0) = std::max(0.0, std::log(Eigen::JacobiSVD<Eigen::Matrix2d>(g.a)
                                         .singularValues()(0)));
  coords(1) = std::max(0.0, std::log(Eigen::JacobiSVD<Eigen::Matrix2d>(g.b)
                                         .singularValues()(0)));
  return CartanVector{group, coords};
}

double distance_to_cone(const CartanVector& v, const ConeSubset& cone) {
  if (!(v.group == cone.group()))
    throw input_error("Cartan vector and cone live in different chambers");
  return cone_distance_impl(v.coords, cone.generators());
}

double distance_to_cone(const Eigen::VectorXd& v, const ConeSubset& cone) {
  if (v.size() != cone.group().coord_dim())
    throw input_error(fmt("vector has %ld coords, chamber needs %d",
                          static_cast<long>(v.size()),
                          cone.group().coord_dim()));
  return cone_distance_impl(v, cone.generators());
}

const char* to_string(PropernessVerdict v) {
  switch (v) {
    case PropernessVerdict::Proper:
      return "proper";
    case PropernessVerdict::NotProper:
      return "not_proper";
    case PropernessVerdict::Boundary:
      return "boundary";
  }
  return "proper";
}

PropernessResult properness_check(const ConeSubset& muL, const ConeSubset& muH,
                                  int probe_count, std::uint64_t seed) {
  if (!(muL.group() == muH.group()))
    throw input_error("cones live in different chambers");
  if (probe_count < 0) throw input_error("probe_count must be >= 0");

  const auto& gl = muL.generators();
  const auto& gh = muH.generators();
  const int d = muL.group().coord_dim();
  const int m = static_cast<int>(gl.size() + gh.size());
  if (m > 24)
    throw budget_error(
        fmt("%d cone generators exceed the exact feasibility cap of 24", m));

  PropernessResult out;

  // Exact part: a nontrivial common vector exists iff the system
  // {sum a_i L_i = sum b_j H_j, a,b >= 0, sum a_i = 1} is feasible, and any
  // feasible system has a basic solution supported on at most d+1
  // independent columns. Enumerate those supports and least-squares each.
  if (!gl.empty() && !gh.empty()) {
    Eigen::MatrixXd a(d + 1, m);
    for (int i = 0; i < static_cast<int>(gl.size()); ++i) {
      a.col(i).head(d) = gl[i];
      a(d, i) = 1.0;
    }
    for (int j = 0; j < static_cast<int>(gh.size()); ++j) {
      a.col(gl.size() + j).head(d) = -gh[j];
      a(d, gl.size() + j) = 0.0;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d + 1);
    rhs(d) = 1.0;

    const int max_support = std::min(m, d + 1);
    std::vector<int> pick;
    const std::function<bool(int)> search = [&](int start) -> bool {
      if (!pick.empty()) {
        Eigen::MatrixXd sub(d + 1, pick.size());
        for (std::size_t c = 0; c < pick.size(); ++c) sub.col(c) = a.col(pick[c]);
        const Eigen::VectorXd x =
            sub.completeOrthogonalDecomposition().solve(rhs);
        const double residual = (sub * x - rhs).norm();
        if (residual <= 1e-12 * (1.0 + sub.norm()) &&
            (x.array() >= -1e-10).all()) {
          Eigen::VectorXd witness = Eigen::VectorXd::Zero(d);
          for (std::size_t c = 0; c < pick.size(); ++c)
            if (pick[c] < static_cast<int>(gl.size()))
              witness += std::max(0.0, x(c)) * gl[pick[c]];
          if (witness.norm() > 1e-9) {
            out.verdict = PropernessVerdict::NotProper;
            out.witness = witness;
            out.min_probe_distance = 0.0;
            return true;
          }
        }
      }
      if (static_cast<int>(pick.size()) == max_support) return false;
      for (int i = start; i < m; ++i) {
        pick.push_back(i);
        if (search(i + 1)) return true;
        pick.pop_back();
      }
      return false;
    };
    if (search(0)) return out;
  }

  // Probe guard: unit directions of either cone that come within 1e-9 of the
  // other cone demote the verdict to Boundary.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(0.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_dir;
  const auto probe = [&](const std::vector<Eigen::VectorXd>& from,
                         const ConeSubset& against) {
    if (from.empty()) return;
    const auto consider = [&](const Eigen::VectorXd& dir) {
      const double len = dir.norm();
      if (len <= 1e-12) return;
      const Eigen::VectorXd unit = dir / len;
      const double dist = cone_distance_impl(unit, against.generators());
      if (dist < best) {
        best = dist;
        best_dir = unit;
      }
    };
    for (const auto& g : from) consider(g);
    for (int t = 0; t < probe_count; ++t) {
      Eigen::VectorXd dir = Eigen::VectorXd::Zero(d);
      for (const auto& g : from) dir += coeff(rng) * g;
      consider(dir);
    }
  };
  probe(gl, muH);
  probe(gh, muL);

  out.min_probe_distance = best;
  if (best < 1e-9) {
    out.verdict = PropernessVerdict::Boundary;
    out.witness = best_dir;
  } else {
    out.verdict = PropernessVerdict::Proper;
  }
  return out;
}

SharpnessEstimate estimate_sharpness(const AmbientGroup& group,
                                     std::span<const Element> words,
                                     const ConeSubset& muH,
                                     double c_prime_cap, int word_radius) {
  if (words.empty()) throw input_error("word list is empty");
  if (!(muH.group() == group))
    throw input_error("cone chamber does not match the group");
  if (c_prime_cap < 0.0) throw input_error("c_prime_cap must be >= 0");

  std::vector<std::pair<double, double>> dist_norm;
  dist_norm.reserve(words.size());
  int skipped = 0;
  for (const auto& w : words) {
    const CartanVector mu = cartan_projection(group, w);
    const double len = mu.norm();
    if (len <= 1e-10) {  // elliptic or identity: the inequality is vacuous
      ++skipped;
      continue;
    }
    dist_norm.emplace_back(cone_distance_impl(mu.coords, muH.generators()),
                           len);
  }
  if (dist_norm.empty())
    throw input_error(
        "every word projected to the chamber origin; nothing to estimate");

  const auto raw_floor = [&](double cp) {
    double raw = std::numeric_limits<double>::infinity();
    for (const auto& [dist, len] : dist_norm)
      raw = std::min(raw, (dist + cp) / len);
    return raw;
  };

  SharpnessEstimate est;
  est.c_prime = c_prime_cap;
  est.word_radius = word_radius;
  est.samples = static_cast<int>(dist_norm.size());
  est.skipped = skipped;
  const double raw = raw_floor(c_prime_cap);
  est.sharp = raw > kSharpnessFloor;
  est.C = std::clamp(raw, kSharpnessFloor, 1.0);
  for (double cp : {0.0, 1.0, 2.0, 5.0})
    est.pareto.emplace_back(cp, std::clamp(raw_floor(cp), kSharpnessFloor, 1.0));
  return est;
}

}  // namespace pseudospec::cartan
