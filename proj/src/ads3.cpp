#include "pseudospec/ads3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "pseudospec/detail/format.hpp"

namespace pseudospec::ads3 {

namespace {

using detail::fmt;

const cartan::AmbientGroup kPair = cartan::AmbientGroup::sl2_pair();

Eigen::Matrix2d adjugate(const Eigen::Matrix2d& m) {
  Eigen::Matrix2d inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return inv;  // the exact inverse at det 1
}

void check_factor(const Eigen::MatrixXd& m, int index, const char* which) {
  if (m.rows() != 2 || m.cols() != 2)
    throw input_error(fmt("generator %d: %s factor must be 2x2", index, which));
  if (!m.allFinite())
    throw input_error(
        fmt("generator %d: %s factor has non-finite entries", index, which));
  const double det = m.determinant();
  if (!(std::abs(det - 1.0) <= 1e-9))
    throw input_error(
        fmt("generator %d: %s factor determinant %.12g is not 1 within 1e-9",
            index, which, det));
}

double pair_distance(const cartan::Element& x, const cartan::Element& y) {
  return std::max((x.a - y.a).norm(), (x.b - y.b).norm());
}

// Smallest admissible integer l as a long double, safe against overflow for
// collapsed sharpness constants.
long double admissible_floor(double c) {
  const long double v = 10.0L / (static_cast<long double>(c) * c * c);
  const long double nearest = std::floor(v + 0.5L);
  if (std::fabs(v - nearest) <= 1e-9L * std::fmax(1.0L, v)) return nearest;
  return std::ceil(v);
}

struct MiniUnionFind {
  std::vector<std::size_t> parent;
  explicit MiniUnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);  // keep the earliest word as representative
    parent[b] = a;
  }
};

// exp of the traceless matrix [[u, v], [w, -u]] via its square = (u^2+vw) I.
Eigen::Matrix2d exp_traceless(double u, double v, double w) {
  Eigen::Matrix2d x;
  x << u, v, w, -u;
  const double delta = u * u + v * w;
  double c, k;
  if (delta > 0.0) {
    const double s = std::sqrt(delta);
    c = std::cosh(s);
    k = std::sinh(s) / s;
  } else if (delta < 0.0) {
    const double s = std::sqrt(-delta);
    c = std::cos(s);
    k = std::sin(s) / s;
  } else {
    c = 1.0;
    k = 1.0;
  }
  return c * Eigen::Matrix2d::Identity() + k * x;
}

std::vector<cartan::Element> ball_elements(const WordBall& ball) {
  std::vector<cartan::Element> elems;
  elems.reserve(ball.words.size());
  for (const auto& w : ball.words) elems.push_back(w.element);
  return elems;
}

}  // namespace

GroupPresentation::GroupPresentation(std::vector<cartan::Element> generators)
    : gens_(std::move(generators)) {
  if (gens_.empty()) throw input_error("presentation needs generators");
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    check_factor(gens_[i].a, static_cast<int>(i), "first");
    check_factor(gens_[i].b, static_cast<int>(i), "second");
  }
}

WordBall enumerate_ball(const GroupPresentation& presentation, int word_radius,
                        double dedupe_tol) {
  if (word_radius < 1)
    throw input_error(fmt("word_radius must be >= 1, got %d", word_radius));
  if (dedupe_tol < 0.0) throw input_error("dedupe_tol must be nonnegative");

  const int k = presentation.free_rank();
  const std::int64_t budget = enumeration_budget(kWordBudgetFallback);
  {
    long double total = 0.0L, at_length = 2.0L * k;
    for (int l = 1; l <= word_radius; ++l) {
      total += at_length;
      at_length *= 2.0L * k - 1.0L;
    }
    if (total > static_cast<long double>(budget))
      throw budget_error(
          fmt("word ball of rank %d at radius %d holds %.4Lg reduced words, "
              "over the budget of %lld; lower word_radius or raise "
              "PSEUDOSPEC_BUDGET",
              k, word_radius, total, static_cast<long long>(budget)));
  }

  // 2k one-letter steps in a fixed order keeps the walk deterministic.
  std::vector<Letter> steps;
  std::vector<cartan::Element> step_elements;
  for (int g = 0; g < k; ++g) {
    const auto& gen = presentation.generators()[g];
    steps.push_back({g, +1});
    step_elements.push_back(gen);
    steps.push_back({g, -1});
    step_elements.push_back(
        cartan::Element::pair(adjugate(gen.a), adjugate(gen.b)));
  }

  WordBall out;
  std::vector<GroupWord> frontier;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    GroupWord w;
    w.letters = {steps[s]};
    w.element = step_elements[s];
    frontier.push_back(std::move(w));
  }
  out.words = frontier;
  for (int l = 2; l <= word_radius; ++l) {
    std::vector<GroupWord> next;
    next.reserve(frontier.size() * (2 * k - 1));
    for (const auto& w : frontier) {
      const Letter& last = w.letters.back();
      for (std::size_t s = 0; s < steps.size(); ++s) {
        if (steps[s].gen == last.gen && steps[s].exp == -last.exp) continue;
        GroupWord grown;
        grown.letters = w.letters;
        grown.letters.push_back(steps[s]);
        grown.element = cartan::Element::pair(w.element.a * step_elements[s].a,
                                              w.element.b * step_elements[s].b);
        next.push_back(std::move(grown));
      }
    }
    out.words.insert(out.words.end(), next.begin(), next.end());
    frontier = std::move(next);
  }

  // Numeric dedupe: matrices within dedupe_tol (Frobenius per factor) cluster
  // together; each cluster keeps its earliest word. Candidate pairs come from
  // a sliding window over one matrix entry, which bounds Frobenius distance.
  const std::size_t count = out.words.size();
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return out.words[x].element.a(0, 0) < out.words[y].element.a(0, 0);
  });
  MiniUnionFind uf(count);
  for (std::size_t i = 1; i < count; ++i) {
    for (std::size_t j = i; j-- > 0;) {
      const auto& wi = out.words[order[i]].element;
      const auto& wj = out.words[order[j]].element;
      if (wi.a(0, 0) - wj.a(0, 0) > dedupe_tol) break;
      if (pair_distance(wi, wj) <= dedupe_tol) uf.unite(order[i], order[j]);
    }
  }
  std::vector<GroupWord> kept;
  kept.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    if (uf.find(i) == i) kept.push_back(std::move(out.words[i]));
  out.merged_duplicates = count - kept.size();
  out.words = std::move(kept);
  return out;
}

StableSpectrum stable_spectrum(double C, long long l_max) {
  if (!(C > 0.0 && C <= 1.0))
    throw input_error(
        fmt("sharpness constant C=%.6g must lie in (0, 1]", C));
  if (l_max > 3'000'000'000LL)
    throw input_error("l_max beyond 3e9 would overflow exact 64-bit entries");
  const long double floor_l = admissible_floor(C);
  if (static_cast<long double>(l_max) < floor_l)
    throw input_error(
        fmt("l_max=%lld is below the admissible floor %.0Lf for C=%.6g",
            l_max, floor_l, C));
  StableSpectrum out;
  out.C = C;
  out.l_min = static_cast<long long>(floor_l);
  const long long span = l_max - out.l_min + 1;
  if (span > enumeration_budget())
    throw budget_error(
        fmt("requested %lld eigenvalues, over the budget of %lld",
            span, static_cast<long long>(enumeration_budget())));
  out.eigenvalues.reserve(static_cast<std::size_t>(span));
  for (long long l = out.l_min; l <= l_max; ++l)
    out.eigenvalues.push_back(l * (l - 2));
  return out;
}

OrbitCount orbit_count(const GroupPresentation& presentation, int word_radius,
                       std::span<const double> radii, double dedupe_tol) {
  if (radii.empty()) throw input_error("orbit counting needs radii");
  if (!(radii.front() > 0.0))
    throw input_error(fmt("radii must be positive, got %g", radii.front()));
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw input_error(
          fmt("radii must strictly increase, got %g after %g", radii[i],
              radii[i - 1]));

  const WordBall ball = enumerate_ball(presentation, word_radius, dedupe_tol);
  std::vector<double> mus;
  mus.reserve(ball.words.size());
  for (const auto& w : ball.words)
    mus.push_back(cartan::cartan_projection(kPair, w.element).norm());
  std::sort(mus.begin(), mus.end());

  OrbitCount out;
  out.radii.assign(radii.begin(), radii.end());
  for (const double r : radii) {
    const auto past = std::upper_bound(mus.begin(), mus.end(), r);
    out.counts.push_back(1 + static_cast<std::size_t>(past - mus.begin()));
  }
  out.max_mu_norm = mus.empty() ? 0.0 : mus.back();
  out.complete = out.max_mu_norm >= radii.back();

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int pts = 0;
  for (std::size_t i = 0; i < out.counts.size(); ++i) {
    if (out.counts[i] < 2) continue;
    const double x = out.radii[i];
    const double y = std::log(static_cast<double>(out.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++pts;
  }
  out.fit_points = pts;
  if (pts >= 2) {
    const double denom = pts * sxx - sx * sx;  // radii distinct, so positive
    out.fitted_slope = (pts * sxy - sx * sy) / denom;
  }
  return out;
}

StabilityExperiment stability_experiment(const GroupPresentation& presentation,
                                         double perturbation_scale,
                                         int samples, int word_radius,
                                         long long l_max, std::uint64_t seed,
                                         const cartan::ConeSubset* muH,
                                         double dedupe_tol) {
  if (perturbation_scale < 0.0)
    throw input_error("perturbation_scale must be >= 0");
  if (samples < 2)
    throw input_error(fmt("samples must be >= 2, got %d", samples));
  if (l_max < 1) throw input_error("l_max must be >= 1");

  const cartan::ConeSubset cone = muH ? *muH : cartan::diagonal_ray(kPair);
  if (!(cone.group() == kPair))
    throw input_error("reference cone must live in the product chamber");

  const auto sharpness_of = [&](const GroupPresentation& p) {
    const WordBall ball = enumerate_ball(p, word_radius, dedupe_tol);
    const std::vector<cartan::Element> elems = ball_elements(ball);
    return cartan::estimate_sharpness(kPair, elems, cone).C;
  };

  StabilityExperiment out;
  out.unperturbed_c = sharpness_of(presentation);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-perturbation_scale,
                                               perturbation_scale);
  const auto bump = [&](const Eigen::MatrixXd& m) {
    const double u = entry(rng), v = entry(rng), w = entry(rng);
    Eigen::Matrix2d moved = m * exp_traceless(u, v, w);
    const double det = moved.determinant();
    if (std::abs(det - 1.0) > 1e-12) moved /= std::sqrt(det);
    return moved;
  };
  for (int s = 0; s < samples; ++s) {
    std::vector<cartan::Element> bumped;
    bumped.reserve(presentation.generators().size());
    for (const auto& g : presentation.generators())
      bumped.push_back(cartan::Element::pair(bump(g.a), bump(g.b)));
    out.sample_cs.push_back(sharpness_of(GroupPresentation(bumped)));
  }
  out.min_c = *std::min_element(out.sample_cs.begin(), out.sample_cs.end());
  out.all_proper_on_sample =
      std::all_of(out.sample_cs.begin(), out.sample_cs.end(),
                  [](double c) { return c >= kPropernessFloorC; });

  // The intersection of the sampled stable spectra is the one taken at the
  // worst constant; an admissible floor beyond l_max leaves it empty.
  const long double floor_l = admissible_floor(out.min_c);
  if (static_cast<long double>(l_max) >= floor_l) {
    const StableSpectrum common = stable_spectrum(out.min_c, l_max);
    long long l = common.l_min;
    for (const long long e : common.eigenvalues)
      out.common_spectrum.emplace_back(l++, e);
  }
  return out;
}

PoincareSums poincare_partial_sums(const GroupPresentation& presentation,
                                   double decay_rate,
                                   std::span<const int> schedule,
                                   double dedupe_tol) {
  if (schedule.empty()) throw input_error("schedule must be nonempty");
  if (schedule.front() < 1)
    throw input_error(fmt("schedule radii must be >= 1, got %d",
                          schedule.front()));
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] <= schedule[i - 1])
      throw input_error(
          fmt("schedule must strictly increase, got %d after %d", schedule[i],
              schedule[i - 1]));
  if (decay_rate < 0.0)
    throw input_error(fmt("decay_rate must be >= 0, got %g", decay_rate));

  const int max_radius = schedule.back();
  const WordBall ball = enumerate_ball(presentation, max_radius, dedupe_tol);
  std::vector<double> sum_by_length(max_radius + 1, 0.0);
  for (const auto& w : ball.words)
    sum_by_length[w.length()] +=
        std::exp(-decay_rate *
                 cartan::cartan_projection(kPair, w.element).norm());

  PoincareSums out;
  out.decay_rate = decay_rate;
  double partial = 1.0;  // identity
  int done = 0;
  double previous = 1.0;
  for (const int radius : schedule) {
    while (done < radius) partial += sum_by_length[++done];
    out.rows.push_back({radius, partial, partial - previous});
    previous = partial;
  }

  // Conservative convergence prediction from the sharpness constant at the
  // final radius; a ball with only elliptic words has no usable estimate.
  const std::vector<cartan::Element> elems = ball_elements(ball);
  try {
    out.c_est =
        cartan::estimate_sharpness(kPair, elems, cartan::diagonal_ray(kPair))
            .C;
    out.expected_divergent = decay_rate <= 1.0 / out.c_est;
  } catch (const input_error&) {
    out.c_est = 0.0;
    out.expected_divergent = true;
  }
  return out;
}

GroupPresentation standard_presentation() {
  const Eigen::Matrix2d a = Eigen::Vector2d(3.0, 1.0 / 3.0).asDiagonal();
  Eigen::Matrix2d quarter;
  const double c = std::numbers::sqrt2_v<double> / 2.0;
  quarter << c, -c, c, c;
  const Eigen::Matrix2d b = quarter * a * quarter.transpose();
  return GroupPresentation(
      {cartan::Element::pair(a, Eigen::Matrix2d::Identity()),
       cartan::Element::pair(b, Eigen::Matrix2d::Identity())});
}

GroupPresentation rank_one_presentation(double t) {
  if (!std::isfinite(t) || t == 0.0)
    throw input_error("rank-one presentation needs a nonzero finite exponent");
  const Eigen::Matrix2d a =
      Eigen::Vector2d(std::exp(t), std::exp(-t)).asDiagonal();
  return GroupPresentation(
      {cartan::Element::pair(a, Eigen::Matrix2d::Identity())});
}

}  // namespace pseudospec::ads3
