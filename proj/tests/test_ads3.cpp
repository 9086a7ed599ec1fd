#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <vector>

#include "pseudospec/ads3.hpp"

using namespace pseudospec;
using ads3::GroupPresentation;
using ads3::GroupWord;
using cartan::Element;

namespace {

Eigen::Matrix2d diag2(double a, double d) {
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  m(0, 0) = a;
  m(1, 1) = d;
  return m;
}

Eigen::Matrix2d rotation(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

// Reduced-word count at exactly length l in the free group of rank k.
long long reduced_words_at(int k, int l) {
  long long c = 2LL * k;
  for (int i = 1; i < l; ++i) c *= 2LL * k - 1;
  return c;
}

// Recompute a cached word product naively from the presentation.
Element product_of(const GroupPresentation& pres, const GroupWord& w) {
  Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d b = Eigen::Matrix2d::Identity();
  for (const auto& letter : w.letters) {
    Eigen::Matrix2d ga = pres.generators()[letter.gen].a;
    Eigen::Matrix2d gb = pres.generators()[letter.gen].b;
    if (letter.exp < 0) {
      ga = Eigen::Matrix2d{{ga(1, 1), -ga(0, 1)}, {-ga(1, 0), ga(0, 0)}};
      gb = Eigen::Matrix2d{{gb(1, 1), -gb(0, 1)}, {-gb(1, 0), gb(0, 0)}};
    }
    a = a * ga;
    b = b * gb;
  }
  return Element::pair(a, b);
}

}  // namespace

TEST_CASE("presentations validate their generators") {
  CHECK_THROWS_AS(GroupPresentation({}), input_error);
  CHECK_THROWS_AS(
      GroupPresentation({Element::pair(diag2(2.0, 0.5000001),
                                       Eigen::Matrix2d::Identity())}),
      input_error);
  CHECK_NOTHROW(GroupPresentation(
      {Element::pair(diag2(2.0, 0.5), Eigen::Matrix2d::Identity())}));
}

TEST_CASE("rank-one balls are the powers of the generator") {
  const GroupPresentation pres = ads3::rank_one_presentation(0.9);
  const ads3::WordBall ball = ads3::enumerate_ball(pres, 3);
  REQUIRE(ball.words.size() == 6);
  CHECK(ball.merged_duplicates == 0);
  // breadth-first: lengths 1,1,2,2,3,3 and elements are diagonal powers
  std::multiset<int> lengths;
  for (const auto& w : ball.words) {
    lengths.insert(w.length());
    const double j = w.length();
    CHECK(w.element.a.trace() ==
          doctest::Approx(std::exp(0.9 * j) + std::exp(-0.9 * j))
              .epsilon(1e-9));
    CHECK(std::abs(w.element.a(0, 1)) <= 1e-12);
    CHECK(std::abs(w.element.a(1, 0)) <= 1e-12);
  }
  CHECK(lengths == std::multiset<int>({1, 1, 2, 2, 3, 3}));
}

TEST_CASE("radius-one balls are the generators and their inverses") {
  const GroupPresentation pres = ads3::standard_presentation();
  const ads3::WordBall ball = ads3::enumerate_ball(pres, 1);
  REQUIRE(ball.words.size() == 4);
  for (const auto& w : ball.words) {
    REQUIRE(w.length() == 1);
    const Element want = product_of(pres, w);
    CHECK((w.element.a - want.a).norm() <= 1e-12);
    CHECK((w.element.b - want.b).norm() <= 1e-12);
  }
}

TEST_CASE("free rank two matches the reduced-word count formula") {
  const GroupPresentation pres = ads3::standard_presentation();
  const ads3::WordBall ball = ads3::enumerate_ball(pres, 4);
  CHECK(ball.merged_duplicates == 0);  // genuinely free: nothing collides
  std::map<int, long long> by_length;
  for (const auto& w : ball.words) ++by_length[w.length()];
  long long total = 0;
  for (int l = 1; l <= 4; ++l) {
    CHECK(by_length[l] == reduced_words_at(2, l));
    total += reduced_words_at(2, l);
  }
  CHECK(static_cast<long long>(ball.words.size()) == total);  // 4+12+36+108
}

TEST_CASE("cached products agree with naive recomputation") {
  const GroupPresentation pres = ads3::standard_presentation();
  const ads3::WordBall ball = ads3::enumerate_ball(pres, 4);
  for (const auto& w : ball.words) {
    const Element want = product_of(pres, w);
    CHECK((w.element.a - want.a).norm() <= 1e-8);
    CHECK((w.element.b - want.b).norm() <= 1e-8);
    // letters stay freely reduced
    for (int i = 0; i + 1 < w.length(); ++i) {
      const bool cancels = w.letters[i].gen == w.letters[i + 1].gen &&
                           w.letters[i].exp == -w.letters[i + 1].exp;
      CHECK_FALSE(cancels);
    }
  }
}

TEST_CASE("numeric coincidences are merged with a count") {
  // gamma = quarter turn in the first factor: gamma^2 = -I = gamma^-2, so the
  // radius-2 ball loses one word to deduplication
  const GroupPresentation quarter(
      {Element::pair(rotation(std::numbers::pi / 2.0),
                     Eigen::Matrix2d::Identity())});
  const ads3::WordBall ball = ads3::enumerate_ball(quarter, 2);
  CHECK(ball.merged_duplicates == 1);
  CHECK(ball.words.size() == 3);

  // duplicate generators collide immediately
  const Eigen::Matrix2d a = diag2(3.0, 1.0 / 3.0);
  const GroupPresentation doubled(
      {Element::pair(a, Eigen::Matrix2d::Identity()),
       Element::pair(a, Eigen::Matrix2d::Identity())});
  const ads3::WordBall dup = ads3::enumerate_ball(doubled, 1);
  CHECK(dup.merged_duplicates == 2);
  CHECK(dup.words.size() == 2);
}

TEST_CASE("word enumeration respects its budget") {
  const GroupPresentation pres = ads3::standard_presentation();
  CHECK_THROWS_AS(ads3::enumerate_ball(pres, 16), budget_error);
  setenv("PSEUDOSPEC_BUDGET", "10", 1);
  CHECK_THROWS_AS(ads3::enumerate_ball(pres, 2), budget_error);
  unsetenv("PSEUDOSPEC_BUDGET");
  CHECK_NOTHROW(ads3::enumerate_ball(pres, 2));
  CHECK_THROWS_AS(ads3::enumerate_ball(pres, 0), input_error);
}

TEST_CASE("stable spectrum at full sharpness") {
  const ads3::StableSpectrum s = ads3::stable_spectrum(1.0, 12);
  CHECK(s.l_min == 10);
  REQUIRE(s.eigenvalues.size() == 3);
  CHECK(s.eigenvalues[0] == 80);
  CHECK(s.eigenvalues[1] == 99);
  CHECK(s.eigenvalues[2] == 120);
}

TEST_CASE("stable spectrum at half sharpness starts at 6240") {
  const ads3::StableSpectrum s = ads3::stable_spectrum(0.5, 81);
  CHECK(s.l_min == 80);
  REQUIRE(s.eigenvalues.size() == 2);
  CHECK(s.eigenvalues[0] == 6240);  // 80 * 78
  CHECK(s.eigenvalues[1] == 81LL * 79LL);
}

TEST_CASE("stable spectrum rejects bad parameters") {
  CHECK_THROWS_AS(ads3::stable_spectrum(1.0, 9), input_error);
  CHECK_THROWS_AS(ads3::stable_spectrum(0.0, 100), input_error);
  CHECK_THROWS_AS(ads3::stable_spectrum(-0.5, 100), input_error);
  CHECK_THROWS_AS(ads3::stable_spectrum(1.5, 100), input_error);
}

TEST_CASE("stable spectrum entries recompute exactly and stay positive") {
  for (double c : {1.0, 0.8, 0.5, 0.31}) {
    const long long l_max = ads3::stable_spectrum(c, 4000).l_min + 25;
    const ads3::StableSpectrum s = ads3::stable_spectrum(c, l_max);
    long long l = s.l_min;
    for (const long long e : s.eigenvalues) {
      CHECK(e == l * (l - 2));
      CHECK(e > 0);
      ++l;
    }
    CHECK(l == l_max + 1);
  }
}

TEST_CASE("stable spectra are monotone in the sharpness constant") {
  const ads3::StableSpectrum narrow = ads3::stable_spectrum(0.6, 200);
  const ads3::StableSpectrum wide = ads3::stable_spectrum(0.9, 200);
  CHECK(wide.l_min <= narrow.l_min);
  const std::set<long long> wide_set(wide.eigenvalues.begin(),
                                     wide.eigenvalues.end());
  for (const long long e : narrow.eigenvalues) CHECK(wide_set.count(e) == 1);
}

TEST_CASE("rank-one orbit counts follow the floor formula") {
  const double t = 0.7;
  const GroupPresentation pres = ads3::rank_one_presentation(t);
  const std::vector<double> radii = {0.5, 1.0, 2.0, 3.0};
  const ads3::OrbitCount oc = ads3::orbit_count(pres, 6, radii);
  REQUIRE(oc.counts.size() == 4);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const auto want =
        static_cast<std::size_t>(2 * std::floor(radii[i] / t) + 1);
    CHECK(oc.counts[i] == want);
  }
  CHECK(oc.complete);
  CHECK(oc.max_mu_norm == doctest::Approx(6 * t).epsilon(1e-9));
}

TEST_CASE("tiny radii count only the identity") {
  const GroupPresentation pres = ads3::standard_presentation();
  const std::vector<double> radii = {0.05, 0.08};
  const ads3::OrbitCount oc = ads3::orbit_count(pres, 2, radii);
  CHECK(oc.counts[0] == 1);
  CHECK(oc.counts[1] == 1);
  CHECK(oc.fit_points == 0);
  CHECK(oc.fitted_slope == 0.0);
}

TEST_CASE("orbit counts are nondecreasing and validate radii") {
  const GroupPresentation pres = ads3::standard_presentation();
  // Ball coverage tops out at 4 log 3 ~ 4.39, reached by the pure power.
  const std::vector<double> radii = {1.5, 2.5, 3.5, 4.3};
  const ads3::OrbitCount oc = ads3::orbit_count(pres, 4, radii);
  for (std::size_t i = 1; i < oc.counts.size(); ++i)
    CHECK(oc.counts[i] >= oc.counts[i - 1]);
  CHECK(oc.complete);

  const std::vector<double> bad = {1.0, 1.0};
  CHECK_THROWS_AS(ads3::orbit_count(pres, 2, bad), input_error);
  const std::vector<double> negative = {-1.0, 2.0};
  CHECK_THROWS_AS(ads3::orbit_count(pres, 2, negative), input_error);
  const std::vector<double> empty;
  CHECK_THROWS_AS(ads3::orbit_count(pres, 2, empty), input_error);
}

TEST_CASE("orbit counts flag incompleteness honestly") {
  const GroupPresentation pres = ads3::standard_presentation();
  const std::vector<double> radii = {1.5, 40.0};
  const ads3::OrbitCount oc = ads3::orbit_count(pres, 2, radii);
  CHECK_FALSE(oc.complete);
  CHECK(oc.max_mu_norm < 40.0);
}

TEST_CASE("orbit counts are invariant under orthogonal conjugation") {
  const GroupPresentation pres = ads3::standard_presentation();
  const Eigen::Matrix2d k1 = rotation(0.37);
  const Eigen::Matrix2d k2 = rotation(-1.21);
  std::vector<Element> conj;
  for (const auto& g : pres.generators())
    conj.push_back(Element::pair(k1 * g.a * k1.transpose(),
                                 k2 * g.b * k2.transpose()));
  const GroupPresentation moved(conj);
  const std::vector<double> radii = {1.5, 2.5, 3.5};
  const ads3::OrbitCount a = ads3::orbit_count(pres, 4, radii);
  const ads3::OrbitCount b = ads3::orbit_count(moved, 4, radii);
  REQUIRE(a.counts.size() == b.counts.size());
  for (std::size_t i = 0; i < a.counts.size(); ++i)
    CHECK(a.counts[i] == b.counts[i]);
  CHECK(a.fitted_slope == doctest::Approx(b.fitted_slope).epsilon(1e-9));
}

TEST_CASE("rank-two orbit growth respects the sharpness bound") {
  const GroupPresentation pres = ads3::standard_presentation();
  const ads3::WordBall ball = ads3::enumerate_ball(pres, 5);
  std::vector<Element> elems;
  for (const auto& w : ball.words) elems.push_back(w.element);
  const auto est = cartan::estimate_sharpness(
      cartan::AmbientGroup::sl2_pair(), elems,
      cartan::diagonal_ray(cartan::AmbientGroup::sl2_pair()));
  CHECK(est.C >= 0.6);
  CHECK(est.C <= 0.75);  // first-factor groups sit at 1/sqrt(2)

  const std::vector<double> radii = {1.5, 2.5, 3.5, 4.5, 5.4};
  const ads3::OrbitCount oc = ads3::orbit_count(pres, 5, radii);
  CHECK(oc.fit_points >= 4);
  CHECK(oc.fitted_slope <= 1.0 / est.C + 0.2);
}

TEST_CASE("poincare sums of the cyclic group match the geometric series") {
  const double t = 0.8, a = 1.5;  // decay above 1/C_est = sqrt(2)
  const GroupPresentation pres = ads3::rank_one_presentation(t);
  const std::vector<int> schedule = {2, 4, 8, 16};
  const ads3::PoincareSums ps =
      ads3::poincare_partial_sums(pres, a, schedule);
  REQUIRE(ps.rows.size() == 4);
  const double r = std::exp(-a * t);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const int big_l = schedule[i];
    const double want = 1.0 + 2.0 * r * (1.0 - std::pow(r, big_l)) / (1.0 - r);
    CHECK(ps.rows[i].partial_sum == doctest::Approx(want).epsilon(1e-10));
  }
  // the tail vanishes towards the closed-form limit
  const double limit = 1.0 + 2.0 * r / (1.0 - r);
  CHECK(std::abs(ps.rows.back().partial_sum - limit) <= 1e-6);
  CHECK(ps.decay_rate == a);
  CHECK_FALSE(ps.expected_divergent);  // a = 1.5 beats 1/c_est = sqrt(2) here
}

TEST_CASE("zero decay turns poincare sums into word counts") {
  const GroupPresentation pres = ads3::standard_presentation();
  const std::vector<int> schedule = {1, 2, 3};
  const ads3::PoincareSums ps =
      ads3::poincare_partial_sums(pres, 0.0, schedule);
  long long cum = 1;  // identity
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    cum = 1;
    for (int l = 1; l <= schedule[i]; ++l) cum += reduced_words_at(2, l);
    CHECK(ps.rows[i].partial_sum == doctest::Approx(double(cum)).epsilon(1e-12));
  }
  CHECK(ps.expected_divergent);  // zero decay cannot converge
}

TEST_CASE("fast decay gives shrinking increments for the free group") {
  const GroupPresentation pres = ads3::standard_presentation();
  const std::vector<int> schedule = {2, 3, 4, 5};
  const ads3::PoincareSums ps =
      ads3::poincare_partial_sums(pres, 3.0 * std::sqrt(2.0), schedule);
  for (std::size_t i = 1; i < ps.rows.size(); ++i) {
    CHECK(ps.rows[i].increment < ps.rows[i - 1].increment);
    CHECK(ps.rows[i].increment >= 0.0);
  }
  CHECK_FALSE(ps.expected_divergent);
}

TEST_CASE("poincare schedule validation") {
  const GroupPresentation pres = ads3::standard_presentation();
  const std::vector<int> empty;
  CHECK_THROWS_AS(ads3::poincare_partial_sums(pres, 1.0, empty), input_error);
  const std::vector<int> decreasing = {3, 2};
  CHECK_THROWS_AS(ads3::poincare_partial_sums(pres, 1.0, decreasing),
                  input_error);
  const std::vector<int> schedule = {1, 2};
  CHECK_THROWS_AS(ads3::poincare_partial_sums(pres, -1.0, schedule),
                  input_error);
}

TEST_CASE("zero perturbation reproduces the unperturbed constant exactly") {
  const GroupPresentation pres = ads3::standard_presentation();
  const ads3::StabilityExperiment ex =
      ads3::stability_experiment(pres, 0.0, 2, 3, 20, 99u);
  CHECK(ex.min_c == ex.unperturbed_c);
  for (const double c : ex.sample_cs) CHECK(c == ex.unperturbed_c);
}

TEST_CASE("small deformations keep the spectrum stable") {
  const GroupPresentation pres = ads3::standard_presentation();
  const ads3::StabilityExperiment ex =
      ads3::stability_experiment(pres, 1e-3, 6, 4, 40, 1234u);
  CHECK(ex.all_proper_on_sample);
  CHECK(std::abs(ex.min_c - ex.unperturbed_c) <= 0.2 * ex.unperturbed_c);
  REQUIRE(!ex.common_spectrum.empty());
  const long long l0 = ex.common_spectrum.front().first;
  CHECK(l0 == ads3::stable_spectrum(ex.min_c, l0 + 1).l_min);
  for (const auto& [l, e] : ex.common_spectrum) CHECK(e == l * (l - 2));
}

TEST_CASE("stability experiments are reproducible and self-consistent") {
  const GroupPresentation pres = ads3::standard_presentation();
  const ads3::StabilityExperiment a =
      ads3::stability_experiment(pres, 5e-3, 4, 3, 30, 7u);
  const ads3::StabilityExperiment b =
      ads3::stability_experiment(pres, 5e-3, 4, 3, 30, 7u);
  REQUIRE(a.sample_cs.size() == b.sample_cs.size());
  for (std::size_t i = 0; i < a.sample_cs.size(); ++i)
    CHECK(a.sample_cs[i] == b.sample_cs[i]);
  double lo = std::numeric_limits<double>::infinity();
  bool proper = true;
  for (const double c : a.sample_cs) {
    lo = std::min(lo, c);
    proper = proper && c >= ads3::kPropernessFloorC;
  }
  CHECK(a.min_c == lo);
  CHECK(a.all_proper_on_sample == proper);
  CHECK_THROWS_AS(ads3::stability_experiment(pres, 1e-3, 1, 3, 30, 7u),
                  input_error);
}
