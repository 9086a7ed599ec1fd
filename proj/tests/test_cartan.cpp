#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "pseudospec/cartan.hpp"

using namespace pseudospec;
using cartan::AmbientGroup;
using cartan::CartanVector;
using cartan::ConeSubset;
using cartan::Element;

namespace {

const double kSqrt2 = std::sqrt(2.0);

Eigen::Matrix2d rotation(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

Eigen::Matrix2d hyperbolic2(double t) {
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
  a(0, 0) = std::exp(t);
  a(1, 1) = std::exp(-t);
  return a;
}

// Haar-ish special orthogonal matrix: QR of a Gaussian with the sign of the
// determinant repaired by a column flip.
Eigen::MatrixXd random_rotation(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

Eigen::MatrixXd random_sl(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
    double det = m.determinant();
    if (std::abs(det) < 0.1) continue;
    if (det < 0) {
      m.row(0).swap(m.row(1));
      det = -det;
    }
    return m / std::pow(det, 1.0 / n);
  }
}

Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

// Independent plane oracle: distance from v to the hull of generator rays,
// via inside tests on generator pairs and projections onto single rays.
double ray_distance(const Eigen::Vector2d& v, const Eigen::Vector2d& g) {
  const Eigen::Vector2d unit = g.normalized();
  const double along = v.dot(unit);
  if (along <= 0.0) return v.norm();
  return (v - along * unit).norm();
}

double plane_cone_distance(const Eigen::Vector2d& v,
                           const std::vector<Eigen::Vector2d>& gens) {
  if (gens.empty()) return v.norm();
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      Eigen::Matrix2d m;
      m.col(0) = gens[i];
      m.col(1) = gens[j];
      if (std::abs(m.determinant()) < 1e-12) continue;
      const Eigen::Vector2d c = m.inverse() * v;
      if (c(0) >= -1e-12 && c(1) >= -1e-12) return 0.0;
    }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : gens) best = std::min(best, ray_distance(v, g));
  return best;
}

}  // namespace

TEST_CASE("identity projects to the chamber origin") {
  for (int n : {2, 3, 4}) {
    const CartanVector mu = cartan::cartan_projection(
        AmbientGroup::sl(n), Element::sl(Eigen::MatrixXd::Identity(n, n)));
    CHECK(mu.coords.norm() <= 1e-12);
  }
  const CartanVector mu = cartan::cartan_projection(
      AmbientGroup::sl2_pair(),
      Element::pair(Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity()));
  CHECK(mu.coords.norm() <= 1e-12);
}

TEST_CASE("diagonal hyperbolic elements recover their own exponent") {
  for (double t : {0.25, 1.0, 3.0}) {
    const CartanVector mu = cartan::cartan_projection(
        AmbientGroup::sl(2), Element::sl(hyperbolic2(t)));
    REQUIRE(mu.coords.size() == 2);
    CHECK(mu.coords(0) == doctest::Approx(t).epsilon(1e-12));
    CHECK(mu.coords(1) == doctest::Approx(-t).epsilon(1e-12));
  }
}

TEST_CASE("projection recovers the middle factor of a KAK assembly") {
  std::mt19937_64 rng(31u);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd t(n);
      for (int i = 0; i < n; ++i) t(i) = u(rng);
      std::sort(t.data(), t.data() + n, std::greater<double>());
      t.array() -= t.mean();  // traceless, sorted descending
      const Eigen::MatrixXd a = t.array().exp().matrix().asDiagonal();
      const Eigen::MatrixXd g =
          random_rotation(n, rng) * a * random_rotation(n, rng);
      const CartanVector mu =
          cartan::cartan_projection(AmbientGroup::sl(n), Element::sl(g));
      CHECK((mu.coords - t).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("product group projects each factor to its top exponent") {
  const CartanVector mu = cartan::cartan_projection(
      AmbientGroup::sl2_pair(),
      Element::pair(hyperbolic2(0.7), rotation(1.1) * hyperbolic2(1.4)));
  CHECK(mu.coords(0) == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(mu.coords(1) == doctest::Approx(1.4).epsilon(1e-10));
  CHECK(mu.coords(0) >= 0.0);
  CHECK(mu.coords(1) >= 0.0);
}

TEST_CASE("projection rejects determinant drift and bad shapes") {
  CHECK_THROWS_AS(
      cartan::cartan_projection(
          AmbientGroup::sl(2),
          Element::sl(1.001 * Eigen::Matrix2d::Identity())),
      input_error);
  Eigen::Matrix2d nan2 = Eigen::Matrix2d::Identity();
  nan2(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(
      cartan::cartan_projection(AmbientGroup::sl(2), Element::sl(nan2)),
      input_error);
  CHECK_THROWS_AS(
      cartan::cartan_projection(AmbientGroup::sl(3),
                                Element::sl(Eigen::Matrix2d::Identity())),
      input_error);
  CHECK_THROWS_AS(
      cartan::cartan_projection(
          AmbientGroup::sl2_pair(),
          Element::pair(Eigen::Matrix2d::Identity(),
                        1.01 * Eigen::Matrix2d::Identity())),
      input_error);
  // drift below the tolerance is renormalized, not rejected
  const double eps = 1e-7;
  const CartanVector mu = cartan::cartan_projection(
      AmbientGroup::sl(2),
      Element::sl((1.0 + eps) * hyperbolic2(1.0)));
  CHECK(std::abs(mu.coords.sum()) <= 1e-12);
  CHECK(mu.coords(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("projection is bi-K invariant") {
  std::mt19937_64 rng(32u);
  std::uniform_real_distribution<double> angle(0.0, 6.28318);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 8; ++trial) {
      const Eigen::MatrixXd g = random_sl(n, rng);
      const Eigen::MatrixXd moved =
          random_rotation(n, rng) * g * random_rotation(n, rng);
      const CartanVector a =
          cartan::cartan_projection(AmbientGroup::sl(n), Element::sl(g));
      const CartanVector b =
          cartan::cartan_projection(AmbientGroup::sl(n), Element::sl(moved));
      CHECK((a.coords - b.coords).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::Matrix2d g1 = random_sl(2, rng);
    const Eigen::Matrix2d g2 = random_sl(2, rng);
    const CartanVector a = cartan::cartan_projection(AmbientGroup::sl2_pair(),
                                                     Element::pair(g1, g2));
    const CartanVector b = cartan::cartan_projection(
        AmbientGroup::sl2_pair(),
        Element::pair(rotation(angle(rng)) * g1 * rotation(angle(rng)),
                      rotation(angle(rng)) * g2 * rotation(angle(rng))));
    CHECK((a.coords - b.coords).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("inverse preserves the Cartan norm") {
  std::mt19937_64 rng(33u);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 8; ++trial) {
      const Eigen::MatrixXd g = random_sl(n, rng);
      const CartanVector a =
          cartan::cartan_projection(AmbientGroup::sl(n), Element::sl(g));
      const CartanVector b = cartan::cartan_projection(
          AmbientGroup::sl(n), Element::sl(g.inverse()));
      CHECK(a.norm() == doctest::Approx(b.norm()).epsilon(1e-8));
    }
  }
  const Eigen::Matrix2d g1 = random_sl(2, rng);
  const Eigen::Matrix2d g2 = random_sl(2, rng);
  const CartanVector a = cartan::cartan_projection(AmbientGroup::sl2_pair(),
                                                   Element::pair(g1, g2));
  const CartanVector b = cartan::cartan_projection(
      AmbientGroup::sl2_pair(), Element::pair(g1.inverse(), g2.inverse()));
  CHECK(a.norm() == doctest::Approx(b.norm()).epsilon(1e-8));
}

TEST_CASE("powers of a symmetric hyperbolic element grow linearly") {
  Eigen::Matrix2d a;
  a << 2.0, 1.0, 1.0, 1.0;  // det 1, eigenvalues (3 +/- sqrt 5)/2
  const double step = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  Eigen::Matrix2d power = Eigen::Matrix2d::Identity();
  double prev_top = 0.0;
  for (int k = 1; k <= 12; ++k) {
    power = power * a;
    const CartanVector mu = cartan::cartan_projection(AmbientGroup::sl(2),
                                                      Element::sl(power));
    CHECK(mu.coords(0) - prev_top == doctest::Approx(step).epsilon(1e-6));
    prev_top = mu.coords(0);
  }
}

TEST_CASE("cone generators must live in the closed chamber") {
  const AmbientGroup pair = AmbientGroup::sl2_pair();
  CHECK_NOTHROW(ConeSubset(pair, {vec2(1.0, 1.0)}));
  CHECK_THROWS_AS(ConeSubset(pair, {vec2(-1.0, 0.5)}), input_error);
  CHECK_THROWS_AS(ConeSubset(pair, {vec2(0.0, 0.0)}), input_error);
  CHECK_THROWS_AS(ConeSubset(pair, {Eigen::VectorXd::Ones(3)}), input_error);

  const AmbientGroup sl3 = AmbientGroup::sl(3);
  Eigen::VectorXd chamber3(3);
  chamber3 << 1.0, 0.0, -1.0;
  CHECK_NOTHROW(ConeSubset(sl3, {chamber3}));
  Eigen::VectorXd ascending(3);
  ascending << -1.0, 0.0, 1.0;  // sorted the wrong way
  CHECK_THROWS_AS(ConeSubset(sl3, {ascending}), input_error);
  Eigen::VectorXd drift(3);
  drift << 1.0, 0.5, -1.0;  // sum != 0
  CHECK_THROWS_AS(ConeSubset(sl3, {drift}), input_error);
}

TEST_CASE("distance to the diagonal ray matches the plane formula") {
  const ConeSubset diag = cartan::diagonal_ray(AmbientGroup::sl2_pair());
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    CHECK(cartan::distance_to_cone(vec2(t, 0.0), diag) ==
          doctest::Approx(t / kSqrt2).epsilon(1e-12));
  }
  CHECK(cartan::distance_to_cone(vec2(0.0, 0.0), diag) == 0.0);
}

TEST_CASE("distance to the trivial cone is the norm") {
  const ConeSubset zero(AmbientGroup::sl2_pair(), {});
  std::mt19937_64 rng(34u);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd v = vec2(u(rng), u(rng));
    CHECK(cartan::distance_to_cone(v, zero) ==
          doctest::Approx(v.norm()).epsilon(1e-12));
  }
}

TEST_CASE("points of the cone have distance zero and others do not") {
  std::mt19937_64 rng(35u);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const ConeSubset cone(AmbientGroup::sl2_pair(),
                        {vec2(1.0, 0.2), vec2(0.3, 1.0)});
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::VectorXd inside =
        u(rng) * vec2(1.0, 0.2) + u(rng) * vec2(0.3, 1.0);
    CHECK(cartan::distance_to_cone(inside, cone) <= 1e-9);
  }
  CHECK(cartan::distance_to_cone(vec2(1.0, 0.0), cone) > 1e-3);
  CHECK(cartan::distance_to_cone(vec2(0.0, 1.0), cone) > 1e-3);
}

TEST_CASE("cone distance agrees with an independent plane oracle") {
  std::mt19937_64 rng(36u);
  std::uniform_real_distribution<double> coord(0.0, 2.0);
  std::uniform_real_distribution<double> point(-1.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Eigen::VectorXd> gens;
    std::vector<Eigen::Vector2d> gens2;
    const int count = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < count; ++i) {
      Eigen::Vector2d g(coord(rng), coord(rng));
      if (g.norm() < 0.1) g << 1.0, 0.5;
      gens.push_back(g);
      gens2.push_back(g);
    }
    const ConeSubset cone(AmbientGroup::sl2_pair(), gens);
    // probe points may leave the chamber; the vector overload allows that
    const Eigen::Vector2d v(point(rng), point(rng));
    const double got = cartan::distance_to_cone(Eigen::VectorXd(v), cone);
    const double want = plane_cone_distance(v, gens2);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("distinct rays in the plane give a proper pair") {
  const AmbientGroup pair = AmbientGroup::sl2_pair();
  const auto res = cartan::properness_check(cartan::first_axis_ray(pair),
                                            cartan::diagonal_ray(pair));
  CHECK(res.verdict == cartan::PropernessVerdict::Proper);
  CHECK(res.min_probe_distance > 1e-3);
}

TEST_CASE("a shared ray is detected with the expected witness") {
  const AmbientGroup pair = AmbientGroup::sl2_pair();
  const auto res = cartan::properness_check(cartan::diagonal_ray(pair),
                                            cartan::diagonal_ray(pair));
  REQUIRE(res.verdict == cartan::PropernessVerdict::NotProper);
  REQUIRE(res.witness.has_value());
  CHECK((*res.witness - vec2(1.0, 1.0)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("full chamber swallows every ray") {
  const AmbientGroup pair = AmbientGroup::sl2_pair();
  const auto res = cartan::properness_check(cartan::first_axis_ray(pair),
                                            cartan::full_chamber(pair));
  REQUIRE(res.verdict == cartan::PropernessVerdict::NotProper);
  REQUIRE(res.witness.has_value());
  CHECK(res.witness->norm() > 1e-9);
  // the common direction really lies in both cones
  CHECK(cartan::distance_to_cone(*res.witness,
                                 cartan::first_axis_ray(pair)) <= 1e-9);
  CHECK(cartan::distance_to_cone(*res.witness, cartan::full_chamber(pair)) <=
        1e-9);
}

TEST_CASE("nearly touching rays are flagged as boundary") {
  const AmbientGroup pair = AmbientGroup::sl2_pair();
  const ConeSubset tilted(pair, {vec2(1.0, 1e-10)});
  const auto res =
      cartan::properness_check(tilted, cartan::first_axis_ray(pair));
  CHECK(res.verdict == cartan::PropernessVerdict::Boundary);
  CHECK(res.min_probe_distance < 1e-9);
  CHECK(res.witness.has_value());
}

TEST_CASE("first-factor words give sharpness constant 1/sqrt(2)") {
  const AmbientGroup pair = AmbientGroup::sl2_pair();
  std::vector<Element> words = {
      Element::pair(hyperbolic2(1.0), Eigen::Matrix2d::Identity())};
  const auto est = cartan::estimate_sharpness(pair, words,
                                              cartan::diagonal_ray(pair));
  CHECK(est.C == doctest::Approx(1.0 / kSqrt2).epsilon(1e-12));
  CHECK(est.c_prime == 0.0);
  CHECK(est.samples == 1);
  CHECK(est.skipped == 0);
  CHECK(est.sharp);
  REQUIRE(est.pareto.size() == 4);
  CHECK(est.pareto[0].first == 0.0);
  CHECK(est.pareto[0].second == doctest::Approx(1.0 / kSqrt2).epsilon(1e-12));
}

TEST_CASE("words on the reference cone collapse to the not-sharp floor") {
  const AmbientGroup pair = AmbientGroup::sl2_pair();
  std::vector<Element> words = {
      Element::pair(hyperbolic2(0.8), hyperbolic2(0.8)),
      Element::pair(hyperbolic2(1.6), hyperbolic2(1.6))};
  const auto est = cartan::estimate_sharpness(pair, words,
                                              cartan::diagonal_ray(pair));
  CHECK_FALSE(est.sharp);
  CHECK(est.C == cartan::kSharpnessFloor);
  CHECK(est.samples == 2);
}

TEST_CASE("mixed samples reproduce the independent minimum ratio") {
  const AmbientGroup pair = AmbientGroup::sl2_pair();
  std::mt19937_64 rng(37u);
  std::uniform_real_distribution<double> t(0.2, 2.0);
  std::uniform_real_distribution<double> angle(0.0, 6.28318);
  std::vector<Element> words;
  std::vector<Eigen::Vector2d> mus;
  for (int i = 0; i < 12; ++i) {
    const double t1 = t(rng), t2 = t(rng);
    words.push_back(Element::pair(
        rotation(angle(rng)) * hyperbolic2(t1) * rotation(angle(rng)),
        rotation(angle(rng)) * hyperbolic2(t2) * rotation(angle(rng))));
    mus.emplace_back(t1, t2);
  }
  words.push_back(Element::pair(rotation(0.3), rotation(1.2)));  // elliptic
  const auto est = cartan::estimate_sharpness(pair, words,
                                              cartan::diagonal_ray(pair));
  CHECK(est.samples == 12);
  CHECK(est.skipped == 1);
  double want = std::numeric_limits<double>::infinity();
  const std::vector<Eigen::Vector2d> diag = {Eigen::Vector2d(1.0, 1.0)};
  for (const auto& mu : mus)
    want = std::min(want, plane_cone_distance(mu, diag) / mu.norm());
  CHECK(est.C == doctest::Approx(std::min(want, 1.0)).epsilon(1e-6));
  // the certifying inequality holds on every contributing word
  for (const auto& mu : mus) {
    const double d = plane_cone_distance(mu, diag);
    CHECK(d >= est.C * mu.norm() - est.c_prime - 1e-6);
  }
}

TEST_CASE("pareto pairs relax monotonically") {
  const AmbientGroup pair = AmbientGroup::sl2_pair();
  std::vector<Element> words = {
      Element::pair(hyperbolic2(1.0), hyperbolic2(0.2)),
      Element::pair(hyperbolic2(0.4), Eigen::Matrix2d::Identity())};
  const auto est = cartan::estimate_sharpness(pair, words,
                                              cartan::diagonal_ray(pair));
  REQUIRE(est.pareto.size() == 4);
  for (std::size_t i = 1; i < est.pareto.size(); ++i) {
    CHECK(est.pareto[i].first > est.pareto[i - 1].first);
    CHECK(est.pareto[i].second >= est.pareto[i - 1].second);
    CHECK(est.pareto[i].second <= 1.0);
  }
}

TEST_CASE("sharpness estimation requires usable words") {
  const AmbientGroup pair = AmbientGroup::sl2_pair();
  std::vector<Element> none;
  CHECK_THROWS_AS(
      cartan::estimate_sharpness(pair, none, cartan::diagonal_ray(pair)),
      input_error);
  std::vector<Element> elliptic = {
      Element::pair(rotation(0.5), rotation(0.25)),
      Element::pair(Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity())};
  CHECK_THROWS_AS(
      cartan::estimate_sharpness(pair, elliptic, cartan::diagonal_ray(pair)),
      input_error);
}
