#include "pseudospec/quadform.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace pseudospec {

std::int64_t enumeration_budget(std::int64_t fallback) {
  if (const char* raw = std::getenv("PSEUDOSPEC_BUDGET")) {
    char* end = nullptr;
    const long long parsed = std::strtoll(raw, &end, 10);
    if (end && *end == '\0' && parsed > 0) return parsed;
    throw input_error("PSEUDOSPEC_BUDGET must be a positive integer, got '" +
                      std::string(raw) + "'");
  }
  return fallback;
}

}  // namespace pseudospec

namespace pseudospec::quadform {

namespace {

void require_finite(const Eigen::MatrixXd& a, const char* who) {
  if (!a.allFinite())
    throw input_error(std::string(who) + ": matrix has non-finite entries");
}

// Last continued-fraction convergent of x with denominator <= bound.
struct Rational {
  std::int64_t p = 0;
  std::int64_t q = 1;
};

Rational best_convergent(double x, std::int64_t bound) {
  const std::int64_t sign = x < 0 ? -1 : 1;
  long double rest = std::abs(static_cast<long double>(x));
  std::int64_t h_prev = 1, k_prev = 0;      // h_{-1}, k_{-1}
  std::int64_t h_prev2 = 0, k_prev2 = 1;    // h_{-2}, k_{-2}
  Rational out{0, 1};
  for (int step = 0; step < 48; ++step) {
    const long double fl = std::floor(rest);
    if (fl > static_cast<long double>(bound) * 2 + 2) break;  // overflow guard
    const std::int64_t a = static_cast<std::int64_t>(fl);
    const std::int64_t h = a * h_prev + h_prev2;
    const std::int64_t k = a * k_prev + k_prev2;
    if (k > bound) break;
    out = {h, k};
    h_prev2 = h_prev;
    k_prev2 = k_prev;
    h_prev = h;
    k_prev = k;
    const long double frac = rest - fl;
    if (frac < 1e-18L) break;  // exact
    rest = 1.0L / frac;
  }
  out.p *= sign;
  return out;
}

}  // namespace

QuadraticForm::QuadraticForm(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw input_error("quadratic form matrix must be square and nonempty");
  require_finite(a, "quadratic form");
  matrix_ = 0.5 * (a + a.transpose());
}

double evaluate(const QuadraticForm& form, const LatticePoint& m) {
  const int n = form.dim();
  if (m.size() != n) {
    std::ostringstream msg;
    msg << "lattice point dimension " << m.size()
        << " does not match form dimension " << n;
    throw input_error(msg.str());
  }
  const Eigen::MatrixXd& s = form.matrix();
  long double acc = 0.0L;
  for (int i = 0; i < n; ++i) {
    const long double mi = static_cast<long double>(m(i));
    for (int j = 0; j < n; ++j)
      acc += static_cast<long double>(s(i, j)) * mi *
             static_cast<long double>(m(j));
  }
  return static_cast<double>(acc);
}

Signature signature_of(const QuadraticForm& form, double tol) {
  if (!(tol > 0.0)) throw input_error("signature tolerance must be positive");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(form.matrix(),
                                                        Eigen::EigenvaluesOnly);
  Signature sig;
  for (int i = 0; i < form.dim(); ++i) {
    const double lam = solver.eigenvalues()(i);
    if (lam > tol)
      ++sig.p;
    else if (lam < -tol)
      ++sig.q;
    else
      ++sig.z;
  }
  return sig;
}

Eigen::MatrixXd standard_form_matrix(const Signature& sig) {
  const int n = sig.dim();
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = i < sig.p ? 1.0 : (i < sig.p + sig.q ? -1.0 : 0.0);
  return d.asDiagonal();
}

QuadraticForm deformed_form(const Eigen::MatrixXd& g, const Signature& sig,
                            double* condition_out) {
  if (g.rows() != g.cols() || g.rows() < 1)
    throw input_error("deformation must be a square matrix");
  require_finite(g, "deformation");
  const int n = static_cast<int>(g.rows());
  if (sig.z != 0)
    throw input_error("deformed form needs a nondegenerate signature (z = 0)");
  if (sig.p + sig.q != n) {
    std::ostringstream msg;
    msg << "signature (" << sig.p << "," << sig.q << ") does not fill dimension "
        << n;
    throw input_error(msg.str());
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  const Eigen::VectorXd& sv = svd.singularValues();
  // relative volume collapse: product of sigma_i / sigma_1 under 1e-12
  long double rel = 1.0L;
  for (int i = 0; i < n; ++i) rel *= static_cast<long double>(sv(i) / sv(0));
  if (!(rel > 1e-12L))
    throw singular_error("deformation is numerically singular");
  if (condition_out) *condition_out = sv(0) / sv(n - 1);

  const Eigen::MatrixXd binv =
      g.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd s =
      binv * standard_form_matrix(sig) * binv.transpose();
  return QuadraticForm(s);
}

std::optional<IntegerProportionality> integer_proportionality(
    const QuadraticForm& form, std::int64_t search_bound, double tol) {
  if (search_bound < 1)
    throw input_error("proportionality search bound must be >= 1");
  if (!(tol > 0.0)) throw input_error("proportionality tolerance must be positive");

  const Eigen::MatrixXd& s = form.matrix();
  const int n = form.dim();
  if (s.cwiseAbs().maxCoeff() == 0.0) {
    IntegerProportionality cert;
    cert.scale = 1.0;
    cert.matrix = Eigen::MatrixXi::Zero(n, n);
    return cert;
  }
  Eigen::Index r0 = 0, c0 = 0;
  s.cwiseAbs().maxCoeff(&r0, &c0);
  const double ref = s(r0, c0);

  // common denominator from the per-entry convergents
  std::int64_t denom = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Rational r = best_convergent(s(i, j) / ref, search_bound);
      denom = denom / std::gcd(denom, r.q) * r.q;
      if (denom > search_bound) return std::nullopt;
    }

  Eigen::MatrixXi a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const long long v =
          std::llround(s(i, j) / ref * static_cast<double>(denom));
      if (std::llabs(v) > search_bound) return std::nullopt;
      a(i, j) = static_cast<int>(v);
    }

  double lambda = ref / static_cast<double>(denom);
  if ((lambda * a.cast<double>() - s).cwiseAbs().maxCoeff() > tol)
    return std::nullopt;

  std::int64_t common = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      common = std::gcd(common, static_cast<std::int64_t>(std::abs(a(i, j))));
  if (common > 1) {
    a /= static_cast<int>(common);
    lambda *= static_cast<double>(common);
  }
  if (lambda < 0.0) {
    lambda = -lambda;
    a = -a;
  }
  IntegerProportionality cert;
  cert.scale = lambda;
  cert.matrix = a;
  return cert;
}

}  // namespace pseudospec::quadform
