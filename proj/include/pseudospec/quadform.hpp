#pragma once

#include <Eigen/Dense>
#include <optional>

#include "pseudospec/errors.hpp"

namespace pseudospec::quadform {

// Inertia counts of a symmetric bilinear form.
struct Signature {
  int p = 0;  // positive eigenvalues
  int q = 0;  // negative eigenvalues
  int z = 0;  // zeros within tolerance

  int dim() const { return p + q + z; }
  bool indefinite() const { return p > 0 && q > 0; }
  bool definite() const { return z == 0 && (p == 0 || q == 0); }
};

// Symmetric real form; the stored matrix is exactly symmetric because the
// constructor averages A with its transpose.
class QuadraticForm {
 public:
  explicit QuadraticForm(const Eigen::MatrixXd& a);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
};

using LatticePoint = Eigen::VectorXi;

// t(m) S m with long-double accumulation so the rounding error stays within
// a few ulp of the exact integer-weighted sum.
double evaluate(const QuadraticForm& form, const LatticePoint& m);

// Inertia of the form; eigenvalues within tol of zero count as z.
Signature signature_of(const QuadraticForm& form, double tol = 1e-12);

// diag(+1 x p, -1 x q).
Eigen::MatrixXd standard_form_matrix(const Signature& sig);

// Pull-back g^{-1} I_{p,q} t(g^{-1}) of the standard form under the column
// deformation g, symmetrized. Requires sig.z == 0 and sig.dim() == g rows.
// When condition_out is non-null it receives sigma_max/sigma_min of g.
QuadraticForm deformed_form(const Eigen::MatrixXd& g, const Signature& sig,
                            double* condition_out = nullptr);

struct IntegerProportionality {
  double scale = 1.0;      // positive by convention
  Eigen::MatrixXi matrix;  // entries collectively coprime
};

// Searches for lambda and integer A with |lambda*A - S|_inf <= tol and
// |A_ij| <= search_bound. Denominator candidates come from continued-fraction
// convergents of each entry ratio against the largest-magnitude entry; the
// assembled candidate is verified globally, so a returned certificate is
// always genuine while absence only means absence up to the bound.
std::optional<IntegerProportionality> integer_proportionality(
    const QuadraticForm& form, std::int64_t search_bound = 1'000'000,
    double tol = 1e-9);

}  // namespace pseudospec::quadform
