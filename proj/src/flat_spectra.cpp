#include "pseudospec/flat_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "pseudospec/detail/format.hpp"

namespace pseudospec::flat {

namespace {

using detail::fmt;

constexpr double kPi = std::numbers::pi_v<double>;
const double kFourPiSq = 4.0 * kPi * kPi;

bool lex_less(const quadform::LatticePoint& a, const quadform::LatticePoint& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

double value_of(const quadform::QuadraticForm& s,
                const quadform::LatticePoint& m) {
  double v = -kFourPiSq * quadform::evaluate(s, m);
  if (v == 0.0) v = 0.0;  // fold -0 into +0 so reports never print "-0"
  return v;
}

// (2r+1)^n without overflow, checked against the budget.
void check_box_budget(int box_radius, int n, std::int64_t budget) {
  const long double side = 2.0L * box_radius + 1.0L;
  long double count = 1.0L;
  for (int k = 0; k < n; ++k) count *= side;
  if (count > static_cast<long double>(budget))
    throw budget_error(
        fmt("lattice box (2*%d+1)^%d has %.4Lg points, over the budget of "
            "%lld; shrink box_radius or raise PSEUDOSPEC_BUDGET",
            box_radius, n, count, static_cast<long long>(budget)));
}

// Advances m through the sup-norm box like an odometer; false once exhausted.
bool advance(quadform::LatticePoint& m, int radius) {
  for (int k = 0; k < m.size(); ++k) {
    if (m(k) < radius) {
      ++m(k);
      return true;
    }
    m(k) = -radius;
  }
  return false;
}

void check_window(const SpectrumWindow& w) {
  if (!(w.lambda_min <= w.lambda_max))
    throw input_error(fmt("window is inverted: lambda_min=%g > lambda_max=%g",
                          w.lambda_min, w.lambda_max));
  if (w.box_radius < 1)
    throw input_error(fmt("box_radius must be >= 1, got %d", w.box_radius));
}

}  // namespace

DeformationParameter::DeformationParameter(const Eigen::MatrixXd& g_in,
                                           const quadform::Signature& sig)
    : g(g_in), signature(sig) {
  if (g.rows() == 0 || g.rows() != g.cols())
    throw input_error(fmt("deformation matrix must be square, got %ldx%ld",
                          static_cast<long>(g.rows()),
                          static_cast<long>(g.cols())));
  if (!g.allFinite())
    throw input_error("deformation matrix has non-finite entries");
  if (sig.dim() != g.rows())
    throw input_error(fmt("signature (%d,%d,%d) does not match dimension %ld",
                          sig.p, sig.q, sig.z, static_cast<long>(g.rows())));
}

double eigenvalue_of(const DeformationParameter& param,
                     const quadform::LatticePoint& m) {
  if (m.size() != param.dim())
    throw input_error(fmt("lattice point has %ld coordinates, expected %d",
                          static_cast<long>(m.size()), param.dim()));
  return value_of(quadform::deformed_form(param.g, param.signature), m);
}

SpectrumSample enumerate_spectrum(const DeformationParameter& param,
                                  const SpectrumWindow& window,
                                  const EnumerationOptions& opts) {
  check_window(window);
  if (opts.dedupe_tol < 0.0)
    throw input_error("dedupe_tol must be nonnegative");
  const int n = param.dim();
  const std::int64_t budget =
      opts.budget > 0 ? opts.budget : enumeration_budget();
  check_box_budget(window.box_radius, n, budget);

  const quadform::QuadraticForm s =
      quadform::deformed_form(param.g, param.signature);

  std::vector<std::pair<double, quadform::LatticePoint>> hits;
  quadform::LatticePoint m =
      quadform::LatticePoint::Constant(n, -window.box_radius);
  do {
    const double v = value_of(s, m);
    if (v >= window.lambda_min && v <= window.lambda_max) hits.emplace_back(v, m);
  } while (advance(m, window.box_radius));

  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return lex_less(a.second, b.second);
  });

  SpectrumSample out;
  out.window = window;
  for (auto& [v, w] : hits) {
    if (out.entries.empty() ||
        v - out.entries.back().eigenvalue > opts.dedupe_tol) {
      out.entries.push_back(SpectrumEntry{v, {}});
    }
    out.entries.back().witnesses.push_back(std::move(w));
  }
  for (auto& e : out.entries)  // cluster members were ordered by value first
    std::sort(e.witnesses.begin(), e.witnesses.end(), lex_less);

  // For a definite form no point outside the box can reach back into the
  // window once the extremal eigenvalue pushes it past the near edge.
  if (param.signature.definite()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.matrix(),
                                                      Eigen::EigenvaluesOnly);
    const double r1 = window.box_radius + 1.0;
    if (param.signature.q == 0) {
      const double sigma = es.eigenvalues()(0);
      out.complete_below_box = -kFourPiSq * sigma * r1 * r1 < window.lambda_min;
    } else {
      const double sigma = -es.eigenvalues()(n - 1);
      out.complete_below_box = kFourPiSq * sigma * r1 * r1 > window.lambda_max;
    }
  }
  return out;
}

double verify_eigenfunction(const DeformationParameter& param,
                            const quadform::LatticePoint& m,
                            int grid_points_per_axis) {
  if (m.size() != param.dim())
    throw input_error(fmt("lattice point has %ld coordinates, expected %d",
                          static_cast<long>(m.size()), param.dim()));
  if (grid_points_per_axis < 8)
    throw input_error(fmt("grid_points_per_axis must be >= 8, got %d",
                          grid_points_per_axis));
  const int n = param.dim();
  const int N = grid_points_per_axis;

  const std::int64_t budget =
      std::min<std::int64_t>(enumeration_budget(), std::int64_t{1} << 24);
  long double count = 1.0L;
  for (int k = 0; k < n; ++k) count *= N;
  if (count > static_cast<long double>(budget))
    throw budget_error(
        fmt("grid %d^%d has %.4Lg points, over the budget of %lld; use a "
            "coarser grid or raise PSEUDOSPEC_BUDGET",
            N, n, count, static_cast<long long>(budget)));

  const quadform::QuadraticForm sform =
      quadform::deformed_form(param.g, param.signature);
  const Eigen::MatrixXd& S = sform.matrix();
  const double lambda = value_of(sform, m);
  const double h = 1.0 / N;

  // The mode only depends on t(m) u mod 1, so sample N roots of unity once.
  std::vector<std::complex<double>> table(N);
  for (int r = 0; r < N; ++r)
    table[r] = std::polar(1.0, 2.0 * kPi * r / N);

  std::vector<std::int64_t> stride(n);
  stride[0] = 1;
  for (int k = 1; k < n; ++k) stride[k] = stride[k - 1] * N;
  const std::int64_t total = stride[n - 1] * N;

  std::vector<std::complex<double>> f(total);
  for (std::int64_t t = 0; t < total; ++t) {
    std::int64_t phase = 0;
    for (int k = 0; k < n; ++k)
      phase += static_cast<std::int64_t>(m(k)) * ((t / stride[k]) % N);
    f[t] = table[((phase % N) + N) % N];
  }

  const auto shift = [&](std::int64_t t, int jk, int k, int dir) {
    if (dir > 0) return jk + 1 == N ? t + stride[k] * (1 - N) : t + stride[k];
    return jk == 0 ? t + stride[k] * (N - 1) : t - stride[k];
  };

  double worst = 0.0;
  std::vector<int> j(n);
  for (std::int64_t t = 0; t < total; ++t) {
    for (int k = 0; k < n; ++k) j[k] = static_cast<int>((t / stride[k]) % N);
    std::complex<double> acc{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
      const std::int64_t tp = shift(t, j[k], k, +1);
      const std::int64_t tm = shift(t, j[k], k, -1);
      acc += S(k, k) * (f[tp] + f[tm] - 2.0 * f[t]);
      for (int l = k + 1; l < n; ++l) {
        const std::complex<double> corners =
            f[shift(tp, j[l], l, +1)] - f[shift(tp, j[l], l, -1)] -
            f[shift(tm, j[l], l, +1)] + f[shift(tm, j[l], l, -1)];
        acc += 2.0 * S(k, l) * corners / 4.0;
      }
    }
    acc /= h * h;
    worst = std::max(worst, std::abs(acc - lambda * f[t]));
  }
  return worst / std::max(std::abs(lambda), kFourPiSq);
}

std::vector<double> stability_scan(const DeformationParameter& g0,
                                   double radius, int samples,
                                   const SpectrumWindow& window,
                                   double match_tol, std::uint64_t seed,
                                   const EnumerationOptions& opts) {
  if (!(radius > 0.0))
    throw input_error(fmt("perturbation radius must be positive, got %g",
                          radius));
  if (samples < 1)
    throw input_error(fmt("samples must be >= 1, got %d", samples));
  if (!(match_tol > 0.0))
    throw input_error(fmt("match_tol must be positive, got %g", match_tol));
  check_window(window);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> bump(-radius, radius);
  const int n = g0.dim();

  std::vector<double> common;
  long rejected = 0;
  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXd g(n, n);
    for (;;) {
      g = g0.g;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) g(i, k) += bump(rng);
      if (std::abs(g.determinant()) >= 1e-8) break;
      if (++rejected > 1000 + 100L * samples)
        throw input_error(
            "perturbation draws keep landing near singular matrices; shrink "
            "the radius or move the base point");
    }
    const SpectrumSample sample =
        enumerate_spectrum(DeformationParameter(g, g0.signature), window, opts);
    std::vector<double> vals;
    vals.reserve(sample.entries.size());
    for (const auto& e : sample.entries) vals.push_back(e.eigenvalue);

    if (s == 0) {
      common = std::move(vals);
    } else {
      std::vector<double> kept;
      for (double c : common) {
        const auto it = std::lower_bound(vals.begin(), vals.end(), c);
        const bool hit = (it != vals.end() && *it - c <= match_tol) ||
                         (it != vals.begin() && c - *(it - 1) <= match_tol);
        if (hit) kept.push_back(c);
      }
      common.swap(kept);
    }
    if (common.empty()) break;
  }
  return common;
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::DenseSuspected:
      return "dense_suspected";
    case Classification::DiscreteSuspected:
      return "discrete_suspected";
    case Classification::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

DensityReport density_diagnostics(const DeformationParameter& param,
                                  std::span<const SpectrumWindow> windows,
                                  const DensityOptions& opts) {
  if (windows.empty())
    throw input_error("density diagnostics need at least one window");
  for (std::size_t i = 1; i < windows.size(); ++i)
    if (windows[i].box_radius <= windows[i - 1].box_radius)
      throw input_error(
          fmt("box radii must strictly increase, got %d after %d",
              windows[i].box_radius, windows[i - 1].box_radius));
  if (!(opts.gap_shrink_factor > 1.0))
    throw input_error("gap_shrink_factor must exceed 1");

  DensityReport rep;
  rep.gap_shrink_factor = opts.gap_shrink_factor;
  rep.rational_search_bound = opts.rational_search_bound;
  rep.rational_tol = opts.rational_tol;

  const int n = param.dim();
  const auto& sig = param.signature;
  const bool hypotheses_met = n >= 3 && sig.p >= 2 && sig.q >= 1;
  if (!hypotheses_met)
    rep.warning = fmt(
        "value-set dichotomy requires n >= 3 with signature p >= 2, q >= 1; "
        "got n=%d, p=%d, q=%d, so the classification stays inconclusive",
        n, sig.p, sig.q);

  EnumerationOptions eopts;
  eopts.dedupe_tol = opts.dedupe_tol;
  eopts.budget = opts.budget;
  for (const auto& w : windows) {
    const SpectrumSample s = enumerate_spectrum(param, w, eopts);
    if (s.entries.size() < 2)
      throw input_error(
          fmt("window [%g, %g] at box radius %d holds %zu distinct values; "
              "gap statistics need at least 2, widen the window",
              w.lambda_min, w.lambda_max, w.box_radius, s.entries.size()));
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < s.entries.size(); ++i)
      min_gap = std::min(min_gap,
                         s.entries[i].eigenvalue - s.entries[i - 1].eigenvalue);
    rep.boxes.push_back({w.box_radius, s.entries.size(), min_gap});
  }

  rep.rationality = quadform::integer_proportionality(
      quadform::deformed_form(param.g, param.signature),
      opts.rational_search_bound, opts.rational_tol);
  rep.observed_shrink = rep.boxes.front().min_gap / rep.boxes.back().min_gap;

  if (!hypotheses_met)
    rep.classification = Classification::Inconclusive;
  else if (rep.rationality.has_value())
    rep.classification = Classification::DiscreteSuspected;
  else if (rep.observed_shrink >= opts.gap_shrink_factor)
    rep.classification = Classification::DenseSuspected;
  else
    rep.classification = Classification::Inconclusive;
  return rep;
}

}  // namespace pseudospec::flat
