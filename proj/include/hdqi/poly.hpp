#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdqi/error.hpp"

namespace hdqi {

inline constexpr int kMaxPolynomialDegree = 24;

/// Real polynomial a_0 + a_1 x + ... + a_l x^l in the monomial basis.
/// Trailing zero coefficients are trimmed so a_l != 0 unless l = 0.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs, int max_degree = kMaxPolynomialDegree)
      : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    for (double a : coeffs_) {
      if (!std::isfinite(a)) throw InputError("polynomial coefficient is not finite", "PolynomialError");
    }
    if (degree() > max_degree) {
      throw CapExceeded("polynomial degree " + std::to_string(degree()) + " exceeds cap " +
                            std::to_string(max_degree),
                        "DegreeTooLarge");
    }
  }

  static Polynomial constant(double a0) { return Polynomial({a0}); }
  static Polynomial monomial(int power, double coeff = 1.0) {
    std::vector<double> c(static_cast<std::size_t>(power) + 1, 0.0);
    c.back() = coeff;
    return Polynomial(std::move(c));
  }

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  double coefficient(int j) const { return j <= degree() ? coeffs_[static_cast<std::size_t>(j)] : 0.0; }

  double operator()(double x) const { return eval(x); }

  /// Horner evaluation.
  double eval(double x) const {
    double r = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * x + *it;
    return r;
  }

 private:
  std::vector<double> coeffs_;
};

inline double eval(const Polynomial& p, double x) { return p.eval(x); }

/// Coefficients of sum_k c_k T_k(t) on [-1, 1].
struct ChebyshevSeries {
  std::vector<double> coeffs;

  /// Clenshaw recurrence.
  double eval(double t) const {
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) {
      const double b0 = 2.0 * t * b1 - b2 + coeffs[k];
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + (coeffs.empty() ? 0.0 : coeffs[0]);
  }
};

/// Monomial coefficients of sum_k c_k T_k(x / scale). The Chebyshev basis is
/// expanded in long double with Neumaier-compensated accumulation.
inline std::vector<double> chebyshev_to_monomial(const ChebyshevSeries& series, double scale = 1.0) {
  const std::size_t n = series.coeffs.size();
  if (n == 0) return {0.0};
  std::vector<long double> sum(n, 0.0L);
  std::vector<long double> carry(n, 0.0L);
  auto add = [&](std::size_t j, long double v) {
    const long double t = sum[j] + v;
    if (std::fabs(sum[j]) >= std::fabs(v)) {
      carry[j] += (sum[j] - t) + v;
    } else {
      carry[j] += (v - t) + sum[j];
    }
    sum[j] = t;
  };
  std::vector<long double> prev(n, 0.0L);  // T_{k-1}
  std::vector<long double> cur(n, 0.0L);   // T_k
  prev[0] = 1.0L;
  add(0, series.coeffs[0]);
  if (n > 1) {
    cur[1] = 1.0L;
    add(1, series.coeffs[1]);
  }
  for (std::size_t k = 2; k < n; ++k) {
    std::vector<long double> next(n, 0.0L);
    for (std::size_t j = 0; j + 1 < n; ++j) next[j + 1] += 2.0L * cur[j];
    for (std::size_t j = 0; j < n; ++j) next[j] -= prev[j];
    for (std::size_t j = 0; j <= k; ++j) {
      if (next[j] != 0.0L) add(j, static_cast<long double>(series.coeffs[k]) * next[j]);
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  std::vector<double> out(n);
  long double inv_scale_pow = 1.0L;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = static_cast<double>((sum[j] + carry[j]) * inv_scale_pow);
    inv_scale_pow /= static_cast<long double>(scale);
  }
  return out;
}

/// Degree-l truncation of the Chebyshev expansion of t -> exp(a t) on [-1, 1]:
/// exp(a t) = I_0(a) + 2 sum_k I_k(a) T_k(t), with I_k(-x) = (-1)^k I_k(x).
inline ChebyshevSeries exp_chebyshev(double a, int l) {
  ChebyshevSeries s;
  s.coeffs.resize(static_cast<std::size_t>(l) + 1);
  const double x = std::fabs(a);
  for (int k = 0; k <= l; ++k) {
    double ik = x == 0.0 ? (k == 0 ? 1.0 : 0.0) : std::cyl_bessel_i(static_cast<double>(k), x);
    if (a < 0 && (k & 1)) ik = -ik;
    s.coeffs[static_cast<std::size_t>(k)] = k == 0 ? ik : 2.0 * ik;
  }
  return s;
}

/// Polynomial approximation of x -> exp(-beta x / 2) on [-bound, bound].
struct GibbsApproximation {
  Polynomial poly;
  ChebyshevSeries series;      // same function in the Chebyshev basis of x / bound
  double beta = 0.0;
  double bound = 0.0;
  double sup_error = 0.0;      // certified by dense sampling on [-bound, bound]
};

inline double gibbs_target(double beta, double x) { return std::exp(-0.5 * beta * x); }

/// max |p(x) - exp(-beta x/2)| on [-bound, bound]: 10 l Chebyshev points
/// (at least 64) and both endpoints, then golden-section refinement around
/// the worst sample.
inline double certify_sup_error(const Polynomial& p, double beta, double bound) {
  auto err = [&](double x) { return std::fabs(p.eval(x) - gibbs_target(beta, x)); };
  const int samples = std::max(64, 10 * std::max(1, p.degree()));
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(samples) + 2);
  xs.push_back(-bound);
  for (int i = 0; i < samples; ++i) xs.push_back(bound * std::cos(M_PI * (i + 0.5) / samples));
  xs.push_back(bound);
  std::sort(xs.begin(), xs.end());
  std::size_t best = 0;
  double worst = -1.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = err(xs[i]);
    if (e > worst) {
      worst = e;
      best = i;
    }
  }
  // Refine on each neighbouring interval of the worst sample.
  for (int side : {-1, 1}) {
    const long j = static_cast<long>(best) + side;
    if (j < 0 || j >= static_cast<long>(xs.size())) continue;
    double lo = std::min(xs[best], xs[static_cast<std::size_t>(j)]);
    double hi = std::max(xs[best], xs[static_cast<std::size_t>(j)]);
    constexpr double kInvPhi = 0.6180339887498949;
    for (int it = 0; it < 60 && hi - lo > 1e-14 * std::max(1.0, bound); ++it) {
      const double x1 = hi - kInvPhi * (hi - lo);
      const double x2 = lo + kInvPhi * (hi - lo);
      if (err(x1) > err(x2)) {
        hi = x2;
      } else {
        lo = x1;
      }
    }
    worst = std::max(worst, err(0.5 * (lo + hi)));
  }
  return worst;
}

/// Degree-l approximation of exp(-beta x / 2) on [-bound, bound]: the
/// truncated Chebyshev expansion for l >= 1; for l = 0 the midrange constant
/// cosh(beta bound / 2), whose sup error is sinh(beta bound / 2).
inline GibbsApproximation gibbs_polynomial(double beta, double bound, int l) {
  if (l < 0) throw InputError("polynomial degree must be nonnegative", "PolynomialError");
  if (l > kMaxPolynomialDegree) {
    throw CapExceeded("degree " + std::to_string(l) + " exceeds cap " + std::to_string(kMaxPolynomialDegree),
                      "DegreeTooLarge");
  }
  if (!(bound > 0.0)) throw InputError("spectral bound must be positive", "PolynomialError");
  if (beta < 0.0) throw InputError("beta must be nonnegative", "PolynomialError");
  GibbsApproximation g;
  g.beta = beta;
  g.bound = bound;
  if (beta == 0.0) {
    g.poly = Polynomial::constant(1.0);
    g.series.coeffs = {1.0};
    g.sup_error = 0.0;
    return g;
  }
  const double half = 0.5 * beta * bound;
  if (l == 0) {
    g.poly = Polynomial::constant(std::cosh(half));
    g.series.coeffs = {std::cosh(half)};
    g.sup_error = std::sinh(half);
    return g;
  }
  g.series = exp_chebyshev(-half, l);
  g.poly = Polynomial(chebyshev_to_monomial(g.series, bound));
  g.sup_error = certify_sup_error(g.poly, beta, bound);
  return g;
}

/// ceil(1.12 beta |H| + 0.648 ln(2 / delta)).
inline int gibbs_degree_bound(double beta, double h_norm, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)", "DomainError");
  if (beta < 0.0 || h_norm < 0.0) throw InputError("beta and |H| must be nonnegative", "DomainError");
  return static_cast<int>(std::ceil(1.12 * beta * h_norm + 0.648 * std::log(2.0 / delta)));
}

/// Upper bound on |rho_P(H) - Gibbs|_1 (un-halved) implied by a sup error on
/// [-bound, bound]. Both states are functions of H, so with r = sup_error /
/// min exp(-beta x/2) every eigenvalue ratio lies in [((1-r)/(1+r))^2,
/// ((1+r)/(1-r))^2]. Returns +inf when r >= 1.
inline double gibbs_trace_norm_certificate(double sup_error, double beta, double bound) {
  const double r = sup_error * std::exp(0.5 * beta * bound);
  if (r >= 1.0) return std::numeric_limits<double>::infinity();
  const double q = (1.0 + r) / (1.0 - r);
  return q * q - 1.0;
}

struct GibbsDegreeChoice {
  int bound_degree = 0;          // from gibbs_degree_bound
  int certified_degree = -1;     // smallest l whose certificate meets delta
  int degree = 0;                // max of the two
  GibbsApproximation approx;     // at `degree`
  double certificate = 0.0;      // gibbs_trace_norm_certificate at `degree`
};

/// Picks l = max(degree bound, smallest certified l) for the Gibbs state at
/// inverse temperature beta, using bound = sum |c_i|.
inline GibbsDegreeChoice select_gibbs_degree(double beta, double bound, double delta,
                                             int max_degree = kMaxPolynomialDegree) {
  GibbsDegreeChoice choice;
  choice.bound_degree = gibbs_degree_bound(beta, bound, delta);
  for (int l = 0; l <= max_degree; ++l) {
    const auto g = gibbs_polynomial(beta, bound, l);
    if (gibbs_trace_norm_certificate(g.sup_error, beta, bound) <= delta) {
      choice.certified_degree = l;
      break;
    }
  }
  if (choice.certified_degree < 0) {
    throw CapExceeded("no degree <= " + std::to_string(max_degree) + " certifies delta = " + std::to_string(delta),
                      "DegreeTooLarge");
  }
  choice.degree = std::max(choice.bound_degree, choice.certified_degree);
  if (choice.degree > max_degree) {
    throw CapExceeded("degree bound " + std::to_string(choice.degree) + " exceeds cap " + std::to_string(max_degree),
                      "DegreeTooLarge");
  }
  choice.approx = gibbs_polynomial(beta, bound, choice.degree);
  choice.certificate = gibbs_trace_norm_certificate(choice.approx.sup_error, beta, bound);
  return choice;
}

}  // namespace hdqi
