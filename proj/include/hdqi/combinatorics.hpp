#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace hdqi {

namespace detail {

inline void warn_overflow_once(const char* what) {
  static bool warned = false;
  if (!warned) {
    warned = true;
    std::clog << "hdqi: warning: 64-bit overflow in " << what << ", falling back to floating point\n";
  }
}

}  // namespace detail

/// n! in 64-bit arithmetic, or nothing on overflow (n > 20).
inline std::optional<std::uint64_t> factorial_u64(unsigned n) {
  std::uint64_t r = 1;
  for (unsigned i = 2; i <= n; ++i) {
    if (__builtin_mul_overflow(r, static_cast<std::uint64_t>(i), &r)) return std::nullopt;
  }
  return r;
}

inline double factorial(unsigned n) {
  if (auto exact = factorial_u64(n)) return static_cast<double>(*exact);
  detail::warn_overflow_once("factorial");
  return std::tgamma(static_cast<double>(n) + 1.0);
}

/// C(n, k) in 64-bit arithmetic, or nothing on overflow.
inline std::optional<std::uint64_t> binomial_u64(unsigned n, unsigned k) {
  if (k > n) return std::uint64_t{0};
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    // r * (n - k + i) is divisible by i after the multiplication.
    std::uint64_t t = 0;
    if (__builtin_mul_overflow(r, static_cast<std::uint64_t>(n - k + i), &t)) return std::nullopt;
    r = t / i;
  }
  return r;
}

inline double binomial(unsigned n, unsigned k) {
  if (auto exact = binomial_u64(n, k)) return static_cast<double>(*exact);
  detail::warn_overflow_once("binomial");
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

/// (|mu| choose mu) = |mu|! / prod mu_i!, built as a product of binomials.
inline double multinomial(std::span<const int> mu) {
  std::uint64_t exact = 1;
  unsigned total = 0;
  bool overflow = false;
  double approx = 1.0;
  for (int part : mu) {
    total += static_cast<unsigned>(part);
    auto b = binomial_u64(total, static_cast<unsigned>(part));
    if (!overflow && b && !__builtin_mul_overflow(exact, *b, &exact)) continue;
    if (!overflow) {
      overflow = true;
      approx = static_cast<double>(exact);
      detail::warn_overflow_once("multinomial");
    }
    approx *= binomial(total, static_cast<unsigned>(part));
  }
  return overflow ? approx : static_cast<double>(exact);
}

/// Calls fn(parts) for every vector of `count` nonnegative integers summing
/// to `total`, in lexicographic order of the first entry descending.
template <typename Fn>
void for_each_composition(int total, std::size_t count, Fn&& fn) {
  std::vector<int> parts(count, 0);
  if (count == 0) {
    if (total == 0) fn(static_cast<const std::vector<int>&>(parts));
    return;
  }
  auto rec = [&](auto&& self, std::size_t idx, int remaining) -> void {
    if (idx + 1 == count) {
      parts[idx] = remaining;
      fn(static_cast<const std::vector<int>&>(parts));
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      parts[idx] = v;
      self(self, idx + 1, remaining - v);
    }
  };
  rec(rec, 0, total);
}

/// Calls fn(mu) for every counting vector mu with |mu| = total and
/// mu_i = parity_i (mod 2). Uses mu = parity + 2 nu.
template <typename Fn>
void for_each_parity_vector(int total, std::span<const int> parity, Fn&& fn) {
  int weight = 0;
  for (int p : parity) weight += p & 1;
  if (weight > total || ((total - weight) & 1)) return;
  std::vector<int> mu(parity.size());
  for_each_composition((total - weight) / 2, parity.size(), [&](const std::vector<int>& nu) {
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = (parity[i] & 1) + 2 * nu[i];
    fn(static_cast<const std::vector<int>&>(mu));
  });
}

/// c^mu / mu!, accumulated factor by factor.
inline double power_over_factorial(std::span<const double> c, std::span<const int> mu) {
  double r = 1.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (int j = 1; j <= mu[i]; ++j) r *= c[i] / j;
  }
  return r;
}

/// c^mu.
inline double monomial(std::span<const double> c, std::span<const int> mu) {
  double r = 1.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (int j = 0; j < mu[i]; ++j) r *= c[i];
  }
  return r;
}

}  // namespace hdqi
