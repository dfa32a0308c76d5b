#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <tuple>
#include <vector>

#include "hdqi/combinatorics.hpp"
#include "hdqi/error.hpp"
#include "hdqi/pauli.hpp"

namespace hdqi {

/// Anticommutation graph over term indices 0..m-1: an edge joins i and j iff
/// P_i and P_j anticommute. Components are sorted by smallest member and
/// each component lists its vertices in ascending order.
class AnticommGraph {
 public:
  AnticommGraph() = default;

  static AnticommGraph from_edges(std::size_t m, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    AnticommGraph g;
    g.adj_.assign(m, std::vector<bool>(m, false));
    for (auto [a, b] : edges) {
      if (a >= m || b >= m || a == b) throw InputError("invalid graph edge", "GraphError");
      g.adj_[a][b] = g.adj_[b][a] = true;
    }
    g.find_components();
    return g;
  }

  std::size_t num_vertices() const noexcept { return adj_.size(); }
  bool adjacent(std::size_t i, std::size_t j) const { return adj_[i][j]; }

  std::size_t num_edges() const {
    std::size_t e = 0;
    for (std::size_t i = 0; i < adj_.size(); ++i) {
      for (std::size_t j = i + 1; j < adj_.size(); ++j) e += adj_[i][j] ? 1 : 0;
    }
    return e;
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < adj_.size(); ++i) {
      for (std::size_t j = i + 1; j < adj_.size(); ++j) {
        if (adj_[i][j]) out.emplace_back(i, j);
      }
    }
    return out;
  }

  const std::vector<std::vector<std::size_t>>& components() const noexcept { return components_; }

  /// Largest component size (the quantity written 𝓜 in the literature).
  std::size_t max_component() const noexcept {
    std::size_t best = 0;
    for (const auto& c : components_) best = std::max(best, c.size());
    return best;
  }

  std::size_t edges_within(const std::vector<std::size_t>& vertices) const {
    std::size_t e = 0;
    for (std::size_t a = 0; a < vertices.size(); ++a) {
      for (std::size_t b = a + 1; b < vertices.size(); ++b) e += adj_[vertices[a]][vertices[b]] ? 1 : 0;
    }
    return e;
  }

  /// Induced subgraph on `vertices`, relabelled 0..|vertices|-1 in the given order.
  AnticommGraph induced(const std::vector<std::size_t>& vertices) const {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t a = 0; a < vertices.size(); ++a) {
      for (std::size_t b = a + 1; b < vertices.size(); ++b) {
        if (adj_[vertices[a]][vertices[b]]) e.emplace_back(a, b);
      }
    }
    return from_edges(vertices.size(), e);
  }

 private:
  void find_components() {
    const std::size_t m = adj_.size();
    std::vector<bool> seen(m, false);
    components_.clear();
    for (std::size_t s = 0; s < m; ++s) {
      if (seen[s]) continue;
      std::vector<std::size_t> comp{s};
      seen[s] = true;
      for (std::size_t head = 0; head < comp.size(); ++head) {
        for (std::size_t v = 0; v < m; ++v) {
          if (adj_[comp[head]][v] && !seen[v]) {
            seen[v] = true;
            comp.push_back(v);
          }
        }
      }
      std::sort(comp.begin(), comp.end());
      components_.push_back(std::move(comp));
    }
  }

  std::vector<std::vector<bool>> adj_;
  std::vector<std::vector<std::size_t>> components_;
};

inline AnticommGraph anticomm_graph(const PauliHamiltonian& h) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < h.num_terms(); ++i) {
    for (std::size_t j = i + 1; j < h.num_terms(); ++j) {
      if (!commutes(h.term(i).pauli, h.term(j).pauli)) edges.emplace_back(i, j);
    }
  }
  return AnticommGraph::from_edges(h.num_terms(), edges);
}

/// s with z_{w_1} ... z_{w_L} = s * z_1^{mu_1} ... z_m^{mu_m}: every pair of
/// positions that a stable sort into nondecreasing order swaps contributes a
/// factor -1 when the two indices are adjacent in G.
inline int sign(const AnticommGraph& g, std::span<const std::size_t> word) {
  int parity = 0;
  for (std::size_t a = 0; a < word.size(); ++a) {
    for (std::size_t b = a + 1; b < word.size(); ++b) {
      if (word[a] > word[b] && g.adjacent(word[a], word[b])) parity ^= 1;
    }
  }
  return parity ? -1 : 1;
}

/// Sum of sign(G, pi) over the distinct words pi in S(mu), by explicit
/// enumeration with std::next_permutation. Exponential; used as a reference.
inline double sign_sum_by_enumeration(const AnticommGraph& g, std::span<const int> mu) {
  std::vector<std::size_t> word;
  for (std::size_t i = 0; i < mu.size(); ++i) word.insert(word.end(), static_cast<std::size_t>(mu[i]), i);
  double total = 0.0;
  do {
    total += sign(g, word);
  } while (std::next_permutation(word.begin(), word.end()));
  return total;
}

/// Memoized sum over S(mu) of the sign function. Words are grown one letter
/// at a time; appending letter v after a prefix with letter counts p adds
/// sum_{u > v, u ~ v} p_u inversions, so the sum obeys
///   g(mu) = sum_{v : mu_v > 0} (-1)^{sum_{u > v, u ~ v} mu_u} g(mu - e_v).
/// Not thread-safe until every needed entry has been computed (see warm_up).
class SignSumMemo {
 public:
  explicit SignSumMemo(AnticommGraph g) : g_(std::move(g)) { memo_[std::vector<int>(g_.num_vertices(), 0)] = 1.0; }

  const AnticommGraph& graph() const noexcept { return g_; }

  double operator()(std::span<const int> mu) {
    std::vector<int> key(mu.begin(), mu.end());
    return lookup(key);
  }

  /// Fills the memo for every counting vector with |mu| <= max_total.
  void warm_up(int max_total) {
    for (int s = 0; s <= max_total; ++s) {
      for_each_composition(s, g_.num_vertices(), [&](const std::vector<int>& mu) {
        std::vector<int> key = mu;
        lookup(key);
      });
    }
  }

  std::size_t size() const noexcept { return memo_.size(); }

 private:
  double lookup(std::vector<int>& mu) {
    if (auto it = memo_.find(mu); it != memo_.end()) return it->second;
    double total = 0.0;
    const std::size_t m = mu.size();
    for (std::size_t v = 0; v < m; ++v) {
      if (mu[v] == 0) continue;
      int flips = 0;
      for (std::size_t u = v + 1; u < m; ++u) {
        if (g_.adjacent(u, v)) flips += mu[u];
      }
      --mu[v];
      const double sub = lookup(mu);
      ++mu[v];
      total += (flips & 1) ? -sub : sub;
    }
    memo_.emplace(mu, total);
    return total;
  }

  AnticommGraph g_;
  std::map<std::vector<int>, double> memo_;
};

/// Expected sign over a uniformly random word of S(mu).
inline double alpha_coefficient(SignSumMemo& memo, std::span<const int> mu) {
  return memo(mu) / multinomial(mu);
}

/// Weighted beta function of order s:
///   sum_{|mu| = s, mu = y mod 2} c^mu * sum_{pi in S(mu)} sign(pi).
inline double beta_direct(SignSumMemo& memo, int s, const std::vector<int>& y, std::span<const double> c) {
  if (s < 0) throw InputError("beta order must be nonnegative");
  const std::size_t m = memo.graph().num_vertices();
  if (y.size() != m || c.size() != m) throw InputError("beta_direct: size mismatch", "DimensionError");
  double total = 0.0;
  for_each_parity_vector(s, y, [&](const std::vector<int>& mu) { total += monomial(c, mu) * memo(mu); });
  return total;
}

inline double beta_direct(const AnticommGraph& g, int s, const std::vector<int>& y, std::span<const double> c) {
  SignSumMemo memo(g);
  return beta_direct(memo, s, y, c);
}

/// Beta values per connected component, cached by (component, order, local y).
class ComponentBeta {
 public:
  ComponentBeta(const AnticommGraph& g, std::vector<double> c) : c_(std::move(c)) {
    if (c_.size() != g.num_vertices()) throw InputError("ComponentBeta: size mismatch", "DimensionError");
    for (const auto& comp : g.components()) {
      components_.push_back(comp);
      memos_.push_back(std::make_unique<SignSumMemo>(g.induced(comp)));
      std::vector<double> local;
      for (auto v : comp) local.push_back(c_[v]);
      local_c_.push_back(std::move(local));
    }
  }

  std::size_t num_components() const noexcept { return components_.size(); }
  const std::vector<std::size_t>& component(std::size_t t) const { return components_.at(t); }

  /// beta^{(s)}_{G_t}(y_local, c|_{G_t}); bit b of `local_bits` is the entry
  /// for the b-th (ascending) vertex of component t.
  double value(std::size_t t, int s, std::uint64_t local_bits) {
    auto key = std::make_tuple(t, s, local_bits);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    std::vector<int> y(components_[t].size());
    for (std::size_t b = 0; b < y.size(); ++b) y[b] = static_cast<int>((local_bits >> b) & 1U);
    const double v = beta_direct(*memos_[t], s, y, local_c_[t]);
    cache_.emplace(key, v);
    return v;
  }

  /// Component restriction of a global parity vector, as local bits.
  std::uint64_t restrict(std::size_t t, const std::vector<int>& y) const {
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < components_[t].size(); ++b) {
      if (y[components_[t][b]] & 1) bits |= std::uint64_t{1} << b;
    }
    return bits;
  }

 private:
  std::vector<double> c_;
  std::vector<std::vector<std::size_t>> components_;
  std::vector<std::unique_ptr<SignSumMemo>> memos_;
  std::vector<std::vector<double>> local_c_;
  std::map<std::tuple<std::size_t, int, std::uint64_t>, double> cache_;
};

/// sum over compositions kappa of s into r parts of
///   (s choose kappa) prod_t beta^{(kappa_t)}_{G_t}(y|_{G_t}, c|_{G_t}).
inline double beta_factorized(ComponentBeta& comps, int s, const std::vector<int>& y) {
  const std::size_t r = comps.num_components();
  std::vector<std::uint64_t> local(r);
  for (std::size_t t = 0; t < r; ++t) local[t] = comps.restrict(t, y);
  double total = 0.0;
  for_each_composition(s, r, [&](const std::vector<int>& kappa) {
    double term = multinomial(kappa);
    for (std::size_t t = 0; t < r && term != 0.0; ++t) term *= comps.value(t, kappa[t], local[t]);
    total += term;
  });
  return total;
}

inline double beta_factorized(const AnticommGraph& g, int s, const std::vector<int>& y, std::span<const double> c) {
  ComponentBeta comps(g, std::vector<double>(c.begin(), c.end()));
  return beta_factorized(comps, s, y);
}

/// Operation-count bound for one beta evaluation on a component of size M:
///   C((s-w)/2 + M - 1, M - 1) * s * M * 2^s                 if s <= M
///   C((s-w)/2 + M - 1, M - 1) * s * M * (ceil(s/M) + 1)^M   otherwise,
/// and 0 when w > s or s - w is odd (no counting vectors). Saturates at
/// UINT64_MAX.
inline std::uint64_t beta_cost_estimate(int M, int s, int w) {
  if (M <= 0 || s < 0 || w < 0) throw InputError("beta_cost_estimate: arguments must be nonnegative, M >= 1");
  if (w > s || ((s - w) & 1)) return 0;
  const double terms = binomial(static_cast<unsigned>((s - w) / 2 + M - 1), static_cast<unsigned>(M - 1));
  double per_term = static_cast<double>(s) * M;
  if (s <= M) {
    per_term *= std::ldexp(1.0, s);
  } else {
    per_term *= std::pow(static_cast<double>((s + M - 1) / M + 1), M);
  }
  const double total = terms * per_term;
  if (total >= 18446744073709551615.0) return UINT64_MAX;
  return static_cast<std::uint64_t>(std::round(total));
}

}  // namespace hdqi
