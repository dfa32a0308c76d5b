#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hdqi/betafn.hpp"
#include "hdqi/dense.hpp"
#include "hdqi/gf2code.hpp"
#include "hdqi/pauli.hpp"
#include "hdqi/poly.hpp"

namespace hdqi::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline PauliTerm random_pauli(Rng& rng, std::size_t n, bool allow_identity = false) {
  static const char kLetters[] = "IXYZ";
  while (true) {
    std::string s(n, 'I');
    for (auto& ch : s) ch = kLetters[uniform_int(rng, 0, 3)];
    PauliTerm p = parse_pauli(s);
    if (allow_identity || !p.is_identity()) return p;
  }
}

/// Up to m distinct random Paulis accepted by `accept(candidate, chosen)`.
template <typename Accept>
PauliHamiltonian random_hamiltonian(Rng& rng, std::size_t n, std::size_t m, Accept&& accept, int attempts = 400) {
  std::vector<PauliHamiltonian::Term> terms;
  std::vector<PauliTerm> chosen;
  for (int a = 0; a < attempts && chosen.size() < m; ++a) {
    PauliTerm p = random_pauli(rng, n);
    bool fresh = true;
    for (const auto& q : chosen) fresh = fresh && !(q.symp() == p.symp());
    if (!fresh || !accept(p, chosen)) continue;
    chosen.push_back(p);
    double c = uniform(rng, -1.0, 1.0);
    if (std::abs(c) < 0.05) c = 0.05;
    terms.push_back({c, p});
  }
  return PauliHamiltonian(n, std::move(terms));
}

/// Pairwise commuting terms (any code dimension).
inline PauliHamiltonian random_commuting(Rng& rng, std::size_t n, std::size_t m) {
  return random_hamiltonian(rng, n, m, [](const PauliTerm& p, const std::vector<PauliTerm>& chosen) {
    for (const auto& q : chosen) {
      if (!commutes(p, q)) return false;
    }
    return true;
  });
}

/// Terms whose symplectic vectors stay linearly independent.
inline PauliHamiltonian random_independent(Rng& rng, std::size_t n, std::size_t m, bool commuting) {
  return random_hamiltonian(rng, n, m, [&](const PauliTerm& p, const std::vector<PauliTerm>& chosen) {
    if (commuting) {
      for (const auto& q : chosen) {
        if (!commutes(p, q)) return false;
      }
    }
    std::vector<BitVec> trial;
    for (const auto& q : chosen) trial.push_back(q.symp());
    trial.push_back(p.symp());
    return SymplecticCode::from_columns(trial).dimension() == 0;
  });
}

/// Random terms whose anticommutation components have at most max_component vertices.
inline PauliHamiltonian random_bounded_components(Rng& rng, std::size_t n, std::size_t m, std::size_t max_component) {
  return random_hamiltonian(rng, n, m, [&](const PauliTerm& p, const std::vector<PauliTerm>& chosen) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<PauliTerm> all = chosen;
    all.push_back(p);
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        if (!commutes(all[i], all[j])) edges.emplace_back(i, j);
      }
    }
    return AnticommGraph::from_edges(all.size(), edges).max_component() <= max_component;
  });
}

inline AnticommGraph random_graph(Rng& rng, std::size_t m, double density) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (uniform(rng, 0.0, 1.0) < density) edges.emplace_back(i, j);
    }
  }
  return AnticommGraph::from_edges(m, edges);
}

inline Polynomial random_polynomial(Rng& rng, int degree) {
  std::vector<double> a(static_cast<std::size_t>(degree) + 1);
  for (auto& x : a) x = uniform(rng, -1.0, 1.0);
  if (std::abs(a.back()) < 0.1) a.back() = 0.5;
  return Polynomial(a);
}

inline std::vector<int> bits_of(std::uint64_t y, std::size_t m) {
  std::vector<int> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = static_cast<int>((y >> i) & 1U);
  return out;
}

inline std::vector<std::uint64_t> symbols_of(std::uint64_t y, std::size_t m) {
  std::vector<std::uint64_t> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = (y >> i) & 1U;
  return out;
}

/// Dense Pauli built from 2x2 Kronecker factors.
inline DenseOperator kron_pauli(const PauliTerm& p) {
  Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd x, y, z;
  x << 0, 1, 1, 0;
  y << 0, cplx(0, -1), cplx(0, 1), 0;
  z << 1, 0, 0, -1;
  DenseOperator out = DenseOperator::Identity(1, 1);
  // Qubit j is bit j of the basis index, so it is the rightmost Kronecker factor for j = 0.
  for (std::size_t j = 0; j < p.num_qubits(); ++j) {
    const bool a = p.alpha().get(j);
    const bool b = p.beta().get(j);
    const Eigen::Matrix2cd& f = a ? (b ? y : z) : (b ? x : id);
    DenseOperator next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index r = 0; r < 2; ++r) {
      for (Eigen::Index c = 0; c < 2; ++c) next.block(r * out.rows(), c * out.cols(), out.rows(), out.cols()) = f(r, c) * out;
    }
    out = std::move(next);
  }
  return i_pow(p.phase()) * out;
}

/// P_1^{y_1} ... P_m^{y_m} as a dense matrix product.
inline DenseOperator dense_word(const PauliHamiltonian& h, const std::vector<int>& y) {
  const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << h.num_qubits());
  DenseOperator out = DenseOperator::Identity(dim, dim);
  for (std::size_t i = 0; i < h.num_terms(); ++i) {
    if (y[i]) out = out * kron_pauli(h.term(i).pauli);
  }
  return out;
}

inline DenseOperator dense_sum(const PauliHamiltonian& h) {
  const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << h.num_qubits());
  DenseOperator out = DenseOperator::Zero(dim, dim);
  for (const auto& t : h.terms()) out += t.coeff * kron_pauli(t.pauli);
  return out;
}

/// P(H) by Horner's rule on matrices.
inline DenseOperator dense_poly(const PauliHamiltonian& h, const Polynomial& p) {
  const DenseOperator hm = dense_sum(h);
  const auto dim = hm.rows();
  DenseOperator out = DenseOperator::Zero(dim, dim);
  for (int j = p.degree(); j >= 0; --j) out = out * hm + p.coefficient(j) * DenseOperator::Identity(dim, dim);
  return out;
}

/// Coefficient of the index-ordered word y in (sum_i c_i z_i)^s: every
/// length-s word is bubble-sorted with z_i z_j = -z_j z_i on edges.
inline double brute_force_beta(const AnticommGraph& g, int s, const std::vector<int>& y, const std::vector<double>& c) {
  const std::size_t m = g.num_vertices();
  std::vector<std::size_t> word(static_cast<std::size_t>(s), 0);
  double total = 0.0;
  while (true) {
    std::vector<int> parity(m, 0);
    double weight = 1.0;
    for (auto w : word) {
      parity[w] ^= 1;
      weight *= c[w];
    }
    if (parity == y) {
      // Bubble sort, flipping sign on each swap of adjacent vertices.
      std::vector<std::size_t> w = word;
      int sgn = 1;
      for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = 0; j + 1 < w.size() - i; ++j) {
          if (w[j] > w[j + 1]) {
            if (g.adjacent(w[j], w[j + 1])) sgn = -sgn;
            std::swap(w[j], w[j + 1]);
          }
        }
      }
      total += sgn * weight;
    }
    std::size_t pos = 0;
    while (pos < word.size() && ++word[pos] == m) word[pos++] = 0;
    if (pos == word.size()) break;
  }
  return total;
}

}  // namespace hdqi::testing
