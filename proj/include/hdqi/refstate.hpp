#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdqi/betafn.hpp"
#include "hdqi/combinatorics.hpp"
#include "hdqi/dense.hpp"
#include "hdqi/error.hpp"
#include "hdqi/gf2code.hpp"
#include "hdqi/pauli.hpp"
#include "hdqi/poly.hpp"

namespace hdqi {

enum class Regime { kCommuting, kNearlyIndependent, kNoncommuting };

inline std::string regime_name(Regime r) {
  switch (r) {
    case Regime::kCommuting:
      return "commuting";
    case Regime::kNearlyIndependent:
      return "nearly-independent";
    default:
      return "noncommuting";
  }
}

/// Commuting with k = 0, commuting with k >= 1, or anything with an
/// anticommuting pair.
inline Regime detect_regime(const PauliHamiltonian& h, const SymplecticCode& code) {
  if (!h.all_commute()) return Regime::kNoncommuting;
  return code.dimension() == 0 ? Regime::kCommuting : Regime::kNearlyIndependent;
}

inline Regime detect_regime(const PauliHamiltonian& h) { return detect_regime(h, build_code(h)); }

/// Bond dimension predicted for a regime: l+1, 2^k (l+1), l+1.
inline std::size_t predicted_bond_dim(Regime r, int l, std::size_t k) {
  const std::size_t base = static_cast<std::size_t>(l) + 1;
  return r == Regime::kNearlyIndependent ? (std::size_t{1} << k) * base : base;
}

inline constexpr std::size_t kDefaultBondCap = 4096;
inline constexpr std::size_t kDefaultComponentCap = 6;

/// amplitude(y) = v_left^T A_1(y_1) ... A_S(y_S) [tail] v_right.
struct MpsReferenceState {
  Regime regime = Regime::kCommuting;
  int degree = 0;
  std::size_t bond_dim = 0;
  std::size_t code_dimension = 0;
  std::vector<std::size_t> arities;
  std::vector<std::vector<RealMatrix>> sites;  // sites[t][symbol]
  RealVector v_left;                           // already divided by the norm
  RealVector v_right;
  std::optional<RealMatrix> tail;
  double norm = 1.0;
  /// Original term indices carried by each site; bit b of a site symbol
  /// belongs to site_terms[t][b].
  std::vector<std::vector<std::size_t>> site_terms;

  std::size_t num_sites() const noexcept { return sites.size(); }

  /// Register-A qubit count: one qubit per symbol bit.
  std::size_t register_qubits() const noexcept {
    std::size_t q = 0;
    for (const auto& t : site_terms) q += t.size();
    return q;
  }

  /// Original term index of every register-A qubit, ascending.
  std::vector<std::size_t> register_terms() const {
    std::vector<std::size_t> out;
    for (const auto& t : site_terms) out.insert(out.end(), t.begin(), t.end());
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// (l+1) x (l+1) shift matrix with (B_k)_{ij} = [j - i = k].
inline RealMatrix ladder_matrix(int k, int l) {
  RealMatrix b = RealMatrix::Zero(l + 1, l + 1);
  for (int i = 0; i + k <= l; ++i) b(i, i + k) = 1.0;
  return b;
}

namespace detail {

/// (D x D) band matrices A_0 and A_1 with entry (i, j) = c^{j-i}/(j-i)! when
/// j - i >= 0 has the parity of the symbol.
inline std::pair<RealMatrix, RealMatrix> commuting_site(double c, int l) {
  const int d = l + 1;
  std::vector<double> pw(static_cast<std::size_t>(d));
  pw[0] = 1.0;
  for (int j = 1; j < d; ++j) pw[static_cast<std::size_t>(j)] = pw[static_cast<std::size_t>(j - 1)] * (c / j);
  RealMatrix a0 = RealMatrix::Zero(d, d);
  RealMatrix a1 = RealMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      ((j - i) % 2 == 0 ? a0 : a1)(i, j) = pw[static_cast<std::size_t>(j - i)];
    }
  }
  return {std::move(a0), std::move(a1)};
}

inline RealVector factorial_weighted(const Polynomial& p, int l) {
  RealVector v(l + 1);
  double f = 1.0;
  for (int j = 0; j <= l; ++j) {
    if (j > 0) f *= j;
    v(j) = p.coefficient(j) * f;
  }
  return v;
}

inline void check_site_symbols(const MpsReferenceState& mps, std::span<const std::uint64_t> y) {
  if (y.size() != mps.num_sites()) {
    throw InputError("amplitude: expected " + std::to_string(mps.num_sites()) + " site symbols, got " +
                         std::to_string(y.size()),
                     "ArityMismatch");
  }
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (y[t] >= mps.arities[t]) {
      throw InputError("amplitude: symbol " + std::to_string(y[t]) + " out of range at site " + std::to_string(t),
                       "ArityMismatch");
    }
  }
}

}  // namespace detail

/// Computes the norm by transfer contraction and folds 1/norm into v_left.
/// `raw_left` is the unnormalized left boundary; the transfer map is seeded
/// with raw_left raw_left^T.
inline double build_norm(MpsReferenceState& mps, const RealVector& raw_left) {
  RealMatrix e = raw_left * raw_left.transpose();
  for (const auto& site : mps.sites) {
    RealMatrix next = RealMatrix::Zero(e.rows(), e.cols());
    for (const auto& a : site) next.noalias() += a.transpose() * e * a;
    e = std::move(next);
  }
  if (mps.tail) e = mps.tail->transpose() * e * *mps.tail;
  const double n2 = mps.v_right.dot(e * mps.v_right);
  if (!(n2 > 1e-300)) {
    throw VerificationError("NonpositiveNorm", "squared norm " + std::to_string(n2) + " is not positive");
  }
  mps.norm = std::sqrt(n2);
  mps.v_left = raw_left / mps.norm;
  return mps.norm;
}

/// Normalized amplitude of one site-symbol string.
inline double mps_amplitude(const MpsReferenceState& mps, std::span<const std::uint64_t> y) {
  detail::check_site_symbols(mps, y);
  Eigen::RowVectorXd row = mps.v_left.transpose();
  for (std::size_t t = 0; t < y.size(); ++t) row = row * mps.sites[t][y[t]];
  if (mps.tail) row = row * *mps.tail;
  return row.dot(mps.v_right);
}

inline double mps_amplitude(const MpsReferenceState& mps, const std::vector<std::uint64_t>& y) {
  return mps_amplitude(mps, std::span<const std::uint64_t>(y));
}

inline MpsReferenceState build_commuting_mps(const PauliHamiltonian& h, const Polynomial& p) {
  if (!h.all_commute()) throw InputError("commuting builder needs pairwise commuting terms", "NoncommutingTerms");
  const int l = p.degree();
  MpsReferenceState mps;
  mps.regime = Regime::kCommuting;
  mps.degree = l;
  mps.bond_dim = static_cast<std::size_t>(l) + 1;
  mps.code_dimension = build_code(h).dimension();
  for (std::size_t i = 0; i < h.num_terms(); ++i) {
    auto [a0, a1] = detail::commuting_site(h.term(i).coeff, l);
    mps.sites.push_back({std::move(a0), std::move(a1)});
    mps.arities.push_back(2);
    mps.site_terms.push_back({i});
  }
  mps.v_right = detail::factorial_weighted(p, l);
  build_norm(mps, RealVector::Unit(l + 1, 0));
  return mps;
}

/// Sites over the independent terms, each block-diagonal over subsets K of
/// the k relations; the trailing factor carries the dependent terms with
/// their relation signs folded into the coefficients.
inline MpsReferenceState build_nearly_indep_mps(const PauliHamiltonian& h, const Polynomial& p,
                                                const BlockPartition& bp, std::size_t bond_cap = kDefaultBondCap) {
  if (!h.all_commute()) {
    throw InputError("nearly-independent builder needs pairwise commuting terms", "NoncommutingTerms");
  }
  const std::size_t k = bp.dimension();
  if (k == 0) throw InputError("nearly-independent builder needs k >= 1", "TrivialCode");
  const int l = p.degree();
  const std::size_t base = static_cast<std::size_t>(l) + 1;
  if (k >= 20 || (std::size_t{1} << k) * base > bond_cap) {
    throw CapExceeded("bond dimension 2^" + std::to_string(k) + " * " + std::to_string(base) + " exceeds cap " +
                          std::to_string(bond_cap),
                      "KTooLarge");
  }
  const std::size_t subsets = std::size_t{1} << k;
  const auto d = static_cast<Eigen::Index>(subsets * base);
  const auto b = static_cast<Eigen::Index>(base);

  MpsReferenceState mps;
  mps.regime = Regime::kNearlyIndependent;
  mps.degree = l;
  mps.bond_dim = static_cast<std::size_t>(d);
  mps.code_dimension = k;

  const std::size_t sites = bp.independent_indices.size();
  // chi[K] bit i: parity of #{j in K : i in U_j}.
  std::vector<std::vector<int>> chi(subsets, std::vector<int>(sites, 0));
  for (std::size_t kk = 0; kk < subsets; ++kk) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!((kk >> j) & 1U)) continue;
      for (auto pos : bp.relations[j].members) chi[kk][pos] ^= 1;
    }
  }
  for (std::size_t i = 0; i < sites; ++i) {
    const std::size_t term = bp.independent_indices[i];
    auto ab = detail::commuting_site(h.term(term).coeff, l);
    const RealMatrix* blk[2] = {&ab.first, &ab.second};
    std::vector<RealMatrix> site(2, RealMatrix::Zero(d, d));
    for (int y = 0; y < 2; ++y) {
      for (std::size_t kk = 0; kk < subsets; ++kk) {
        const auto off = static_cast<Eigen::Index>(kk * base);
        site[static_cast<std::size_t>(y)].block(off, off, b, b) = *blk[(y + chi[kk][i]) & 1];
      }
    }
    mps.sites.push_back(std::move(site));
    mps.arities.push_back(2);
    mps.site_terms.push_back({term});
  }
  RealMatrix tail = RealMatrix::Identity(d, d);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& rel = bp.relations[j];
    const double c = rel.sign * h.term(rel.dependent_term).coeff;
    auto ab = detail::commuting_site(c, l);
    RealMatrix factor = RealMatrix::Zero(d, d);
    for (std::size_t kk = 0; kk < subsets; ++kk) {
      const auto off = static_cast<Eigen::Index>(kk * base);
      factor.block(off, off, b, b) = ((kk >> j) & 1U) ? ab.second : ab.first;
    }
    tail = tail * factor;
  }
  mps.tail = std::move(tail);
  const RealVector right = detail::factorial_weighted(p, l);
  mps.v_right = right.replicate(static_cast<Eigen::Index>(subsets), 1);
  const RealVector left = RealVector::Unit(b, 0).replicate(static_cast<Eigen::Index>(subsets), 1);
  build_norm(mps, left);
  return mps;
}

inline MpsReferenceState build_nearly_indep_mps(const PauliHamiltonian& h, const Polynomial& p,
                                                std::size_t bond_cap = kDefaultBondCap) {
  return build_nearly_indep_mps(h, p, find_block_partition(h, build_code(h)), bond_cap);
}

/// One site per connected component of G (sorted by smallest member) with
/// arity 2^{m_t}; entry (i, j) of A(y) is C(j, i) beta^{(j-i)}(y, c) for j >= i.
inline MpsReferenceState build_noncommuting_mps(const PauliHamiltonian& h, const Polynomial& p,
                                                const AnticommGraph& g,
                                                std::size_t component_cap = kDefaultComponentCap) {
  if (g.num_vertices() != h.num_terms()) throw InputError("graph does not match Hamiltonian", "DimensionError");
  if (g.max_component() > component_cap) {
    throw CapExceeded("largest anticommutation component has " + std::to_string(g.max_component()) +
                          " terms, cap is " + std::to_string(component_cap),
                      "ComponentTooLarge");
  }
  const int l = p.degree();
  const auto d = static_cast<Eigen::Index>(l + 1);
  MpsReferenceState mps;
  mps.regime = Regime::kNoncommuting;
  mps.degree = l;
  mps.bond_dim = static_cast<std::size_t>(l) + 1;
  mps.code_dimension = build_code(h).dimension();
  ComponentBeta comps(g, h.coefficients());
  for (std::size_t t = 0; t < comps.num_components(); ++t) {
    const std::size_t q = std::size_t{1} << comps.component(t).size();
    std::vector<RealMatrix> site(q, RealMatrix::Zero(d, d));
    for (std::size_t y = 0; y < q; ++y) {
      for (int i = 0; i <= l; ++i) {
        for (int j = i; j <= l; ++j) {
          const double beta = comps.value(t, j - i, y);
          if (beta != 0.0) site[y](i, j) = binomial(static_cast<unsigned>(j), static_cast<unsigned>(i)) * beta;
        }
      }
    }
    mps.sites.push_back(std::move(site));
    mps.arities.push_back(q);
    mps.site_terms.push_back(comps.component(t));
  }
  mps.v_right = RealVector(d);
  for (int j = 0; j <= l; ++j) mps.v_right(j) = p.coefficient(j);
  build_norm(mps, RealVector::Unit(d, 0));
  return mps;
}

inline MpsReferenceState build_noncommuting_mps(const PauliHamiltonian& h, const Polynomial& p,
                                                std::size_t component_cap = kDefaultComponentCap) {
  return build_noncommuting_mps(h, p, anticomm_graph(h), component_cap);
}

/// Builder for the detected regime.
inline MpsReferenceState build_reference_state(const PauliHamiltonian& h, const Polynomial& p) {
  const auto code = build_code(h);
  switch (detect_regime(h, code)) {
    case Regime::kCommuting:
      return build_commuting_mps(h, p);
    case Regime::kNearlyIndependent:
      return build_nearly_indep_mps(h, p, find_block_partition(h, code));
    default:
      return build_noncommuting_mps(h, p);
  }
}

/// sum_j a_j j! sum_{|mu| = j, mu = y mod 2} c^mu / mu!.
inline double commuting_coefficient(std::span<const double> c, const Polynomial& p, std::span<const int> y) {
  double total = 0.0;
  double fact = 1.0;
  for (int j = 0; j <= p.degree(); ++j) {
    if (j > 0) fact *= j;
    const double a = p.coefficient(j);
    if (a == 0.0) continue;
    double inner = 0.0;
    for_each_parity_vector(j, y, [&](const std::vector<int>& mu) { inner += power_over_factorial(c, mu); });
    total += a * fact * inner;
  }
  return total;
}

/// sum_K sum_s a_s s! I_K^s(y): independent coordinates take parity
/// y_i + chi_K(i), dependent ones the indicator of K.
inline double nearly_indep_coefficient(const PauliHamiltonian& h, const BlockPartition& bp, const Polynomial& p,
                                       std::span<const int> y) {
  const std::size_t r = bp.independent_indices.size();
  const std::size_t k = bp.dimension();
  if (y.size() != r) throw InputError("coefficient_oracle: y has wrong length", "DimensionError");
  std::vector<double> c;
  for (auto i : bp.independent_indices) c.push_back(h.term(i).coeff);
  for (const auto& rel : bp.relations) c.push_back(rel.sign * h.term(rel.dependent_term).coeff);
  double total = 0.0;
  std::vector<int> parity(r + k);
  for (std::size_t kk = 0; kk < (std::size_t{1} << k); ++kk) {
    for (std::size_t i = 0; i < r; ++i) parity[i] = y[i] & 1;
    for (std::size_t j = 0; j < k; ++j) {
      const int in_k = static_cast<int>((kk >> j) & 1U);
      parity[r + j] = in_k;
      if (in_k) {
        for (auto pos : bp.relations[j].members) parity[pos] ^= 1;
      }
    }
    total += commuting_coefficient(c, p, parity);
  }
  return total;
}

/// sum_s a_s beta^{(s)}_G(y, c), summing signs over every word directly.
inline double noncommuting_coefficient(const PauliHamiltonian& h, const Polynomial& p, std::span<const int> y) {
  SignSumMemo memo(anticomm_graph(h));
  const auto c = h.coefficients();
  const std::vector<int> yv(y.begin(), y.end());
  double total = 0.0;
  for (int s = 0; s <= p.degree(); ++s) {
    const double a = p.coefficient(s);
    if (a != 0.0) total += a * beta_direct(memo, s, yv, c);
  }
  return total;
}

/// Unnormalized amplitude computed without any MPS. y is indexed by term
/// (commuting, noncommuting) or by independent term (nearly-independent).
inline double coefficient_oracle(const PauliHamiltonian& h, const Polynomial& p, std::span<const int> y,
                                 Regime regime) {
  switch (regime) {
    case Regime::kCommuting: {
      if (y.size() != h.num_terms()) throw InputError("coefficient_oracle: y has wrong length", "DimensionError");
      const auto c = h.coefficients();
      return commuting_coefficient(c, p, y);
    }
    case Regime::kNearlyIndependent: {
      const auto code = build_code(h);
      return nearly_indep_coefficient(h, find_block_partition(h, code), p, y);
    }
    default:
      if (y.size() != h.num_terms()) throw InputError("coefficient_oracle: y has wrong length", "DimensionError");
      return noncommuting_coefficient(h, p, y);
  }
}

inline double coefficient_oracle(const PauliHamiltonian& h, const Polynomial& p, std::span<const int> y) {
  return coefficient_oracle(h, p, y, detect_regime(h));
}

/// Total Hilbert dimension prod_t q_t, or nothing if it exceeds 2^cap_qubits.
inline std::optional<std::uint64_t> mps_dimension(const MpsReferenceState& mps, std::size_t cap_qubits) {
  std::size_t qubits = 0;
  for (auto q : mps.arities) qubits += static_cast<std::size_t>(std::countr_zero(q));
  if (qubits > cap_qubits) return std::nullopt;
  return std::uint64_t{1} << qubits;
}

/// All normalized amplitudes, little-endian by site: index = sum_t y_t prod_{t' < t} q_{t'}.
inline RealVector mps_amplitudes(const MpsReferenceState& mps, std::size_t cap_qubits = kDefaultStateQubitCap) {
  if (!mps_dimension(mps, cap_qubits)) {
    throw CapExceeded("reference state exceeds " + std::to_string(cap_qubits) + " qubits", "StateTooLarge");
  }
  // rows(:, idx) holds v_left^T A_1(y_1)...A_t(y_t) for prefix index idx.
  RealMatrix rows = mps.v_left;
  for (std::size_t t = 0; t < mps.num_sites(); ++t) {
    const auto q = static_cast<Eigen::Index>(mps.arities[t]);
    RealMatrix next(rows.rows(), rows.cols() * q);
    for (Eigen::Index y = 0; y < q; ++y) {
      next.middleCols(y * rows.cols(), rows.cols()).noalias() =
          mps.sites[t][static_cast<std::size_t>(y)].transpose() * rows;
    }
    rows = std::move(next);
  }
  if (mps.tail) rows = mps.tail->transpose() * rows;
  return rows.transpose() * mps.v_right;
}

inline DenseState mps_to_statevector(const MpsReferenceState& mps, std::size_t cap_qubits = kDefaultStateQubitCap) {
  return mps_amplitudes(mps, cap_qubits).cast<cplx>();
}

/// Reference state on register A: qubit r carries the term register_terms()[r].
/// Equal to mps_to_statevector when every site holds a single term.
inline DenseState register_statevector(const MpsReferenceState& mps, std::size_t cap_qubits = kDefaultStateQubitCap) {
  const RealVector amps = mps_amplitudes(mps, cap_qubits);
  const auto terms = mps.register_terms();
  std::vector<std::size_t> qubit_of_term;
  for (std::size_t r = 0; r < terms.size(); ++r) {
    if (qubit_of_term.size() <= terms[r]) qubit_of_term.resize(terms[r] + 1);
    qubit_of_term[terms[r]] = r;
  }
  DenseState out = DenseState::Zero(amps.size());
  for (Eigen::Index idx = 0; idx < amps.size(); ++idx) {
    std::uint64_t rest = static_cast<std::uint64_t>(idx);
    std::uint64_t reg = 0;
    for (std::size_t t = 0; t < mps.num_sites(); ++t) {
      const std::uint64_t sym = rest % mps.arities[t];
      rest /= mps.arities[t];
      for (std::size_t b = 0; b < mps.site_terms[t].size(); ++b) {
        if ((sym >> b) & 1U) reg |= std::uint64_t{1} << qubit_of_term[mps.site_terms[t][b]];
      }
    }
    out(static_cast<Eigen::Index>(reg)) = amps(idx);
  }
  return out;
}

}  // namespace hdqi
