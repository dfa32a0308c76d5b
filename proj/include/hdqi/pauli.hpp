#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hdqi/bitvec.hpp"
#include "hdqi/dense.hpp"
#include "hdqi/error.hpp"

namespace hdqi {

/// An n-qubit Pauli operator i^phase * W(alpha, beta), where per qubit
/// W(a, b) = i^{-ab} Z^a X^b. Qubit j is entry j of alpha/beta and bit j of a
/// computational-basis index (little-endian). The phase is an exact exponent
/// of i, never a float.
class PauliTerm {
 public:
  PauliTerm() = default;
  explicit PauliTerm(std::size_t n) : alpha_(n), beta_(n) {}
  PauliTerm(BitVec alpha, BitVec beta, int phase = 0)
      : alpha_(std::move(alpha)), beta_(std::move(beta)), phase_(((phase % 4) + 4) % 4) {
    if (alpha_.size() != beta_.size()) {
      throw InputError("Pauli alpha/beta length mismatch");
    }
  }

  /// Identity on n qubits.
  static PauliTerm identity(std::size_t n) { return PauliTerm(n); }

  /// Single-qubit Pauli ('X', 'Y' or 'Z') on `qubit` of an n-qubit register.
  static PauliTerm single(std::size_t n, std::size_t qubit, char which) {
    PauliTerm p(n);
    if (which == 'X' || which == 'Y') p.beta_.set(qubit);
    if (which == 'Z' || which == 'Y') p.alpha_.set(qubit);
    return p;
  }

  std::size_t num_qubits() const noexcept { return alpha_.size(); }
  const BitVec& alpha() const noexcept { return alpha_; }
  const BitVec& beta() const noexcept { return beta_; }
  /// Exponent k of the phase i^k, in [0, 4).
  int phase() const noexcept { return phase_; }
  cplx phase_value() const { return i_pow(phase_); }

  bool is_hermitian() const noexcept { return (phase_ & 1) == 0; }
  bool is_identity() const noexcept { return !alpha_.any() && !beta_.any(); }

  PauliTerm with_phase(int phase) const { return PauliTerm(alpha_, beta_, phase); }

  /// Symplectic representation (alpha || beta); the phase is dropped.
  BitVec symp() const { return alpha_.concat(beta_); }

  /// Action on a computational basis state: P|x> = i^k |x'>. Returns (x', k).
  /// Requires n <= 63.
  std::pair<std::uint64_t, int> apply_to_basis(std::uint64_t x) const {
    const std::uint64_t a = alpha_.low_word();
    const std::uint64_t b = beta_.low_word();
    const std::uint64_t flipped = x ^ b;
    const int k = phase_ - std::popcount(a & b) + 2 * std::popcount(a & flipped);
    return {flipped, ((k % 4) + 4) % 4};
  }

  /// Label such as "XIZ" or "-iXY" (qubit 0 first).
  std::string to_string() const {
    static constexpr const char* kPrefix[4] = {"", "i", "-", "-i"};
    std::string s = kPrefix[phase_];
    for (std::size_t q = 0; q < num_qubits(); ++q) {
      const bool a = alpha_.get(q);
      const bool b = beta_.get(q);
      s.push_back(a ? (b ? 'Y' : 'Z') : (b ? 'X' : 'I'));
    }
    return s;
  }

  friend bool operator==(const PauliTerm& p, const PauliTerm& q) noexcept {
    return p.phase_ == q.phase_ && p.alpha_ == q.alpha_ && p.beta_ == q.beta_;
  }

 private:
  BitVec alpha_;
  BitVec beta_;
  int phase_ = 0;
};

/// Parses a string over {I,X,Y,Z}; qubit j is character j. Phase is +1.
inline PauliTerm parse_pauli(std::string_view s) {
  if (s.empty()) throw InputError("empty Pauli string", "ParseError");
  BitVec alpha(s.size());
  BitVec beta(s.size());
  for (std::size_t q = 0; q < s.size(); ++q) {
    switch (s[q]) {
      case 'I':
        break;
      case 'X':
        beta.set(q);
        break;
      case 'Z':
        alpha.set(q);
        break;
      case 'Y':
        alpha.set(q);
        beta.set(q);
        break;
      default:
        throw InputError("invalid Pauli character '" + std::string(1, s[q]) + "' at position " +
                             std::to_string(q),
                         "ParseError");
    }
  }
  return PauliTerm(std::move(alpha), std::move(beta), 0);
}

inline BitVec symp(const PauliTerm& p) { return p.symp(); }

inline void check_same_qubits(const PauliTerm& p, const PauliTerm& q) {
  if (p.num_qubits() != q.num_qubits()) {
    throw InputError("Pauli qubit count mismatch: " + std::to_string(p.num_qubits()) + " vs " +
                         std::to_string(q.num_qubits()),
                     "DimensionError");
  }
}

/// Exact product P*Q including the i^{+-1} factors from reordering Z and X
/// and the i^{-ab} normalization of W.
inline PauliTerm mul(const PauliTerm& p, const PauliTerm& q) {
  check_same_qubits(p, q);
  BitVec alpha = p.alpha() ^ q.alpha();
  BitVec beta = p.beta() ^ q.beta();
  // W(a1,b1) W(a2,b2) = i^{-a1.b1 - a2.b2} (-1)^{b1.a2} Z^{a1+a2} X^{b1+b2}
  // and Z^a X^b = i^{a.b} W(a,b).
  const long k = static_cast<long>(p.phase()) + q.phase() -
                 static_cast<long>(p.alpha().and_count(p.beta())) -
                 static_cast<long>(q.alpha().and_count(q.beta())) +
                 2 * static_cast<long>(p.beta().and_count(q.alpha())) +
                 static_cast<long>(alpha.and_count(beta));
  return PauliTerm(std::move(alpha), std::move(beta), static_cast<int>(((k % 4) + 4) % 4));
}

inline PauliTerm operator*(const PauliTerm& p, const PauliTerm& q) { return mul(p, q); }

/// True iff the symplectic inner product alpha.beta' + beta.alpha' vanishes.
inline bool commutes(const PauliTerm& p, const PauliTerm& q) {
  check_same_qubits(p, q);
  return p.alpha().dot(q.beta()) == p.beta().dot(q.alpha());
}

/// phase * (tensor over qubits of W(alpha_j, beta_j)) as a 2^n x 2^n matrix.
inline DenseOperator dense_pauli(const PauliTerm& p, std::size_t cap = kDefaultOperatorQubitCap) {
  const std::size_t n = p.num_qubits();
  check_qubit_cap(n, cap, "dense_pauli");
  const std::uint64_t dim = std::uint64_t{1} << n;
  DenseOperator out = DenseOperator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t x = 0; x < dim; ++x) {
    const auto [y, k] = p.apply_to_basis(x);
    out(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = i_pow(k);
  }
  return out;
}

/// A real-coefficient Pauli Hamiltonian sum_i c_i P_i. Every stored term has
/// phase +1: a -1 phase is folded into the coefficient on construction and
/// a +-i phase (non-Hermitian) is rejected. Terms have distinct symplectic
/// vectors.
class PauliHamiltonian {
 public:
  struct Term {
    double coeff = 0.0;
    PauliTerm pauli;
  };

  PauliHamiltonian() = default;

  PauliHamiltonian(std::size_t n, std::vector<Term> terms) : n_(n), terms_(std::move(terms)) {
    if (n_ == 0) throw InputError("Hamiltonian must act on at least one qubit");
    std::unordered_set<BitVec, BitVecHash> seen;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      auto& t = terms_[i];
      if (t.pauli.num_qubits() != n_) {
        throw InputError("term " + std::to_string(i) + " acts on " +
                             std::to_string(t.pauli.num_qubits()) + " qubits, expected " +
                             std::to_string(n_),
                         "DimensionError");
      }
      if (!t.pauli.is_hermitian()) {
        throw InputError("term " + std::to_string(i) + " has phase +-i and is not Hermitian",
                         "NonHermitianTerm");
      }
      if (t.pauli.phase() == 2) {
        t.coeff = -t.coeff;
        t.pauli = t.pauli.with_phase(0);
      }
      if (!seen.insert(t.pauli.symp()).second) {
        throw InputError("duplicate Pauli term " + t.pauli.to_string(), "DuplicateTerm");
      }
    }
  }

  std::size_t num_qubits() const noexcept { return n_; }
  std::size_t num_terms() const noexcept { return terms_.size(); }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  const Term& term(std::size_t i) const { return terms_.at(i); }

  std::vector<double> coefficients() const {
    std::vector<double> c;
    c.reserve(terms_.size());
    for (const auto& t : terms_) c.push_back(t.coeff);
    return c;
  }

  /// sum_i |c_i|, an upper bound on the operator norm.
  double l1_norm() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.coeff);
    return s;
  }

  bool all_commute() const {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      for (std::size_t j = i + 1; j < terms_.size(); ++j) {
        if (!commutes(terms_[i].pauli, terms_[j].pauli)) return false;
      }
    }
    return true;
  }

  /// Sub-Hamiltonian made of the listed terms, in the given order.
  PauliHamiltonian subset(const std::vector<std::size_t>& indices) const {
    std::vector<Term> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(terms_.at(i));
    return PauliHamiltonian(n_, std::move(out));
  }

 private:
  std::size_t n_ = 0;
  std::vector<Term> terms_;
};

/// Reads the text format: one `<coefficient> <pauli string>` per line, `#`
/// starts a comment, blank lines ignored, all strings share one length.
inline PauliHamiltonian parse_hamiltonian(std::istream& in) {
  std::vector<PauliHamiltonian::Term> terms;
  std::size_t n = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string coeff_text;
    std::string pauli_text;
    if (!(fields >> coeff_text)) continue;
    const auto where = "line " + std::to_string(lineno) + ": ";
    if (!(fields >> pauli_text)) throw InputError(where + "expected '<coefficient> <pauli>'", "ParseError");
    std::string extra;
    if (fields >> extra) throw InputError(where + "unexpected trailing field '" + extra + "'", "ParseError");
    double coeff = 0.0;
    try {
      std::size_t used = 0;
      coeff = std::stod(coeff_text, &used);
      if (used != coeff_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InputError(where + "invalid coefficient '" + coeff_text + "'", "ParseError");
    }
    PauliTerm p;
    try {
      p = parse_pauli(pauli_text);
    } catch (const InputError& e) {
      throw InputError(where + e.what(), "ParseError");
    }
    if (n == 0) n = p.num_qubits();
    if (p.num_qubits() != n) {
      throw InputError(where + "Pauli string length " + std::to_string(p.num_qubits()) +
                           " differs from " + std::to_string(n),
                       "DimensionError");
    }
    terms.push_back({coeff, std::move(p)});
  }
  if (terms.empty()) throw InputError("Hamiltonian file contains no terms", "EmptyHamiltonian");
  return PauliHamiltonian(n, std::move(terms));
}

inline PauliHamiltonian parse_hamiltonian(const std::string& text) {
  std::istringstream in(text);
  return parse_hamiltonian(in);
}

inline void write_hamiltonian(std::ostream& out, const PauliHamiltonian& h) {
  out.precision(17);
  for (const auto& t : h.terms()) out << t.coeff << ' ' << t.pauli.to_string() << '\n';
}

}  // namespace hdqi
