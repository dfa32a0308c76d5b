#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hdqi/bitvec.hpp"
#include "hdqi/error.hpp"
#include "hdqi/pauli.hpp"

namespace hdqi {

/// The symplectic code of a Hamiltonian: the 2n x m matrix B^T whose column
/// i is symp(P_i). Stored row-packed as its transpose B (one BitVec of 2n
/// bits per term), together with a left-to-right echelon basis that tracks,
/// for every basis vector, which original columns it is the sum of.
class SymplecticCode {
 public:
  struct BasisVector {
    BitVec vec;         // reduced column, length 2n
    std::size_t pivot;  // lowest set bit of vec; absent from all other pivots seen before
    BitVec combo;       // columns (length m) summing to vec
  };

  SymplecticCode() = default;

  /// Columns in order; each of the same length. Equal columns are allowed
  /// here (synthetic codes) even though a Hamiltonian never produces them.
  static SymplecticCode from_columns(std::vector<BitVec> columns) {
    SymplecticCode code;
    code.columns_ = std::move(columns);
    code.syndrome_bits_ = code.columns_.empty() ? 0 : code.columns_.front().size();
    code.eliminate();
    return code;
  }

  std::size_t num_terms() const noexcept { return columns_.size(); }
  std::size_t syndrome_bits() const noexcept { return syndrome_bits_; }
  std::size_t rank() const noexcept { return basis_.size(); }
  /// Code dimension k = m - rank.
  std::size_t dimension() const noexcept { return columns_.size() - basis_.size(); }

  const std::vector<BitVec>& columns() const noexcept { return columns_; }
  const BitVec& column(std::size_t i) const { return columns_.at(i); }
  const std::vector<BasisVector>& basis() const noexcept { return basis_; }

  /// Term indices chosen greedily left to right as a maximal independent set.
  const std::vector<std::size_t>& independent_indices() const noexcept { return independent_; }
  const std::vector<std::size_t>& dependent_indices() const noexcept { return dependent_; }

  /// For dependent term j: the independent term indices whose columns sum to column j.
  const std::vector<std::size_t>& relation(std::size_t dependent_term) const {
    return relations_.at(dependent_term);
  }

  /// B^T y.
  BitVec syndrome(const BitVec& y) const {
    if (y.size() != columns_.size()) throw InputError("syndrome: y has wrong length", "DimensionError");
    BitVec s(syndrome_bits_);
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (y.get(i)) s ^= columns_[i];
    }
    return s;
  }

  /// Some y with B^T y = s built from independent columns only, or nothing
  /// if s is outside the column space.
  std::optional<BitVec> solve(BitVec s) const {
    if (s.size() != syndrome_bits_) throw InputError("solve: syndrome has wrong length", "DimensionError");
    BitVec y(columns_.size());
    for (const auto& b : basis_) {
      if (s.get(b.pivot)) {
        s ^= b.vec;
        y ^= b.combo;
      }
    }
    if (s.any()) return std::nullopt;
    return y;
  }

 private:
  void eliminate() {
    const std::size_t m = columns_.size();
    for (std::size_t i = 0; i < m; ++i) {
      if (columns_[i].size() != syndrome_bits_) {
        throw InputError("code columns have inconsistent lengths", "DimensionError");
      }
      BitVec v = columns_[i];
      BitVec combo(m);
      combo.set(i);
      for (const auto& b : basis_) {
        if (v.get(b.pivot)) {
          v ^= b.vec;
          combo ^= b.combo;
        }
      }
      if (v.any()) {
        const std::size_t pivot = v.lowest_set();
        basis_.push_back({std::move(v), pivot, std::move(combo)});
        independent_.push_back(i);
      } else {
        combo.flip(i);
        relations_[i] = combo.support();
        dependent_.push_back(i);
      }
    }
  }

  std::vector<BitVec> columns_;
  std::size_t syndrome_bits_ = 0;
  std::vector<BasisVector> basis_;
  std::vector<std::size_t> independent_;
  std::vector<std::size_t> dependent_;
  std::map<std::size_t, std::vector<std::size_t>> relations_;
};

inline SymplecticCode build_code(const PauliHamiltonian& h) {
  std::vector<BitVec> cols;
  cols.reserve(h.num_terms());
  for (const auto& t : h.terms()) cols.push_back(t.pauli.symp());
  return SymplecticCode::from_columns(std::move(cols));
}

/// Default cap on the number of weight-<=l words enumerated by a syndrome table.
inline constexpr std::uint64_t kDefaultSyndromeTableCap = std::uint64_t{1} << 20;

/// Recovers y from B^T y. Immutable after construction.
class Decoder {
 public:
  enum class Kind { kGaussian, kTable };

  /// Unique decoding by elimination; requires a trivial code (k = 0).
  static Decoder gaussian(const SymplecticCode& code) {
    if (code.dimension() != 0) {
      throw DecoderError("NontrivialCode", "Gaussian decoding needs k = 0, code has k = " +
                                               std::to_string(code.dimension()));
    }
    Decoder d;
    d.kind_ = Kind::kGaussian;
    d.code_ = code;
    d.max_weight_ = code.num_terms();
    return d;
  }

  /// Lookup table over every y with |y| <= l. Two such words sharing a
  /// syndrome make the table ambiguous and construction fails.
  static Decoder syndrome_table(const SymplecticCode& code, std::size_t l,
                                std::uint64_t cap = kDefaultSyndromeTableCap) {
    const std::size_t m = code.num_terms();
    l = std::min(l, m);
    std::uint64_t count = 0;
    for (std::size_t w = 0; w <= l; ++w) {
      count += binomial_u64(m, w);
      if (count > cap) {
        throw CapExceeded("syndrome table for m = " + std::to_string(m) + ", l = " + std::to_string(l) +
                              " exceeds " + std::to_string(cap) + " entries",
                          "TableTooLarge");
      }
    }
    Decoder d;
    d.kind_ = Kind::kTable;
    d.code_ = code;
    d.max_weight_ = l;
    d.table_.reserve(static_cast<std::size_t>(count));
    std::vector<std::size_t> pick;
    for (std::size_t w = 0; w <= l; ++w) {
      pick.resize(w);
      for (std::size_t i = 0; i < w; ++i) pick[i] = i;
      while (true) {
        BitVec y(m);
        for (auto i : pick) y.set(i);
        BitVec s = code.syndrome(y);
        auto [it, inserted] = d.table_.emplace(s, y);
        if (!inserted) {
          throw DecoderError("AmbiguousSyndrome", "words " + it->second.to_string() + " and " +
                                                      y.to_string() + " share syndrome " + s.to_string());
        }
        if (!next_combination(pick, m)) break;
      }
    }
    return d;
  }

  Kind kind() const noexcept { return kind_; }
  std::string kind_name() const { return kind_ == Kind::kGaussian ? "gaussian" : "table"; }
  std::size_t max_weight() const noexcept { return max_weight_; }
  std::size_t num_terms() const noexcept { return code_.num_terms(); }
  std::size_t syndrome_bits() const noexcept { return code_.syndrome_bits(); }
  std::size_t table_size() const noexcept { return table_.size(); }
  const SymplecticCode& code() const noexcept { return code_; }

  /// The unique in-contract y with B^T y = syndrome.
  BitVec decode(const BitVec& syndrome) const {
    if (syndrome.size() != code_.syndrome_bits()) {
      throw InputError("decode: syndrome has wrong length", "DimensionError");
    }
    if (kind_ == Kind::kGaussian) {
      auto y = code_.solve(syndrome);
      if (!y) throw DecoderError("UnknownSyndrome", "syndrome " + syndrome.to_string() + " has no preimage");
      return *y;
    }
    auto it = table_.find(syndrome);
    if (it == table_.end()) {
      throw DecoderError("UnknownSyndrome", "syndrome " + syndrome.to_string() + " has no preimage of weight <= " +
                                                std::to_string(max_weight_));
    }
    return it->second;
  }

  static std::uint64_t binomial_u64(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
      r = r * (n - k + i) / i;
    }
    return r;
  }

 private:
  static bool next_combination(std::vector<std::size_t>& pick, std::size_t m) {
    const std::size_t w = pick.size();
    for (std::size_t i = w; i-- > 0;) {
      if (pick[i] < m - w + i) {
        ++pick[i];
        for (std::size_t j = i + 1; j < w; ++j) pick[j] = pick[j - 1] + 1;
        return true;
      }
    }
    return false;
  }

  Kind kind_ = Kind::kGaussian;
  SymplecticCode code_;
  std::size_t max_weight_ = 0;
  std::unordered_map<BitVec, BitVec, BitVecHash> table_;
};

inline Decoder build_syndrome_table(const SymplecticCode& code, std::size_t l,
                                    std::uint64_t cap = kDefaultSyndromeTableCap) {
  return Decoder::syndrome_table(code, l, cap);
}

inline BitVec decode(const Decoder& d, const BitVec& syndrome) { return d.decode(syndrome); }

/// Regrouping of a commuting Hamiltonian with k dependencies: the greedy
/// maximal independent set, its partition into blocks, and for each
/// dependent term the blocks whose product reproduces it up to sign.
struct BlockPartition {
  struct Relation {
    std::size_t dependent_term = 0;               // original term index
    std::vector<std::size_t> members;             // U_j as positions into independent_indices
    std::vector<std::size_t> blocks;              // T_j as indices into blocks
    int sign = 1;                                 // prod_{i in U_j} P_i = sign * P_dependent
  };

  std::vector<std::size_t> independent_indices;   // original term indices, ascending
  std::vector<std::vector<std::size_t>> blocks;   // V_t as positions into independent_indices
  std::vector<Relation> relations;                // one per dependent term, ascending term index

  std::size_t dimension() const noexcept { return relations.size(); }
};

inline BlockPartition find_block_partition(const PauliHamiltonian& h, const SymplecticCode& code) {
  if (!h.all_commute()) throw InputError("block partition needs pairwise commuting terms", "NoncommutingTerms");
  if (code.num_terms() != h.num_terms()) throw InputError("code does not match Hamiltonian", "DimensionError");
  if (code.dimension() == 0) {
    throw InputError("block partition needs at least one dependency (k >= 1)", "TrivialCode");
  }
  BlockPartition bp;
  bp.independent_indices = code.independent_indices();
  std::map<std::size_t, std::size_t> position;
  for (std::size_t p = 0; p < bp.independent_indices.size(); ++p) position[bp.independent_indices[p]] = p;

  const std::size_t k = code.dimension();
  for (auto j : code.dependent_indices()) {
    BlockPartition::Relation rel;
    rel.dependent_term = j;
    PauliTerm prod = PauliTerm::identity(h.num_qubits());
    for (auto i : code.relation(j)) {
      rel.members.push_back(position.at(i));
      prod = mul(prod, h.term(i).pauli);
    }
    std::sort(rel.members.begin(), rel.members.end());
    const PauliTerm& target = h.term(j).pauli;
    if (!(prod.alpha() == target.alpha() && prod.beta() == target.beta()) || (prod.phase() & 1)) {
      throw VerificationError("RelationMismatch", "product of U_j does not reproduce term " + std::to_string(j));
    }
    rel.sign = prod.phase() == 0 ? 1 : -1;
    bp.relations.push_back(std::move(rel));
  }

  // Atoms: positions with identical membership across (U_1..U_k) share a block.
  std::map<std::vector<bool>, std::size_t> atom_of;
  std::vector<std::size_t> block_of(bp.independent_indices.size());
  for (std::size_t p = 0; p < bp.independent_indices.size(); ++p) {
    std::vector<bool> membership(k);
    for (std::size_t r = 0; r < k; ++r) {
      const auto& mem = bp.relations[r].members;
      membership[r] = std::binary_search(mem.begin(), mem.end(), p);
    }
    auto [it, inserted] = atom_of.emplace(membership, bp.blocks.size());
    if (inserted) bp.blocks.emplace_back();
    bp.blocks[it->second].push_back(p);
    block_of[p] = it->second;
  }
  for (auto& rel : bp.relations) {
    for (auto p : rel.members) rel.blocks.push_back(block_of[p]);
    std::sort(rel.blocks.begin(), rel.blocks.end());
    rel.blocks.erase(std::unique(rel.blocks.begin(), rel.blocks.end()), rel.blocks.end());
  }
  return bp;
}

}  // namespace hdqi
