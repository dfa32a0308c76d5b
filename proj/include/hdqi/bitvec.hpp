#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hdqi/error.hpp"

namespace hdqi {

/// Fixed-length vector over GF(2), packed 64 bits per word. Bits beyond
/// size() in the last word are always zero so word-wise comparison and
/// hashing are exact.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  static BitVec from_bits(const std::vector<int>& bits) {
    BitVec v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] & 1) v.set(i);
    }
    return v;
  }

  /// Low `nbits` bits of `value`, bit i of the integer becomes entry i.
  static BitVec from_u64(std::uint64_t value, std::size_t nbits) {
    BitVec v(nbits);
    if (nbits == 0) return v;
    v.words_[0] = nbits >= 64 ? value : (value & ((std::uint64_t{1} << nbits) - 1));
    return v;
  }

  std::size_t size() const noexcept { return nbits_; }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  bool get(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value = true) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  void flip(std::size_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  BitVec& operator^=(const BitVec& other) {
    check_same(other);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
  }
  friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }

  BitVec& operator&=(const BitVec& other) {
    check_same(other);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
    return *this;
  }
  friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }

  std::size_t popcount() const noexcept {
    std::size_t total = 0;
    for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }

  /// Parity of the bitwise AND, i.e. the GF(2) dot product.
  bool dot(const BitVec& other) const {
    check_same(other);
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & other.words_[w];
    return std::popcount(acc) & 1;
  }

  /// Number of positions set in both vectors.
  std::size_t and_count(const BitVec& other) const {
    check_same(other);
    std::size_t total = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      total += static_cast<std::size_t>(std::popcount(words_[w] & other.words_[w]));
    }
    return total;
  }

  bool any() const noexcept {
    for (auto w : words_) {
      if (w != 0) return true;
    }
    return false;
  }

  /// Index of the lowest set bit, or size() when the vector is zero.
  std::size_t lowest_set() const noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if (words_[w] != 0) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
    }
    return nbits_;
  }

  /// Value of the first 64 entries as an integer (entry i -> bit i).
  std::uint64_t low_word() const noexcept { return words_.empty() ? 0 : words_[0]; }

  /// Sub-vector [offset, offset + len).
  BitVec slice(std::size_t offset, std::size_t len) const {
    BitVec out(len);
    for (std::size_t i = 0; i < len; ++i) {
      if (get(offset + i)) out.set(i);
    }
    return out;
  }

  /// Concatenation (this || other).
  BitVec concat(const BitVec& other) const {
    BitVec out(nbits_ + other.nbits_);
    for (std::size_t i = 0; i < nbits_; ++i) {
      if (get(i)) out.set(i);
    }
    for (std::size_t i = 0; i < other.nbits_; ++i) {
      if (other.get(i)) out.set(nbits_ + i);
    }
    return out;
  }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nbits_; ++i) {
      if (get(i)) out.push_back(i);
    }
    return out;
  }

  /// "0101..." with entry 0 first.
  std::string to_string() const {
    std::string s(nbits_, '0');
    for (std::size_t i = 0; i < nbits_; ++i) {
      if (get(i)) s[i] = '1';
    }
    return s;
  }

  friend bool operator==(const BitVec& a, const BitVec& b) noexcept {
    return a.nbits_ == b.nbits_ && a.words_ == b.words_;
  }

  std::size_t hash() const noexcept {
    std::size_t seed = std::hash<std::size_t>{}(nbits_);
    for (auto w : words_) {
      seed ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    }
    return seed;
  }

 private:
  void check_same(const BitVec& other) const {
    if (other.nbits_ != nbits_) {
      throw InputError("bit vector length mismatch: " + std::to_string(nbits_) + " vs " +
                       std::to_string(other.nbits_));
    }
  }

  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

struct BitVecHash {
  std::size_t operator()(const BitVec& v) const noexcept { return v.hash(); }
};

}  // namespace hdqi
