#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hdqi/dense.hpp"
#include "hdqi/error.hpp"
#include "hdqi/gf2code.hpp"
#include "hdqi/oracle.hpp"
#include "hdqi/pauli.hpp"
#include "hdqi/poly.hpp"
#include "hdqi/refstate.hpp"

namespace hdqi {

/// Qubit counts of the three registers. Basis index = a | b << A | c << (A + n).
struct RegisterLayout {
  std::size_t a_qubits = 0;
  std::size_t n = 0;

  std::size_t total() const noexcept { return a_qubits + 2 * n; }
  std::uint64_t dim() const noexcept { return std::uint64_t{1} << total(); }
  std::uint64_t a_mask() const noexcept { return (std::uint64_t{1} << a_qubits) - 1; }
  std::uint64_t b_of(std::uint64_t idx) const noexcept { return (idx >> a_qubits) & ((std::uint64_t{1} << n) - 1); }
  std::uint64_t compose(std::uint64_t a, std::uint64_t b, std::uint64_t c) const noexcept {
    return a | (b << a_qubits) | (c << (a_qubits + n));
  }
};

inline void check_state(const DenseState& psi, const RegisterLayout& layout) {
  if (static_cast<std::uint64_t>(psi.size()) != layout.dim()) {
    throw InputError("state length does not match register layout", "DimensionError");
  }
}

/// 2^{-n/2} sum_y |y>_B |y>_C, with B the low n qubits.
inline DenseState bell_state(std::size_t n, std::size_t cap = kDefaultStateQubitCap) {
  check_qubit_cap(2 * n, cap, "bell_state");
  DenseState out = DenseState::Zero(static_cast<Eigen::Index>(std::uint64_t{1} << (2 * n)));
  const double amp = std::pow(2.0, -0.5 * static_cast<double>(n));
  for (std::uint64_t y = 0; y < (std::uint64_t{1} << n); ++y) out(static_cast<Eigen::Index>(y | (y << n))) = amp;
  return out;
}

/// ref_A (x) bell_BC.
inline DenseState initial_state(const DenseState& ref, const RegisterLayout& layout) {
  const DenseState bell = bell_state(layout.n);
  DenseState out = DenseState::Zero(static_cast<Eigen::Index>(layout.dim()));
  const auto a_dim = static_cast<Eigen::Index>(std::uint64_t{1} << layout.a_qubits);
  if (ref.size() != a_dim) throw InputError("reference state length does not match register A", "DimensionError");
  for (Eigen::Index bc = 0; bc < bell.size(); ++bc) {
    if (bell(bc) == cplx(0.0)) continue;
    out.segment(bc * a_dim, a_dim) = ref * bell(bc);
  }
  return out;
}

/// Register-A qubit r controls controls[r] on B. The controlled gates are
/// applied for r = A-1 down to 0, so the branch |y>_A carries
/// controls[0]^{y_0} ... controls[A-1]^{y_{A-1}} on B.
inline DenseState controlled_pauli_cascade(const DenseState& psi, const std::vector<PauliTerm>& controls,
                                           const RegisterLayout& layout) {
  check_state(psi, layout);
  if (controls.size() != layout.a_qubits) throw InputError("one control Pauli per A qubit", "DimensionError");
  DenseState cur = psi;
  DenseState next(cur.size());
  for (std::size_t r = controls.size(); r-- > 0;) {
    const PauliTerm& p = controls[r];
    if (p.num_qubits() != layout.n) throw InputError("control Pauli acts on the wrong qubit count", "DimensionError");
    for (std::uint64_t idx = 0; idx < layout.dim(); ++idx) {
      if (!((idx >> r) & 1U)) {
        next(static_cast<Eigen::Index>(idx)) = cur(static_cast<Eigen::Index>(idx));
        continue;
      }
      const std::uint64_t b = layout.b_of(idx);
      auto [bp, k] = p.apply_to_basis(b);
      const std::uint64_t out = (idx & ~(((std::uint64_t{1} << layout.n) - 1) << layout.a_qubits)) |
                                (bp << layout.a_qubits);
      next(static_cast<Eigen::Index>(out)) = i_pow(k) * cur(static_cast<Eigen::Index>(idx));
    }
    std::swap(cur, next);
  }
  return cur;
}

namespace detail {

inline void apply_cnot(DenseState& psi, std::size_t control, std::size_t target) {
  const std::uint64_t cm = std::uint64_t{1} << control;
  const std::uint64_t tm = std::uint64_t{1} << target;
  for (std::uint64_t idx = 0; idx < static_cast<std::uint64_t>(psi.size()); ++idx) {
    if ((idx & cm) && !(idx & tm)) {
      std::swap(psi(static_cast<Eigen::Index>(idx)), psi(static_cast<Eigen::Index>(idx | tm)));
    }
  }
}

inline void apply_hadamard(DenseState& psi, std::size_t qubit) {
  const std::uint64_t m = std::uint64_t{1} << qubit;
  const double s = 1.0 / std::sqrt(2.0);
  for (std::uint64_t idx = 0; idx < static_cast<std::uint64_t>(psi.size()); ++idx) {
    if (idx & m) continue;
    const cplx u = psi(static_cast<Eigen::Index>(idx));
    const cplx v = psi(static_cast<Eigen::Index>(idx | m));
    psi(static_cast<Eigen::Index>(idx)) = s * (u + v);
    psi(static_cast<Eigen::Index>(idx | m)) = s * (u - v);
  }
}

}  // namespace detail

/// CNOT B_q -> C_q then H on B_q for every q. Sends (W(alpha, beta) (x) I)|Phi_n>
/// to a phase times |alpha>_B |beta>_C, so the BC index reads as the
/// syndrome (alpha || beta).
inline DenseState bell_basis_transform(const DenseState& psi, const RegisterLayout& layout) {
  check_state(psi, layout);
  DenseState out = psi;
  for (std::size_t q = 0; q < layout.n; ++q) {
    detail::apply_cnot(out, layout.a_qubits + q, layout.a_qubits + layout.n + q);
    detail::apply_hadamard(out, layout.a_qubits + q);
  }
  return out;
}

inline DenseState inverse_bell_basis_transform(const DenseState& psi, const RegisterLayout& layout) {
  check_state(psi, layout);
  DenseState out = psi;
  for (std::size_t q = layout.n; q-- > 0;) {
    detail::apply_hadamard(out, layout.a_qubits + q);
    detail::apply_cnot(out, layout.a_qubits + q, layout.a_qubits + layout.n + q);
  }
  return out;
}

/// Imperfect decoding: the decoded word y keeps probability 1 - epsilon and
/// the remaining epsilon is spread over the single-bit flips y ^ e_i.
/// kUniform spreads it evenly; kRandom draws syndrome-dependent weights from
/// a generator seeded by (seed, syndrome).
struct NoiseModel {
  enum class Policy { kUniform, kRandom };

  double epsilon = 0.0;
  Policy policy = Policy::kUniform;
  std::uint64_t seed = 0;

  std::string policy_name() const { return policy == Policy::kUniform ? "bit-flip-uniform" : "bit-flip-random"; }

  /// (word, probability) pairs for one syndrome.
  std::vector<std::pair<std::uint64_t, double>> distribution(std::uint64_t syndrome, std::uint64_t decoded,
                                                             std::size_t bits) const {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in [0, 1)", "DomainError");
    std::vector<std::pair<std::uint64_t, double>> out{{decoded, 1.0 - epsilon}};
    if (epsilon == 0.0 || bits == 0) {
      out[0].second = 1.0;
      return out;
    }
    std::vector<double> w(bits, 1.0);
    if (policy == Policy::kRandom) {
      std::mt19937_64 rng(seed ^ (syndrome * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (auto& x : w) x = u(rng);
    }
    double total = 0.0;
    for (double x : w) total += x;
    for (std::size_t i = 0; i < bits; ++i) {
      out.emplace_back(decoded ^ (std::uint64_t{1} << i), epsilon * w[i] / total);
    }
    return out;
  }
};

/// For each computational syndrome branch s of BC, XORs decode(s) into A.
/// With noise the branch becomes sum_{y'} sqrt(p(y'|s)) |a ^ y'>.
inline DenseState apply_decoder(const DenseState& psi, const Decoder& decoder, const RegisterLayout& layout,
                                const std::optional<NoiseModel>& noise = std::nullopt) {
  check_state(psi, layout);
  if (decoder.num_terms() != layout.a_qubits || decoder.syndrome_bits() != 2 * layout.n) {
    throw InputError("decoder does not match register layout", "DimensionError");
  }
  const auto a_dim = static_cast<Eigen::Index>(std::uint64_t{1} << layout.a_qubits);
  const std::uint64_t branches = std::uint64_t{1} << (2 * layout.n);
  DenseState out = DenseState::Zero(psi.size());
  for (std::uint64_t s = 0; s < branches; ++s) {
    const auto off = static_cast<Eigen::Index>(s) * a_dim;
    const auto block = psi.segment(off, a_dim);
    if (block.squaredNorm() <= 1e-28) {
      out.segment(off, a_dim) = block;
      continue;
    }
    const BitVec y = decoder.decode(BitVec::from_u64(s, 2 * layout.n));
    const std::uint64_t f = y.low_word();
    if (!noise || noise->epsilon == 0.0) {
      for (Eigen::Index a = 0; a < a_dim; ++a) out(off + static_cast<Eigen::Index>(static_cast<std::uint64_t>(a) ^ f)) = block(a);
      continue;
    }
    for (auto [word, prob] : noise->distribution(s, f, layout.a_qubits)) {
      const double amp = std::sqrt(prob);
      for (Eigen::Index a = 0; a < a_dim; ++a) {
        out(off + static_cast<Eigen::Index>(static_cast<std::uint64_t>(a) ^ word)) += amp * block(a);
      }
    }
  }
  return out;
}

/// Reduced density matrix on `keep` (qubit positions, in output bit order).
inline DensityMatrix partial_trace(const DenseState& psi, std::size_t total_qubits,
                                   const std::vector<std::size_t>& keep) {
  if (static_cast<std::uint64_t>(psi.size()) != (std::uint64_t{1} << total_qubits)) {
    throw InputError("state length does not match qubit count", "DimensionError");
  }
  std::uint64_t keep_mask = 0;
  for (auto q : keep) keep_mask |= std::uint64_t{1} << q;
  const auto kd = static_cast<Eigen::Index>(std::uint64_t{1} << keep.size());
  const auto rd = static_cast<Eigen::Index>(std::uint64_t{1} << (total_qubits - keep.size()));
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(kd, rd);
  for (std::uint64_t idx = 0; idx < static_cast<std::uint64_t>(psi.size()); ++idx) {
    std::uint64_t k = 0;
    for (std::size_t j = 0; j < keep.size(); ++j) k |= ((idx >> keep[j]) & 1U) << j;
    std::uint64_t r = 0;
    std::size_t pos = 0;
    for (std::size_t q = 0; q < total_qubits; ++q) {
      if (keep_mask & (std::uint64_t{1} << q)) continue;
      r |= ((idx >> q) & 1U) << pos++;
    }
    m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) = psi(static_cast<Eigen::Index>(idx));
  }
  DensityMatrix rho = m * m.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

/// Partial trace of a density matrix over every qubit not in `keep`.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t total_qubits,
                                   const std::vector<std::size_t>& keep) {
  const std::uint64_t dim = std::uint64_t{1} << total_qubits;
  if (static_cast<std::uint64_t>(rho.rows()) != dim || rho.cols() != rho.rows()) {
    throw InputError("matrix size does not match qubit count", "DimensionError");
  }
  std::uint64_t keep_mask = 0;
  for (auto q : keep) keep_mask |= std::uint64_t{1} << q;
  const auto kd = static_cast<Eigen::Index>(std::uint64_t{1} << keep.size());
  DensityMatrix out = DensityMatrix::Zero(kd, kd);
  auto project = [&](std::uint64_t idx) {
    std::uint64_t k = 0;
    for (std::size_t j = 0; j < keep.size(); ++j) k |= ((idx >> keep[j]) & 1U) << j;
    return k;
  };
  for (std::uint64_t i = 0; i < dim; ++i) {
    for (std::uint64_t j = 0; j < dim; ++j) {
      if ((i & ~keep_mask) != (j & ~keep_mask)) continue;
      out(static_cast<Eigen::Index>(project(i)), static_cast<Eigen::Index>(project(j))) +=
          rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

/// Reduced state of register B.
inline DensityMatrix trace_to_b(const DenseState& psi, const RegisterLayout& layout) {
  std::vector<std::size_t> keep(layout.n);
  for (std::size_t q = 0; q < layout.n; ++q) keep[q] = layout.a_qubits + q;
  return partial_trace(psi, layout.total(), keep);
}

/// sqrt of the weight outside |0>_A.
inline double a_register_residual(const DenseState& psi, const RegisterLayout& layout) {
  double w = 0.0;
  for (std::uint64_t idx = 0; idx < layout.dim(); ++idx) {
    if (idx & layout.a_mask()) w += std::norm(psi(static_cast<Eigen::Index>(idx)));
  }
  return std::sqrt(w);
}

enum class DecoderChoice { kAuto, kGaussian, kTable };

inline DecoderChoice parse_decoder_choice(const std::string& s) {
  if (s == "auto") return DecoderChoice::kAuto;
  if (s == "gaussian") return DecoderChoice::kGaussian;
  if (s == "table") return DecoderChoice::kTable;
  throw InputError("unknown decoder '" + s + "' (expected auto, gaussian or table)", "InputError");
}

struct PipelineOptions {
  DecoderChoice decoder = DecoderChoice::kAuto;
  std::optional<NoiseModel> noise;
  std::size_t max_qubits = kDefaultStateQubitCap;
  double residual_tolerance = 1e-8;
  double norm_tolerance = 1e-10;
  std::uint64_t table_cap = kDefaultSyndromeTableCap;
};

/// Reference state, register-A control Paulis and decoder for one run.
struct PipelinePlan {
  Regime regime = Regime::kCommuting;
  MpsReferenceState mps;
  std::vector<PauliTerm> controls;
  Decoder decoder;
  RegisterLayout layout;
};

/// Regime and decoder selection. The table decoder on a commuting input with
/// dependencies keeps one A qubit per term (plain commuting expansion).
inline PipelinePlan plan_pipeline(const PauliHamiltonian& h, const Polynomial& p, const PipelineOptions& opt = {}) {
  PipelinePlan plan;
  const SymplecticCode code = build_code(h);
  plan.regime = detect_regime(h, code);
  if (plan.regime == Regime::kNearlyIndependent && opt.decoder == DecoderChoice::kTable) {
    plan.regime = Regime::kCommuting;
  }
  const std::size_t l = static_cast<std::size_t>(p.degree());
  switch (plan.regime) {
    case Regime::kCommuting:
      plan.mps = build_commuting_mps(h, p);
      break;
    case Regime::kNearlyIndependent:
      plan.mps = build_nearly_indep_mps(h, p, find_block_partition(h, code));
      break;
    default:
      plan.mps = build_noncommuting_mps(h, p);
      break;
  }
  const auto terms = plan.mps.register_terms();
  for (auto t : terms) plan.controls.push_back(h.term(t).pauli);
  const SymplecticCode reg_code = terms.size() == h.num_terms() ? code : build_code(h.subset(terms));
  const bool use_table =
      opt.decoder == DecoderChoice::kTable || (opt.decoder == DecoderChoice::kAuto && reg_code.dimension() != 0);
  plan.decoder = use_table ? Decoder::syndrome_table(reg_code, l, opt.table_cap) : Decoder::gaussian(reg_code);
  plan.layout = {terms.size(), h.num_qubits()};
  check_qubit_cap(plan.layout.total(), opt.max_qubits, "pipeline");
  return plan;
}

struct PipelineResult {
  DensityMatrix rho;
  double residual = 0.0;
  std::vector<double> stage_norms;
  std::vector<double> stage_seconds;
  Regime regime = Regime::kCommuting;
  std::size_t bond_dim = 0;
  std::size_t a_qubits = 0;
  std::size_t total_qubits = 0;
  std::string decoder_kind;
};

inline PipelineResult run_pipeline(const PipelinePlan& plan, const PipelineOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  PipelineResult res;
  res.regime = plan.regime;
  res.bond_dim = plan.mps.bond_dim;
  res.a_qubits = plan.layout.a_qubits;
  res.total_qubits = plan.layout.total();
  res.decoder_kind = plan.decoder.kind_name();
  const auto& layout = plan.layout;
  auto t0 = clock::now();
  auto stage = [&](const DenseState& psi, const char* name) {
    const double nrm = psi.norm();
    res.stage_norms.push_back(nrm);
    const auto t1 = clock::now();
    res.stage_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    t0 = t1;
    if (std::fabs(nrm - 1.0) > opt.norm_tolerance) {
      throw VerificationError("NormDrift", std::string("state norm ") + std::to_string(nrm) + " after " + name);
    }
  };

  DenseState psi = initial_state(register_statevector(plan.mps, opt.max_qubits), layout);
  stage(psi, "preparation");
  psi = controlled_pauli_cascade(psi, plan.controls, layout);
  stage(psi, "controlled Paulis");
  psi = bell_basis_transform(psi, layout);
  stage(psi, "Bell transform");
  psi = apply_decoder(psi, plan.decoder, layout, opt.noise);
  stage(psi, "decoding");
  res.residual = a_register_residual(psi, layout);
  const bool perfect = !opt.noise || opt.noise->epsilon == 0.0;
  if (perfect && res.residual > opt.residual_tolerance) {
    throw VerificationError("ResidualOnA", "register A kept weight " + std::to_string(res.residual) +
                                               " outside |0> after decoding");
  }
  psi = inverse_bell_basis_transform(psi, layout);
  stage(psi, "inverse Bell transform");
  res.rho = trace_to_b(psi, layout);
  return res;
}

inline PipelineResult run_pipeline(const PauliHamiltonian& h, const Polynomial& p, const PipelineOptions& opt = {}) {
  return run_pipeline(plan_pipeline(h, p, opt), opt);
}

}  // namespace hdqi
