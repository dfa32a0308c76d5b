#include <gtest/gtest.h>

#include <fstream>

#include "hdqi/refstate.hpp"
#include "test_support.hpp"

namespace hdqi {
namespace {

using testing::bits_of;
using testing::symbols_of;

PauliHamiltonian load(const char* name) {
  std::ifstream in(std::string(HDQI_SAMPLES) + "/" + name);
  return parse_hamiltonian(in);
}

/// Unnormalized amplitude straight from the I_K sums: enumerate the
/// exponent vectors of independent and dependent terms separately.
double i_k_enumeration(const PauliHamiltonian& h, const BlockPartition& bp, const Polynomial& p,
                       const std::vector<int>& y) {
  const std::size_t r = bp.independent_indices.size();
  const std::size_t k = bp.dimension();
  double total = 0.0;
  for (int s = 0; s <= p.degree(); ++s) {
    // all (mu, nu) with |mu| + |nu| = s
    for_each_composition(s, r + k, [&](const std::vector<int>& exps) {
      std::vector<int> parity(r, 0);
      for (std::size_t i = 0; i < r; ++i) parity[i] = exps[i] & 1;
      for (std::size_t j = 0; j < k; ++j) {
        if (exps[r + j] & 1) {
          for (auto pos : bp.relations[j].members) parity[pos] ^= 1;
        }
      }
      if (parity != y) return;
      double w = p.coefficient(s) * multinomial(exps);
      for (std::size_t i = 0; i < r; ++i) w *= std::pow(h.term(bp.independent_indices[i]).coeff, exps[i]);
      for (std::size_t j = 0; j < k; ++j) {
        const auto& rel = bp.relations[j];
        w *= std::pow(rel.sign * h.term(rel.dependent_term).coeff, exps[r + j]);
      }
      total += w;
    });
  }
  return total;
}

TEST(CommutingMps, SingleTermLinear) {
  const auto h = parse_hamiltonian("0.6 Z\n");
  const Polynomial p({0.3, -0.8});
  const auto mps = build_commuting_mps(h, p);
  const double a0 = 0.3;
  const double a1c = -0.8 * 0.6;
  EXPECT_NEAR(mps.norm * mps.norm, a0 * a0 + a1c * a1c, 1e-15);
  EXPECT_NEAR(mps_amplitude(mps, {0}) * mps.norm, a0, 1e-15);
  EXPECT_NEAR(mps_amplitude(mps, {1}) * mps.norm, a1c, 1e-15);
}

TEST(CommutingMps, ConstantPolynomialIsAllZeros) {
  const auto h = load("ising_chain.txt");
  const auto mps = build_commuting_mps(h, Polynomial::constant(1.0));
  EXPECT_DOUBLE_EQ(mps.norm, 1.0);
  const auto sv = mps_to_statevector(mps);
  EXPECT_NEAR(std::abs(sv(0)), 1.0, 1e-15);
  EXPECT_NEAR(sv.norm(), 1.0, 1e-15);
  EXPECT_EQ(mps_amplitude(mps, {0, 0, 0, 0}), 1.0);
  EXPECT_EQ(mps_amplitude(mps, {1, 0, 0, 0}), 0.0);
}

TEST(CommutingMps, BandEntriesAndLadderDecomposition) {
  const auto h = parse_hamiltonian("0.7 ZI\n-1.3 IZ\n");
  const int l = 5;
  testing::Rng rng(3);
  const auto mps = build_commuting_mps(h, testing::random_polynomial(rng, l));
  for (std::size_t site = 0; site < 2; ++site) {
    const double c = h.term(site).coeff;
    for (int y = 0; y < 2; ++y) {
      const auto& a = mps.sites[site][static_cast<std::size_t>(y)];
      RealMatrix expect = RealMatrix::Zero(l + 1, l + 1);
      for (int k = 0; k <= l; ++k) {
        if (k % 2 == y) expect += std::pow(c, k) / std::tgamma(k + 1.0) * ladder_matrix(k, l);
      }
      EXPECT_TRUE(a.isApprox(expect, 1e-15));
      for (int i = 0; i <= l; ++i) {
        for (int j = 0; j <= l; ++j) {
          const bool on_band = j >= i && (j - i) % 2 == y;
          if (!on_band) {
            EXPECT_EQ(a(i, j), 0.0);
          }
        }
      }
    }
  }
}

TEST(CommutingMps, LadderIdentity) {
  const int l = 6;
  for (int j = 0; j <= l; ++j) {
    for (int k = 0; k <= l; ++k) {
      const RealMatrix prod = ladder_matrix(j, l) * ladder_matrix(k, l);
      if (j + k <= l) {
        EXPECT_EQ(prod, ladder_matrix(j + k, l));
      } else {
        EXPECT_EQ(prod, RealMatrix::Zero(l + 1, l + 1));
      }
    }
  }
}

TEST(CommutingMps, RejectsNoncommuting) {
  try {
    build_commuting_mps(parse_hamiltonian("1 X\n1 Z\n"), Polynomial({0, 1}));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.kind(), "NoncommutingTerms");
  }
}

TEST(CommutingMps, BondDimension) {
  const auto h = load("ising_chain.txt");
  for (int l = 0; l <= 6; ++l) {
    const auto mps = build_commuting_mps(h, Polynomial::monomial(l));
    EXPECT_EQ(mps.bond_dim, predicted_bond_dim(Regime::kCommuting, l, 0));
    EXPECT_EQ(static_cast<std::size_t>(mps.sites[0][0].rows()), static_cast<std::size_t>(l) + 1);
  }
}

TEST(BuildNorm, MatchesEnumeratedOracleSum) {
  testing::Rng rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = static_cast<std::size_t>(testing::uniform_int(rng, 1, 10));
    const auto h = testing::random_commuting(rng, 6, m);
    const auto p = testing::random_polynomial(rng, testing::uniform_int(rng, 0, 5));
    const auto mps = build_commuting_mps(h, p);
    double sum = 0.0;
    for (std::uint64_t y = 0; y < (1ULL << h.num_terms()); ++y) {
      const double w = coefficient_oracle(h, p, bits_of(y, h.num_terms()), Regime::kCommuting);
      sum += w * w;
    }
    ASSERT_NEAR(mps.norm * mps.norm, sum, 1e-10 * sum);
  }
}

TEST(BuildNorm, NonpositiveNorm) {
  // P(x) = x^2 - 1 annihilates the spectrum of a single Pauli term.
  try {
    build_commuting_mps(parse_hamiltonian("1 Z\n"), Polynomial({-1, 0, 1}));
    FAIL();
  } catch (const VerificationError& e) {
    EXPECT_EQ(e.kind(), "NonpositiveNorm");
  }
}

TEST(MpsAmplitude, ArityChecks) {
  const auto mps = build_commuting_mps(parse_hamiltonian("1 ZI\n1 IZ\n"), Polynomial({1, 1}));
  EXPECT_THROW(mps_amplitude(mps, {0}), InputError);
  EXPECT_THROW(mps_amplitude(mps, {0, 2}), InputError);
}

TEST(CoefficientOracle, TrivialCases) {
  const auto h = load("ising_chain.txt");
  for (std::uint64_t y = 0; y < 16; ++y) {
    const auto yv = bits_of(y, 4);
    EXPECT_EQ(coefficient_oracle(h, Polynomial::constant(1.0), yv, Regime::kCommuting), y == 0 ? 1.0 : 0.0);
    const double lin = coefficient_oracle(h, Polynomial({0, 1}), yv, Regime::kCommuting);
    if (std::popcount(y) == 1) {
      EXPECT_DOUBLE_EQ(lin, h.term(static_cast<std::size_t>(std::countr_zero(y))).coeff);
    } else {
      EXPECT_EQ(lin, 0.0);
    }
  }
}

TEST(CommutingMps, StatevectorMatchesEnumeration) {
  testing::Rng rng(73);
  const auto h = testing::random_commuting(rng, 3, 3);
  const auto p = testing::random_polynomial(rng, 4);
  const auto mps = build_commuting_mps(h, p);
  const auto sv = mps_to_statevector(mps);
  EXPECT_NEAR(sv.norm(), 1.0, 1e-12);
  for (std::uint64_t y = 0; y < 8; ++y) {
    EXPECT_NEAR(sv(static_cast<Eigen::Index>(y)).real(), mps_amplitude(mps, symbols_of(y, 3)), 1e-15);
    EXPECT_EQ(sv(static_cast<Eigen::Index>(y)).imag(), 0.0);
  }
}

TEST(NearlyIndepMps, ProductOfAllIndependentTerms) {
  // c1 P1 + c2 P2 + c3 P3 + c4 P1 P2 P3
  const auto h = parse_hamiltonian("0.5 ZII\n-0.7 IXI\n0.3 IIZ\n0.8 ZXZ\n");
  const auto code = build_code(h);
  const auto bp = find_block_partition(h, code);
  for (int l = 1; l <= 4; ++l) {
    const auto p = Polynomial::monomial(l);
    const auto mps = build_nearly_indep_mps(h, p, bp);
    EXPECT_EQ(mps.bond_dim, 2u * (static_cast<std::size_t>(l) + 1));
    for (std::uint64_t y = 0; y < 8; ++y) {
      const auto yv = bits_of(y, 3);
      const double expect = i_k_enumeration(h, bp, p, yv);
      EXPECT_NEAR(mps_amplitude(mps, symbols_of(y, 3)) * mps.norm, expect, 1e-12);
      EXPECT_NEAR(coefficient_oracle(h, p, yv), expect, 1e-12);
    }
  }
}

TEST(NearlyIndepMps, TriangleMatchesIkEnumeration) {
  const auto h = load("triangle.txt");
  const auto bp = find_block_partition(h, build_code(h));
  testing::Rng rng(79);
  for (int l = 0; l <= 4; ++l) {
    const auto p = testing::random_polynomial(rng, l);
    const auto mps = build_nearly_indep_mps(h, p, bp);
    for (std::uint64_t y = 0; y < 4; ++y) {
      const auto yv = bits_of(y, 2);
      EXPECT_NEAR(mps_amplitude(mps, symbols_of(y, 2)) * mps.norm, i_k_enumeration(h, bp, p, yv), 1e-12);
    }
  }
}

TEST(NearlyIndepMps, Preconditions) {
  try {
    build_nearly_indep_mps(parse_hamiltonian("1 ZI\n1 IZ\n"), Polynomial({1, 1}));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.kind(), "TrivialCode");
  }
  const auto h = load("triangle.txt");
  try {
    build_nearly_indep_mps(h, Polynomial({1, 1, 1}), find_block_partition(h, build_code(h)), 5);
    FAIL();
  } catch (const CapExceeded& e) {
    EXPECT_EQ(e.kind(), "KTooLarge");
  }
  EXPECT_THROW(build_nearly_indep_mps(parse_hamiltonian("1 X\n1 Z\n1 Y\n"), Polynomial({1, 1})), InputError);
}

TEST(NearlyIndepMps, CrossRegimeFoldOfCommutingExpansion) {
  // The full commuting expansion over all m terms, with every dependent
  // factor rewritten through its relation, must reproduce the amplitudes
  // over the independent generators.
  testing::Rng rng(83);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 25; ++trial) {
    const auto h = testing::random_commuting(rng, 4, static_cast<std::size_t>(testing::uniform_int(rng, 3, 7)));
    const auto code = build_code(h);
    if (code.dimension() == 0 || code.dimension() > 3) continue;
    ++checked;
    const auto bp = find_block_partition(h, code);
    const auto p = testing::random_polynomial(rng, testing::uniform_int(rng, 1, 4));
    const auto mps = build_nearly_indep_mps(h, p, bp);
    const std::size_t m = h.num_terms();
    const std::size_t r = bp.independent_indices.size();
    std::vector<std::size_t> pos_of(m, 0);
    for (std::size_t i = 0; i < r; ++i) pos_of[bp.independent_indices[i]] = i;
    std::vector<double> folded(std::size_t{1} << r, 0.0);
    for (std::uint64_t y = 0; y < (1ULL << m); ++y) {
      const auto yv = bits_of(y, m);
      double w = coefficient_oracle(h, p, yv, Regime::kCommuting);
      std::uint64_t idx = 0;
      for (std::size_t i = 0; i < r; ++i) idx ^= static_cast<std::uint64_t>(yv[bp.independent_indices[i]]) << i;
      for (const auto& rel : bp.relations) {
        if (!yv[rel.dependent_term]) continue;
        w *= rel.sign;
        for (auto pos : rel.members) idx ^= std::uint64_t{1} << pos;
      }
      folded[idx] += w;
    }
    // Both sides carry their own normalization; compare normalized vectors.
    double nrm = 0.0;
    for (double v : folded) nrm += v * v;
    nrm = std::sqrt(nrm);
    const auto amps = mps_amplitudes(mps);
    for (std::size_t idx = 0; idx < folded.size(); ++idx) {
      ASSERT_NEAR(amps(static_cast<Eigen::Index>(idx)), folded[idx] / nrm, 1e-10);
    }
  }
  EXPECT_GE(checked, 10);
}

TEST(NoncommutingMps, AnticommutingPairSquare) {
  const auto h = load("pair_xz.txt");
  const auto mps = build_noncommuting_mps(h, Polynomial({0, 0, 1}));
  ASSERT_EQ(mps.num_sites(), 1u);
  EXPECT_EQ(mps.arities[0], 4u);
  EXPECT_EQ(mps.bond_dim, 3u);
  EXPECT_NEAR(mps_amplitude(mps, {0}) * mps.norm, 0.36 + 0.64, 1e-15);
  EXPECT_NEAR(mps_amplitude(mps, {3}), 0.0, 1e-15);
}

TEST(NoncommutingMps, EdgelessGraphMatchesCommutingBuilder) {
  testing::Rng rng(89);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = testing::random_commuting(rng, 4, static_cast<std::size_t>(testing::uniform_int(rng, 1, 6)));
    const auto p = testing::random_polynomial(rng, testing::uniform_int(rng, 0, 5));
    const auto a = build_commuting_mps(h, p);
    const auto b = build_noncommuting_mps(h, p);
    ASSERT_EQ(b.num_sites(), h.num_terms());
    ASSERT_TRUE(mps_amplitudes(a).isApprox(mps_amplitudes(b), 1e-12));
  }
}

TEST(NoncommutingMps, H1Structure) {
  const auto h = load("h1_n2_g1.txt");
  const auto mps = build_noncommuting_mps(h, Polynomial({0.2, 0.4, 0.3, -0.1}));
  ASSERT_EQ(mps.num_sites(), 2u);
  EXPECT_EQ(mps.arities, (std::vector<std::size_t>{8, 8}));
  EXPECT_EQ(mps.bond_dim, 4u);
  EXPECT_EQ(mps.site_terms[0], (std::vector<std::size_t>{0, 1, 4}));
  EXPECT_EQ(mps.site_terms[1], (std::vector<std::size_t>{2, 3, 5}));
}

TEST(NoncommutingMps, RegisterOrderMatchesTermOrder) {
  const auto h = load("h1_n2_g0.5.txt");
  const auto p = Polynomial({0.2, 0.4, 0.3});
  const auto mps = build_noncommuting_mps(h, p);
  const auto reg = register_statevector(mps);
  for (std::uint64_t y = 0; y < 64; ++y) {
    const double expect = coefficient_oracle(h, p, bits_of(y, 6)) / mps.norm;
    EXPECT_NEAR(reg(static_cast<Eigen::Index>(y)).real(), expect, 1e-12);
  }
}

TEST(NoncommutingMps, ComponentTooLarge) {
  // X_0 anticommutes with Z_0-containing terms; a star of 7 terms.
  const auto h = parse_hamiltonian("1 XIII\n1 ZIII\n1 ZXII\n1 ZZII\n1 ZIXI\n1 ZIZI\n1 ZIIX\n");
  ASSERT_EQ(anticomm_graph(h).max_component(), 7u);
  try {
    build_noncommuting_mps(h, Polynomial({1, 1}));
    FAIL();
  } catch (const CapExceeded& e) {
    EXPECT_EQ(e.kind(), "ComponentTooLarge");
  }
}

TEST(Statevector, CapExceeded) {
  const auto h = load("ising_chain.txt");
  const auto mps = build_commuting_mps(h, Polynomial({1, 1}));
  EXPECT_THROW(mps_to_statevector(mps, 3), CapExceeded);
}

TEST(RefstateProperty, BuilderOracleAgreementAllRegimes) {
  testing::Rng rng(97);
  int per_regime[3] = {0, 0, 0};
  for (int trial = 0; trial < 2000 && (per_regime[0] < 30 || per_regime[1] < 30 || per_regime[2] < 30); ++trial) {
    const std::size_t n = static_cast<std::size_t>(testing::uniform_int(rng, 1, 6));
    const std::size_t m = static_cast<std::size_t>(testing::uniform_int(rng, 1, 8));
    const int kind = trial % 3;
    PauliHamiltonian h = kind == 2 ? testing::random_bounded_components(rng, n, m, 4) : testing::random_commuting(rng, n, m);
    const auto code = build_code(h);
    const Regime regime = detect_regime(h, code);
    auto& count = per_regime[static_cast<int>(regime)];
    if (count >= 30) continue;
    const auto p = testing::random_polynomial(rng, testing::uniform_int(rng, 0, 5));
    MpsReferenceState mps;
    try {
      mps = build_reference_state(h, p);
    } catch (const VerificationError&) {
      continue;  // polynomial vanishing on the expansion
    }
    ++count;
    ASSERT_EQ(mps.bond_dim, predicted_bond_dim(regime, p.degree(), code.dimension()));
    const std::size_t bits = mps.register_qubits();
    const DenseState reg = register_statevector(mps);
    for (std::uint64_t y = 0; y < (1ULL << bits); ++y) {
      const auto yv = bits_of(y, bits);
      const double oracle = coefficient_oracle(h, p, yv, regime);
      const double amp = regime == Regime::kNoncommuting ? reg(static_cast<Eigen::Index>(y)).real()
                                                          : mps_amplitude(mps, symbols_of(y, bits));
      ASSERT_NEAR(amp * mps.norm, oracle, 1e-10);
    }
  }
  EXPECT_GE(per_regime[0], 30);
  EXPECT_GE(per_regime[1], 10);
  EXPECT_GE(per_regime[2], 30);
}

}  // namespace
}  // namespace hdqi
