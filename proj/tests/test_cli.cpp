#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hdqi/cli.hpp"

namespace hdqi::cli {
namespace {

std::string sample(const char* name) { return std::string(HDQI_SAMPLES) + "/" + name; }

std::filesystem::path scratch(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / ("hdqi_test_" + std::string(name));
  std::filesystem::remove_all(dir);
  return dir;
}

json without_timing(json j) {
  j.erase("timing");
  return j;
}

TEST(Cli, ParseCoefficients) {
  EXPECT_EQ(parse_coefficients("1,-0.5, 2e-1"), (std::vector<double>{1.0, -0.5, 0.2}));
  EXPECT_THROW(parse_coefficients("1,,2"), InputError);
  EXPECT_THROW(parse_coefficients("1,x"), InputError);
}

TEST(Cli, PolynomialChoiceIsExclusive) {
  RunConfig cfg;
  cfg.ham_path = sample("ising_chain.txt");
  const auto h = load_hamiltonian(cfg.ham_path);
  try {
    resolve_polynomial(cfg, h);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.kind(), "MissingPolynomial");
  }
  cfg.poly = std::vector<double>{1.0};
  cfg.gibbs = true;
  try {
    resolve_polynomial(cfg, h);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.kind(), "ConflictingPolynomial");
  }
}

TEST(Cli, GibbsDegreeFromBound) {
  // ||H||_1 = 6 for the n = 2, g = 1 chain, so beta = 5/6 gives beta ||H||_1 = 5.
  RunConfig cfg;
  cfg.ham_path = sample("h1_n2_g1.txt");
  cfg.beta = 5.0 / 6.0;
  cfg.delta = 0.1;
  const auto report = cmd_gibbs(cfg);
  EXPECT_EQ(report["polynomial"]["bound_degree"], 8);
  EXPECT_EQ(report["polynomial"]["degree"], 8);
  EXPECT_TRUE(report["within_tolerance"].get<bool>());
  EXPECT_EQ(report["degree_sweep"].front()["degree"], 2);
}

TEST(Cli, AnalyzeCommutingIndependent) {
  RunConfig cfg;
  cfg.ham_path = sample("h1_n1_g1.txt");
  auto report = cmd_analyze(cfg);
  EXPECT_EQ(report["regime"], "noncommuting");
  const auto path = scratch("zz.txt");
  std::ofstream(path) << "0.5 ZI\n0.25 IZ\n";
  cfg.ham_path = path.string();
  cfg.degree = 3;
  report = cmd_analyze(cfg);
  EXPECT_EQ(report["regime"], "commuting");
  EXPECT_EQ(report["k"], 0);
  EXPECT_EQ(report["predicted_bond_dim"], 4);
  EXPECT_EQ(report["actual_bond_dim"], 4);
}

TEST(Cli, AnalyzeEmptyFile) {
  RunConfig cfg;
  cfg.ham_path = sample("empty.txt");
  try {
    cmd_analyze(cfg);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.kind(), "EmptyHamiltonian");
  }
  cfg.ham_path = sample("no_such_file.txt");
  EXPECT_THROW(cmd_analyze(cfg), InputError);
}

TEST(Cli, ReportsEmbedAgreeingBondDimensions) {
  RunConfig cfg;
  cfg.poly = std::vector<double>{0.3, 0.8, -0.5};
  for (const char* name : {"ising_chain.txt", "triangle.txt", "pair_xz.txt", "h1_n2_g0.5.txt"}) {
    cfg.ham_path = sample(name);
    for (const auto& report : {cmd_verify(cfg), cmd_refstate(cfg)}) {
      EXPECT_EQ(report["predicted_bond_dim"], report["actual_bond_dim"]) << name;
      EXPECT_TRUE(report.contains("paper_regime"));
      EXPECT_EQ(report["seed"], 0);
    }
  }
}

TEST(Cli, VerifyConstantPolynomial) {
  RunConfig cfg;
  cfg.ham_path = sample("ising_chain.txt");
  cfg.poly = std::vector<double>{1.0};
  const auto report = cmd_verify(cfg);
  EXPECT_LE(report["trace_distance_to_oracle"].get<double>(), 1e-10);
  EXPECT_NEAR(report["state"]["entropy"].get<double>(), std::log(8.0), 1e-10);
}

TEST(Cli, RobustnessIsDeterministicAndBounded) {
  RunConfig cfg;
  cfg.ham_path = sample("ising_chain.txt");
  cfg.poly = std::vector<double>{0.3, 0.8, -0.5};
  cfg.epsilons = {0.04};
  cfg.trials = 20;
  cfg.seed = 7;
  const auto a = cmd_robustness(cfg);
  const auto b = cmd_robustness(cfg);
  EXPECT_EQ(without_timing(a).dump(), without_timing(b).dump());
  EXPECT_EQ(a["seed"], 7);
  const auto& row = a["sweep"][0];
  EXPECT_EQ(row["distances"].size(), 20u);
  for (const auto& d : row["distances"]) EXPECT_LE(d.get<double>(), 0.4);
  EXPECT_EQ(a["violations"], 0);
  cfg.seed = 8;
  EXPECT_NE(without_timing(cmd_robustness(cfg))["sweep"][0]["distances"].dump(), row["distances"].dump());
}

TEST(Cli, PlotWritesCsvAndSvg) {
  const auto dir = scratch("plot");
  RunConfig cfg;
  cfg.ham_path = sample("ising_chain.txt");
  cfg.poly = std::vector<double>{0.3, 0.8, -0.5};
  cfg.epsilons = {0.01, 0.04, 0.09, 0.16};
  cfg.trials = 4;
  cfg.out_dir = dir.string();
  cmd_robustness(cfg);
  RunConfig plot;
  plot.input = (dir / "robustness.json").string();
  plot.out_dir = dir.string();
  const auto report = cmd_plot(plot);
  EXPECT_EQ(report["rows"], 4);
  std::ifstream csv(dir / "robustness.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "epsilon,bound,max_distance,ratio,violations");
  double prev = -1.0;
  for (std::string line; std::getline(csv, line);) {
    std::stringstream ss(line);
    std::string eps, bound;
    std::getline(ss, eps, ',');
    std::getline(ss, bound, ',');
    EXPECT_GT(std::stod(bound), prev);
    prev = std::stod(bound);
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "robustness.svg"));
}

TEST(Cli, PlotGibbsSweepIsNonincreasing) {
  const auto dir = scratch("gibbs");
  RunConfig cfg;
  cfg.ham_path = sample("h1_n1_g1.txt");
  cfg.beta = 1.0;
  cfg.delta = 0.1;
  cfg.out_dir = dir.string();
  cmd_gibbs(cfg);
  RunConfig plot;
  plot.input = (dir / "gibbs.json").string();
  plot.out_dir = dir.string();
  EXPECT_EQ(cmd_plot(plot)["rows"], 11);
  std::ifstream csv(dir / "gibbs.csv");
  std::string line;
  std::getline(csv, line);
  double prev = INFINITY;
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::string l, err;
    std::getline(ss, l, ',');
    std::getline(ss, err, ',');
    EXPECT_LE(std::stod(err), prev * (1 + 1e-9));
    prev = std::stod(err);
  }
}

TEST(Cli, PlotEmptySweep) {
  const auto dir = scratch("empty");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "r.json") << R"({"command": "robustness", "sweep": []})";
  RunConfig plot;
  plot.input = (dir / "r.json").string();
  plot.out_dir = dir.string();
  try {
    cmd_plot(plot);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.kind(), "EmptySweep");
  }
}

TEST(Cli, GeneratedChainMatchesSample) {
  for (std::size_t n : {1u, 2u, 3u}) {
    const auto h = h1_hamiltonian(n, 1.0);
    const auto s = load_hamiltonian(sample(("h1_n" + std::to_string(n) + "_g1.txt").c_str()));
    ASSERT_EQ(h.num_terms(), s.num_terms());
    for (std::size_t i = 0; i < h.num_terms(); ++i) {
      EXPECT_EQ(h.term(i).pauli, s.term(i).pauli);
      EXPECT_EQ(h.term(i).coeff, s.term(i).coeff);
    }
  }
  RunConfig cfg;
  cfg.family = "commuting";
  cfg.gen_n = 3;
  cfg.gen_m = 5;
  cfg.seed = 4;
  std::string a, b;
  cmd_generate(cfg, a);
  cmd_generate(cfg, b);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(parse_hamiltonian(a).all_commute());
}

}  // namespace
}  // namespace hdqi::cli
