#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hdqi/cli.hpp"

namespace {

using hdqi::cli::json;
using hdqi::cli::RunConfig;

void add_hamiltonian(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--ham", cfg.ham_path, "Hamiltonian file (one 'coeff PAULI' per line)")->required();
}

void add_polynomial(CLI::App* sub, RunConfig& cfg, std::string& poly_text) {
  sub->add_option("--poly", poly_text, "Polynomial coefficients a0,a1,...,al");
  sub->add_flag("--gibbs", cfg.gibbs, "Use the Gibbs polynomial for --beta and --delta");
  sub->add_option("--beta", cfg.beta, "Inverse temperature");
  sub->add_option("--delta", cfg.delta, "Gibbs trace-norm tolerance");
  sub->add_option("--degree", cfg.degree, "Force the polynomial degree");
}

void add_run(CLI::App* sub, RunConfig& cfg, std::string& decoder) {
  sub->add_option("--decoder", decoder, "auto, gaussian or table")->default_val("auto");
  sub->add_option("--seed", cfg.seed, "Seed echoed in the report")->default_val(0);
  sub->add_option("--out", cfg.out_dir, "Directory for the JSON report and dumps");
  sub->add_option("--max-qubits", cfg.max_qubits, "Cap on simulated qubits")->default_val(hdqi::kDefaultStateQubitCap);
}

int finish(const json& report, const std::string& command) {
  std::cout << report.dump(2) << std::endl;
  if (command == "gibbs" && !report.value("within_tolerance", true)) {
    return static_cast<int>(hdqi::ExitCode::kVerificationFailure);
  }
  if (command == "robustness" && report.value("violations", 0) > 0) {
    return static_cast<int>(hdqi::ExitCode::kVerificationFailure);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial-state preparation by Hamiltonian decoding: analysis, simulation and verification"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string poly_text;
  std::string decoder = "auto";
  std::string epsilons = "0";

  auto* analyze = app.add_subcommand("analyze", "Regime, code and anticommutation structure");
  add_hamiltonian(analyze, cfg);
  analyze->add_option("--poly", poly_text, "Polynomial, used only for its degree");
  analyze->add_option("--degree", cfg.degree, "Degree used for the predicted bond dimension");
  analyze->add_option("--seed", cfg.seed)->default_val(0);

  auto* graph = app.add_subcommand("graph", "Anticommutation graph and per-component cost estimates");
  add_hamiltonian(graph, cfg);
  graph->add_option("--poly", poly_text, "Polynomial, used only for its degree");
  graph->add_option("--degree", cfg.degree, "Degree s for the cost estimates");
  graph->add_option("--seed", cfg.seed)->default_val(0);

  auto* refstate = app.add_subcommand("refstate", "Build the MPS reference state and check it against the oracle");
  add_hamiltonian(refstate, cfg);
  add_polynomial(refstate, cfg, poly_text);
  refstate->add_option("--seed", cfg.seed)->default_val(0);
  refstate->add_option("--max-qubits", cfg.max_qubits)->default_val(hdqi::kDefaultStateQubitCap);

  CLI::App* runs[3];
  const char* names[3] = {"prepare", "verify", "gibbs"};
  const char* about[3] = {"Run the simulated preparation pipeline", "Run the pipeline and compare with the dense oracle",
                          "Prepare the Gibbs-state approximation and compare with exp(-beta H)"};
  for (int i = 0; i < 3; ++i) {
    runs[i] = app.add_subcommand(names[i], about[i]);
    add_hamiltonian(runs[i], cfg);
    add_polynomial(runs[i], cfg, poly_text);
    add_run(runs[i], cfg, decoder);
    runs[i]->add_flag("--dump", cfg.dump, "Also write rho.bin into --out");
  }

  auto* robustness = app.add_subcommand("robustness", "Noisy decoding trials against the 2 sqrt(epsilon) bound");
  add_hamiltonian(robustness, cfg);
  add_polynomial(robustness, cfg, poly_text);
  add_run(robustness, cfg, decoder);
  robustness->add_option("--epsilon", epsilons, "Decoder error rate, or a comma-separated sweep")->required();
  robustness->add_option("--trials", cfg.trials, "Trials per epsilon")->default_val(20);

  auto* plot = app.add_subcommand("plot", "CSV and SVG from a robustness or gibbs report");
  plot->add_option("--input", cfg.input, "Report JSON")->required();
  plot->add_option("--out", cfg.out_dir, "Output directory")->required();

  auto* generate = app.add_subcommand("generate", "Write a Hamiltonian file");
  generate->add_option("--family", cfg.family, "h1, commuting or random")->default_val("h1");
  generate->add_option("--n", cfg.gen_n, "h1: chain parameter; random: qubits")->default_val(2);
  generate->add_option("--m", cfg.gen_m, "random: number of terms")->default_val(4);
  generate->add_option("--g", cfg.gen_g, "h1: transverse coupling")->default_val(1.0);
  generate->add_option("--seed", cfg.seed)->default_val(0);
  generate->add_option("--out", cfg.out_dir, "Directory for hamiltonian.txt (stdout otherwise)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cout << hdqi::cli::error_json("UsageError", e.what()).dump(2) << std::endl;
    return static_cast<int>(hdqi::ExitCode::kInputError);
  }

  try {
    if (!poly_text.empty()) cfg.poly = hdqi::cli::parse_coefficients(poly_text);
    cfg.decoder = hdqi::parse_decoder_choice(decoder);
    cfg.epsilons = hdqi::cli::parse_coefficients(epsilons);
    if (analyze->parsed()) return finish(hdqi::cli::cmd_analyze(cfg), "analyze");
    if (graph->parsed()) return finish(hdqi::cli::cmd_graph(cfg), "graph");
    if (refstate->parsed()) return finish(hdqi::cli::cmd_refstate(cfg), "refstate");
    if (runs[0]->parsed()) return finish(hdqi::cli::cmd_prepare(cfg), "prepare");
    if (runs[1]->parsed()) return finish(hdqi::cli::cmd_verify(cfg), "verify");
    if (runs[2]->parsed()) return finish(hdqi::cli::cmd_gibbs(cfg), "gibbs");
    if (robustness->parsed()) return finish(hdqi::cli::cmd_robustness(cfg), "robustness");
    if (plot->parsed()) return finish(hdqi::cli::cmd_plot(cfg), "plot");
    if (generate->parsed()) {
      std::string text;
      const json report = hdqi::cli::cmd_generate(cfg, text);
      if (cfg.out_dir.empty()) {
        std::cout << text;
        return 0;
      }
      return finish(report, "generate");
    }
  } catch (const hdqi::Error& e) {
    std::cout << hdqi::cli::error_json(e.kind(), e.what()).dump(2) << std::endl;
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cout << hdqi::cli::error_json("InternalError", e.what()).dump(2) << std::endl;
    return static_cast<int>(hdqi::ExitCode::kVerificationFailure);
  }
  return 0;
}
