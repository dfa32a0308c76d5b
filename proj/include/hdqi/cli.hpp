#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdqi/betafn.hpp"
#include "hdqi/gf2code.hpp"
#include "hdqi/oracle.hpp"
#include "hdqi/pauli.hpp"
#include "hdqi/poly.hpp"
#include "hdqi/refstate.hpp"
#include "hdqi/simulator.hpp"

namespace hdqi::cli {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::string ham_path;
  std::optional<std::vector<double>> poly;
  bool gibbs = false;
  std::optional<double> beta;
  std::optional<double> delta;
  std::optional<int> degree;
  DecoderChoice decoder = DecoderChoice::kAuto;
  std::vector<double> epsilons{0.0};
  int trials = 20;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool dump = false;
  std::size_t max_qubits = kDefaultStateQubitCap;
  // plot
  std::string input;
  // generate
  std::string family = "h1";
  std::size_t gen_n = 2;
  std::size_t gen_m = 4;
  double gen_g = 1.0;
};

inline std::vector<double> parse_coefficients(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size()) throw InputError("bad coefficient '" + item + "'", "ParseError");
    out.push_back(v);
  }
  if (out.empty()) throw InputError("empty coefficient list", "ParseError");
  return out;
}

inline PauliHamiltonian load_hamiltonian(const std::string& path) {
  if (path.empty()) throw InputError("--ham is required", "MissingArgument");
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'", "FileNotFound");
  return parse_hamiltonian(in);
}

/// Polynomial and the Gibbs bookkeeping that produced it, if any.
struct PolynomialChoice {
  Polynomial poly;
  std::optional<GibbsDegreeChoice> gibbs;
  json report;
};

inline PolynomialChoice resolve_polynomial(const RunConfig& cfg, const PauliHamiltonian& h) {
  if (cfg.poly && cfg.gibbs) throw InputError("give either --poly or --gibbs, not both", "ConflictingPolynomial");
  if (!cfg.poly && !cfg.gibbs) throw InputError("a polynomial is required (--poly or --gibbs)", "MissingPolynomial");
  PolynomialChoice out;
  if (cfg.poly) {
    out.poly = Polynomial(*cfg.poly);
    out.report = {{"source", "explicit"}};
  } else {
    if (!cfg.beta || !cfg.delta) throw InputError("--gibbs needs --beta and --delta", "MissingArgument");
    const double bound = h.l1_norm();
    GibbsDegreeChoice choice;
    if (cfg.degree) {
      choice.bound_degree = gibbs_degree_bound(*cfg.beta, bound, *cfg.delta);
      choice.degree = *cfg.degree;
      choice.approx = gibbs_polynomial(*cfg.beta, bound, *cfg.degree);
      choice.certificate = gibbs_trace_norm_certificate(choice.approx.sup_error, *cfg.beta, bound);
    } else {
      choice = select_gibbs_degree(*cfg.beta, bound, *cfg.delta);
    }
    out.poly = choice.approx.poly;
    out.report = {{"source", "gibbs"},
                  {"beta", *cfg.beta},
                  {"delta", *cfg.delta},
                  {"norm_bound", bound},
                  {"bound_degree", choice.bound_degree},
                  {"certified_degree", choice.certified_degree},
                  {"degree", choice.degree},
                  {"degree_forced", cfg.degree.has_value()},
                  {"sup_error", choice.approx.sup_error},
                  {"certificate", choice.certificate}};
    out.gibbs = std::move(choice);
  }
  out.report["degree"] = out.poly.degree();
  out.report["coefficients"] = out.poly.coefficients();
  return out;
}

inline std::string predicted_formula(Regime r) { return r == Regime::kNearlyIndependent ? "2^k(l+1)" : "l+1"; }

inline json hamiltonian_json(const RunConfig& cfg, const PauliHamiltonian& h) {
  return {{"path", cfg.ham_path}, {"n", h.num_qubits()}, {"m", h.num_terms()}, {"l1_norm", h.l1_norm()}};
}

inline json components_json(const AnticommGraph& g) {
  json out = json::array();
  for (const auto& comp : g.components()) {
    out.push_back({{"terms", comp}, {"size", comp.size()}, {"edges", g.edges_within(comp)}});
  }
  return out;
}

inline json cmd_analyze(const RunConfig& cfg) {
  const auto h = load_hamiltonian(cfg.ham_path);
  const auto code = build_code(h);
  const Regime regime = detect_regime(h, code);
  const auto g = anticomm_graph(h);
  int l = 1;
  if (cfg.degree) {
    l = *cfg.degree;
  } else if (cfg.poly) {
    l = Polynomial(*cfg.poly).degree();
  }
  json out;
  out["command"] = "analyze";
  out["seed"] = cfg.seed;
  out["hamiltonian"] = hamiltonian_json(cfg, h);
  out["n"] = h.num_qubits();
  out["m"] = h.num_terms();
  out["regime"] = regime_name(regime);
  out["all_commute"] = h.all_commute();
  out["rank"] = code.rank();
  out["k"] = code.dimension();
  if (regime == Regime::kNearlyIndependent) {
    const auto bp = find_block_partition(h, code);
    json rel = json::array();
    for (const auto& r : bp.relations) {
      std::vector<std::size_t> members;
      for (auto pos : r.members) members.push_back(bp.independent_indices[pos]);
      rel.push_back({{"dependent_term", r.dependent_term}, {"product_of", members}, {"sign", r.sign}});
    }
    json blocks = json::array();
    for (const auto& b : bp.blocks) {
      std::vector<std::size_t> terms;
      for (auto pos : b) terms.push_back(bp.independent_indices[pos]);
      blocks.push_back(terms);
    }
    out["independent_terms"] = bp.independent_indices;
    out["blocks"] = blocks;
    out["relations"] = rel;
  }
  out["edges"] = g.num_edges();
  out["components"] = components_json(g);
  out["max_component"] = g.max_component();
  out["degree"] = l;
  out["paper_regime"] = regime_name(regime);
  out["predicted_bond_dim_formula"] = predicted_formula(regime);
  out["predicted_bond_dim"] = predicted_bond_dim(regime, l, code.dimension());
  try {
    const auto mps = build_reference_state(h, Polynomial(std::vector<double>(static_cast<std::size_t>(l) + 1, 1.0)));
    out["actual_bond_dim"] = mps.bond_dim;
  } catch (const CapExceeded& e) {
    out["actual_bond_dim"] = nullptr;
    out["builder_error"] = {{"error_kind", e.kind()}, {"detail", e.what()}};
  }
  return out;
}

inline json cmd_graph(const RunConfig& cfg) {
  const auto h = load_hamiltonian(cfg.ham_path);
  const auto g = anticomm_graph(h);
  const int s = cfg.degree ? *cfg.degree : (cfg.poly ? Polynomial(*cfg.poly).degree() : 1);
  json out;
  out["command"] = "graph";
  out["seed"] = cfg.seed;
  out["hamiltonian"] = hamiltonian_json(cfg, h);
  out["vertices"] = h.num_terms();
  json edges = json::array();
  for (auto [u, v] : g.edges()) edges.push_back({u, v});
  out["edges"] = edges;
  json comps = components_json(g);
  for (auto& c : comps) {
    const int size = c["size"].get<int>();
    json costs = json::array();
    for (int w = s % 2; w <= std::min(s, size); w += 2) {
      costs.push_back({{"weight", w}, {"cost_estimate", beta_cost_estimate(size, s, w)}});
    }
    c["cost_estimates"] = costs;
  }
  out["degree"] = s;
  out["components"] = comps;
  out["max_component"] = g.max_component();
  const Regime regime = detect_regime(h);
  out["paper_regime"] = regime_name(regime);
  out["predicted_bond_dim"] = predicted_bond_dim(regime, s, build_code(h).dimension());
  return out;
}

inline void attach_bond(json& out, Regime regime, const MpsReferenceState& mps) {
  out["paper_regime"] = regime_name(regime);
  out["predicted_bond_dim"] = predicted_bond_dim(regime, mps.degree, mps.code_dimension);
  out["actual_bond_dim"] = mps.bond_dim;
}

inline json cmd_refstate(const RunConfig& cfg) {
  const auto h = load_hamiltonian(cfg.ham_path);
  const auto chosen = resolve_polynomial(cfg, h);
  const auto t0 = std::chrono::steady_clock::now();
  const Regime regime = detect_regime(h);
  const auto mps = build_reference_state(h, chosen.poly);
  json out;
  out["command"] = "refstate";
  out["seed"] = cfg.seed;
  out["hamiltonian"] = hamiltonian_json(cfg, h);
  out["polynomial"] = chosen.report;
  out["regime"] = regime_name(regime);
  attach_bond(out, regime, mps);
  out["sites"] = mps.num_sites();
  out["arities"] = mps.arities;
  out["site_terms"] = mps.site_terms;
  out["norm"] = mps.norm;
  if (mps_dimension(mps, std::min<std::size_t>(cfg.max_qubits, 16))) {
    const RealVector amps = mps_amplitudes(mps);
    const std::size_t bits = mps.register_qubits();
    const DenseState reg = register_statevector(mps);
    double worst = 0.0;
    for (std::uint64_t y = 0; y < (std::uint64_t{1} << bits); ++y) {
      std::vector<int> yv(bits);
      for (std::size_t i = 0; i < bits; ++i) yv[i] = static_cast<int>((y >> i) & 1U);
      const double oracle = coefficient_oracle(h, chosen.poly, yv, regime);
      worst = std::max(worst, std::abs(reg(static_cast<Eigen::Index>(y)).real() * mps.norm - oracle));
    }
    out["max_oracle_error"] = worst;
    out["amplitudes"] = std::vector<double>(amps.data(), amps.data() + amps.size());
  }
  out["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  return out;
}

inline json state_summary(const DensityMatrix& rho, const PauliHamiltonian& h) {
  return {{"trace", rho.trace().real()},
          {"purity", purity(rho)},
          {"energy", expectation(rho, dense_hamiltonian(h))},
          {"entropy", von_neumann_entropy(rho)}};
}

inline PipelineOptions pipeline_options(const RunConfig& cfg) {
  PipelineOptions opt;
  opt.decoder = cfg.decoder;
  opt.max_qubits = cfg.max_qubits;
  return opt;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'", "OutputError");
  out << text;
}

/// Row-major complex128 dump preceded by the dimension as uint64.
inline void write_density_dump(const std::filesystem::path& path, const DensityMatrix& rho) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'", "OutputError");
  const std::uint64_t dim = static_cast<std::uint64_t>(rho.rows());
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      const double re = rho(i, j).real();
      const double im = rho(i, j).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(re));
      out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  }
}

struct Prepared {
  PauliHamiltonian h;
  PolynomialChoice chosen;
  PipelinePlan plan;
  PipelineResult result;
  json report;
};

inline Prepared run_prepare(const RunConfig& cfg, const std::string& command) {
  Prepared p{load_hamiltonian(cfg.ham_path), {}, {}, {}, {}};
  p.chosen = resolve_polynomial(cfg, p.h);
  const auto opt = pipeline_options(cfg);
  p.plan = plan_pipeline(p.h, p.chosen.poly, opt);
  p.result = run_pipeline(p.plan, opt);
  json& out = p.report;
  out["command"] = command;
  out["seed"] = cfg.seed;
  out["hamiltonian"] = hamiltonian_json(cfg, p.h);
  out["polynomial"] = p.chosen.report;
  out["regime"] = regime_name(p.result.regime);
  attach_bond(out, p.result.regime, p.plan.mps);
  out["decoder"] = p.result.decoder_kind;
  out["a_qubits"] = p.result.a_qubits;
  out["total_qubits"] = p.result.total_qubits;
  out["residual"] = p.result.residual;
  out["stage_norms"] = p.result.stage_norms;
  out["state"] = state_summary(p.result.rho, p.h);
  double total = 0.0;
  for (double s : p.result.stage_seconds) total += s;
  out["timing"] = {{"stage_seconds", p.result.stage_seconds}, {"total_seconds", total}};
  return p;
}

inline void emit_files(const RunConfig& cfg, const json& report, const DensityMatrix* rho) {
  if (cfg.out_dir.empty()) {
    if (cfg.dump) throw InputError("--dump needs --out", "MissingArgument");
    return;
  }
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);
  write_text(dir / (report["command"].get<std::string>() + ".json"), report.dump(2) + "\n");
  if (cfg.dump && rho) write_density_dump(dir / "rho.bin", *rho);
}

inline json cmd_prepare(const RunConfig& cfg) {
  auto p = run_prepare(cfg, "prepare");
  emit_files(cfg, p.report, &p.result.rho);
  return p.report;
}

inline void attach_oracle(json& out, const DensityMatrix& rho, const DensityMatrix& oracle, const std::string& suffix) {
  out["trace_distance_to_" + suffix] = trace_distance(rho, oracle);
  out["trace_norm_distance_to_" + suffix] = trace_norm_distance(rho, oracle);
  out["fidelity_to_" + suffix] = fidelity(rho, oracle);
}

inline json cmd_verify(const RunConfig& cfg) {
  auto p = run_prepare(cfg, "verify");
  const DensityMatrix oracle = p.chosen.gibbs ? gibbs_oracle(p.h, *cfg.beta) : rho_poly_oracle(p.h, p.chosen.poly);
  attach_oracle(p.report, p.result.rho, oracle, "oracle");
  p.report["oracle"] = p.chosen.gibbs ? "gibbs" : "polynomial";
  if (p.chosen.gibbs) attach_oracle(p.report, p.result.rho, rho_poly_oracle(p.h, p.chosen.poly), "polynomial_oracle");
  emit_files(cfg, p.report, &p.result.rho);
  return p.report;
}

inline json cmd_gibbs(const RunConfig& cfg) {
  RunConfig g = cfg;
  if (g.poly) throw InputError("gibbs derives its own polynomial; drop --poly", "ConflictingPolynomial");
  g.gibbs = true;
  auto p = run_prepare(g, "gibbs");
  const auto h = p.h;
  const DensityMatrix target = gibbs_oracle(h, *g.beta);
  attach_oracle(p.report, p.result.rho, target, "gibbs");
  const double dist = trace_norm_distance(p.result.rho, target);
  p.report["tolerance"] = 2.0 * *g.delta;
  p.report["within_tolerance"] = dist <= 2.0 * *g.delta;
  json sweep = json::array();
  const int top = std::max(12, p.chosen.poly.degree());
  for (int l = 2; l <= std::min(top, kMaxPolynomialDegree); ++l) {
    const auto approx = gibbs_polynomial(*g.beta, h.l1_norm(), l);
    json row = {{"degree", l},
                {"sup_error", approx.sup_error},
                {"certificate", gibbs_trace_norm_certificate(approx.sup_error, *g.beta, h.l1_norm())}};
    try {
      row["trace_norm_distance"] = trace_norm_distance(rho_poly_oracle(h, approx.poly), target);
    } catch (const VerificationError&) {
      row["trace_norm_distance"] = nullptr;
    }
    sweep.push_back(row);
  }
  p.report["degree_sweep"] = sweep;
  emit_files(g, p.report, &p.result.rho);
  if (!p.report["within_tolerance"].get<bool>()) {
    p.report["warning"] = "distance to the Gibbs state exceeds 2*delta";
  }
  return p.report;
}

inline json cmd_robustness(const RunConfig& cfg) {
  const auto h = load_hamiltonian(cfg.ham_path);
  const auto chosen = resolve_polynomial(cfg, h);
  if (cfg.trials <= 0) throw InputError("--trials must be positive", "DomainError");
  const auto t0 = std::chrono::steady_clock::now();
  auto opt = pipeline_options(cfg);
  const auto plan = plan_pipeline(h, chosen.poly, opt);
  const DensityMatrix ideal = run_pipeline(plan, opt).rho;
  const DensityMatrix oracle = rho_poly_oracle(h, chosen.poly);
  json sweep = json::array();
  int violations_total = 0;
  for (double eps : cfg.epsilons) {
    if (!(eps >= 0.0 && eps < 1.0)) throw InputError("epsilon must lie in [0, 1)", "DomainError");
    const double bound = 2.0 * std::sqrt(eps);
    std::vector<double> dists;
    std::vector<std::uint64_t> seeds;
    int violations = 0;
    for (int t = 0; t < cfg.trials; ++t) {
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(t);
      opt.noise = NoiseModel{eps, NoiseModel::Policy::kRandom, seed};
      const double d = trace_norm_distance(run_pipeline(plan, opt).rho, ideal);
      if (d > bound + 1e-12) ++violations;
      dists.push_back(d);
      seeds.push_back(seed);
    }
    const double worst = *std::max_element(dists.begin(), dists.end());
    violations_total += violations;
    sweep.push_back({{"epsilon", eps},
                     {"bound", bound},
                     {"distances", dists},
                     {"trial_seeds", seeds},
                     {"max_distance", worst},
                     {"ratio", bound > 0.0 ? worst / bound : 0.0},
                     {"violations", violations}});
  }
  json out;
  out["command"] = "robustness";
  out["seed"] = cfg.seed;
  out["hamiltonian"] = hamiltonian_json(cfg, h);
  out["polynomial"] = chosen.report;
  out["regime"] = regime_name(plan.regime);
  attach_bond(out, plan.regime, plan.mps);
  out["decoder"] = plan.decoder.kind_name();
  out["noise_policy"] = NoiseModel{0.0, NoiseModel::Policy::kRandom, 0}.policy_name();
  out["trials"] = cfg.trials;
  out["ideal_trace_norm_distance_to_oracle"] = trace_norm_distance(ideal, oracle);
  out["sweep"] = sweep;
  out["violations"] = violations_total;
  out["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  emit_files(cfg, out, nullptr);
  return out;
}

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string colour;
};

inline std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                            const std::vector<Series>& series, bool log_y) {
  const double w = 640, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto ty = [&](double v) { return log_y ? std::log10(std::max(v, 1e-300)) : v; };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  if (!log_y) y0 = std::min(y0, 0.0);
  auto px = [&](double v) { return ml + (v - x0) / (x1 - x0) * (w - ml - mr); };
  auto py = [&](double v) { return h - mb - (ty(v) - y0) / (y1 - y0) * (h - mt - mb); };
  std::ostringstream svg;
  svg << std::setprecision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel
      << "</text>\n";
  svg << "<text x=\"16\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << h / 2 << ")\">" << ylabel << (log_y ? " (log10)" : "") << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4;
    const double yv = y0 + (y1 - y0) * i / 4;
    svg << "<text x=\"" << px(xv) << "\" y=\"" << h - mb + 16 << "\" text-anchor=\"middle\" font-size=\"10\">" << xv
        << "</text>\n";
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << h - mb - (yv - y0) / (y1 - y0) * (h - mt - mb) + 3
        << "\" text-anchor=\"end\" font-size=\"10\">" << yv << "</text>\n";
  }
  double ly = mt + 8;
  for (const auto& s : series) {
    svg << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) svg << px(s.x[i]) << "," << py(s.y[i]) << " ";
    svg << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"2.5\" fill=\"" << s.colour
          << "\"/>\n";
    }
    svg << "<text x=\"" << w - mr - 150 << "\" y=\"" << ly << "\" font-size=\"11\" fill=\"" << s.colour << "\">"
        << s.label << "</text>\n";
    ly += 14;
  }
  svg << "</svg>\n";
  return svg.str();
}

inline json cmd_plot(const RunConfig& cfg) {
  if (cfg.input.empty()) throw InputError("--input is required", "MissingArgument");
  if (cfg.out_dir.empty()) throw InputError("--out is required", "MissingArgument");
  std::ifstream in(cfg.input);
  if (!in) throw InputError("cannot open '" + cfg.input + "'", "FileNotFound");
  json report;
  try {
    report = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(std::string("input is not valid JSON: ") + e.what(), "ParseError");
  }
  const std::string kind = report.value("command", "");
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);
  std::ostringstream csv;
  csv << std::setprecision(17);
  std::string svg;
  std::size_t rows = 0;
  if (kind == "robustness") {
    const auto& sweep = report["sweep"];
    if (!sweep.is_array() || sweep.empty()) throw InputError("robustness report has an empty sweep", "EmptySweep");
    Series measured{"max measured", {}, {}, "#1f5fa8"};
    Series bound{"2 sqrt(eps)", {}, {}, "#c0392b"};
    csv << "epsilon,bound,max_distance,ratio,violations\n";
    for (const auto& row : sweep) {
      const double eps = row["epsilon"].get<double>();
      csv << eps << "," << row["bound"].get<double>() << "," << row["max_distance"].get<double>() << ","
          << row["ratio"].get<double>() << "," << row["violations"].get<int>() << "\n";
      measured.x.push_back(eps);
      measured.y.push_back(row["max_distance"].get<double>());
      bound.x.push_back(eps);
      bound.y.push_back(row["bound"].get<double>());
      ++rows;
    }
    svg = svg_plot("Trace-norm distance vs decoder error", "epsilon", "distance", {bound, measured}, false);
  } else if (kind == "gibbs") {
    const auto& sweep = report["degree_sweep"];
    if (!sweep.is_array() || sweep.empty()) throw InputError("gibbs report has an empty degree sweep", "EmptySweep");
    Series err{"certified sup error", {}, {}, "#1f5fa8"};
    Series dist{"distance to Gibbs", {}, {}, "#c0392b"};
    csv << "degree,sup_error,certificate,trace_norm_distance\n";
    for (const auto& row : sweep) {
      const double l = row["degree"].get<double>();
      csv << row["degree"].get<int>() << "," << row["sup_error"].get<double>() << ","
          << row["certificate"].get<double>() << ",";
      err.x.push_back(l);
      err.y.push_back(row["sup_error"].get<double>());
      if (row["trace_norm_distance"].is_number()) {
        csv << row["trace_norm_distance"].get<double>();
        dist.x.push_back(l);
        dist.y.push_back(row["trace_norm_distance"].get<double>());
      }
      csv << "\n";
      ++rows;
    }
    svg = svg_plot("Gibbs approximation vs degree", "degree l", "error", {err, dist}, true);
  } else {
    throw InputError("plot needs a robustness or gibbs report, got '" + kind + "'", "InputError");
  }
  write_text(dir / (kind + ".csv"), csv.str());
  write_text(dir / (kind + ".svg"), svg);
  return {{"command", "plot"},
          {"seed", report.value("seed", std::uint64_t{0})},
          {"input", cfg.input},
          {"kind", kind},
          {"rows", rows},
          {"csv", (dir / (kind + ".csv")).string()},
          {"svg", (dir / (kind + ".svg")).string()}};
}

/// Z_i Z_{i+1} chain on 2n+1 qubits plus g X on every second interior site.
inline PauliHamiltonian h1_hamiltonian(std::size_t n, double g) {
  if (n == 0) throw InputError("n must be positive", "DomainError");
  const std::size_t q = 2 * n + 1;
  std::vector<PauliHamiltonian::Term> terms;
  for (std::size_t i = 0; i + 1 < q; ++i) {
    std::string s(q, 'I');
    s[i] = s[i + 1] = 'Z';
    terms.push_back({1.0, parse_pauli(s)});
  }
  for (std::size_t i = 1; i <= n; ++i) {
    std::string s(q, 'I');
    s[2 * i - 1] = 'X';
    terms.push_back({g, parse_pauli(s)});
  }
  return PauliHamiltonian(q, std::move(terms));
}

inline PauliHamiltonian random_instance(std::size_t n, std::size_t m, bool commuting, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> letter(0, 3);
  std::vector<PauliHamiltonian::Term> terms;
  std::vector<PauliTerm> seen;
  for (int attempt = 0; attempt < 2000 && terms.size() < m; ++attempt) {
    std::string s(n, 'I');
    for (auto& ch : s) ch = "IXYZ"[letter(rng)];
    const auto p = parse_pauli(s);
    if (p.is_identity()) continue;
    bool ok = true;
    for (const auto& o : seen) ok = ok && !(o == p) && (!commuting || commutes(o, p));
    if (!ok) continue;
    seen.push_back(p);
    double c = coef(rng);
    if (std::abs(c) < 0.05) c = c < 0 ? -0.05 : 0.05;
    terms.push_back({c, p});
  }
  return PauliHamiltonian(n, std::move(terms));
}

inline json cmd_generate(const RunConfig& cfg, std::string& text) {
  PauliHamiltonian h;
  if (cfg.family == "h1") {
    h = h1_hamiltonian(cfg.gen_n, cfg.gen_g);
  } else if (cfg.family == "commuting" || cfg.family == "random") {
    h = random_instance(cfg.gen_n, cfg.gen_m, cfg.family == "commuting", cfg.seed);
  } else {
    throw InputError("unknown family '" + cfg.family + "' (expected h1, commuting or random)", "InputError");
  }
  std::ostringstream os;
  os << "# family " << cfg.family << " n " << cfg.gen_n;
  if (cfg.family == "h1") {
    os << " g " << cfg.gen_g;
  } else {
    os << " m " << cfg.gen_m << " seed " << cfg.seed;
  }
  os << "\n";
  write_hamiltonian(os, h);
  text = os.str();
  json out = {{"command", "generate"},
              {"seed", cfg.seed},
              {"family", cfg.family},
              {"n", h.num_qubits()},
              {"m", h.num_terms()},
              {"regime", regime_name(detect_regime(h))}};
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(std::filesystem::path(cfg.out_dir));
    const auto path = std::filesystem::path(cfg.out_dir) / "hamiltonian.txt";
    write_text(path, text);
    out["path"] = path.string();
  }
  return out;
}

inline json error_json(const std::string& kind, const std::string& detail) {
  return {{"error_kind", kind}, {"detail", detail}};
}

}  // namespace hdqi::cli
