// SPDX-License-Identifier: Apache-2.0
//
// qnorm: channel generation, p->q norms, multiplicativity suites,
// hypercontractivity scans and proof traces from one binary.
//
// Exit codes: 0 success, 1 assertion/property failure, 2 input error,
// 3 resource error.

#include <CLI11.hpp>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "qnorm/multiplicativity.hpp"
#include "qnorm/prooftrace.hpp"
#include "qnorm/semigroup.hpp"

using nlohmann::json;

namespace {

std::string utc_timestamp() {
  char buf[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct OutputOptions {
  bool no_timestamp = false;

  void decorate(json& j) const {
    if (!no_timestamp) j["timestamp"] = utc_timestamp();
  }
};

void add_output_options(CLI::App* cmd, OutputOptions& out) {
  cmd->add_flag("--no-timestamp", out.no_timestamp,
                "suppress timestamps for byte-reproducible output");
}

void add_optimizer_options(CLI::App* cmd, qnorm::OptimizerConfig& cfg) {
  cmd->add_option("--starts", cfg.n_starts, "optimizer starts")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", cfg.max_iter, "ascent iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--step-init", cfg.step_init, "initial line-search step");
  cmd->add_option("--tol-grad", cfg.tol_grad, "gradient stopping tolerance");
  cmd->add_option("--tol-value", cfg.tol_value, "value tolerance")
      ->check(CLI::Range(1e-12, 1.0));
  cmd->add_option("--opt-seed", cfg.seed, "optimizer start seed");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string tok = csv.substr(pos, comma == std::string::npos ? csv.size() - pos
                                                                       : comma - pos);
    if (!tok.empty()) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw qnorm::input_error("cannot parse number '" + tok + "'");
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw qnorm::input_error("empty number list");
  return out;
}

// "start:stop:step"
std::vector<double> parse_grid(const std::string& spec) {
  const std::size_t c1 = spec.find(':');
  const std::size_t c2 = spec.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw qnorm::input_error("grid must be start:stop:step, got '" + spec + "'");
  double start = 0, stop = 0, step = 0;
  try {
    start = std::stod(spec.substr(0, c1));
    stop = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(spec.substr(c2 + 1));
  } catch (const std::exception&) {
    throw qnorm::input_error("grid must be numeric start:stop:step, got '" + spec + "'");
  }
  if (step <= 0 || stop < start) throw qnorm::input_error("grid requires stop >= start, step > 0");
  std::vector<double> ts;
  for (double t = start; t <= stop + 0.5 * step; t += step) ts.push_back(t);
  return ts;
}

// ---------------------------------------------------------------------------

int cmd_gen(const std::string& cls, int d_in, int d_out, int n, std::uint64_t seed,
            bool normalize, const std::string& out_path) {
  qnorm::SuperOp channel = [&]() -> qnorm::SuperOp {
    if (cls == "cp")
      return qnorm::SuperOp(qnorm::random_cp_kraus(d_in, d_out, n, seed, normalize));
    return qnorm::SuperOp(
        qnorm::random_eb(d_in, d_out, n, qnorm::eb_class_from_string(cls), seed, normalize));
  }();
  qnorm::save_channel(channel, out_path);
  return 0;
}

int cmd_norm(const std::string& in_path, double p, double q,
             const qnorm::OptimizerConfig& cfg, const OutputOptions& out) {
  const qnorm::SuperOp channel = qnorm::load_channel(in_path);
  const qnorm::NormQuery query(p, q);
  const qnorm::NormEstimate est = qnorm::norm_p_to_q(channel, query, cfg);
  json j = qnorm::norm_estimate_to_json(est);
  j["p"] = p;
  j["q"] = q;
  out.decorate(j);
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_mult(const std::string& phi_path, const std::string& omega_path,
             const std::string& family, int trials, double p, double q,
             std::uint64_t seed, const qnorm::OptimizerConfig& cfg,
             const std::string& csv_path, const OutputOptions& out) {
  const qnorm::NormQuery query(p, q);
  std::vector<qnorm::MultiplicativityReport> reports;

  if (!family.empty()) {
    reports = qnorm::violation_search(qnorm::family_from_string(family), query, trials,
                                      cfg, seed);
  } else if (!phi_path.empty()) {
    const qnorm::SuperOp phi = qnorm::load_channel(phi_path);
    if (omega_path.empty()) {
      reports.push_back(qnorm::fm_power_test(phi, query, cfg));
    } else {
      reports.push_back(qnorm::product_norm_test_escalating(
          phi, qnorm::load_channel(omega_path), query, cfg));
    }
  } else {
    throw qnorm::input_error("mult needs either --phi or --family");
  }

  for (const auto& rep : reports) {
    json j = qnorm::report_to_json(rep);
    out.decorate(j);
    std::cout << j.dump() << "\n";
  }
  if (!csv_path.empty()) {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw qnorm::input_error("cannot write CSV file '" + csv_path + "'");
    f << qnorm::reports_to_csv(reports);
  }
  // a surviving candidate is a property failure by exit-code contract
  for (const auto& rep : reports)
    if (rep.candidate) return 1;
  return 0;
}

int cmd_hyper(int d, double p, double q, const std::string& t_grid, double t_max,
              double tol_t, double q_of_t_at, const qnorm::OptimizerConfig& cfg,
              const OutputOptions& out) {
  const qnorm::ChannelSemigroup sg = qnorm::depolarizing_semigroup(d);

  if (!t_grid.empty()) {
    const std::vector<double> ts = parse_grid(t_grid);
    std::string csv = "t,triple_norm\r\n";
    for (double t : ts) {
      const double v = qnorm::triple_norm_p_to_q(sg.evolve(t), qnorm::NormQuery(p, q), cfg);
      csv += fmt_double(t) + "," + fmt_double(v) + "\r\n";
    }
    std::cout << csv;
    return 0;
  }
  if (q_of_t_at >= 0.0) {
    const qnorm::QOfT res = qnorm::q_of_t(sg, q_of_t_at, cfg);
    json j{{"t", q_of_t_at}, {"q", res.q}, {"saturated", res.saturated}, {"d", d}};
    out.decorate(j);
    std::cout << j.dump() << "\n";
    return 0;
  }
  const double t = qnorm::contraction_time(sg, qnorm::NormQuery(p, q), cfg, t_max, tol_t);
  json j{{"t_pq", t}, {"p", p}, {"q", q}, {"d", d}};
  out.decorate(j);
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_trace(const std::string& branch, int instances, const std::string& q_list,
              std::uint64_t seed, const qnorm::OptimizerConfig& cfg,
              const OutputOptions& out) {
  const auto results = qnorm::run_trace_suite(qnorm::branch_from_string(branch), instances,
                                              parse_double_list(q_list), seed, cfg);
  bool any_hard_failure = false;
  for (const auto& inst : results) {
    for (const auto& rep : inst.reports) {
      json j = qnorm::trace_report_to_json(rep);
      j["branch"] = branch;
      j["instance"] = inst.instance;
      j["seed"] = inst.seed;
      j["q"] = inst.q;
      out.decorate(j);
      std::cout << j.dump() << "\n";
      any_hard_failure |= !rep.pass;
    }
  }
  return any_hard_failure ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for Schatten p->q norms of CP maps"};
  app.require_subcommand(1);

  qnorm::OptimizerConfig cfg;
  OutputOptions out;

  // --- gen ---
  auto* gen = app.add_subcommand("gen", "generate a random channel file");
  std::string gen_class = "general", gen_out;
  int gen_d_in = 2, gen_d_out = 2, gen_n = 2;
  std::uint64_t gen_seed = 0;
  bool gen_normalize = false;
  gen->add_option("--class", gen_class, "general|cond1|cond2|cq|qc|cp");
  gen->add_option("--d-in", gen_d_in, "input dimension");
  gen->add_option("--d-out", gen_d_out, "output dimension");
  gen->add_option("--N", gen_n, "number of pairs / Kraus operators");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_flag("--normalize", gen_normalize, "normalize the draw");
  gen->add_option("--out", gen_out, "output channel JSON path")->required();

  // --- norm ---
  auto* norm = app.add_subcommand("norm", "p->q norm of a channel file");
  std::string norm_in;
  double norm_p = 2.0, norm_q = 2.0;
  norm->add_option("--in", norm_in, "channel JSON path")->required();
  norm->add_option("--p", norm_p, "input exponent")->required();
  norm->add_option("--q", norm_q, "output exponent")->required();
  add_optimizer_options(norm, cfg);
  add_output_options(norm, out);

  // --- mult ---
  auto* mult = app.add_subcommand("mult", "multiplicativity reports");
  std::string mult_phi, mult_omega, mult_family, mult_csv;
  int mult_trials = 10;
  double mult_p = 2.0, mult_q = 3.0;
  std::uint64_t mult_seed = 0;
  mult->add_option("--phi", mult_phi, "channel JSON for Phi");
  mult->add_option("--omega", mult_omega, "channel JSON for Omega (defaults to Phi)");
  mult->add_option("--family", mult_family,
                   "eb-general|eb-cond1|eb-cond2|cq|qc|cp-general");
  mult->add_option("--trials", mult_trials, "trials per family search");
  mult->add_option("--p", mult_p, "input exponent")->required();
  mult->add_option("--q", mult_q, "output exponent")->required();
  mult->add_option("--seed", mult_seed, "trial seed");
  mult->add_option("--csv", mult_csv, "write an RFC-4180 summary here");
  add_optimizer_options(mult, cfg);
  add_output_options(mult, out);

  // --- hyper ---
  auto* hyper = app.add_subcommand("hyper", "hypercontractivity of the depolarizing flow");
  int hyper_d = 2;
  double hyper_p = 2.0, hyper_q = 4.0, hyper_t_max = 20.0, hyper_tol_t = 1e-4;
  double hyper_q_of_t = -1.0;
  std::string hyper_grid;
  hyper->add_option("--d", hyper_d, "dimension");
  hyper->add_option("--p", hyper_p, "input exponent");
  hyper->add_option("--q", hyper_q, "output exponent");
  hyper->add_option("--t-grid", hyper_grid, "emit CSV over start:stop:step");
  hyper->add_option("--t-max", hyper_t_max, "bisection range");
  hyper->add_option("--tol-t", hyper_tol_t, "bisection resolution");
  hyper->add_option("--q-of-t", hyper_q_of_t, "report q(t) at this time instead");
  add_optimizer_options(hyper, cfg);
  add_output_options(hyper, out);

  // --- trace ---
  auto* trace = app.add_subcommand("trace", "numerical proof trace");
  std::string trace_branch = "cond1", trace_qs = "2,3,4";
  int trace_instances = 10;
  std::uint64_t trace_seed = 0;
  trace->add_option("--branch", trace_branch, "cond1|cond2")->required();
  trace->add_option("--instances", trace_instances, "instance count");
  trace->add_option("--q-list", trace_qs, "comma list, assigned round-robin");
  trace->add_option("--seed", trace_seed, "suite seed");
  add_optimizer_options(trace, cfg);
  add_output_options(trace, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed())
      return cmd_gen(gen_class, gen_d_in, gen_d_out, gen_n, gen_seed, gen_normalize,
                     gen_out);
    if (norm->parsed()) return cmd_norm(norm_in, norm_p, norm_q, cfg, out);
    if (mult->parsed())
      return cmd_mult(mult_phi, mult_omega, mult_family, mult_trials, mult_p, mult_q,
                      mult_seed, cfg, mult_csv, out);
    if (hyper->parsed())
      return cmd_hyper(hyper_d, hyper_p, hyper_q, hyper_grid, hyper_t_max, hyper_tol_t,
                       hyper_q_of_t, cfg, out);
    if (trace->parsed())
      return cmd_trace(trace_branch, trace_instances, trace_qs, trace_seed, cfg, out);
  } catch (const qnorm::input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const qnorm::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const qnorm::resource_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const qnorm::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
