// SPDX-License-Identifier: Apache-2.0
#include "qnorm/multiplicativity.hpp"

#include <algorithm>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "qnorm/parallel.hpp"
#include "qnorm/rng.hpp"

namespace qnorm {

namespace {

MultiplicativityReport run_product_test(const SuperOp& phi, const SuperOp& omega,
                                        const NormQuery& query,
                                        const OptimizerConfig& cfg) {
  MultiplicativityReport rep;
  rep.p = query.p;
  rep.q = query.q;
  rep.cfg = cfg;
  rep.rhs_phi = norm_p_to_q(phi, query, cfg);
  rep.rhs_omega = norm_p_to_q(omega, query, cfg);
  const SuperOp product = tensor(phi, omega);
  const Matrix warm = kron(rep.rhs_phi.argmax, rep.rhs_omega.argmax);
  rep.lhs = norm_p_to_q(product, query, cfg, {warm});
  const double denom = rep.rhs_phi.value * rep.rhs_omega.value;
  rep.ratio = denom > 0.0 ? rep.lhs.value / denom : 0.0;
  return rep;
}

}  // namespace

MultiplicativityReport product_norm_test(const SuperOp& phi, const SuperOp& omega,
                                         const NormQuery& query,
                                         const OptimizerConfig& cfg) {
  return run_product_test(phi, omega, query, cfg);
}

MultiplicativityReport fm_power_test(const SuperOp& phi, const NormQuery& query,
                                     const OptimizerConfig& cfg) {
  return run_product_test(phi, phi, query, cfg);
}

MultiplicativityReport product_norm_test_escalating(const SuperOp& phi,
                                                    const SuperOp& omega,
                                                    const NormQuery& query,
                                                    const OptimizerConfig& cfg) {
  MultiplicativityReport rep = run_product_test(phi, omega, query, cfg);
  const double threshold = 1.0 + 10.0 * cfg.tol_value;
  if (rep.ratio > threshold) {
    rep = run_product_test(phi, omega, query, cfg.scaled(4));
    rep.escalated = true;
    rep.candidate = rep.ratio > threshold;
  }
  return rep;
}

Family family_from_string(const std::string& s) {
  if (s == "eb-general") return Family::eb_general;
  if (s == "eb-cond1") return Family::eb_cond1;
  if (s == "eb-cond2") return Family::eb_cond2;
  if (s == "cq") return Family::cq;
  if (s == "qc") return Family::qc;
  if (s == "cp-general") return Family::cp_general;
  throw input_error("unknown family '" + s +
                    "' (expected eb-general|eb-cond1|eb-cond2|cq|qc|cp-general)");
}

std::string to_string(Family f) {
  switch (f) {
    case Family::eb_general: return "eb-general";
    case Family::eb_cond1: return "eb-cond1";
    case Family::eb_cond2: return "eb-cond2";
    case Family::cq: return "cq";
    case Family::qc: return "qc";
    case Family::cp_general: return "cp-general";
  }
  return "?";
}

std::pair<SuperOp, SuperOp> draw_family_pair(Family family, std::uint64_t trial_seed) {
  Rng dims(derive_seed(trial_seed, 0));
  const int d_in = dims.uniform_int(2, 3);
  const int d_out = dims.uniform_int(2, 3);
  const int n_pairs = dims.uniform_int(2, 3);
  const std::uint64_t phi_seed = derive_seed(trial_seed, 1);
  const std::uint64_t omega_seed = derive_seed(trial_seed, 2);
  // Omega quantifies over "any CP map"; drawing it trace-preserving keeps
  // every norm O(1).
  SuperOp omega(random_cp_kraus(2, 2, dims.uniform_int(2, 4), omega_seed, true));

  switch (family) {
    case Family::eb_general:
      return {SuperOp(random_eb(d_in, d_out, n_pairs, EBClass::general, phi_seed, true)),
              omega};
    case Family::eb_cond1:
      return {SuperOp(random_eb(d_in, d_out, n_pairs, EBClass::cond1, phi_seed, true)),
              omega};
    case Family::eb_cond2:
      return {SuperOp(random_eb(d_in, d_out, n_pairs, EBClass::cond2, phi_seed, true)),
              omega};
    case Family::cq:
      return {SuperOp(random_eb(d_in, d_out, d_in, EBClass::cq, phi_seed, true)), omega};
    case Family::qc:
      return {SuperOp(random_eb(d_in, d_out, d_out, EBClass::qc, phi_seed, true)), omega};
    case Family::cp_general:
      return {SuperOp(random_cp_kraus(d_in, d_out, n_pairs, phi_seed, true)), omega};
  }
  throw numeric_error("unreachable");
}

std::vector<MultiplicativityReport> violation_search(Family family,
                                                     const NormQuery& query,
                                                     int n_trials,
                                                     const OptimizerConfig& cfg,
                                                     std::uint64_t seed) {
  if (n_trials < 1) throw input_error("violation_search: need at least one trial");
  std::vector<MultiplicativityReport> reports(n_trials);
  parallel_for(static_cast<std::size_t>(n_trials), [&](std::size_t t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    auto [phi, omega] = draw_family_pair(family, trial_seed);
    OptimizerConfig trial_cfg = cfg;
    trial_cfg.seed = derive_seed(trial_seed, 3);
    MultiplicativityReport rep =
        product_norm_test_escalating(phi, omega, query, trial_cfg);
    rep.family = to_string(family);
    rep.seed = trial_seed;
    rep.trial = static_cast<int>(t);
    reports[t] = std::move(rep);
  });
  std::stable_sort(reports.begin(), reports.end(),
                   [](const MultiplicativityReport& a, const MultiplicativityReport& b) {
                     return a.ratio > b.ratio;
                   });
  return reports;
}

nlohmann::json report_to_json(const MultiplicativityReport& r) {
  nlohmann::json j{{"ratio", r.ratio},
                   {"p", r.p},
                   {"q", r.q},
                   {"lhs", norm_estimate_to_json(r.lhs)},
                   {"rhs_phi", norm_estimate_to_json(r.rhs_phi)},
                   {"rhs_omega", norm_estimate_to_json(r.rhs_omega)},
                   {"escalated", r.escalated},
                   {"candidate", r.candidate},
                   {"cfg", optimizer_config_to_json(r.cfg)}};
  if (!r.family.empty()) {
    j["family"] = r.family;
    j["seed"] = r.seed;
    j["trial"] = r.trial;
  }
  return j;
}

namespace {
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string reports_to_csv(const std::vector<MultiplicativityReport>& reports) {
  std::string out = "family,p,q,seed,lhs,rhs_phi,rhs_omega,ratio\r\n";
  for (const auto& r : reports) {
    out += r.family + "," + fmt_double(r.p) + "," + fmt_double(r.q) + "," +
           std::to_string(r.seed) + "," + fmt_double(r.lhs.value) + "," +
           fmt_double(r.rhs_phi.value) + "," + fmt_double(r.rhs_omega.value) + "," +
           fmt_double(r.ratio) + "\r\n";
  }
  return out;
}

}  // namespace qnorm
