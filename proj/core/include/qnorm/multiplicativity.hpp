// SPDX-License-Identifier: Apache-2.0
#ifndef QNORM_MULTIPLICATIVITY_HPP
#define QNORM_MULTIPLICATIVITY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qnorm/norms.hpp"

namespace qnorm {

// One product-map comparison: ||Phi (x) Omega||_{p->q} against
// ||Phi||_{p->q} ||Omega||_{p->q}. The product optimizer is warm-started
// with kron(argmax_phi, argmax_omega), which pins ratio >= 1 up to
// optimizer tolerance. A ratio above 1 + 10*tol_value survives a 4x budget
// escalation before it is archived as a candidate; candidates stay
// non-conclusive because every side is a lower bound.
struct MultiplicativityReport {
  NormEstimate lhs;
  NormEstimate rhs_phi;
  NormEstimate rhs_omega;
  double ratio = 0.0;
  double p = 0.0;
  double q = 0.0;
  std::string family;  // empty outside family searches
  std::uint64_t seed = 0;
  int trial = -1;
  bool escalated = false;
  bool candidate = false;
  OptimizerConfig cfg;
};

MultiplicativityReport product_norm_test(const SuperOp& phi, const SuperOp& omega,
                                         const NormQuery& query,
                                         const OptimizerConfig& cfg);

// product_norm_test of phi with itself: the n = 2 tensor-power instance.
MultiplicativityReport fm_power_test(const SuperOp& phi, const NormQuery& query,
                                     const OptimizerConfig& cfg);

// As product_norm_test, but a ratio above the candidate threshold triggers
// one 4x budget escalation before the report is returned.
MultiplicativityReport product_norm_test_escalating(const SuperOp& phi,
                                                    const SuperOp& omega,
                                                    const NormQuery& query,
                                                    const OptimizerConfig& cfg);

enum class Family { eb_general, eb_cond1, eb_cond2, cq, qc, cp_general };
Family family_from_string(const std::string& s);  // input_error on unknown
std::string to_string(Family f);

// Draws the (Phi, Omega) pair for one search trial: Phi from the family with
// dimensions in {2,3} and N in {2,3}, Omega a trace-preserving random qubit
// CP map. Deterministic in the trial seed.
std::pair<SuperOp, SuperOp> draw_family_pair(Family family, std::uint64_t trial_seed);

// n_trials independent draws; each trial reseeds as derive_seed(seed, trial).
// Reports come back sorted by descending ratio (ties by trial index).
std::vector<MultiplicativityReport> violation_search(Family family,
                                                     const NormQuery& query,
                                                     int n_trials,
                                                     const OptimizerConfig& cfg,
                                                     std::uint64_t seed);

nlohmann::json report_to_json(const MultiplicativityReport& r);

// RFC-4180 summary (CRLF, header row): family,p,q,seed,lhs,rhs_phi,rhs_omega,ratio
std::string reports_to_csv(const std::vector<MultiplicativityReport>& reports);

}  // namespace qnorm

#endif  // QNORM_MULTIPLICATIVITY_HPP
