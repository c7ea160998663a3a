// SPDX-License-Identifier: Apache-2.0
#ifndef QNORM_PROOFTRACE_HPP
#define QNORM_PROOFTRACE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qnorm/norms.hpp"

namespace qnorm {

// Bipartite test input: rho PSD on C^{d1} (x) C^{d2} with unit Frobenius
// norm. block(i, j) is the d2 x d2 block rho_ij of rho = sum |i><j| (x)
// rho_ij, so sum_ij ||rho_ij||_2^2 = 1 by construction. The diagonal-output
// branch reads the swapped blocks through swap_factors.
struct BipartiteInput {
  Matrix rho;
  int d1 = 0;
  int d2 = 0;

  Matrix block(int i, int j) const;
};

BipartiteInput make_bipartite(Matrix rho, int d1, int d2);  // validates
BipartiteInput random_bipartite(int d1, int d2, std::uint64_t seed);

// Exchanges the tensor factors: out[(a,i),(b,j)] = m[(i,a),(j,b)].
Matrix swap_factors(const Matrix& m, int d1, int d2);

// One verified step. Inequality steps carry the two compared values and pass
// when slack = rhs - lhs >= -1e-8 * max(1, |rhs|). Identity steps carry the
// deviation in lhs with rhs = 0, so the same rule reads "deviation <= 1e-8".
struct TraceReport {
  std::string step;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  std::string note;  // "", "vacuous", "escalated", "unresolved-budget-warning"
};

TraceReport identity_report(const std::string& step, double deviation);
TraceReport inequality_report(const std::string& step, double lhs, double rhs);

// tau_ij = ||rho_ij||_2; entrywise nonnegative with unit Frobenius norm.
Matrix tau_matrix(const BipartiteInput& input);

// A_k = sum_ij <j| X_k |i> rho_ij (equivalently Tr_1 (X_k (x) I) rho).
std::vector<Matrix> ak_matrices(const BipartiteInput& input, const EBMap& phi);

// ||A_k||_2 <= Tr(X_k tau) for every k, plus the inner Cauchy-Schwarz bound
// |Tr(rho_ij* rho_mn)| <= tau_ij tau_mn on the worst index quadruple.
// Requires an entrywise-positive measurement family.
std::vector<TraceReport> check_ak_bound(const EBMap& phi, const BipartiteInput& input);

// ||theta_k||_2 <= 1 for theta_k = A_k / Tr(X_k tau); pairs with
// Tr(X_k tau) <= 1e-12 are recorded as vacuous passes, never dropped.
std::vector<TraceReport> theta_check(const EBMap& phi, const BipartiteInput& input);

// Builds z_k = (Tr(X_k tau) R_k)^{1/2}, B = sum_k |k> (x) z_k (x) I and
// C = sum_j |j><j| (x) I (x) Omega(theta_j) and verifies both
// B*CB = (Phi (x) Omega)(rho) and sum_k z_k^2 = Phi(tau).
std::vector<TraceReport> bcb_decomposition(const EBMap& phi, const KrausMap& omega,
                                           const BipartiteInput& input);

// The full entrywise-positive branch, in proof order: (a) Lieb-Thirring on
// (B, C); (b) Tr Omega(theta_j)^q <= ||Omega||_{2->q}^q per j;
// (c) Tr Phi(tau)^q <= ||Phi||_{2->q}^q; (d) the end-to-end product bound.
// Steps (b)-(d) compare against optimizer lower bounds, so a failure is
// retried once at 4x budget before it is flagged unresolved.
std::vector<TraceReport> chain_lt3(const EBMap& phi, const KrausMap& omega,
                                   const BipartiteInput& input, double q,
                                   const OptimizerConfig& cfg);

// The diagonal-output branch: block-diagonal output decomposition through
// C_m = sum_k r_km B_k, the ||C_m||_2 identity, the convexity step, the
// Phi(sigma_ij) spectrum identity and the end-to-end bound, with the same
// escalation semantics on the final optimizer-backed step.
std::vector<TraceReport> part2_chain(const EBMap& phi, const KrausMap& omega,
                                     const BipartiteInput& input, double q,
                                     const OptimizerConfig& cfg);

enum class Branch { cond1, cond2 };
Branch branch_from_string(const std::string& s);
std::string to_string(Branch b);

struct TraceInstanceResult {
  int instance = 0;
  std::uint64_t seed = 0;
  double q = 0.0;
  std::vector<TraceReport> reports;
};

// Seeded random instances (dimensions in {2,3}, qubit trace-preserving
// Omega); q values are assigned round-robin from q_list. Instances are
// independent and parallelize; instance i derives its seed from (seed, i).
std::vector<TraceInstanceResult> run_trace_suite(Branch branch, int instances,
                                                 const std::vector<double>& q_list,
                                                 std::uint64_t seed,
                                                 const OptimizerConfig& cfg);

nlohmann::json trace_report_to_json(const TraceReport& r);

}  // namespace qnorm

#endif  // QNORM_PROOFTRACE_HPP
