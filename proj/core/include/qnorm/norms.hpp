// SPDX-License-Identifier: Apache-2.0
#ifndef QNORM_NORMS_HPP
#define QNORM_NORMS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "qnorm/channels.hpp"
#include "qnorm/linalg.hpp"

namespace qnorm {

// Exponent pair with Hoelder conjugates; p = 1 conjugates to the infinity
// sentinel. Conjugates participate only in duality bookkeeping, the optimizer
// itself accepts finite exponents only.
struct NormQuery {
  double p = 2.0;
  double q = 2.0;
  double p_conj = 2.0;
  double q_conj = 2.0;

  NormQuery(double p_, double q_);

  static double conjugate(double x);  // x/(x-1), infinity at x = 1
};

struct OptimizerConfig {
  int n_starts = 16;
  int max_iter = 2000;
  double step_init = 0.25;
  double tol_grad = 1e-9;
  double tol_value = 1e-7;
  std::uint64_t seed = 0;

  OptimizerConfig scaled(int factor) const {
    OptimizerConfig c = *this;
    c.n_starts *= factor;
    c.max_iter *= factor;
    return c;
  }
};

// A certified lower bound: the reported value is attained by the feasible
// point argmax (PSD, unit Schatten-p norm), so re-evaluating the argmax
// reproduces the value.
struct NormEstimate {
  double value = 0.0;
  Matrix argmax;
  int n_starts_converged = 0;
  int best_start_index = 0;  // warm starts occupy indices 0..W-1, then random
  int iterations = 0;
};

// ||Phi||_{p->q} by multi-start projected gradient ascent of ||Phi(A)||_q
// over {A PSD, ||A||_p = 1}, parametrized as A = G*G / ||G*G||_p with
// unconstrained complex G. The restriction to PSD inputs loses nothing for
// CP maps. Optional warm_starts are extra PSD starting points (normalized
// internally). Starts run independently (parallelizable); the winner is the
// maximal value with ties broken toward the lower start index.
NormEstimate norm_p_to_q(const SuperOp& m, const NormQuery& query,
                         const OptimizerConfig& cfg,
                         const std::vector<Matrix>& warm_starts = {});

// Brute-force cross-check: n_samples random normalized PSD inputs, the best
// ten polished by derivative-free hill climbing. Also a lower bound; tests
// assert oracle <= optimizer within tolerance. Intended for small input
// dimension.
double oracle_norm(const SuperOp& m, const NormQuery& query, int n_samples,
                   std::uint64_t seed);

// Normalized norm |||A|||_p = ||A||_p / ||I_d||_p = ||A||_p d^{-1/p};
// restricted to diagonal matrices this is the l^p norm under the uniform
// probability measure.
double triple_norm(const Matrix& a, double p);

// |||L|||_{p->q} = ||L||_{p->q} * d_in^{1/p} / d_out^{1/q}
double triple_norm_p_to_q(const SuperOp& m, const NormQuery& query,
                          const OptimizerConfig& cfg);

// Lieb-Thirring instance: returns (Tr (B*CB)^q, Tr (BB*)^q C^q) for PSD C.
// The first never exceeds the second; callers assert the slack.
std::pair<double, double> lieb_thirring_check(const Matrix& b, const Matrix& c,
                                              double q);

// (||L||_{p->q}, ||adjoint(L)||_{q'->p'}): equal in exact arithmetic, both
// computed as optimizer lower bounds.
std::pair<double, double> duality_check(const SuperOp& m, const NormQuery& query,
                                        const OptimizerConfig& cfg);

nlohmann::json norm_estimate_to_json(const NormEstimate& e);
nlohmann::json optimizer_config_to_json(const OptimizerConfig& cfg);

}  // namespace qnorm

#endif  // QNORM_NORMS_HPP
