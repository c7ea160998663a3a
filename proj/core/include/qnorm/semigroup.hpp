// SPDX-License-Identifier: Apache-2.0
#ifndef QNORM_SEMIGROUP_HPP
#define QNORM_SEMIGROUP_HPP

#include <functional>
#include <utility>

#include "qnorm/norms.hpp"

namespace qnorm {

// One-parameter semigroup of CP maps on M_d, generator-based so families
// other than depolarizing can be plugged in (tests exploit this).
struct ChannelSemigroup {
  int d = 0;
  std::function<SuperOp(double)> evolve;
};

// Depolarizing flow t |-> Delta_{e^{-t}}: unital, trace preserving,
// converging to the full mixing map.
ChannelSemigroup depolarizing_semigroup(int d);

// Smallest t in [0, t_max] with |||evolve(t)|||_{p->q} <= 1 + tol_value,
// located by bisection to resolution tol_t. Returns 0 immediately when
// p > q. Before bisecting, monotonicity of the triple norm is verified on a
// 32-point grid; non-monotone data raises diagnostic_error, as does a range
// that never contracts.
double contraction_time(const ChannelSemigroup& sg, const NormQuery& query,
                        const OptimizerConfig& cfg, double t_max = 20.0,
                        double tol_t = 1e-4);

struct QOfT {
  double q = 2.0;
  bool saturated = false;  // contraction holds all the way to q_max
};

// Largest q in [2, q_max] with |||evolve(t)|||_{2->q} <= 1 + tol_value,
// by bisection to resolution tol_q; q(0) = 2.
QOfT q_of_t(const ChannelSemigroup& sg, double t, const OptimizerConfig& cfg,
            double q_max = 64.0, double tol_q = 1e-3);

// |||evolve(t)|||_{p->q}; the identity input is feasible so the value can
// never drop below 1. diagnostic_error if it does beyond 1e-6.
double lower_bound_check(const ChannelSemigroup& sg, double t, const NormQuery& query,
                         const OptimizerConfig& cfg);

// (|||Phi_t|||_{p->q}, |||Phi_t (x) Phi_t|||_{p->q}); reported without
// assertion, the gap product - single^2 probes multiplicativity.
std::pair<double, double> product_contraction_check(const ChannelSemigroup& sg,
                                                    double t, const NormQuery& query,
                                                    const OptimizerConfig& cfg);

}  // namespace qnorm

#endif  // QNORM_SEMIGROUP_HPP
