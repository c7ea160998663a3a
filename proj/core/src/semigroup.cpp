// SPDX-License-Identifier: Apache-2.0
#include "qnorm/semigroup.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace qnorm {

ChannelSemigroup depolarizing_semigroup(int d) {
  if (d < 2) throw input_error("depolarizing_semigroup: d must be >= 2");
  return {d, [d](double t) {
            if (t < 0.0) throw input_error("semigroup time must be nonnegative");
            return make_depolarizing(d, std::exp(-t));
          }};
}

namespace {

double triple_at(const ChannelSemigroup& sg, double t, const NormQuery& query,
                 const OptimizerConfig& cfg) {
  return triple_norm_p_to_q(sg.evolve(t), query, cfg);
}

}  // namespace

double contraction_time(const ChannelSemigroup& sg, const NormQuery& query,
                        const OptimizerConfig& cfg, double t_max, double tol_t) {
  if (query.p > query.q) return 0.0;
  if (t_max <= 0.0) throw input_error("contraction_time: t_max must be positive");
  if (tol_t <= 0.0) throw input_error("contraction_time: tol_t must be positive");

  const auto g = [&](double t) { return triple_at(sg, t, query, cfg) - 1.0; };

  // The bisection assumes t |-> |||Phi_t||| is nonincreasing. That is not
  // guaranteed for arbitrary plug-in families, so verify it on a grid before
  // trusting the bracket.
  constexpr int kGridPoints = 32;
  std::vector<double> grid_t(kGridPoints), grid_g(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    grid_t[i] = t_max * i / (kGridPoints - 1);
    grid_g[i] = g(grid_t[i]);
  }
  constexpr double kMonotoneSlack = 1e-5;  // optimizer noise allowance
  for (int i = 1; i < kGridPoints; ++i)
    if (grid_g[i] > grid_g[i - 1] + kMonotoneSlack)
      throw diagnostic_error(
          "contraction_time: triple norm is not monotone on the grid near t = " +
          std::to_string(grid_t[i]));

  if (grid_g[0] <= cfg.tol_value) return 0.0;
  if (grid_g[kGridPoints - 1] > cfg.tol_value)
    throw diagnostic_error("contraction_time: no contraction inside [0, " +
                           std::to_string(t_max) + "]");

  int hit = 1;
  while (grid_g[hit] > cfg.tol_value) ++hit;
  double lo = grid_t[hit - 1], hi = grid_t[hit];
  while (hi - lo > tol_t) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) <= cfg.tol_value)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

QOfT q_of_t(const ChannelSemigroup& sg, double t, const OptimizerConfig& cfg,
            double q_max, double tol_q) {
  if (t < 0.0) throw input_error("q_of_t: t must be nonnegative");
  if (q_max <= 2.0) throw input_error("q_of_t: q_max must exceed 2");

  const auto contracts = [&](double q) {
    return triple_at(sg, t, NormQuery(2.0, q), cfg) <= 1.0 + cfg.tol_value;
  };

  QOfT result;
  if (contracts(q_max)) {
    result.q = q_max;
    result.saturated = true;
    return result;
  }
  double lo = 2.0, hi = q_max;  // contracts(lo) holds: |||.|||_{2->2} <= 1
  while (hi - lo > tol_q) {
    const double mid = 0.5 * (lo + hi);
    if (contracts(mid))
      lo = mid;
    else
      hi = mid;
  }
  result.q = lo;
  return result;
}

double lower_bound_check(const ChannelSemigroup& sg, double t, const NormQuery& query,
                         const OptimizerConfig& cfg) {
  const double value = triple_at(sg, t, query, cfg);
  if (value < 1.0 - 1e-6)
    throw diagnostic_error("lower_bound_check: |||Phi_t||| = " + std::to_string(value) +
                           " fell below 1, the identity input is feasible");
  return value;
}

std::pair<double, double> product_contraction_check(const ChannelSemigroup& sg,
                                                    double t, const NormQuery& query,
                                                    const OptimizerConfig& cfg) {
  const SuperOp phi_t = sg.evolve(t);
  const NormEstimate single = norm_p_to_q(phi_t, query, cfg);
  const SuperOp product = tensor(phi_t, phi_t);
  const Matrix warm = kron(single.argmax, single.argmax);
  const NormEstimate prod = norm_p_to_q(product, query, cfg, {warm});

  const double d_in = sg.d, d_out = sg.d;
  const double single_triple = single.value * std::pow(d_in, 1.0 / query.p) /
                               std::pow(d_out, 1.0 / query.q);
  const double product_triple = prod.value * std::pow(d_in * d_in, 1.0 / query.p) /
                                std::pow(d_out * d_out, 1.0 / query.q);
  return {single_triple, product_triple};
}

}  // namespace qnorm
