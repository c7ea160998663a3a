// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "qnorm/prooftrace.hpp"
#include "support/test_support.hpp"

using namespace qnorm;
using test::basis_matrix;
using test::max_abs_diff;

namespace {

OptimizerConfig cfg_with_seed(std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.n_starts = 8;
  cfg.seed = seed;
  return cfg;
}

KrausMap identity_kraus(int d) {
  KrausMap m;
  m.d_in = m.d_out = d;
  m.kraus = {Matrix::Identity(d, d)};
  return m;
}

void check_all_pass(const std::vector<TraceReport>& reports) {
  for (const auto& r : reports) {
    INFO("step ", r.step, " lhs=", r.lhs, " rhs=", r.rhs, " note=", r.note);
    CHECK(r.pass);
    CHECK(r.note != "unresolved-budget-warning");
  }
}

}  // namespace

TEST_CASE("bipartite inputs are normalized block grids") {
  const BipartiteInput in = random_bipartite(3, 2, 17);
  CHECK(is_psd(in.rho, 1e-9));
  CHECK(std::abs(in.rho.norm() - 1.0) < 1e-12);

  double total = 0.0;
  Matrix rebuilt = Matrix::Zero(6, 6);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Matrix b = in.block(i, j);
      total += b.squaredNorm();
      rebuilt.block(i * 2, j * 2, 2, 2) = b;
    }
  CHECK(std::abs(total - 1.0) < 1e-10);
  CHECK(max_abs_diff(rebuilt, in.rho) == 0.0);

  CHECK_THROWS_AS(make_bipartite(Matrix::Identity(6, 6), 3, 2), input_error);
  CHECK_THROWS_AS(make_bipartite(Matrix::Identity(4, 4) / 2.0, 3, 2), input_error);
}

TEST_CASE("swap_factors exchanges kronecker order") {
  Rng rng(3);
  const Matrix a = random_gaussian(rng, 3, 3);
  const Matrix b = random_gaussian(rng, 2, 2);
  CHECK(max_abs_diff(swap_factors(kron(a, b), 3, 2), kron(b, a)) == 0.0);
}

TEST_CASE("tau matrix") {
  SUBCASE("a pure product basis state has a single unit entry") {
    Matrix rho = Matrix::Zero(4, 4);
    rho(0, 0) = 1.0;  // |00><00|
    const BipartiteInput in = make_bipartite(std::move(rho), 2, 2);
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = 1.0;
    CHECK(max_abs_diff(tau_matrix(in), expect) < 1e-15);
  }

  SUBCASE("kronecker inputs reduce to the first factor's moduli") {
    Rng rng(5);
    Matrix sigma = random_psd(rng, 2);
    sigma /= sigma.norm();
    Matrix omega = random_psd(rng, 2);
    omega /= omega.norm();
    const BipartiteInput in = make_bipartite(kron(sigma, omega), 2, 2);
    const Matrix tau = tau_matrix(in);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(std::abs(tau(i, j).real() - std::abs(sigma(i, j))) < 1e-12);
  }

  SUBCASE("unit frobenius norm and entrywise nonnegativity on random inputs") {
    for (int trial = 0; trial < 50; ++trial) {
      const BipartiteInput in = random_bipartite(3, 2, 100 + trial);
      const Matrix tau = tau_matrix(in);
      CHECK(std::abs(tau.norm() - 1.0) < 1e-10);
      CHECK(is_entrywise_nonneg(tau, 0.0));
    }
  }
}

TEST_CASE("measurement blocks agree with the partial-trace route") {
  for (int trial = 0; trial < 30; ++trial) {
    const BipartiteInput in = random_bipartite(2, 3, 200 + trial);
    const EBMap phi = random_eb(2, 2, 2, EBClass::cond1, 300 + trial);
    const std::vector<Matrix> aks = ak_matrices(in, phi);
    for (std::size_t k = 0; k < aks.size(); ++k) {
      // Tr_1 (X_k (x) I) rho is the same object through an independent path
      const Matrix via_pt = partial_trace(
          kron(phi.pairs[k].first, Matrix::Identity(3, 3)) * in.rho, 2, 3, 2);
      CHECK(max_abs_diff(aks[k], via_pt) < 1e-10);
      CHECK(is_psd(aks[k], 1e-9));
    }
  }

  // X = I picks out the reduced state
  const BipartiteInput in = random_bipartite(2, 2, 999);
  EBMap flat{2, 2, {{Matrix::Identity(2, 2), Matrix::Identity(2, 2)}}};
  CHECK(max_abs_diff(ak_matrices(in, flat)[0], partial_trace(in.rho, 2, 2, 2)) < 1e-12);
}

TEST_CASE("norm bounds of the entrywise-positive branch") {
  for (int trial = 0; trial < 30; ++trial) {
    const BipartiteInput in = random_bipartite(3, 2, 400 + trial);
    const EBMap phi = random_eb(3, 2, 3, EBClass::cond1, 500 + trial, true);
    check_all_pass(check_ak_bound(phi, in));
    check_all_pass(theta_check(phi, in));
  }
}

TEST_CASE("vacuous measurements are reported, not dropped") {
  // rho supported on |1> in the first factor, measurement on |0>: the weight
  // Tr(X tau) vanishes exactly
  Rng rng(7);
  Matrix omega = random_psd(rng, 2);
  omega /= omega.norm();
  const Matrix rho = kron(basis_matrix(2, 1, 1), omega);
  const BipartiteInput in = make_bipartite(rho, 2, 2);
  EBMap phi{2, 2, {{basis_matrix(2, 0, 0), Matrix::Identity(2, 2)}}};

  const auto reports = theta_check(phi, in);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].note == "vacuous");
  CHECK(reports[0].pass);
}

TEST_CASE("bcb decomposition") {
  SUBCASE("flat map reduces to the omega image of the reduced state") {
    const BipartiteInput in = random_bipartite(2, 2, 31);
    EBMap flat{2, 2, {{Matrix::Identity(2, 2), Matrix::Identity(2, 2)}}};
    const KrausMap omega = random_cp_kraus(2, 2, 2, 32, true);
    check_all_pass(bcb_decomposition(flat, omega, in));

    // direct closed form: I (x) Omega(Tr_1 rho)
    const SuperOp prod = tensor(SuperOp(EBMap(flat)), SuperOp(KrausMap(omega)));
    const Matrix direct =
        kron(Matrix::Identity(2, 2), omega.apply(partial_trace(in.rho, 2, 2, 2)));
    CHECK(max_abs_diff(prod.apply(in.rho), direct) < 1e-10);
  }

  SUBCASE("random instances reconstruct within 1e-8 and sum z^2 within 1e-10") {
    for (int trial = 0; trial < 100; ++trial) {
      const BipartiteInput in = random_bipartite(2, 2, 600 + trial);
      const EBMap phi = random_eb(2, 3, 2, EBClass::cond1, 700 + trial, true);
      const KrausMap omega = random_cp_kraus(2, 2, 2, 800 + trial, true);
      const auto reports = bcb_decomposition(phi, omega, in);
      REQUIRE(reports.size() == 2);
      CHECK(reports[0].pass);
      CHECK(reports[1].lhs < 1e-10);
    }
  }

  SUBCASE("cond1 is required") {
    const BipartiteInput in = random_bipartite(2, 2, 51);
    Matrix x(2, 2);
    x << 1.0, -0.5, -0.5, 1.0;
    EBMap phi{2, 2, {{x, Matrix::Identity(2, 2)}}};
    CHECK_THROWS_AS(bcb_decomposition(phi, identity_kraus(2), in), input_error);
  }
}

TEST_CASE("full chain for the entrywise-positive branch") {
  for (int trial = 0; trial < 12; ++trial) {
    const BipartiteInput in = random_bipartite(2, 2, 900 + trial);
    const EBMap phi = random_eb(2, 2, 2, EBClass::cond1, 1000 + trial, true);
    const KrausMap omega = random_cp_kraus(2, 2, 3, 1100 + trial, true);
    const double q = 2.0 + trial % 3;
    check_all_pass(chain_lt3(phi, omega, in, q, cfg_with_seed(trial)));
  }
}

TEST_CASE("diagonal-output branch closed-form case") {
  // dephasing QC map, identity omega, maximally entangled input, q = 2:
  // every quantity is computable by hand
  const EBMap phi = make_qc({basis_matrix(2, 0, 0), basis_matrix(2, 1, 1)});
  Matrix bell = Matrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) bell(i * 2 + i, j * 2 + j) = 0.5;
  const BipartiteInput in = make_bipartite(bell, 2, 2);

  const auto reports = part2_chain(phi, identity_kraus(2), in, 2.0, cfg_with_seed(3));
  check_all_pass(reports);

  // the output is (E00 (x) E00 + E11 (x) E11)/2, so the traced q-power is 1/2
  for (const auto& r : reports)
    if (r.step == "part2_chain.end_to_end") CHECK(r.lhs == doctest::Approx(0.5));
}

TEST_CASE("block-diagonal inputs make the decomposition exact") {
  Rng rng(13);
  Matrix s0 = random_psd(rng, 2), s1 = random_psd(rng, 2);
  Matrix rho = Matrix::Zero(4, 4);
  // rho = s0 (x) E00 + s1 (x) E11, normalized
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      rho(a * 2 + 0, b * 2 + 0) = s0(a, b);
      rho(a * 2 + 1, b * 2 + 1) = s1(a, b);
    }
  rho /= rho.norm();
  const BipartiteInput in = make_bipartite(rho, 2, 2);
  const EBMap phi = random_eb(2, 2, 2, EBClass::cond2, 77, true);

  const auto reports = part2_chain(phi, identity_kraus(2), in, 2.0, cfg_with_seed(5));
  for (const auto& r : reports)
    if (r.step == "part2_chain.block_diagonal") CHECK(r.lhs <= 1e-12);
}

TEST_CASE("diagonal-output branch on random instances") {
  for (int trial = 0; trial < 12; ++trial) {
    const BipartiteInput in = random_bipartite(2, 2, 1200 + trial);
    const EBMap phi = random_eb(2, 3, 2, EBClass::cond2, 1300 + trial, true);
    const KrausMap omega = random_cp_kraus(2, 2, 2, 1400 + trial, true);
    const double q = 2.0 + trial % 3;
    check_all_pass(part2_chain(phi, omega, in, q, cfg_with_seed(trial)));
  }
}

TEST_CASE("trace suite runs deterministically") {
  const auto run = [] {
    return run_trace_suite(Branch::cond2, 4, {2.0, 3.0, 4.0}, 555, cfg_with_seed(1));
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == b.size());

  std::ostringstream sa, sb;
  for (const auto& inst : a)
    for (const auto& r : inst.reports) sa << trace_report_to_json(r).dump() << "\n";
  for (const auto& inst : b)
    for (const auto& r : inst.reports) sb << trace_report_to_json(r).dump() << "\n";
  CHECK(sa.str() == sb.str());

  // q values cycle through the list
  CHECK(a[0].q == 2.0);
  CHECK(a[1].q == 3.0);
  CHECK(a[2].q == 4.0);
  CHECK(a[3].q == 2.0);

  for (const auto& inst : a) check_all_pass(inst.reports);
}

TEST_CASE("trace suite cond1 branch passes") {
  const auto results = run_trace_suite(Branch::cond1, 4, {2.0, 3.0}, 777, cfg_with_seed(2));
  for (const auto& inst : results) check_all_pass(inst.reports);
}

TEST_CASE("trace report json shape") {
  const TraceReport r = inequality_report("demo.step", 1.0, 2.0);
  const nlohmann::json j = trace_report_to_json(r);
  CHECK(j.at("step") == "demo.step");
  CHECK(j.at("lhs") == 1.0);
  CHECK(j.at("rhs") == 2.0);
  CHECK(j.at("slack") == 1.0);
  CHECK(j.at("pass") == true);
  CHECK(j.at("note") == "");
}
