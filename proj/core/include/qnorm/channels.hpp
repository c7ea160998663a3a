// SPDX-License-Identifier: Apache-2.0
#ifndef QNORM_CHANNELS_HPP
#define QNORM_CHANNELS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qnorm/linalg.hpp"

namespace qnorm {

// Measure-and-prepare form: A |-> sum_k Tr(A X_k) R_k. The X_k act as a
// generalized measurement on the input, the R_k are the prepared outputs.
// Neither POVM completeness nor unit output traces are required.
struct EBMap {
  int d_in = 0;
  int d_out = 0;
  std::vector<std::pair<Matrix, Matrix>> pairs;  // (X_k, R_k)

  // sum_k Tr(a X_k) R_k
  Matrix apply(const Matrix& a) const;
};

// throws input_error unless every X_k/R_k is PSD within 1e-9 with consistent
// dimensions and the pair list is nonempty
void validate(const EBMap& m);

struct KrausMap {
  int d_in = 0;
  int d_out = 0;
  std::vector<Matrix> kraus;  // each d_out x d_in

  // sum_i K_i a K_i*
  Matrix apply(const Matrix& a) const;
};

void validate(const KrausMap& m);

// A completely positive map in exactly one stored representation.
class SuperOp {
 public:
  enum class Kind { eb, kraus, choi };

  explicit SuperOp(EBMap m);
  explicit SuperOp(KrausMap m);
  // Choi matrix in the convention C = sum_ij |i><j| (x) Phi(|i><j|);
  // must be (d_in * d_out) square and PSD within 1e-9.
  SuperOp(Matrix choi, int d_in, int d_out);

  Kind kind() const { return kind_; }
  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }

  const EBMap& eb() const;
  const KrausMap& kraus() const;
  const Matrix& choi_matrix() const;

  Matrix apply(const Matrix& a) const;

  // Adjoint action with respect to the Hilbert-Schmidt pairing Tr B* Phi(A),
  // evaluated directly without constructing the adjoint map.
  Matrix apply_adjoint(const Matrix& b) const;

 private:
  Kind kind_;
  int d_in_ = 0;
  int d_out_ = 0;
  std::variant<EBMap, KrausMap, Matrix> rep_;
};

// Adjoint map, keeping the representation kind: EB pairs swap roles of X_k
// and R_k, Kraus operators are conjugate-transposed, Choi matrices are
// reshuffled and conjugated.
SuperOp adjoint(const SuperOp& m);

// CQ map: measures in the standard basis (X_k = |k><k|), prepares the given
// outputs. Every output must be unit-trace PSD.
EBMap make_cq(const std::vector<Matrix>& outputs);

// QC map: measures the given POVM (sum X_k = I required), prepares standard
// basis projectors R_k = |k><k| with d_out = N.
EBMap make_qc(const std::vector<Matrix>& povm);

// Depolarizing channel A |-> lam*A + (1-lam)/d Tr(A) I_d, Choi-represented.
SuperOp make_depolarizing(int d, double lam);

// cond1: every X_k entrywise nonnegative. cond2: every R_k diagonal.
bool check_cond1(const EBMap& m, double tol);
bool check_cond2(const EBMap& m, double tol);

enum class EBClass { general, cond1, cond2, cq, qc };
EBClass eb_class_from_string(const std::string& s);  // input_error on unknown
std::string to_string(EBClass c);

// Deterministic per seed. cond1 draws X_k = v v^T with entrywise-nonnegative
// v plus nonnegative diagonal jitter; cond2 draws diagonal R_k; cq/qc build
// exact CQ/QC maps (cq requires n_pairs == d_in, qc requires n_pairs ==
// d_out). With normalize set, outputs are rescaled to unit trace and the
// measurements by a global scalar, which keeps norms O(1) without disturbing
// entrywise positivity or diagonality.
EBMap random_eb(int d_in, int d_out, int n_pairs, EBClass cls, std::uint64_t seed,
                bool normalize = false);

// Gaussian Kraus operators; with normalize set they are right-multiplied by
// (sum K*K)^{-1/2}, making the map trace-preserving.
KrausMap random_cp_kraus(int d_in, int d_out, int n_kraus, std::uint64_t seed,
                         bool normalize = false);

// Kraus-form product through pairwise Kronecker products (EB and Choi inputs
// are converted first). Product dimensions above the dense budget raise
// resource_error.
SuperOp tensor(const SuperOp& m1, const SuperOp& m2);

// One Kraus operator sqrt(r_i x_j) |r_i><x_j| per eigenpair of (R_k, X_k),
// components below the relative clip dropped.
KrausMap eb_to_kraus(const EBMap& m);

// C = sum_ij |i><j| (x) Phi(|i><j|)
Matrix choi(const SuperOp& m);
Matrix kraus_to_choi(const KrausMap& m);
KrausMap choi_to_kraus(const Matrix& c, int d_in, int d_out);
KrausMap to_kraus(const SuperOp& m);

// --- JSON encoding ---
// {"kind": "eb"|"kraus"|"choi", "d_in": n, "d_out": m,
//  "pairs": [{"X": M, "R": M}, ...] | "kraus": [M, ...] | "choi": M}
nlohmann::json channel_to_json(const SuperOp& m);
SuperOp channel_from_json(const nlohmann::json& j);
SuperOp load_channel(const std::string& path);
void save_channel(const SuperOp& m, const std::string& path);

}  // namespace qnorm

#endif  // QNORM_CHANNELS_HPP
