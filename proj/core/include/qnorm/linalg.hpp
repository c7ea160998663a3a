// SPDX-License-Identifier: Apache-2.0
#ifndef QNORM_LINALG_HPP
#define QNORM_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <nlohmann/json_fwd.hpp>

#include "qnorm/errors.hpp"
#include "qnorm/rng.hpp"

namespace qnorm {

// Dense complex matrices are the universal carrier. Values are immutable by
// convention: every operation returns a fresh matrix, nothing mutates its
// arguments, so values can be shared freely across optimizer threads.
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Dense algorithms only; anything larger is out of scope.
inline constexpr int kMaxDim = 64;

bool is_finite(const Matrix& a);
void check_finite(const Matrix& a);          // input_error on NaN/Inf
void check_square(const Matrix& a);          // input_error
void check_dimension_budget(const Matrix& a);  // resource_error beyond kMaxDim

// (A + A*)/2
Matrix hermitian_part(const Matrix& a);

struct HermitianSpectrum {
  Eigen::VectorXd eigenvalues;  // sorted descending
  Matrix eigenvectors;          // unitary, column k pairs with eigenvalues[k]
};

// Eigendecomposition of the Hermitian part of a.
HermitianSpectrum hermitian_eig(const Matrix& a);

// Schatten p-norm: the l^p norm of the singular value vector. Singular values
// are taken as square roots of the eigenvalues of A*A, so no general SVD is
// involved.
double schatten_norm(const Matrix& a, double p);

Matrix kron(const Matrix& a, const Matrix& b);

// m must be (d1*d2) x (d1*d2); traces out the factor that is not kept.
Matrix partial_trace(const Matrix& m, int d1, int d2, int keep);

// Hermitian within tol (max-entry) and min eigenvalue of the Hermitian part
// >= -tol.
bool is_psd(const Matrix& a, double tol);

// Every entry has |Im| <= tol and Re >= -tol.
bool is_entrywise_nonneg(const Matrix& a, double tol);

// A^q through the spectral decomposition. Eigenvalues below 1e-12 of the
// largest are clipped to zero before powering; requires is_psd(a, 1e-9).
Matrix psd_power(const Matrix& a, double q);

// Spectral power without the PSD gate: negative eigenvalues and eigenvalues
// below clip_rel * lambda_max are zeroed, then powered on the support (so
// negative exponents act as pseudo-inverse powers).
Matrix spectral_power(const Matrix& a, double q, double clip_rel = 1e-12);

// --- random matrix helpers (all deterministic through Rng) ---

Matrix random_gaussian(Rng& rng, int rows, int cols);
// G G* / d: PSD with expectation close to the identity.
Matrix random_psd(Rng& rng, int d);
// Q factor of a Gaussian matrix.
Matrix random_unitary(Rng& rng, int d);

// --- JSON encoding, used repo-wide ---
// {"rows": r, "cols": c, "data": [[re, im], ...]} in row-major order.
// Doubles round-trip exactly.
nlohmann::json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace qnorm

#endif  // QNORM_LINALG_HPP
