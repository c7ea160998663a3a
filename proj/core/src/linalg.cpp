// SPDX-License-Identifier: Apache-2.0
#include "qnorm/linalg.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <string>

namespace qnorm {

bool is_finite(const Matrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const Complex v = a(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  return true;
}

void check_finite(const Matrix& a) {
  if (!is_finite(a)) throw input_error("matrix has non-finite entries");
}

void check_square(const Matrix& a) {
  if (a.rows() != a.cols())
    throw input_error("matrix must be square, got " + std::to_string(a.rows()) +
                      "x" + std::to_string(a.cols()));
}

void check_dimension_budget(const Matrix& a) {
  if (a.rows() > kMaxDim || a.cols() > kMaxDim)
    throw resource_error("dimension " + std::to_string(std::max(a.rows(), a.cols())) +
                         " exceeds the dense budget of " + std::to_string(kMaxDim));
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

HermitianSpectrum hermitian_eig(const Matrix& a) {
  check_square(a);
  check_finite(a);
  check_dimension_budget(a);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success)
    throw numeric_error("hermitian eigendecomposition failed to converge");
  // Eigen sorts ascending; flip to descending.
  const Eigen::Index n = a.rows();
  HermitianSpectrum s;
  s.eigenvalues.resize(n);
  s.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    s.eigenvalues[k] = solver.eigenvalues()[n - 1 - k];
    s.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return s;
}

double schatten_norm(const Matrix& a, double p) {
  if (!std::isfinite(p) || p < 1.0)
    throw domain_error("schatten_norm requires finite p >= 1, got " + std::to_string(p));
  check_finite(a);
  const Matrix gram = a.adjoint() * a;
  const HermitianSpectrum s = hermitian_eig(gram);
  // Relative clip before powering; spurious eigenvalues of A*A sit at the
  // eps * lambda_max level and would otherwise pollute small-p norms.
  const double cutoff = std::max(s.eigenvalues[0], 0.0) * 1e-12;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    const double ev = s.eigenvalues[k];
    if (ev > cutoff) acc += std::pow(std::sqrt(ev), p);
  }
  return std::pow(acc, 1.0 / p);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix partial_trace(const Matrix& m, int d1, int d2, int keep) {
  if (d1 <= 0 || d2 <= 0) throw input_error("partial_trace: factor dimensions must be positive");
  if (keep != 1 && keep != 2) throw input_error("partial_trace: keep must be 1 or 2");
  const Eigen::Index n = static_cast<Eigen::Index>(d1) * d2;
  if (m.rows() != n || m.cols() != n)
    throw input_error("partial_trace: matrix is " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + ", expected " + std::to_string(n) + "x" +
                      std::to_string(n));
  if (keep == 1) {
    Matrix out = Matrix::Zero(d1, d1);
    for (int i = 0; i < d1; ++i)
      for (int j = 0; j < d1; ++j)
        for (int a = 0; a < d2; ++a) out(i, j) += m(i * d2 + a, j * d2 + a);
    return out;
  }
  Matrix out = Matrix::Zero(d2, d2);
  for (int a = 0; a < d2; ++a)
    for (int b = 0; b < d2; ++b)
      for (int i = 0; i < d1; ++i) out(a, b) += m(i * d2 + a, i * d2 + b);
  return out;
}

bool is_psd(const Matrix& a, double tol) {
  check_square(a);
  check_finite(a);
  const double herm_defect = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (herm_defect > tol) return false;
  const HermitianSpectrum s = hermitian_eig(a);
  return s.eigenvalues[s.eigenvalues.size() - 1] >= -tol;
}

bool is_entrywise_nonneg(const Matrix& a, double tol) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const Complex v = a(i, j);
      if (std::abs(v.imag()) > tol || v.real() < -tol) return false;
    }
  return true;
}

Matrix spectral_power(const Matrix& a, double q, double clip_rel) {
  const HermitianSpectrum s = hermitian_eig(a);
  const Eigen::Index n = s.eigenvalues.size();
  const double cutoff = std::max(s.eigenvalues[0], 0.0) * clip_rel;
  Eigen::VectorXd powered(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double ev = s.eigenvalues[k];
    powered[k] = ev > cutoff ? std::pow(ev, q) : 0.0;
  }
  return s.eigenvectors * powered.asDiagonal() * s.eigenvectors.adjoint();
}

Matrix psd_power(const Matrix& a, double q) {
  if (!std::isfinite(q) || q < 0.0)
    throw domain_error("psd_power requires finite q >= 0, got " + std::to_string(q));
  if (!is_psd(a, 1e-9)) throw input_error("psd_power: matrix is not PSD within 1e-9");
  return spectral_power(a, q);
}

Matrix random_gaussian(Rng& rng, int rows, int cols) {
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.cgaussian();
  return g;
}

Matrix random_psd(Rng& rng, int d) {
  const Matrix g = random_gaussian(rng, d, d);
  return (g * g.adjoint()) / static_cast<double>(d);
}

Matrix random_unitary(Rng& rng, int d) {
  const Matrix g = random_gaussian(rng, d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix the phase ambiguity so the draw is a deterministic function of g.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const Complex rkk = r(k, k);
    if (std::abs(rkk) > 0) q.col(k) *= rkk / std::abs(rkk);
  }
  return q;
}

nlohmann::json matrix_to_json(const Matrix& a) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const Complex v = a(i, j);
      data.push_back({v.real(), v.imag()});
    }
  return {{"rows", a.rows()}, {"cols", a.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw input_error("matrix JSON must carry fields rows, cols, data");
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows <= 0 || cols <= 0) throw input_error("matrix JSON: rows and cols must be positive");
  const auto& data = j.at("data");
  if (!data.is_array() || data.size() != static_cast<std::size_t>(rows * cols))
    throw input_error("matrix JSON: data length " + std::to_string(data.size()) +
                      " does not match rows*cols = " + std::to_string(rows * cols));
  Matrix a(rows, cols);
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2, ++idx) {
      const auto& entry = data.at(idx);
      if (!entry.is_array() || entry.size() != 2)
        throw input_error("matrix JSON: data[" + std::to_string(idx) +
                          "] must be a [re, im] pair");
      a(i, j2) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
  check_finite(a);
  return a;
}

}  // namespace qnorm
