// SPDX-License-Identifier: Apache-2.0
#include "qnorm/channels.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

namespace qnorm {

namespace {
constexpr double kPsdTol = 1e-9;
constexpr double kEigClip = 1e-12;
}  // namespace

void validate(const EBMap& m) {
  if (m.pairs.empty()) throw input_error("EB map needs at least one (X, R) pair");
  if (m.d_in <= 0 || m.d_out <= 0) throw input_error("EB map dimensions must be positive");
  for (std::size_t k = 0; k < m.pairs.size(); ++k) {
    const auto& [x, r] = m.pairs[k];
    if (x.rows() != m.d_in || x.cols() != m.d_in)
      throw input_error("EB pair " + std::to_string(k) + ": X has wrong dimensions");
    if (r.rows() != m.d_out || r.cols() != m.d_out)
      throw input_error("EB pair " + std::to_string(k) + ": R has wrong dimensions");
    if (!is_psd(x, kPsdTol))
      throw input_error("EB pair " + std::to_string(k) + ": X is not PSD within 1e-9");
    if (!is_psd(r, kPsdTol))
      throw input_error("EB pair " + std::to_string(k) + ": R is not PSD within 1e-9");
  }
}

void validate(const KrausMap& m) {
  if (m.kraus.empty()) throw input_error("Kraus map needs at least one operator");
  if (m.d_in <= 0 || m.d_out <= 0) throw input_error("Kraus map dimensions must be positive");
  for (std::size_t k = 0; k < m.kraus.size(); ++k) {
    const Matrix& op = m.kraus[k];
    if (op.rows() != m.d_out || op.cols() != m.d_in)
      throw input_error("Kraus operator " + std::to_string(k) + ": wrong dimensions");
    check_finite(op);
  }
}

SuperOp::SuperOp(EBMap m) : kind_(Kind::eb), d_in_(m.d_in), d_out_(m.d_out) {
  validate(m);
  rep_ = std::move(m);
}

SuperOp::SuperOp(KrausMap m) : kind_(Kind::kraus), d_in_(m.d_in), d_out_(m.d_out) {
  validate(m);
  rep_ = std::move(m);
}

SuperOp::SuperOp(Matrix choi, int d_in, int d_out)
    : kind_(Kind::choi), d_in_(d_in), d_out_(d_out) {
  if (d_in <= 0 || d_out <= 0) throw input_error("Choi map dimensions must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(d_in) * d_out;
  if (choi.rows() != n || choi.cols() != n)
    throw input_error("Choi matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  if (!is_psd(choi, kPsdTol)) throw input_error("Choi matrix is not PSD within 1e-9");
  rep_ = std::move(choi);
}

const EBMap& SuperOp::eb() const { return std::get<EBMap>(rep_); }
const KrausMap& SuperOp::kraus() const { return std::get<KrausMap>(rep_); }
const Matrix& SuperOp::choi_matrix() const { return std::get<Matrix>(rep_); }

Matrix EBMap::apply(const Matrix& a) const {
  if (a.rows() != d_in || a.cols() != d_in)
    throw input_error("apply: input must be " + std::to_string(d_in) + "x" +
                      std::to_string(d_in));
  Matrix out = Matrix::Zero(d_out, d_out);
  for (const auto& [x, r] : pairs) out += (a * x).trace() * r;
  return out;
}

Matrix KrausMap::apply(const Matrix& a) const {
  if (a.rows() != d_in || a.cols() != d_in)
    throw input_error("apply: input must be " + std::to_string(d_in) + "x" +
                      std::to_string(d_in));
  Matrix out = Matrix::Zero(d_out, d_out);
  for (const Matrix& k : kraus) out += k * a * k.adjoint();
  return out;
}

Matrix SuperOp::apply(const Matrix& a) const {
  switch (kind_) {
    case Kind::eb:
      return eb().apply(a);
    case Kind::kraus:
      return kraus().apply(a);
    case Kind::choi: {
      if (a.rows() != d_in_ || a.cols() != d_in_)
        throw input_error("apply: input must be " + std::to_string(d_in_) + "x" +
                          std::to_string(d_in_));
      const Matrix& c = choi_matrix();
      Matrix out = Matrix::Zero(d_out_, d_out_);
      for (int i = 0; i < d_in_; ++i)
        for (int j = 0; j < d_in_; ++j)
          out += a(i, j) * c.block(i * d_out_, j * d_out_, d_out_, d_out_);
      return out;
    }
  }
  throw numeric_error("unreachable");
}

Matrix SuperOp::apply_adjoint(const Matrix& b) const {
  if (b.rows() != d_out_ || b.cols() != d_out_)
    throw input_error("apply_adjoint: input must be " + std::to_string(d_out_) + "x" +
                      std::to_string(d_out_));
  switch (kind_) {
    case Kind::eb: {
      Matrix out = Matrix::Zero(d_in_, d_in_);
      for (const auto& [x, r] : eb().pairs) out += (b * r).trace() * x;
      return out;
    }
    case Kind::kraus: {
      Matrix out = Matrix::Zero(d_in_, d_in_);
      for (const Matrix& k : kraus().kraus) out += k.adjoint() * b * k;
      return out;
    }
    case Kind::choi: {
      const Matrix& c = choi_matrix();
      Matrix out(d_in_, d_in_);
      for (int i = 0; i < d_in_; ++i)
        for (int j = 0; j < d_in_; ++j)
          out(i, j) = (c.block(i * d_out_, j * d_out_, d_out_, d_out_).adjoint() * b).trace();
      return out;
    }
  }
  throw numeric_error("unreachable");
}

SuperOp adjoint(const SuperOp& m) {
  switch (m.kind()) {
    case SuperOp::Kind::eb: {
      EBMap adj;
      adj.d_in = m.d_out();
      adj.d_out = m.d_in();
      for (const auto& [x, r] : m.eb().pairs) adj.pairs.emplace_back(r, x);
      return SuperOp(std::move(adj));
    }
    case SuperOp::Kind::kraus: {
      KrausMap adj;
      adj.d_in = m.d_out();
      adj.d_out = m.d_in();
      for (const Matrix& k : m.kraus().kraus) adj.kraus.push_back(k.adjoint());
      return SuperOp(std::move(adj));
    }
    case SuperOp::Kind::choi: {
      const Matrix& c = m.choi_matrix();
      const int di = m.d_in(), dq = m.d_out();
      Matrix adj(static_cast<Eigen::Index>(di) * dq, static_cast<Eigen::Index>(di) * dq);
      // C_adj[(a,i),(b,j)] = conj(C[(i,a),(j,b)]): swap the roles of the
      // input and output indices inside each composite index, then conjugate.
      for (int a = 0; a < dq; ++a)
        for (int i = 0; i < di; ++i)
          for (int b = 0; b < dq; ++b)
            for (int j = 0; j < di; ++j)
              adj(a * di + i, b * di + j) = std::conj(c(i * dq + a, j * dq + b));
      return SuperOp(std::move(adj), dq, di);
    }
  }
  throw numeric_error("unreachable");
}

EBMap make_cq(const std::vector<Matrix>& outputs) {
  if (outputs.empty()) throw input_error("make_cq: no outputs given");
  const int d = static_cast<int>(outputs.size());
  const int d_out = static_cast<int>(outputs.front().rows());
  EBMap m;
  m.d_in = d;
  m.d_out = d_out;
  for (int k = 0; k < d; ++k) {
    const Matrix& r = outputs[k];
    if (std::abs(r.trace() - Complex(1.0, 0.0)) > 1e-9)
      throw input_error("make_cq: output " + std::to_string(k) + " is not unit trace");
    Matrix x = Matrix::Zero(d, d);
    x(k, k) = 1.0;
    m.pairs.emplace_back(std::move(x), r);
  }
  validate(m);
  return m;
}

EBMap make_qc(const std::vector<Matrix>& povm) {
  if (povm.empty()) throw input_error("make_qc: no POVM elements given");
  const int d = static_cast<int>(povm.front().rows());
  const int n = static_cast<int>(povm.size());
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& x : povm) sum += x;
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
    throw input_error("make_qc: POVM elements do not sum to the identity");
  EBMap m;
  m.d_in = d;
  m.d_out = n;
  for (int k = 0; k < n; ++k) {
    Matrix r = Matrix::Zero(n, n);
    r(k, k) = 1.0;
    m.pairs.emplace_back(povm[k], std::move(r));
  }
  validate(m);
  return m;
}

SuperOp make_depolarizing(int d, double lam) {
  if (d < 2) throw input_error("make_depolarizing: d must be >= 2");
  if (!(lam >= 0.0 && lam <= 1.0))
    throw input_error("make_depolarizing: lambda must lie in [0, 1]");
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  // Choi = lam * sum_ij |i><j| (x) |i><j|  +  (1-lam)/d * I_{d^2}
  Matrix c = Matrix::Zero(n, n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) c(i * d + i, j * d + j) += lam;
  c += ((1.0 - lam) / d) * Matrix::Identity(n, n);
  return SuperOp(std::move(c), d, d);
}

bool check_cond1(const EBMap& m, double tol) {
  for (const auto& [x, r] : m.pairs)
    if (!is_entrywise_nonneg(x, tol)) return false;
  return true;
}

bool check_cond2(const EBMap& m, double tol) {
  for (const auto& [x, r] : m.pairs)
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      for (Eigen::Index j = 0; j < r.cols(); ++j)
        if (i != j && std::abs(r(i, j)) > tol) return false;
  return true;
}

EBClass eb_class_from_string(const std::string& s) {
  if (s == "general") return EBClass::general;
  if (s == "cond1") return EBClass::cond1;
  if (s == "cond2") return EBClass::cond2;
  if (s == "cq") return EBClass::cq;
  if (s == "qc") return EBClass::qc;
  throw input_error("unknown EB class '" + s +
                    "' (expected general|cond1|cond2|cq|qc)");
}

std::string to_string(EBClass c) {
  switch (c) {
    case EBClass::general: return "general";
    case EBClass::cond1: return "cond1";
    case EBClass::cond2: return "cond2";
    case EBClass::cq: return "cq";
    case EBClass::qc: return "qc";
  }
  return "?";
}

namespace {

// Entrywise-nonnegative rank-one measurement plus nonnegative diagonal jitter.
Matrix random_cond1_measurement(Rng& rng, int d) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = std::abs(rng.gaussian());
  Matrix x = (v * v.transpose()).cast<Complex>();
  for (int i = 0; i < d; ++i) x(i, i) += rng.uniform(0.0, 0.1);
  return x;
}

Matrix random_diag_psd(Rng& rng, int d) {
  Matrix r = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double g = rng.gaussian();
    r(i, i) = g * g;
  }
  return r;
}

}  // namespace

EBMap random_eb(int d_in, int d_out, int n_pairs, EBClass cls, std::uint64_t seed,
                bool normalize) {
  if (d_in < 2 || d_out < 2) throw input_error("random_eb: dimensions must be >= 2");
  if (n_pairs < 1) throw input_error("random_eb: need at least one pair");
  if (cls == EBClass::cq && n_pairs != d_in)
    throw input_error("random_eb: CQ maps require n_pairs == d_in");
  if (cls == EBClass::qc && n_pairs != d_out)
    throw input_error("random_eb: QC maps require n_pairs == d_out");

  Rng rng(seed);
  EBMap m;
  m.d_in = d_in;
  m.d_out = d_out;

  switch (cls) {
    case EBClass::general:
      for (int k = 0; k < n_pairs; ++k) {
        Matrix x = random_psd(rng, d_in);
        Matrix r = random_psd(rng, d_out);
        m.pairs.emplace_back(std::move(x), std::move(r));
      }
      break;
    case EBClass::cond1:
      for (int k = 0; k < n_pairs; ++k) {
        Matrix x = random_cond1_measurement(rng, d_in);
        Matrix r = random_psd(rng, d_out);
        m.pairs.emplace_back(std::move(x), std::move(r));
      }
      break;
    case EBClass::cond2:
      for (int k = 0; k < n_pairs; ++k) {
        Matrix x = random_psd(rng, d_in);
        Matrix r = random_diag_psd(rng, d_out);
        m.pairs.emplace_back(std::move(x), std::move(r));
      }
      break;
    case EBClass::cq: {
      std::vector<Matrix> outputs;
      for (int k = 0; k < d_in; ++k) {
        Matrix r = random_psd(rng, d_out);
        outputs.push_back(r / r.trace().real());
      }
      return make_cq(outputs);
    }
    case EBClass::qc: {
      std::vector<Matrix> w;
      Matrix s = Matrix::Zero(d_in, d_in);
      for (int k = 0; k < d_out; ++k) {
        w.push_back(random_psd(rng, d_in));
        s += w.back();
      }
      const Matrix s_inv_sqrt = spectral_power(s, -0.5);
      std::vector<Matrix> povm;
      povm.reserve(w.size());
      for (const Matrix& wk : w) povm.push_back(s_inv_sqrt * wk * s_inv_sqrt);
      return make_qc(povm);
    }
  }

  if (normalize) {
    // Unit-trace outputs; measurements rescaled by one global scalar so the
    // largest eigenvalue of sum_k X_k is 1. Global scaling preserves both
    // entrywise positivity and diagonality.
    Matrix xsum = Matrix::Zero(d_in, d_in);
    for (auto& [x, r] : m.pairs) {
      r /= r.trace().real();
      xsum += x;
    }
    const double top = hermitian_eig(xsum).eigenvalues[0];
    for (auto& [x, r] : m.pairs) x /= top;
  }
  validate(m);
  return m;
}

KrausMap random_cp_kraus(int d_in, int d_out, int n_kraus, std::uint64_t seed,
                         bool normalize) {
  if (d_in < 2 || d_out < 2) throw input_error("random_cp_kraus: dimensions must be >= 2");
  if (n_kraus < 1) throw input_error("random_cp_kraus: need at least one operator");
  Rng rng(seed);
  KrausMap m;
  m.d_in = d_in;
  m.d_out = d_out;
  for (int k = 0; k < n_kraus; ++k)
    m.kraus.push_back(random_gaussian(rng, d_out, d_in) / std::sqrt(2.0 * d_out * n_kraus));
  if (normalize) {
    Matrix s = Matrix::Zero(d_in, d_in);
    for (const Matrix& k : m.kraus) s += k.adjoint() * k;
    const Matrix s_inv_sqrt = spectral_power(s, -0.5);
    for (Matrix& k : m.kraus) k = k * s_inv_sqrt;
  }
  validate(m);
  return m;
}

KrausMap eb_to_kraus(const EBMap& m) {
  validate(m);
  KrausMap out;
  out.d_in = m.d_in;
  out.d_out = m.d_out;
  for (const auto& [x, r] : m.pairs) {
    const HermitianSpectrum sx = hermitian_eig(x);
    const HermitianSpectrum sr = hermitian_eig(r);
    const double x_cut = std::max(sx.eigenvalues[0], 0.0) * kEigClip;
    const double r_cut = std::max(sr.eigenvalues[0], 0.0) * kEigClip;
    for (Eigen::Index i = 0; i < sr.eigenvalues.size(); ++i) {
      if (sr.eigenvalues[i] <= r_cut) continue;
      for (Eigen::Index j = 0; j < sx.eigenvalues.size(); ++j) {
        if (sx.eigenvalues[j] <= x_cut) continue;
        const double w = std::sqrt(sr.eigenvalues[i] * sx.eigenvalues[j]);
        out.kraus.push_back(w * sr.eigenvectors.col(i) *
                            sx.eigenvectors.col(j).adjoint());
      }
    }
  }
  if (out.kraus.empty()) throw input_error("eb_to_kraus: map is numerically zero");
  return out;
}

Matrix choi(const SuperOp& m) {
  const int di = m.d_in(), dq = m.d_out();
  Matrix c(static_cast<Eigen::Index>(di) * dq, static_cast<Eigen::Index>(di) * dq);
  Matrix e = Matrix::Zero(di, di);
  for (int i = 0; i < di; ++i)
    for (int j = 0; j < di; ++j) {
      e(i, j) = 1.0;
      c.block(i * dq, j * dq, dq, dq) = m.apply(e);
      e(i, j) = 0.0;
    }
  return c;
}

Matrix kraus_to_choi(const KrausMap& m) { return choi(SuperOp(m)); }

KrausMap choi_to_kraus(const Matrix& c, int d_in, int d_out) {
  const Eigen::Index n = static_cast<Eigen::Index>(d_in) * d_out;
  if (c.rows() != n || c.cols() != n)
    throw input_error("choi_to_kraus: Choi matrix has wrong dimensions");
  const HermitianSpectrum s = hermitian_eig(c);
  const double cut = std::max(s.eigenvalues[0], 0.0) * kEigClip;
  KrausMap out;
  out.d_in = d_in;
  out.d_out = d_out;
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    if (s.eigenvalues[k] <= cut) continue;
    const double w = std::sqrt(s.eigenvalues[k]);
    Matrix op(d_out, d_in);
    for (int i = 0; i < d_in; ++i)
      for (int a = 0; a < d_out; ++a) op(a, i) = w * s.eigenvectors(i * d_out + a, k);
    out.kraus.push_back(std::move(op));
  }
  if (out.kraus.empty()) throw input_error("choi_to_kraus: map is numerically zero");
  return out;
}

KrausMap to_kraus(const SuperOp& m) {
  switch (m.kind()) {
    case SuperOp::Kind::eb:
      return eb_to_kraus(m.eb());
    case SuperOp::Kind::kraus:
      return m.kraus();
    case SuperOp::Kind::choi:
      return choi_to_kraus(m.choi_matrix(), m.d_in(), m.d_out());
  }
  throw numeric_error("unreachable");
}

SuperOp tensor(const SuperOp& m1, const SuperOp& m2) {
  const long d_in = static_cast<long>(m1.d_in()) * m2.d_in();
  const long d_out = static_cast<long>(m1.d_out()) * m2.d_out();
  if (d_in > kMaxDim || d_out > kMaxDim)
    throw resource_error("tensor: product dimension " +
                         std::to_string(std::max(d_in, d_out)) + " exceeds budget " +
                         std::to_string(kMaxDim));
  const KrausMap k1 = to_kraus(m1);
  const KrausMap k2 = to_kraus(m2);
  KrausMap out;
  out.d_in = static_cast<int>(d_in);
  out.d_out = static_cast<int>(d_out);
  for (const Matrix& a : k1.kraus)
    for (const Matrix& b : k2.kraus) out.kraus.push_back(kron(a, b));
  return SuperOp(std::move(out));
}

nlohmann::json channel_to_json(const SuperOp& m) {
  nlohmann::json j;
  j["d_in"] = m.d_in();
  j["d_out"] = m.d_out();
  switch (m.kind()) {
    case SuperOp::Kind::eb: {
      j["kind"] = "eb";
      nlohmann::json pairs = nlohmann::json::array();
      for (const auto& [x, r] : m.eb().pairs)
        pairs.push_back({{"X", matrix_to_json(x)}, {"R", matrix_to_json(r)}});
      j["pairs"] = std::move(pairs);
      break;
    }
    case SuperOp::Kind::kraus: {
      j["kind"] = "kraus";
      nlohmann::json ops = nlohmann::json::array();
      for (const Matrix& k : m.kraus().kraus) ops.push_back(matrix_to_json(k));
      j["kraus"] = std::move(ops);
      break;
    }
    case SuperOp::Kind::choi:
      j["kind"] = "choi";
      j["choi"] = matrix_to_json(m.choi_matrix());
      break;
  }
  return j;
}

SuperOp channel_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw input_error("channel JSON must be an object");
  for (const char* field : {"kind", "d_in", "d_out"})
    if (!j.contains(field))
      throw input_error(std::string("channel JSON missing field '") + field + "'");
  const auto kind = j.at("kind").get<std::string>();
  const int d_in = j.at("d_in").get<int>();
  const int d_out = j.at("d_out").get<int>();
  if (kind == "eb") {
    if (!j.contains("pairs")) throw input_error("channel JSON: kind 'eb' needs field 'pairs'");
    EBMap m;
    m.d_in = d_in;
    m.d_out = d_out;
    for (const auto& p : j.at("pairs")) {
      if (!p.contains("X") || !p.contains("R"))
        throw input_error("channel JSON: each pair needs fields 'X' and 'R'");
      m.pairs.emplace_back(matrix_from_json(p.at("X")), matrix_from_json(p.at("R")));
    }
    return SuperOp(std::move(m));
  }
  if (kind == "kraus") {
    if (!j.contains("kraus"))
      throw input_error("channel JSON: kind 'kraus' needs field 'kraus'");
    KrausMap m;
    m.d_in = d_in;
    m.d_out = d_out;
    for (const auto& op : j.at("kraus")) m.kraus.push_back(matrix_from_json(op));
    return SuperOp(std::move(m));
  }
  if (kind == "choi") {
    if (!j.contains("choi")) throw input_error("channel JSON: kind 'choi' needs field 'choi'");
    return SuperOp(matrix_from_json(j.at("choi")), d_in, d_out);
  }
  throw input_error("channel JSON: unknown kind '" + kind + "'");
}

SuperOp load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open channel file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw input_error(path + ": " + e.what());
  }
  try {
    return channel_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(path + ": malformed channel JSON: " + e.what());
  }
}

void save_channel(const SuperOp& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write channel file '" + path + "'");
  out << channel_to_json(m).dump(2) << "\n";
}

}  // namespace qnorm
