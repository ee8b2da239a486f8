#include "mpdo/algebra.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mpdo {

namespace {

Matrix stack_columns(const std::vector<Matrix>& mats) {
  const Eigen::Index n = mats.front().size();
  Matrix cols(n, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k) cols.col(static_cast<Eigen::Index>(k)) = vec(mats[k]);
  return cols;
}

bool identity_in(const OperatorSpan& span) {
  if (span.basis.empty()) return false;
  const int d = span.dim_ambient;
  return distance_to_span(span, Matrix::Identity(d, d)) <= 1e-8;
}

OperatorSpan span_of(std::vector<Matrix> basis, int d) {
  OperatorSpan s;
  s.dim_ambient = d;
  s.basis = std::move(basis);
  s.contains_identity = identity_in(s);
  return s;
}

} // namespace

OperatorSpan orthonormal_basis(const std::vector<Matrix>& mats, double tol) {
  if (mats.empty()) throw std::invalid_argument("orthonormal_basis: empty input");
  const Eigen::Index rows = mats.front().rows();
  const Eigen::Index cols = mats.front().cols();
  if (rows != cols) throw std::invalid_argument("orthonormal_basis: matrices must be square");
  for (const auto& m : mats)
    if (m.rows() != rows || m.cols() != cols) throw std::invalid_argument("orthonormal_basis: shape mismatch");

  Matrix a = stack_columns(mats);
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const RealVector& s = svd.singularValues();
  std::vector<Matrix> basis;
  if (s.size() > 0 && s(0) > 0.0)
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s(k) > tol * s(0)) basis.push_back(unvec(svd.matrixU().col(k), rows, cols));
  return span_of(std::move(basis), static_cast<int>(rows));
}

Matrix project_onto(const OperatorSpan& span, const Matrix& m) {
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (const auto& b : span.basis) out += (b.adjoint() * m).trace() * b;
  return out;
}

double distance_to_span(const OperatorSpan& span, const Matrix& m) {
  return (m - project_onto(span, m)).norm() / std::max(m.norm(), 1.0);
}

double product_closure_error(const OperatorSpan& span) {
  double worst = 0.0;
  for (const auto& a : span.basis)
    for (const auto& b : span.basis) worst = std::max(worst, distance_to_span(span, a * b));
  return worst;
}

OperatorSpan generate_algebra(const std::vector<Matrix>& generators, double tol) {
  if (generators.empty()) return {};
  OperatorSpan current = orthonormal_basis(generators, tol);
  const int d = current.dim_ambient;
  for (int iter = 0; iter < d * d && !current.basis.empty(); ++iter) {
    std::vector<Matrix> next = current.basis;
    for (const auto& g : generators)
      for (const auto& b : current.basis) next.push_back(g * b);
    OperatorSpan grown = orthonormal_basis(next, tol);
    if (grown.dim() == current.dim()) break;
    current = std::move(grown);
  }
  return hermitianized(current, tol);
}

OperatorSpan commutant(const OperatorSpan& span, double tol) {
  const int d = span.dim_ambient;
  const int dd = d * d;
  if (span.basis.empty()) {
    std::vector<Matrix> all;
    for (int k = 0; k < dd; ++k) all.push_back(unvec(Vector::Unit(dd, k), d, d));
    return span_of(std::move(all), d);
  }
  const Matrix id = Matrix::Identity(d, d);
  Matrix stacked(static_cast<Eigen::Index>(span.basis.size()) * dd, dd);
  for (std::size_t k = 0; k < span.basis.size(); ++k) {
    const Matrix& g = span.basis[k];
    stacked.block(static_cast<Eigen::Index>(k) * dd, 0, dd, dd) = kron(id, g.transpose()) - kron(g, id);
  }
  Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double cut = tol * std::max(s.size() ? s(0) : 0.0, 1.0);
  std::vector<Matrix> basis;
  for (Eigen::Index k = 0; k < dd; ++k)
    if (k >= s.size() || s(k) <= cut) basis.push_back(unvec(svd.matrixV().col(k), d, d));
  return hermitianized(span_of(std::move(basis), d), tol);
}

OperatorSpan correctable_algebra(const KrausChannel& n, double tol) {
  std::vector<Matrix> products;
  for (const auto& a : n.kraus())
    for (const auto& b : n.kraus()) products.push_back(a.adjoint() * b);
  return commutant(orthonormal_basis(products, tol), tol);
}

OperatorSpan fixed_point_space(const Superoperator& z, double tol) {
  if (z.d_in != z.d_out) throw std::invalid_argument("fixed_point_space: map is not a self-map");
  const int d = z.d_in;
  Eigen::ComplexEigenSolver<Matrix> es(z.matrix);
  if (es.info() != Eigen::Success) throw std::runtime_error("fixed_point_space: eigensolver failed");
  std::vector<Matrix> candidates;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (std::abs(es.eigenvalues()(k) - 1.0) < tol) candidates.push_back(unvec(es.eigenvectors().col(k), d, d));
  if (candidates.empty()) {
    if (z.is_trace_preserving(1e-8))
      throw std::runtime_error("fixed_point_space: no eigenvalue near 1 for a trace-preserving map");
    return OperatorSpan{d, {}, false};
  }
  return hermitianized(orthonormal_basis(candidates, 1e-8));
}

OperatorSpan hermitianized(const OperatorSpan& span, double tol) {
  if (span.basis.empty()) return span;
  std::vector<Matrix> parts;
  for (const auto& b : span.basis) {
    if (distance_to_span(span, b.adjoint()) > 1e-8) return span;
    parts.push_back((b + b.adjoint()) / 2.0);
    parts.push_back((b - b.adjoint()) / cplx(0.0, 2.0));
  }
  // Tr(AB) is real for Hermitian A, B, so real Gram-Schmidt keeps every vector Hermitian.
  std::vector<Matrix> out;
  double scale = 0.0;
  for (const auto& x : parts) scale = std::max(scale, x.norm());
  for (auto x : parts) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : out) x -= (q * x).trace().real() * q;
    const double nx = x.norm();
    if (nx > std::max(tol, 1e-7) * scale) out.push_back(x / nx);
  }
  if (static_cast<int>(out.size()) != span.dim()) return span;
  return span_of(std::move(out), span.dim_ambient);
}

const char* to_string(Verdict v) {
  switch (v) {
  case Verdict::pass: return "pass";
  case Verdict::fail: return "fail";
  case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Condition1Report condition1_check(const Instrument& instr, double tol, double max_condition) {
  Condition1Report r;
  const int d = instr.dim();
  int p = 0;
  bool any_fail = false;
  bool any_inconclusive = false;
  for (const auto& m : instr.maps) {
    const KrausChannel minimal = canonical_kraus(m);
    p = std::max(p, static_cast<int>(minimal.kraus_count()));
    int best = -1;
    double best_cond = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < minimal.kraus_count(); ++k) {
      RealVector s = Eigen::JacobiSVD<Matrix>(minimal.kraus()[k]).singularValues();
      double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
      if (cond < best_cond) {
        best_cond = cond;
        best = static_cast<int>(k);
      }
    }
    if (best < 0 || !(best_cond < max_condition)) {
      r.per_outcome.push_back(Verdict::inconclusive);
      r.generated_dim.push_back(-1);
      any_inconclusive = true;
      continue;
    }
    const Matrix inv = minimal.kraus()[static_cast<std::size_t>(best)].inverse();
    std::vector<Matrix> gens;
    for (const auto& e : minimal.kraus()) gens.push_back(inv * e);
    const int dim = generate_algebra(gens, tol).dim();
    r.generated_dim.push_back(dim);
    if (dim == d * d) {
      r.per_outcome.push_back(Verdict::pass);
    } else {
      r.per_outcome.push_back(Verdict::fail);
      any_fail = true;
    }
  }
  r.wielandt_xi = d * d - p + 1;
  r.overall = any_fail ? Verdict::fail : any_inconclusive ? Verdict::inconclusive : Verdict::pass;
  if (instr.maps.empty()) r.overall = Verdict::inconclusive;
  return r;
}

std::vector<int> span_growth_trace(const Instrument& instr, const std::vector<int>& word, double tol) {
  std::vector<KrausChannel> minimal;
  for (const auto& m : instr.maps) minimal.push_back(canonical_kraus(m));
  const int d = instr.dim();
  std::vector<int> dims;
  std::vector<Matrix> current{Matrix::Identity(d, d)};
  for (int letter : word) {
    if (letter < 0 || letter >= static_cast<int>(minimal.size()))
      throw std::invalid_argument("span_growth_trace: outcome index out of range");
    std::vector<Matrix> next;
    for (const auto& e : minimal[static_cast<std::size_t>(letter)].kraus())
      for (const auto& x : current) next.push_back(e * x);
    OperatorSpan s = orthonormal_basis(next, tol);
    dims.push_back(s.dim());
    current = s.basis;
    if (current.empty()) current.push_back(Matrix::Zero(d, d));
  }
  return dims;
}

} // namespace mpdo
