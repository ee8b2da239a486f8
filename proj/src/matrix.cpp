#include "mpdo/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mpdo {

SubsystemShape::SubsystemShape(std::vector<int> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  if (dims_.size() != labels_.size())
    throw std::invalid_argument("SubsystemShape: dims and labels differ in length");
  std::set<std::string> seen;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (dims_[k] < 1) throw std::invalid_argument("SubsystemShape: dimensions must be positive");
    if (!seen.insert(labels_[k]).second)
      throw std::invalid_argument("SubsystemShape: duplicate label '" + labels_[k] + "'");
  }
}

int SubsystemShape::total_dim() const {
  return std::accumulate(dims_.begin(), dims_.end(), 1, std::multiplies<>());
}

std::size_t SubsystemShape::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw std::invalid_argument("unknown subsystem label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

bool SubsystemShape::contains(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

int SubsystemShape::dim_of(const std::vector<std::string>& labels) const {
  int d = 1;
  for (const auto& l : labels) d *= dim_of(l);
  return d;
}

SubsystemShape SubsystemShape::restricted(const std::vector<std::string>& labels) const {
  std::vector<bool> keep(size(), false);
  for (const auto& l : labels) keep[index_of(l)] = true;
  std::vector<int> d;
  std::vector<std::string> n;
  for (std::size_t k = 0; k < size(); ++k) {
    if (keep[k]) {
      d.push_back(dims_[k]);
      n.push_back(labels_[k]);
    }
  }
  return {std::move(d), std::move(n)};
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

// Flat-index offsets contributed by the subsystems in `which` (in shape order),
// enumerated with the first listed subsystem as the slow index.
std::vector<Eigen::Index> index_offsets(const std::vector<int>& dims, const std::vector<int>& which) {
  std::vector<Eigen::Index> stride(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];
  std::vector<Eigen::Index> offsets{0};
  for (int w : which) {
    std::vector<Eigen::Index> next;
    next.reserve(offsets.size() * dims[w]);
    for (Eigen::Index o : offsets)
      for (int x = 0; x < dims[w]; ++x) next.push_back(o + x * stride[w]);
    offsets = std::move(next);
  }
  return offsets;
}

} // namespace

Matrix partial_trace(const Matrix& m, const SubsystemShape& shape, const std::vector<std::string>& keep) {
  const int total = shape.total_dim();
  if (m.rows() != total || m.cols() != total)
    throw std::invalid_argument("partial_trace: matrix side does not match shape");
  std::vector<bool> kept(shape.size(), false);
  for (const auto& l : keep) kept[shape.index_of(l)] = true;
  std::vector<int> kept_idx, traced_idx;
  for (std::size_t k = 0; k < shape.size(); ++k) (kept[k] ? kept_idx : traced_idx).push_back(static_cast<int>(k));

  const auto ko = index_offsets(shape.dims(), kept_idx);
  const auto to = index_offsets(shape.dims(), traced_idx);
  const auto dk = static_cast<Eigen::Index>(ko.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index j = 0; j < dk; ++j)
    for (Eigen::Index i = 0; i < dk; ++i) {
      cplx s = 0.0;
      for (Eigen::Index t : to) s += m(ko[i] + t, ko[j] + t);
      out(i, j) = s;
    }
  return out;
}

Matrix permute_subsystems(const Matrix& m, const std::vector<int>& dims, const std::vector<int>& perm) {
  if (perm.size() != dims.size()) throw std::invalid_argument("permute_subsystems: bad permutation");
  std::vector<bool> seen(dims.size(), false);
  for (int p : perm) {
    if (p < 0 || p >= static_cast<int>(dims.size()) || seen[p])
      throw std::invalid_argument("permute_subsystems: bad permutation");
    seen[p] = true;
  }
  // Output index enumerated in permuted order maps to these input offsets.
  const auto src = index_offsets(dims, perm);
  const auto n = static_cast<Eigen::Index>(src.size());
  if (m.rows() != n || m.cols() != n) throw std::invalid_argument("permute_subsystems: size mismatch");
  Matrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = m(src[i], src[j]);
  return out;
}

EigenSystem hermitian_eig(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eig: non-square input");
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_eig: solver failed");
  EigenSystem es;
  es.values = solver.eigenvalues().reverse();
  es.vectors = solver.eigenvectors().rowwise().reverse();
  return es;
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eigenvalues: non-square input");
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_eigenvalues: solver failed");
  return solver.eigenvalues().reverse();
}

namespace {

constexpr double kNegativeClip = -1e-8;

void check_psd_spectrum(const RealVector& w) {
  if (w.size() > 0 && w.minCoeff() < kNegativeClip)
    throw std::domain_error("negative eigenvalue " + std::to_string(w.minCoeff()) + " below -1e-8: not a valid state");
}

} // namespace

Matrix matrix_log2_psd(const Matrix& m, double cutoff) {
  EigenSystem es = hermitian_eig(m);
  check_psd_spectrum(es.values);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < es.values.size(); ++k)
    if (es.values(k) > cutoff) out.noalias() += std::log2(es.values(k)) * es.vectors.col(k) * es.vectors.col(k).adjoint();
  return out;
}

double entropy_bits(const Matrix& rho, double cutoff) {
  RealVector w = hermitian_eigenvalues(rho);
  check_psd_spectrum(w);
  double s = 0.0;
  for (double x : w)
    if (x > cutoff) s -= x * std::log2(x);
  return s;
}

double relative_entropy_bits(const Matrix& rho, const Matrix& sigma, double cutoff) {
  EigenSystem es = hermitian_eig(sigma);
  check_psd_spectrum(es.values);
  Matrix log_sigma = Matrix::Zero(sigma.rows(), sigma.cols());
  double leak = 0.0;
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    const auto v = es.vectors.col(k);
    if (es.values(k) > cutoff)
      log_sigma.noalias() += std::log2(es.values(k)) * v * v.adjoint();
    else
      leak += (v.adjoint() * rho * v)(0, 0).real();
  }
  if (leak > 1e-10) return std::numeric_limits<double>::infinity();
  return -entropy_bits(rho, cutoff) - (rho * log_sigma).trace().real();
}

namespace {

RealVector singular_values(const Matrix& m) {
  if (m.rows() <= 16 && m.cols() <= 16) return Eigen::JacobiSVD<Matrix>(m).singularValues();
  return Eigen::BDCSVD<Matrix>(m).singularValues();
}

} // namespace

double norm(const Matrix& m, NormKind kind) {
  switch (kind) {
  case NormKind::trace: return singular_values(m).sum();
  case NormKind::hilbert_schmidt: return m.norm();
  case NormKind::operator_norm: {
    RealVector s = singular_values(m);
    return s.size() ? s(0) : 0.0;
  }
  }
  return 0.0;
}

double trace_norm(const Matrix& m) { return norm(m, NormKind::trace); }

double trace_norm_hermitian(const Matrix& m) { return hermitian_eigenvalues(m).cwiseAbs().sum(); }

Matrix inverse_sqrt_psd(const Matrix& m, double rel_tol) {
  EigenSystem es = hermitian_eig(m);
  const double top = es.values.size() ? std::max(es.values(0), 0.0) : 0.0;
  const double thr = rel_tol * top;
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < es.values.size(); ++k)
    if (es.values(k) > thr && es.values(k) > 0.0)
      out.noalias() += (1.0 / std::sqrt(es.values(k))) * es.vectors.col(k) * es.vectors.col(k).adjoint();
  return out;
}

Matrix sqrt_psd(const Matrix& m) {
  return hermitian_function(m, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

Vector vec(const Matrix& m) {
  Vector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("unvec: size mismatch");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  return m;
}

Matrix maximally_mixed(int d) { return Matrix::Identity(d, d) / static_cast<double>(d); }

Matrix maximally_entangled(int d) {
  Vector phi = Vector::Zero(d * d);
  for (int i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return phi * phi.adjoint();
}

Matrix basis_projector(int d, int i) {
  Matrix p = Matrix::Zero(d, d);
  p(i, i) = 1.0;
  return p;
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0.0, cplx(0, -1), cplx(0, 1), 0.0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Matrix ginibre(int rows, int cols, Rng& rng) {
  Matrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  return g;
}

Matrix haar_unitary(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("haar_unitary: dim must be >= 1");
  Matrix z = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0) q.col(k) *= r(k, k) / a;
  }
  return q;
}

Vector haar_vector(int dim, Rng& rng) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  return v / v.norm();
}

Matrix random_pure_state(int dim, Rng& rng) {
  Vector v = haar_vector(dim, rng);
  return v * v.adjoint();
}

Matrix random_density_hs(int dim, int k, Rng& rng) {
  Matrix g = ginibre(dim, k, rng);
  Matrix r = g * g.adjoint();
  return r / r.trace().real();
}

Matrix random_density_hs(int dim, Rng& rng) { return random_density_hs(dim, dim, rng); }

Matrix sample_random(SampleKind kind, int dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("sample_random: dim must be >= 1");
  Rng rng(seed);
  switch (kind) {
  case SampleKind::haar_unitary: return haar_unitary(dim, rng);
  case SampleKind::pure_state: return random_pure_state(dim, rng);
  case SampleKind::density_hs: return random_density_hs(dim, rng);
  }
  return {};
}

double hermiticity_error(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

} // namespace mpdo
