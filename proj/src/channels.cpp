#include "mpdo/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace mpdo {

KrausChannel::KrausChannel(std::vector<Matrix> kraus, int d_in, int d_out, std::optional<YSplit> y_split)
    : kraus_(std::move(kraus)), d_in_(d_in), d_out_(d_out), y_split_(y_split) {
  if (d_in_ < 1 || d_out_ < 1) throw std::invalid_argument("KrausChannel: dimensions must be positive");
  if (kraus_.empty()) throw std::invalid_argument("KrausChannel: empty Kraus family");
  for (const auto& k : kraus_)
    if (k.rows() != d_out_ || k.cols() != d_in_)
      throw std::invalid_argument("KrausChannel: Kraus operator has shape " + std::to_string(k.rows()) + "x" +
                                  std::to_string(k.cols()) + ", expected " + std::to_string(d_out_) + "x" +
                                  std::to_string(d_in_));
  if (y_split_ && y_split_->d_b * y_split_->d_c != d_out_)
    throw std::invalid_argument("KrausChannel: y_split d_B*d_C must equal d_out");
}

KrausChannel KrausChannel::with_y_split(YSplit split) const { return {kraus_, d_in_, d_out_, split}; }

Matrix Superoperator::apply(const Matrix& x) const {
  if (x.rows() != d_in || x.cols() != d_in) throw std::invalid_argument("Superoperator::apply: dimension mismatch");
  return unvec(matrix * vec(x), d_out, d_out);
}

Superoperator Superoperator::compose_after(const Superoperator& first) const {
  if (first.d_out != d_in) throw std::invalid_argument("Superoperator::compose_after: dimension mismatch");
  return {matrix * first.matrix, first.d_in, d_out};
}

bool Superoperator::is_trace_preserving(double tol) const {
  // Tr(S(X)) = vec(I_out)^T S vec(X) must equal vec(I_in)^T vec(X).
  Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(d_in * d_in);
  for (int i = 0; i < d_out; ++i) row += matrix.row(i * d_out + i);
  for (int i = 0; i < d_in; ++i) row(i * d_in + i) -= 1.0;
  return row.cwiseAbs().maxCoeff() <= tol;
}

Matrix apply(const KrausChannel& n, const Matrix& rho) {
  if (rho.rows() != n.d_in() || rho.cols() != n.d_in())
    throw std::invalid_argument("apply: input is " + std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()) +
                                ", channel expects " + std::to_string(n.d_in()));
  Matrix out = Matrix::Zero(n.d_out(), n.d_out());
  for (const auto& k : n.kraus()) out.noalias() += k * rho * k.adjoint();
  return out;
}

Matrix apply_adjoint(const KrausChannel& n, const Matrix& x) {
  if (x.rows() != n.d_out() || x.cols() != n.d_out()) throw std::invalid_argument("apply_adjoint: dimension mismatch");
  Matrix out = Matrix::Zero(n.d_in(), n.d_in());
  for (const auto& k : n.kraus()) out.noalias() += k.adjoint() * x * k;
  return out;
}

Matrix choi(const KrausChannel& n) {
  // Entry [(o1,i),(o2,j)] = sum_a K_a(o1,i) conj(K_a(o2,j)): a sum of vec(K_a) vec(K_a)†.
  const int dim = n.d_out() * n.d_in();
  Matrix j = Matrix::Zero(dim, dim);
  for (const auto& k : n.kraus()) {
    Vector v = vec(k);
    j.noalias() += v * v.adjoint();
  }
  return j;
}

KrausChannel kraus_from_choi(const Matrix& j, int d_in, int d_out, double cutoff) {
  if (j.rows() != d_in * d_out || j.cols() != d_in * d_out)
    throw std::invalid_argument("kraus_from_choi: Choi matrix has the wrong size");
  EigenSystem es = hermitian_eig(j);
  std::vector<Matrix> kraus;
  for (Eigen::Index k = 0; k < es.values.size(); ++k)
    if (es.values(k) > cutoff) kraus.push_back(std::sqrt(es.values(k)) * unvec(es.vectors.col(k), d_out, d_in));
  if (kraus.empty()) kraus.push_back(Matrix::Zero(d_out, d_in));
  return {std::move(kraus), d_in, d_out};
}

KrausChannel canonical_kraus(const KrausChannel& n) {
  double scale = 0.0;
  for (const auto& k : n.kraus()) scale = std::max(scale, k.squaredNorm());
  auto c = kraus_from_choi(choi(n), n.d_in(), n.d_out(), 1e-12 * std::max(scale, 1e-300));
  return n.y_split() ? c.with_y_split(*n.y_split()) : c;
}

Superoperator superoperator_matrix(const KrausChannel& n) {
  // vec(K X K†) = kron(K, conj(K)) vec(X) in row-major vectorization.
  Matrix s = Matrix::Zero(n.d_out() * n.d_out(), n.d_in() * n.d_in());
  for (const auto& k : n.kraus()) s.noalias() += kron(k, k.conjugate());
  return {std::move(s), n.d_in(), n.d_out()};
}

KrausChannel adjoint_channel(const KrausChannel& n) {
  std::vector<Matrix> kraus;
  kraus.reserve(n.kraus_count());
  for (const auto& k : n.kraus()) kraus.push_back(k.adjoint());
  return {std::move(kraus), n.d_out(), n.d_in()};
}

KrausChannel compose(const KrausChannel& second, const KrausChannel& first) {
  if (second.d_in() != first.d_out()) throw std::invalid_argument("compose: dimension mismatch");
  std::vector<Matrix> kraus;
  kraus.reserve(second.kraus_count() * first.kraus_count());
  for (const auto& a : second.kraus())
    for (const auto& b : first.kraus()) kraus.push_back(a * b);
  return {std::move(kraus), first.d_in(), second.d_out(), second.y_split()};
}

KrausChannel tensor_identity(int d_pre, const KrausChannel& n) {
  std::vector<Matrix> kraus;
  const Matrix id = Matrix::Identity(d_pre, d_pre);
  for (const auto& k : n.kraus()) kraus.push_back(kron(id, k));
  return {std::move(kraus), d_pre * n.d_in(), d_pre * n.d_out()};
}

double tp_error(const KrausChannel& n) {
  Matrix s = Matrix::Zero(n.d_in(), n.d_in());
  for (const auto& k : n.kraus()) s.noalias() += k.adjoint() * k;
  return (s - Matrix::Identity(n.d_in(), n.d_in())).norm();
}

bool is_trace_preserving(const KrausChannel& n, double tol) { return tp_error(n) <= tol; }

namespace {

double bistochastic_residual(const KrausChannel& n) {
  return trace_norm_hermitian(mpdo::apply(n, maximally_mixed(n.d_in())) - maximally_mixed(n.d_out()));
}

} // namespace

bool is_bistochastic(const KrausChannel& n, double tol) { return bistochastic_residual(n) <= tol; }

int kraus_span_dimension(const KrausChannel& n, double tol) {
  Matrix stacked(n.d_in() * n.d_out(), static_cast<Eigen::Index>(n.kraus_count()));
  for (std::size_t a = 0; a < n.kraus_count(); ++a) stacked.col(static_cast<Eigen::Index>(a)) = vec(n.kraus()[a]);
  RealVector s = Eigen::BDCSVD<Matrix>(stacked).singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (double x : s)
    if (x > tol * s(0)) ++r;
  return r;
}

ChannelReport validate(const KrausChannel& n, int samples, std::uint64_t seed) {
  ChannelReport r;
  Matrix j = choi(n);
  RealVector w = hermitian_eigenvalues(j);
  r.choi_min_eigenvalue = w.size() ? w(w.size() - 1) : 0.0;
  r.is_cp = r.choi_min_eigenvalue >= -1e-10 * std::max(1.0, std::abs(w(0)));
  r.tp_error = tp_error(n);
  r.is_tp = r.tp_error <= 1e-10;
  r.bistochastic_error = bistochastic_residual(n);
  r.is_bistochastic = r.is_tp && r.bistochastic_error <= 1e-10;
  r.kraus_span_dim = kraus_span_dimension(n);
  if (r.kraus_span_dim == n.d_in() * n.d_out()) {
    r.is_strictly_positive_sample = true;
    r.strict_positivity_via = StrictPositivityVia::kraus_span;
  } else {
    r.strict_positivity_via = StrictPositivityVia::sampling;
    Rng rng(seed);
    double worst = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
      RealVector out = hermitian_eigenvalues(mpdo::apply(n, random_pure_state(n.d_in(), rng)));
      worst = std::min(worst, out(out.size() - 1) / std::max(out(0), 1e-300));
    }
    r.min_sampled_output_eigenvalue = samples > 0 ? worst : 0.0;
    r.is_strictly_positive_sample = samples > 0 && worst > 1e-10;
  }
  return r;
}

ChainState embed_apply(const KrausChannel& n, const ChainState& state) {
  if (!n.y_split()) throw std::invalid_argument("embed_apply: channel has no y_split");
  const auto& dims = state.shape.dims();
  if (dims.empty() || dims.back() != n.d_in())
    throw std::invalid_argument("embed_apply: last subsystem dimension does not match channel input");
  const int d_in = n.d_in();
  const int d_out = n.d_out();
  const Eigen::Index pre = state.rho.rows() / d_in;

  // Block (a,b) of the output is sum_K K ρ_ab K†, with ρ_ab the d_in×d_in block of the input.
  Matrix out = Matrix::Zero(pre * d_out, pre * d_out);
  Matrix tmp(d_out, d_in);
  for (const auto& k : n.kraus()) {
    const Matrix kd = k.adjoint();
    for (Eigen::Index b = 0; b < pre; ++b)
      for (Eigen::Index a = 0; a < pre; ++a) {
        tmp.noalias() = k * state.rho.block(a * d_in, b * d_in, d_in, d_in);
        out.block(a * d_out, b * d_out, d_out, d_out).noalias() += tmp * kd;
      }
  }

  std::vector<int> new_dims(dims.begin(), dims.end() - 1);
  std::vector<std::string> labels(state.shape.labels().begin(), state.shape.labels().end() - 1);
  int b_count = 0;
  for (const auto& l : labels)
    if (l.size() > 1 && l[0] == 'B') ++b_count;
  new_dims.push_back(n.y_split()->d_b);
  labels.push_back("B" + std::to_string(b_count + 1));
  new_dims.push_back(n.y_split()->d_c);
  labels.push_back("C");
  return {std::move(out), SubsystemShape(std::move(new_dims), std::move(labels))};
}

KrausChannel petz_map(const KrausChannel& n, const Matrix& reference, double tol) {
  if (reference.rows() != n.d_in() || reference.cols() != n.d_in())
    throw std::invalid_argument("petz_map: reference has the wrong dimension");
  if (std::abs(reference.trace()) == 0.0) throw std::invalid_argument("petz_map: reference has zero trace");
  const Matrix sqrt_ref = sqrt_psd(reference);
  const Matrix inv_sqrt_image = inverse_sqrt_psd(mpdo::apply(n, reference), tol);
  std::vector<Matrix> kraus;
  kraus.reserve(n.kraus_count());
  for (const auto& k : n.kraus()) kraus.push_back(sqrt_ref * k.adjoint() * inv_sqrt_image);
  return {std::move(kraus), n.d_out(), n.d_in()};
}

KrausChannel haar_y_channel(int d_c, int d_b, int d_env, std::uint64_t seed) {
  if (d_c < 1 || d_b < 1 || d_env < 1) throw std::invalid_argument("haar_y_channel: dimensions must be positive");
  Rng rng(seed);
  const int total = d_b * d_c * d_env;
  const Matrix u = haar_unitary(total, rng);
  // Output rows are enumerated (b, c, e) with b slowest; the isometry is the first d_c columns.
  std::vector<Matrix> kraus(d_env, Matrix::Zero(d_b * d_c, d_c));
  for (int bc = 0; bc < d_b * d_c; ++bc)
    for (int e = 0; e < d_env; ++e) kraus[e].row(bc) = u.block(bc * d_env + e, 0, 1, d_c);
  return {std::move(kraus), d_c, d_b * d_c, YSplit{d_b, d_c}};
}

KrausChannel example_ep(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("example_ep: p must lie in [0,1]");
  const double a = std::sqrt(1.0 - p) / 2.0;
  const double b = std::sqrt(p) / 2.0;
  Matrix k1(4, 2), k2(4, 2), k3(4, 2), k4(4, 2);
  k1 << a, a, 0, 0, a, -a, 0, 0;
  k2 << b, b, 0, 0, -b, b, 0, 0;
  k3 << 0, 0, a, a, 0, 0, -a, a;
  k4 << 0, 0, b, b, 0, 0, b, -b;
  return {{k1, k2, k3, k4}, 2, 4, YSplit{2, 2}};
}

KrausChannel example_classical3() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix k1 = Matrix::Zero(3, 3), k2 = Matrix::Zero(3, 3), k3 = Matrix::Zero(3, 3);
  k1(1, 0) = s;
  k1(2, 0) = s;
  k2(0, 1) = s;
  k2(2, 1) = s;
  k3(0, 2) = s;
  k3(1, 2) = s;
  return {{k1, k2, k3}, 3, 3};
}

KrausChannel depolarizing_channel(int d) { return forgetful_channel(maximally_mixed(d), d); }

KrausChannel identity_channel(int d) { return {{Matrix::Identity(d, d)}, d, d}; }

KrausChannel unitary_channel(const Matrix& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("unitary_channel: matrix must be square");
  return {{u}, static_cast<int>(u.cols()), static_cast<int>(u.rows())};
}

KrausChannel forgetful_channel(const Matrix& sigma, int d_in) {
  EigenSystem es = hermitian_eig(sigma);
  const int d_out = static_cast<int>(sigma.rows());
  std::vector<Matrix> kraus;
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    if (es.values(k) <= 1e-15) continue;
    for (int j = 0; j < d_in; ++j) {
      Matrix op = Matrix::Zero(d_out, d_in);
      op.col(j) = std::sqrt(es.values(k)) * es.vectors.col(k);
      kraus.push_back(std::move(op));
    }
  }
  return {std::move(kraus), d_in, d_out};
}

KrausChannel attach_channel(const Matrix& sigma_b, const KrausChannel& inner) {
  EigenSystem es = hermitian_eig(sigma_b);
  const int d_b = static_cast<int>(sigma_b.rows());
  std::vector<Matrix> kraus;
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    if (es.values(k) <= 1e-15) continue;
    Matrix col = std::sqrt(es.values(k)) * es.vectors.col(k);
    for (const auto& a : inner.kraus()) kraus.push_back(kron(col, a));
  }
  return {std::move(kraus), inner.d_in(), d_b * inner.d_out(), YSplit{d_b, inner.d_out()}};
}

KrausChannel depolarizing_y_channel(int d_b, int d_c) {
  return attach_channel(maximally_mixed(d_b), depolarizing_channel(d_c));
}

KrausChannel mixture(const KrausChannel& a, double w, const KrausChannel& b) {
  if (a.d_in() != b.d_in() || a.d_out() != b.d_out()) throw std::invalid_argument("mixture: dimension mismatch");
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("mixture: weight must lie in [0,1]");
  std::vector<Matrix> kraus;
  for (const auto& k : a.kraus())
    if (w > 0.0) kraus.push_back(std::sqrt(w) * k);
  for (const auto& k : b.kraus())
    if (w < 1.0) kraus.push_back(std::sqrt(1.0 - w) * k);
  auto split = a.y_split() ? a.y_split() : b.y_split();
  return {std::move(kraus), a.d_in(), a.d_out(), split};
}

KrausChannel builtin_example(const std::string& name, double p, int d) {
  if (name == "Ep" || name == "ep") return example_ep(p);
  if (name == "classical3") return example_classical3();
  if (name == "depolarizing") return depolarizing_channel(d);
  if (name == "identity") return identity_channel(d);
  throw std::invalid_argument("unknown builtin channel '" + name + "'");
}

} // namespace mpdo
