#pragma once

// Dense complex matrix primitives shared by every other part of the toolkit.
//
// Tensor-index convention (used everywhere, never repeated elsewhere):
//   * kron(a, b) puts the left factor on the slow (major) index:
//       kron(a,b)[(i1,i2),(j1,j2)] = a[i1,j1] * b[i2,j2],  row = i1*b.rows() + i2.
//   * Operators are vectorized row-major: vec(X)[i*cols + j] = X(i, j).
//     With this choice vec(A X B) = kron(A, B^T) vec(X).
//   * Entropies are in bits, Hilbert-metric logarithms in nats.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mpdo {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Ordered local dimensions with unique labels annotating a tensor-product space.
class SubsystemShape {
public:
  SubsystemShape() = default;
  SubsystemShape(std::vector<int> dims, std::vector<std::string> labels);

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return dims_.size(); }
  int total_dim() const;

  /// Position of `label`; throws std::invalid_argument if absent.
  std::size_t index_of(const std::string& label) const;
  bool contains(const std::string& label) const;
  int dim_of(const std::string& label) const { return dims_[index_of(label)]; }

  /// Product of the dims of the given labels.
  int dim_of(const std::vector<std::string>& labels) const;

  /// Sub-shape restricted to `labels`, kept in this shape's order.
  SubsystemShape restricted(const std::vector<std::string>& labels) const;

  bool operator==(const SubsystemShape&) const = default;

private:
  std::vector<int> dims_;
  std::vector<std::string> labels_;
};

enum class NormKind { trace, hilbert_schmidt, operator_norm };

Matrix kron(const Matrix& a, const Matrix& b);

/// Reduced operator on the labels in `keep` (order follows `shape`).
Matrix partial_trace(const Matrix& m, const SubsystemShape& shape,
                     const std::vector<std::string>& keep);

/// Reorders tensor factors: output factor k is input factor perm[k].
Matrix permute_subsystems(const Matrix& m, const std::vector<int>& dims,
                          const std::vector<int>& perm);

struct EigenSystem {
  RealVector values; ///< descending
  Matrix vectors;    ///< columns match `values`
};

/// Spectral decomposition of (m + m†)/2; throws on non-square input.
EigenSystem hermitian_eig(const Matrix& m);
RealVector hermitian_eigenvalues(const Matrix& m);

/// log2 on the support (eigenvalues > cutoff); eigenvalues <= cutoff contribute 0.
/// Throws std::domain_error for eigenvalues below -1e-8.
Matrix matrix_log2_psd(const Matrix& m, double cutoff = 1e-12);

/// Von Neumann entropy in bits.
double entropy_bits(const Matrix& rho, double cutoff = 1e-12);

/// D(rho||sigma) = Tr rho (log2 rho - log2 sigma) in bits; +inf if supp(rho) is not inside supp(sigma).
double relative_entropy_bits(const Matrix& rho, const Matrix& sigma, double cutoff = 1e-12);

double norm(const Matrix& m, NormKind kind);
double trace_norm(const Matrix& m);
/// Trace norm of (m + m†)/2 through eigenvalues; faster than the SVD route.
double trace_norm_hermitian(const Matrix& m);

/// Hermitian matrix function f applied on the spectrum of (m + m†)/2.
template <class F>
Matrix hermitian_function(const Matrix& m, F&& f) {
  EigenSystem es = hermitian_eig(m);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    double fv = f(es.values(k));
    if (fv != 0.0) out.noalias() += fv * es.vectors.col(k) * es.vectors.col(k).adjoint();
  }
  return out;
}

/// Pseudo-inverse square root on the support {lambda > rel_tol * lambda_max}.
Matrix inverse_sqrt_psd(const Matrix& m, double rel_tol = 1e-10);
Matrix sqrt_psd(const Matrix& m);

Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

Matrix maximally_mixed(int d);
/// |Phi><Phi| with |Phi> = sum_i |ii>/sqrt(d).
Matrix maximally_entangled(int d);
Matrix basis_projector(int d, int i);

// Pauli matrices.
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

/// Seeded generator passed by value; same seed gives bit-identical draws.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double normal() { return gauss_(engine_); }
  double uniform() { return unif_(engine_); }
  cplx complex_normal() { return {normal() * M_SQRT1_2, normal() * M_SQRT1_2}; }
  std::uint64_t next_seed() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

enum class SampleKind { haar_unitary, pure_state, density_hs };

Matrix ginibre(int rows, int cols, Rng& rng);
Matrix haar_unitary(int dim, Rng& rng);
Vector haar_vector(int dim, Rng& rng);
Matrix random_pure_state(int dim, Rng& rng);
Matrix random_density_hs(int dim, Rng& rng);
/// Hilbert-Schmidt ensemble with an auxiliary dimension k (rank <= k).
Matrix random_density_hs(int dim, int k, Rng& rng);
Matrix sample_random(SampleKind kind, int dim, std::uint64_t seed);

/// max |m - m†| entrywise.
double hermiticity_error(const Matrix& m);

} // namespace mpdo
