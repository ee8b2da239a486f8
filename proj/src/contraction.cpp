#include "mpdo/contraction.hpp"

#include "mpdo/algebra.hpp"
#include "mpdo/chain.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mpdo {

namespace {

void require_bistochastic(const KrausChannel& n, const char* who) {
  if (!is_trace_preserving(n, 1e-9) || !is_bistochastic(n, 1e-9))
    throw std::invalid_argument(std::string(who) + ": channel is not bistochastic");
}

Matrix sign_of(const Matrix& h) {
  return hermitian_function(h, [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

/// Tr over the second (input) factor of a (d_out·d_in)-square operator.
Matrix trace_input(const Matrix& x, int d_out, int d_in) {
  Matrix out = Matrix::Zero(d_out, d_out);
  for (int a = 0; a < d_out; ++a)
    for (int b = 0; b < d_out; ++b)
      for (int k = 0; k < d_in; ++k) out(a, b) += x(a * d_in + k, b * d_in + k);
  return out;
}

Matrix matrix_exp_hermitian(const Matrix& h) {
  EigenSystem es = hermitian_eig(h);
  const double top = es.values(0);
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (Eigen::Index k = 0; k < es.values.size(); ++k)
    out.noalias() += std::exp(es.values(k) - top) * es.vectors.col(k) * es.vectors.col(k).adjoint();
  return out / out.trace().real();
}

Matrix matrix_log_pd(const Matrix& s) {
  return hermitian_function(s, [](double x) { return std::log(std::max(x, 1e-300)); });
}

struct ChoiGeometry {
  Matrix inv_sqrt;    ///< pseudo-inverse square root of J
  Matrix kernel_proj; ///< projector onto ker J
  Matrix w;           ///< orthonormal basis of V = {v : v⊗C^{d_in} ⊆ range J}
};

ChoiGeometry choi_geometry(const KrausChannel& n) {
  const Matrix j = choi(n);
  EigenSystem es = hermitian_eig(j);
  const double cut = 1e-11 * std::max(es.values(0), 1e-300);
  const Eigen::Index dim = j.rows();
  ChoiGeometry g;
  g.inv_sqrt = Matrix::Zero(dim, dim);
  g.kernel_proj = Matrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    const Matrix p = es.vectors.col(k) * es.vectors.col(k).adjoint();
    if (es.values(k) > cut)
      g.inv_sqrt += p / std::sqrt(es.values(k));
    else
      g.kernel_proj += p;
  }
  // v ∈ V iff Σ_k ‖Q(v⊗e_k)‖² = <v|Tr_in Q|v> = 0.
  EigenSystem m = hermitian_eig(trace_input(g.kernel_proj, n.d_out(), n.d_in()));
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < m.values.size(); ++k)
    if (m.values(k) <= 1e-9) cols.push_back(k);
  g.w = Matrix(n.d_out(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) g.w.col(static_cast<Eigen::Index>(k)) = m.vectors.col(cols[k]);
  return g;
}

/// λ_max(J^{-1/2}(σ⊗I)J^{-1/2}) and its smoothed gradient with respect to s (σ = W s W†).
struct Evaluation {
  double lambda_max = 0.0;
  Matrix gradient;
};

Evaluation evaluate(const ChoiGeometry& g, const Matrix& s, int d_in, double mu) {
  const Matrix sigma = g.w * s * g.w.adjoint();
  const Matrix a = g.inv_sqrt * kron(sigma, Matrix::Identity(d_in, d_in)) * g.inv_sqrt;
  EigenSystem es = hermitian_eig(a);
  Evaluation e;
  e.lambda_max = es.values(0);
  Matrix p = Matrix::Zero(a.rows(), a.cols());
  double total = 0.0;
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    const double wk = std::exp((es.values(k) - es.values(0)) / mu);
    if (wk < 1e-16) break;
    total += wk;
    p.noalias() += wk * es.vectors.col(k) * es.vectors.col(k).adjoint();
  }
  p /= total;
  const Matrix t = trace_input(g.inv_sqrt * p * g.inv_sqrt, static_cast<int>(g.w.rows()), d_in);
  e.gradient = g.w.adjoint() * t * g.w;
  e.gradient = (e.gradient + e.gradient.adjoint()) / 2.0;
  return e;
}

} // namespace

Superoperator petz_composition(const KrausChannel& n, const Matrix& reference) {
  return superoperator_matrix(petz_map(n, reference)).compose_after(superoperator_matrix(n));
}

Superoperator petz_recovered_superoperator(const KrausChannel& n) {
  require_bistochastic(n, "petz_recovered_superoperator");
  return petz_composition(n, maximally_mixed(n.d_in()));
}

RealVector petz_spectrum(const KrausChannel& n) { return hermitian_eigenvalues(petz_recovered_superoperator(n).matrix); }

double eta_spectral(const KrausChannel& n) {
  RealVector ev = petz_spectrum(n);
  if (ev.size() < 2) return 0.0;
  return std::clamp(ev(1), 0.0, 1.0);
}

double eta_subleading(const KrausChannel& n, double window) {
  RealVector ev = petz_spectrum(n);
  for (double v : ev)
    if (v < 1.0 - window) return std::clamp(v, 0.0, 1.0);
  return 0.0;
}

double eta_2norm_crosscheck(const KrausChannel& n) {
  require_bistochastic(n, "eta_2norm_crosscheck");
  const int d = n.d_in();
  const Matrix s = superoperator_matrix(n).matrix;
  const Vector vid = vec(Matrix::Identity(d, d));
  const Matrix pk = Matrix::Identity(d * d, d * d) - vid * vid.adjoint() / static_cast<double>(d);
  const Matrix sp = s * pk;
  RealVector sv = Eigen::BDCSVD<Matrix>(sp).singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  return std::clamp(static_cast<double>(n.d_out()) / d * top * top, 0.0, 1.0);
}

double trace_contraction_of_pair(const KrausChannel& n, const Vector& psi, const Vector& phi) {
  const Matrix delta = psi * psi.adjoint() - phi * phi.adjoint();
  return trace_norm_hermitian(mpdo::apply(n, delta)) / 2.0;
}

double eta_trace_estimate(const KrausChannel& n, int restarts, std::uint64_t seed) {
  const int d = n.d_in();
  if (d < 2) return 0.0;
  Rng rng(seed);
  double best = 0.0;
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    Vector psi, phi;
    if (r == 0) {
      psi = Vector::Unit(d, 0);
      phi = Vector::Unit(d, 1);
    } else {
      const Matrix u = haar_unitary(d, rng);
      psi = u.col(0);
      phi = u.col(1);
    }
    double value = trace_contraction_of_pair(n, psi, phi);
    for (int it = 0; it < 500; ++it) {
      const Matrix s = sign_of(mpdo::apply(n, psi * psi.adjoint() - phi * phi.adjoint()));
      EigenSystem es = hermitian_eig(apply_adjoint(n, s));
      const Vector next_psi = es.vectors.col(0);
      const Vector next_phi = es.vectors.col(d - 1);
      const double next = trace_contraction_of_pair(n, next_psi, next_phi);
      if (next <= value + 1e-14) break;
      psi = next_psi;
      phi = next_phi;
      value = next;
    }
    best = std::max(best, value);
  }
  return std::min(best, 1.0);
}

double eta_partially_invariant(const KrausChannel& n, int restarts, std::uint64_t seed) {
  return std::min(1.0, 16.0 * n.d_in() * eta_trace_estimate(n, restarts, seed));
}

KrausChannel trace_out_b(const KrausChannel& n) {
  if (!n.y_split()) throw std::invalid_argument("trace_out_b: channel has no y_split");
  const int db = n.y_split()->d_b;
  const int dc = n.y_split()->d_c;
  std::vector<Matrix> kraus;
  for (const auto& k : n.kraus())
    for (int b = 0; b < db; ++b) kraus.push_back(k.block(b * dc, 0, dc, n.d_in()));
  return {std::move(kraus), n.d_in(), dc};
}

InvariantPair invariant_pair(const KrausChannel& n, double tol) {
  const KrausChannel t = trace_out_b(n);
  if (t.d_in() != t.d_out()) throw std::invalid_argument("invariant_pair: d_C must equal d_in");
  const int dc = t.d_in();
  const Superoperator st = superoperator_matrix(t);
  Eigen::ComplexEigenSolver<Matrix> es(st.matrix);
  const auto& ev = es.eigenvalues();
  Eigen::Index lead = 0;
  for (Eigen::Index k = 1; k < ev.size(); ++k)
    if (std::abs(ev(k)) > std::abs(ev(lead)) + 1e-12 ||
        (std::abs(std::abs(ev(k)) - std::abs(ev(lead))) <= 1e-12 && ev(k).real() > ev(lead).real()))
      lead = k;
  int peripheral = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (std::abs(ev(k)) >= std::abs(ev(lead)) - 1e-7) ++peripheral;

  InvariantPair out;
  Matrix nu;
  if (peripheral > 1) {
    out.degenerate = true;
    nu = project_onto(fixed_point_space(st), maximally_mixed(dc));
  } else {
    nu = unvec(es.eigenvectors().col(lead), dc, dc);
  }
  const cplx tr = nu.trace();
  if (std::abs(tr) < 1e-14) throw std::runtime_error("invariant_pair: fixed operator has zero trace");
  nu /= tr;
  nu = (nu + nu.adjoint()) / 2.0;
  out.nu = nu;
  const Matrix image = mpdo::apply(n, nu);
  out.sigma = partial_trace(image, SubsystemShape({n.y_split()->d_b, dc}, {"B", "C"}), {"B"});
  out.residual = trace_norm_hermitian(image - kron(out.sigma, nu));
  out.factorizes = out.residual <= tol;
  return out;
}

double forgetful_weight_at(const KrausChannel& n, const Matrix& sigma) {
  const ChoiGeometry g = choi_geometry(n);
  const Matrix big = kron(sigma, Matrix::Identity(n.d_in(), n.d_in()));
  if ((g.kernel_proj * big * g.kernel_proj).norm() > 1e-9 * std::max(big.norm(), 1.0)) return 0.0;
  const double top = hermitian_eigenvalues(g.inv_sqrt * big * g.inv_sqrt)(0);
  return top > 0.0 ? std::min(1.0, 1.0 / top) : 0.0;
}

ForgetfulResult forgetful_decomposition(const KrausChannel& n, int iterations, int restarts, std::uint64_t seed) {
  const ChoiGeometry g = choi_geometry(n);
  const Eigen::Index r = g.w.cols();
  ForgetfulResult best{0.0, maximally_mixed(n.d_out())};
  if (r == 0) return best;
  Rng rng(seed);
  double best_lambda = std::numeric_limits<double>::infinity();
  Matrix best_s;
  for (int start = 0; start < std::max(restarts, 1); ++start) {
    Matrix s = start == 0 ? maximally_mixed(static_cast<int>(r)) : random_density_hs(static_cast<int>(r), rng);
    if (start > 0) s = 0.5 * s + 0.5 * maximally_mixed(static_cast<int>(r));
    Matrix logs = matrix_log_pd(s);
    for (int it = 0; it < std::max(iterations, 1); ++it) {
      const double mu = 0.05 / (1.0 + it / 10.0);
      Evaluation e = evaluate(g, s, n.d_in(), mu * std::max(best_lambda == std::numeric_limits<double>::infinity() ? 1.0 : best_lambda, 1e-12));
      if (e.lambda_max < best_lambda) {
        best_lambda = e.lambda_max;
        best_s = s;
      }
      if (r == 1) break;
      const double gn = e.gradient.norm();
      if (gn < 1e-14) break;
      logs -= (1.0 / std::sqrt(1.0 + it)) * e.gradient / gn;
      s = matrix_exp_hermitian(logs);
    }
  }
  if (best_lambda > 0.0 && std::isfinite(best_lambda)) {
    best.weight = std::min(1.0, 1.0 / best_lambda);
    best.sigma = g.w * best_s * g.w.adjoint();
  }
  return best;
}

double forgetful_weight(const KrausChannel& n, int iterations) { return forgetful_decomposition(n, iterations).weight; }

DpiProbeResult dpi_probe(const KrausChannel& n, int samples, int d_a, int d_b, std::uint64_t seed) {
  const int dc = n.d_in();
  const int total = d_a * d_b * dc;
  const KrausChannel lifted = tensor_identity(d_a * d_b, n);
  const SubsystemShape before({d_a, d_b, dc}, {"A", "B", "C"});
  const SubsystemShape after({d_a, d_b, n.d_out()}, {"A", "B", "C"});
  const Tripartition t{{"A"}, {"B"}, {"C"}};
  Rng rng(seed);
  DpiProbeResult out;
  for (int s = 0; s < samples; ++s) {
    Matrix rho;
    switch (s % 3) {
    case 0: rho = random_density_hs(total, rng); break;
    case 1: rho = random_density_hs(total, 2, rng); break;
    default: {
      RealVector p(total);
      for (int k = 0; k < total; ++k) p(k) = -std::log(std::max(rng.uniform(), 1e-300));
      rho = Matrix::Zero(total, total);
      rho.diagonal() = (p / p.sum()).cast<cplx>();
    }
    }
    const ChainState in{rho, before};
    const ChainState image{mpdo::apply(lifted, rho), after};
    const double den = cmi(in, t);
    if (den > 1e-6) {
      const double ratio = cmi(image, t) / den;
      ++out.counted;
      out.max_ratio = std::max(out.max_ratio, ratio);
      if (ratio > 1.0 + 1e-8) ++out.violations;
      const int bin = std::clamp(static_cast<int>(std::floor(ratio * 10.0)), 0, 11);
      ++out.histogram[static_cast<std::size_t>(bin)];
    }
    const double den1 = trace_norm_cmi(in, t);
    if (std::abs(den1) > 1e-6) {
      const double ratio = trace_norm_cmi(image, t) / den1;
      ++out.counted_trace;
      out.max_ratio_trace = std::max(out.max_ratio_trace, ratio);
      if (ratio > 1.0 + 1e-8) ++out.violations_trace;
    }
  }
  return out;
}

EtaReport eta_report(const KrausChannel& n, int restarts, std::uint64_t seed, int forgetful_iterations) {
  EtaReport r;
  if (is_trace_preserving(n, 1e-9) && is_bistochastic(n, 1e-9)) {
    r.eta_spectral = eta_spectral(n);
    r.eta_2norm_crosscheck = eta_2norm_crosscheck(n);
    r.eta_subleading = eta_subleading(n);
  }
  r.eta_trace_estimate = eta_trace_estimate(n, restarts, seed);
  r.eta_partially_invariant = std::min(1.0, 16.0 * n.d_in() * r.eta_trace_estimate);
  r.forgetful_weight = forgetful_weight(n, forgetful_iterations);
  r.correctable_trivial = correctable_algebra(n).dim() == 1;
  return r;
}

} // namespace mpdo
