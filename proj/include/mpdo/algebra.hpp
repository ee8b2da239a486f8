#pragma once

#include "mpdo/channels.hpp"
#include "mpdo/instrument.hpp"

#include <vector>

namespace mpdo {

/// Linear subspace of D×D matrices with an HS-orthonormal basis.
struct OperatorSpan {
  int dim_ambient = 0;
  std::vector<Matrix> basis;
  bool contains_identity = false;

  int dim() const { return static_cast<int>(basis.size()); }
  bool is_trivial() const { return dim() == 1 && contains_identity; }
  bool is_full() const { return dim() == dim_ambient * dim_ambient; }
};

/// SVD-based orthonormal basis; singular values <= tol·σ_max are dropped.
/// Throws std::invalid_argument on empty input or mismatched shapes.
OperatorSpan orthonormal_basis(const std::vector<Matrix>& mats, double tol = 1e-8);

/// Orthogonal projection of m onto the span.
Matrix project_onto(const OperatorSpan& span, const Matrix& m);
/// ‖m - P(m)‖_2 / max(‖m‖_2, 1).
double distance_to_span(const OperatorSpan& span, const Matrix& m);
/// Largest relative residual of b_i·b_j outside the span.
double product_closure_error(const OperatorSpan& span);

/// Smallest (not necessarily unital) algebra containing the generators.
OperatorSpan generate_algebra(const std::vector<Matrix>& generators, double tol = 1e-8);

/// {X : [X, G] = 0 for every basis element G}.
OperatorSpan commutant(const OperatorSpan& span, double tol = 1e-8);

/// Commutant of span{E_a† E_b}.
OperatorSpan correctable_algebra(const KrausChannel& n, double tol = 1e-8);

/// Eigenspace of a self-map superoperator at eigenvalue 1 (|λ-1| < tol).
/// Throws std::runtime_error when nothing is found although the map is trace preserving.
OperatorSpan fixed_point_space(const Superoperator& z, double tol = 1e-7);

/// Replaces a *-closed basis by a Hermitian orthonormal one; returns the input otherwise.
OperatorSpan hermitianized(const OperatorSpan& span, double tol = 1e-8);

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct Condition1Report {
  std::vector<Verdict> per_outcome;
  std::vector<int> generated_dim; ///< -1 when inconclusive
  int wielandt_xi = 0;
  Verdict overall = Verdict::inconclusive;
};

/// Each outcome's Kraus set, normalised by an invertible element, must generate Mat_D.
Condition1Report condition1_check(const Instrument& instr, double tol = 1e-8,
                                  double max_condition = 1e8);

/// Dimensions of span{E^{s_k}_{q_k}···E^{s_1}_{q_1}} after each letter (outcomes are 0-based indices).
std::vector<int> span_growth_trace(const Instrument& instr, const std::vector<int>& word, double tol = 1e-8);

} // namespace mpdo
