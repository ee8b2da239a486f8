#pragma once

#include "mpdo/channels.hpp"
#include "mpdo/state.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mpdo {

/// Disjoint label sets; each set is contiguous in chain order.
struct Tripartition {
  std::vector<std::string> a;
  std::vector<std::string> b;
  std::vector<std::string> c;
};

/// Throws std::invalid_argument unless the parts are disjoint, contiguous and known to `shape`.
/// With `require_cover` the parts must also exhaust the shape.
void validate_tripartition(const Tripartition& t, const SubsystemShape& shape, bool require_cover = true);

/// A | B1..Bl | C for an open chain.
Tripartition standard_tripartition(const SubsystemShape& shape);

/// Contiguous blocks of the given sizes (in subsystems), in chain order. Sizes must sum to shape.size().
Tripartition tripartition_from_sizes(const SubsystemShape& shape, int a, int b, int c);

/// Input to the first channel: the maximally entangled state on A ⊗ C, or an explicit state on
/// A ⊗ C with A of dimension d_a (d_a = 1 for no reference).
struct ChainInput {
  std::optional<Matrix> sigma;
  int d_a = 0;

  static ChainInput max_entangled() { return {}; }
  static ChainInput explicit_state(Matrix sigma, int d_a) { return {std::move(sigma), d_a}; }
};

constexpr int default_dimension_cap = 1 << 13;

/// Open chain with shape [A, B1..Bl, C].
ChainState build_chain(const KrausChannel& n, int ell, const ChainInput& input = ChainInput::max_entangled(),
                       int dim_cap = default_dimension_cap);

/// Closed loop Σ_ij <i|_C N^l(|i><j|) |j>_C, normalised, shape [B1..Bl].
ChainState build_periodic(const KrausChannel& n, int ell, int dim_cap = default_dimension_cap);

double entropy(const ChainState& state, const std::vector<std::string>& labels);
double cmi(const ChainState& state, const Tripartition& t);
/// ‖ρ_ABC − ρ_A⊗ρ_BC‖₁ − ‖ρ_AB − ρ_A⊗ρ_B‖₁
double trace_norm_cmi(const ChainState& state, const Tripartition& t);
/// ‖ρ − ρ_rest ⊗ ν_C‖₁ with C the last subsystem.
double product_deviation(const ChainState& state, const Matrix& nu);

/// kron(x, y) with x on labels_x and y on labels_y, reordered into `shape` order.
Matrix product_in_shape_order(const SubsystemShape& shape, const Matrix& x, const std::vector<std::string>& labels_x,
                              const Matrix& y, const std::vector<std::string>& labels_y);

struct MarkovGibbsResult {
  Matrix hamiltonian; ///< γ ∝ 2^{-H}
  double gap = 0.0;   ///< D(ρ‖γ) in bits
};

/// Markov candidate H = −Σ log₂ρ_{A_i A_{i+1}} + Σ_{interior} log₂ρ_{A_i} over consecutive blocks covering the chain.
MarkovGibbsResult markov_gibbs_gap(const ChainState& state, const std::vector<std::vector<std::string>>& blocking);

enum class ContinuityKind { cmi_hs, cmi_trace, afw, cmi_hs_fannes };

struct ContinuityParams {
  double epsilon = 0.0; ///< d·Tr G² for the HS kinds, ‖G‖₁ for cmi_trace
  double t = 0.0;       ///< trace distance for afw
  int dim = 2;          ///< total dimension (HS kinds) or the conditioned system (afw)
};

/// Analytic continuity bounds in bits:
///   cmi_hs        4 log d ε − 4 ε log ε                (ε ≤ 1/e)
///   cmi_hs_fannes same with ε replaced by √ε           (√ε ≤ 1/e)
///   cmi_trace     2ε
///   afw           2T log d + (1+T) h(T/(1+T))
double continuity_bound(ContinuityKind kind, const ContinuityParams& params);

} // namespace mpdo
