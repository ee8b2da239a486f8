#pragma once

#include "mpdo/matrix.hpp"
#include "mpdo/state.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mpdo {

/// (d_B, d_C): a Y-shaped output factorization B ⊗ C with B the slow index.
struct YSplit {
  int d_b = 1;
  int d_c = 1;
  bool operator==(const YSplit&) const = default;
};

/// Completely positive map X -> sum_a K_a X K_a† with declared dimensions.
class KrausChannel {
public:
  KrausChannel() = default;
  KrausChannel(std::vector<Matrix> kraus, int d_in, int d_out, std::optional<YSplit> y_split = std::nullopt);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }
  const std::optional<YSplit>& y_split() const { return y_split_; }
  std::size_t kraus_count() const { return kraus_.size(); }
  bool is_self_map() const { return d_in_ == d_out_; }

  KrausChannel with_y_split(YSplit split) const;

private:
  std::vector<Matrix> kraus_;
  int d_in_ = 0;
  int d_out_ = 0;
  std::optional<YSplit> y_split_;
};

/// Matrix of a linear map on operators in the row-major vectorization.
struct Superoperator {
  Matrix matrix; ///< (d_out² × d_in²)
  int d_in = 0;
  int d_out = 0;

  Matrix apply(const Matrix& x) const;
  Superoperator compose_after(const Superoperator& first) const; ///< this ∘ first
  bool is_trace_preserving(double tol = 1e-10) const;
};

Matrix apply(const KrausChannel& n, const Matrix& rho);
/// Heisenberg-picture (HS adjoint) action: sum_a K_a† X K_a.
Matrix apply_adjoint(const KrausChannel& n, const Matrix& x);

/// J(N) = sum_ij N(|i><j|) ⊗ |i><j|  (output factor first).
Matrix choi(const KrausChannel& n);
/// Kraus family from a Choi matrix in the convention of choi(); keeps eigenvalues > 1e-12.
KrausChannel kraus_from_choi(const Matrix& j, int d_in, int d_out, double cutoff = 1e-12);
/// Same map with a linearly independent (minimal) Kraus family.
KrausChannel canonical_kraus(const KrausChannel& n);

Superoperator superoperator_matrix(const KrausChannel& n);
KrausChannel adjoint_channel(const KrausChannel& n);
KrausChannel compose(const KrausChannel& second, const KrausChannel& first); ///< second ∘ first
/// id_pre ⊗ N
KrausChannel tensor_identity(int d_pre, const KrausChannel& n);

enum class StrictPositivityVia { kraus_span, sampling };

struct ChannelReport {
  bool is_cp = false;
  bool is_tp = false;
  bool is_bistochastic = false;
  bool is_strictly_positive_sample = false;
  StrictPositivityVia strict_positivity_via = StrictPositivityVia::sampling;
  double choi_min_eigenvalue = 0.0;
  double tp_error = 0.0;
  double bistochastic_error = 0.0;
  int kraus_span_dim = 0;
  double min_sampled_output_eigenvalue = 0.0;
};

/// CP/TP/bistochastic checks plus the strict-positivity probe (Kraus-span sufficient test,
/// then `samples` Haar pure inputs). A sampling pass is evidence, not proof.
ChannelReport validate(const KrausChannel& n, int samples = 64, std::uint64_t seed = 0x5eed);

double tp_error(const KrausChannel& n);
bool is_trace_preserving(const KrausChannel& n, double tol = 1e-10);
bool is_bistochastic(const KrausChannel& n, double tol = 1e-10);

/// Dimension of span{K_a} inside Mat(d_out × d_in).
int kraus_span_dimension(const KrausChannel& n, double tol = 1e-8);

/// Applies id ⊗ ... ⊗ id ⊗ N to the last subsystem. The last label (the propagating leg)
/// becomes B<k+1> and a fresh "C" is appended. Requires a y_split whose d_C matches.
ChainState embed_apply(const KrausChannel& n, const ChainState& state);

/// Petz recovery map P[Y] = σ^{1/2} N†[N(σ)^{-1/2} Y N(σ)^{-1/2}] σ^{1/2}.
/// Inverses are pseudo-inverses on {λ > tol·λ_max}. Throws on a zero-trace reference.
KrausChannel petz_map(const KrausChannel& n, const Matrix& reference, double tol = 1e-10);

/// Haar-random Stinespring isometry C -> B ⊗ C ⊗ Env, environment traced out.
KrausChannel haar_y_channel(int d_c, int d_b, int d_env, std::uint64_t seed);

// Built-in channels.
KrausChannel example_ep(double p);          ///< bistochastic Y-shaped C²->C²⊗C²
KrausChannel example_classical3();          ///< 3-level classical self-map
KrausChannel depolarizing_channel(int d);   ///< ρ -> τ_d Tr ρ
KrausChannel identity_channel(int d);
KrausChannel unitary_channel(const Matrix& u);
/// Constant map ρ -> σ Tr ρ.
KrausChannel forgetful_channel(const Matrix& sigma, int d_in);
/// Y-shaped N[ρ] = σ_B ⊗ inner[ρ].
KrausChannel attach_channel(const Matrix& sigma_b, const KrausChannel& inner);
/// Y-shaped fully depolarizing N[ρ] = τ_B ⊗ τ_C Tr ρ.
KrausChannel depolarizing_y_channel(int d_b, int d_c);
/// w·a + (1-w)·b (same dimensions); keeps a's y_split.
KrausChannel mixture(const KrausChannel& a, double w, const KrausChannel& b);

/// Built-in lookup by name: "Ep", "classical3", "depolarizing", "identity".
KrausChannel builtin_example(const std::string& name, double p = 0.5, int d = 2);

} // namespace mpdo
