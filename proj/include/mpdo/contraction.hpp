#pragma once

#include "mpdo/channels.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace mpdo {

struct EtaReport {
  std::optional<double> eta_spectral;         ///< bistochastic channels only
  std::optional<double> eta_2norm_crosscheck; ///< bistochastic channels only
  std::optional<double> eta_subleading;       ///< largest eigenvalue of Petz∘N below the unit window
  double eta_trace_estimate = 0.0;
  double eta_partially_invariant = 0.0;
  double forgetful_weight = 0.0;
  bool correctable_trivial = false;
};

/// Superoperator of Petz_{reference,N} ∘ N for any channel.
Superoperator petz_composition(const KrausChannel& n, const Matrix& reference);

/// Superoperator of Petz_{τ,N} ∘ N. Throws std::invalid_argument unless N is bistochastic.
Superoperator petz_recovered_superoperator(const KrausChannel& n);

/// Eigenvalues of Petz_{τ,N}∘N, descending.
RealVector petz_spectrum(const KrausChannel& n);

/// Second eigenvalue of Petz_{τ,N}∘N, counted with multiplicity.
double eta_spectral(const KrausChannel& n);

/// Largest eigenvalue below 1 - window (0 when every eigenvalue lies in the window).
double eta_subleading(const KrausChannel& n, double window = 1e-7);

/// (d_out/d_in)·σ_max(N restricted to traceless operators)².
double eta_2norm_crosscheck(const KrausChannel& n);

/// Lower bound on sup ‖N[ρ]-N[ρ']‖₁/‖ρ-ρ'‖₁ from orthogonal pure pairs, random restarts
/// and alternating refinement.
double eta_trace_estimate(const KrausChannel& n, int restarts = 20, std::uint64_t seed = 1);

/// ‖N[ψψ†-φφ†]‖₁/2 for the given pure input vectors.
double trace_contraction_of_pair(const KrausChannel& n, const Vector& psi, const Vector& phi);

/// min(1, 16·d_in·eta_trace_estimate).
double eta_partially_invariant(const KrausChannel& n, int restarts = 20, std::uint64_t seed = 1);

/// Tr_B ∘ N as a channel on C.
KrausChannel trace_out_b(const KrausChannel& n);

struct InvariantPair {
  Matrix nu;
  Matrix sigma;
  double residual = 0.0; ///< ‖N[ν] − σ⊗ν‖₁
  bool degenerate = false;
  bool factorizes = false;
};

/// ν is the fixed point of Tr_B∘N, σ = Tr_C N[ν]. With a degenerate leading eigenvalue ν is
/// the projection of τ onto the fixed space and `degenerate` is set.
InvariantPair invariant_pair(const KrausChannel& n, double tol = 1e-10);

struct ForgetfulResult {
  double weight = 0.0; ///< w such that Choi(N) - w·(σ⊗I) ⪰ 0
  Matrix sigma;
};

/// Largest forgetful component found by mirror descent over σ with restarts.
ForgetfulResult forgetful_decomposition(const KrausChannel& n, int iterations = 300, int restarts = 8,
                                        std::uint64_t seed = 7);
double forgetful_weight(const KrausChannel& n, int iterations = 300);

/// max{t : Choi(N) - t·(σ⊗I) ⪰ 0} for a fixed state σ on the output.
double forgetful_weight_at(const KrausChannel& n, const Matrix& sigma);

struct DpiProbeResult {
  double max_ratio = 0.0;
  int violations = 0;
  int counted = 0;
  std::array<int, 12> histogram{}; ///< bins of width 0.1 on [0, 1.2), last bin also takes overflow
  double max_ratio_trace = 0.0;
  int violations_trace = 0;
  int counted_trace = 0;
};

/// Samples ρ_ABC (HS, low-rank HS, classical diagonal; round robin), applies id_AB ⊗ N on C and
/// compares CMI and trace-norm CMI before and after. Denominators below 1e-6 are skipped.
DpiProbeResult dpi_probe(const KrausChannel& n, int samples, int d_a, int d_b, std::uint64_t seed);

EtaReport eta_report(const KrausChannel& n, int restarts = 20, std::uint64_t seed = 1, int forgetful_iterations = 300);

} // namespace mpdo
