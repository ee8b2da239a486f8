#pragma once

#include "mpdo/algebra.hpp"
#include "mpdo/channels.hpp"
#include "mpdo/instrument.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mpdo {

constexpr double infinite_distance = std::numeric_limits<double>::infinity();
constexpr long long default_enumeration_cap = 1LL << 16;

/// M_s[ρ] = <u_s| N[ρ] |u_s> on the B output, u_s = basis·|s> (computational basis by default).
Instrument instrument_from_channel(const KrausChannel& n, const std::optional<Matrix>& basis = std::nullopt);

/// inf{λ : a ≤ λ b}; +inf when supp(a) ⊄ supp(b). Throws on a zero operand.
double hilbert_sup(const Matrix& a, const Matrix& b);
/// ln(sup(a/b)·sup(b/a)); +inf when the supports differ.
double hilbert_metric(const Matrix& a, const Matrix& b);

/// max h(M(a), M(b)) over sampled rank-1 pairs, the best few refined by local random search.
double projective_diameter_estimate(const KrausChannel& m, int samples, std::uint64_t seed);
/// tanh(Δ/4), equal to 1 for an infinite diameter.
double birkhoff_ratio(const KrausChannel& m, int samples, std::uint64_t seed);

struct StrictPositivity {
  Verdict verdict = Verdict::inconclusive;
  StrictPositivityVia via = StrictPositivityVia::sampling;
  double min_sampled_eigenvalue = 0.0; ///< smallest output eigenvalue over sampled pure inputs
};

StrictPositivity strict_positivity_check(const KrausChannel& m, int samples = 64, std::uint64_t seed = 0x5eed);

/// Outcomes become the words of length xi (lexicographic); the map of s_1..s_xi is M_{s_xi}∘…∘M_{s_1}.
Instrument coarse_grain(const Instrument& instr, int xi, long long cap = default_enumeration_cap);

struct Trajectory {
  std::vector<int> word; ///< 1-based outcome labels in time order
  double weight = 0.0;   ///< p(b)
  Matrix state;          ///< ρ_{AC,b}, trace one
};

std::string word_to_string(const std::vector<int>& word);

struct EnsembleMode {
  bool enumerate = true;
  int samples = 0;
  std::uint64_t seed = 0;

  static EnsembleMode enumeration() { return {}; }
  static EnsembleMode sampled(int n, std::uint64_t seed) { return {false, n, seed}; }
};

/// Trajectories of id_A ⊗ M_b on σ_{AC} (maximally entangled by default, A of dimension D).
/// Enumeration returns every word with p(b) > 0 in lexicographic order; sampling draws words
/// sequentially by the Born rule.
std::vector<Trajectory> trajectory_ensemble(const Instrument& instr, int ell, const EnsembleMode& mode,
                                            const std::optional<Matrix>& sigma = std::nullopt,
                                            long long cap = default_enumeration_cap);

double mutual_information(const Matrix& rho_ac, int d_a, int d_c);

struct MeasuredCmi {
  double cmi = 0.0;
  double max_mi = 0.0;
  std::vector<std::string> words;
  std::vector<double> weights;
  std::vector<double> per_outcome_mi;
};

/// Σ_b p(b) I(A:C)_b for enumeration, the sample mean for sampling.
MeasuredCmi measured_cmi(const Instrument& instr, int ell, const EnsembleMode& mode,
                         const std::optional<Matrix>& sigma = std::nullopt,
                         long long cap = default_enumeration_cap);

} // namespace mpdo
