#include "doctest.h"

#include "mpdo/algebra.hpp"
#include "mpdo/chain.hpp"
#include "mpdo/contraction.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace mpdo;

namespace {

// ρ ↦ Σ_i p_i U_i (τ_B ⊗ ρ) U_i†: unital by construction.
KrausChannel random_bistochastic_y(int d_b, int d_c, int terms, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w;
  double total = 0.0;
  for (int i = 0; i < terms; ++i) total += w.emplace_back(rng.uniform() + 0.1);
  std::vector<Matrix> kraus;
  for (int i = 0; i < terms; ++i) {
    Matrix u = haar_unitary(d_b * d_c, rng);
    for (int b = 0; b < d_b; ++b) {
      Matrix embed = Matrix::Zero(d_b * d_c, d_c);
      embed.block(b * d_c, 0, d_c, d_c) = Matrix::Identity(d_c, d_c);
      kraus.push_back(std::sqrt(w[i] / total / d_b) * u * embed);
    }
  }
  return {kraus, d_c, d_b * d_c, YSplit{d_b, d_c}};
}

KrausChannel unitary_passthrough(int d_b, const Matrix& u) {
  return attach_channel(maximally_mixed(d_b), unitary_channel(u));
}

double grid_eta1_qubit(const KrausChannel& n) {
  double best = 0.0;
  const int nt = 200, np = 400;
  for (int i = 0; i <= nt; ++i)
    for (int j = 0; j < np; ++j) {
      const double th = M_PI * i / nt, ph = 2 * M_PI * j / np;
      Matrix x = std::sin(th) * std::cos(ph) * pauli_x() + std::sin(th) * std::sin(ph) * pauli_y() + std::cos(th) * pauli_z();
      best = std::max(best, trace_norm_hermitian(mpdo::apply(n, x)) / 2.0);
    }
  return best;
}

} // namespace

TEST_CASE("spectral contraction ratio") {
  CHECK(std::abs(eta_spectral(depolarizing_y_channel(2, 2))) < 1e-10);
  Rng rng(3);
  CHECK(eta_spectral(unitary_passthrough(2, haar_unitary(2, rng))) == doctest::Approx(1.0).epsilon(1e-10));

  KrausChannel ep = example_ep(0.3);
  Matrix s = Matrix::Zero(16, 4);
  for (const auto& k : ep.kraus()) s += kron(k, k.conjugate());
  Eigen::SelfAdjointEigenSolver<Matrix> es(2.0 * s.adjoint() * s);
  CHECK(eta_spectral(ep) == doctest::Approx(es.eigenvalues()(2)).epsilon(1e-12));
  CHECK(eta_subleading(ep) == doctest::Approx(0.16).epsilon(1e-10));
  CHECK_THROWS_AS(eta_spectral(example_classical3()), std::invalid_argument);
}

TEST_CASE("2-norm cross-check") {
  CHECK(std::abs(eta_2norm_crosscheck(depolarizing_y_channel(2, 3))) < 1e-10);
  Rng rng(5);
  CHECK(eta_2norm_crosscheck(unitary_channel(haar_unitary(3, rng))) == doctest::Approx(1.0));
  for (double p : {0.1, 0.3, 0.45, 0.7})
    CHECK(std::abs(eta_spectral(example_ep(p)) - eta_2norm_crosscheck(example_ep(p))) <= 1e-7);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    KrausChannel n = random_bistochastic_y(2, 2 + static_cast<int>(seed % 2), 1 + static_cast<int>(seed % 3), seed);
    CHECK(std::abs(eta_spectral(n) - eta_2norm_crosscheck(n)) <= 1e-7);
  }
}

TEST_CASE("ratio below one exactly when the correctable algebra is trivial") {
  std::vector<KrausChannel> channels{example_ep(0.3), depolarizing_y_channel(2, 2),
                                     mixture(example_ep(0.2), 0.5, depolarizing_y_channel(2, 2))};
  for (std::uint64_t seed = 1; seed <= 8; ++seed) channels.push_back(random_bistochastic_y(2, 2, 1 + static_cast<int>(seed % 3), seed));
  Rng rng(8);
  channels.push_back(unitary_passthrough(2, haar_unitary(2, rng)));
  for (const auto& n : channels) {
    const bool contracting = eta_spectral(n) < 1.0 - 1e-7;
    CHECK(contracting == (correctable_algebra(n).dim() == 1));
  }
}

TEST_CASE("trace-norm contraction estimate") {
  CHECK(eta_trace_estimate(depolarizing_channel(3)) < 1e-9);
  Rng rng(7);
  CHECK(eta_trace_estimate(unitary_channel(haar_unitary(3, rng))) == doctest::Approx(1.0).epsilon(1e-9));

  KrausChannel ep = example_ep(0.3);
  const double grid = grid_eta1_qubit(ep);
  double lo = 1.0, hi = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double v = eta_trace_estimate(ep, 20, seed);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    CHECK(v <= 1.0 + 1e-9);
    CHECK(v >= grid - 1e-4);
  }
  CHECK(hi - lo <= 1e-4);

  KrausChannel haar = haar_y_channel(2, 2, 2, 31);
  CHECK(eta_trace_estimate(haar, 20, 1) >= grid_eta1_qubit(haar) - 1e-4);
}

TEST_CASE("partially invariant bound") {
  CHECK(eta_partially_invariant(depolarizing_channel(2)) < 1e-9);
  Rng rng(9);
  CHECK(eta_partially_invariant(unitary_channel(haar_unitary(2, rng))) == doctest::Approx(1.0));
  KrausChannel ep = example_ep(0.45);
  const double bound = eta_partially_invariant(ep);
  const double spectral = eta_spectral(ep);
  if (bound < 1.0 && spectral < 1.0) CHECK(bound >= spectral);
  CHECK(bound == doctest::Approx(std::min(1.0, 16.0 * 2 * eta_trace_estimate(ep))));
}

TEST_CASE("invariant pairs") {
  InvariantPair bi = invariant_pair(example_ep(0.3));
  CHECK(bi.factorizes);
  CHECK((bi.nu - maximally_mixed(2)).norm() < 1e-10);
  CHECK((bi.sigma - maximally_mixed(2)).norm() < 1e-10);

  Rng rng(11);
  Matrix sigma0 = random_density_hs(2, rng);
  InvariantPair attach = invariant_pair(attach_channel(sigma0, identity_channel(3)));
  CHECK(attach.degenerate);
  CHECK(attach.factorizes);
  CHECK(attach.residual <= 1e-10);
  CHECK((attach.sigma - sigma0).norm() < 1e-10);

  int none = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) none += invariant_pair(haar_y_channel(2, 2, 2, seed)).factorizes ? 0 : 1;
  CHECK(none >= 4);
}

TEST_CASE("forgetful weight") {
  CHECK(forgetful_weight(depolarizing_channel(3)) >= 1.0 - 1e-8);
  Rng rng(13);
  CHECK(forgetful_weight(unitary_channel(haar_unitary(3, rng))) <= 1e-10);
  CHECK(forgetful_weight(example_classical3()) <= 1e-9);

  // A mixture with an explicit forgetful part is certified at least at that weight.
  for (double w : {0.3, 0.6}) {
    KrausChannel n = mixture(depolarizing_y_channel(2, 2), w, example_ep(0.0));
    CHECK(forgetful_weight(n) >= w - 1e-6);
  }
  ForgetfulResult r = forgetful_decomposition(mixture(depolarizing_y_channel(2, 2), 0.6, example_ep(0.1)));
  CHECK(forgetful_weight_at(mixture(depolarizing_y_channel(2, 2), 0.6, example_ep(0.1)), r.sigma) ==
        doctest::Approx(r.weight).epsilon(1e-9));
}

TEST_CASE("a forgetful component contracts the CMI at every step") {
  const double w = 0.6;
  KrausChannel n = mixture(depolarizing_y_channel(2, 2), w, haar_y_channel(2, 2, 2, 17));
  const double cert = forgetful_weight(n);
  REQUIRE(cert >= 0.5);
  Rng rng(19);
  for (int t = 0; t < 20; ++t) {
    ChainState s = build_chain(n, 1, ChainInput::explicit_state(random_density_hs(4, rng), 2));
    ChainState next = embed_apply(n, s);
    const double before = cmi(s, standard_tripartition(s.shape));
    const double after = cmi(next, standard_tripartition(next.shape));
    if (before > 1e-10) CHECK(after <= (1.0 - cert) * 1.05 * before + 1e-12);
  }
}

TEST_CASE("trace-norm mutual information contracts") {
  KrausChannel n = haar_y_channel(2, 2, 2, 23);
  const double eta1 = eta_trace_estimate(n, 20, 1);
  const KrausChannel lifted = tensor_identity(2, n);
  Rng rng(29);
  SubsystemShape shape({2, 2}, {"B", "C"});
  for (int t = 0; t < 50; ++t) {
    Matrix rho = random_density_hs(4, rng);
    Matrix g = rho - kron(partial_trace(rho, shape, {"B"}), partial_trace(rho, shape, {"C"}));
    CHECK(trace_norm(mpdo::apply(lifted, g)) <= 4.0 * eta1 * 2 * trace_norm(g) + 1e-12);
  }
}

TEST_CASE("data-processing probes") {
  Rng rng(31);
  DpiProbeResult u = dpi_probe(unitary_channel(haar_unitary(2, rng)), 60, 2, 2, 1);
  CHECK(u.max_ratio == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(u.violations == 0);

  DpiProbeResult dep = dpi_probe(depolarizing_channel(2), 60, 2, 2, 2);
  CHECK(dep.max_ratio < 1e-8);

  DpiProbeResult c3 = dpi_probe(example_classical3(), 500, 2, 2, 3);
  CHECK(c3.max_ratio < 1.0);
  CHECK(c3.violations == 0);
  CHECK(c3.counted > 400);
  int total = 0;
  for (int h : c3.histogram) total += h;
  CHECK(total == c3.counted);
}

TEST_CASE("eta report") {
  EtaReport r = eta_report(depolarizing_y_channel(2, 2));
  REQUIRE(r.eta_spectral);
  CHECK(*r.eta_spectral < 1e-10);
  CHECK(r.correctable_trivial);
  CHECK(r.forgetful_weight >= 1.0 - 1e-8);
  EtaReport c = eta_report(example_classical3());
  CHECK_FALSE(c.eta_spectral);
  CHECK(c.eta_partially_invariant == doctest::Approx(std::min(1.0, 48.0 * c.eta_trace_estimate)));
}
