#include "doctest.h"

#include "mpdo/algebra.hpp"
#include "mpdo/fit.hpp"
#include "mpdo/measured.hpp"

#include <cmath>
#include <map>

using namespace mpdo;

namespace {

Instrument haar_instrument(int d, std::uint64_t seed) {
  return instrument_from_channel(haar_y_channel(d, 2, std::max(3, d), seed));
}

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Matrix random_psd(int d, Rng& rng) { return random_density_hs(d, rng) * (0.5 + rng.uniform()); }

KrausChannel all_matrix_units(int d) {
  std::vector<Matrix> kraus;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Matrix e = Matrix::Zero(d, d);
      e(i, j) = 1.0 / std::sqrt(static_cast<double>(d));
      kraus.push_back(e);
    }
  return {kraus, d, d};
}

} // namespace

TEST_CASE("instrument from a channel") {
  Instrument instr = haar_instrument(2, 5);
  CHECK(instr.size() == 2);
  CHECK(instr.dim() == 2);
  CHECK(instr.outcomes == std::vector<int>{1, 2});
  CHECK(instr.tp_sum);

  // Outcome maps agree with measuring B on the channel output.
  KrausChannel n = haar_y_channel(2, 2, 3, 5);
  Rng rng(1);
  Matrix rho = random_density_hs(2, rng);
  Matrix out = mpdo::apply(n, rho);
  for (int b = 0; b < 2; ++b) {
    Matrix block = out.block(2 * b, 2 * b, 2, 2);
    CHECK((mpdo::apply(instr.maps[static_cast<std::size_t>(b)], rho) - block).norm() < 1e-12);
  }

  Rng r2(2);
  Matrix u = haar_unitary(2, r2);
  Instrument rotated = instrument_from_channel(n, u);
  Matrix sum = Matrix::Zero(2, 2);
  for (const auto& m : rotated.maps) sum += mpdo::apply(m, rho);
  CHECK((sum - partial_trace(out, SubsystemShape({2, 2}, {"B", "C"}), {"C"})).norm() < 1e-12);
  CHECK_THROWS(instrument_from_channel(depolarizing_channel(2)));
  CHECK_THROWS(make_instrument({identity_channel(2), identity_channel(3)}));
}

TEST_CASE("Hilbert sup") {
  CHECK(hilbert_sup(diag2(2, 1), Matrix::Identity(2, 2)) == doctest::Approx(2.0));
  Rng rng(3);
  Matrix a = random_psd(3, rng);
  CHECK(hilbert_sup(a, a) == doctest::Approx(1.0).epsilon(1e-9));
  Matrix psi = random_pure_state(3, rng);
  Matrix full = random_density_hs(3, rng);
  CHECK(std::isfinite(hilbert_sup(psi, full)));
  CHECK(hilbert_sup(full, psi) == infinite_distance);
  CHECK_THROWS(hilbert_sup(Matrix::Zero(2, 2), Matrix::Identity(2, 2)));
}

TEST_CASE("Hilbert metric") {
  Rng rng(4);
  Matrix rho = random_density_hs(3, rng);
  CHECK(hilbert_metric(rho, rho) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(hilbert_metric(diag2(2, 1), Matrix::Identity(2, 2)) == doctest::Approx(std::log(2.0)));
  CHECK(hilbert_metric(random_pure_state(2, rng), Matrix::Identity(2, 2)) == infinite_distance);

  for (int t = 0; t < 200; ++t) {
    Matrix a = random_psd(3, rng), b = random_psd(3, rng), c = random_psd(3, rng);
    const double ab = hilbert_metric(a, b);
    CHECK(std::abs(hilbert_metric(a, 3.7 * a)) < 1e-9);
    CHECK(hilbert_metric(2.5 * a, 0.3 * b) == doctest::Approx(ab).epsilon(1e-9));
    CHECK(hilbert_metric(b, a) == doctest::Approx(ab).epsilon(1e-9));
    CHECK(ab <= hilbert_metric(a, c) + hilbert_metric(c, b) + 1e-9);
  }
}

TEST_CASE("trace distance is bounded by the Hilbert metric") {
  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    const int d = 2 + t % 3;
    Matrix r1 = random_density_hs(d, rng), r2 = random_density_hs(d, rng);
    CHECK(trace_norm_hermitian(r1 - r2) / 2.0 <= std::tanh(hilbert_metric(r1, r2) / 4.0) + 1e-10);
  }
}

TEST_CASE("positive maps contract the Hilbert metric") {
  Rng rng(6);
  KrausChannel m = haar_instrument(3, 7).maps[0];
  for (int t = 0; t < 200; ++t) {
    Matrix a = random_psd(3, rng), b = random_psd(3, rng);
    CHECK(hilbert_metric(mpdo::apply(m, a), mpdo::apply(m, b)) <= hilbert_metric(a, b) + 1e-9);
  }
}

TEST_CASE("projective diameter and Birkhoff ratio") {
  KrausChannel forget = depolarizing_channel(2);
  CHECK(projective_diameter_estimate(forget, 50, 1) < 1e-9);
  CHECK(birkhoff_ratio(forget, 50, 1) < 1e-9);

  Rng rng(8);
  KrausChannel u = unitary_channel(haar_unitary(2, rng));
  CHECK(projective_diameter_estimate(u, 20, 1) == infinite_distance);
  CHECK(birkhoff_ratio(u, 20, 1) == 1.0);

  Instrument c = coarse_grain(haar_instrument(2, 9), condition1_check(haar_instrument(2, 9)).wielandt_xi);
  KrausChannel m = c.maps[0];
  const double small = projective_diameter_estimate(m, 100, 2);
  const double large = projective_diameter_estimate(m, 1000, 3);
  REQUIRE(std::isfinite(large));
  CHECK(std::abs(large - small) <= 0.05 * large);

  const double ratio = birkhoff_ratio(m, 1000, 3);
  CHECK(ratio < 1.0);
  for (int t = 0; t < 200; ++t) {
    Matrix a = random_psd(2, rng), b = random_psd(2, rng);
    CHECK(hilbert_metric(mpdo::apply(m, a), mpdo::apply(m, b)) <= ratio * hilbert_metric(a, b) * 1.05 + 1e-9);
  }
}

TEST_CASE("strict positivity") {
  StrictPositivity full = strict_positivity_check(all_matrix_units(3));
  CHECK(full.verdict == Verdict::pass);
  CHECK(full.via == StrictPositivityVia::kraus_span);

  Rng rng(10);
  StrictPositivity u = strict_positivity_check(unitary_channel(haar_unitary(3, rng)));
  CHECK(u.verdict == Verdict::inconclusive);
  CHECK(u.via == StrictPositivityVia::sampling);
  CHECK(u.min_sampled_eigenvalue < 1e-10);

  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Instrument instr = haar_instrument(2, seed);
    Condition1Report r = condition1_check(instr);
    REQUIRE(r.overall == Verdict::pass);
    Instrument c = coarse_grain(instr, r.wielandt_xi);
    for (const auto& m : c.maps) {
      StrictPositivity s = strict_positivity_check(m);
      CHECK(s.verdict == Verdict::pass);
      CHECK(s.via == StrictPositivityVia::kraus_span);
    }
  }
}

TEST_CASE("coarse graining") {
  Instrument instr = haar_instrument(2, 11);
  Instrument one = coarse_grain(instr, 1);
  REQUIRE(one.size() == instr.size());
  Rng rng(12);
  Matrix rho = random_density_hs(2, rng);
  for (std::size_t k = 0; k < one.size(); ++k)
    CHECK((mpdo::apply(one.maps[k], rho) - mpdo::apply(instr.maps[k], rho)).norm() < 1e-12);

  Instrument two = coarse_grain(instr, 2);
  CHECK(two.size() == 4);
  CHECK(two.tp_sum);
  // Outcome (s1, s2) = (1, 2) sits at lexicographic index 1 and applies M_1 first.
  Matrix expected = mpdo::apply(instr.maps[1], mpdo::apply(instr.maps[0], rho));
  CHECK((mpdo::apply(two.maps[1], rho) - expected).norm() < 1e-12);

  CHECK_THROWS(coarse_grain(instr, 0));
  CHECK_THROWS(coarse_grain(instr, 20, 1000));
}

TEST_CASE("trajectory ensembles") {
  Instrument instr = haar_instrument(2, 13);
  std::vector<Trajectory> all = trajectory_ensemble(instr, 6, EnsembleMode::enumeration());
  double total = 0.0;
  for (const auto& t : all) {
    total += t.weight;
    CHECK(t.word.size() == 6);
    CHECK(std::abs(t.state.trace().real() - 1.0) < 1e-10);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(all.size() == 64);
  CHECK(word_to_string(all[1].word) == "111112");

  Instrument single = make_instrument({depolarizing_channel(2)});
  std::vector<Trajectory> s = trajectory_ensemble(single, 3, EnsembleMode::enumeration());
  REQUIRE(s.size() == 1);
  CHECK(s[0].weight == doctest::Approx(1.0));

  CHECK_THROWS(trajectory_ensemble(instr, 10, EnsembleMode::enumeration(), std::nullopt, 100));
}

TEST_CASE("sampled trajectories follow the Born rule") {
  Instrument instr = haar_instrument(2, 14);
  std::map<std::string, double> exact;
  for (const auto& t : trajectory_ensemble(instr, 4, EnsembleMode::enumeration())) exact[word_to_string(t.word)] = t.weight;

  const int n = 20000;
  std::map<std::string, double> freq;
  for (const auto& t : trajectory_ensemble(instr, 4, EnsembleMode::sampled(n, 99))) freq[word_to_string(t.word)] += 1.0 / n;
  double tv = 0.0, sigma2 = 0.0;
  for (const auto& [w, p] : exact) {
    tv += std::abs(freq[w] - p) / 2.0;
    sigma2 += std::sqrt(p * (1 - p) / n) / 2.0;
  }
  CHECK(tv <= 3.0 * sigma2);
}

TEST_CASE("measured CMI") {
  // B carries a fixed state and C evolves unitarily, so A and C stay maximally correlated.
  Rng rng(15);
  KrausChannel product = attach_channel(random_density_hs(2, rng), unitary_channel(haar_unitary(2, rng)));
  MeasuredCmi zero = measured_cmi(instrument_from_channel(product), 3, EnsembleMode::enumeration());
  CHECK(std::abs(zero.cmi - 2.0) < 1e-9);

  KrausChannel forget = depolarizing_y_channel(2, 2);
  CHECK(std::abs(measured_cmi(instrument_from_channel(forget), 3, EnsembleMode::enumeration()).cmi) < 1e-9);

  Instrument instr = haar_instrument(2, 16);
  MeasuredCmi m = measured_cmi(instr, 4, EnsembleMode::enumeration());
  double weighted = 0.0;
  for (std::size_t k = 0; k < m.weights.size(); ++k) weighted += m.weights[k] * m.per_outcome_mi[k];
  CHECK(m.cmi == doctest::Approx(weighted).epsilon(1e-12));
  CHECK(m.max_mi >= m.cmi - 1e-12);

  MeasuredCmi sampled = measured_cmi(instr, 4, EnsembleMode::sampled(4000, 5));
  double var = 0.0;
  for (double x : sampled.per_outcome_mi) var += (x - sampled.cmi) * (x - sampled.cmi);
  const double se = std::sqrt(var / (sampled.per_outcome_mi.size() - 1) / sampled.per_outcome_mi.size());
  CHECK(std::abs(sampled.cmi - m.cmi) <= 4.0 * se + 1e-12);
}

TEST_CASE("measured CMI decays for Haar instruments") {
  Instrument instr = haar_instrument(2, 17);
  std::vector<double> ell, cmi, mx;
  for (int l = 2; l <= 8; ++l) {
    MeasuredCmi m = measured_cmi(instr, l, EnsembleMode::enumeration());
    ell.push_back(l);
    cmi.push_back(m.cmi);
    mx.push_back(m.max_mi);
  }
  LinearFit f = log2_fit(ell, cmi);
  CHECK(f.slope < 0.0);
  CHECK(f.r2 >= 0.9);
  CHECK(log2_fit(ell, mx).slope < 0.0);
}

TEST_CASE("a long outcome word forgets its input") {
  Instrument instr = haar_instrument(2, 18);
  Rng rng(19);
  std::vector<double> spread;
  for (int l : {2, 4, 6, 8, 10}) {
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      Matrix a = random_density_hs(2, rng), b = random_density_hs(2, rng);
      for (int k = 0; k < l; ++k) {
        const KrausChannel& m = instr.maps[static_cast<std::size_t>(rng.uniform() < 0.5 ? 0 : 1)];
        a = mpdo::apply(m, a);
        b = mpdo::apply(m, b);
        a /= a.trace().real();
        b /= b.trace().real();
      }
      worst = std::max(worst, trace_norm_hermitian(a - b));
    }
    spread.push_back(worst);
  }
  for (std::size_t k = 1; k < spread.size(); ++k) CHECK(spread[k] <= spread[0]);
  CHECK(spread.back() < 0.1 * spread.front());
}

TEST_CASE("linear fits") {
  LinearFit f = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.points == 4);

  LinearFit g = log2_fit({1, 2, 3, 4}, {0.5, 0.25, 0.125, 1e-20});
  CHECK(g.points == 3);
  CHECK(g.slope == doctest::Approx(-1.0));
  CHECK(linear_fit({1}, {2}).points == 1);
  CHECK_THROWS(linear_fit({1, 2}, {2}));
}
