#include "doctest.h"

#include "mpdo/algebra.hpp"
#include "mpdo/contraction.hpp"
#include "mpdo/measured.hpp"

#include <Eigen/QR>

using namespace mpdo;

namespace {

int rank_of(const std::vector<Matrix>& mats) {
  Matrix cols(mats.front().size(), static_cast<Eigen::Index>(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k) cols.col(static_cast<Eigen::Index>(k)) = vec(mats[k]);
  Eigen::ColPivHouseholderQR<Matrix> qr(cols);
  qr.setThreshold(1e-10);
  return static_cast<int>(qr.rank());
}

OperatorSpan diagonal_algebra(int d) {
  std::vector<Matrix> gens;
  for (int k = 0; k < d; ++k) gens.push_back(basis_projector(d, k));
  return orthonormal_basis(gens);
}

Instrument upper_triangular_instrument(int d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<KrausChannel> maps;
  for (int s = 0; s < 2; ++s) {
    std::vector<Matrix> kraus;
    for (int k = 0; k < 3; ++k) {
      Matrix m = ginibre(d, d, rng);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < r; ++c) m(r, c) = 0.0;
      kraus.push_back(m);
    }
    maps.emplace_back(kraus, d, d);
  }
  return make_instrument(maps);
}

} // namespace

TEST_CASE("orthonormal_basis") {
  CHECK(orthonormal_basis({Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)}).dim() == 1);
  CHECK(orthonormal_basis({Matrix::Identity(2, 2), pauli_x(), pauli_y(), pauli_z()}).dim() == 4);
  Rng rng(5);
  std::vector<Matrix> mats;
  for (int k = 0; k < 20; ++k) mats.push_back(ginibre(3, 3, rng));
  OperatorSpan s = orthonormal_basis(mats);
  CHECK(s.dim() == rank_of(mats));
  CHECK(s.dim() == 9);
  for (int i = 0; i < s.dim(); ++i)
    for (int j = 0; j < s.dim(); ++j)
      CHECK(std::abs((s.basis[i].adjoint() * s.basis[j]).trace() - (i == j ? 1.0 : 0.0)) < 1e-8);
  CHECK_THROWS_AS(orthonormal_basis({}), std::invalid_argument);
}

TEST_CASE("generate_algebra") {
  OperatorSpan x = generate_algebra({pauli_x()});
  CHECK(x.dim() == 2);
  CHECK(x.contains_identity);
  CHECK(generate_algebra({pauli_x(), pauli_z()}).dim() == 4);
  CHECK(generate_algebra({Matrix::Identity(2, 2)}).dim() == 1);
  OperatorSpan a = generate_algebra({basis_projector(3, 0), basis_projector(3, 1)});
  CHECK(product_closure_error(a) < 1e-8);
  for (const auto& b : x.basis) CHECK(hermiticity_error(b) < 1e-10);
}

TEST_CASE("commutant") {
  std::vector<Matrix> units;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Matrix e = Matrix::Zero(3, 3);
      e(i, j) = 1.0;
      units.push_back(e);
    }
  CHECK(commutant(orthonormal_basis(units)).dim() == 1);
  CHECK(commutant(orthonormal_basis({Matrix::Identity(3, 3)})).dim() == 9);
  OperatorSpan diag = diagonal_algebra(3);
  OperatorSpan c = commutant(diag);
  CHECK(c.dim() == 3);
  for (const auto& b : c.basis) CHECK((b - Matrix(b.diagonal().asDiagonal())).norm() < 1e-8);
}

TEST_CASE("double commutant of generated algebras") {
  Rng rng(41);
  std::vector<std::vector<Matrix>> generator_sets{
      {pauli_x()},
      {basis_projector(3, 0)},
      {kron(pauli_z(), Matrix::Identity(2, 2))},
      {kron(pauli_x(), Matrix::Identity(2, 2)), kron(pauli_z(), Matrix::Identity(2, 2))},
  };
  for (const auto& gens : generator_sets) {
    OperatorSpan a = generate_algebra(gens);
    // The bicommutant of a non-unital algebra is its unitisation.
    OperatorSpan unital = generate_algebra([&] {
      auto g = gens;
      g.push_back(Matrix::Identity(gens.front().rows(), gens.front().cols()));
      return g;
    }());
    CHECK(commutant(commutant(a)).dim() == unital.dim());
  }
}

TEST_CASE("correctable algebra") {
  CHECK(correctable_algebra(identity_channel(3)).dim() == 9);
  CHECK(correctable_algebra(depolarizing_channel(3)).dim() == 1);
  CHECK(correctable_algebra(example_classical3()).dim() == 1);
  OperatorSpan ep = correctable_algebra(example_ep(0.3));
  CHECK(ep.dim() == 2);
  CHECK(ep.contains_identity);
  CHECK(distance_to_span(ep, pauli_x()) < 1e-8);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    OperatorSpan c = correctable_algebra(haar_y_channel(2, 2, 2, seed));
    CHECK(c.contains_identity);
    CHECK(c.dim() >= 1);
  }
}

TEST_CASE("fixed point spaces") {
  CHECK(fixed_point_space(superoperator_matrix(identity_channel(3))).dim() == 9);
  Rng rng(9);
  Matrix sigma = random_density_hs(3, rng);
  CHECK(fixed_point_space(superoperator_matrix(forgetful_channel(sigma, 3))).dim() == 1);
  CHECK(fixed_point_space(petz_composition(depolarizing_channel(2), maximally_mixed(2))).dim() == 1);

  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const int dc = seed % 2 ? 2 : 3;
    KrausChannel n = haar_y_channel(dc, 2, 1 + static_cast<int>(seed % 3), seed);
    CHECK(fixed_point_space(petz_composition(n, maximally_mixed(dc))).dim() == correctable_algebra(n).dim());
  }
  CHECK(fixed_point_space(petz_composition(example_ep(0.3), maximally_mixed(2))).dim() ==
        correctable_algebra(example_ep(0.3)).dim());
}

TEST_CASE("condition1_check") {
  for (int d = 2; d <= 4; ++d) {
    Instrument instr = instrument_from_channel(haar_y_channel(d, 2, std::max(3, d), 100 + d));
    Condition1Report r = condition1_check(instr);
    CHECK(r.overall == Verdict::pass);
  }
  Condition1Report up = condition1_check(upper_triangular_instrument(3, 4));
  CHECK(up.overall == Verdict::fail);

  Rng rng(12);
  std::vector<Matrix> kraus;
  Matrix u = haar_unitary(4, rng);
  kraus.push_back(u.block(0, 0, 2, 2));
  kraus.push_back(u.block(2, 0, 2, 2));
  Instrument two = make_instrument({KrausChannel(kraus, 2, 2)});
  CHECK(condition1_check(two).wielandt_xi == 3);

  Instrument singular = make_instrument({KrausChannel({basis_projector(2, 0), Matrix(basis_projector(2, 1) * pauli_x())}, 2, 2)});
  CHECK(condition1_check(singular).overall == Verdict::inconclusive);
}

TEST_CASE("span growth") {
  Instrument id = make_instrument({identity_channel(2)});
  CHECK(span_growth_trace(id, {0, 0, 0}) == std::vector<int>{1, 1, 1});

  Instrument instr = instrument_from_channel(haar_y_channel(3, 2, 3, 77));
  std::vector<int> word{0, 1, 1, 0, 1, 0};
  std::vector<int> trace = span_growth_trace(instr, word);
  for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] >= trace[k - 1]);

  // Direct oracle: span of all Kraus products along the word.
  std::vector<Matrix> products{Matrix::Identity(3, 3)};
  for (std::size_t k = 0; k < word.size(); ++k) {
    std::vector<Matrix> next;
    for (const auto& e : instr.maps[static_cast<std::size_t>(word[k])].kraus())
      for (const auto& p : products) next.push_back(e * p);
    products = next;
    if (products.size() > 400) break;
    CHECK(trace[k] == rank_of(products));
  }

  Instrument q = instrument_from_channel(haar_y_channel(2, 2, 3, 3));
  Condition1Report r = condition1_check(q);
  REQUIRE(r.overall == Verdict::pass);
  std::vector<int> t = span_growth_trace(q, std::vector<int>(static_cast<std::size_t>(r.wielandt_xi), 0));
  CHECK(t.back() == 4);
}
