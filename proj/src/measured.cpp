#include "mpdo/measured.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace mpdo {

Instrument make_instrument(std::vector<KrausChannel> maps) {
  if (maps.empty()) throw std::invalid_argument("make_instrument: no outcome maps");
  const int d = maps.front().d_in();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& m : maps) {
    if (m.d_in() != d || m.d_out() != d) throw std::invalid_argument("make_instrument: every map must be a self-map on the same dimension");
    for (const auto& k : m.kraus()) sum += k.adjoint() * k;
  }
  Instrument instr;
  for (std::size_t s = 0; s < maps.size(); ++s) instr.outcomes.push_back(static_cast<int>(s) + 1);
  instr.tp_sum = (sum - Matrix::Identity(d, d)).norm() <= 1e-10;
  instr.maps = std::move(maps);
  return instr;
}

Instrument instrument_from_channel(const KrausChannel& n, const std::optional<Matrix>& basis) {
  if (!n.y_split()) throw std::invalid_argument("instrument_from_channel: channel has no y_split");
  const int db = n.y_split()->d_b;
  const int dc = n.y_split()->d_c;
  if (basis && (basis->rows() != db || basis->cols() != db))
    throw std::invalid_argument("instrument_from_channel: basis must be d_B × d_B");
  std::vector<KrausChannel> maps;
  for (int s = 0; s < db; ++s) {
    std::vector<Matrix> kraus;
    for (const auto& k : n.kraus()) {
      Matrix e = Matrix::Zero(dc, n.d_in());
      for (int b = 0; b < db; ++b) {
        const cplx coeff = basis ? std::conj((*basis)(b, s)) : cplx(b == s ? 1.0 : 0.0);
        if (coeff != 0.0) e += coeff * k.block(b * dc, 0, dc, n.d_in());
      }
      kraus.push_back(std::move(e));
    }
    maps.emplace_back(std::move(kraus), n.d_in(), dc);
  }
  return make_instrument(std::move(maps));
}

double hilbert_sup(const Matrix& a, const Matrix& b) {
  if (a.norm() == 0.0 || b.norm() == 0.0) throw std::invalid_argument("hilbert_sup: zero operand");
  EigenSystem eb = hermitian_eig(b);
  const double cut = 1e-12 * std::max(eb.values(0), 1e-300);
  Matrix inv_sqrt = Matrix::Zero(b.rows(), b.cols());
  Matrix outside = Matrix::Zero(b.rows(), b.cols());
  for (Eigen::Index k = 0; k < eb.values.size(); ++k) {
    const Matrix p = eb.vectors.col(k) * eb.vectors.col(k).adjoint();
    if (eb.values(k) > cut)
      inv_sqrt += p / std::sqrt(eb.values(k));
    else
      outside += p;
  }
  if ((outside * a * outside).norm() > 1e-10 * a.norm()) return infinite_distance;
  return hermitian_eigenvalues(inv_sqrt * a * inv_sqrt)(0);
}

double hilbert_metric(const Matrix& a, const Matrix& b) {
  const double ab = hilbert_sup(a, b);
  const double ba = hilbert_sup(b, a);
  if (!std::isfinite(ab) || !std::isfinite(ba)) return infinite_distance;
  return std::max(0.0, std::log(ab * ba));
}

double projective_diameter_estimate(const KrausChannel& m, int samples, std::uint64_t seed) {
  Rng rng(seed);
  const int d = m.d_in();
  auto value = [&](const Vector& u, const Vector& v) {
    const Matrix a = mpdo::apply(m, Matrix(u * u.adjoint()));
    const Matrix b = mpdo::apply(m, Matrix(v * v.adjoint()));
    if (a.norm() == 0.0 || b.norm() == 0.0) return infinite_distance;
    return hilbert_metric(a, b);
  };
  struct Pair {
    double h;
    Vector u, v;
  };
  std::vector<Pair> top;
  const std::size_t keep = 4;
  for (int s = 0; s < samples; ++s) {
    Vector u = haar_vector(d, rng), v = haar_vector(d, rng);
    const double h = value(u, v);
    if (!std::isfinite(h)) return infinite_distance;
    top.push_back({h, std::move(u), std::move(v)});
    std::sort(top.begin(), top.end(), [](const Pair& x, const Pair& y) { return x.h > y.h; });
    if (top.size() > keep) top.pop_back();
  }
  double best = 0.0;
  const int steps = 300;
  for (Pair& p : top) {
    for (int k = 0; k < steps; ++k) {
      const double step = 0.3 * std::pow(1e-3 / 0.3, static_cast<double>(k) / (steps - 1));
      Vector u = p.u, v = p.v;
      Vector& target = k % 2 == 0 ? u : v;
      for (int i = 0; i < d; ++i) target(i) += step * cplx(rng.normal(), rng.normal());
      target.normalize();
      const double h = value(u, v);
      if (!std::isfinite(h)) return infinite_distance;
      if (h > p.h) p = {h, std::move(u), std::move(v)};
    }
    best = std::max(best, p.h);
  }
  return best;
}

double birkhoff_ratio(const KrausChannel& m, int samples, std::uint64_t seed) {
  const double delta = projective_diameter_estimate(m, samples, seed);
  return std::isfinite(delta) ? std::tanh(delta / 4.0) : 1.0;
}

StrictPositivity strict_positivity_check(const KrausChannel& m, int samples, std::uint64_t seed) {
  StrictPositivity r;
  const int d = m.d_in();
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    RealVector ev = hermitian_eigenvalues(mpdo::apply(m, random_pure_state(d, rng)));
    worst = std::min(worst, ev(ev.size() - 1));
  }
  r.min_sampled_eigenvalue = samples > 0 ? worst : 0.0;
  if (kraus_span_dimension(m) == d * m.d_out()) {
    r.verdict = Verdict::pass;
    r.via = StrictPositivityVia::kraus_span;
  }
  return r;
}

Instrument coarse_grain(const Instrument& instr, int xi, long long cap) {
  if (xi < 1) throw std::invalid_argument("coarse_grain: xi must be at least 1");
  const long long n = static_cast<long long>(instr.size());
  long long count = 1;
  for (int k = 0; k < xi; ++k) {
    count *= n;
    if (count > cap) throw std::invalid_argument("coarse_grain: " + std::to_string(n) + "^" + std::to_string(xi) + " outcomes exceed the cap");
  }
  if (xi == 1) return instr;
  std::vector<KrausChannel> minimal;
  for (const auto& m : instr.maps) minimal.push_back(canonical_kraus(m));
  std::vector<KrausChannel> current = minimal;
  for (int k = 1; k < xi; ++k) {
    std::vector<KrausChannel> next;
    next.reserve(current.size() * minimal.size());
    for (const auto& prefix : current)
      for (const auto& m : minimal) next.push_back(canonical_kraus(compose(m, prefix)));
    current = std::move(next);
  }
  Instrument out = make_instrument(std::move(current));
  out.tp_sum = instr.tp_sum;
  return out;
}

std::string word_to_string(const std::vector<int>& word) {
  bool short_labels = std::all_of(word.begin(), word.end(), [](int s) { return s >= 0 && s <= 9; });
  std::string out;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (!short_labels && k > 0) out += '.';
    out += std::to_string(word[k]);
  }
  return out;
}

std::vector<Trajectory> trajectory_ensemble(const Instrument& instr, int ell, const EnsembleMode& mode,
                                            const std::optional<Matrix>& sigma, long long cap) {
  if (instr.maps.empty()) throw std::invalid_argument("trajectory_ensemble: empty instrument");
  if (ell < 1) throw std::invalid_argument("trajectory_ensemble: ell must be at least 1");
  const int d = instr.dim();
  const Matrix input = sigma ? *sigma : maximally_entangled(d);
  if (input.rows() % d != 0 || input.rows() != input.cols())
    throw std::invalid_argument("trajectory_ensemble: input must act on A ⊗ C");
  const int d_a = static_cast<int>(input.rows()) / d;
  const double norm0 = input.trace().real();
  std::vector<KrausChannel> lifted;
  for (const auto& m : instr.maps) lifted.push_back(tensor_identity(d_a, m));

  std::vector<Trajectory> out;
  if (mode.enumerate) {
    long long count = 1;
    for (int k = 0; k < ell; ++k) {
      count *= static_cast<long long>(instr.size());
      if (count > cap) throw std::invalid_argument("trajectory_ensemble: enumeration exceeds the cap; use sampling");
    }
    std::vector<int> word;
    std::function<void(const Matrix&)> descend = [&](const Matrix& rho) {
      if (static_cast<int>(word.size()) == ell) {
        const double tr = rho.trace().real();
        if (tr / norm0 <= 1e-15) return;
        out.push_back({word, tr / norm0, rho / tr});
        return;
      }
      for (std::size_t s = 0; s < lifted.size(); ++s) {
        Matrix next = mpdo::apply(lifted[s], rho);
        if (next.trace().real() / norm0 <= 1e-15) continue;
        word.push_back(instr.outcomes[s]);
        descend(next);
        word.pop_back();
      }
    };
    descend(input);
    return out;
  }

  Rng rng(mode.seed);
  for (int sample = 0; sample < mode.samples; ++sample) {
    Matrix rho = input / norm0;
    Trajectory t;
    t.weight = 1.0;
    for (int step = 0; step < ell; ++step) {
      std::vector<Matrix> images;
      std::vector<double> probs;
      double total = 0.0;
      for (const auto& m : lifted) {
        images.push_back(mpdo::apply(m, rho));
        probs.push_back(std::max(images.back().trace().real(), 0.0));
        total += probs.back();
      }
      if (total <= 0.0) throw std::runtime_error("trajectory_ensemble: all outcomes have zero probability");
      double u = rng.uniform() * total;
      std::size_t pick = 0;
      while (pick + 1 < probs.size() && (u >= probs[pick] || probs[pick] == 0.0)) {
        u -= probs[pick];
        ++pick;
      }
      t.word.push_back(instr.outcomes[pick]);
      t.weight *= probs[pick];
      rho = images[pick] / probs[pick];
    }
    t.state = std::move(rho);
    out.push_back(std::move(t));
  }
  return out;
}

double mutual_information(const Matrix& rho_ac, int d_a, int d_c) {
  const SubsystemShape shape({d_a, d_c}, {"A", "C"});
  return entropy_bits(partial_trace(rho_ac, shape, {"A"})) + entropy_bits(partial_trace(rho_ac, shape, {"C"})) -
         entropy_bits(rho_ac);
}

MeasuredCmi measured_cmi(const Instrument& instr, int ell, const EnsembleMode& mode, const std::optional<Matrix>& sigma,
                         long long cap) {
  const auto trajectories = trajectory_ensemble(instr, ell, mode, sigma, cap);
  const int d = instr.dim();
  MeasuredCmi r;
  for (const auto& t : trajectories) {
    const int d_a = static_cast<int>(t.state.rows()) / d;
    const double mi = std::max(0.0, mutual_information(t.state, d_a, d));
    r.words.push_back(word_to_string(t.word));
    r.weights.push_back(t.weight);
    r.per_outcome_mi.push_back(mi);
    r.max_mi = std::max(r.max_mi, mi);
    r.cmi += mode.enumerate ? t.weight * mi : mi;
  }
  if (!mode.enumerate && !trajectories.empty()) r.cmi /= static_cast<double>(trajectories.size());
  return r;
}

} // namespace mpdo
