#include "mpdo/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mpdo {

namespace {

std::vector<std::string> concat(std::vector<std::string> x, const std::vector<std::string>& y) {
  x.insert(x.end(), y.begin(), y.end());
  return x;
}

std::vector<std::string> in_shape_order(const SubsystemShape& shape, const std::vector<std::string>& labels) {
  std::vector<std::string> out;
  for (const auto& l : shape.labels())
    if (std::find(labels.begin(), labels.end(), l) != labels.end()) out.push_back(l);
  return out;
}

void check_contiguous(const std::vector<std::string>& part, const SubsystemShape& shape, const char* name) {
  if (part.empty()) return;
  std::vector<std::size_t> pos;
  for (const auto& l : part) pos.push_back(shape.index_of(l));
  std::sort(pos.begin(), pos.end());
  if (pos.back() - pos.front() + 1 != pos.size())
    throw std::invalid_argument(std::string("tripartition: part ") + name + " is not contiguous");
}

void check_cap(long long dim, int cap) {
  if (dim > cap)
    throw std::invalid_argument("chain dimension " + std::to_string(dim) + " exceeds the cap " + std::to_string(cap));
}

ChainState run_chain(const KrausChannel& n, int ell, ChainState state) {
  for (int k = 0; k < ell; ++k) state = embed_apply(n, state);
  return state;
}

void require_y(const KrausChannel& n, int ell) {
  if (!n.y_split()) throw std::invalid_argument("chain: channel has no y_split");
  if (n.y_split()->d_c != n.d_in()) throw std::invalid_argument("chain: y_split d_C must equal d_in");
  if (ell < 1) throw std::invalid_argument("chain: ell must be at least 1");
}

double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

} // namespace

void validate_tripartition(const Tripartition& t, const SubsystemShape& shape, bool require_cover) {
  std::set<std::string> seen;
  for (const auto* part : {&t.a, &t.b, &t.c})
    for (const auto& l : *part) {
      if (!shape.contains(l)) throw std::invalid_argument("tripartition: unknown label '" + l + "'");
      if (!seen.insert(l).second) throw std::invalid_argument("tripartition: label '" + l + "' used twice");
    }
  if (require_cover && seen.size() != shape.size()) throw std::invalid_argument("tripartition: labels do not cover the shape");
  check_contiguous(t.a, shape, "A");
  check_contiguous(t.b, shape, "B");
  check_contiguous(t.c, shape, "C");
}

Tripartition standard_tripartition(const SubsystemShape& shape) {
  if (shape.size() < 3) throw std::invalid_argument("standard_tripartition: need at least three subsystems");
  const auto& l = shape.labels();
  return {{l.front()}, std::vector<std::string>(l.begin() + 1, l.end() - 1), {l.back()}};
}

Tripartition tripartition_from_sizes(const SubsystemShape& shape, int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0 || static_cast<std::size_t>(a + b + c) != shape.size())
    throw std::invalid_argument("tripartition sizes " + std::to_string(a) + ":" + std::to_string(b) + ":" +
                                std::to_string(c) + " do not match " + std::to_string(shape.size()) + " subsystems");
  const auto& l = shape.labels();
  Tripartition t;
  t.a.assign(l.begin(), l.begin() + a);
  t.b.assign(l.begin() + a, l.begin() + a + b);
  t.c.assign(l.begin() + a + b, l.end());
  return t;
}

ChainState build_chain(const KrausChannel& n, int ell, const ChainInput& input, int dim_cap) {
  require_y(n, ell);
  const int dc = n.d_in();
  const int db = n.y_split()->d_b;
  Matrix sigma;
  int da = 0;
  if (input.sigma) {
    da = input.d_a;
    if (da < 1 || input.sigma->rows() != da * dc || input.sigma->cols() != da * dc)
      throw std::invalid_argument("build_chain: explicit input must be (d_a·d_C) square");
    sigma = *input.sigma;
  } else {
    da = dc;
    sigma = maximally_entangled(dc);
  }
  long long total = static_cast<long long>(da) * dc;
  for (int k = 0; k < ell; ++k) total *= db;
  check_cap(total, dim_cap);
  return run_chain(n, ell, {sigma, SubsystemShape({da, dc}, {"A", "C"})});
}

ChainState build_periodic(const KrausChannel& n, int ell, int dim_cap) {
  require_y(n, ell);
  const int dc = n.d_in();
  const int db = n.y_split()->d_b;
  long long total = dc;
  for (int k = 0; k < ell; ++k) total *= db;
  check_cap(total, dim_cap);

  Eigen::Index dim_b = 1;
  for (int k = 0; k < ell; ++k) dim_b *= db;
  Matrix rho = Matrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dc; ++i)
    for (int j = 0; j < dc; ++j) {
      Matrix eij = Matrix::Zero(dc, dc);
      eij(i, j) = 1.0;
      ChainState out = run_chain(n, ell, {eij, SubsystemShape({1, dc}, {"A", "C"})});
      // Rows are (B..., C) with C fastest; keep the <i| ... |j> block of C.
      for (Eigen::Index r = 0; r < dim_b; ++r)
        for (Eigen::Index s = 0; s < dim_b; ++s) rho(r, s) += out.rho(r * dc + i, s * dc + j);
    }
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-300) throw std::runtime_error("build_periodic: loop state has zero trace");
  rho /= tr;
  std::vector<int> dims(static_cast<std::size_t>(ell), db);
  std::vector<std::string> labels;
  for (int k = 1; k <= ell; ++k) labels.push_back("B" + std::to_string(k));
  return {std::move(rho), SubsystemShape(std::move(dims), std::move(labels))};
}

double entropy(const ChainState& state, const std::vector<std::string>& labels) {
  if (labels.empty()) return 0.0;
  return entropy_bits(state.marginal(in_shape_order(state.shape, labels)));
}

double cmi(const ChainState& state, const Tripartition& t) {
  validate_tripartition(t, state.shape, false);
  return entropy(state, concat(t.a, t.b)) + entropy(state, concat(t.b, t.c)) - entropy(state, t.b) -
         entropy(state, concat(concat(t.a, t.b), t.c));
}

Matrix product_in_shape_order(const SubsystemShape& shape, const Matrix& x, const std::vector<std::string>& labels_x,
                              const Matrix& y, const std::vector<std::string>& labels_y) {
  const auto lx = in_shape_order(shape, labels_x);
  const auto ly = in_shape_order(shape, labels_y);
  std::vector<std::string> joint = concat(lx, ly);
  std::vector<int> dims;
  for (const auto& l : joint) dims.push_back(shape.dim_of(l));
  const auto target = in_shape_order(shape, joint);
  std::vector<int> perm;
  for (const auto& l : target)
    perm.push_back(static_cast<int>(std::find(joint.begin(), joint.end(), l) - joint.begin()));
  return permute_subsystems(kron(x, y), dims, perm);
}

double trace_norm_cmi(const ChainState& state, const Tripartition& t) {
  validate_tripartition(t, state.shape, false);
  const auto abc = in_shape_order(state.shape, concat(concat(t.a, t.b), t.c));
  const auto ab = in_shape_order(state.shape, concat(t.a, t.b));
  const auto bc = in_shape_order(state.shape, concat(t.b, t.c));
  const SubsystemShape sub_abc = state.shape.restricted(abc);
  const SubsystemShape sub_ab = state.shape.restricted(ab);
  const Matrix rho_abc = state.marginal(abc);
  const Matrix rho_a = state.marginal(t.a);
  const Matrix rho_ab = partial_trace(rho_abc, sub_abc, ab);
  const Matrix rho_bc = partial_trace(rho_abc, sub_abc, bc);
  const Matrix rho_b = partial_trace(rho_ab, sub_ab, in_shape_order(state.shape, t.b));
  const double first = trace_norm_hermitian(rho_abc - product_in_shape_order(sub_abc, rho_a, t.a, rho_bc, bc));
  const double second = trace_norm_hermitian(rho_ab - product_in_shape_order(sub_ab, rho_a, t.a, rho_b, t.b));
  return first - second;
}

double product_deviation(const ChainState& state, const Matrix& nu) {
  const auto& labels = state.shape.labels();
  const int dc = state.shape.dims().back();
  if (nu.rows() != dc || nu.cols() != dc) throw std::invalid_argument("product_deviation: nu has the wrong dimension");
  const std::vector<std::string> rest(labels.begin(), labels.end() - 1);
  return trace_norm_hermitian(state.rho - kron(state.marginal(rest), nu));
}

MarkovGibbsResult markov_gibbs_gap(const ChainState& state, const std::vector<std::vector<std::string>>& blocking) {
  if (blocking.size() < 2) throw std::invalid_argument("markov_gibbs_gap: need at least two blocks");
  std::vector<std::string> flat;
  for (const auto& b : blocking) {
    if (b.empty()) throw std::invalid_argument("markov_gibbs_gap: empty block");
    flat.insert(flat.end(), b.begin(), b.end());
  }
  if (flat != state.shape.labels())
    throw std::invalid_argument("markov_gibbs_gap: blocks must list every label consecutively in chain order");

  std::vector<Eigen::Index> block_dim;
  for (const auto& b : blocking) block_dim.push_back(state.shape.dim_of(b));
  auto embed = [&](const Matrix& local, std::size_t first, std::size_t count) {
    Eigen::Index left = 1, right = 1;
    for (std::size_t k = 0; k < first; ++k) left *= block_dim[k];
    for (std::size_t k = first + count; k < block_dim.size(); ++k) right *= block_dim[k];
    return kron(kron(Matrix::Identity(left, left), local), Matrix::Identity(right, right));
  };

  const Eigen::Index total = state.rho.rows();
  Matrix h = Matrix::Zero(total, total);
  const std::size_t m = blocking.size();
  for (std::size_t i = 0; i + 1 < m; ++i)
    h -= embed(matrix_log2_psd(state.marginal(concat(blocking[i], blocking[i + 1]))), i, 2);
  for (std::size_t i = 1; i + 1 < m; ++i) h += embed(matrix_log2_psd(state.marginal(blocking[i])), i, 1);
  h = (h + h.adjoint()) / 2.0;

  // D(ρ‖2^{-H}/Z) = -S(ρ) + Tr(ρH) + log₂ Z.
  RealVector ev = hermitian_eigenvalues(h);
  const double lo = ev.minCoeff();
  double z = 0.0;
  for (double e : ev) z += std::exp2(-(e - lo));
  const double log2z = -lo + std::log2(z);
  const double gap = -entropy_bits(state.rho) + (state.rho * h).trace().real() + log2z;
  return {std::move(h), std::max(gap, 0.0)};
}

double continuity_bound(ContinuityKind kind, const ContinuityParams& p) {
  if (p.dim < 1) throw std::invalid_argument("continuity_bound: dimension must be positive");
  const double logd = std::log2(static_cast<double>(p.dim));
  auto hs_term = [&](double x) { return x <= 0.0 ? 0.0 : 4.0 * logd * x - 4.0 * x * std::log2(x); };
  switch (kind) {
  case ContinuityKind::cmi_hs:
    if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0 / M_E)) throw std::invalid_argument("continuity_bound: cmi_hs needs 0 <= eps <= 1/e");
    return hs_term(p.epsilon);
  case ContinuityKind::cmi_hs_fannes: {
    const double s = std::sqrt(std::max(p.epsilon, 0.0));
    if (!(p.epsilon >= 0.0 && s <= 1.0 / M_E)) throw std::invalid_argument("continuity_bound: cmi_hs_fannes needs sqrt(eps) <= 1/e");
    return hs_term(s);
  }
  case ContinuityKind::cmi_trace:
    if (!(p.epsilon >= 0.0)) throw std::invalid_argument("continuity_bound: cmi_trace needs eps >= 0");
    return 2.0 * p.epsilon;
  case ContinuityKind::afw:
    if (!(p.t >= 0.0 && p.t <= 1.0)) throw std::invalid_argument("continuity_bound: afw needs 0 <= T <= 1");
    return 2.0 * p.t * logd + (1.0 + p.t) * binary_entropy(p.t / (1.0 + p.t));
  }
  throw std::invalid_argument("continuity_bound: unknown kind");
}

} // namespace mpdo
