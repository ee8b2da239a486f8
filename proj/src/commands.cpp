#include "mpdo/commands.hpp"

#include "mpdo/algebra.hpp"
#include "mpdo/chain.hpp"
#include "mpdo/contraction.hpp"
#include "mpdo/fit.hpp"
#include "mpdo/measured.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mpdo {

namespace {

template <class T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

struct BlockSizes {
  int a = 1;
  int b = -1; ///< -1 marks the remainder
  int c = 1;
};

BlockSizes parse_blocks(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon == std::string::npos ? std::string::npos : colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3) throw std::invalid_argument("tripartition '" + spec + "' must have the form a:b:c");
  int stars = 0;
  std::array<int, 3> v{};
  for (std::size_t k = 0; k < 3; ++k) {
    if (parts[k] == "*") {
      v[k] = -1;
      ++stars;
      continue;
    }
    try {
      std::size_t used = 0;
      v[k] = std::stoi(parts[k], &used);
      if (used != parts[k].size() || v[k] < 0) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("tripartition '" + spec + "': '" + parts[k] + "' is not a block size or '*'");
    }
  }
  if (stars > 1) throw std::invalid_argument("tripartition '" + spec + "': at most one '*'");
  return {v[0], v[1], v[2]};
}

Tripartition blocks_for(const SubsystemShape& shape, const BlockSizes& s) {
  const int n = static_cast<int>(shape.size());
  int a = s.a, b = s.b, c = s.c;
  if (a < 0) a = n - b - c;
  if (b < 0) b = n - a - c;
  if (c < 0) c = n - a - b;
  return tripartition_from_sizes(shape, a, b, c);
}

std::string cell(double x) { return format_double(x); }

json fit_json(const LinearFit& f) {
  return {{"slope", number_to_json(f.slope)},
          {"intercept", number_to_json(f.intercept)},
          {"r2", number_to_json(f.r2)},
          {"points", f.points},
          {"rate", number_to_json(std::exp2(f.slope))}};
}

void check_range(const ExperimentConfig& cfg) {
  if (cfg.ell_min < 1 || cfg.ell_max < cfg.ell_min)
    throw std::invalid_argument("need 1 <= ell-min <= ell-max");
}

CsvTable stamped(std::vector<std::string> columns, const ExperimentConfig& cfg) {
  CsvTable t(std::move(columns));
  t.add_comment("command", cfg.command);
  t.add_comment("config_hash", config_hash(cfg));
  t.add_comment("seed", std::to_string(cfg.seed));
  return t;
}

json optional_number(const std::optional<double>& x) { return x ? number_to_json(*x) : json(nullptr); }

json eta_json(const EtaReport& r) {
  return {{"eta_spectral", optional_number(r.eta_spectral)},
          {"eta_2norm_crosscheck", optional_number(r.eta_2norm_crosscheck)},
          {"eta_subleading", optional_number(r.eta_subleading)},
          {"eta_trace_estimate", number_to_json(r.eta_trace_estimate)},
          {"eta_partially_invariant", number_to_json(r.eta_partially_invariant)},
          {"forgetful_weight", number_to_json(r.forgetful_weight)},
          {"correctable_trivial", r.correctable_trivial}};
}

const char* via_name(StrictPositivityVia v) { return v == StrictPositivityVia::kraus_span ? "kraus_span" : "sampling"; }

bool bistochastic_channel(const KrausChannel& n) {
  return n.d_in() > 0 && is_trace_preserving(n, 1e-9) && is_bistochastic(n, 1e-9);
}

} // namespace

json config_to_json(const ExperimentConfig& c) {
  return {{"command", c.command},
          {"builtin", c.builtin},
          {"channel_path", c.channel_path},
          {"haar", c.haar},
          {"haar_d_c", c.haar_d_c},
          {"haar_d_b", c.haar_d_b},
          {"haar_d_env", c.haar_d_env},
          {"p", c.p},
          {"d", c.d},
          {"ell_min", c.ell_min},
          {"ell_max", c.ell_max},
          {"tripartition", c.tripartition},
          {"samples", c.samples},
          {"sample_trajectories", c.sample_trajectories},
          {"seed", c.seed},
          {"restarts", c.restarts},
          {"probe_d_a", c.probe_d_a},
          {"probe_d_b", c.probe_d_b},
          {"tol_linear", c.tol_linear},
          {"tol_fixed", c.tol_fixed},
          {"tol_invariant", c.tol_invariant},
          {"dim_cap", c.dim_cap},
          {"enum_cap", c.enum_cap},
          {"out", c.out},
          {"summary", c.summary},
          {"trajectories", c.trajectories}};
}

void apply_config_json(ExperimentConfig& c, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  const json known = config_to_json(c);
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
  take(j, "command", c.command);
  take(j, "builtin", c.builtin);
  take(j, "channel_path", c.channel_path);
  take(j, "haar", c.haar);
  take(j, "haar_d_c", c.haar_d_c);
  take(j, "haar_d_b", c.haar_d_b);
  take(j, "haar_d_env", c.haar_d_env);
  take(j, "p", c.p);
  take(j, "d", c.d);
  take(j, "ell_min", c.ell_min);
  take(j, "ell_max", c.ell_max);
  take(j, "tripartition", c.tripartition);
  take(j, "samples", c.samples);
  take(j, "sample_trajectories", c.sample_trajectories);
  take(j, "seed", c.seed);
  take(j, "restarts", c.restarts);
  take(j, "probe_d_a", c.probe_d_a);
  take(j, "probe_d_b", c.probe_d_b);
  take(j, "tol_linear", c.tol_linear);
  take(j, "tol_fixed", c.tol_fixed);
  take(j, "tol_invariant", c.tol_invariant);
  take(j, "dim_cap", c.dim_cap);
  take(j, "enum_cap", c.enum_cap);
  take(j, "out", c.out);
  take(j, "summary", c.summary);
  take(j, "trajectories", c.trajectories);
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("out");
  j.erase("summary");
  j.erase("trajectories");
  return hex64(fnv1a64(j.dump()));
}

KrausChannel resolve_channel(const ExperimentConfig& cfg) {
  const int sources = (cfg.builtin.empty() ? 0 : 1) + (cfg.channel_path.empty() ? 0 : 1) + (cfg.haar ? 1 : 0);
  if (sources != 1) throw std::invalid_argument("choose exactly one channel source: --builtin, --channel or --haar");
  if (!cfg.builtin.empty()) return builtin_example(cfg.builtin, cfg.p, cfg.d);
  if (!cfg.channel_path.empty()) return load_channel(cfg.channel_path);
  return haar_y_channel(cfg.haar_d_c, cfg.haar_d_b, cfg.haar_d_env, cfg.seed);
}

CommandResult cmd_decay_sweep(const ExperimentConfig& cfg) {
  check_range(cfg);
  const KrausChannel n = resolve_channel(cfg);
  if (!n.y_split()) throw std::invalid_argument("decay-sweep needs a Y-shaped channel (y_split)");
  const BlockSizes blocks = parse_blocks(cfg.tripartition);
  const bool bistochastic = bistochastic_channel(n);
  std::optional<double> eta;
  if (bistochastic) eta = eta_spectral(n);
  Matrix nu = maximally_mixed(n.d_in());
  if (!bistochastic) nu = invariant_pair(n, cfg.tol_invariant).nu;

  std::vector<double> ells, cmis, tn, dev;
  for (int ell = cfg.ell_min; ell <= cfg.ell_max; ++ell) {
    const ChainState st = build_chain(n, ell, ChainInput::max_entangled(), cfg.dim_cap);
    const Tripartition t = blocks_for(st.shape, blocks);
    ells.push_back(ell);
    cmis.push_back(cmi(st, t));
    tn.push_back(trace_norm_cmi(st, t));
    dev.push_back(product_deviation(st, nu));
  }
  const LinearFit fit = log2_fit(ells, cmis);
  const double rate = std::exp2(fit.slope);
  CsvTable table = stamped({"ell", "cmi_bits", "trace_norm_cmi", "product_deviation", "fitted_rate", "eta_spectral"}, cfg);
  for (std::size_t k = 0; k < ells.size(); ++k)
    table.add_row({std::to_string(static_cast<int>(ells[k])), cell(cmis[k]), cell(tn[k]), cell(dev[k]),
                   fit.points >= 2 ? cell(rate) : "", eta ? cell(*eta) : ""});
  json summary = {{"command", "decay-sweep"}, {"config_hash", config_hash(cfg)}, {"fit", fit_json(fit)},
                  {"eta_spectral", optional_number(eta)},
                  {"no_decay", fit.points >= 2 && std::abs(fit.slope) < 1e-3}};
  if (bistochastic) summary["eta_subleading"] = number_to_json(eta_subleading(n));
  return {table.str(), true, summary};
}

CommandResult cmd_channel_report(const ExperimentConfig& cfg) {
  const KrausChannel n = resolve_channel(cfg);
  const ChannelReport v = validate(n, 64, cfg.seed);
  if (!v.is_cp || !v.is_tp) throw std::invalid_argument("channel-report needs a CPTP channel (tp_error " + format_double(v.tp_error) + ")");
  json out;
  out["command"] = "channel-report";
  out["config_hash"] = config_hash(cfg);
  out["channel"] = {{"d_in", n.d_in()},
                    {"d_out", n.d_out()},
                    {"kraus_count", n.kraus_count()},
                    {"y_split", n.y_split() ? json::array({n.y_split()->d_b, n.y_split()->d_c}) : json(nullptr)}};
  out["validate"] = {{"is_cp", v.is_cp},
                     {"is_tp", v.is_tp},
                     {"is_bistochastic", v.is_bistochastic},
                     {"is_strictly_positive_sample", v.is_strictly_positive_sample},
                     {"strict_positivity_via", via_name(v.strict_positivity_via)},
                     {"choi_min_eigenvalue", number_to_json(v.choi_min_eigenvalue)},
                     {"tp_error", number_to_json(v.tp_error)},
                     {"bistochastic_error", number_to_json(v.bistochastic_error)},
                     {"kraus_span_dim", v.kraus_span_dim}};
  out["correctable_algebra_dim"] = correctable_algebra(n, cfg.tol_linear).dim();
  out["fixed_point_dim"] = fixed_point_space(petz_composition(n, maximally_mixed(n.d_in())), cfg.tol_fixed).dim();
  out["eta"] = eta_json(eta_report(n, cfg.restarts, cfg.seed));
  if (n.y_split() && n.y_split()->d_c == n.d_in()) {
    const InvariantPair ip = invariant_pair(n, cfg.tol_invariant);
    out["invariant_pair"] = {{"factorizes", ip.factorizes},
                             {"degenerate", ip.degenerate},
                             {"residual", number_to_json(ip.residual)},
                             {"nu", matrix_to_json(ip.nu)},
                             {"sigma", matrix_to_json(ip.sigma)}};
  } else {
    out["invariant_pair"] = nullptr;
  }
  return {out.dump(2) + "\n", false, std::nullopt};
}

CommandResult cmd_measured_sweep(const ExperimentConfig& cfg) {
  check_range(cfg);
  const KrausChannel n = resolve_channel(cfg);
  const Instrument instr = instrument_from_channel(n);
  const Condition1Report c1 = condition1_check(instr, cfg.tol_linear);

  std::vector<double> ells, cmis, maxes;
  CsvTable table = stamped({"ell", "measured_cmi_bits", "max_outcome_mi", "mode"}, cfg);
  CsvTable per_word = stamped({"word", "weight", "mi_bits"}, cfg);
  for (int ell = cfg.ell_min; ell <= cfg.ell_max; ++ell) {
    long long words = 1;
    bool fits = true;
    for (int k = 0; k < ell && fits; ++k) {
      words *= static_cast<long long>(instr.size());
      fits = words <= cfg.enum_cap;
    }
    EnsembleMode mode = EnsembleMode::enumeration();
    if (cfg.sample_trajectories || !fits) {
      if (!cfg.sample_trajectories)
        throw std::invalid_argument("ell=" + std::to_string(ell) + " exceeds the enumeration cap; pass --sample-trajectories");
      mode = EnsembleMode::sampled(cfg.samples, cfg.seed + static_cast<std::uint64_t>(ell));
    }
    const MeasuredCmi m = measured_cmi(instr, ell, mode, std::nullopt, cfg.enum_cap);
    ells.push_back(ell);
    cmis.push_back(m.cmi);
    maxes.push_back(m.max_mi);
    table.add_row({std::to_string(ell), cell(m.cmi), cell(m.max_mi), mode.enumerate ? "enumerate" : "sample"});
    if (ell == cfg.ell_max) {
      per_word.add_comment("ell", std::to_string(ell));
      for (std::size_t k = 0; k < m.words.size(); ++k) per_word.add_row({m.words[k], cell(m.weights[k]), cell(m.per_outcome_mi[k])});
    }
  }

  json verdicts = json::array();
  for (auto v : c1.per_outcome) verdicts.push_back(to_string(v));
  json positivity = json::array();
  for (const auto& m : instr.maps) {
    const StrictPositivity sp = strict_positivity_check(m, 64, cfg.seed);
    positivity.push_back({{"verdict", to_string(sp.verdict)},
                          {"via", via_name(sp.via)},
                          {"min_sampled_eigenvalue", number_to_json(sp.min_sampled_eigenvalue)}});
  }
  json summary = {{"command", "measured-sweep"},
                  {"config_hash", config_hash(cfg)},
                  {"condition1", {{"overall", to_string(c1.overall)}, {"per_outcome", verdicts}}},
                  {"wielandt_xi", c1.wielandt_xi},
                  {"strict_positivity", positivity},
                  {"fit", fit_json(log2_fit(ells, cmis))},
                  {"max_outcome_fit", fit_json(log2_fit(ells, maxes))}};
  return {table.str(), true, summary, per_word.str()};
}

CommandResult cmd_probe(const ExperimentConfig& cfg) {
  const KrausChannel n = resolve_channel(cfg);
  const DpiProbeResult r = dpi_probe(n, cfg.samples, cfg.probe_d_a, cfg.probe_d_b, cfg.seed);
  json hist = json::array();
  for (int h : r.histogram) hist.push_back(h);
  json out = {{"command", "probe"},
              {"config_hash", config_hash(cfg)},
              {"samples", cfg.samples},
              {"cmi", {{"max_ratio", number_to_json(r.max_ratio)}, {"violations", r.violations}, {"counted", r.counted}, {"histogram", hist}}},
              {"trace_norm_cmi",
               {{"max_ratio", number_to_json(r.max_ratio_trace)}, {"violations", r.violations_trace}, {"counted", r.counted_trace}}}};
  return {out.dump(2) + "\n", false, std::nullopt};
}

CommandResult cmd_periodic(const ExperimentConfig& cfg) {
  check_range(cfg);
  const KrausChannel n = resolve_channel(cfg);
  CsvTable table =
      stamped({"ell", "deviation_trace_norm", "max_tripartition_cmi", "hs_epsilon", "continuity_bound"}, cfg);
  std::vector<double> ells, devs;
  for (int ell = std::max(cfg.ell_min, 2); ell <= cfg.ell_max; ++ell) {
    const ChainState st = build_periodic(n, ell, cfg.dim_cap);
    const int dim = static_cast<int>(st.rho.rows());
    const Matrix o = st.rho - maximally_mixed(dim);
    const double dev = trace_norm_hermitian(o);
    const double eps = dim * (o * o).trace().real();
    double worst = 0.0;
    const int m = static_cast<int>(st.shape.size());
    const auto& labels = st.shape.labels();
    for (int start = 0; start < m; ++start)
      for (int a = 1; start + a < m; ++a)
        for (int b = 0; start + a + b < m; ++b)
          for (int c = 1; start + a + b + c <= m; ++c) {
            Tripartition t;
            t.a.assign(labels.begin() + start, labels.begin() + start + a);
            t.b.assign(labels.begin() + start + a, labels.begin() + start + a + b);
            t.c.assign(labels.begin() + start + a + b, labels.begin() + start + a + b + c);
            worst = std::max(worst, cmi(st, t));
          }
    const double bound = eps <= 1.0 / M_E ? continuity_bound(ContinuityKind::cmi_hs, {eps, 0.0, dim})
                                          : std::numeric_limits<double>::infinity();
    ells.push_back(ell);
    devs.push_back(dev);
    table.add_row({std::to_string(ell), cell(dev), cell(worst), cell(eps), cell(bound)});
  }
  json summary = {{"command", "periodic"}, {"config_hash", config_hash(cfg)}, {"fit", fit_json(log2_fit(ells, devs))}};
  if (bistochastic_channel(n)) summary["eta_spectral"] = number_to_json(eta_spectral(n));
  return {table.str(), true, summary};
}

CommandResult run_command(const ExperimentConfig& cfg) {
  if (cfg.command == "decay-sweep") return cmd_decay_sweep(cfg);
  if (cfg.command == "channel-report") return cmd_channel_report(cfg);
  if (cfg.command == "measured-sweep") return cmd_measured_sweep(cfg);
  if (cfg.command == "probe") return cmd_probe(cfg);
  if (cfg.command == "periodic") return cmd_periodic(cfg);
  throw std::invalid_argument("unknown command '" + cfg.command + "'");
}

} // namespace mpdo
