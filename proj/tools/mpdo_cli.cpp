#include "mpdo/commands.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

void add_common(CLI::App& app, mpdo::ExperimentConfig& cfg, std::string& config_path) {
  app.add_option("--builtin", cfg.builtin, "Built-in channel: Ep, classical3, depolarizing, identity");
  app.add_option("--channel", cfg.channel_path, "Channel JSON file");
  app.add_flag("--haar", cfg.haar, "Haar-random Y-shaped channel");
  app.add_option("--haar-dc", cfg.haar_d_c, "Haar channel d_C");
  app.add_option("--haar-db", cfg.haar_d_b, "Haar channel d_B");
  app.add_option("--haar-denv", cfg.haar_d_env, "Haar channel environment dimension");
  app.add_option("--p", cfg.p, "Parameter of the Ep example");
  app.add_option("--d", cfg.d, "Dimension for depolarizing/identity");
  app.add_option("--ell-min", cfg.ell_min, "Smallest chain length");
  app.add_option("--ell-max", cfg.ell_max, "Largest chain length");
  app.add_option("--tripartition", cfg.tripartition, "Block sizes a:b:c, '*' for the remainder");
  app.add_option("--samples", cfg.samples, "Sample count");
  app.add_flag("--sample-trajectories", cfg.sample_trajectories, "Sample trajectories instead of enumerating");
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--restarts", cfg.restarts, "Restarts for the trace-norm contraction search");
  app.add_option("--probe-da", cfg.probe_d_a, "Probe d_A");
  app.add_option("--probe-db", cfg.probe_d_b, "Probe d_B");
  app.add_option("--tol-linear", cfg.tol_linear, "Linear independence tolerance");
  app.add_option("--tol-fixed", cfg.tol_fixed, "Eigenvalue-1 window");
  app.add_option("--tol-invariant", cfg.tol_invariant, "Invariant-pair factorization tolerance");
  app.add_option("--dim-cap", cfg.dim_cap, "Largest chain dimension");
  app.add_option("--enum-cap", cfg.enum_cap, "Largest enumerated outcome count");
  app.add_option("--out", cfg.out, "Output file (stdout when omitted)");
  app.add_option("--summary", cfg.summary, "Summary JSON file for CSV commands (default <out>.summary.json)");
  app.add_option("--trajectories", cfg.trajectories, "measured-sweep: per-word CSV for the largest ell");
  app.add_option("--config", config_path, "JSON config; its fields override flags");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix product density operator numerics"};
  app.require_subcommand(1);
  mpdo::ExperimentConfig cfg;
  std::string config_path;
  for (const char* name : {"decay-sweep", "channel-report", "measured-sweep", "probe", "periodic"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(*sub, cfg, config_path);
    sub->callback([&cfg, name] { cfg.command = name; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot open config '" + config_path + "'");
      mpdo::apply_config_json(cfg, mpdo::json::parse(in));
    }
    const mpdo::CommandResult result = mpdo::run_command(cfg);
    if (cfg.out.empty()) {
      std::cout << result.primary;
      if (result.summary) std::cout << "# summary: " << result.summary->dump() << '\n';
    } else {
      write_file(cfg.out, result.primary);
      if (result.summary)
        write_file(cfg.summary.empty() ? cfg.out + ".summary.json" : cfg.summary, result.summary->dump(2) + "\n");
    }
    if (!cfg.trajectories.empty() && result.trajectories_csv) write_file(cfg.trajectories, *result.trajectories_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
