#pragma once

#include "mpdo/channels.hpp"
#include "mpdo/io.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace mpdo {

struct ExperimentConfig {
  std::string command;

  // Channel source: exactly one of builtin, channel_path, haar.
  std::string builtin;
  std::string channel_path;
  bool haar = false;
  int haar_d_c = 2;
  int haar_d_b = 2;
  int haar_d_env = 3;

  double p = 0.3;
  int d = 2;
  int ell_min = 1;
  int ell_max = 6;
  std::string tripartition = "1:*:1"; ///< block sizes a:b:c, '*' takes the remainder
  int samples = 500;
  bool sample_trajectories = false;
  std::uint64_t seed = 1;
  int restarts = 20;
  int probe_d_a = 2;
  int probe_d_b = 2;

  double tol_linear = 1e-8;
  double tol_fixed = 1e-7;
  double tol_invariant = 1e-10;
  int dim_cap = 1 << 13;
  long long enum_cap = 1LL << 16;

  std::string out;
  std::string summary;
  std::string trajectories; ///< measured-sweep: per-word CSV for the largest ell
};

json config_to_json(const ExperimentConfig& cfg);
/// Overrides the fields present in `j`; unknown keys throw std::invalid_argument.
void apply_config_json(ExperimentConfig& cfg, const json& j);
/// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

KrausChannel resolve_channel(const ExperimentConfig& cfg);

struct CommandResult {
  std::string primary;          ///< CSV or JSON text
  bool primary_is_csv = false;
  std::optional<json> summary;  ///< fit and checker summary for CSV commands
  std::optional<std::string> trajectories_csv = std::nullopt;
};

CommandResult cmd_decay_sweep(const ExperimentConfig& cfg);
CommandResult cmd_channel_report(const ExperimentConfig& cfg);
CommandResult cmd_measured_sweep(const ExperimentConfig& cfg);
CommandResult cmd_probe(const ExperimentConfig& cfg);
CommandResult cmd_periodic(const ExperimentConfig& cfg);

/// Dispatch on cfg.command.
CommandResult run_command(const ExperimentConfig& cfg);

} // namespace mpdo
