#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "config.hpp"

namespace starsec {

enum class SweepParam { elements, antennas, e_min_db, p_max_dbw, delta };

const char* sweep_param_name(SweepParam p);
std::optional<SweepParam> parse_sweep_param(const std::string& name);

struct SweepSpec {
  SweepParam param = SweepParam::elements;
  std::vector<double> values;
  std::vector<BaselineKind> baselines{BaselineKind::es_ipcsi};
  int trials = 20;
  std::uint64_t master_seed = 1;
  bool timing = false;  // wall-time column breaks byte-determinism; opt-in
  int workers = 0;      // 0: STARSEC_WORKERS env or hardware count
  std::vector<std::pair<std::string, std::string>> overrides;
};

struct SweepCell {
  BaselineKind baseline = BaselineKind::es_ipcsi;
  double value = 0.0;
  double mean_ssr = 0.0;
  double stderr_ssr = 0.0;
  double mean_energy_t = 0.0;
  double mean_energy_r = 0.0;
  double converged_frac = 0.0;
  double mean_iters = 0.0;
  double mean_ms = 0.0;
  int excluded = 0;  // infeasible trials, left out of every mean
  int used = 0;
  std::vector<double> trial_ssrs;  // per included trial, in trial order (not serialized)
};

struct SweepResult {
  SweepParam param = SweepParam::elements;
  std::vector<SweepCell> cells;
};

/// Applies one sweep value to a config copy.
SystemConfig apply_sweep_value(const SystemConfig& base, SweepParam param, double value);

/// Deterministic per-trial seed from (master, baseline, value, trial).
std::uint64_t trial_seed(std::uint64_t master, BaselineKind baseline, double value, int trial);

/// Runs every (baseline, value, trial) cell; cells execute concurrently,
/// aggregation order is fixed by the spec regardless of scheduling.
SweepResult run_sweep(const SweepSpec& spec, const SystemConfig& base);

void emit_csv(const SweepResult& result, std::ostream& os);
std::string sweep_csv(const SweepResult& result);
SweepResult parse_sweep_csv(std::istream& is);

/// Self-contained SVG: one line series per baseline with stderr bars.
void emit_plot_svg(const SweepResult& result, std::ostream& os);

/// key = value sweep description (same entries as the CLI flags).
SweepSpec parse_sweep_spec_text(const std::string& text, std::vector<std::string>* errors);

}  // namespace starsec
