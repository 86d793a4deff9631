#pragma once

#include <optional>
#include <string>
#include <vector>

#include "builders.hpp"
#include "channel.hpp"
#include "config.hpp"
#include "metrics.hpp"
#include "star.hpp"

namespace starsec {

enum class RunStatus { converged, max_iters, infeasible };

const char* run_status_name(RunStatus s);

struct TraceRow {
  int iter = 0;
  double ssr = 0.0;
  double penalized_objective = 0.0;
  double lambda = 0.0;
  double kappa = 0.0;
  double slack_sum = 0.0;
  double max_residual = 0.0;
  double elapsed_ms = 0.0;
};

struct IterationTrace {
  std::vector<TraceRow> rows;
  std::string to_csv() const;
};

struct RunOptions {
  Protocol protocol = Protocol::es;
  EveModel eve_model = EveModel::statistical;
  std::optional<RVec> frozen_kappa_t;  // conventional-RIS element pattern
  bool collect_timing = true;
};

struct Initialization {
  bool feasible = false;
  StarCoefficients theta;
  BeamformerPair w;
  PerRegion<double> achieved_energy;
  PerRegion<double> max_attainable;
  std::string message;
};

/// Feasible starting point: equal power split (ES) or a random balanced
/// on/off partition (MS), per-element phases aligned to the Bob cascades,
/// matched-filter beamformers at full power; the beams are steered toward
/// the Eve channels just far enough to meet the energy demand. Reports
/// infeasibility with the attainable energy when the demand cannot be met.
/// split_override forces a specific transmit-side split (multistart).
Initialization initialize(const SystemConfig& cfg, const ChannelSet& ch, std::uint64_t seed,
                          const RunOptions& opt = {}, const RVec* split_override = nullptr);

struct RunResult {
  RunStatus status = RunStatus::max_iters;
  StarCoefficients theta;
  BeamformerPair w;
  SecrecyReport report;
  IterationTrace trace;
  int iterations = 0;
  bool used_sop = false;
  std::string message;
  PerRegion<double> max_attainable;  // meaningful when status == infeasible
};

/// Alternating optimization: TaRC update (penalized convex subproblem),
/// beamformer update, expansion-point move, penalty schedule step, until
/// the true objective settles. Shared engine for every protocol/baseline.
RunResult run_ao(const SystemConfig& cfg, const ChannelSet& ch, const RunOptions& opt,
                 const std::optional<Initialization>& init = std::nullopt);

/// Energy-splitting protocol.
RunResult run_es(const SystemConfig& cfg, const ChannelSet& ch,
                 const std::optional<Initialization>& init = std::nullopt);

/// Mode-selection protocol (binary splits, enforced by the quadratic
/// penalty and final rounding).
RunResult run_ms(const SystemConfig& cfg, const ChannelSet& ch,
                 const std::optional<Initialization>& init = std::nullopt);

/// One penalty-schedule step: min(beta * current, cap).
double penalty_step(double current, double beta, double cap);

/// First-order-optimal auxiliary update q = (k + k^2) / (1 + k^2), elementwise.
RVec update_q(const RVec& kappa);

}  // namespace starsec
