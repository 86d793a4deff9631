#pragma once

#include "builders.hpp"
#include "channel.hpp"
#include "config.hpp"
#include "metrics.hpp"
#include "star.hpp"

namespace starsec {

/// Brute-force reference for tiny instances (M <= 3): coarse exhaustive
/// grid over splits, phases and beamformer directions, followed by
/// numerical-gradient ascent on the exact objective from the best grid
/// cells. Independent of the convexification/solver path by construction —
/// it only ever evaluates the exact metrics.
struct OracleOptions {
  int alpha_steps = 5;        // per-element split grid (ES)
  int phase_steps = 8;        // per free phase
  int beam_angle_steps = 5;
  int beam_phase_steps = 8;
  int split_steps = 5;        // transmit/reflect power ratio
  int polish_starts = 24;
  int polish_iters = 400;
};

struct OracleResult {
  double best_ssr = 0.0;
  StarCoefficients theta;
  BeamformerPair w;
  bool feasible = false;
  long evaluations = 0;
};

OracleResult oracle_search(const SystemConfig& cfg, const ChannelSet& ch, Protocol proto,
                           EveModel mode = EveModel::statistical, const OracleOptions& opt = {});

}  // namespace starsec
