#pragma once

#include <optional>

#include "channel.hpp"
#include "config.hpp"
#include "star.hpp"
#include "subproblem.hpp"
#include "surrogate.hpp"

namespace starsec {

/// How the eavesdropping term of the objective is modeled: the
/// outage-constrained redundancy-rate bound (statistical CSI) or the
/// instantaneous Eve rate bound (perfect CSI).
enum class EveModel { statistical, instantaneous };

/// Complex vectors are optimized as interleaved real pairs:
/// z[off + 2i] = Re(v_i), z[off + 2i + 1] = Im(v_i).
void pack_cvec(const CVec& v, int offset, RVec& z);
CVec unpack_cvec(const RVec& z, int offset, int n);

struct P1Layout {
  int nt = 0;
  int w_off(Region k) const { return k == Region::transmit ? 0 : 2 * nt; }
  int size() const { return 4 * nt; }
};

struct P2Layout {
  int m = 0;
  bool has_kappa = true;
  int theta_off(Region k) const { return k == Region::transmit ? 0 : 2 * m; }
  int kappa_off(Region k) const { return 4 * m + (k == Region::reflect ? m : 0); }
  int sigma_off(Region k) const
  {
    return (has_kappa ? 6 : 4) * m + (k == Region::reflect ? 2 * m : 0);
  }
  int size() const { return (has_kappa ? 10 : 8) * m; }
};

struct BuiltP1 {
  ConvexSubproblem prob;
  P1Layout layout;
  RVec start;
  BeamformerPair unpack(const RVec& z) const;
};

struct BuiltP2 {
  ConvexSubproblem prob;
  P2Layout layout;
  RVec start;
  StarCoefficients unpack_theta(const RVec& z, Protocol proto) const;
  RVec unpack_kappa(const RVec& z, Region k) const;  // frozen pattern when !has_kappa
  double slack_sum(const RVec& z) const;
  RVec frozen_kappa_t;  // only set for frozen-pattern problems
};

/// Mode-selection penalty data: weight kappa^[i] and the current auxiliary
/// q vectors per region.
struct MsPenalty {
  double weight = 0.0;
  PerRegion<RVec> q;
};

struct BuildContext {
  const ChannelSet& ch;
  const SystemConfig& cfg;
  const StarCoefficients& theta_exp;
  const BeamformerPair& w_exp;
  const PerRegion<SurrogateConstants>& consts;
  EveModel eve_model = EveModel::statistical;
  const PerRegion<PcsiEveConstants>* pcsi = nullptr;  // required when instantaneous
};

/// Beamformer subproblem: decision variables (w_t, w_r); TaRC vector fixed
/// at theta_cur; surrogate built around (theta_exp, w_exp). Throws
/// TrustRegionViolation if a linearized denominator is non-positive at the
/// start point w_exp.
BuiltP1 build_p1(const BuildContext& bc, const StarCoefficients& theta_cur);

/// TaRC subproblem (energy-splitting form): variables (theta_t, theta_r,
/// kappa_t, kappa_r, slacks); beamformers fixed at the expansion values.
/// With `ms` set, adds the mode-selection binarity penalty. With `frozen`
/// set, kappa is a constant 0/1 pattern (conventional-RIS baseline) and the
/// kappa variables and coupling constraints disappear.
BuiltP2 build_p2(const BuildContext& bc, double lambda, const MsPenalty* ms = nullptr,
                 const RVec* frozen_kappa_t = nullptr);

}  // namespace starsec
