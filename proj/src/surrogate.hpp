#pragma once

#include <stdexcept>

#include "channel.hpp"
#include "config.hpp"
#include "metrics.hpp"
#include "star.hpp"

namespace starsec {

/// Raised when the linearized wiretap-interference denominator is not
/// positive at the requested evaluation point; carries the offending margin.
class TrustRegionViolation : public std::runtime_error {
 public:
  explicit TrustRegionViolation(double margin)
      : std::runtime_error("trust region violated"), margin_(margin) {}
  double margin() const { return margin_; }

 private:
  double margin_;
};

/// Global concave lower bound (natural log) of ln(1 + |x|^2 / y) around the
/// expansion point (xt, yt); exact there.
double bound_lower_log(cxd x, double y, cxd xt, double yt);

/// Tangent upper bound (natural log) of ln(1 + x/y) around (xt, yt); exact
/// there.
double bound_upper_log(double x, double y, double xt, double yt);

/// Everything the convexification of one region needs, evaluated once per
/// expansion point. a3 carries the ln(1/delta) factor of the redundancy-rate
/// argument so the tangent bound below is exact at the expansion point.
struct SurrogateConstants {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double a4 = 0.0;

  cxd x_tilde;         // theta~^H F_k w~_k
  cxd i_tilde;         // theta~^H F_k w~_k'
  double y_tilde = 0;  // |i_tilde|^2 + noise_bob

  CVec psi_tilde;      // Eve signature of own beam at the expansion point
  CVec psi_tilde_p;    // ... of the interfering beam
  double p_tilde = 0;      // |psi_tilde|^2
  double p_tilde_p = 0;    // |psi_tilde_p|^2
  double e_tilde = 0;      // eta (p_tilde + p_tilde_p)

  double noise_bob = 1.0;
  double noise_eve = 1.0;
  double eta = 1.0;
  double log_delta_inv = 0.0;
};

SurrogateConstants surrogate_constants(const ChannelSet& ch, const StarCoefficients& theta_exp,
                                       const BeamformerPair& w_exp, Region k,
                                       const SystemConfig& cfg);

/// Lower bound on log2(1 + gamma_b,k) valid everywhere, exact at the
/// expansion point.
double rate_lower_bound(const ChannelSet& ch, const StarCoefficients& theta,
                        const BeamformerPair& w, Region k, const SurrogateConstants& c);

struct TrustRegion {
  bool ok = false;
  double margin = 0.0;  // 2 Re{psi'^H psi~'} - |psi~'|^2
};

TrustRegion trust_region(const ChannelSet& ch, const StarCoefficients& theta,
                         const BeamformerPair& w, Region k, const SurrogateConstants& c);

/// Upper bound on the redundancy rate S_k*, valid inside the trust region,
/// exact at the expansion point. Throws TrustRegionViolation outside it.
double sk_upper_bound(const ChannelSet& ch, const StarCoefficients& theta,
                      const BeamformerPair& w, Region k, const SurrogateConstants& c);

/// Upper bound E* on log2(1 + E_e,k); exact at the expansion point. The
/// convexified energy constraint is E* >= log2(1 + e_min). Throws on a
/// zero-energy expansion point.
double energy_upper_bound(const ChannelSet& ch, const StarCoefficients& theta,
                          const BeamformerPair& w, Region k, const SurrogateConstants& c);

/// Right-hand side of the energy restriction once E* >= log2(1+e_min) is
/// rewritten as (linearized energy) >= e_req. Always <= e_min, with equality
/// iff the expansion-point energy equals e_min.
double energy_requirement(double e_tilde, double e_min);

/// Instantaneous-Eve (perfect CSI) analogue of the S_k* machinery: tangent
/// constants for the upper bound on log2(1 + gamma_e,k).
struct PcsiEveConstants {
  cxd sig_tilde;     // theta~^H V_k w~_k
  cxd itf_tilde;     // theta~^H V_k w~_k'
  double b3 = 0.0;
  double b4 = 0.0;
  double noise_eve = 1.0;
};

PcsiEveConstants pcsi_eve_constants(const ChannelSet& ch, const StarCoefficients& theta_exp,
                                    const BeamformerPair& w_exp, Region k,
                                    const SystemConfig& cfg);

double pcsi_eve_upper_bound(const ChannelSet& ch, const StarCoefficients& theta,
                            const BeamformerPair& w, Region k, const PcsiEveConstants& c);

}  // namespace starsec
