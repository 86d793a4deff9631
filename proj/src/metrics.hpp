#pragma once

#include <cstdint>
#include <string>

#include "channel.hpp"
#include "config.hpp"
#include "star.hpp"
#include "types.hpp"

namespace starsec {

/// theta_k^H F_k w_k and friends; the basic cascaded-link scalar.
cxd cascade_scalar(const CVec& theta_k, const CMat& mat, const CVec& w);

/// SINR at Bob_k: |theta_k^H F_k w_k|^2 / (|theta_k^H F_k w_k'|^2 + noise).
double sinr_bob(const ChannelSet& ch, const StarCoefficients& theta, const BeamformerPair& w,
                Region k, const SystemConfig& cfg);

/// SINR at Eve_k with the realized wiretap cascade V_k.
double sinr_eve(const ChannelSet& ch, const StarCoefficients& theta, const BeamformerPair& w,
                Region k, const SystemConfig& cfg);

/// Statistical Eve-side signature Psi = sqrt(eve_gain_k) * Phi_k * H * w_beam,
/// the vector whose squared norm is the mean received power at Eve_k once the
/// small-scale wiretap channel is integrated out. The Eve path gain is folded
/// into Psi so the formulas below can use the raw Eve noise power.
CVec eve_signature(const ChannelSet& ch, const StarCoefficients& theta, const CVec& w_beam,
                   Region k);

/// Smallest redundancy rate meeting the outage bound delta:
/// log2(1 + |Psi_k|^2 ln(1/delta) / (|Psi'_k|^2 + noise)).
double redundancy_rate(const ChannelSet& ch, const StarCoefficients& theta,
                       const BeamformerPair& w, Region k, double delta, const SystemConfig& cfg);

/// Outage-constrained sum secrecy rate: sum_k [log2(1+gamma_b,k) - S_k*]^+.
double ssr(const ChannelSet& ch, const StarCoefficients& theta, const BeamformerPair& w,
           double delta, const SystemConfig& cfg);

/// Perfect-CSI sum secrecy rate: sum_k [log2(1+gamma_b,k) - log2(1+gamma_e,k)]^+.
double ssr_perfect_csi(const ChannelSet& ch, const StarCoefficients& theta,
                       const BeamformerPair& w, const SystemConfig& cfg);

/// Closed-form secrecy outage probability
///   exp( -(|Psi'|^2 + noise) (2^S - 1) / |Psi|^2 ).
/// Degenerate conventions: |Psi| = 0 with S > 0 gives 0 (nothing to
/// intercept); |Psi| = 0 with S = 0 gives 1.
double sop_closed_form(const CVec& psi, const CVec& psi_prime, double noise_eve, double s_k);

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/// Sampling estimate of the same outage probability. Draws the small-scale
/// wiretap vector v ~ CN(0, I) and counts the outage event with the
/// interference power entering at its mean, exactly the statistical model
/// the closed form integrates; agreement is then limited only by sampling
/// noise. Block-structured sub-seeds keep the result independent of any
/// parallel split.
MonteCarloEstimate sop_monte_carlo(const CVec& psi, const CVec& psi_prime, double noise_eve,
                                   double s_k, std::int64_t n_samples, std::uint64_t seed);

/// Convenience wrapper deriving the signatures from a system instance.
MonteCarloEstimate sop_monte_carlo(const ChannelSet& ch, const StarCoefficients& theta,
                                   const BeamformerPair& w, Region k, double s_k,
                                   std::int64_t n_samples, std::uint64_t seed,
                                   const SystemConfig& cfg);

/// Mean harvested energy at Eve_k: eta * (|Psi_k|^2 + |Psi'_k|^2).
double harvested_energy(const ChannelSet& ch, const StarCoefficients& theta,
                        const BeamformerPair& w, Region k, double eta);

/// Everything the experiment harness records for one solution.
struct SecrecyReport {
  PerRegion<double> gamma_bob;
  PerRegion<double> gamma_eve;
  PerRegion<double> s_star;
  PerRegion<double> secrecy;   // [log2(1+gamma_b) - S*]^+
  PerRegion<double> energy;    // harvested at Eve_k
  PerRegion<double> sop;       // closed form at S*
  double ssr_outage = 0.0;     // sum of secrecy terms
  double ssr_pcsi = 0.0;       // instantaneous-Eve sum secrecy rate
};

SecrecyReport make_report(const ChannelSet& ch, const StarCoefficients& theta,
                          const BeamformerPair& w, const SystemConfig& cfg);

/// One CSV row per report; column order is fixed and documented by the header.
std::string report_csv_header();
std::string report_csv_row(const SecrecyReport& rep);

}  // namespace starsec
