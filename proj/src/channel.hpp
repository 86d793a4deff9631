#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "types.hpp"

namespace starsec {

/// Large-scale model: P_L = PL0 * (d / d0)^(-alpha), d0 = 1 m; small-scale
/// entries are i.i.d. circularly-symmetric complex Gaussian with unit
/// variance before the path-gain scaling.
struct ChannelDistribution {
  double reference_gain = 1.0;  // PL0
  double d0 = 1.0;
  double exponent = 2.2;
};

/// Path gain at distance d. Distances at or below the configured floor are
/// clamped to the floor; when that happens a note is appended to *warnings.
double path_gain(double d, const SystemConfig& cfg, std::vector<std::string>* warnings = nullptr);

/// One realization of every link plus derived cascades. Cascades satisfy
/// F_k = diag(conj(h_k)) H and V_k = diag(conj(v_k)) H by construction.
struct ChannelSet {
  CMat H;      // M x N_t, BS -> STAR-RIS
  CVec h_t;    // STAR-RIS -> Bob_t
  CVec h_r;
  CVec v_t;    // STAR-RIS -> Eve_t
  CVec v_r;
  CMat F_t;    // diag(h_t^H) H
  CMat F_r;
  CMat V_t;    // diag(v_t^H) H
  CMat V_r;

  // Known large-scale statistics of the Eve links (per-entry variance of
  // v_k) and the sampled distances; the SOP machinery needs the variances.
  double eve_gain_t = 1.0;
  double eve_gain_r = 1.0;
  double eve_dist_t = 0.0;
  double eve_dist_r = 0.0;

  std::uint64_t seed = 0;

  const CVec& h(Region k) const { return k == Region::transmit ? h_t : h_r; }
  const CVec& v(Region k) const { return k == Region::transmit ? v_t : v_r; }
  const CMat& F(Region k) const { return k == Region::transmit ? F_t : F_r; }
  const CMat& V(Region k) const { return k == Region::transmit ? V_t : V_r; }
  double eve_gain(Region k) const { return k == Region::transmit ? eve_gain_t : eve_gain_r; }

  int elements() const { return static_cast<int>(H.rows()); }
  int antennas() const { return static_cast<int>(H.cols()); }

  /// Builds the cascades from raw links (also used by the loader and tests).
  static ChannelSet from_links(CMat H, CVec h_t, CVec h_r, CVec v_t, CVec v_r,
                               double eve_gain_t = 1.0, double eve_gain_r = 1.0);
};

/// Draws all links for one trial. Identical (cfg, seed) gives bit-identical
/// output; each link has its own sub-stream of the master seed.
ChannelSet generate_channels(const SystemConfig& cfg, std::uint64_t seed,
                             std::vector<std::string>* warnings = nullptr);

/// Text dump: header naming dimensions and seed, then one complex entry per
/// line ("re im"), row-major per block.
void save_channels(const ChannelSet& ch, std::ostream& os);
void save_channels_file(const ChannelSet& ch, const std::string& path);
ChannelSet load_channels(std::istream& is);
ChannelSet load_channels_file(const std::string& path);

}  // namespace starsec
