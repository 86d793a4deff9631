#pragma once

#include "types.hpp"

namespace starsec {

enum class Protocol { es, ms };

/// Per-region TaRC vectors theta_k with entries sqrt(alpha_m^k) e^{i phi_m^k}.
/// Energy conservation requires alpha_m^t + alpha_m^r = 1 for every element;
/// under MS the alpha are additionally binary at convergence.
struct StarCoefficients {
  CVec theta_t;
  CVec theta_r;
  Protocol protocol = Protocol::es;

  StarCoefficients() = default;
  StarCoefficients(CVec t, CVec r, Protocol p)
      : theta_t(std::move(t)), theta_r(std::move(r)), protocol(p) {}

  static StarCoefficients from_polar(const RVec& amp_t, const RVec& phase_t, const RVec& amp_r,
                                     const RVec& phase_r, Protocol p);

  /// Uniform power split (alpha = 1/2 everywhere), all phases zero.
  static StarCoefficients equal_split(int m, Protocol p = Protocol::es);

  const CVec& theta(Region k) const { return k == Region::transmit ? theta_t : theta_r; }
  CVec& theta(Region k) { return k == Region::transmit ? theta_t : theta_r; }

  int elements() const { return static_cast<int>(theta_t.size()); }

  /// Power-split coefficients alpha_m^k = |theta_m^k|^2.
  RVec amplitudes(Region k) const;

  /// Phases in [0, 2*pi).
  RVec phases(Region k) const;

  /// max_m | alpha_m^t + alpha_m^r - 1 |
  double energy_conservation_residual() const;

  /// max_m distance of alpha_m^k from {0,1} (MS binarity measure).
  double binarity_residual() const;
};

struct BeamformerPair {
  CVec w_t;
  CVec w_r;

  BeamformerPair() = default;
  BeamformerPair(CVec t, CVec r) : w_t(std::move(t)), w_r(std::move(r)) {}

  const CVec& w(Region k) const { return k == Region::transmit ? w_t : w_r; }
  CVec& w(Region k) { return k == Region::transmit ? w_t : w_r; }

  int antennas() const { return static_cast<int>(w_t.size()); }

  /// Total transmit power ||w_t||^2 + ||w_r||^2.
  double power() const { return w_t.squaredNorm() + w_r.squaredNorm(); }
};

}  // namespace starsec
