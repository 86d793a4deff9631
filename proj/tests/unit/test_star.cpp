#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rng.hpp"
#include "star.hpp"

using namespace starsec;

TEST_CASE("polar round trip up to phase wrap")
{
  Rng rng(5);
  const int m = 16;
  RVec amp_t(m), ph_t(m), amp_r(m), ph_r(m);
  for (int i = 0; i < m; ++i) {
    amp_t[i] = rng.uniform();
    amp_r[i] = 1.0 - amp_t[i];
    ph_t[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    ph_r[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  const auto theta = StarCoefficients::from_polar(amp_t, ph_t, amp_r, ph_r, Protocol::es);

  const RVec amp_t2 = theta.amplitudes(Region::transmit);
  const RVec ph_t2 = theta.phases(Region::transmit);
  for (int i = 0; i < m; ++i) {
    CHECK(amp_t2[i] == doctest::Approx(amp_t[i]).epsilon(1e-12));
    double d = std::abs(ph_t2[i] - ph_t[i]);
    d = std::min(d, 2.0 * std::numbers::pi - d);
    CHECK(d < 1e-9);
  }
  CHECK(theta.energy_conservation_residual() < 1e-12);
}

TEST_CASE("phase of a zero-amplitude element reads back as zero")
{
  RVec amp(2), ph(2);
  amp << 0.0, 1.0;
  ph << 1.0, 0.5;
  const auto theta = StarCoefficients::from_polar(amp, ph, RVec(RVec::Ones(2) - amp),
                                                  RVec(RVec::Zero(2)), Protocol::ms);
  CHECK(theta.theta_t[0] == cxd(0.0, 0.0));
  CHECK(theta.amplitudes(Region::transmit)[1] == doctest::Approx(1.0));
}

TEST_CASE("binarity residual")
{
  RVec amp(3), zero(3);
  amp << 0.0, 1.0, 0.4;
  zero.setZero();
  const auto theta =
      StarCoefficients::from_polar(amp, zero, RVec(RVec::Ones(3) - amp), zero, Protocol::ms);
  CHECK(theta.binarity_residual() == doctest::Approx(0.4));
}

TEST_CASE("beamformer power")
{
  BeamformerPair w(CVec::Constant(2, cxd(1.0, 0.0)), CVec::Constant(2, cxd(0.0, 1.0)));
  CHECK(w.power() == doctest::Approx(4.0));
}
