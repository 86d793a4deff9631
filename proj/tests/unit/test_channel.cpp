#include <doctest.h>

#include <cmath>
#include <sstream>

#include "channel.hpp"
#include "rng.hpp"

using namespace starsec;

TEST_CASE("path gain formula and clamping")
{
  SystemConfig cfg;
  cfg.reference_gain = 1.0;
  CHECK(path_gain(1.0, cfg) == doctest::Approx(1.0));
  cfg.pathloss_exponent = 2.2;
  CHECK(path_gain(10.0, cfg) == doctest::Approx(std::pow(10.0, -2.2)));
  cfg.pathloss_exponent = 2.0;
  CHECK(path_gain(100.0, cfg) == doctest::Approx(1e-4));

  std::vector<std::string> warnings;
  const double clamped = path_gain(0.01, cfg, &warnings);
  CHECK(clamped == doctest::Approx(path_gain(cfg.eve_dist_floor, cfg)));
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("clamped") != std::string::npos);
}

TEST_CASE("path gain strictly decreasing in distance")
{
  SystemConfig cfg;
  double prev = path_gain(0.6, cfg);
  for (double d = 0.8; d < 30.0; d += 0.5) {
    const double g = path_gain(d, cfg);
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("generation is deterministic in (cfg, seed)")
{
  SystemConfig cfg;
  cfg.num_elements = 8;
  cfg.num_antennas = 3;
  const ChannelSet a = generate_channels(cfg, 42);
  const ChannelSet b = generate_channels(cfg, 42);
  const ChannelSet c = generate_channels(cfg, 43);
  CHECK((a.H - b.H).norm() == 0.0);
  CHECK((a.h_t - b.h_t).norm() == 0.0);
  CHECK((a.v_r - b.v_r).norm() == 0.0);
  CHECK(a.eve_dist_t == b.eve_dist_t);
  CHECK((a.H - c.H).norm() > 0.0);
}

TEST_CASE("cascades reconstruct from raw links")
{
  SystemConfig cfg;
  cfg.num_elements = 6;
  cfg.num_antennas = 4;
  const ChannelSet ch = generate_channels(cfg, 7);
  for (Region k : both_regions) {
    CMat f = ch.h(k).conjugate().asDiagonal() * ch.H;
    CMat v = ch.v(k).conjugate().asDiagonal() * ch.H;
    CHECK((f - ch.F(k)).norm() == 0.0);
    CHECK((v - ch.V(k)).norm() == 0.0);
  }
}

TEST_CASE("eve distances respect the floor and range")
{
  SystemConfig cfg;
  cfg.num_elements = 2;
  cfg.num_antennas = 2;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const ChannelSet ch = generate_channels(cfg, seed);
    CHECK(ch.eve_dist_t >= cfg.eve_dist_floor);
    CHECK(ch.eve_dist_t <= cfg.eve_dist_max);
    CHECK(ch.eve_dist_r >= cfg.eve_dist_floor);
    CHECK(ch.eve_dist_r <= cfg.eve_dist_max);
  }
}

TEST_CASE("zero pathloss exponent gives the reference gain everywhere")
{
  SystemConfig cfg;
  cfg.num_elements = 50000;
  cfg.num_antennas = 1;
  cfg.pathloss_exponent = 0.0;
  cfg.reference_gain = 2.5;
  const ChannelSet ch = generate_channels(cfg, 3);
  const double power = ch.h_t.squaredNorm() / cfg.num_elements;
  CHECK(power == doctest::Approx(2.5).epsilon(0.02));
}

TEST_CASE("small-scale statistics: Re variance 0.5 at unit gain")
{
  SystemConfig cfg;
  cfg.num_elements = 1000;
  cfg.num_antennas = 1000;
  cfg.reference_gain = 1.0;
  cfg.d_bs_ris = 1.0;
  const ChannelSet ch = generate_channels(cfg, 11);
  const auto n = ch.H.size();
  double mean = 0.0, m2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) mean += ch.H(i).real();
  mean /= static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = ch.H(i).real() - mean;
    m2 += d * d;
  }
  const double var = m2 / static_cast<double>(n - 1);
  CHECK(std::abs(var - 0.5) < 0.002);
  // mean of each quadrature -> 0 within 4 sigma / sqrt(n)
  CHECK(std::abs(mean) < 4.0 * std::sqrt(0.5 / static_cast<double>(n)));
}

TEST_CASE("per-entry power matches the path gain within 1%")
{
  SystemConfig cfg;
  cfg.num_elements = 120000;
  cfg.num_antennas = 1;
  const ChannelSet ch = generate_channels(cfg, 19);
  const double expected = path_gain(cfg.d_ris_bob, cfg);
  const double measured = ch.h_r.squaredNorm() / cfg.num_elements;
  CHECK(measured == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("text dump round trip")
{
  SystemConfig cfg;
  cfg.num_elements = 5;
  cfg.num_antennas = 3;
  const ChannelSet ch = generate_channels(cfg, 99);

  std::ostringstream os;
  save_channels(ch, os);
  std::istringstream is(os.str());
  const ChannelSet back = load_channels(is);

  CHECK(back.seed == ch.seed);
  CHECK((back.H - ch.H).norm() == 0.0);
  CHECK((back.v_t - ch.v_t).norm() == 0.0);
  CHECK((back.F_r - ch.F_r).norm() == 0.0);
  CHECK(back.eve_gain_t == ch.eve_gain_t);

  std::ostringstream os2;
  save_channels(back, os2);
  CHECK(os.str() == os2.str());
}
