#include "verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "channel.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "star.hpp"

namespace starsec {

SopVerifyReport verify_sop(int instances, std::int64_t samples, std::uint64_t seed)
{
  SopVerifyReport rep;
  rep.all_pass = true;

  for (int i = 0; i < instances; ++i) {
    Rng rng(sub_seed(seed, 0x50f0ULL, static_cast<std::uint64_t>(i)));
    SystemConfig cfg;
    cfg.num_elements = 2 + static_cast<int>(rng.next_u64() % 7);  // M in [2,8]
    cfg.num_antennas = 2 + static_cast<int>(rng.next_u64() % 3);  // N_t in [2,4]
    cfg.reference_gain = 1.0;
    cfg.d_bs_ris = cfg.d_ris_bob = 1.0;

    const ChannelSet ch = generate_channels(cfg, rng.next_u64());
    const int m = cfg.num_elements;

    RVec alpha_t(m), phase_t(m), phase_r(m);
    for (int j = 0; j < m; ++j) {
      alpha_t[j] = rng.uniform();
      phase_t[j] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      phase_r[j] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    const StarCoefficients theta = StarCoefficients::from_polar(
        alpha_t, phase_t, RVec(RVec::Ones(m) - alpha_t), phase_r, Protocol::es);

    CVec wt(cfg.num_antennas), wr(cfg.num_antennas);
    for (int j = 0; j < cfg.num_antennas; ++j) {
      wt[j] = rng.cnormal();
      wr[j] = rng.cnormal();
    }
    const BeamformerPair w(std::move(wt), std::move(wr));

    SopVerifyRow row;
    row.index = i;
    row.m = m;
    row.nt = cfg.num_antennas;
    row.s_k = rng.uniform(0.0, 3.0);

    const Region k = rng.next_u64() % 2 == 0 ? Region::transmit : Region::reflect;
    const CVec psi = eve_signature(ch, theta, w.w(k), k);
    const CVec psi_p = eve_signature(ch, theta, w.w(other(k)), k);
    const double noise = cfg.noise_eve(k);

    row.closed_form = sop_closed_form(psi, psi_p, noise, row.s_k);
    const MonteCarloEstimate mc =
        sop_monte_carlo(psi, psi_p, noise, row.s_k, samples, rng.next_u64());
    row.monte_carlo = mc.value;
    row.std_error = mc.std_error;
    row.diff = std::abs(row.closed_form - row.monte_carlo);
    row.bound = 3.0 * mc.std_error + 0.005;
    row.pass = row.diff <= row.bound;
    rep.worst_margin = std::max(rep.worst_margin, row.diff - row.bound);
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

std::string sop_report_text(const SopVerifyReport& rep)
{
  std::ostringstream os;
  os << "idx  M  N_t     S_k   closed-form   monte-carlo     stderr       |diff|      bound  "
        "verdict\n";
  char buf[200];
  for (const SopVerifyRow& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%3d %2d %4d %7.4f %13.6g %13.6g %10.3g %12.4g %10.4g  %s\n",
                  r.index, r.m, r.nt, r.s_k, r.closed_form, r.monte_carlo, r.std_error, r.diff,
                  r.bound, r.pass ? "ok" : "FAIL");
    os << buf;
  }
  os << (rep.all_pass ? "all instances within 3*stderr + 0.005\n"
                      : "some instances exceeded the agreement bound\n");
  return os.str();
}

}  // namespace starsec
