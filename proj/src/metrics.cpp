#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rng.hpp"

namespace starsec {

namespace {
constexpr double kLog2e = 1.4426950408889634074;  // 1/ln(2)

double log2p1(double x) { return std::log1p(x) * kLog2e; }
}  // namespace

cxd cascade_scalar(const CVec& theta_k, const CMat& mat, const CVec& w)
{
  return theta_k.dot(mat * w);  // Eigen dot conjugates the left argument
}

double sinr_bob(const ChannelSet& ch, const StarCoefficients& theta, const BeamformerPair& w,
                Region k, const SystemConfig& cfg)
{
  const CMat& F = ch.F(k);
  const double sig = std::norm(cascade_scalar(theta.theta(k), F, w.w(k)));
  const double itf = std::norm(cascade_scalar(theta.theta(k), F, w.w(other(k))));
  return sig / (itf + cfg.noise_bob(k));
}

double sinr_eve(const ChannelSet& ch, const StarCoefficients& theta, const BeamformerPair& w,
                Region k, const SystemConfig& cfg)
{
  const CMat& V = ch.V(k);
  const double sig = std::norm(cascade_scalar(theta.theta(k), V, w.w(k)));
  const double itf = std::norm(cascade_scalar(theta.theta(k), V, w.w(other(k))));
  return sig / (itf + cfg.noise_eve(k));
}

CVec eve_signature(const ChannelSet& ch, const StarCoefficients& theta, const CVec& w_beam,
                   Region k)
{
  const double scale = std::sqrt(ch.eve_gain(k));
  return scale * (theta.theta(k).conjugate().asDiagonal() * (ch.H * w_beam));
}

double redundancy_rate(const ChannelSet& ch, const StarCoefficients& theta,
                       const BeamformerPair& w, Region k, double delta, const SystemConfig& cfg)
{
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("redundancy_rate: delta not in (0,1)");
  const double p_sig = eve_signature(ch, theta, w.w(k), k).squaredNorm();
  const double p_itf = eve_signature(ch, theta, w.w(other(k)), k).squaredNorm();
  return log2p1(p_sig * std::log(1.0 / delta) / (p_itf + cfg.noise_eve(k)));
}

double ssr(const ChannelSet& ch, const StarCoefficients& theta, const BeamformerPair& w,
           double delta, const SystemConfig& cfg)
{
  double total = 0.0;
  for (Region k : both_regions) {
    const double rate = log2p1(sinr_bob(ch, theta, w, k, cfg));
    const double sk = redundancy_rate(ch, theta, w, k, delta, cfg);
    total += std::max(0.0, rate - sk);
  }
  return total;
}

double ssr_perfect_csi(const ChannelSet& ch, const StarCoefficients& theta,
                       const BeamformerPair& w, const SystemConfig& cfg)
{
  double total = 0.0;
  for (Region k : both_regions) {
    const double rate = log2p1(sinr_bob(ch, theta, w, k, cfg));
    const double leak = log2p1(sinr_eve(ch, theta, w, k, cfg));
    total += std::max(0.0, rate - leak);
  }
  return total;
}

double sop_closed_form(const CVec& psi, const CVec& psi_prime, double noise_eve, double s_k)
{
  if (s_k < 0) throw std::invalid_argument("sop_closed_form: negative redundancy rate");
  const double p_sig = psi.squaredNorm();
  if (p_sig == 0.0) return s_k > 0.0 ? 0.0 : 1.0;
  const double tau = std::exp2(s_k) - 1.0;
  return std::exp(-(psi_prime.squaredNorm() + noise_eve) * tau / p_sig);
}

MonteCarloEstimate sop_monte_carlo(const CVec& psi, const CVec& psi_prime, double noise_eve,
                                   double s_k, std::int64_t n_samples, std::uint64_t seed)
{
  if (n_samples < 1000) throw std::invalid_argument("sop_monte_carlo: need at least 1e3 samples");
  const double threshold = (psi_prime.squaredNorm() + noise_eve) * (std::exp2(s_k) - 1.0);
  const auto m = psi.size();

  constexpr std::int64_t kBlock = 8192;
  std::int64_t hits = 0;
  std::int64_t done = 0;
  for (std::int64_t block = 0; done < n_samples; ++block) {
    Rng rng(sub_seed(seed, 0x4d43ULL, static_cast<std::uint64_t>(block)));
    const std::int64_t count = std::min(kBlock, n_samples - done);
    for (std::int64_t s = 0; s < count; ++s) {
      cxd acc(0.0, 0.0);
      for (Eigen::Index i = 0; i < m; ++i) acc += std::conj(rng.cnormal()) * psi[i];
      if (std::norm(acc) > threshold) ++hits;
    }
    done += count;
  }

  MonteCarloEstimate est;
  est.samples = n_samples;
  est.value = static_cast<double>(hits) / static_cast<double>(n_samples);
  est.std_error = std::sqrt(std::max(est.value * (1.0 - est.value), 0.0) /
                            static_cast<double>(n_samples));
  return est;
}

MonteCarloEstimate sop_monte_carlo(const ChannelSet& ch, const StarCoefficients& theta,
                                   const BeamformerPair& w, Region k, double s_k,
                                   std::int64_t n_samples, std::uint64_t seed,
                                   const SystemConfig& cfg)
{
  const CVec psi = eve_signature(ch, theta, w.w(k), k);
  const CVec psi_p = eve_signature(ch, theta, w.w(other(k)), k);
  return sop_monte_carlo(psi, psi_p, cfg.noise_eve(k), s_k, n_samples, seed);
}

double harvested_energy(const ChannelSet& ch, const StarCoefficients& theta,
                        const BeamformerPair& w, Region k, double eta)
{
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("harvested_energy: eta out of [0,1]");
  const double p_sig = eve_signature(ch, theta, w.w(k), k).squaredNorm();
  const double p_itf = eve_signature(ch, theta, w.w(other(k)), k).squaredNorm();
  return eta * (p_sig + p_itf);
}

SecrecyReport make_report(const ChannelSet& ch, const StarCoefficients& theta,
                          const BeamformerPair& w, const SystemConfig& cfg)
{
  SecrecyReport rep;
  for (Region k : both_regions) {
    rep.gamma_bob[k] = sinr_bob(ch, theta, w, k, cfg);
    rep.gamma_eve[k] = sinr_eve(ch, theta, w, k, cfg);
    rep.s_star[k] = redundancy_rate(ch, theta, w, k, cfg.sop_bound, cfg);
    rep.secrecy[k] = std::max(0.0, log2p1(rep.gamma_bob[k]) - rep.s_star[k]);
    rep.energy[k] = harvested_energy(ch, theta, w, k, cfg.eta);
    const CVec psi = eve_signature(ch, theta, w.w(k), k);
    const CVec psi_p = eve_signature(ch, theta, w.w(other(k)), k);
    rep.sop[k] = sop_closed_form(psi, psi_p, cfg.noise_eve(k), rep.s_star[k]);
  }
  rep.ssr_outage = rep.secrecy.t + rep.secrecy.r;
  rep.ssr_pcsi = ssr_perfect_csi(ch, theta, w, cfg);
  return rep;
}

std::string report_csv_header()
{
  return "gamma_b_t,gamma_b_r,gamma_e_t,gamma_e_r,s_star_t,s_star_r,secrecy_t,secrecy_r,"
         "ssr,ssr_pcsi,energy_t,energy_r,sop_t,sop_r";
}

std::string report_csv_row(const SecrecyReport& rep)
{
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                "%.17g",
                rep.gamma_bob.t, rep.gamma_bob.r, rep.gamma_eve.t, rep.gamma_eve.r, rep.s_star.t,
                rep.s_star.r, rep.secrecy.t, rep.secrecy.r, rep.ssr_outage, rep.ssr_pcsi,
                rep.energy.t, rep.energy.r, rep.sop.t, rep.sop.r);
  return buf;
}

}  // namespace starsec
