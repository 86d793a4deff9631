#include "surrogate.hpp"

#include <cmath>

namespace starsec {

namespace {
constexpr double kLog2e = 1.4426950408889634074;
}

double bound_lower_log(cxd x, double y, cxd xt, double yt)
{
  const double at2 = std::norm(xt);
  const double cross = 2.0 * (x * std::conj(xt)).real();
  return std::log1p(at2 / yt) - at2 / yt + cross / yt -
         at2 * (y + std::norm(x)) / (yt * (yt + at2));
}

double bound_upper_log(double x, double y, double xt, double yt)
{
  return std::log1p(xt / yt) + (yt / (xt + yt)) * (x / y - xt / yt);
}

SurrogateConstants surrogate_constants(const ChannelSet& ch, const StarCoefficients& theta_exp,
                                       const BeamformerPair& w_exp, Region k,
                                       const SystemConfig& cfg)
{
  SurrogateConstants c;
  c.noise_bob = cfg.noise_bob(k);
  c.noise_eve = cfg.noise_eve(k);
  c.eta = cfg.eta;
  c.log_delta_inv = std::log(1.0 / cfg.sop_bound);

  const CMat& F = ch.F(k);
  c.x_tilde = cascade_scalar(theta_exp.theta(k), F, w_exp.w(k));
  c.i_tilde = cascade_scalar(theta_exp.theta(k), F, w_exp.w(other(k)));
  c.y_tilde = std::norm(c.i_tilde) + c.noise_bob;

  c.a1 = 1.0 / c.y_tilde;
  c.a2 = c.a1 * std::norm(c.x_tilde) /
         (std::norm(c.x_tilde) + std::norm(c.i_tilde) + c.noise_bob);

  c.psi_tilde = eve_signature(ch, theta_exp, w_exp.w(k), k);
  c.psi_tilde_p = eve_signature(ch, theta_exp, w_exp.w(other(k)), k);
  c.p_tilde = c.psi_tilde.squaredNorm();
  c.p_tilde_p = c.psi_tilde_p.squaredNorm();
  c.e_tilde = c.eta * (c.p_tilde + c.p_tilde_p);

  c.a3 = c.p_tilde * c.log_delta_inv / (c.p_tilde_p + c.noise_eve);
  c.a4 = -c.p_tilde_p + c.noise_eve;
  return c;
}

double rate_lower_bound(const ChannelSet& ch, const StarCoefficients& theta,
                        const BeamformerPair& w, Region k, const SurrogateConstants& c)
{
  const CMat& F = ch.F(k);
  const cxd x = cascade_scalar(theta.theta(k), F, w.w(k));
  const double y = std::norm(cascade_scalar(theta.theta(k), F, w.w(other(k)))) + c.noise_bob;
  return kLog2e * bound_lower_log(x, y, c.x_tilde, c.y_tilde);
}

TrustRegion trust_region(const ChannelSet& ch, const StarCoefficients& theta,
                         const BeamformerPair& w, Region k, const SurrogateConstants& c)
{
  const CVec psi_p = eve_signature(ch, theta, w.w(other(k)), k);
  const double margin = 2.0 * psi_p.dot(c.psi_tilde_p).real() - c.p_tilde_p;
  return {margin > 0.0, margin};
}

double sk_upper_bound(const ChannelSet& ch, const StarCoefficients& theta,
                      const BeamformerPair& w, Region k, const SurrogateConstants& c)
{
  const TrustRegion tr = trust_region(ch, theta, w, k, c);
  if (!tr.ok) throw TrustRegionViolation(tr.margin);

  const double p_sig = eve_signature(ch, theta, w.w(k), k).squaredNorm();
  const double den = tr.margin + c.noise_eve;  // = 2 Re{psi'^H psi~'} + a4
  const double t = p_sig * c.log_delta_inv / den;
  return kLog2e * (std::log1p(c.a3) - c.a3 / (1.0 + c.a3) + t / (1.0 + c.a3));
}

double energy_upper_bound(const ChannelSet& ch, const StarCoefficients& theta,
                          const BeamformerPair& w, Region k, const SurrogateConstants& c)
{
  if (!(c.e_tilde > 0.0))
    throw std::domain_error("energy_upper_bound: zero harvested energy at the expansion point");
  const double e = c.eta * (eve_signature(ch, theta, w.w(k), k).squaredNorm() +
                            eve_signature(ch, theta, w.w(other(k)), k).squaredNorm());
  return kLog2e * (std::log1p(c.e_tilde) + (e - c.e_tilde) / (1.0 + c.e_tilde));
}

double energy_requirement(double e_tilde, double e_min)
{
  return e_tilde + (1.0 + e_tilde) * (std::log1p(e_min) - std::log1p(e_tilde));
}

PcsiEveConstants pcsi_eve_constants(const ChannelSet& ch, const StarCoefficients& theta_exp,
                                    const BeamformerPair& w_exp, Region k,
                                    const SystemConfig& cfg)
{
  PcsiEveConstants c;
  c.noise_eve = cfg.noise_eve(k);
  const CMat& V = ch.V(k);
  c.sig_tilde = cascade_scalar(theta_exp.theta(k), V, w_exp.w(k));
  c.itf_tilde = cascade_scalar(theta_exp.theta(k), V, w_exp.w(other(k)));
  c.b3 = std::norm(c.sig_tilde) / (std::norm(c.itf_tilde) + c.noise_eve);
  c.b4 = -std::norm(c.itf_tilde) + c.noise_eve;
  return c;
}

double pcsi_eve_upper_bound(const ChannelSet& ch, const StarCoefficients& theta,
                            const BeamformerPair& w, Region k, const PcsiEveConstants& c)
{
  const CMat& V = ch.V(k);
  const cxd sig = cascade_scalar(theta.theta(k), V, w.w(k));
  const cxd itf = cascade_scalar(theta.theta(k), V, w.w(other(k)));
  const double margin = 2.0 * (std::conj(itf) * c.itf_tilde).real() - std::norm(c.itf_tilde);
  if (margin <= 0.0) throw TrustRegionViolation(margin);
  const double t = std::norm(sig) / (margin + c.noise_eve);
  return kLog2e * (std::log1p(c.b3) - c.b3 / (1.0 + c.b3) + t / (1.0 + c.b3));
}

}  // namespace starsec
