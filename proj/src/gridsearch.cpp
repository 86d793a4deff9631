#include "gridsearch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace starsec {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Candidate {
  double score = -1e300;
  StarCoefficients theta;
  BeamformerPair w;
};

struct Evaluator {
  const SystemConfig& cfg;
  const ChannelSet& ch;
  EveModel mode;
  long evals = 0;

  double ssr_value(const StarCoefficients& theta, const BeamformerPair& w)
  {
    ++evals;
    return mode == EveModel::statistical ? ssr(ch, theta, w, cfg.sop_bound, cfg)
                                         : ssr_perfect_csi(ch, theta, w, cfg);
  }

  double energy_shortfall(const StarCoefficients& theta, const BeamformerPair& w)
  {
    if (cfg.e_min <= 0.0) return 0.0;
    double miss = 0.0;
    for (Region k : both_regions)
      miss += std::max(0.0, cfg.e_min - harvested_energy(ch, theta, w, k, cfg.eta));
    return miss;
  }

  bool feasible(const StarCoefficients& theta, const BeamformerPair& w)
  {
    if (w.power() > cfg.p_max * (1.0 + 1e-12)) return false;
    if (cfg.e_min <= 0.0) return true;
    for (Region k : both_regions)
      if (harvested_energy(ch, theta, w, k, cfg.eta) < cfg.e_min * (1.0 - 1e-9)) return false;
    return true;
  }

  // penalized score used during search; exact SSR on the feasible set
  double score(const StarCoefficients& theta, const BeamformerPair& w)
  {
    return ssr_value(theta, w) -
           50.0 * energy_shortfall(theta, w) / std::max(cfg.e_min, 1e-12);
  }
};

// x layout for the polish stage: [alpha_t(M) | phi_t(M) | phi_r(M) | w(4Nt)]
struct PolishVars {
  int m, nt;
  bool fix_alpha;

  int dim() const { return (fix_alpha ? 2 * m : 3 * m) + 4 * nt; }

  RVec pack(const StarCoefficients& theta, const BeamformerPair& w) const
  {
    RVec x(dim());
    int at = 0;
    if (!fix_alpha) {
      x.segment(0, m) = theta.amplitudes(Region::transmit);
      at = m;
    }
    x.segment(at, m) = theta.phases(Region::transmit);
    x.segment(at + m, m) = theta.phases(Region::reflect);
    pack_cvec(w.w_t, at + 2 * m, x);
    pack_cvec(w.w_r, at + 2 * m + 2 * nt, x);
    return x;
  }

  void unpack(const RVec& x, const RVec& alpha_fixed, StarCoefficients& theta,
              BeamformerPair& w) const
  {
    int at = 0;
    RVec alpha = alpha_fixed;
    if (!fix_alpha) {
      alpha = x.segment(0, m).cwiseMax(0.0).cwiseMin(1.0);
      at = m;
    }
    theta = StarCoefficients::from_polar(alpha, x.segment(at, m),
                                         RVec(RVec::Ones(m) - alpha), x.segment(at + m, m),
                                         theta.protocol);
    w.w_t = unpack_cvec(x, at + 2 * m, nt);
    w.w_r = unpack_cvec(x, at + 2 * m + 2 * nt, nt);
  }
};

void project_power(BeamformerPair& w, double p_max)
{
  const double p = w.power();
  if (p > p_max) {
    const double s = std::sqrt(p_max / p);
    w.w_t *= s;
    w.w_r *= s;
  }
}

Candidate polish(Evaluator& ev, Candidate cand, Protocol proto, int iters)
{
  const int m = ev.ch.elements();
  const int nt = ev.ch.antennas();
  PolishVars vars{m, nt, proto == Protocol::ms};
  const RVec alpha_fixed = cand.theta.amplitudes(Region::transmit);

  RVec x = vars.pack(cand.theta, cand.w);
  StarCoefficients theta = cand.theta;
  BeamformerPair w = cand.w;

  auto eval_at = [&](const RVec& xv) {
    StarCoefficients th = theta;
    BeamformerPair wv = w;
    vars.unpack(xv, alpha_fixed, th, wv);
    project_power(wv, ev.cfg.p_max);
    return ev.score(th, wv);
  };

  double step = 0.05;
  double best = eval_at(x);
  RVec g(x.size());
  for (int it = 0; it < iters && step > 1e-9; ++it) {
    const double h = std::max(1e-6, step * 1e-2);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      RVec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      g[i] = (eval_at(xp) - eval_at(xm)) / (2.0 * h);
    }
    const double gn = g.norm();
    if (gn < 1e-12) break;
    RVec x_new = x + (step / gn) * g;
    const double f_new = eval_at(x_new);
    if (f_new > best + 1e-14) {
      best = f_new;
      x = x_new;
      step *= 1.25;
    } else {
      step *= 0.5;
    }
  }

  vars.unpack(x, alpha_fixed, theta, w);
  project_power(w, ev.cfg.p_max);
  cand.theta = theta;
  cand.w = w;
  cand.score = ev.ssr_value(theta, w);
  return cand;
}

}  // namespace

OracleResult oracle_search(const SystemConfig& cfg, const ChannelSet& ch, Protocol proto,
                           EveModel mode, const OracleOptions& opt)
{
  const int m = ch.elements();
  const int nt = ch.antennas();
  if (m > 3 || nt > 3)
    throw std::invalid_argument("oracle_search: exhaustive reference is for tiny instances only");

  Evaluator ev{cfg, ch, mode};

  // enumerate split patterns
  std::vector<RVec> alpha_patterns;
  if (proto == Protocol::ms) {
    for (int mask = 0; mask < (1 << m); ++mask) {
      RVec a(m);
      for (int i = 0; i < m; ++i) a[i] = (mask >> i) & 1 ? 1.0 : 0.0;
      alpha_patterns.push_back(a);
    }
  } else {
    std::vector<double> levels(opt.alpha_steps);
    for (int i = 0; i < opt.alpha_steps; ++i) levels[i] = double(i) / (opt.alpha_steps - 1);
    std::vector<int> idx(m, 0);
    for (;;) {
      RVec a(m);
      for (int i = 0; i < m; ++i) a[i] = levels[idx[i]];
      alpha_patterns.push_back(a);
      int d = 0;
      while (d < m && ++idx[d] == opt.alpha_steps) idx[d++] = 0;
      if (d == m) break;
    }
  }

  std::vector<double> phases(opt.phase_steps);
  for (int i = 0; i < opt.phase_steps; ++i) phases[i] = two_pi * i / opt.phase_steps;
  std::vector<double> beam_phases(opt.beam_phase_steps);
  for (int i = 0; i < opt.beam_phase_steps; ++i) beam_phases[i] = two_pi * i / opt.beam_phase_steps;

  // beamformer direction grid (nt = 2 assumed for the dense stage; larger
  // nt falls back to axis directions plus the matched directions below)
  std::vector<CVec> beam_dirs;
  if (nt == 2) {
    for (int ia = 0; ia < opt.beam_angle_steps; ++ia) {
      const double a = 0.5 * std::numbers::pi * ia / (opt.beam_angle_steps - 1);
      for (double b : beam_phases) {
        CVec d(2);
        d << cxd(std::cos(a), 0.0), std::polar(std::sin(a), b);
        beam_dirs.push_back(d);
      }
    }
  } else {
    for (int i = 0; i < nt; ++i) {
      CVec d = CVec::Zero(nt);
      d[i] = 1.0;
      beam_dirs.push_back(d);
    }
  }

  std::vector<double> splits(opt.split_steps);
  for (int i = 0; i < opt.split_steps; ++i)
    splits[i] = 0.1 + 0.8 * double(i) / (opt.split_steps - 1);

  std::vector<Candidate> pool;
  auto consider = [&](Candidate c) {
    pool.push_back(std::move(c));
    std::push_heap(pool.begin(), pool.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    if (static_cast<int>(pool.size()) > opt.polish_starts) {
      std::pop_heap(pool.begin(), pool.end(),
                    [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
      pool.pop_back();
    }
  };

  // coarse joint grid; per-region phase gauge fixed on element 0
  for (const RVec& alpha : alpha_patterns) {
    for (double ph_t : (m > 1 ? phases : std::vector<double>{0.0})) {
      for (double ph_r : (m > 1 ? phases : std::vector<double>{0.0})) {
        RVec phite = RVec::Zero(m), phire = RVec::Zero(m);
        if (m > 1) {
          phite[1] = ph_t;
          phire[1] = ph_r;
        }
        const StarCoefficients theta = StarCoefficients::from_polar(
            alpha, phite, RVec(RVec::Ones(m) - alpha), phire,
            proto);
        for (const CVec& dt : beam_dirs) {
          for (const CVec& dr : beam_dirs) {
            for (double rho : splits) {
              BeamformerPair w(std::sqrt(cfg.p_max * rho) * dt,
                               std::sqrt(cfg.p_max * (1.0 - rho)) * dr);
              Candidate c;
              c.score = ev.score(theta, w);
              c.theta = theta;
              c.w = w;
              consider(std::move(c));
            }
          }
        }
      }
    }
  }

  OracleResult out;
  Candidate best;
  for (Candidate& c : pool) {
    Candidate p = polish(ev, std::move(c), proto, opt.polish_iters);
    const bool ok = ev.feasible(p.theta, p.w);
    if (ok && (!out.feasible || p.score > best.score)) {
      best = p;
      out.feasible = true;
    }
    if (!out.feasible && p.score > best.score) best = p;
  }

  out.best_ssr = ev.ssr_value(best.theta, best.w);
  out.theta = std::move(best.theta);
  out.w = std::move(best.w);
  out.evaluations = ev.evals;
  return out;
}

}  // namespace starsec
