#include "optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "rng.hpp"
#include "subsolver.hpp"

namespace starsec {

namespace {

constexpr double kLog2e = 1.4426950408889634074;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double true_metric(const ChannelSet& ch, const StarCoefficients& theta, const BeamformerPair& w,
                   const SystemConfig& cfg, EveModel mode)
{
  return mode == EveModel::statistical ? ssr(ch, theta, w, cfg.sop_bound, cfg)
                                       : ssr_perfect_csi(ch, theta, w, cfg);
}

/// Largest residual across the true (non-surrogate) output constraints.
double constraint_residual(const ChannelSet& ch, const StarCoefficients& theta,
                           const BeamformerPair& w, const SystemConfig& cfg, Protocol proto)
{
  double res = std::max(0.0, w.power() - cfg.p_max);
  res = std::max(res, theta.energy_conservation_residual());
  for (Region k : both_regions)
    res = std::max(res, cfg.e_min - harvested_energy(ch, theta, w, k, cfg.eta));
  if (proto == Protocol::ms) res = std::max(res, theta.binarity_residual());
  return res;
}

/// Surrogate SSR at the expansion point must reproduce the true metric;
/// SCA tightness is the engine's core correctness property, so it is
/// audited every expansion.
void audit_tightness(const ChannelSet& ch, const StarCoefficients& theta,
                     const BeamformerPair& w, const SystemConfig& cfg,
                     const PerRegion<SurrogateConstants>& consts, EveModel mode,
                     const PerRegion<PcsiEveConstants>* pcsi)
{
  double surr = 0.0;
  for (Region k : both_regions) {
    const double rate = rate_lower_bound(ch, theta, w, k, consts[k]);
    double leak;
    if (mode == EveModel::statistical) {
      if (consts[k].p_tilde_p <= 1e-300) return;  // degenerate: no interference power
      leak = sk_upper_bound(ch, theta, w, k, consts[k]);
    } else {
      if (std::norm((*pcsi)[k].itf_tilde) <= 1e-300) return;  // degenerate wiretap link
      leak = pcsi_eve_upper_bound(ch, theta, w, k, (*pcsi)[k]);
    }
    surr += std::max(0.0, rate - leak);
  }
  const double truth = true_metric(ch, theta, w, cfg, mode);
  if (std::abs(surr - truth) > 1e-6 * (1.0 + std::abs(truth)))
    throw std::logic_error("surrogate/true SSR mismatch at expansion point");
}

RVec ms_random_partition(int m, std::uint64_t seed)
{
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(sub_seed(seed, 0x6d735fULL));
  for (int i = m - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  RVec kt = RVec::Zero(m);
  for (int i = 0; i < m / 2; ++i) kt[order[i]] = 1.0;
  return kt;
}

CVec principal_eigvec(const CMat& a)
{
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  return es.eigenvectors().col(a.rows() - 1);
}

StarCoefficients align_phases(const ChannelSet& ch, const RVec& alpha_t,
                              const BeamformerPair& w, Protocol proto)
{
  const int m = ch.elements();
  RVec phase_t(m), phase_r(m);
  for (Region k : both_regions) {
    const CVec fw = ch.F(k) * w.w(k);
    RVec& ph = k == Region::transmit ? phase_t : phase_r;
    for (int i = 0; i < m; ++i) ph[i] = std::arg(fw[i]);
  }
  return StarCoefficients::from_polar(alpha_t, phase_t, RVec(RVec::Ones(m) - alpha_t), phase_r,
                                      proto);
}

BeamformerPair matched_beams(const ChannelSet& ch, const StarCoefficients& theta, double p_max)
{
  BeamformerPair w;
  for (Region k : both_regions) {
    CVec dir = ch.F(k).adjoint() * theta.theta(k);
    const double nrm = dir.norm();
    if (nrm < 1e-300) dir = CVec::Ones(ch.antennas());
    w.w(k) = std::sqrt(p_max / 2.0) * dir / dir.norm();
  }
  return w;
}

}  // namespace

const char* run_status_name(RunStatus s)
{
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iters: return "max-iters";
    case RunStatus::infeasible: return "infeasible";
  }
  return "?";
}

std::string IterationTrace::to_csv() const
{
  std::ostringstream os;
  os << "iteration,ssr,penalized_objective,lambda,kappa,slack_sum,max_residual,elapsed_ms\n";
  char buf[256];
  for (const TraceRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.3f\n", r.iter, r.ssr,
                  r.penalized_objective, r.lambda, r.kappa, r.slack_sum, r.max_residual,
                  r.elapsed_ms);
    os << buf;
  }
  return os.str();
}

double penalty_step(double current, double beta, double cap)
{
  return std::min(beta * current, cap);
}

RVec update_q(const RVec& kappa)
{
  RVec q(kappa.size());
  for (Eigen::Index i = 0; i < kappa.size(); ++i) {
    const double k = kappa[i];
    q[i] = (k + k * k) / (1.0 + k * k);
  }
  return q;
}

Initialization initialize(const SystemConfig& cfg, const ChannelSet& ch, std::uint64_t seed,
                          const RunOptions& opt, const RVec* split_override)
{
  Initialization out;
  const int m = ch.elements();

  RVec alpha_t;
  if (split_override) {
    alpha_t = *split_override;
  } else if (opt.frozen_kappa_t) {
    alpha_t = *opt.frozen_kappa_t;
  } else if (opt.protocol == Protocol::ms) {
    alpha_t = ms_random_partition(m, seed);
  } else {
    alpha_t = RVec::Constant(m, 0.5);
  }

  // Two passes of matched beams <-> aligned phases.
  StarCoefficients theta = align_phases(ch, alpha_t, matched_beams(ch, StarCoefficients::from_polar(
                                            alpha_t, RVec::Zero(m), RVec(RVec::Ones(m) - alpha_t),
                                            RVec::Zero(m), opt.protocol), cfg.p_max),
                                        opt.protocol);
  BeamformerPair w = matched_beams(ch, theta, cfg.p_max);
  theta = align_phases(ch, alpha_t, w, opt.protocol);
  w = matched_beams(ch, theta, cfg.p_max);

  auto energies = [&](const BeamformerPair& wc) {
    PerRegion<double> e;
    for (Region k : both_regions) e[k] = harvested_energy(ch, theta, wc, k, cfg.eta);
    return e;
  };

  const double target = cfg.e_min * (1.0 + 1e-9);
  out.achieved_energy = energies(w);
  if (cfg.e_min <= 0.0 ||
      (out.achieved_energy.t >= target && out.achieved_energy.r >= target)) {
    out.feasible = true;
    out.theta = std::move(theta);
    out.w = std::move(w);
    return out;
  }

  // Steer toward the Eve channels until the demand is met or the mix is
  // fully energy-directed.
  PerRegion<CVec> steer;
  for (Region k : both_regions) {
    const CMat g = std::sqrt(ch.eve_gain(k)) * ch.H;
    const CMat a = g.adjoint() * theta.amplitudes(k).asDiagonal() * g;
    steer[k] = principal_eigvec(a);
  }
  const BeamformerPair w_matched = w;
  BeamformerPair best_w = w;
  double best_short = -1e300;

  for (int step = 1; step <= 20; ++step) {
    const double tau = step / 20.0;
    BeamformerPair wc;
    PerRegion<double> e_cur = energies(best_w);
    const Region needy = e_cur.t / std::max(cfg.e_min, 1e-300) <
                                 e_cur.r / std::max(cfg.e_min, 1e-300)
                             ? Region::transmit
                             : Region::reflect;
    for (Region k : both_regions) {
      CVec mix = std::sqrt(1.0 - tau) * w_matched.w(k).normalized() +
                 std::sqrt(tau) * steer[needy];
      wc.w(k) = std::sqrt(cfg.p_max / 2.0) * mix / mix.norm();
    }
    const PerRegion<double> e = energies(wc);
    const double shortfall = std::min(e.t, e.r);
    if (shortfall > best_short) {
      best_short = shortfall;
      best_w = wc;
    }
    if (e.t >= target && e.r >= target) {
      out.feasible = true;
      out.theta = std::move(theta);
      out.w = std::move(wc);
      out.achieved_energy = e;
      return out;
    }
  }

  out.achieved_energy = energies(best_w);
  for (Region k : both_regions) {
    const CMat a = ch.eve_gain(k) * (ch.H.adjoint() * ch.H);
    Eigen::SelfAdjointEigenSolver<CMat> es(a);
    out.max_attainable[k] = cfg.eta * es.eigenvalues()(a.rows() - 1) * cfg.p_max;
  }
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "energy demand %.4g unattainable at initialization (achieved %.4g / %.4g, "
                "upper bounds %.4g / %.4g)",
                cfg.e_min, out.achieved_energy.t, out.achieved_energy.r, out.max_attainable.t,
                out.max_attainable.r);
  out.message = buf;
  out.feasible = false;
  out.theta = std::move(theta);
  out.w = std::move(best_w);
  return out;
}

namespace {

/// Largest-gap thresholding of the transmit-side splits; ties the rounded
/// pattern to the pairing constraint by construction.
RVec round_partition(const RVec& alpha_t)
{
  const int m = static_cast<int>(alpha_t.size());
  RVec sorted = alpha_t;
  std::sort(sorted.data(), sorted.data() + m);
  double threshold = 0.5;
  double widest = -1.0;
  for (int i = 0; i + 1 < m; ++i) {
    const double gap = sorted[i + 1] - sorted[i];
    if (gap > widest) {
      widest = gap;
      threshold = 0.5 * (sorted[i] + sorted[i + 1]);
    }
  }
  if (widest <= 0.0) threshold = 0.5;
  RVec out(m);
  for (int i = 0; i < m; ++i) out[i] = alpha_t[i] >= threshold ? 1.0 : 0.0;
  return out;
}

StarCoefficients snap_amplitudes(const StarCoefficients& theta, const RVec& alpha_t)
{
  const int m = theta.elements();
  CVec t(m), r(m);
  for (int i = 0; i < m; ++i) {
    const double pt = std::abs(theta.theta_t[i]) > 1e-300 ? std::arg(theta.theta_t[i]) : 0.0;
    const double pr = std::abs(theta.theta_r[i]) > 1e-300 ? std::arg(theta.theta_r[i]) : 0.0;
    t[i] = std::polar(std::sqrt(alpha_t[i]), pt);
    r[i] = std::polar(std::sqrt(1.0 - alpha_t[i]), pr);
  }
  return {std::move(t), std::move(r), theta.protocol};
}

StarCoefficients renormalize(const StarCoefficients& theta)
{
  const int m = theta.elements();
  CVec t = theta.theta_t, r = theta.theta_r;
  for (int i = 0; i < m; ++i) {
    const double s = std::norm(t[i]) + std::norm(r[i]);
    if (s > 1e-12) {
      const double inv = 1.0 / std::sqrt(s);
      t[i] *= inv;
      r[i] *= inv;
    } else {
      t[i] = r[i] = cxd(std::sqrt(0.5), 0.0);
    }
  }
  return {std::move(t), std::move(r), theta.protocol};
}

/// Every accepted iterate is pulled back onto the exact TaRC set. The
/// printed penalty schedule decays, so late iterations are weakly
/// penalized and the relaxed moduli would otherwise drift off the
/// energy-conservation manifold, inflating the apparent rate.
StarCoefficients project_iterate(const StarCoefficients& theta, const RunOptions& opt)
{
  if (opt.frozen_kappa_t) return snap_amplitudes(theta, *opt.frozen_kappa_t);
  return renormalize(theta);
}

struct AoEngine {
  const SystemConfig& cfg_user;
  const ChannelSet& ch;
  const RunOptions& opt;

  RunResult run(const std::optional<Initialization>& init_opt)
  {
    if (init_opt) return run_from(*init_opt);

    // Multistart over a handful of split candidates: the penalized convex
    // steps cannot move an element off a zero-amplitude expansion point,
    // so the partition (and to a lesser degree the even split) is largely
    // decided by the start. Candidates cost one AO pass each.
    std::vector<std::optional<RVec>> splits;
    splits.emplace_back(std::nullopt);  // protocol default
    const int m = ch.elements();
    if (!opt.frozen_kappa_t) {
      RVec matched(m);
      for (int i = 0; i < m; ++i)
        matched[i] = std::norm(ch.h_t[i]) >= std::norm(ch.h_r[i]) ? 1.0 : 0.0;
      if (opt.protocol == Protocol::ms) {
        RVec balanced = ms_random_partition(m, ch.seed);
        splits.emplace_back(RVec(RVec::Ones(m) - balanced));
        splits.emplace_back(matched);
        if (m <= 4) {
          splits.emplace_back(RVec(RVec::Ones(m)));
          splits.emplace_back(RVec(RVec::Zero(m)));
        }
      } else {
        RVec proportional(m);
        for (int i = 0; i < m; ++i) {
          const double t = std::norm(ch.h_t[i]);
          const double r = std::norm(ch.h_r[i]);
          proportional[i] = t + r > 1e-300 ? t / (t + r) : 0.5;
        }
        splits.emplace_back(std::move(proportional));
        if (m <= 4) {
          // single-region corners matter on small surfaces: the surrogate
          // drops the positive-part clip, which hides them from the search
          splits.emplace_back(RVec(RVec::Ones(m)));
          splits.emplace_back(RVec(RVec::Zero(m)));
        }
      }
    }

    RunResult best;
    bool have = false;
    auto rank = [&](const RunResult& r) {
      const double metric = opt.eve_model == EveModel::statistical ? r.report.ssr_outage
                                                                   : r.report.ssr_pcsi;
      return std::make_pair(r.status != RunStatus::infeasible, metric);
    };
    auto consider = [&](RunResult cand) {
      if (!have || rank(cand) > rank(best)) {
        best = std::move(cand);
        have = true;
      }
    };
    auto run_candidate = [&](const RunOptions& ropt, const RVec* split) {
      const Initialization init = initialize(cfg_user, ch, ch.seed, ropt, split);
      if (!init.feasible) {
        RunResult cand;
        cand.status = RunStatus::infeasible;
        cand.message = init.message;
        cand.max_attainable = init.max_attainable;
        cand.theta = init.theta;
        cand.w = init.w;
        cand.used_sop = ropt.eve_model == EveModel::statistical;
        cand.report = make_report(ch, cand.theta, cand.w, cfg_user);
        consider(std::move(cand));
        return;
      }
      AoEngine engine{cfg_user, ch, ropt};
      consider(engine.run_from(init));
    };

    for (const auto& split : splits) {
      run_candidate(opt, split ? &*split : nullptr);
      // Small surfaces also try the split as a frozen pattern: the iterate
      // cannot drift off a good partition while phases and beams settle.
      if (opt.protocol == Protocol::ms && !opt.frozen_kappa_t && split && m <= 8) {
        bool binary = true;
        for (int i = 0; i < m; ++i)
          if ((*split)[i] != 0.0 && (*split)[i] != 1.0) binary = false;
        if (binary) {
          RunOptions frozen = opt;
          frozen.frozen_kappa_t = *split;
          run_candidate(frozen, &*split);
        }
      }
    }
    if (opt.protocol == Protocol::ms && !opt.frozen_kappa_t && m <= 8) {
      const RVec balanced = ms_random_partition(m, ch.seed);
      RunOptions frozen = opt;
      frozen.frozen_kappa_t = balanced;
      run_candidate(frozen, &balanced);
    }
    return best;
  }

  RunResult run_from(const Initialization& init0)
  {
    RunResult res;
    res.used_sop = opt.eve_model == EveModel::statistical;

    SystemConfig cfg = cfg_user;  // e_min may be inflated by repair rounds
    const RVec repair_split = init0.theta.amplitudes(Region::transmit);

    for (int repair = 0; repair <= 3; ++repair) {
      Initialization init =
          repair == 0 ? init0 : initialize(cfg, ch, ch.seed, opt, &repair_split);
      if (!init.feasible) {
        res.status = RunStatus::infeasible;
        res.message = init.message;
        res.max_attainable = init.max_attainable;
        res.theta = init.theta;
        res.w = init.w;
        res.report = make_report(ch, res.theta, res.w, cfg_user);
        return res;
      }

      const bool converged = ao_loop(cfg, init, res);
      finalize_solution(cfg, res);

      // Post-hoc check of the true (non-surrogate) energy demand against
      // the user's e_min; the convexified restriction is a relaxation, so
      // shortfalls are possible and repaired by inflating the demand.
      double worst_ratio = 1.0;
      for (Region k : both_regions) {
        const double e = harvested_energy(ch, res.theta, res.w, k, cfg_user.eta);
        if (cfg_user.e_min > 0.0)
          worst_ratio = std::max(worst_ratio, cfg_user.e_min / std::max(e, 1e-300));
      }
      if (worst_ratio <= 1.0 + 1e-3) {
        res.status = converged ? RunStatus::converged : RunStatus::max_iters;
        res.report = make_report(ch, res.theta, res.w, cfg_user);
        return res;
      }
      cfg.e_min *= std::min(worst_ratio * 1.02, 1.5);
      res.message = "energy repair round " + std::to_string(repair + 1);
    }

    res.status = RunStatus::infeasible;
    res.message = "energy demand unmet after repair rounds";
    res.report = make_report(ch, res.theta, res.w, cfg_user);
    for (Region k : both_regions)
      res.max_attainable[k] = harvested_energy(ch, res.theta, res.w, k, cfg_user.eta);
    return res;
  }

  /// One full alternating-optimization pass. Returns true on |dSSR| < eps.
  bool ao_loop(const SystemConfig& cfg, const Initialization& init, RunResult& res)
  {
    const auto t0 = Clock::now();
    StarCoefficients theta_exp = init.theta;
    BeamformerPair w_exp = init.w;

    double lambda = cfg.pccp.lambda_init;
    double kappa_pen = cfg.pccp.kappa_init;

    MsPenalty ms;
    const bool use_ms = opt.protocol == Protocol::ms && !opt.frozen_kappa_t;
    if (use_ms) {
      ms.q[Region::transmit] = theta_exp.amplitudes(Region::transmit);
      ms.q[Region::reflect] = theta_exp.amplitudes(Region::reflect);
    }

    double ssr_prev = true_metric(ch, theta_exp, w_exp, cfg_user, opt.eve_model);
    res.theta = theta_exp;
    res.w = w_exp;
    double ssr_best = ssr_prev;

    SolverOptions sopt;
    sopt.tol = cfg.solver_tol;
    SolverWarmStart warm_p2, warm_p1;

    res.trace.rows.clear();
    bool converged = false;
    int p1_failures = 0;

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
      PerRegion<SurrogateConstants> consts;
      PerRegion<PcsiEveConstants> pcsi;
      for (Region k : both_regions) {
        consts[k] = surrogate_constants(ch, theta_exp, w_exp, k, cfg);
        if (opt.eve_model == EveModel::instantaneous)
          pcsi[k] = pcsi_eve_constants(ch, theta_exp, w_exp, k, cfg);
      }
      audit_tightness(ch, theta_exp, w_exp, cfg, consts, opt.eve_model,
                      opt.eve_model == EveModel::instantaneous ? &pcsi : nullptr);

      BuildContext bc{ch, cfg, theta_exp, w_exp, consts, opt.eve_model,
                      opt.eve_model == EveModel::instantaneous ? &pcsi : nullptr};

      // TaRC update
      BuiltP2 p2 = build_p2(bc, lambda, use_ms ? &ms : nullptr,
                            opt.frozen_kappa_t ? &*opt.frozen_kappa_t : nullptr);
      const double p2_start_obj = p2.prob.objective(p2.start);
      const bool p2_start_feasible = p2.prob.max_violation(p2.start) <= 1e-8;
      SubproblemSolution sol2 = solve(p2.prob, p2.start, sopt, &warm_p2);
      if (p2_start_feasible &&
          sol2.objective > p2_start_obj + 1e-8 * (1.0 + std::abs(p2_start_obj)))
        throw std::logic_error("TaRC subproblem increased the penalized objective");
      StarCoefficients theta_new = p2.unpack_theta(sol2.z, theta_exp.protocol);
      theta_new.protocol = opt.protocol == Protocol::ms ? Protocol::ms : Protocol::es;
      // With the decayed penalty the relaxed moduli can run away from the
      // TaRC manifold; such steps carry no usable iterate, so they are
      // rejected outright and the slack penalty is restored.
      const double drift = opt.frozen_kappa_t ? p2.slack_sum(sol2.z)
                                              : theta_new.energy_conservation_residual();
      if (drift > 1e-2) {
        lambda = std::max(penalty_step(lambda, cfg.pccp.beta, cfg.pccp.lambda_max),
                          cfg.pccp.lambda_init);
        TraceRow row;
        row.iter = iter;
        row.ssr = ssr_prev;
        row.penalized_objective = sol2.objective;
        row.lambda = lambda;
        row.kappa = use_ms ? kappa_pen : 0.0;
        row.slack_sum = p2.slack_sum(sol2.z);
        row.max_residual = constraint_residual(ch, theta_exp, w_exp, cfg_user, opt.protocol);
        row.elapsed_ms = opt.collect_timing ? ms_since(t0) : 0.0;
        res.trace.rows.push_back(row);
        res.iterations = iter;
        continue;
      }
      theta_new = project_iterate(theta_new, opt);

      // Beamformer update around the refreshed expansion point (theta_new,
      // w_exp); the refreshed constants keep the rate bound tight after the
      // TaRC move and guarantee a valid linearized denominator.
      BeamformerPair w_new;
      SubproblemSolution sol1;
      {
        PerRegion<SurrogateConstants> consts2;
        PerRegion<PcsiEveConstants> pcsi2;
        for (Region k : both_regions) {
          consts2[k] = surrogate_constants(ch, theta_new, w_exp, k, cfg);
          if (opt.eve_model == EveModel::instantaneous)
            pcsi2[k] = pcsi_eve_constants(ch, theta_new, w_exp, k, cfg);
        }
        BuildContext bc2{ch, cfg, theta_new, w_exp, consts2, opt.eve_model,
                         opt.eve_model == EveModel::instantaneous ? &pcsi2 : nullptr};
        BuiltP1 p1 = build_p1(bc2, theta_new);
        const double p1_start_obj = p1.prob.objective(p1.start);
        const bool p1_start_feasible = p1.prob.max_violation(p1.start) <= 1e-8;
        sol1 = solve(p1.prob, p1.start, sopt, &warm_p1);
        if (sol1.status == SolveStatus::infeasible) {
          w_new = w_exp;
          ++p1_failures;
        } else {
          if (p1_start_feasible &&
              sol1.objective > p1_start_obj + 1e-8 * (1.0 + std::abs(p1_start_obj)))
            throw std::logic_error("beamformer subproblem increased the objective");
          w_new = p1.unpack(sol1.z);
          p1_failures = 0;
        }
      }

      const double ssr_new = true_metric(ch, theta_new, w_new, cfg_user, opt.eve_model);
      bool rejected = false;
      if (ssr_new < ssr_prev - 10.0 * cfg.tolerance) {
        // transient penalized-step degradation: retain the expansion point
        // and restore the slack penalty
        rejected = true;
        lambda = std::max(lambda, cfg.pccp.lambda_init);
      } else {
        theta_exp = theta_new;
        w_exp = w_new;
        if (use_ms) {
          ms.q[Region::transmit] = update_q(p2.unpack_kappa(sol2.z, Region::transmit));
          ms.q[Region::reflect] = update_q(p2.unpack_kappa(sol2.z, Region::reflect));
        }
        if (ssr_new > ssr_best) {
          ssr_best = ssr_new;
          res.theta = theta_exp;
          res.w = w_exp;
        }
      }
      const double ssr_iter = rejected ? ssr_prev : ssr_new;

      lambda = penalty_step(lambda, cfg.pccp.beta, cfg.pccp.lambda_max);
      if (use_ms) kappa_pen = penalty_step(kappa_pen, cfg.pccp.beta, cfg.pccp.kappa_max);
      ms.weight = kappa_pen;

      TraceRow row;
      row.iter = iter;
      row.ssr = ssr_iter;
      row.penalized_objective = sol2.objective;
      row.lambda = lambda;
      row.kappa = use_ms ? kappa_pen : 0.0;
      row.slack_sum = p2.slack_sum(sol2.z);
      row.max_residual = constraint_residual(ch, theta_exp, w_exp, cfg_user, opt.protocol);
      row.elapsed_ms = opt.collect_timing ? ms_since(t0) : 0.0;
      res.trace.rows.push_back(row);
      res.iterations = iter;

      if (!rejected && std::abs(ssr_new - ssr_prev) < cfg.tolerance) {
        converged = true;
        break;
      }
      if (!rejected) ssr_prev = ssr_new;
      if (p1_failures >= 3) break;
    }
    return converged;
  }

  /// Enforce the exact TaRC feasible set on the best iterate, then give the
  /// beamformers one final update at the corrected point.
  void finalize_solution(const SystemConfig& cfg, RunResult& res)
  {
    StarCoefficients theta = res.theta;
    if (opt.frozen_kappa_t) {
      theta = snap_amplitudes(theta, *opt.frozen_kappa_t);
    } else if (opt.protocol == Protocol::ms) {
      theta = snap_amplitudes(theta, round_partition(theta.amplitudes(Region::transmit)));
    } else if (theta.energy_conservation_residual() > 1e-12) {
      theta = renormalize(theta);
    }

    PerRegion<SurrogateConstants> consts;
    PerRegion<PcsiEveConstants> pcsi;
    for (Region k : both_regions) {
      consts[k] = surrogate_constants(ch, theta, res.w, k, cfg);
      if (opt.eve_model == EveModel::instantaneous)
        pcsi[k] = pcsi_eve_constants(ch, theta, res.w, k, cfg);
    }
    BuildContext bc{ch, cfg, theta, res.w, consts, opt.eve_model,
                    opt.eve_model == EveModel::instantaneous ? &pcsi : nullptr};
    try {
      BuiltP1 p1 = build_p1(bc, theta);
      SolverOptions sopt;
      sopt.tol = cfg.solver_tol;
      SubproblemSolution sol = solve(p1.prob, p1.start, sopt);
      if (sol.status != SolveStatus::infeasible) {
        const BeamformerPair w_new = p1.unpack(sol.z);
        const double before = true_metric(ch, theta, res.w, cfg_user, opt.eve_model);
        const double after = true_metric(ch, theta, w_new, cfg_user, opt.eve_model);
        if (after >= before - 10.0 * cfg.tolerance) res.w = w_new;
      }
    } catch (const TrustRegionViolation&) {
      // keep the incumbent beamformers
    }
    res.theta = std::move(theta);
  }
};

}  // namespace

RunResult run_ao(const SystemConfig& cfg, const ChannelSet& ch, const RunOptions& opt,
                 const std::optional<Initialization>& init)
{
  AoEngine engine{cfg, ch, opt};
  return engine.run(init);
}

RunResult run_es(const SystemConfig& cfg, const ChannelSet& ch,
                 const std::optional<Initialization>& init)
{
  RunOptions opt;
  opt.protocol = Protocol::es;
  return run_ao(cfg, ch, opt, init);
}

RunResult run_ms(const SystemConfig& cfg, const ChannelSet& ch,
                 const std::optional<Initialization>& init)
{
  RunOptions opt;
  opt.protocol = Protocol::ms;
  return run_ao(cfg, ch, opt, init);
}

}  // namespace starsec
