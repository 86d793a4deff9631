#include <doctest.h>

#include <cmath>
#include <numbers>

#include "instances.hpp"
#include "subsolver.hpp"

using namespace starsec;
using namespace starsec::testing;

namespace {

// Hand expansion of the minimization objective: for each region
//   -2 a1 Re{(th^H F w_k)* x~} + a2 (|th^H F w_k|^2 + |th^H F w_k'|^2)
//   + [ln(1/delta)/(1+a3)] |Psi_k|^2 / (2 Re{Psi_k'^H Psi~'} + a4)
// written straight from the definitions, independent of the coefficient
// packing in the builder.
double hand_objective(const SmallInstance& inst, const PerRegion<SurrogateConstants>& consts,
                      const StarCoefficients& theta_cur, const BeamformerPair& w)
{
  double acc = 0.0;
  for (Region k : both_regions) {
    const SurrogateConstants& c = consts[k];
    const cxd xk = theta_cur.theta(k).dot(inst.ch.F(k) * w.w(k));
    const cxd ik = theta_cur.theta(k).dot(inst.ch.F(k) * w.w(other(k)));
    acc += -2.0 * c.a1 * (std::conj(xk) * c.x_tilde).real();
    acc += c.a2 * (std::norm(xk) + std::norm(ik));
    const CVec psi = eve_signature(inst.ch, theta_cur, w.w(k), k);
    const CVec psi_p = eve_signature(inst.ch, theta_cur, w.w(other(k)), k);
    const double den = 2.0 * psi_p.dot(c.psi_tilde_p).real() + c.a4;
    acc += (c.log_delta_inv / (1.0 + c.a3)) * psi.squaredNorm() / den;
  }
  return acc;
}

}  // namespace

TEST_CASE("P1 objective equals the hand-expanded surrogate sum")
{
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    BuiltInstancePair bip = built_context(seed);
    const SmallInstance& inst = bip.inst;
    const BuildContext bc{inst.ch, inst.cfg, inst.theta, inst.w, bip.consts,
                          EveModel::statistical, nullptr};

    // theta_cur both at and away from the expansion TaRCs
    Rng rng(seed * 31 + 1);
    for (const StarCoefficients& theta_cur :
         {inst.theta, perturb(inst.theta, rng, 0.05)}) {
      const BuiltP1 p1 = build_p1(bc, theta_cur);
      const double expected =
          hand_objective(inst, bip.consts, theta_cur, inst.w) + 1e-10 * p1.start.squaredNorm();
      CHECK(p1.prob.objective(p1.start) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("P1 with a2 = 0 and vanishing outage weight is purely linear")
{
  BuiltInstancePair bip = built_context(7);
  bip.inst.cfg.sop_bound = 1.0 - 1e-15;  // ln(1/delta) ~ 0, test-only limit
  bip.inst.cfg.e_min = 0.0;
  bip.inst.w.w_t.setZero();  // a2 = 0 in both regions
  bip.inst.w.w_r.setZero();
  for (Region k : both_regions)
    bip.consts[k] = surrogate_constants(bip.inst.ch, bip.inst.theta, bip.inst.w, k, bip.inst.cfg);
  const BuildContext bc{bip.inst.ch, bip.inst.cfg, bip.inst.theta, bip.inst.w, bip.consts,
                        EveModel::statistical, nullptr};
  const BuiltP1 p1 = build_p1(bc, bip.inst.theta);

  // gradient of a linear function is constant (up to the 1e-10 tie-break)
  Rng rng(8);
  RVec z1(p1.prob.n), z2(p1.prob.n), g1(p1.prob.n), g2(p1.prob.n);
  for (int i = 0; i < p1.prob.n; ++i) {
    z1[i] = rng.normal();
    z2[i] = rng.normal();
  }
  p1.prob.gradient(z1, g1);
  p1.prob.gradient(z2, g2);
  CHECK((g1 - g2).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("doubling the power budget cannot worsen P1")
{
  BuiltInstancePair bip = built_context(9);
  const BuildContext bc{bip.inst.ch, bip.inst.cfg, bip.inst.theta, bip.inst.w, bip.consts,
                        EveModel::statistical, nullptr};
  const BuiltP1 p1 = build_p1(bc, bip.inst.theta);
  const double f1 = solve(p1.prob, p1.start).objective;

  SystemConfig cfg2 = bip.inst.cfg;
  cfg2.p_max *= 2.0;
  const BuildContext bc2{bip.inst.ch, cfg2, bip.inst.theta, bip.inst.w, bip.consts,
                         EveModel::statistical, nullptr};
  const BuiltP1 p1_wide = build_p1(bc2, bip.inst.theta);
  const double f2 = solve(p1_wide.prob, p1_wide.start).objective;
  CHECK(f2 <= f1 + 1e-7);
}

TEST_CASE("P2 start is feasible with zero slack at the expansion point")
{
  const BuiltInstancePair bip = built_context(11);
  const BuildContext bc{bip.inst.ch, bip.inst.cfg, bip.inst.theta, bip.inst.w, bip.consts,
                        EveModel::statistical, nullptr};
  const BuiltP2 p2 = build_p2(bc, 20.0);
  CHECK(p2.prob.max_violation(p2.start) <= 1e-12);
  CHECK(p2.slack_sum(p2.start) <= 1e-12);
}

TEST_CASE("large slack penalties drive the slacks out")
{
  const BuiltInstancePair bip = built_context(13);
  const BuildContext bc{bip.inst.ch, bip.inst.cfg, bip.inst.theta, bip.inst.w, bip.consts,
                        EveModel::statistical, nullptr};
  double prev = 1e300;
  for (double lambda : {1.0, 10.0, 1000.0}) {
    const BuiltP2 p2 = build_p2(bc, lambda);
    const SubproblemSolution sol = solve(p2.prob, p2.start);
    const double slack = p2.slack_sum(sol.z);
    CHECK(slack <= prev + 1e-9);
    prev = slack;
    if (lambda == 1000.0) CHECK(slack <= 1e-6);
  }
}

TEST_CASE("single-element P2 matches an exhaustive grid")
{
  BuiltInstancePair bip = built_context(17, /*m=*/1, /*nt=*/2);
  bip.inst.cfg.e_min = 0.0;  // keeps the two regions separable for the grid
  for (Region k : both_regions)
    bip.consts[k] = surrogate_constants(bip.inst.ch, bip.inst.theta, bip.inst.w, k, bip.inst.cfg);
  const BuildContext bc{bip.inst.ch, bip.inst.cfg, bip.inst.theta, bip.inst.w, bip.consts,
                        EveModel::statistical, nullptr};
  const double lambda = 10.0;
  const BuiltP2 p2 = build_p2(bc, lambda);
  const SubproblemSolution sol = solve(p2.prob, p2.start);

  // exhaustive scan over (kappa, theta_t, theta_r) with minimal feasible
  // slacks filled in, refined twice around the incumbent; the expansion
  // point seeds the search
  const auto& L = p2.layout;
  auto eval_point = [&](double kt, cxd t1, cxd t2) {
    RVec z = RVec::Zero(p2.prob.n);
    z[L.theta_off(Region::transmit)] = t1.real();
    z[L.theta_off(Region::transmit) + 1] = t1.imag();
    z[L.theta_off(Region::reflect)] = t2.real();
    z[L.theta_off(Region::reflect) + 1] = t2.imag();
    z[L.kappa_off(Region::transmit)] = kt;
    z[L.kappa_off(Region::reflect)] = 1.0 - kt;
    for (Region k : both_regions) {
      const cxd th = k == Region::transmit ? t1 : t2;
      const double kap = k == Region::transmit ? kt : 1.0 - kt;
      const cxd th_exp = bip.inst.theta.theta(k)[0];
      z[L.sigma_off(k)] = std::max(0.0, std::norm(th) - kap);
      z[L.sigma_off(k) + 1] =
          std::max(0.0, kap - 2.0 * (std::conj(th) * th_exp).real() + std::norm(th_exp));
    }
    return p2.prob.objective(z);
  };

  double best = eval_point(std::clamp(std::norm(bip.inst.theta.theta_t[0]), 0.0, 1.0),
                           bip.inst.theta.theta_t[0], bip.inst.theta.theta_r[0]);
  double kt_c = 0.5, kt_r = 0.5;
  cxd t1_c(0, 0), t2_c(0, 0);
  double rad = 1.2;
  for (int round = 0; round < 3; ++round) {
    double round_best = 1e300, kt_b = kt_c;
    cxd t1_b = t1_c, t2_b = t2_c;
    for (int ik = -6; ik <= 6; ++ik) {
      const double kt = std::clamp(kt_c + kt_r * ik / 6.0, 0.0, 1.0);
      for (int i1 = -6; i1 <= 6; ++i1)
        for (int j1 = -6; j1 <= 6; ++j1)
          for (int i2 = -6; i2 <= 6; ++i2)
            for (int j2 = -6; j2 <= 6; ++j2) {
              const cxd t1 = t1_c + cxd(rad * i1 / 6.0, rad * j1 / 6.0);
              const cxd t2 = t2_c + cxd(rad * i2 / 6.0, rad * j2 / 6.0);
              const double v = eval_point(kt, t1, t2);
              if (v < round_best) {
                round_best = v;
                kt_b = kt;
                t1_b = t1;
                t2_b = t2;
              }
            }
    }
    best = std::min(best, round_best);
    kt_c = kt_b;
    t1_c = t1_b;
    t2_c = t2_b;
    rad /= 6.0;
    kt_r /= 6.0;
  }
  // final local resolution ~1e-2 of the search cell
  CHECK(sol.objective <= best + 1e-8);
  CHECK(sol.objective >= best - 1e-2);
}

TEST_CASE("frozen-pattern P2 has no kappa variables and honors the pattern")
{
  const BuiltInstancePair bip = built_context(19, /*m=*/2, /*nt=*/2);
  RVec pattern(2);
  pattern << 1.0, 0.0;
  StarCoefficients frozen_theta =
      StarCoefficients::from_polar(pattern, RVec::Zero(2), RVec(RVec::Ones(2) - pattern),
                                   RVec::Zero(2), Protocol::es);
  PerRegion<SurrogateConstants> consts;
  for (Region k : both_regions)
    consts[k] = surrogate_constants(bip.inst.ch, frozen_theta, bip.inst.w, k, bip.inst.cfg);
  const BuildContext bc{bip.inst.ch, bip.inst.cfg, frozen_theta, bip.inst.w, consts,
                        EveModel::statistical, nullptr};
  const BuiltP2 p2 = build_p2(bc, 50.0, nullptr, &pattern);
  CHECK_FALSE(p2.layout.has_kappa);
  CHECK(p2.prob.lin_eq.empty());

  const SubproblemSolution sol = solve(p2.prob, p2.start);
  const StarCoefficients theta = p2.unpack_theta(sol.z, Protocol::es);
  // the slack penalty keeps |theta_m|^2 pinned to the pattern
  for (int i = 0; i < 2; ++i) {
    CHECK(std::norm(theta.theta_t[i]) <= pattern[i] + 0.05);
    CHECK(std::norm(theta.theta_r[i]) <= (1.0 - pattern[i]) + 0.05);
  }
}

TEST_CASE("instantaneous-eve P1/P2 need the pcsi constants")
{
  const BuiltInstancePair bip = built_context(23);
  BuildContext bc{bip.inst.ch, bip.inst.cfg, bip.inst.theta, bip.inst.w, bip.consts,
                  EveModel::instantaneous, nullptr};
  CHECK_THROWS_AS((void)build_p1(bc, bip.inst.theta), std::invalid_argument);

  PerRegion<PcsiEveConstants> pcsi;
  for (Region k : both_regions)
    pcsi[k] = pcsi_eve_constants(bip.inst.ch, bip.inst.theta, bip.inst.w, k, bip.inst.cfg);
  bc.pcsi = &pcsi;
  const BuiltP1 p1 = build_p1(bc, bip.inst.theta);
  const SubproblemSolution sol = solve(p1.prob, p1.start);
  CHECK(sol.status == SolveStatus::optimal);
}
