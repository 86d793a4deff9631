#pragma once

// Slow reference minimizer used as the independent oracle for the main
// subproblem solver: plain projected gradient with Armijo backtracking,
// where each projection onto the full constraint intersection is computed
// by Dykstra's algorithm over the individual sets. The modulus-relaxation
// pairs (a quadratic cap and its linearized companion) form a thin wedge
// that defeats plain alternating projections, so each pair is projected
// jointly via its two-multiplier KKT system. No acceleration, no augmented
// Lagrangian — a completely different solution path from the main engine.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "subproblem.hpp"
#include "subsolver.hpp"

namespace starsec::testing {

namespace detail {

struct CoordCoef {
  int idx;
  double c = 0.0;  // quadratic coefficient
  double a = 0.0;  // quad-side linear coefficient
  double d = 0.0;  // halfspace coefficient
};

struct PairSet {
  const QuadIneq* q;
  const LinIneq* l;
  std::vector<CoordCoef> coords;
  double qb = 0.0;
  double lb = 0.0;
};

inline PairSet make_pair_set(const QuadIneq& q, const LinIneq& l)
{
  PairSet ps{&q, &l, {}, q.lin.b, l.a.b};
  auto touch = [&](int idx) -> CoordCoef& {
    for (auto& cc : ps.coords)
      if (cc.idx == idx) return cc;
    ps.coords.push_back({idx, 0.0, 0.0, 0.0});
    return ps.coords.back();
  };
  for (const auto& [i, c] : q.sq) touch(i).c += c;
  for (size_t i = 0; i < q.lin.idx.size(); ++i) touch(q.lin.idx[i]).a += q.lin.coef[i];
  for (size_t i = 0; i < l.a.idx.size(); ++i) touch(l.a.idx[i]).d += l.a.coef[i];
  return ps;
}

/// Exact projection onto {quad <= 0} ∩ {halfspace <= 0} over the touched
/// coordinates, via the standard active-set enumeration; the both-active
/// case nests two monotone root-finds over the multipliers.
inline void project_pair(const PairSet& ps, RVec& z)
{
  auto q_val = [&](const RVec& v) {
    double acc = ps.qb;
    for (const auto& cc : ps.coords) acc += cc.c * v[cc.idx] * v[cc.idx] + cc.a * v[cc.idx];
    return acc;
  };
  auto l_val = [&](const RVec& v) {
    double acc = ps.lb;
    for (const auto& cc : ps.coords) acc += cc.d * v[cc.idx];
    return acc;
  };
  if (q_val(z) <= 0.0 && l_val(z) <= 0.0) return;

  // single-constraint candidates first
  {
    RVec zq = z;
    project_quad_ineq(*ps.q, zq);
    if (l_val(zq) <= 1e-14) {
      z = std::move(zq);
      return;
    }
  }
  {
    RVec zl = z;
    const double val = l_val(zl);
    if (val > 0.0) {
      const double nsq = ps.l->a.norm_sq();
      if (nsq > 0.0)
        for (size_t i = 0; i < ps.l->a.idx.size(); ++i)
          zl[ps.l->a.idx[i]] -= (val / nsq) * ps.l->a.coef[i];
    }
    if (q_val(zl) <= 1e-14) {
      z = std::move(zl);
      return;
    }
  }

  // both active: z_i(m1,m2) = (z0_i - m1 a_i - m2 d_i) / (1 + 2 m1 c_i)
  auto coord_at = [&](const CoordCoef& cc, double m1, double m2) {
    return (z[cc.idx] - m1 * cc.a - m2 * cc.d) / (1.0 + 2.0 * m1 * cc.c);
  };
  auto q_at = [&](double m1, double m2) {
    double acc = ps.qb;
    for (const auto& cc : ps.coords) {
      const double v = coord_at(cc, m1, m2);
      acc += cc.c * v * v + cc.a * v;
    }
    return acc;
  };
  auto l_at = [&](double m1, double m2) {
    double acc = ps.lb;
    for (const auto& cc : ps.coords) acc += cc.d * coord_at(cc, m1, m2);
    return acc;
  };
  // inner: smallest m1 >= 0 with q_at <= 0 (q_at decreases in m1)
  auto m1_of = [&](double m2) {
    if (q_at(0.0, m2) <= 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (q_at(hi, m2) > 0.0 && guard++ < 120) hi *= 2.0;
    for (int it = 0; it < 120; ++it) {
      const double mid = 0.5 * (lo + hi);
      (q_at(mid, m2) > 0.0 ? lo : hi) = mid;
    }
    return hi;
  };
  auto f_outer = [&](double m2) { return l_at(m1_of(m2), m2); };

  double hi = 1.0;
  int guard = 0;
  while (f_outer(hi) > 0.0 && guard++ < 120) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f_outer(mid) > 0.0 ? lo : hi) = mid;
  }
  const double m2 = hi;
  const double m1 = m1_of(m2);
  for (const auto& cc : ps.coords) z[cc.idx] = coord_at(cc, m1, m2);
}

}  // namespace detail

/// Pairs each quadratic cap with its tightest-fitting halfspace companion
/// (fewest coefficients among those covering the quadratic coordinates).
struct ProjectionPlan {
  std::vector<detail::PairSet> pairs;
  std::vector<const QuadIneq*> lone_quads;
  std::vector<const LinIneq*> lone_lins;

  explicit ProjectionPlan(const ConvexSubproblem& p)
  {
    std::vector<bool> lin_used(p.lin_ineq.size(), false);
    for (const auto& q : p.quad_ineq) {
      int best = -1;
      size_t best_size = std::numeric_limits<size_t>::max();
      for (size_t li = 0; li < p.lin_ineq.size(); ++li) {
        if (lin_used[li]) continue;
        const auto& idxs = p.lin_ineq[li].a.idx;
        const bool covers = std::all_of(q.sq.begin(), q.sq.end(), [&](const auto& sq) {
          return std::find(idxs.begin(), idxs.end(), sq.first) != idxs.end();
        });
        if (covers && idxs.size() < best_size) {
          best = static_cast<int>(li);
          best_size = idxs.size();
        }
      }
      if (best >= 0) {
        lin_used[best] = true;
        pairs.push_back(detail::make_pair_set(q, p.lin_ineq[best]));
      } else {
        lone_quads.push_back(&q);
      }
    }
    for (size_t li = 0; li < p.lin_ineq.size(); ++li)
      if (!lin_used[li]) lone_lins.push_back(&p.lin_ineq[li]);
  }
};

inline RVec dykstra_project(const ConvexSubproblem& p, const ProjectionPlan& plan, RVec z,
                            int max_cycles = 4000, double tol = 1e-13)
{
  const int n_sets = static_cast<int>(p.balls.size() + p.boxes.size() + plan.pairs.size() +
                                      plan.lone_quads.size() + plan.lone_lins.size() +
                                      p.lin_eq.size());
  std::vector<RVec> corr(n_sets, RVec::Zero(p.n));

  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    int si = 0;
    double moved = 0.0;
    auto apply = [&](auto&& project_one) {
      const RVec y = z + corr[si];
      RVec projected = y;
      project_one(projected);
      corr[si] = y - projected;
      moved = std::max(moved, (projected - z).lpNorm<Eigen::Infinity>());
      z = projected;
      ++si;
    };

    for (const auto& ball : p.balls)
      apply([&](RVec& v) {
        auto blk = v.segment(ball.offset, ball.size);
        const double nsq = blk.squaredNorm();
        if (nsq > ball.radius_sq) blk *= std::sqrt(ball.radius_sq / nsq);
      });
    for (const auto& box : p.boxes)
      apply([&](RVec& v) {
        for (int i = 0; i < box.size; ++i)
          v[box.offset + i] = std::clamp(v[box.offset + i], box.lo, box.hi);
      });
    for (const auto& ps : plan.pairs) apply([&](RVec& v) { detail::project_pair(ps, v); });
    for (const QuadIneq* q : plan.lone_quads) apply([&](RVec& v) { project_quad_ineq(*q, v); });
    for (const LinIneq* li : plan.lone_lins)
      apply([&](RVec& v) {
        const double val = li->a.eval(v);
        if (val > 0.0) {
          const double nsq = li->a.norm_sq();
          if (nsq > 0.0)
            for (size_t i = 0; i < li->a.idx.size(); ++i)
              v[li->a.idx[i]] -= (val / nsq) * li->a.coef[i];
        }
      });
    for (const auto& le : p.lin_eq)
      apply([&](RVec& v) {
        const double val = le.a.eval(v);
        const double nsq = le.a.norm_sq();
        if (nsq > 0.0)
          for (size_t i = 0; i < le.a.idx.size(); ++i)
            v[le.a.idx[i]] -= (val / nsq) * le.a.coef[i];
      });

    if (moved < tol && p.max_violation(z) < 1e-11) break;
  }
  return z;
}

inline RVec dykstra_project(const ConvexSubproblem& p, RVec z, int max_cycles = 4000,
                            double tol = 1e-13)
{
  return dykstra_project(p, ProjectionPlan(p), std::move(z), max_cycles, tol);
}

struct ReferenceResult {
  RVec z;
  double objective = std::numeric_limits<double>::infinity();
  long iterations = 0;
};

inline ReferenceResult reference_solve(const ConvexSubproblem& p, RVec start,
                                       long max_iters = 200000)
{
  const ProjectionPlan plan(p);
  ReferenceResult res;
  RVec z = dykstra_project(p, plan, std::move(start));
  double f = p.objective(z);
  RVec g(p.n);
  double step = 1.0;

  for (long it = 0; it < max_iters; ++it) {
    res.iterations = it + 1;
    p.gradient(z, g);
    bool accepted = false;
    double disp = 0.0;
    for (int bt = 0; bt < 80 && !accepted; ++bt) {
      RVec cand = dykstra_project(p, plan, z - step * g);
      const double fc = p.objective(cand);
      const double d2 = (cand - z).squaredNorm();
      if (std::isfinite(fc) && fc <= f - (1e-4 / std::max(step, 1e-300)) * d2) {
        disp = std::sqrt(d2);
        z = std::move(cand);
        f = fc;
        accepted = true;
        step *= 1.4;
      } else {
        step *= 0.5;
        if (step < 1e-18) break;
      }
    }
    if (!accepted) break;
    if (disp < 1e-13 * (1.0 + z.lpNorm<Eigen::Infinity>())) break;
  }
  res.z = std::move(z);
  res.objective = f;
  return res;
}

/// Lagrangian with the coupled constraints priced at fixed multipliers and
/// only the simple sets kept. By weak duality its minimum lower-bounds the
/// constrained optimum for any mu >= 0, so minimizing it with the
/// projected-gradient reference certifies a bracket around the main
/// solver's objective without trusting the main solver's solution.
inline ConvexSubproblem priced_lagrangian(const ConvexSubproblem& p, const RVec& mu,
                                          const RVec& nu)
{
  ConvexSubproblem d;
  d.n = p.n;
  d.constant = p.constant;
  d.linear = p.linear;
  d.quad = p.quad;
  d.qol = p.qol;
  d.balls = p.balls;
  d.boxes = p.boxes;

  const int nl = static_cast<int>(p.lin_ineq.size());
  for (int i = 0; i < p.num_ineq(); ++i) {
    const double m = mu[i];
    if (m <= 0.0) continue;
    if (i < nl) {
      SparseLin lin = p.lin_ineq[i].a;
      for (double& c : lin.coef) c *= m;
      lin.b *= m;
      d.constant += lin.b;
      lin.b = 0.0;
      d.linear.push_back(std::move(lin));
    } else {
      const QuadIneq& q = p.quad_ineq[i - nl];
      for (const auto& [j, c] : q.sq) {
        QuadTerm qt;
        qt.f.offset = j;
        qt.f.dw = RVec::Constant(1, c);
        qt.scale = m;
        d.quad.push_back(std::move(qt));
      }
      SparseLin lin = q.lin;
      for (double& c : lin.coef) c *= m;
      d.constant += m * lin.b;
      lin.b = 0.0;
      d.linear.push_back(std::move(lin));
    }
  }
  for (size_t j = 0; j < p.lin_eq.size(); ++j) {
    SparseLin lin = p.lin_eq[j].a;
    for (double& c : lin.coef) c *= nu[j];
    d.constant += nu[j] * lin.b;
    lin.b = 0.0;
    d.linear.push_back(std::move(lin));
  }
  return d;
}

struct DualCertificate {
  double primal = 0.0;      // objective at the (feasible) candidate point
  double dual_bound = 0.0;  // certified lower bound on the optimum
  double gap = 0.0;
  double feasibility = 0.0;
};

inline DualCertificate certify_optimum(const ConvexSubproblem& p, const RVec& z_candidate,
                                       const RVec& mu, const RVec& nu)
{
  DualCertificate cert;
  cert.primal = p.objective(z_candidate);
  cert.feasibility = p.max_violation(z_candidate);
  const ConvexSubproblem d = priced_lagrangian(p, mu, nu);
  const ReferenceResult r = reference_solve(d, z_candidate);
  cert.dual_bound = r.objective;
  cert.gap = cert.primal - cert.dual_bound;
  return cert;
}

}  // namespace starsec::testing
