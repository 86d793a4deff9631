#include "subsolver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace starsec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct AlmContext {
  const ConvexSubproblem& p;
  RVec mu;  // inequality multipliers, >= 0
  RVec nu;  // equality multipliers
  double rho;

  /// Rough diagonal of the augmented-Lagrangian Hessian; used as a metric
  /// so coordinates with penalty-scaled curvature take matching steps.
  RVec curvature_diag(const RVec& z) const
  {
    RVec d = RVec::Constant(p.n, 1e-8);
    for (const auto& t : p.quad) {
      if (t.f.dw.size() > 0) {
        for (Eigen::Index i = 0; i < t.f.dw.size(); ++i)
          d[t.f.offset + i] += 2.0 * t.scale * t.f.dw[i];
      } else {
        for (Eigen::Index j = 0; j < t.f.A.cols(); ++j)
          d[t.f.offset + j] += 2.0 * t.scale * t.f.A.col(j).squaredNorm();
      }
    }
    for (const auto& t : p.qol) {
      const double den = std::max(t.den.eval(z), 1e-12);
      if (t.num.dw.size() > 0) {
        for (Eigen::Index i = 0; i < t.num.dw.size(); ++i)
          d[t.num.offset + i] += 2.0 * t.scale * t.num.dw[i] / den;
      } else {
        for (Eigen::Index j = 0; j < t.num.A.cols(); ++j)
          d[t.num.offset + j] += 2.0 * t.scale * t.num.A.col(j).squaredNorm() / den;
      }
      const double num = t.num.eval(z);
      for (size_t i = 0; i < t.den.idx.size(); ++i)
        d[t.den.idx[i]] +=
            2.0 * t.scale * num * t.den.coef[i] * t.den.coef[i] / (den * den * den);
    }
    for (int i = 0; i < p.num_ineq(); ++i) {
      const double gi = p.ineq_value(i, z);
      const double s = std::max(0.0, mu[i] + rho * gi);
      const bool active = s > 0.0;
      const int nl = static_cast<int>(p.lin_ineq.size());
      if (i < nl) {
        if (!active) continue;
        const auto& a = p.lin_ineq[i].a;
        for (size_t j = 0; j < a.idx.size(); ++j)
          d[a.idx[j]] += rho * a.coef[j] * a.coef[j];
      } else {
        const QuadIneq& q = p.quad_ineq[i - nl];
        for (const auto& [j, c] : q.sq) {
          if (active) d[j] += rho * 4.0 * c * c * z[j] * z[j] + s * 2.0 * c;
        }
        if (active)
          for (size_t j = 0; j < q.lin.idx.size(); ++j)
            d[q.lin.idx[j]] += rho * q.lin.coef[j] * q.lin.coef[j];
      }
    }
    for (const auto& e : p.lin_eq)
      for (size_t j = 0; j < e.a.idx.size(); ++j)
        d[e.a.idx[j]] += rho * e.a.coef[j] * e.a.coef[j];
    const double cap = d.maxCoeff();
    const double floor = std::max(1e-8, 1e-7 * cap);
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = std::clamp(d[i], floor, cap);
    return d;
  }

  double eval(const RVec& z) const
  {
    double acc = p.objective(z);
    if (!std::isfinite(acc)) return kInf;
    for (int i = 0; i < p.num_ineq(); ++i) {
      const double gi = p.ineq_value(i, z);
      const double s = std::max(0.0, mu[i] + rho * gi);
      acc += (s * s - mu[i] * mu[i]) / (2.0 * rho);
    }
    for (size_t j = 0; j < p.lin_eq.size(); ++j) {
      const double hj = p.eq_value(static_cast<int>(j), z);
      acc += nu[j] * hj + 0.5 * rho * hj * hj;
    }
    return acc;
  }

  void grad(const RVec& z, RVec& g) const
  {
    p.gradient(z, g);
    for (int i = 0; i < p.num_ineq(); ++i) {
      const double s = std::max(0.0, mu[i] + rho * p.ineq_value(i, z));
      if (s > 0.0) p.add_ineq_grad(i, z, s, g);
    }
    for (size_t j = 0; j < p.lin_eq.size(); ++j) {
      p.add_eq_grad(static_cast<int>(j), nu[j] + rho * p.eq_value(static_cast<int>(j), z), g);
    }
  }
};

/// Projected-gradient residual of the augmented Lagrangian at z (unit step).
double pg_residual(const AlmContext& ctx, const RVec& z, RVec& scratch)
{
  ctx.grad(z, scratch);
  return (z - ctx.p.project_simple(z - scratch)).lpNorm<Eigen::Infinity>();
}

/// Projection onto the simple sets in the diagonal metric diag(d).
RVec project_simple_metric(const ConvexSubproblem& p, RVec z, const RVec& dm)
{
  for (const auto& box : p.boxes) {
    for (int i = 0; i < box.size; ++i) {
      double& v = z[box.offset + i];
      v = std::clamp(v, box.lo, box.hi);
    }
  }
  for (const auto& ball : p.balls) {
    auto blk = z.segment(ball.offset, ball.size);
    if (blk.squaredNorm() <= ball.radius_sq) continue;
    const auto w = dm.segment(ball.offset, ball.size);
    auto norm_at = [&](double m) {
      double acc = 0.0;
      for (int i = 0; i < ball.size; ++i) {
        const double x = w[i] * blk[i] / (w[i] + 2.0 * m);
        acc += x * x;
      }
      return acc;
    };
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (norm_at(hi) > ball.radius_sq && guard++ < 200) hi *= 2.0;
    for (int bit = 0; bit < 100; ++bit) {
      const double mid = 0.5 * (lo + hi);
      (norm_at(mid) > ball.radius_sq ? lo : hi) = mid;
    }
    for (int i = 0; i < ball.size; ++i) blk[i] = w[i] * blk[i] / (w[i] + 2.0 * hi);
  }
  return z;
}

/// FISTA with backtracking line search, adaptive restart and a diagonal
/// metric matched to the penalty-scaled curvature. Returns iterations used;
/// z is updated in place and stays in the domain.
long fista_inner(const AlmContext& ctx, RVec& z, double inner_tol, int max_inner, double& L)
{
  const ConvexSubproblem& p = ctx.p;
  z = p.project_simple(z);
  const RVec dm = ctx.curvature_diag(z);
  RVec y = z;
  RVec g(p.n), scratch(p.n), z_new(p.n), d(p.n);
  double t = 1.0;
  if (L <= 0.0) L = 1.0;
  L = std::clamp(L, 1e-6, 1e6);

  long it = 0;
  for (; it < max_inner; ++it) {
    double fy = ctx.eval(y);
    if (!std::isfinite(fy)) {
      // extrapolation left the quad-over-linear domain; restart at z
      y = z;
      t = 1.0;
      fy = ctx.eval(y);
      if (!std::isfinite(fy)) break;  // z itself out of domain: give up here
    }
    ctx.grad(y, g);

    for (;;) {
      z_new = project_simple_metric(p, y - (g.array() / (L * dm.array())).matrix(), dm);
      d = z_new - y;
      const double fz = ctx.eval(z_new);
      const double model =
          fy + g.dot(d) + 0.5 * L * (d.array().square() * dm.array()).sum();
      if (std::isfinite(fz) && fz <= model + 1e-12 * (1.0 + std::abs(fy))) break;
      L *= 2.0;
      if (L > 1e18) {
        z_new = z;
        break;
      }
    }

    const double step = (z_new - z).lpNorm<Eigen::Infinity>();

    // restart when momentum points uphill
    if ((y - z_new).dot(z_new - z) > 0.0) {
      t = 1.0;
      y = z_new;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = z_new + ((t - 1.0) / t_next) * (z_new - z);
      t = t_next;
    }
    z = z_new;

    if (it % 5 == 4 || step <= 1e-16) {
      const double res = pg_residual(ctx, z, scratch);
      if (res <= inner_tol || step <= 1e-16) {
        ++it;
        break;
      }
    }
    L = std::max(L * 0.95, 1e-12);
  }
  return it;
}

/// Augmented-Lagrangian Hessian split into a sparse part plus a low-rank
/// symmetric correction  H = S + U C U^T. The quadratic-over-linear terms
/// contribute their exact curvature via a rank-2 block; dense constraint
/// rows (harvested-energy restrictions) become low-rank columns.
struct HessianModel {
  std::vector<Eigen::Triplet<double>> s_trip;
  std::vector<RVec> u_cols;
  std::vector<std::pair<int, int>> c_blocks;  // (offset, size) into C
  RMat c_dense;

  void add_diag(int i, double v) { s_trip.emplace_back(i, i, v); }

  void add_sparse_outer(const SparseLin& a, double coef)
  {
    for (size_t i = 0; i < a.idx.size(); ++i)
      for (size_t j = 0; j < a.idx.size(); ++j)
        s_trip.emplace_back(a.idx[i], a.idx[j], coef * a.coef[i] * a.coef[j]);
  }

  void add_rank1(RVec u, double c)
  {
    const int at = static_cast<int>(u_cols.size());
    u_cols.push_back(std::move(u));
    c_blocks.emplace_back(at, 1);
    c_scalar.push_back(c);
  }

  void add_pair(RVec u, RVec v, double c_uv, double c_vv)
  {
    const int at = static_cast<int>(u_cols.size());
    u_cols.push_back(std::move(u));
    u_cols.push_back(std::move(v));
    c_blocks.emplace_back(at, 2);
    c_scalar.push_back(c_uv);
    c_scalar.push_back(c_vv);
  }

  std::vector<double> c_scalar;  // per block: size-1 -> value; size-2 -> (uv, vv)
};

void assemble_hessian(const AlmContext& ctx, const RVec& z, HessianModel& hm)
{
  const ConvexSubproblem& p = ctx.p;
  hm.s_trip.clear();
  hm.u_cols.clear();
  hm.c_blocks.clear();
  hm.c_scalar.clear();

  for (const auto& t : p.quad) {
    if (t.f.dw.size() > 0) {
      for (Eigen::Index i = 0; i < t.f.dw.size(); ++i)
        hm.add_diag(t.f.offset + i, 2.0 * t.scale * t.f.dw[i]);
    } else {
      for (Eigen::Index r = 0; r < t.f.A.rows(); ++r) {
        RVec col = RVec::Zero(p.n);
        col.segment(t.f.offset, t.f.A.cols()) = t.f.A.row(r).transpose();
        hm.add_rank1(std::move(col), 2.0 * t.scale);
      }
    }
  }

  for (const auto& t : p.qol) {
    const double den = t.den.eval(z);
    const double num = t.num.eval(z);
    // (2s/d) Q  -  (s/d^2)(grad_n v^T + v grad_n^T) + (2 s n / d^3) v v^T
    RVec grad_n = RVec::Zero(p.n);
    t.num.add_grad(z, 1.0, grad_n);
    RVec v = RVec::Zero(p.n);
    t.den.add_grad(1.0, v);
    if (t.num.dw.size() > 0) {
      for (Eigen::Index i = 0; i < t.num.dw.size(); ++i)
        hm.add_diag(t.num.offset + i, 2.0 * t.scale * t.num.dw[i] / den);
    } else {
      for (Eigen::Index r = 0; r < t.num.A.rows(); ++r) {
        RVec col = RVec::Zero(p.n);
        col.segment(t.num.offset, t.num.A.cols()) = t.num.A.row(r).transpose();
        hm.add_rank1(std::move(col), 2.0 * t.scale / den);
      }
    }
    hm.add_pair(std::move(grad_n), std::move(v), -t.scale / (den * den),
                2.0 * t.scale * num / (den * den * den));
  }

  const int nl = static_cast<int>(p.lin_ineq.size());
  for (int i = 0; i < p.num_ineq(); ++i) {
    const double gi = p.ineq_value(i, z);
    const double s = std::max(0.0, ctx.mu[i] + ctx.rho * gi);
    if (s <= 0.0) continue;
    if (i < nl) {
      const SparseLin& a = p.lin_ineq[i].a;
      if (a.idx.size() <= 8) {
        hm.add_sparse_outer(a, ctx.rho);
      } else {
        RVec col = RVec::Zero(ctx.p.n);
        a.add_grad(1.0, col);
        hm.add_rank1(std::move(col), ctx.rho);
      }
    } else {
      const QuadIneq& q = p.quad_ineq[i - nl];
      SparseLin grad;  // gradient of g as a sparse functional
      for (const auto& [j, c] : q.sq) grad.add(j, 2.0 * c * z[j]);
      for (size_t j = 0; j < q.lin.idx.size(); ++j) grad.add(q.lin.idx[j], q.lin.coef[j]);
      grad.compress();
      hm.add_sparse_outer(grad, ctx.rho);
      for (const auto& [j, c] : q.sq) hm.add_diag(j, s * 2.0 * c);
    }
  }
  for (const auto& e : p.lin_eq) {
    if (e.a.idx.size() <= 8) {
      hm.add_sparse_outer(e.a, ctx.rho);
    } else {
      RVec col = RVec::Zero(ctx.p.n);
      e.a.add_grad(1.0, col);
      hm.add_rank1(std::move(col), ctx.rho);
    }
  }
}

/// Projected Newton for box/free problems (no norm balls): active-set
/// reduction, sparse LDLT of S plus a Woodbury correction for the low-rank
/// columns, projected-arc Armijo line search. Quadratic local convergence
/// makes the multiplier updates essentially exact.
long newton_inner(const AlmContext& ctx, RVec& z, double inner_tol, int max_steps)
{
  const ConvexSubproblem& p = ctx.p;
  z = p.project_simple(z);
  RVec g(p.n), scratch(p.n);
  HessianModel hm;

  long steps = 0;
  for (; steps < max_steps; ++steps) {
    ctx.grad(z, g);
    if ((z - p.project_simple(z - g)).lpNorm<Eigen::Infinity>() <= inner_tol) break;

    // epsilon-active box coordinates move with the gradient fixed at bound
    std::vector<int> free_of;
    std::vector<int> full_to_free(p.n, -1);
    {
      std::vector<bool> active(p.n, false);
      for (const auto& box : p.boxes) {
        for (int i = 0; i < box.size; ++i) {
          const int j = box.offset + i;
          const double band = 1e-10 * (1.0 + std::abs(z[j]));
          if ((z[j] <= box.lo + band && g[j] > 0.0) || (z[j] >= box.hi - band && g[j] < 0.0))
            active[j] = true;
        }
      }
      for (int j = 0; j < p.n; ++j) {
        if (!active[j]) {
          full_to_free[j] = static_cast<int>(free_of.size());
          free_of.push_back(j);
        }
      }
    }
    const int nf = static_cast<int>(free_of.size());
    if (nf == 0) break;

    assemble_hessian(ctx, z, hm);

    // reduced sparse part
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(hm.s_trip.size() + nf);
    for (const auto& t : hm.s_trip) {
      const int r = full_to_free[t.row()];
      const int c = full_to_free[t.col()];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, t.value());
    }
    for (int i = 0; i < nf; ++i) trip.emplace_back(i, i, 1e-10);
    Eigen::SparseMatrix<double> s_red(nf, nf);
    s_red.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(s_red);

    RVec d = RVec::Zero(p.n);
    bool newton_ok = ldlt.info() == Eigen::Success;
    if (newton_ok) {
      RVec g_red(nf);
      for (int i = 0; i < nf; ++i) g_red[i] = g[free_of[i]];
      RVec rhs = -g_red;
      const int rank = static_cast<int>(hm.u_cols.size());
      RVec x_red;
      if (rank == 0) {
        x_red = ldlt.solve(rhs);
      } else {
        RMat u_red(nf, rank);
        for (int c = 0; c < rank; ++c)
          for (int i = 0; i < nf; ++i) u_red(i, c) = hm.u_cols[c][free_of[i]];
        // C as block-diagonal symmetric; invert blockwise
        RMat c_inv = RMat::Zero(rank, rank);
        size_t sc = 0;
        bool c_ok = true;
        for (const auto& [at, size] : hm.c_blocks) {
          if (size == 1) {
            const double cval = hm.c_scalar[sc++];
            if (cval == 0.0) c_ok = false;
            else c_inv(at, at) = 1.0 / cval;
          } else {
            const double cuv = hm.c_scalar[sc++];
            const double cvv = hm.c_scalar[sc++];
            const double det = -cuv * cuv;
            if (det == 0.0) {
              c_ok = false;
            } else {
              // inverse of [[0, cuv], [cuv, cvv]]
              c_inv(at, at) = -cvv / (cuv * cuv);
              c_inv(at, at + 1) = 1.0 / cuv;
              c_inv(at + 1, at) = 1.0 / cuv;
              c_inv(at + 1, at + 1) = 0.0;
            }
          }
        }
        if (!c_ok) {
          newton_ok = false;
        } else {
          const RVec y = ldlt.solve(rhs);
          const RMat t_mat = ldlt.solve(u_red);
          RMat k = c_inv + u_red.transpose() * t_mat;
          Eigen::FullPivLU<RMat> klu(k);
          if (!klu.isInvertible()) {
            newton_ok = false;
          } else {
            x_red = y - t_mat * klu.solve(u_red.transpose() * y);
          }
        }
      }
      if (newton_ok && x_red.allFinite()) {
        double descent = 0.0;
        for (int i = 0; i < nf; ++i) descent += g[free_of[i]] * x_red[i];
        if (descent < 0.0) {
          for (int i = 0; i < nf; ++i) d[free_of[i]] = x_red[i];
        } else {
          newton_ok = false;
        }
      } else {
        newton_ok = false;
      }
    }
    if (!newton_ok) {
      for (int i = 0; i < nf; ++i) d[free_of[i]] = -g[free_of[i]];
    }

    // projected-arc backtracking
    const double f0 = ctx.eval(z);
    double alpha = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 50; ++bt) {
      const RVec z_try = p.project_simple(z + alpha * d);
      const double ft = ctx.eval(z_try);
      const double pred = g.dot(z_try - z);
      if (std::isfinite(ft) && ft <= f0 + 1e-4 * std::min(pred, 0.0) + 1e-14 * std::abs(f0)) {
        if ((z_try - z).lpNorm<Eigen::Infinity>() <= 1e-18) break;
        z = z_try;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  return steps;
}

double lagrangian_residual(const ConvexSubproblem& p, const RVec& z, const RVec& mu,
                           const RVec& nu, RVec& g)
{
  p.gradient(z, g);
  for (int i = 0; i < p.num_ineq(); ++i)
    if (mu[i] > 0.0) p.add_ineq_grad(i, z, mu[i], g);
  for (size_t j = 0; j < p.lin_eq.size(); ++j) p.add_eq_grad(static_cast<int>(j), nu[j], g);
  return (z - p.project_simple(z - g)).lpNorm<Eigen::Infinity>();
}

}  // namespace

void project_quad_ineq(const QuadIneq& q, RVec& z)
{
  // gather the touched coordinates with their quadratic/linear coefficients
  std::map<int, std::pair<double, double>> coords;  // idx -> (c, a)
  for (const auto& [i, c] : q.sq) coords[i].first += c;
  for (size_t i = 0; i < q.lin.idx.size(); ++i) coords[q.lin.idx[i]].second += q.lin.coef[i];

  auto value_at = [&](double m) {
    double acc = q.lin.b;
    for (const auto& [i, ca] : coords) {
      const auto [c, a] = ca;
      const double zi = (z[i] - m * a) / (1.0 + 2.0 * m * c);
      acc += c * zi * zi + a * zi;
    }
    return acc;
  };

  if (value_at(0.0) <= 0.0) return;

  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (value_at(hi) > 0.0 && guard++ < 100) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (value_at(mid) > 0.0 ? lo : hi) = mid;
  }
  const double m = hi;
  for (const auto& [i, ca] : coords) {
    const auto [c, a] = ca;
    z[i] = (z[i] - m * a) / (1.0 + 2.0 * m * c);
  }
}

RVec polish_feasibility(const ConvexSubproblem& p, RVec z, double tol, int max_passes)
{
  for (int pass = 0; pass < max_passes; ++pass) {
    z = p.project_simple(z);
    for (const auto& li : p.lin_ineq) {
      const double v = li.a.eval(z);
      if (v > tol) {
        const double nsq = li.a.norm_sq();
        if (nsq > 0) {
          const double s = v / nsq;
          for (size_t i = 0; i < li.a.idx.size(); ++i) z[li.a.idx[i]] -= s * li.a.coef[i];
        }
      }
    }
    for (const auto& qi : p.quad_ineq) {
      double v = qi.lin.eval(z);
      for (const auto& [j, c] : qi.sq) v += c * z[j] * z[j];
      if (v > tol) project_quad_ineq(qi, z);
    }
    for (const auto& le : p.lin_eq) {
      const double v = le.a.eval(z);
      if (std::abs(v) > tol) {
        const double nsq = le.a.norm_sq();
        if (nsq > 0) {
          const double s = v / nsq;
          for (size_t i = 0; i < le.a.idx.size(); ++i) z[le.a.idx[i]] -= s * le.a.coef[i];
        }
      }
    }
    z = p.project_simple(z);
    if (p.max_violation(z) <= tol) break;
  }
  return z;
}

SubproblemSolution solve(const ConvexSubproblem& p, RVec start, const SolverOptions& opt,
                         SolverWarmStart* warm)
{
  SubproblemSolution sol;
  AlmContext ctx{p, RVec::Zero(p.num_ineq()), RVec::Zero(static_cast<int>(p.lin_eq.size())),
                 opt.rho_init};
  double L = 1.0;
  if (warm && warm->mu_ineq.size() == p.num_ineq() &&
      warm->nu_eq.size() == static_cast<Eigen::Index>(p.lin_eq.size())) {
    ctx.mu = warm->mu_ineq;
    ctx.nu = warm->nu_eq;
    if (warm->rho > 0.0) ctx.rho = warm->rho;
    if (warm->lipschitz > 0.0) L = warm->lipschitz;
  }

  RVec z = p.project_simple(std::move(start));
  if (!p.in_domain(z)) {
    sol.z = z;
    sol.objective = kInf;
    sol.status = SolveStatus::infeasible;
    sol.message = "start outside quad-over-linear domain";
    return sol;
  }
  const double start_objective = p.objective(z);
  const RVec z_start = z;

  RVec scratch(p.n);
  double inner_tol = std::max(opt.tol * 10.0, 1e-4);
  double best_feas = kInf;
  int stall = 0;

  // Norm balls keep the accelerated projected-gradient inner loop; box/free
  // problems use the projected-Newton path (exact curvature, a few steps).
  const bool use_newton = p.balls.empty();
  const int newton_cap = 60;

  for (int outer = 1; outer <= opt.max_outer; ++outer) {
    const long used = use_newton ? newton_inner(ctx, z, inner_tol, newton_cap)
                                 : fista_inner(ctx, z, inner_tol, opt.max_inner, L);
    const bool inner_maxed = used >= (use_newton ? newton_cap : opt.max_inner);
    sol.inner_iters += used;
    sol.outer_iters = outer;

    double feas = 0.0;
    double compl_res = 0.0;
    for (int i = 0; i < p.num_ineq(); ++i) {
      const double gi = p.ineq_value(i, z);
      ctx.mu[i] = std::max(0.0, ctx.mu[i] + ctx.rho * gi);
      feas = std::max(feas, gi);
      compl_res = std::max(compl_res, std::abs(ctx.mu[i] * gi) / (1.0 + ctx.mu[i]));
    }
    for (size_t j = 0; j < p.lin_eq.size(); ++j) {
      const double hj = p.eq_value(static_cast<int>(j), z);
      ctx.nu[j] += ctx.rho * hj;
      feas = std::max(feas, std::abs(hj));
    }

    const double stat = lagrangian_residual(p, z, ctx.mu, ctx.nu, scratch);
    sol.stationarity = stat;
    sol.feasibility = feas;
    sol.complementarity = compl_res;

    if (stat <= opt.tol && feas <= opt.feas_tol && compl_res <= opt.tol) {
      sol.status = SolveStatus::optimal;
      break;
    }

    // Stiffen only while the inner loop can still afford it: a saturated
    // inner run means the current rho is already at the conditioning limit,
    // and the multiplier updates alone keep shrinking the violation.
    if (inner_maxed) {
      ctx.rho = std::max(ctx.rho * 0.5, opt.rho_init);
    } else if (feas > std::max(0.3 * best_feas, 10.0 * opt.feas_tol)) {
      ctx.rho = std::min(ctx.rho * 3.0, opt.rho_max);
    }
    if (feas > 0.9 * best_feas && feas > std::max(100.0 * opt.feas_tol, 1e-6) &&
        ctx.rho >= opt.rho_max * 0.99) {
      if (++stall >= 4) {
        sol.status = SolveStatus::infeasible;
        sol.message = "constraints unsatisfiable at rho_max; worst: " + p.worst_constraint(z);
        break;
      }
    } else {
      stall = 0;
    }
    best_feas = std::min(best_feas, feas);
    inner_tol = std::max(opt.tol * 0.5, inner_tol * 0.25);
  }

  if (sol.status != SolveStatus::infeasible && p.max_violation(z) > opt.feas_tol) {
    z = polish_feasibility(p, z, opt.feas_tol * 0.5);
    sol.feasibility = p.max_violation(z);
  }

  // never return something worse than the (feasible) start
  if (std::isfinite(start_objective) && p.objective(z) > start_objective &&
      p.max_violation(z_start) <= opt.feas_tol) {
    z = z_start;
    sol.stationarity = lagrangian_residual(p, z, ctx.mu, ctx.nu, scratch);
    sol.feasibility = p.max_violation(z);
  }

  sol.z = z;
  sol.objective = p.objective(z);
  sol.mu_ineq = ctx.mu;
  sol.nu_eq = ctx.nu;
  if (warm) {
    warm->mu_ineq = ctx.mu;
    warm->nu_eq = ctx.nu;
    warm->rho = ctx.rho;
    warm->lipschitz = L;
  }
  return sol;
}

}  // namespace starsec
