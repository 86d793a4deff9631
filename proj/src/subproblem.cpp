#include "subproblem.hpp"

#include <algorithm>
#include <map>
#include <cmath>
#include <cstdio>
#include <limits>

namespace starsec {

namespace {
constexpr double kDomainFloor = 1e-14;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double QuadFactor::eval(const RVec& z) const
{
  if (dw.size() > 0) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < dw.size(); ++i) {
      const double v = z[offset + i];
      acc += dw[i] * v * v;
    }
    return acc;
  }
  if (A.rows() == 0) return 0.0;
  return (A * z.segment(offset, A.cols())).squaredNorm();
}

void QuadFactor::add_grad(const RVec& z, double coef, RVec& g) const
{
  if (dw.size() > 0) {
    for (Eigen::Index i = 0; i < dw.size(); ++i) g[offset + i] += coef * 2.0 * dw[i] * z[offset + i];
    return;
  }
  if (A.rows() == 0) return;
  g.segment(offset, A.cols()).noalias() += coef * 2.0 * (A.transpose() * (A * z.segment(offset, A.cols())));
}

double SparseLin::eval(const RVec& z) const
{
  double acc = b;
  for (size_t i = 0; i < idx.size(); ++i) acc += coef[i] * z[idx[i]];
  return acc;
}

void SparseLin::add_grad(double scale, RVec& g) const
{
  for (size_t i = 0; i < idx.size(); ++i) g[idx[i]] += scale * coef[i];
}

double SparseLin::norm_sq() const
{
  double acc = 0.0;
  for (double c : coef) acc += c * c;
  return acc;
}

void SparseLin::compress()
{
  std::map<int, double> merged;
  for (size_t i = 0; i < idx.size(); ++i) merged[idx[i]] += coef[i];
  idx.clear();
  coef.clear();
  for (const auto& [i, c] : merged) {
    idx.push_back(i);
    coef.push_back(c);
  }
}

bool ConvexSubproblem::in_domain(const RVec& z) const
{
  for (const auto& t : qol)
    if (t.den.eval(z) <= kDomainFloor) return false;
  return true;
}

double ConvexSubproblem::objective(const RVec& z) const
{
  double acc = constant;
  for (const auto& t : linear) acc += t.eval(z);
  for (const auto& t : quad) acc += t.scale * t.f.eval(z);
  for (const auto& t : qol) {
    const double den = t.den.eval(z);
    if (den <= kDomainFloor) return kInf;
    acc += t.scale * t.num.eval(z) / den;
  }
  return acc;
}

void ConvexSubproblem::gradient(const RVec& z, RVec& g) const
{
  g.setZero(n);
  for (const auto& t : linear) t.add_grad(1.0, g);
  for (const auto& t : quad) t.f.add_grad(z, t.scale, g);
  for (const auto& t : qol) {
    const double den = t.den.eval(z);
    const double num = t.num.eval(z);
    // d/dz [num/den] = grad(num)/den - num grad(den)/den^2
    t.num.add_grad(z, t.scale / den, g);
    t.den.add_grad(-t.scale * num / (den * den), g);
  }
}

double ConvexSubproblem::ineq_value(int i, const RVec& z) const
{
  const int nl = static_cast<int>(lin_ineq.size());
  if (i < nl) return lin_ineq[i].a.eval(z);
  const QuadIneq& q = quad_ineq[i - nl];
  double acc = q.lin.eval(z);
  for (const auto& [j, c] : q.sq) acc += c * z[j] * z[j];
  return acc;
}

void ConvexSubproblem::add_ineq_grad(int i, const RVec& z, double coef, RVec& g) const
{
  const int nl = static_cast<int>(lin_ineq.size());
  if (i < nl) {
    lin_ineq[i].a.add_grad(coef, g);
    return;
  }
  const QuadIneq& q = quad_ineq[i - nl];
  q.lin.add_grad(coef, g);
  for (const auto& [j, c] : q.sq) g[j] += coef * 2.0 * c * z[j];
}

double ConvexSubproblem::eq_value(int j, const RVec& z) const { return lin_eq[j].a.eval(z); }

void ConvexSubproblem::add_eq_grad(int j, double coef, RVec& g) const
{
  lin_eq[j].a.add_grad(coef, g);
}

RVec ConvexSubproblem::project_simple(RVec z) const
{
  for (const auto& box : boxes) {
    for (int i = 0; i < box.size; ++i) {
      double& v = z[box.offset + i];
      v = std::clamp(v, box.lo, box.hi);
    }
  }
  for (const auto& ball : balls) {
    auto blk = z.segment(ball.offset, ball.size);
    const double nsq = blk.squaredNorm();
    if (nsq > ball.radius_sq) blk *= std::sqrt(ball.radius_sq / nsq);
  }
  return z;
}

double ConvexSubproblem::max_violation(const RVec& z) const
{
  double worst = 0.0;
  for (int i = 0; i < num_ineq(); ++i) worst = std::max(worst, ineq_value(i, z));
  for (size_t j = 0; j < lin_eq.size(); ++j) worst = std::max(worst, std::abs(eq_value(static_cast<int>(j), z)));
  for (const auto& ball : balls)
    worst = std::max(worst, z.segment(ball.offset, ball.size).squaredNorm() - ball.radius_sq);
  for (const auto& box : boxes) {
    for (int i = 0; i < box.size; ++i) {
      const double v = z[box.offset + i];
      worst = std::max({worst, box.lo - v, v - box.hi});
    }
  }
  return worst;
}

std::string ConvexSubproblem::worst_constraint(const RVec& z) const
{
  double worst = 0.0;
  std::string tag = "none";
  char buf[96];
  for (int i = 0; i < num_ineq(); ++i) {
    const double v = ineq_value(i, z);
    if (v > worst) {
      worst = v;
      const bool linear_kind = i < static_cast<int>(lin_ineq.size());
      std::snprintf(buf, sizeof buf, "%s_ineq[%d] violation %.3g",
                    linear_kind ? "lin" : "quad", i, v);
      tag = buf;
    }
  }
  for (size_t j = 0; j < lin_eq.size(); ++j) {
    const double v = std::abs(eq_value(static_cast<int>(j), z));
    if (v > worst) {
      worst = v;
      std::snprintf(buf, sizeof buf, "lin_eq[%zu] residual %.3g", j, v);
      tag = buf;
    }
  }
  return tag;
}

}  // namespace starsec
