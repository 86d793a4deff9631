#pragma once

#include <string>
#include <utility>
#include <vector>

#include "types.hpp"

namespace starsec {

/// Sum-of-squares factor acting on a contiguous block of the decision
/// vector: either dense (value |A z_block|^2) or diagonal weights
/// (value sum_i dw_i z_i^2). Diagonal weights must be non-negative and
/// dense factors are PSD by construction.
struct QuadFactor {
  int offset = 0;
  RMat A;   // dense factor; used when dw is empty
  RVec dw;  // diagonal weights

  int width() const { return dw.size() > 0 ? static_cast<int>(dw.size()) : static_cast<int>(A.cols()); }
  double eval(const RVec& z) const;
  void add_grad(const RVec& z, double coef, RVec& g) const;
};

/// Sparse affine functional  sum_i coef_i z_{idx_i} + b.
struct SparseLin {
  std::vector<int> idx;
  std::vector<double> coef;
  double b = 0.0;

  void add(int i, double c)
  {
    idx.push_back(i);
    coef.push_back(c);
  }
  double eval(const RVec& z) const;
  void add_grad(double scale, RVec& g) const;
  double norm_sq() const;

  /// Merges duplicate indices; required before norm_sq-based projections.
  void compress();
};

struct QuadTerm {
  QuadFactor f;
  double scale = 1.0;
};

/// scale * |factor z|^2 / (den z + b); convex where the denominator is
/// positive, which the solver treats as a domain restriction.
struct QuadOverLinTerm {
  QuadFactor num;
  double scale = 1.0;
  SparseLin den;
};

struct BallConstraint {
  int offset = 0;
  int size = 0;
  double radius_sq = 1.0;
};

struct BoxConstraint {
  int offset = 0;
  int size = 0;
  double lo = 0.0;
  double hi = 0.0;  // may be +inf
};

/// a(z) <= 0 with the bound folded into the affine constant.
struct LinIneq {
  SparseLin a;
};

/// sum_i c_i z_i^2 + a(z) <= 0, c_i >= 0.
struct QuadIneq {
  std::vector<std::pair<int, double>> sq;
  SparseLin lin;
};

struct LinEq {
  SparseLin a;
};

/// The convex subproblem vocabulary both beamformer and TaRC updates need:
/// linear / convex-quadratic / quadratic-over-linear objective terms, a
/// power ball, boxes, affine equalities and affine or convex-quadratic
/// inequalities. Stored as coefficient bundles so solvers can use structure
/// directly.
struct ConvexSubproblem {
  int n = 0;
  double constant = 0.0;

  std::vector<SparseLin> linear;
  std::vector<QuadTerm> quad;
  std::vector<QuadOverLinTerm> qol;

  std::vector<BallConstraint> balls;
  std::vector<BoxConstraint> boxes;
  std::vector<LinIneq> lin_ineq;
  std::vector<QuadIneq> quad_ineq;
  std::vector<LinEq> lin_eq;

  /// True when every quad-over-linear denominator is safely positive.
  bool in_domain(const RVec& z) const;

  /// Objective value; +inf outside the domain.
  double objective(const RVec& z) const;

  /// Gradient of the objective (z must be in the domain).
  void gradient(const RVec& z, RVec& g) const;

  int num_ineq() const { return static_cast<int>(lin_ineq.size() + quad_ineq.size()); }
  double ineq_value(int i, const RVec& z) const;
  void add_ineq_grad(int i, const RVec& z, double coef, RVec& g) const;
  double eq_value(int j, const RVec& z) const;
  void add_eq_grad(int j, double coef, RVec& g) const;

  /// Exact projection onto the simple sets (balls and boxes). Ball and box
  /// blocks must not overlap.
  RVec project_simple(RVec z) const;

  /// Largest violation across every constraint class.
  double max_violation(const RVec& z) const;

  /// Human-readable tag of the most violated constraint (for infeasibility
  /// certificates).
  std::string worst_constraint(const RVec& z) const;
};

}  // namespace starsec
