#pragma once

#include <string>

#include "subproblem.hpp"

namespace starsec {

enum class SolveStatus { optimal, max_iter, infeasible };

struct SubproblemSolution {
  RVec z;
  double objective = 0.0;
  double stationarity = 0.0;    // projected-gradient residual of the Lagrangian
  double feasibility = 0.0;     // largest constraint violation
  double complementarity = 0.0; // max |mu_i g_i|
  RVec mu_ineq;                 // final multipliers (duality certificates)
  RVec nu_eq;
  int outer_iters = 0;
  long inner_iters = 0;
  SolveStatus status = SolveStatus::max_iter;
  std::string message;
};

struct SolverOptions {
  double tol = 1e-6;        // KKT stationarity / complementarity target
  double feas_tol = 1e-8;   // absolute feasibility target
  int max_outer = 60;
  int max_inner = 3000;
  double rho_init = 10.0;
  // Kept moderate: the multipliers do the convergence work, and a stiff
  // augmented term only stalls the accelerated inner iterations.
  double rho_max = 1e7;
};

/// Multiplier state carried across repeated solves of structurally
/// identical problems (alternating-optimization warm starts).
struct SolverWarmStart {
  RVec mu_ineq;
  RVec nu_eq;
  double rho = 0.0;
  double lipschitz = 0.0;
};

/// Augmented-Lagrangian outer loop over the coupled constraints with an
/// accelerated projected-gradient (FISTA + backtracking + restart) inner
/// loop over the ball/box sets. Deterministic; single-threaded; reentrant.
SubproblemSolution solve(const ConvexSubproblem& p, RVec start, const SolverOptions& opt = {},
                         SolverWarmStart* warm = nullptr);

/// Cyclic exact projections until every constraint holds within tol;
/// restores feasibility after a solve without measurably moving the point.
RVec polish_feasibility(const ConvexSubproblem& p, RVec z, double tol, int max_passes = 200);

/// Exact projection onto one quadratic inequality set
/// { z : sum c_i z_i^2 + a(z) <= 0 } touching only the referenced coords.
void project_quad_ineq(const QuadIneq& q, RVec& z);

}  // namespace starsec
