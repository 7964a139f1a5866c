#pragma once

// Internal canonical NLP form: min f(x) s.t. eq(x) = 0, ineq(x) <= 0 with
// finite variable bounds folded into the constraint set. Shared by the IPM,
// branch and bound, and the KKT checker.

#include <memory>
#include <string>
#include <vector>

#include "opfkit/problem.hpp"

namespace opfkit {

struct CanonicalNlp {
  const OptimizationProblem* problem = nullptr;
  int nx = 0;
  Vec x0;

  // linear parts, bounds included
  SpMat a_eq;
  Vec b_eq;
  SpMat a_ineq;
  Vec b_ineq;
  int n_lin_eq = 0, n_lin_ineq = 0;

  // per-row provenance (constraint block name), linear rows first
  std::vector<std::string> eq_labels, ineq_labels;

  // nonlinear blocks in declaration order
  std::vector<const NonlinearConstraint*> nl_eq, nl_ineq;
  int n_nl_eq = 0, n_nl_ineq = 0;

  int neq() const { return n_lin_eq + n_nl_eq; }
  int nineq() const { return n_lin_ineq + n_nl_ineq; }

  double f(const Vec& x) const { return problem->objective_value(x); }
  Vec grad(const Vec& x) const { return problem->objective_gradient(x); }

  Vec eval_eq(const Vec& x) const;
  Vec eval_ineq(const Vec& x) const;
  SpMat jac_eq(const Vec& x) const;
  SpMat jac_ineq(const Vec& x) const;
  /// Hessian of the Lagrangian: objective plus multiplier-weighted
  /// constraint Hessians.
  SpMat hess_lagrangian(const Vec& x, const Vec& lam_eq, const Vec& mu_ineq) const;
};

/// Builds the canonical form. lb/ub overrides (used by branch and bound)
/// replace the problem's block bounds when non-empty.
CanonicalNlp canonicalize(const OptimizationProblem& p, const Vec& lb_override = Vec(),
                          const Vec& ub_override = Vec());

struct Solution;
struct SolverOptions;

namespace detail {
/// The interior-point core over a canonical form; branch and bound drives it
/// with per-node bound overrides.
Solution solve_canonical_public(const CanonicalNlp& c, const SolverOptions& opt);
}  // namespace detail

}  // namespace opfkit
