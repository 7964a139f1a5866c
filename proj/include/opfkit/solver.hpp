#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "opfkit/case.hpp"
#include "opfkit/problem.hpp"

namespace opfkit {

enum class SolveStatus { Optimal, Infeasible, IterationLimit, NumericalFailure };
std::string to_string(SolveStatus s);

struct SolverOptions {
  double feasibility_tol = 5e-6;
  double optimality_tol = 1e-8;  // scaled KKT residual
  int max_iter = 150;
  double mu_initial = 1.0;       // initial barrier scale / slack floor
  double mu_reduction = 0.1;     // centering factor sigma
  double step_fraction = 0.995;  // fraction-to-boundary
  double bb_gap = 1e-6;          // MILP relative gap
  int bb_node_limit = 10000;
  std::uint64_t seed = 0;  // reserved for randomized perturbations (0 = none)
  std::function<void(const std::string&)> log_sink;  // per-iteration lines
};

struct KktResidual {
  double stationarity = 0;
  double primal_feasibility = 0;
  double dual_feasibility = 0;
  double complementarity = 0;
};

struct Solution {
  Vec x;
  std::map<std::string, Vec> duals;  // per constraint block, bounds under "bounds"
  SolveStatus status = SolveStatus::NumericalFailure;
  double f = 0;
  KktResidual kkt;
  int iterations = 0;
  double wall_time = 0;
  std::string diagnostic;
  // branch-and-bound statistics (MILP solves only)
  int bb_nodes = 0;
  double bb_lower_bound = 0;
  double bb_gap_achieved = 0;
};

/// Primal-dual interior point method for smooth problems (no integrality).
Solution solve_nlp(const OptimizationProblem& p, const SolverOptions& opt);

/// Same core, asserting the problem is a QP/LP (no nonlinear callbacks).
Solution solve_qp_lp(const OptimizationProblem& p, const SolverOptions& opt);

/// Best-first branch and bound over continuous relaxations; binary blocks
/// only, linear constraints only.
Solution solve_milp(const OptimizationProblem& p, const SolverOptions& opt);

/// Dispatch on problem structure (integrality -> MILP, smooth -> NLP, QP).
Solution solve_auto(const OptimizationProblem& p, const SolverOptions& opt);

/// Recomputes stationarity / feasibility / complementarity from the problem
/// definition, independently of the solver's internal residual bookkeeping.
KktResidual check_kkt(const OptimizationProblem& p, const Solution& sol);

/// Internal canonical form shared by the IPM, branch and bound, and the KKT
/// checker. Bounds become inequality rows (fixed variables become
/// equalities), ranged linear rows are split.
struct CanonicalNlp;

SolverOptions solver_options_for(double opf_violation);

}  // namespace opfkit
