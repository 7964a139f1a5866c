#include <chrono>
#include <cmath>
#include <queue>
#include <vector>

#include "canonical.hpp"
#include "opfkit/errors.hpp"
#include "opfkit/solver.hpp"
#include "opfkit/util.hpp"

namespace opfkit {

namespace {

constexpr double kIntTol = 1e-5;

struct Node {
  double bound = -std::numeric_limits<double>::infinity();
  Vec lb, ub;
  long long id = 0;
  bool operator<(const Node& o) const {
    // max-heap: invert so the smallest bound is explored first
    return bound != o.bound ? bound > o.bound : id > o.id;
  }
};

Solution solve_relaxation(const OptimizationProblem& p, const SolverOptions& opt,
                          const Vec& lb, const Vec& ub) {
  CanonicalNlp c = canonicalize(p, lb, ub);
  return detail::solve_canonical_public(c, opt);
}

}  // namespace

Solution solve_milp(const OptimizationProblem& p, const SolverOptions& opt) {
  const auto t_start = std::chrono::steady_clock::now();
  if (!p.has_integrality())
    return solve_qp_lp(p, opt);
  if (p.has_nonlinear())
    throw InvariantError("solve_milp requires linear constraints and objective");

  std::vector<int> binaries;
  for (const auto& b : p.blocks())
    if (b.integral) {
      for (int i = 0; i < b.size; ++i) {
        if (b.lb[i] < -kIntTol || b.ub[i] > 1 + kIntTol)
          throw InvariantError("integral block " + b.name + " must be binary");
        binaries.push_back(b.offset + i);
      }
    }

  Solution best;
  best.status = SolveStatus::Infeasible;
  best.f = std::numeric_limits<double>::infinity();
  bool have_incumbent = false;
  double global_lower = std::numeric_limits<double>::infinity();

  std::priority_queue<Node> open;
  Node root;
  root.lb = p.lower_bounds();
  root.ub = p.upper_bounds();
  root.bound = -std::numeric_limits<double>::infinity();
  open.push(root);

  long long next_id = 1;
  int nodes = 0;
  bool hit_limit = false;

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (nodes >= opt.bb_node_limit) {
      hit_limit = true;
      break;
    }
    ++nodes;

    const double prune_tol = opt.bb_gap * std::max(1.0, std::abs(best.f));
    if (have_incumbent && node.bound >= best.f - prune_tol) continue;

    Solution rel = solve_relaxation(p, opt, node.lb, node.ub);
    if (rel.status == SolveStatus::Infeasible ||
        rel.status == SolveStatus::NumericalFailure)
      continue;
    if (open.empty() && !have_incumbent) global_lower = std::min(global_lower, rel.f);
    if (have_incumbent && rel.f >= best.f - prune_tol) continue;

    int branch_var = -1;
    double most_frac = kIntTol;
    for (int idx : binaries) {
      const double v = rel.x[idx];
      const double frac = std::min(v - std::floor(v + kIntTol), std::ceil(v - kIntTol) - v);
      const double dist = std::min(std::abs(v), std::abs(1 - v));
      (void)frac;
      if (dist > most_frac) {
        most_frac = dist;
        branch_var = idx;
      }
    }

    if (branch_var < 0) {
      // integral relaxation: fix the pattern and resolve for a clean incumbent
      Vec lb = node.lb, ub = node.ub;
      for (int idx : binaries) {
        const double v = std::round(rel.x[idx]);
        lb[idx] = v;
        ub[idx] = v;
      }
      Solution fixed = solve_relaxation(p, opt, lb, ub);
      if (fixed.status == SolveStatus::Optimal && fixed.f < best.f - 0) {
        best = fixed;
        have_incumbent = true;
      }
      continue;
    }

    Node down = node, up = node;
    down.ub[branch_var] = 0;
    down.bound = rel.f;
    down.id = next_id++;
    up.lb[branch_var] = 1;
    up.bound = rel.f;
    up.id = next_id++;
    open.push(down);
    open.push(up);
  }

  // proven lower bound: smallest bound left unexplored, or the incumbent
  double lower = best.f;
  if (hit_limit && !open.empty()) lower = std::min(lower, open.top().bound);

  Solution out = best;
  out.bb_nodes = nodes;
  out.bb_lower_bound = lower;
  out.bb_gap_achieved =
      have_incumbent ? (best.f - lower) / std::max(1.0, std::abs(best.f)) : 0.0;
  if (!have_incumbent) {
    out.status = SolveStatus::Infeasible;
    out.diagnostic = "no integral-feasible point found";
  } else if (hit_limit) {
    out.status = SolveStatus::IterationLimit;
    out.diagnostic = "node limit reached; best incumbent returned";
  } else {
    out.status = SolveStatus::Optimal;
  }
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

}  // namespace opfkit
