#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>
#include <sstream>

#include "canonical.hpp"
#include "opfkit/errors.hpp"
#include "opfkit/solver.hpp"
#include "opfkit/util.hpp"

namespace opfkit {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::IterationLimit: return "IterationLimit";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "NumericalFailure";
}

SolverOptions solver_options_for(double opf_violation) {
  SolverOptions opt;
  opt.feasibility_tol = opf_violation;
  return opt;
}

namespace {

constexpr int kDenseLimit = 400;  // KKT systems below this solve densely

struct KktSolver {
  int dim = 0;
  bool dense = false;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_dense;
  Eigen::SparseLU<SpMat> lu_sparse;

  // returns false when the factorization or solve looks singular
  bool solve(const SpMat& k, const Vec& rhs, Vec& out) {
    dim = static_cast<int>(k.rows());
    dense = dim < kDenseLimit;
    if (dense) {
      Eigen::MatrixXd kd = k.toDense();
      lu_dense.compute(kd);
      out = lu_dense.solve(rhs);
    } else {
      SpMat kc = k;
      kc.makeCompressed();
      lu_sparse.compute(kc);
      if (lu_sparse.info() != Eigen::Success) return false;
      out = lu_sparse.solve(rhs);
    }
    if (!out.allFinite()) return false;
    double resid = (k * out - rhs).cwiseAbs().maxCoeff();
    return resid <= 1e-6 * (1.0 + rhs.cwiseAbs().maxCoeff());
  }
};

double inf_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// Fills the per-block dual map from the stacked canonical multipliers.
void scatter_duals(const CanonicalNlp& c, const Vec& lam, const Vec& mu, Solution& sol) {
  auto gather = [](const std::vector<std::string>& labels, const Vec& v,
                   std::map<std::string, std::vector<double>>& out) {
    for (int i = 0; i < v.size(); ++i) out[labels[i]].push_back(v[i]);
  };
  std::map<std::string, std::vector<double>> acc;
  gather(c.eq_labels, lam, acc);
  gather(c.ineq_labels, mu, acc);
  for (auto& [name, vals] : acc)
    sol.duals[name] = Eigen::Map<Vec>(vals.data(), static_cast<int>(vals.size()));
}

}  // namespace

namespace detail {

Solution solve_canonical_public(const CanonicalNlp& c, const SolverOptions& opt) {
  const auto t_start = std::chrono::steady_clock::now();
  Solution sol;
  const int nx = c.nx;
  const int neq = c.neq();
  const int niq = c.nineq();
  const double xi = opt.step_fraction;
  const double sigma = opt.mu_reduction;

  Vec x = c.x0;
  Vec lam = Vec::Zero(neq);
  Vec h = c.eval_ineq(x);
  Vec g = c.eval_eq(x);
  // slack and multiplier initialisation away from the boundary
  const double z0 = std::max(opt.mu_initial, 1e-2);
  Vec z = Vec::Constant(niq, z0);
  for (int i = 0; i < niq; ++i)
    if (h[i] < -z0) z[i] = -h[i];
  Vec mu(niq);
  for (int i = 0; i < niq; ++i) mu[i] = opt.mu_initial / z[i];

  double f = c.f(x);
  double f_prev = f;
  Vec grad = c.grad(x);
  SpMat jeq = c.jac_eq(x);
  SpMat jiq = c.jac_ineq(x);

  KktSolver kkt;
  int stall_count = 0;
  double feascond = 0, gradcond = 0, compcond = 0, costcond = 0;

  auto compute_conditions = [&]() {
    Vec lx = grad + jeq.transpose() * lam + jiq.transpose() * mu;
    const double maxh = niq ? h.maxCoeff() : 0.0;
    feascond = std::max(inf_norm(g), maxh) / (1.0 + std::max(inf_norm(x), inf_norm(z)));
    gradcond = inf_norm(lx) / (1.0 + std::max(inf_norm(lam), inf_norm(mu)));
    compcond = (niq ? z.dot(mu) : 0.0) / (1.0 + inf_norm(x));
    costcond = std::abs(f - f_prev) / (1.0 + std::abs(f_prev));
  };

  auto finish = [&](SolveStatus status, const std::string& note) {
    sol.x = x;
    sol.status = status;
    sol.f = f;
    sol.diagnostic = note;
    Vec lx = grad + jeq.transpose() * lam + jiq.transpose() * mu;
    sol.kkt.stationarity = inf_norm(lx);
    sol.kkt.primal_feasibility = std::max(inf_norm(g), niq ? std::max(0.0, h.maxCoeff()) : 0.0);
    sol.kkt.dual_feasibility = niq ? std::max(0.0, -mu.minCoeff()) : 0.0;
    sol.kkt.complementarity = niq ? z.dot(mu) / std::max(1, niq) : 0.0;
    scatter_duals(c, lam, mu, sol);
    sol.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return sol;
  };

  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    sol.iterations = iter;
    compute_conditions();
    if (opt.log_sink) {
      std::ostringstream os;
      os << "it " << iter << "  f " << format_number(f) << "  feas "
         << format_number(feascond) << "  grad " << format_number(gradcond) << "  comp "
         << format_number(compcond);
      opt.log_sink(os.str());
    }
    const bool converged = feascond < opt.feasibility_tol && gradcond < opt.optimality_tol &&
                           compcond < opt.optimality_tol && costcond < opt.optimality_tol;
    if (converged) return finish(SolveStatus::Optimal, "");
    if (iter == opt.max_iter) break;

    if (!x.allFinite() || !std::isfinite(f))
      return finish(SolveStatus::NumericalFailure, "non-finite iterates");
    if (std::abs(f) > 1e12 || inf_norm(x) > 1e12)
      return finish(SolveStatus::NumericalFailure,
                    "diverging iterates; problem may be unbounded");

    const double gamma = niq ? sigma * z.dot(mu) / niq : 0.0;

    SpMat hess = c.hess_lagrangian(x, lam, mu);
    Vec lx = grad + jeq.transpose() * lam + jiq.transpose() * mu;

    // reduced KKT system over (dx, dlam)
    Vec zinv_rhs(niq), zinv_mu(niq);
    for (int i = 0; i < niq; ++i) {
      zinv_rhs[i] = (gamma + mu[i] * h[i]) / z[i];
      zinv_mu[i] = mu[i] / z[i];
    }

    Vec dxdlam;
    bool solved = false;
    double delta = 0.0;
    for (int attempt = 0; attempt < 24 && !solved; ++attempt) {
      std::vector<Eigen::Triplet<double>> trips;
      SpMat m = hess;
      if (niq) {
        // M = H + Jiq' diag(mu/z) Jiq (+ delta I when regularised)
        SpMat weighted = SpMat(jiq.transpose()) * SpMat(zinv_mu.asDiagonal()) * jiq;
        m = m + weighted;
      }
      for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it)
          trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                             it.value());
      if (delta > 0)
        for (int i = 0; i < nx; ++i) trips.emplace_back(i, i, delta);
      for (int k = 0; k < jeq.outerSize(); ++k)
        for (SpMat::InnerIterator it(jeq, k); it; ++it) {
          trips.emplace_back(nx + static_cast<int>(it.row()), static_cast<int>(it.col()),
                             it.value());
          trips.emplace_back(static_cast<int>(it.col()), nx + static_cast<int>(it.row()),
                             it.value());
        }
      SpMat kmat(nx + neq, nx + neq);
      kmat.setFromTriplets(trips.begin(), trips.end());

      Vec rhs(nx + neq);
      rhs.head(nx) = -(lx + (niq ? Vec(jiq.transpose() * zinv_rhs) : Vec::Zero(nx)));
      rhs.tail(neq) = -g;
      solved = kkt.solve(kmat, rhs, dxdlam);
      if (!solved) delta = delta == 0 ? 1e-8 : delta * 2;
      if (delta > 1e-2) break;
    }
    if (!solved)
      return finish(SolveStatus::NumericalFailure,
                    "singular KKT system after bounded regularization retries");

    Vec dx = dxdlam.head(nx);
    Vec dlam = dxdlam.tail(neq);
    Vec dz(niq), dmu(niq);
    if (niq) {
      dz = -h - z - Vec(jiq * dx);
      for (int i = 0; i < niq; ++i) dmu[i] = -mu[i] + (gamma - mu[i] * dz[i]) / z[i];
    }

    double alpha_p = 1.0, alpha_d = 1.0;
    for (int i = 0; i < niq; ++i) {
      if (dz[i] < 0) alpha_p = std::min(alpha_p, xi * (-z[i] / dz[i]));
      if (dmu[i] < 0) alpha_d = std::min(alpha_d, xi * (-mu[i] / dmu[i]));
    }

    x += alpha_p * dx;
    if (niq) {
      z += alpha_p * dz;
      mu += alpha_d * dmu;
    }
    lam += alpha_d * dlam;

    if (alpha_p < 1e-8) {
      ++stall_count;
    } else {
      stall_count = 0;
    }

    f_prev = f;
    f = c.f(x);
    grad = c.grad(x);
    g = c.eval_eq(x);
    h = c.eval_ineq(x);
    jeq = c.jac_eq(x);
    jiq = c.jac_ineq(x);

    if (stall_count >= 5) {
      compute_conditions();
      if (feascond > opt.feasibility_tol)
        return finish(SolveStatus::Infeasible,
                      "stalled with positive infeasibility " + format_number(feascond));
      return finish(SolveStatus::IterationLimit, "step collapse before reaching tolerance");
    }
  }

  compute_conditions();
  if (feascond > opt.feasibility_tol)
    return finish(SolveStatus::Infeasible,
                  "iteration limit with positive infeasibility " + format_number(feascond));
  return finish(SolveStatus::IterationLimit, "iteration limit reached");
}

}  // namespace detail

Solution solve_nlp(const OptimizationProblem& p, const SolverOptions& opt) {
  if (p.has_integrality())
    throw InvariantError("solve_nlp cannot handle integrality flags; use solve_milp");
  CanonicalNlp c = canonicalize(p);
  return detail::solve_canonical_public(c, opt);
}

Solution solve_qp_lp(const OptimizationProblem& p, const SolverOptions& opt) {
  if (p.has_nonlinear())
    throw InvariantError("solve_qp_lp requires a linear/quadratic problem");
  return solve_nlp(p, opt);
}

Solution solve_auto(const OptimizationProblem& p, const SolverOptions& opt) {
  if (p.has_integrality()) return solve_milp(p, opt);
  return solve_nlp(p, opt);
}

KktResidual check_kkt(const OptimizationProblem& p, const Solution& sol) {
  // recomputed from scratch; shares no state with the solver loop
  CanonicalNlp c = canonicalize(p);
  KktResidual r;
  const Vec& x = sol.x;
  Vec g = c.eval_eq(x);
  Vec h = c.eval_ineq(x);
  r.primal_feasibility =
      std::max(inf_norm(g), h.size() ? std::max(0.0, h.maxCoeff()) : 0.0);

  // reassemble stacked multipliers from the per-block map; the cursor is
  // shared because fixed-variable rows file under "bounds" on both sides
  Vec lam = Vec::Zero(c.neq());
  Vec mu = Vec::Zero(c.nineq());
  std::map<std::string, int> cursor;
  for (int i = 0; i < c.neq(); ++i) {
    const std::string& name = c.eq_labels[i];
    auto it = sol.duals.find(name);
    if (it != sol.duals.end() && cursor[name] < it->second.size())
      lam[i] = it->second[cursor[name]++];
  }
  for (int i = 0; i < c.nineq(); ++i) {
    const std::string& name = c.ineq_labels[i];
    auto it = sol.duals.find(name);
    if (it != sol.duals.end() && cursor[name] < it->second.size())
      mu[i] = it->second[cursor[name]++];
  }

  Vec lx = c.grad(x) + c.jac_eq(x).transpose() * lam + c.jac_ineq(x).transpose() * mu;
  r.stationarity = inf_norm(lx) / (1.0 + std::max(inf_norm(lam), inf_norm(mu)));
  r.dual_feasibility = mu.size() ? std::max(0.0, -mu.minCoeff()) : 0.0;
  double comp = 0;
  for (int i = 0; i < mu.size(); ++i) comp = std::max(comp, std::abs(mu[i] * h[i]));
  r.complementarity = comp / (1.0 + inf_norm(x));
  return r;
}

}  // namespace opfkit
