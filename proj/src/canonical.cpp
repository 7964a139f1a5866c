#include "canonical.hpp"

#include <cmath>
#include <limits>

#include "opfkit/errors.hpp"

namespace opfkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

CanonicalNlp canonicalize(const OptimizationProblem& p, const Vec& lb_override,
                          const Vec& ub_override) {
  CanonicalNlp c;
  c.problem = &p;
  c.nx = p.num_vars();
  c.x0 = p.initial_point();

  Vec lb = lb_override.size() ? lb_override : p.lower_bounds();
  Vec ub = ub_override.size() ? ub_override : p.upper_bounds();
  for (int i = 0; i < c.nx; ++i) c.x0[i] = std::min(std::max(c.x0[i], lb[i]), ub[i]);

  std::vector<Eigen::Triplet<double>> te, ti;
  std::vector<double> be, bi;

  for (const auto& con : p.linear_constraints()) {
    const bool eq = con.kind == ConstraintKind::Equality;
    auto& trips = eq ? te : ti;
    auto& rhs = eq ? be : bi;
    auto& labels = eq ? c.eq_labels : c.ineq_labels;
    const int row0 = static_cast<int>(rhs.size());
    for (int k = 0; k < con.A.outerSize(); ++k)
      for (SpMat::InnerIterator it(con.A, k); it; ++it)
        trips.emplace_back(row0 + static_cast<int>(it.row()), static_cast<int>(it.col()),
                           it.value());
    for (int r = 0; r < con.rhs.size(); ++r) {
      rhs.push_back(con.rhs[r]);
      labels.push_back(con.name);
    }
  }

  // variable bounds: fixed entries become equality rows, finite one-sided
  // bounds become inequality rows
  for (int i = 0; i < c.nx; ++i) {
    if (lb[i] == ub[i]) {
      te.emplace_back(static_cast<int>(be.size()), i, 1.0);
      be.push_back(lb[i]);
      c.eq_labels.push_back("bounds");
      continue;
    }
    if (ub[i] < kInf) {
      ti.emplace_back(static_cast<int>(bi.size()), i, 1.0);
      bi.push_back(ub[i]);
      c.ineq_labels.push_back("bounds");
    }
    if (lb[i] > -kInf) {
      ti.emplace_back(static_cast<int>(bi.size()), i, -1.0);
      bi.push_back(-lb[i]);
      c.ineq_labels.push_back("bounds");
    }
  }

  c.n_lin_eq = static_cast<int>(be.size());
  c.n_lin_ineq = static_cast<int>(bi.size());
  c.a_eq.resize(c.n_lin_eq, c.nx);
  c.a_eq.setFromTriplets(te.begin(), te.end());
  c.a_ineq.resize(c.n_lin_ineq, c.nx);
  c.a_ineq.setFromTriplets(ti.begin(), ti.end());
  c.b_eq = Eigen::Map<Vec>(be.data(), c.n_lin_eq);
  c.b_ineq = Eigen::Map<Vec>(bi.data(), c.n_lin_ineq);

  for (const auto& con : p.nonlinear_constraints()) {
    if (con.kind == ConstraintKind::Equality) {
      c.nl_eq.push_back(&con);
      c.n_nl_eq += con.rows;
      for (int r = 0; r < con.rows; ++r) c.eq_labels.push_back(con.name);
    } else {
      c.nl_ineq.push_back(&con);
      c.n_nl_ineq += con.rows;
      for (int r = 0; r < con.rows; ++r) c.ineq_labels.push_back(con.name);
    }
  }
  return c;
}

Vec CanonicalNlp::eval_eq(const Vec& x) const {
  Vec g(neq());
  if (n_lin_eq > 0) g.head(n_lin_eq) = a_eq * x.head(a_eq.cols()) - b_eq;
  int row = n_lin_eq;
  for (const auto* con : nl_eq) {
    g.segment(row, con->rows) = con->value(x);
    row += con->rows;
  }
  return g;
}

Vec CanonicalNlp::eval_ineq(const Vec& x) const {
  Vec h(nineq());
  if (n_lin_ineq > 0) h.head(n_lin_ineq) = a_ineq * x.head(a_ineq.cols()) - b_ineq;
  int row = n_lin_ineq;
  for (const auto* con : nl_ineq) {
    h.segment(row, con->rows) = con->value(x);
    row += con->rows;
  }
  return h;
}

namespace {

void append_rows(std::vector<Eigen::Triplet<double>>& trips, const SpMat& m, int row0) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      trips.emplace_back(row0 + static_cast<int>(it.row()), static_cast<int>(it.col()),
                         it.value());
}

}  // namespace

SpMat CanonicalNlp::jac_eq(const Vec& x) const {
  std::vector<Eigen::Triplet<double>> trips;
  append_rows(trips, a_eq, 0);
  int row = n_lin_eq;
  for (const auto* con : nl_eq) {
    append_rows(trips, con->jacobian(x), row);
    row += con->rows;
  }
  SpMat j(neq(), nx);
  j.setFromTriplets(trips.begin(), trips.end());
  return j;
}

SpMat CanonicalNlp::jac_ineq(const Vec& x) const {
  std::vector<Eigen::Triplet<double>> trips;
  append_rows(trips, a_ineq, 0);
  int row = n_lin_ineq;
  for (const auto* con : nl_ineq) {
    append_rows(trips, con->jacobian(x), row);
    row += con->rows;
  }
  SpMat j(nineq(), nx);
  j.setFromTriplets(trips.begin(), trips.end());
  return j;
}

SpMat CanonicalNlp::hess_lagrangian(const Vec& x, const Vec& lam_eq, const Vec& mu_ineq) const {
  std::vector<Eigen::Triplet<double>> trips;
  auto accumulate = [&](const SpMat& part) {
    for (int k = 0; k < part.outerSize(); ++k)
      for (SpMat::InnerIterator it(part, k); it; ++it)
        trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  };
  accumulate(problem->objective_hessian(x));
  int row = n_lin_eq;
  for (const auto* con : nl_eq) {
    accumulate(con->hessian(x, lam_eq.segment(row, con->rows)));
    row += con->rows;
  }
  row = n_lin_ineq;
  for (const auto* con : nl_ineq) {
    accumulate(con->hessian(x, mu_ineq.segment(row, con->rows)));
    row += con->rows;
  }
  SpMat h(nx, nx);
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

}  // namespace opfkit
