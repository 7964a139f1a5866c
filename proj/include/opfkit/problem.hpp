#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace opfkit {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

struct VariableBlock {
  std::string name;
  int size = 0;
  Vec lb, ub, x0;
  bool integral = false;
  int offset = 0;  // assigned on insertion
};

/// Objective term 0.5 x'Qx + c'x + k over the full variable vector.
struct QuadraticTerm {
  std::string name;
  SpMat Q;   // empty means zero
  Vec c;     // empty means zero
  double k = 0;
  std::string tag;
};

/// Smooth objective term with analytic derivatives over the full vector.
struct NonlinearTerm {
  std::string name;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<SpMat(const Vec&)> hessian;
  std::string tag;
};

enum class ConstraintKind { Equality, Inequality };

/// A x = rhs (equality) or A x <= rhs (inequality).
struct LinearConstraint {
  std::string name;
  ConstraintKind kind = ConstraintKind::Equality;
  SpMat A;
  Vec rhs;
  std::string tag;
};

/// g(x) = 0 or g(x) <= 0 with Jacobian and multiplier-weighted Hessian.
struct NonlinearConstraint {
  std::string name;
  ConstraintKind kind = ConstraintKind::Equality;
  int rows = 0;
  std::function<Vec(const Vec&)> value;
  std::function<SpMat(const Vec&)> jacobian;                // rows x nx
  std::function<SpMat(const Vec&, const Vec&)> hessian;     // sum_i lam_i d2 g_i
  std::string tag;
};

/// Solver-agnostic NLP/QP/MILP container. Blocks carry bounds, start values
/// and integrality; constraints and objective terms address the concatenated
/// variable vector. Immutable once built and handed to a solver.
class OptimizationProblem {
public:
  int add_block(const std::string& name, int size, Vec lb, Vec ub, Vec x0,
                bool integral = false);
  void add_quadratic(QuadraticTerm t) { quad_terms_.push_back(std::move(t)); }
  void add_nonlinear(NonlinearTerm t) { nl_terms_.push_back(std::move(t)); }
  void add_linear_constraint(LinearConstraint c);
  void add_nonlinear_constraint(NonlinearConstraint c);
  void remove_constraint(const std::string& name);

  int num_vars() const { return nx_; }
  const std::vector<VariableBlock>& blocks() const { return blocks_; }
  const VariableBlock* find_block(const std::string& name) const;
  VariableBlock* find_block_mutable(const std::string& name);
  int offset_of(const std::string& name) const;  // throws when absent

  const std::vector<QuadraticTerm>& quadratic_terms() const { return quad_terms_; }
  const std::vector<NonlinearTerm>& nonlinear_terms() const { return nl_terms_; }
  const std::vector<LinearConstraint>& linear_constraints() const { return lin_cons_; }
  const std::vector<NonlinearConstraint>& nonlinear_constraints() const { return nl_cons_; }

  bool has_nonlinear() const;
  bool has_integrality() const;

  Vec initial_point() const;
  Vec lower_bounds() const;
  Vec upper_bounds() const;

  double objective_value(const Vec& x) const;
  Vec objective_gradient(const Vec& x) const;
  SpMat objective_hessian(const Vec& x) const;

  /// Max violation over all constraints and bounds at x (equalities by
  /// magnitude, inequalities by positive part).
  double max_violation(const Vec& x) const;

  /// Role tags of every block/term/constraint, for debug dumps.
  std::vector<std::pair<std::string, std::string>> metadata() const;

private:
  int nx_ = 0;
  std::vector<VariableBlock> blocks_;
  std::vector<QuadraticTerm> quad_terms_;
  std::vector<NonlinearTerm> nl_terms_;
  std::vector<LinearConstraint> lin_cons_;
  std::vector<NonlinearConstraint> nl_cons_;
};

}  // namespace opfkit
