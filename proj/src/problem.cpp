#include "opfkit/problem.hpp"

#include <algorithm>

#include "opfkit/errors.hpp"

namespace opfkit {

int OptimizationProblem::add_block(const std::string& name, int size, Vec lb, Vec ub, Vec x0,
                                   bool integral) {
  if (find_block(name)) throw InvariantError("duplicate variable block " + name);
  if (lb.size() != size || ub.size() != size || x0.size() != size)
    throw InvariantError("block " + name + ": bound/start vectors must have length " +
                         std::to_string(size));
  for (int i = 0; i < size; ++i)
    if (lb[i] > ub[i])
      throw InvariantError("block " + name + ": lower bound exceeds upper bound at entry " +
                           std::to_string(i));
  VariableBlock b;
  b.name = name;
  b.size = size;
  b.lb = std::move(lb);
  b.ub = std::move(ub);
  b.x0 = std::move(x0);
  b.integral = integral;
  b.offset = nx_;
  blocks_.push_back(std::move(b));
  nx_ += size;
  return blocks_.back().offset;
}

void OptimizationProblem::add_linear_constraint(LinearConstraint c) {
  if (c.A.cols() != nx_)
    throw InvariantError("constraint " + c.name + ": matrix has wrong column count");
  if (c.A.rows() != c.rhs.size())
    throw InvariantError("constraint " + c.name + ": rhs length mismatch");
  lin_cons_.push_back(std::move(c));
}

void OptimizationProblem::add_nonlinear_constraint(NonlinearConstraint c) {
  if (c.rows <= 0) throw InvariantError("constraint " + c.name + ": needs a row count");
  nl_cons_.push_back(std::move(c));
}

void OptimizationProblem::remove_constraint(const std::string& name) {
  auto drop = [&](auto& v) {
    v.erase(std::remove_if(v.begin(), v.end(),
                           [&](const auto& c) { return c.name == name; }),
            v.end());
  };
  drop(lin_cons_);
  drop(nl_cons_);
}

const VariableBlock* OptimizationProblem::find_block(const std::string& name) const {
  for (const auto& b : blocks_)
    if (b.name == name) return &b;
  return nullptr;
}

VariableBlock* OptimizationProblem::find_block_mutable(const std::string& name) {
  for (auto& b : blocks_)
    if (b.name == name) return &b;
  return nullptr;
}

int OptimizationProblem::offset_of(const std::string& name) const {
  const VariableBlock* b = find_block(name);
  if (!b) throw InvariantError("no variable block named " + name);
  return b->offset;
}

bool OptimizationProblem::has_nonlinear() const {
  return !nl_terms_.empty() || !nl_cons_.empty();
}

bool OptimizationProblem::has_integrality() const {
  return std::any_of(blocks_.begin(), blocks_.end(),
                     [](const VariableBlock& b) { return b.integral; });
}

Vec OptimizationProblem::initial_point() const {
  Vec x(nx_);
  for (const auto& b : blocks_) x.segment(b.offset, b.size) = b.x0;
  return x;
}

Vec OptimizationProblem::lower_bounds() const {
  Vec x(nx_);
  for (const auto& b : blocks_) x.segment(b.offset, b.size) = b.lb;
  return x;
}

Vec OptimizationProblem::upper_bounds() const {
  Vec x(nx_);
  for (const auto& b : blocks_) x.segment(b.offset, b.size) = b.ub;
  return x;
}

// Blocks may be appended after a term or constraint was created (periods,
// overload slacks). Earlier matrices then address a prefix of the grown
// variable vector, so every evaluation below works on matching heads.

double OptimizationProblem::objective_value(const Vec& x) const {
  double f = 0;
  for (const auto& t : quad_terms_) {
    if (t.Q.size() > 0) {
      const auto xh = x.head(t.Q.cols());
      f += 0.5 * xh.dot(t.Q * xh);
    }
    if (t.c.size() > 0) f += t.c.dot(x.head(t.c.size()));
    f += t.k;
  }
  for (const auto& t : nl_terms_) f += t.value(x);
  return f;
}

Vec OptimizationProblem::objective_gradient(const Vec& x) const {
  Vec g = Vec::Zero(nx_);
  for (const auto& t : quad_terms_) {
    if (t.Q.size() > 0) g.head(t.Q.rows()) += t.Q * x.head(t.Q.cols());
    if (t.c.size() > 0) g.head(t.c.size()) += t.c;
  }
  for (const auto& t : nl_terms_) {
    Vec part = t.gradient(x);
    g.head(part.size()) += part;
  }
  return g;
}

namespace {

void accumulate_top_left(std::vector<Eigen::Triplet<double>>& trips, const SpMat& part) {
  for (int k = 0; k < part.outerSize(); ++k)
    for (SpMat::InnerIterator it(part, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
}

}  // namespace

SpMat OptimizationProblem::objective_hessian(const Vec& x) const {
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& t : quad_terms_)
    if (t.Q.size() > 0) accumulate_top_left(trips, t.Q);
  for (const auto& t : nl_terms_) accumulate_top_left(trips, t.hessian(x));
  SpMat h(nx_, nx_);
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

double OptimizationProblem::max_violation(const Vec& x) const {
  double v = 0;
  for (const auto& c : lin_cons_) {
    Vec r = c.A * x.head(c.A.cols()) - c.rhs;
    for (int i = 0; i < r.size(); ++i)
      v = std::max(v, c.kind == ConstraintKind::Equality ? std::abs(r[i]) : r[i]);
  }
  for (const auto& c : nl_cons_) {
    Vec r = c.value(x);
    for (int i = 0; i < r.size(); ++i)
      v = std::max(v, c.kind == ConstraintKind::Equality ? std::abs(r[i]) : r[i]);
  }
  for (const auto& b : blocks_) {
    for (int i = 0; i < b.size; ++i) {
      v = std::max(v, b.lb[i] - x[b.offset + i]);
      v = std::max(v, x[b.offset + i] - b.ub[i]);
    }
  }
  return v;
}

std::vector<std::pair<std::string, std::string>> OptimizationProblem::metadata() const {
  std::vector<std::pair<std::string, std::string>> meta;
  for (const auto& b : blocks_) meta.emplace_back("var " + b.name, std::to_string(b.size));
  for (const auto& t : quad_terms_) meta.emplace_back("obj " + t.name, t.tag);
  for (const auto& t : nl_terms_) meta.emplace_back("obj " + t.name, t.tag);
  for (const auto& c : lin_cons_) meta.emplace_back("con " + c.name, c.tag);
  for (const auto& c : nl_cons_) meta.emplace_back("con " + c.name, c.tag);
  return meta;
}

}  // namespace opfkit
