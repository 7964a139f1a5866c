#include <doctest.h>

#include <cmath>
#include <cstring>

#include "opfkit/case.hpp"
#include "opfkit/errors.hpp"
#include "opfkit/formulations.hpp"
#include "opfkit/powerflow.hpp"
#include "opfkit/solver.hpp"

using namespace opfkit;

namespace {

OptimizationProblem one_dim_quadratic() {
  // min (x-3)^2 on [0, 10]
  OptimizationProblem p;
  p.add_block("x", 1, Vec::Constant(1, 0.0), Vec::Constant(1, 10.0), Vec::Constant(1, 5.0));
  QuadraticTerm t;
  t.name = "sq";
  t.Q.resize(1, 1);
  t.Q.insert(0, 0) = 2.0;
  t.c = Vec::Constant(1, -6.0);
  t.k = 9.0;
  p.add_quadratic(std::move(t));
  return p;
}

NetworkCase two_gen_case(double demand, double pmax1, double pmax2, double c2_1, double c1_1,
                         double c2_2, double c1_2) {
  nlohmann::json doc = {
      {"schema", "case/1"},
      {"name", "twogen"},
      {"base_mva", 100.0},
      {"buses",
       {{{"id", 1}, {"btype", "REF"}, {"pd", demand}, {"qd", 0.0}, {"gs", 0.0}, {"bs", 0.0},
         {"vm", 1.0}, {"va", 0.0}, {"base_kv", 100.0}, {"vmax", 1.1}, {"vmin", 0.9}},
        {{"id", 2}, {"btype", "PV"}, {"pd", 0.0}, {"qd", 0.0}, {"gs", 0.0}, {"bs", 0.0},
         {"vm", 1.0}, {"va", 0.0}, {"base_kv", 100.0}, {"vmax", 1.1}, {"vmin", 0.9}}}},
      {"gens",
       {{{"bus", 1}, {"pg", 0.0}, {"qg", 0.0}, {"qmax", 100.0}, {"qmin", -100.0}, {"vg", 1.0},
         {"status", 1}, {"pmax", pmax1}, {"pmin", 0.0}},
        {{"bus", 2}, {"pg", 0.0}, {"qg", 0.0}, {"qmax", 100.0}, {"qmin", -100.0}, {"vg", 1.0},
         {"status", 1}, {"pmax", pmax2}, {"pmin", 0.0}}}},
      {"branches",
       {{{"fbus", 1}, {"tbus", 2}, {"r", 0.0}, {"x", 0.1}, {"b", 0.0}, {"rate_a", 0.0},
         {"tap", 1.0}, {"shift", 0.0}, {"status", 1}}}},
      {"gencosts",
       {{{"model", 2}, {"startup", 0.0}, {"shutdown", 0.0}, {"ncost", 3},
         {"coeffs", {c2_1, c1_1, 0.0}}},
        {{"model", 2}, {"startup", 0.0}, {"shutdown", 0.0}, {"ncost", 3},
         {"coeffs", {c2_2, c1_2, 0.0}}}}}};
  return json_to_case(doc);
}

}  // namespace

TEST_CASE("one dimensional quadratic reaches its minimizer") {
  Solution s = solve_nlp(one_dim_quadratic(), SolverOptions{});
  CHECK(s.status == SolveStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(s.f == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("economic dispatch splits identical generators evenly") {
  NetworkCase c = two_gen_case(100, 100, 100, 1.0, 0.0, 1.0, 0.0);
  Solution s = solve_qp_lp(build_ed(c), SolverOptions{});
  CHECK(s.status == SolveStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(0.5).epsilon(1e-6));  // p.u.
  CHECK(s.x[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(s.f == doctest::Approx(2 * 1.0 * 50 * 50).epsilon(1e-6));
}

TEST_CASE("infeasible dispatch is reported as Infeasible") {
  NetworkCase c = two_gen_case(50, 40, 0, 0.01, 10, 0.01, 10);
  c.gens[1].status = 0;
  Solution s = solve_qp_lp(build_ed(c), SolverOptions{});
  CHECK(s.status == SolveStatus::Infeasible);
}

TEST_CASE("merit order dispatch with linear costs") {
  // cheap gen capped at its 60 MW limit, the rest from the expensive one
  NetworkCase c = two_gen_case(100, 60, 60, 0.0, 10.0, 0.0, 20.0);
  Solution s = solve_qp_lp(build_ed(c), SolverOptions{});
  CHECK(s.status == SolveStatus::Optimal);
  CHECK(s.x[0] * 100 == doctest::Approx(60.0).epsilon(1e-5));
  CHECK(s.x[1] * 100 == doctest::Approx(40.0).epsilon(1e-5));
  CHECK(s.f == doctest::Approx(600.0 + 800.0).epsilon(1e-7));
}

TEST_CASE("unbounded problems surface as NumericalFailure with a diagnostic") {
  OptimizationProblem p;
  p.add_block("x", 1, Vec::Constant(1, 0.0),
              Vec::Constant(1, std::numeric_limits<double>::infinity()),
              Vec::Constant(1, 1.0));
  QuadraticTerm t;
  t.name = "lin";
  t.c = Vec::Constant(1, -1.0);
  p.add_quadratic(std::move(t));
  Solution s = solve_qp_lp(p, SolverOptions{});
  CHECK(s.status == SolveStatus::NumericalFailure);
  CHECK(s.diagnostic.find("unbounded") != std::string::npos);
}

TEST_CASE("case9 ACOPF matches the reference objective") {
  Solution s = solve_nlp(build_acopf(load_case("case9")), solver_options_for(5e-6));
  CHECK(s.status == SolveStatus::Optimal);
  // frozen after a one-time cross-check against the standard published value
  CHECK(s.f == doctest::Approx(5296.6862).epsilon(1e-4));
}

TEST_CASE("solver is deterministic bit for bit") {
  OptimizationProblem p = build_acopf(load_case("case14"));
  Solution a = solve_nlp(p, SolverOptions{});
  Solution b = solve_nlp(p, SolverOptions{});
  REQUIRE(a.x.size() == b.x.size());
  CHECK(std::memcmp(a.x.data(), b.x.data(), a.x.size() * sizeof(double)) == 0);
  CHECK(a.iterations == b.iterations);
  CHECK(a.f == b.f);
}

TEST_CASE("convex problems agree across warm starts") {
  OptimizationProblem p1 = build_dcopf(load_case("case14"));
  OptimizationProblem p2 = build_dcopf(load_case("case14"));
  VariableBlock* pg = p2.find_block_mutable("Pg");
  for (int i = 0; i < pg->size; ++i)
    pg->x0[i] = 0.5 * (pg->lb[i] + std::min(pg->ub[i], pg->lb[i] + 1.0));
  Solution a = solve_qp_lp(p1, SolverOptions{});
  Solution b = solve_qp_lp(p2, SolverOptions{});
  CHECK(a.status == SolveStatus::Optimal);
  CHECK(b.status == SolveStatus::Optimal);
  CHECK(std::abs(a.f - b.f) / (1 + std::abs(a.f)) < 1e-7);
}

TEST_CASE("feasibility honesty: optimal solutions verify independently") {
  for (const char* name : {"case9", "case14"}) {
    OptimizationProblem p = build_acopf(load_case(name));
    SolverOptions opt = solver_options_for(5e-6);
    Solution s = solve_nlp(p, opt);
    REQUIRE(s.status == SolveStatus::Optimal);
    KktResidual r = check_kkt(p, s);
    CHECK(r.primal_feasibility <= opt.feasibility_tol);
    CHECK(r.dual_feasibility <= 1e-10);
    CHECK(r.stationarity <= 1e-6);
    CHECK(p.max_violation(s.x) <= opt.feasibility_tol);
  }
}

TEST_CASE("check_kkt is sensitive to primal perturbations") {
  OptimizationProblem p = build_acopf(load_case("case9"));
  Solution s = solve_nlp(p, solver_options_for(5e-6));
  REQUIRE(s.status == SolveStatus::Optimal);
  KktResidual at_opt = check_kkt(p, s);
  Solution perturbed = s;
  perturbed.x[0] += 1e-2;
  perturbed.x[3] -= 1e-2;
  KktResidual off = check_kkt(p, perturbed);
  CHECK(off.stationarity + off.primal_feasibility >
        10 * (at_opt.stationarity + at_opt.primal_feasibility));
}

TEST_CASE("hand-built KKT point of a 2-variable QP checks out") {
  // min x0^2 + x1^2 s.t. x0 + x1 = 2; optimum (1,1), lambda = -2
  OptimizationProblem p;
  p.add_block("x", 2, Vec::Constant(2, -10.0), Vec::Constant(2, 10.0), Vec::Zero(2));
  QuadraticTerm t;
  t.name = "sq";
  t.Q.resize(2, 2);
  t.Q.insert(0, 0) = 2.0;
  t.Q.insert(1, 1) = 2.0;
  p.add_quadratic(std::move(t));
  LinearConstraint eq;
  eq.name = "sum";
  eq.kind = ConstraintKind::Equality;
  eq.A.resize(1, 2);
  eq.A.insert(0, 0) = 1.0;
  eq.A.insert(0, 1) = 1.0;
  eq.rhs = Vec::Constant(1, 2.0);
  p.add_linear_constraint(std::move(eq));

  Solution hand;
  hand.x = Vec::Constant(2, 1.0);
  hand.duals["sum"] = Vec::Constant(1, -2.0);
  hand.duals["bounds"] = Vec::Zero(4);
  KktResidual r = check_kkt(p, hand);
  CHECK(r.stationarity < 1e-12);
  CHECK(r.primal_feasibility < 1e-12);
  CHECK(r.complementarity < 1e-12);

  Solution s = solve_qp_lp(p, SolverOptions{});
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.f == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("corrupted constraint gradient breaks convergence that clean one achieves") {
  // min (x0-1)^2 + (x1+2)^2 s.t. x0 + x1 = 5; the corrupted variant reports
  // a sign-flipped constraint gradient, so Newton steps push the residual
  // the wrong way
  auto make = [](bool corrupt) {
    OptimizationProblem p;
    p.add_block("x", 2, Vec::Constant(2, -50.0), Vec::Constant(2, 50.0),
                Vec::Constant(2, 0.0));
    QuadraticTerm t;
    t.name = "obj";
    t.Q.resize(2, 2);
    t.Q.insert(0, 0) = 2.0;
    t.Q.insert(1, 1) = 2.0;
    t.c = Vec(2);
    t.c << -2.0, 4.0;
    t.k = 5.0;
    p.add_quadratic(std::move(t));
    NonlinearConstraint con;
    con.name = "sum";
    con.kind = ConstraintKind::Equality;
    con.rows = 1;
    con.value = [](const Vec& x) { return Vec::Constant(1, x[0] + x[1] - 5.0); };
    con.jacobian = [corrupt](const Vec&) {
      SpMat j(1, 2);
      const double s = corrupt ? -1.0 : 1.0;
      j.insert(0, 0) = s;
      j.insert(0, 1) = s;
      return j;
    };
    con.hessian = [](const Vec&, const Vec&) { return SpMat(2, 2); };
    p.add_nonlinear_constraint(std::move(con));
    return p;
  };
  SolverOptions opt;
  opt.max_iter = 60;
  Solution clean = solve_nlp(make(false), opt);
  CHECK(clean.status == SolveStatus::Optimal);
  CHECK(clean.x[0] == doctest::Approx(4.0).epsilon(1e-6));
  Solution broken = solve_nlp(make(true), opt);
  CHECK(broken.status != SolveStatus::Optimal);
}

TEST_CASE("milp with all binaries fixed equals the relaxation") {
  OptimizationProblem p;
  p.add_block("x", 1, Vec::Constant(1, 0.0), Vec::Constant(1, 10.0), Vec::Constant(1, 5.0));
  p.add_block("z", 1, Vec::Ones(1), Vec::Ones(1), Vec::Ones(1), /*integral=*/true);
  QuadraticTerm t;
  t.name = "sq";
  t.Q.resize(2, 2);
  t.Q.insert(0, 0) = 2.0;
  t.c = Vec::Zero(2);
  t.c[0] = -6.0;
  t.k = 9.0;
  p.add_quadratic(std::move(t));
  Solution s = solve_milp(p, SolverOptions{});
  CHECK(s.status == SolveStatus::Optimal);
  CHECK(s.f == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(s.bb_nodes >= 1);
}

TEST_CASE("newton power flow: flat unloaded case needs no correction") {
  nlohmann::json doc = case_to_json(load_case("case9"));
  NetworkCase c = json_to_case(doc);
  for (auto& b : c.buses) {
    b.pd = b.qd = 0;
    b.vm = 1;
    b.va = 0;
  }
  for (auto& g : c.gens) {
    g.pg = g.qg = 0;
    g.vg = 1;
  }
  // zero charging so the flat profile is an exact solution
  for (auto& br : c.branches) br.b = 0;
  PowerFlowResult r = newton_power_flow(c);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.max_mismatch < 1e-10);
}

TEST_CASE("newton power flow diverges on absurd loading") {
  NetworkCase c = load_case("case9");
  for (auto& b : c.buses) {
    b.pd *= 100;
    b.qd *= 100;
  }
  CHECK_THROWS_AS(newton_power_flow(c), Error);
}
