#pragma once

#include <vector>

#include "opfkit/case.hpp"
#include "opfkit/modelspec.hpp"
#include "opfkit/problem.hpp"

namespace opfkit {

/// Case echoed with the solution written into vm/va/pg/qg.
struct SolvedCase {
  NetworkCase case_data;
  double f = 0;
  bool success = false;
  double violation = 0;  // max constraint violation, p.u.
  int iterations = 0;
  double wall_time = 0;  // seconds
};

/// Full AC optimal power flow: variables [Va, Vm, Pg, Qg], nonlinear power
/// balance per bus, squared apparent-power branch limits, polynomial cost.
OptimizationProblem build_acopf(const NetworkCase& c);

/// Linearised formulation on [Va, Pg] with 1/x susceptances and angle-based
/// flow limits. rate_a = 0 branches carry no flow constraint.
OptimizationProblem build_dcopf(const NetworkCase& c);

/// Network-free dispatch: [Pg], one balance equality, cost.
OptimizationProblem build_ed(const NetworkCase& c);

/// AC OPF plus per-load continuous shedding variables with weights ($/MWh);
/// `weights` is either one entry (uniform) or one per bus with pd > 0.
OptimizationProblem build_load_shedding(const NetworkCase& c,
                                        const std::vector<double>& weights);

/// T coupled DC OPF periods; profile[t] holds per-bus demand multipliers (a
/// single entry broadcasts to all buses). Ramp limits couple the periods.
OptimizationProblem build_multiperiod_dc(const NetworkCase& c,
                                         const std::vector<std::vector<double>>& profile,
                                         int horizon);

/// DC OPF with binary switching status for the listed branches (1-based case
/// indices), big-M flow coupling derived from the angle range.
OptimizationProblem build_ots_dc(const NetworkCase& c, const std::vector<int>& switchable,
                                 int switchable_cap = 12);

OptimizationProblem add_objective_extension(OptimizationProblem p, const ObjectiveExt& ext,
                                            const NetworkCase& c);
OptimizationProblem add_constraint_extension(OptimizationProblem p, const ConstraintExt& ext,
                                             const NetworkCase& c);

/// Dispatches on the structural modification and folds every extension in
/// list order. `r` rides along for interface completeness (solver options
/// derive from it at solve time).
OptimizationProblem build_problem(const NetworkCase& c, const StructuralMod& s,
                                  const ResolutionSpec& r);

/// Writes the primal vector back into a case copy (Va in degrees, Vm, Pg,
/// Qg in machine units), evaluates f from the full objective and the max
/// constraint violation.
SolvedCase extract_solution(const OptimizationProblem& p, const Vec& x, const NetworkCase& c,
                            const ResolutionSpec& r);

/// In-service generator rows, the order variable blocks use.
std::vector<int> in_service_gens(const NetworkCase& c);

/// DC network quantities shared by the DC-family builders.
struct DcNetwork {
  SpMat bbus;                    // nb x nb
  SpMat bf;                      // rows x nb, one row per included in-service branch
  Vec pfinj;                     // rows
  Vec pbusinj;                   // nb
  std::vector<int> branch_rows;  // case branch index per row
  Vec flow_limit;                // p.u.; 0 = unlimited
};
DcNetwork make_dc_network(const NetworkCase& c, const std::vector<int>& excluded = {});

/// True when removing branch `excluded` (1-based) disconnects the in-service
/// graph.
bool branch_is_bridge(const NetworkCase& c, int excluded);

}  // namespace opfkit
