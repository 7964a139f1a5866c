#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opfkit/case.hpp"

namespace opfkit {

enum class Component { Bus, Gen, Branch };
enum class TargetParameter {
  PD, QD, GS, BS, VMAX, VMIN,                    // bus
  PMAX, PMIN, QMAX, QMIN, COST_A, COST_B, COST_C,  // gen
  RATE_A, BR_R, BR_X, BR_B                        // branch
};
enum class PatchOp { Scale, Set };
enum class Direction { Increase, Decrease, SetZero };

std::string to_string(Component c);
std::string to_string(TargetParameter p);
std::string to_string(PatchOp op);
std::string to_string(Direction d);
Component component_from_string(const std::string& s);
TargetParameter target_parameter_from_string(const std::string& s);
PatchOp patch_op_from_string(const std::string& s);
Direction direction_from_string(const std::string& s);

/// One targeted numeric modification: concrete (operation + value) or
/// directional (direction only, bound later through a placeholder binding).
struct ParameterPatch {
  Component component = Component::Bus;
  int bus_id = 0;           // bus / gen patches
  int fbus = 0, tbus = 0;   // branch patches
  std::optional<int> index; // optional pin to a single matching row
  TargetParameter target = TargetParameter::PD;
  std::optional<PatchOp> operation;
  double value = 0;
  std::optional<Direction> direction;

  bool concrete() const { return operation.has_value(); }
  /// `object_parameter_id` naming: bus_PD_1, gen_PMAX_32, branch_BR_X_2_25.
  std::string placeholder_name() const;
  std::string location_string() const;
};

/// Throws InvariantError when the patch is malformed on its own (illegal
/// component/parameter pairing, non-positive scale, both or neither of
/// operation/direction present, ...).
void validate_patch_shape(const ParameterPatch& p);

using PlaceholderBinding = std::map<std::string, double>;

/// Applies concrete patches in list order and returns a new case; the input
/// is never touched. Gen patches hit every generator at bus_id, branch
/// patches every branch matching (fbus, tbus) in either orientation.
NetworkCase apply_patches(const NetworkCase& c, const std::vector<ParameterPatch>& patches);

/// Directional application: each patch's bound value is checked against the
/// base value (componentwise) before assignment. Throws GuardError on a
/// violated direction, Error on a missing binding.
NetworkCase apply_directional_patches(const NetworkCase& c,
                                      const std::vector<ParameterPatch>& patches,
                                      const PlaceholderBinding& bindings);

enum class ProblemType { ACOPF, DCOPF, ED, MULTIPERIOD_DC, OTS_DC, LOAD_SHED };
std::string to_string(ProblemType p);
ProblemType problem_type_from_string(const std::string& s);

/// Objective extension identifiers (ADP, VDP, LOP, EEC, PLC, RRI).
struct ObjectiveExt {
  std::string op = "add";
  std::string name;
  std::map<std::string, double> params;
};

/// Constraint extension identifiers (N1_SECURITY_DC, RESERVE_LIMIT).
struct ConstraintExt {
  std::string op = "add";
  std::string name;
  std::vector<int> contingencies;              // N1: 1-based branch indices
  std::vector<double> reserve_up, reserve_down;  // RESERVE: MW, broadcast if size 1
};

/// Extra data some problem types need (horizon/profiles, switchable set,
/// shed weights). Carried inside the structural modification.
struct ProblemParams {
  int horizon = 0;
  std::vector<std::vector<double>> profile;  // per period, per bus (or size-1 rows = uniform)
  std::vector<int> switchable;               // 1-based branch indices
  double shed_weight = 0;                    // $/MWh, uniform
};

struct StructuralMod {
  ProblemType problem = ProblemType::ACOPF;
  std::vector<ObjectiveExt> objective_mods;
  std::vector<ConstraintExt> constraint_mods;
  ProblemParams problem_params;

  bool is_empty() const {
    return problem == ProblemType::ACOPF && objective_mods.empty() && constraint_mods.empty();
  }
};

struct ResolutionSpec {
  std::string solver = "MIPS";  // requested name; MIPS/IPOPT alias to the in-house IPM
  double opf_violation = 5e-6;
  int precision = 6;
  int verbosity = 1;
};

enum class Level { L1, L2, L3, L4 };
std::string to_string(Level l);
Level level_from_string(const std::string& s);
/// L1/L3 carry concrete patches (concrete modeling); L2/L4 directional.
bool level_is_concrete(Level l);

/// The modification-based model representation: base system, parameter
/// patches, structural modification and solving requirements.
struct ModelSpec {
  Level level = Level::L1;
  std::string base_system;
  std::vector<ParameterPatch> patches;
  StructuralMod structural;
  ResolutionSpec resolution;
};

nlohmann::ordered_json spec_to_json(const ModelSpec& m);
ModelSpec spec_from_json(const nlohmann::json& doc);
/// Canonical bytes used for equality grouping and hashing.
std::string canonical_spec(const ModelSpec& m);

// ---------------------------------------------------------------------------
// Compatibility rule table
// ---------------------------------------------------------------------------

struct DirectionalTriple {
  Component component;
  TargetParameter parameter;
  Direction direction;
  bool operator<(const DirectionalTriple& o) const {
    return std::tie(component, parameter, direction) <
           std::tie(o.component, o.parameter, o.direction);
  }
};

/// The expert rule table: forbidden (problem, parameter) pairs, forbidden
/// (problem, extension) pairs, and the curated directional sampling space.
class RuleTable {
public:
  static const RuleTable& defaults();  // embedded rules/compatibility.json
  static RuleTable from_json(const nlohmann::json& doc);

  /// Every (problem, parameter) pair classifies as allowed or forbidden.
  bool parameter_allowed(ProblemType p, TargetParameter t) const;
  bool extension_allowed(ProblemType p, const std::string& ext_name) const;
  bool rate_a_requires_rated_branch() const { return rate_a_rule_; }
  const std::vector<DirectionalTriple>& directional_space() const { return directional_; }

private:
  std::map<std::string, std::vector<std::string>> forbidden_params_;
  std::map<std::string, std::vector<std::string>> forbidden_exts_;
  bool rate_a_rule_ = true;
  std::vector<DirectionalTriple> directional_;
};

struct Violation {
  int patch_index = -1;  // -1 when the violation is about an extension
  std::string message;
};

/// Pure rule-table query: every (s, delta) pair present in the table is
/// returned; empty result means compatible.
std::vector<Violation> check_compatibility(const StructuralMod& s,
                                           const std::vector<ParameterPatch>& patches,
                                           const RuleTable& rules);

struct Diagnostic {
  std::string code;
  std::string message;
};

struct SpecLimits {
  int k_o = 1, k_c = 1;          // L3 cardinality bounds
  int k_o_prime = 2, k_c_prime = 2;  // L4 (relaxed) bounds
};

/// Checks all ModelSpec invariants plus compatibility; never throws. An
/// empty result means the spec is synthesizable/executable. When the base
/// system resolves through the registry, case-dependent checks (dangling
/// targets, all-ratings-zero) run as well.
std::vector<Diagnostic> validate_spec(const ModelSpec& m, const RuleTable& rules,
                                      const SpecLimits& limits = {});
std::vector<Diagnostic> validate_spec(const ModelSpec& m);

}  // namespace opfkit
