#include "opfkit/modelspec.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "opfkit/embedded.hpp"
#include "opfkit/errors.hpp"
#include "opfkit/util.hpp"

namespace opfkit {

// ---------------------------------------------------------------------------
// Enum spellings
// ---------------------------------------------------------------------------

std::string to_string(Component c) {
  switch (c) {
    case Component::Bus: return "bus";
    case Component::Gen: return "gen";
    case Component::Branch: return "branch";
  }
  return "bus";
}

Component component_from_string(const std::string& s) {
  if (s == "bus") return Component::Bus;
  if (s == "gen") return Component::Gen;
  if (s == "branch") return Component::Branch;
  throw SchemaError("unknown component '" + s + "'", "/parameter_modifications");
}

namespace {
const char* kParamNames[] = {"PD",   "QD",   "GS",     "BS",     "VMAX",   "VMIN",
                             "PMAX", "PMIN", "QMAX",   "QMIN",   "COST_A", "COST_B",
                             "COST_C", "RATE_A", "BR_R", "BR_X", "BR_B"};
}

std::string to_string(TargetParameter p) { return kParamNames[static_cast<int>(p)]; }

TargetParameter target_parameter_from_string(const std::string& s) {
  for (int i = 0; i < 17; ++i)
    if (s == kParamNames[i]) return static_cast<TargetParameter>(i);
  throw SchemaError("unknown target_parameter '" + s + "'", "/parameter_modifications");
}

std::string to_string(PatchOp op) { return op == PatchOp::Scale ? "Scale" : "Set"; }

PatchOp patch_op_from_string(const std::string& s) {
  if (s == "Scale") return PatchOp::Scale;
  if (s == "Set") return PatchOp::Set;
  throw SchemaError("unknown operation '" + s + "'", "/parameter_modifications");
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::Increase: return "Increase";
    case Direction::Decrease: return "Decrease";
    case Direction::SetZero: return "Set zero";
  }
  return "Increase";
}

Direction direction_from_string(const std::string& s) {
  if (s == "Increase") return Direction::Increase;
  if (s == "Decrease") return Direction::Decrease;
  if (s == "Set zero" || s == "SetZero") return Direction::SetZero;
  throw SchemaError("unknown direction '" + s + "'", "/parameter_modifications");
}

std::string to_string(ProblemType p) {
  switch (p) {
    case ProblemType::ACOPF: return "ACOPF";
    case ProblemType::DCOPF: return "DCOPF";
    case ProblemType::ED: return "ED";
    case ProblemType::MULTIPERIOD_DC: return "MULTIPERIOD_DC";
    case ProblemType::OTS_DC: return "OTS_DC";
    case ProblemType::LOAD_SHED: return "LOAD_SHED";
  }
  return "ACOPF";
}

ProblemType problem_type_from_string(const std::string& s) {
  if (s == "ACOPF") return ProblemType::ACOPF;
  if (s == "DCOPF") return ProblemType::DCOPF;
  if (s == "ED") return ProblemType::ED;
  if (s == "MULTIPERIOD_DC" || s == "MULTIPERIOD") return ProblemType::MULTIPERIOD_DC;
  if (s == "OTS_DC" || s == "OTS") return ProblemType::OTS_DC;
  if (s == "LOAD_SHED") return ProblemType::LOAD_SHED;
  throw SchemaError("unknown problem type '" + s + "'", "/structural_modification/problem");
}

std::string to_string(Level l) {
  switch (l) {
    case Level::L1: return "L1";
    case Level::L2: return "L2";
    case Level::L3: return "L3";
    case Level::L4: return "L4";
  }
  return "L1";
}

Level level_from_string(const std::string& s) {
  if (s == "L1") return Level::L1;
  if (s == "L2") return Level::L2;
  if (s == "L3") return Level::L3;
  if (s == "L4") return Level::L4;
  throw SchemaError("unknown level '" + s + "'", "/level");
}

bool level_is_concrete(Level l) { return l == Level::L1 || l == Level::L3; }

// ---------------------------------------------------------------------------
// Patch mechanics
// ---------------------------------------------------------------------------

namespace {

bool is_bus_param(TargetParameter t) {
  return t == TargetParameter::PD || t == TargetParameter::QD || t == TargetParameter::GS ||
         t == TargetParameter::BS || t == TargetParameter::VMAX || t == TargetParameter::VMIN;
}

bool is_gen_param(TargetParameter t) {
  return t == TargetParameter::PMAX || t == TargetParameter::PMIN ||
         t == TargetParameter::QMAX || t == TargetParameter::QMIN ||
         t == TargetParameter::COST_A || t == TargetParameter::COST_B ||
         t == TargetParameter::COST_C;
}

bool is_branch_param(TargetParameter t) {
  return t == TargetParameter::RATE_A || t == TargetParameter::BR_R ||
         t == TargetParameter::BR_X || t == TargetParameter::BR_B;
}

double& bus_field(BusRecord& b, TargetParameter t) {
  switch (t) {
    case TargetParameter::PD: return b.pd;
    case TargetParameter::QD: return b.qd;
    case TargetParameter::GS: return b.gs;
    case TargetParameter::BS: return b.bs;
    case TargetParameter::VMAX: return b.vmax;
    default: return b.vmin;
  }
}

double& gen_field(NetworkCase& c, int row, TargetParameter t) {
  GenRecord& g = c.gens[row];
  switch (t) {
    case TargetParameter::PMAX: return g.pmax;
    case TargetParameter::PMIN: return g.pmin;
    case TargetParameter::QMAX: return g.qmax;
    case TargetParameter::QMIN: return g.qmin;
    case TargetParameter::COST_A:
    case TargetParameter::COST_B:
    case TargetParameter::COST_C: {
      if (c.gencosts.size() != c.gens.size())
        throw InvariantError("cost patch on a case without gencost data");
      GenCost& gc = c.gencosts[row];
      if (gc.ncost != 3)
        throw InvariantError("cost coefficient patches are only defined for ncost=3 rows");
      int k = t == TargetParameter::COST_A ? 0 : t == TargetParameter::COST_B ? 1 : 2;
      return gc.coeffs[k];
    }
    default: throw InvariantError("not a generator parameter");
  }
}

double& branch_field(BranchRecord& br, TargetParameter t) {
  switch (t) {
    case TargetParameter::RATE_A: return br.rate_a;
    case TargetParameter::BR_R: return br.r;
    case TargetParameter::BR_X: return br.x;
    default: return br.b;
  }
}

/// Resolves the rows a patch addresses. Throws InvariantError when the
/// referenced bus/gen/branch does not exist.
std::vector<int> resolve_rows(const NetworkCase& c, const ParameterPatch& p, int patch_pos) {
  std::vector<int> rows;
  const std::string where = "patch " + std::to_string(patch_pos + 1) + " (" +
                            to_string(p.target) + " at " + p.location_string() + ")";
  if (p.component == Component::Bus) {
    int i = c.bus_index(p.bus_id);
    if (i < 0) throw InvariantError(where + ": bus does not exist");
    rows.push_back(i);
  } else if (p.component == Component::Gen) {
    rows = c.gens_at_bus(p.bus_id);
    if (rows.empty()) throw InvariantError(where + ": no generator at that bus");
  } else {
    rows = c.branches_between(p.fbus, p.tbus);
    if (rows.empty()) throw InvariantError(where + ": no branch between those buses");
  }
  if (p.index) {
    if (std::find(rows.begin(), rows.end(), *p.index) == rows.end())
      throw InvariantError(where + ": pinned index does not match the target");
    rows = {*p.index};
  }
  return rows;
}

double& field_ref(NetworkCase& c, const ParameterPatch& p, int row) {
  if (p.component == Component::Bus) return bus_field(c.buses[row], p.target);
  if (p.component == Component::Gen) return gen_field(c, row, p.target);
  return branch_field(c.branches[row], p.target);
}

}  // namespace

std::string ParameterPatch::location_string() const {
  if (component == Component::Branch)
    return std::to_string(fbus) + "-" + std::to_string(tbus);
  return "bus " + std::to_string(bus_id);
}

std::string ParameterPatch::placeholder_name() const {
  std::string base = to_string(component) + "_" + to_string(target) + "_";
  if (component == Component::Branch)
    return base + std::to_string(fbus) + "_" + std::to_string(tbus);
  return base + std::to_string(bus_id);
}

void validate_patch_shape(const ParameterPatch& p) {
  if (p.operation.has_value() == p.direction.has_value())
    throw InvariantError("patch must carry exactly one of operation/direction");
  bool legal = (p.component == Component::Bus && is_bus_param(p.target)) ||
               (p.component == Component::Gen && is_gen_param(p.target)) ||
               (p.component == Component::Branch && is_branch_param(p.target));
  if (!legal)
    throw InvariantError("target_parameter " + to_string(p.target) +
                         " is not legal for component " + to_string(p.component));
  if (p.operation) {
    if (!std::isfinite(p.value)) throw InvariantError("patch value must be finite");
    if (*p.operation == PatchOp::Scale && !(p.value > 0))
      throw InvariantError("Scale value must be positive");
  }
}

NetworkCase apply_patches(const NetworkCase& c, const std::vector<ParameterPatch>& patches) {
  NetworkCase out = c;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const ParameterPatch& p = patches[i];
    validate_patch_shape(p);
    if (!p.concrete())
      throw InvariantError("apply_patches requires concrete patches; patch " +
                           std::to_string(i + 1) + " is directional");
    for (int row : resolve_rows(out, p, static_cast<int>(i))) {
      double& f = field_ref(out, p, row);
      f = (*p.operation == PatchOp::Scale) ? f * p.value : p.value;
    }
  }
  validate_case(out);  // rejects orderings broken beyond the allowed VMIN -> 0
  return out;
}

NetworkCase apply_directional_patches(const NetworkCase& c,
                                      const std::vector<ParameterPatch>& patches,
                                      const PlaceholderBinding& bindings) {
  NetworkCase out = c;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const ParameterPatch& p = patches[i];
    validate_patch_shape(p);
    if (p.concrete()) {
      for (int row : resolve_rows(out, p, static_cast<int>(i))) {
        double& f = field_ref(out, p, row);
        f = (*p.operation == PatchOp::Scale) ? f * p.value : p.value;
      }
      continue;
    }
    const std::string name = p.placeholder_name();
    auto it = bindings.find(name);
    if (it == bindings.end()) throw Error("missing binding for placeholder " + name);
    const double bound = it->second;
    for (int row : resolve_rows(out, p, static_cast<int>(i))) {
      double& f = field_ref(out, p, row);
      const double base = f;
      bool ok = true;
      switch (*p.direction) {
        case Direction::Increase: ok = bound >= base; break;
        case Direction::Decrease: ok = bound <= base; break;
        case Direction::SetZero: ok = bound == 0; break;
      }
      if (!ok)
        throw GuardError("guard violation for " + name + ": direction " +
                         to_string(*p.direction) + ", base value " + format_number(base) +
                         ", offered " + format_number(bound));
      f = bound;
    }
  }
  validate_case(out);
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

/// Accepts both the short extension identifiers and the descriptive names
/// found in model specifications in the wild.
std::string canonical_objective_name(std::string s) {
  if (s == "angle_difference_penalty" || s == "ang_diff_pen") return "ADP";
  if (s == "voltage_deviation_penalty") return "VDP";
  if (s == "line_overload_penalty") return "LOP";
  if (s == "environmental_emission_cost" || s == "emission_cost") return "EEC";
  if (s == "active_power_loss_cost" || s == "power_loss_cost") return "PLC";
  if (s == "reactive_reserve_insufficiency_cost") return "RRI";
  return s;
}

std::string canonical_constraint_name(std::string s) {
  if (s == "N-1_security" || s == "n1_security" || s == "N1_SECURITY") return "N1_SECURITY_DC";
  if (s == "reserve_limit") return "RESERVE_LIMIT";
  return s;
}

nlohmann::ordered_json patch_to_json(const ParameterPatch& p) {
  nlohmann::ordered_json j;
  j["component"] = to_string(p.component);
  if (p.component == Component::Branch) {
    j["fbus"] = p.fbus;
    j["tbus"] = p.tbus;
  } else {
    j["bus_id"] = p.bus_id;
  }
  if (p.index) j["index"] = *p.index;
  j["target_parameter"] = to_string(p.target);
  if (p.operation) {
    j["operation"] = to_string(*p.operation);
    j["value"] = p.value;
  } else {
    j["direction"] = to_string(*p.direction);
  }
  return j;
}

ParameterPatch patch_from_json(const nlohmann::json& j, const std::string& ptr) {
  if (!j.is_object()) throw SchemaError("patch must be an object", ptr);
  ParameterPatch p;
  if (!j.contains("component")) throw SchemaError("missing 'component'", ptr);
  p.component = component_from_string(j.at("component").get<std::string>());
  if (p.component == Component::Branch) {
    if (!j.contains("fbus") || !j.contains("tbus"))
      throw SchemaError("branch patch needs fbus/tbus", ptr);
    p.fbus = j.at("fbus").get<int>();
    p.tbus = j.at("tbus").get<int>();
  } else {
    if (!j.contains("bus_id")) throw SchemaError("missing 'bus_id'", ptr);
    p.bus_id = j.at("bus_id").get<int>();
  }
  if (j.contains("index")) p.index = j.at("index").get<int>();
  if (!j.contains("target_parameter")) throw SchemaError("missing 'target_parameter'", ptr);
  p.target = target_parameter_from_string(j.at("target_parameter").get<std::string>());
  const bool has_op = j.contains("operation");
  const bool has_dir = j.contains("direction");
  if (has_op == has_dir)
    throw SchemaError("patch needs exactly one of operation/direction", ptr);
  if (has_op) {
    p.operation = patch_op_from_string(j.at("operation").get<std::string>());
    if (!j.contains("value")) throw SchemaError("missing 'value'", ptr);
    p.value = j.at("value").get<double>();
  } else {
    p.direction = direction_from_string(j.at("direction").get<std::string>());
  }
  validate_patch_shape(p);
  return p;
}

nlohmann::ordered_json objective_ext_to_json(const ObjectiveExt& e) {
  nlohmann::ordered_json j;
  j["op"] = e.op;
  j["name"] = e.name;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : e.params) j["params"][k] = v;
  return j;
}

ObjectiveExt objective_ext_from_json(const nlohmann::json& j, const std::string& ptr) {
  ObjectiveExt e;
  e.op = j.value("op", "add");
  if (e.op != "add") throw SchemaError("only 'add' objective modifications are supported", ptr);
  if (!j.contains("name")) throw SchemaError("missing 'name'", ptr);
  e.name = canonical_objective_name(j.at("name").get<std::string>());
  if (j.contains("params"))
    for (const auto& [k, v] : j.at("params").items()) e.params[k] = v.get<double>();
  // descriptive form: numeric fields sit beside op/name (e.g. "beta": 10)
  for (const auto& [k, v] : j.items())
    if (k != "op" && k != "name" && k != "form" && k != "params" && v.is_number())
      e.params[k] = v.get<double>();
  return e;
}

nlohmann::ordered_json constraint_ext_to_json(const ConstraintExt& e) {
  nlohmann::ordered_json j;
  j["op"] = e.op;
  j["name"] = e.name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  if (!e.contingencies.empty()) params["contingencies"] = e.contingencies;
  if (!e.reserve_up.empty()) params["up"] = e.reserve_up;
  if (!e.reserve_down.empty()) params["down"] = e.reserve_down;
  j["params"] = params;
  return j;
}

std::vector<double> number_or_array(const nlohmann::json& v) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) out.push_back(x.get<double>());
  }
  return out;
}

ConstraintExt constraint_ext_from_json(const nlohmann::json& j, const std::string& ptr) {
  ConstraintExt e;
  e.op = j.value("op", "add");
  if (e.op != "add") throw SchemaError("only 'add' constraint modifications are supported", ptr);
  if (!j.contains("name")) throw SchemaError("missing 'name'", ptr);
  e.name = canonical_constraint_name(j.at("name").get<std::string>());
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  if (params.contains("contingencies"))
    for (const auto& v : params.at("contingencies")) e.contingencies.push_back(v.get<int>());
  if (params.contains("up")) e.reserve_up = number_or_array(params.at("up"));
  if (params.contains("down")) e.reserve_down = number_or_array(params.at("down"));
  return e;
}

}  // namespace

nlohmann::ordered_json spec_to_json(const ModelSpec& m) {
  nlohmann::ordered_json j;
  j["schema"] = "spec/1";
  j["level"] = to_string(m.level);
  j["base_system"] = m.base_system;
  j["parameter_modifications"] = nlohmann::ordered_json::array();
  for (const auto& p : m.patches) j["parameter_modifications"].push_back(patch_to_json(p));
  nlohmann::ordered_json s;
  s["problem"] = to_string(m.structural.problem);
  s["objective_modification"] = nlohmann::ordered_json::array();
  for (const auto& e : m.structural.objective_mods)
    s["objective_modification"].push_back(objective_ext_to_json(e));
  s["constraint_modification"] = nlohmann::ordered_json::array();
  for (const auto& e : m.structural.constraint_mods)
    s["constraint_modification"].push_back(constraint_ext_to_json(e));
  const ProblemParams& pp = m.structural.problem_params;
  if (pp.horizon > 0 || !pp.switchable.empty() || pp.shed_weight != 0 || !pp.profile.empty()) {
    nlohmann::ordered_json extras = nlohmann::ordered_json::object();
    if (pp.horizon > 0) extras["horizon"] = pp.horizon;
    if (!pp.profile.empty()) extras["profile"] = pp.profile;
    if (!pp.switchable.empty()) extras["switchable"] = pp.switchable;
    if (pp.shed_weight != 0) extras["shed_weight"] = pp.shed_weight;
    s["problem_params"] = extras;
  }
  j["structural_modification"] = s;
  nlohmann::ordered_json r;
  r["solver"] = m.resolution.solver;
  r["opf_violation"] = m.resolution.opf_violation;
  r["output"] = {{"precision", m.resolution.precision}, {"verbosity", m.resolution.verbosity}};
  j["solving_requirements"] = r;
  return j;
}

ModelSpec spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("spec document must be an object", "/");
  if (doc.contains("schema") && doc.at("schema") != "spec/1")
    throw SchemaError("unsupported spec schema", "/schema");
  ModelSpec m;
  if (doc.contains("level")) m.level = level_from_string(doc.at("level").get<std::string>());
  if (!doc.contains("base_system")) throw SchemaError("missing 'base_system'", "/");
  m.base_system = doc.at("base_system").get<std::string>();
  if (doc.contains("parameter_modifications")) {
    int i = 0;
    for (const auto& jp : doc.at("parameter_modifications"))
      m.patches.push_back(patch_from_json(jp, "/parameter_modifications/" + std::to_string(i++)));
  }
  // when no level tag is present, infer the axis from the patch form
  if (!doc.contains("level")) {
    bool any_dir = std::any_of(m.patches.begin(), m.patches.end(),
                               [](const ParameterPatch& p) { return !p.concrete(); });
    m.level = any_dir ? Level::L2 : Level::L1;
  }
  if (doc.contains("structural_modification")) {
    const auto& s = doc.at("structural_modification");
    if (!s.is_object()) throw SchemaError("expected an object", "/structural_modification");
    if (s.contains("problem"))
      m.structural.problem = problem_type_from_string(s.at("problem").get<std::string>());
    auto parse_ext_list = [&](const char* key, auto parse_one, auto& out) {
      if (!s.contains(key)) return;
      const auto& v = s.at(key);
      std::string ptr = std::string("/structural_modification/") + key;
      if (v.is_object()) {
        out.push_back(parse_one(v, ptr));
      } else if (v.is_array()) {
        int i = 0;
        for (const auto& item : v)
          out.push_back(parse_one(item, ptr + "/" + std::to_string(i++)));
      } else {
        throw SchemaError("expected object or array", ptr);
      }
    };
    parse_ext_list("objective_modification", objective_ext_from_json,
                   m.structural.objective_mods);
    parse_ext_list("constraint_modification", constraint_ext_from_json,
                   m.structural.constraint_mods);
    if (s.contains("problem_params")) {
      const auto& pp = s.at("problem_params");
      m.structural.problem_params.horizon = pp.value("horizon", 0);
      if (pp.contains("profile")) {
        for (const auto& row : pp.at("profile")) {
          std::vector<double> r;
          if (row.is_number()) {
            r.push_back(row.get<double>());
          } else {
            for (const auto& v : row) r.push_back(v.get<double>());
          }
          m.structural.problem_params.profile.push_back(std::move(r));
        }
      }
      if (pp.contains("switchable"))
        for (const auto& v : pp.at("switchable"))
          m.structural.problem_params.switchable.push_back(v.get<int>());
      m.structural.problem_params.shed_weight = pp.value("shed_weight", 0.0);
    }
  }
  if (doc.contains("solving_requirements")) {
    const auto& r = doc.at("solving_requirements");
    m.resolution.solver = r.value("solver", "MIPS");
    m.resolution.opf_violation = r.value("opf_violation", 5e-6);
    if (r.contains("output")) {
      m.resolution.precision = r.at("output").value("precision", 6);
      m.resolution.verbosity = r.at("output").value("verbosity", 1);
    }
  }
  return m;
}

std::string canonical_spec(const ModelSpec& m) { return spec_to_json(m).dump(); }

// ---------------------------------------------------------------------------
// Rule table and validation
// ---------------------------------------------------------------------------

const RuleTable& RuleTable::defaults() {
  static const RuleTable table = from_json(
      nlohmann::json::parse(embedded::files().at("rules/compatibility.json")));
  return table;
}

RuleTable RuleTable::from_json(const nlohmann::json& doc) {
  RuleTable t;
  if (doc.contains("forbidden_parameters"))
    for (const auto& [prob, list] : doc.at("forbidden_parameters").items())
      for (const auto& v : list) t.forbidden_params_[prob].push_back(v.get<std::string>());
  if (doc.contains("forbidden_extensions"))
    for (const auto& [prob, list] : doc.at("forbidden_extensions").items())
      for (const auto& v : list) t.forbidden_exts_[prob].push_back(v.get<std::string>());
  t.rate_a_rule_ = doc.value("rate_a_requires_rated_branch", true);
  if (doc.contains("directional_space")) {
    for (const auto& entry : doc.at("directional_space")) {
      Component comp = component_from_string(entry.at("component").get<std::string>());
      TargetParameter par =
          target_parameter_from_string(entry.at("parameter").get<std::string>());
      for (const auto& d : entry.at("directions"))
        t.directional_.push_back({comp, par, direction_from_string(d.get<std::string>())});
    }
  }
  return t;
}

bool RuleTable::parameter_allowed(ProblemType p, TargetParameter t) const {
  auto it = forbidden_params_.find(to_string(p));
  if (it == forbidden_params_.end()) return true;
  const std::string name = to_string(t);
  return std::find(it->second.begin(), it->second.end(), name) == it->second.end();
}

bool RuleTable::extension_allowed(ProblemType p, const std::string& ext) const {
  auto it = forbidden_exts_.find(to_string(p));
  if (it == forbidden_exts_.end()) return true;
  return std::find(it->second.begin(), it->second.end(), ext) == it->second.end();
}

std::vector<Violation> check_compatibility(const StructuralMod& s,
                                           const std::vector<ParameterPatch>& patches,
                                           const RuleTable& rules) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    if (!rules.parameter_allowed(s.problem, patches[i].target))
      out.push_back({static_cast<int>(i),
                     to_string(patches[i].target) + " patch is incompatible with " +
                         to_string(s.problem)});
  }
  for (const auto& e : s.objective_mods)
    if (!rules.extension_allowed(s.problem, e.name))
      out.push_back({-1, "objective extension " + e.name + " is incompatible with " +
                             to_string(s.problem)});
  for (const auto& e : s.constraint_mods)
    if (!rules.extension_allowed(s.problem, e.name))
      out.push_back({-1, "constraint extension " + e.name + " is incompatible with " +
                             to_string(s.problem)});
  return out;
}

std::vector<Diagnostic> validate_spec(const ModelSpec& m) {
  return validate_spec(m, RuleTable::defaults());
}

std::vector<Diagnostic> validate_spec(const ModelSpec& m, const RuleTable& rules,
                                      const SpecLimits& limits) {
  std::vector<Diagnostic> diags;
  auto add = [&](const std::string& code, const std::string& msg) {
    diags.push_back({code, msg});
  };

  // patch form per level
  for (std::size_t i = 0; i < m.patches.size(); ++i) {
    const auto& p = m.patches[i];
    try {
      validate_patch_shape(p);
    } catch (const Error& e) {
      add("patch-shape", "patch " + std::to_string(i + 1) + ": " + e.what());
      continue;
    }
    if (level_is_concrete(m.level) && !p.concrete())
      add("patch-form", "concrete patch required at " + to_string(m.level) + "; patch " +
                            std::to_string(i + 1) + " is directional");
    if (!level_is_concrete(m.level) && p.concrete())
      add("patch-form", "directional patch required at " + to_string(m.level) + "; patch " +
                            std::to_string(i + 1) + " is concrete");
  }

  // structural emptiness at L1/L2
  if ((m.level == Level::L1 || m.level == Level::L2) && !m.structural.is_empty())
    add("structural-empty",
        "structural modifications are not allowed at " + to_string(m.level));

  const int ko = m.level == Level::L4 ? limits.k_o_prime : limits.k_o;
  const int kc = m.level == Level::L4 ? limits.k_c_prime : limits.k_c;
  if (static_cast<int>(m.structural.objective_mods.size()) > ko)
    add("cardinality", "objective modifications exceed the bound " + std::to_string(ko));
  if (static_cast<int>(m.structural.constraint_mods.size()) > kc)
    add("cardinality", "constraint modifications exceed the bound " + std::to_string(kc));

  std::set<std::string> seen;
  for (const auto& e : m.structural.objective_mods)
    if (!seen.insert("o:" + e.name).second)
      add("duplicate-extension", "duplicate objective extension " + e.name);
  for (const auto& e : m.structural.constraint_mods)
    if (!seen.insert("c:" + e.name).second)
      add("duplicate-extension", "duplicate constraint extension " + e.name);

  static const std::set<std::string> kObjectiveNames = {"ADP", "VDP", "LOP",
                                                        "EEC", "PLC", "RRI"};
  static const std::set<std::string> kConstraintNames = {"N1_SECURITY_DC", "RESERVE_LIMIT"};
  for (const auto& e : m.structural.objective_mods) {
    if (!kObjectiveNames.count(e.name)) {
      add("unknown-extension", "unknown objective extension " + e.name);
      continue;
    }
    auto need = [&](const char* key) {
      auto it = e.params.find(key);
      if (it == e.params.end() || !std::isfinite(it->second))
        add("missing-param", e.name + " requires finite parameter '" + std::string(key) + "'");
      else if (it->second < 0 && e.name != "EEC")
        add("bad-param", e.name + " weight '" + std::string(key) + "' must be >= 0");
    };
    if (e.name == "ADP" || e.name == "VDP") need("beta");
    if (e.name == "LOP") need("lambda");
    if (e.name == "RRI") need("w");
    if (e.name == "EEC")
      for (const char* k : {"alpha", "beta", "gamma", "zeta", "lambda"}) need(k);
  }
  for (const auto& e : m.structural.constraint_mods) {
    if (!kConstraintNames.count(e.name)) {
      add("unknown-extension", "unknown constraint extension " + e.name);
      continue;
    }
    if (e.name == "RESERVE_LIMIT")
      for (const auto& v : {e.reserve_up, e.reserve_down})
        for (double x : v)
          if (x < 0) add("bad-param", "reserve ranges must be >= 0");
  }

  // placeholder collisions among directional patches
  std::set<std::string> names;
  for (const auto& p : m.patches)
    if (!p.concrete() && !names.insert(p.placeholder_name()).second)
      add("placeholder-collision", "placeholder " + p.placeholder_name() + " is not unique");

  if (!(m.resolution.opf_violation > 0))
    add("resolution", "opf_violation must be positive");
  if (m.resolution.precision < 1 || m.resolution.precision > 17)
    add("resolution", "output precision must lie in [1, 17]");

  for (const auto& v : check_compatibility(m.structural, m.patches, rules))
    add("compatibility", v.message);

  // case-dependent checks when the base system is resolvable
  try {
    NetworkCase c = load_case(m.base_system);
    for (std::size_t i = 0; i < m.patches.size(); ++i) {
      const auto& p = m.patches[i];
      try {
        resolve_rows(c, p, static_cast<int>(i));
      } catch (const Error& e) {
        add("dangling-target", e.what());
        continue;
      }
      if (p.target == TargetParameter::RATE_A && rules.rate_a_requires_rated_branch()) {
        bool any_rated = std::any_of(c.branches.begin(), c.branches.end(),
                                     [](const BranchRecord& b) { return b.rate_a > 0; });
        if (!any_rated)
          add("compatibility", "RATE_A patches are forbidden on a case with no rated branches");
      }
    }
    for (const auto& e : m.structural.constraint_mods) {
      if (e.name != "N1_SECURITY_DC") continue;
      for (int idx : e.contingencies)
        if (idx < 1 || idx > static_cast<int>(c.branches.size()) ||
            c.branches[idx - 1].status != 1)
          add("bad-param", "contingency index " + std::to_string(idx) +
                               " does not reference an in-service branch");
    }
    if (m.structural.problem == ProblemType::OTS_DC)
      for (int idx : m.structural.problem_params.switchable)
        if (idx < 1 || idx > static_cast<int>(c.branches.size()))
          add("bad-param", "switchable index " + std::to_string(idx) + " is out of range");
  } catch (const Error& e) {
    add("base-system", "base system '" + m.base_system + "' could not be loaded: " + e.what());
  }

  return diags;
}

}  // namespace opfkit
