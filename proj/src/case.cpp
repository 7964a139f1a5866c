#include "opfkit/case.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "opfkit/embedded.hpp"
#include "opfkit/errors.hpp"
#include "opfkit/util.hpp"

namespace opfkit {

LogLevel& log_threshold() {
  static LogLevel level = LogLevel::Warn;
  return level;
}

std::string to_string(BusType t) {
  switch (t) {
    case BusType::PQ: return "PQ";
    case BusType::PV: return "PV";
    case BusType::REF: return "REF";
    case BusType::ISOLATED: return "ISOLATED";
  }
  return "PQ";
}

BusType bus_type_from_string(const std::string& s) {
  if (s == "PQ") return BusType::PQ;
  if (s == "PV") return BusType::PV;
  if (s == "REF") return BusType::REF;
  if (s == "ISOLATED") return BusType::ISOLATED;
  throw SchemaError("unknown bus type '" + s + "'", "/buses");
}

int NetworkCase::bus_index(int bus_id) const {
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == bus_id) return static_cast<int>(i);
  return -1;
}

const BusRecord& NetworkCase::bus_by_id(int bus_id) const {
  int i = bus_index(bus_id);
  if (i < 0) throw InvariantError("bus " + std::to_string(bus_id) + " does not exist in " + name);
  return buses[i];
}

std::vector<int> NetworkCase::gens_at_bus(int bus_id) const {
  std::vector<int> rows;
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (gens[i].bus == bus_id) rows.push_back(static_cast<int>(i));
  return rows;
}

std::vector<int> NetworkCase::branches_between(int f, int t) const {
  std::vector<int> rows;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const auto& br = branches[i];
    if ((br.fbus == f && br.tbus == t) || (br.fbus == t && br.tbus == f))
      rows.push_back(static_cast<int>(i));
  }
  return rows;
}

double NetworkCase::total_pd() const {
  double s = 0;
  for (const auto& b : buses) s += b.pd;
  return s;
}

double NetworkCase::ramp_up_of(int g) const {
  const auto& gen = gens[g];
  return gen.ramp_up > 0 ? gen.ramp_up : gen.pmax - gen.pmin;
}

double NetworkCase::ramp_down_of(int g) const {
  const auto& gen = gens[g];
  return gen.ramp_down > 0 ? gen.ramp_down : gen.pmax - gen.pmin;
}

void validate_case(const NetworkCase& c) {
  if (!(c.base_mva > 0)) throw InvariantError("base_mva must be positive");
  if (c.buses.empty()) throw InvariantError("case has no buses");
  std::set<int> ids;
  int n_ref = 0;
  for (const auto& b : c.buses) {
    if (b.id <= 0) throw InvariantError("bus identifiers must be positive integers");
    if (!ids.insert(b.id).second)
      throw InvariantError("duplicate bus id " + std::to_string(b.id));
    if (b.btype == BusType::REF) ++n_ref;
    // vmin relaxed to 0 is the one allowed exception to the ordering check
    if (b.vmin != 0 && b.vmin > b.vmax)
      throw InvariantError("bus " + std::to_string(b.id) + ": vmin > vmax");
    if (!(b.vm > 0))
      throw InvariantError("bus " + std::to_string(b.id) + ": initial vm must be positive");
  }
  if (n_ref != 1)
    throw InvariantError("expected exactly one REF bus, found " + std::to_string(n_ref));
  if (c.gencosts.size() != 0 && c.gencosts.size() != c.gens.size())
    throw InvariantError("gencost rows do not align with gens");
  for (std::size_t i = 0; i < c.gens.size(); ++i) {
    const auto& g = c.gens[i];
    if (!ids.count(g.bus))
      throw InvariantError("gen " + std::to_string(i + 1) + " references missing bus " +
                           std::to_string(g.bus));
    if (g.status != 0 && g.status != 1)
      throw InvariantError("gen status must be 0 or 1");
    if (g.status == 1 && (g.pmin > g.pmax || g.qmin > g.qmax))
      throw InvariantError("gen at bus " + std::to_string(g.bus) + ": bounds out of order");
  }
  for (std::size_t i = 0; i < c.branches.size(); ++i) {
    const auto& br = c.branches[i];
    if (!ids.count(br.fbus) || !ids.count(br.tbus))
      throw InvariantError("branch " + std::to_string(i + 1) + " references a missing bus");
    if (br.fbus == br.tbus)
      throw InvariantError("branch " + std::to_string(i + 1) + ": fbus == tbus");
    if (br.status == 1 && br.r == 0 && br.x == 0)
      throw InvariantError("in-service branch " + std::to_string(i + 1) +
                           " has zero impedance");
  }
  for (std::size_t i = 0; i < c.gencosts.size(); ++i) {
    const auto& gc = c.gencosts[i];
    if (gc.model != 2)
      throw InvariantError("gencost row " + std::to_string(i + 1) +
                           ": only polynomial cost model (2) is accepted; "
                           "piecewise-linear rows must be converted upstream");
    if (gc.ncost != static_cast<int>(gc.coeffs.size()))
      throw InvariantError("gencost row " + std::to_string(i + 1) + ": ncost mismatch");
    if (gc.ncost < 1 || gc.ncost > 3)
      throw InvariantError("gencost row " + std::to_string(i + 1) +
                           ": polynomial order above quadratic is not supported");
  }
}

// ---------------------------------------------------------------------------
// MATPOWER case-file parsing. Accepts the MATLAB subset MATPOWER case files
// actually use: scalar assignments, bracketed numeric matrices with ';' row
// separators, '%' comments and '...' continuations.
// ---------------------------------------------------------------------------

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  // Skips whitespace, comments and '...' continuations. Newlines are
  // significant inside matrices, so they are only skipped when asked.
  void skip(bool with_newlines) {
    while (!eof()) {
      char ch = peek();
      if (ch == '%') {
        while (!eof() && peek() != '\n') advance();
      } else if (ch == '.' && pos + 2 < text.size() && text[pos + 1] == '.' &&
                 text[pos + 2] == '.') {
        while (!eof() && peek() != '\n') advance();
        if (!eof()) advance();  // swallow the newline the continuation hides
      } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == ',') {
        advance();
      } else if (ch == '\n' && with_newlines) {
        advance();
      } else {
        break;
      }
    }
  }
};

double parse_cell(Cursor& cur) {
  cur.skip(false);
  std::size_t start = cur.pos;
  int line = cur.line, col = cur.col;
  while (!cur.eof()) {
    char ch = cur.peek();
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '+' || ch == '-' || ch == '.' ||
        ch == 'e' || ch == 'E') {
      cur.advance();
    } else {
      break;
    }
  }
  if (cur.pos == start) throw ParseError("expected a number", line, col);
  double value = 0;
  auto res = std::from_chars(cur.text.data() + start, cur.text.data() + cur.pos, value);
  if (res.ec != std::errc() || res.ptr != cur.text.data() + cur.pos)
    throw ParseError("non-numeric cell '" + cur.text.substr(start, cur.pos - start) + "'",
                     line, col);
  return value;
}

using Matrix = std::vector<std::vector<double>>;

Matrix parse_matrix(Cursor& cur) {
  cur.skip(true);
  if (cur.eof() || cur.peek() != '[')
    throw ParseError("expected '[' to open a matrix", cur.line, cur.col);
  cur.advance();
  Matrix rows;
  std::vector<double> row;
  while (true) {
    cur.skip(false);
    if (cur.eof()) throw ParseError("unterminated matrix", cur.line, cur.col);
    char ch = cur.peek();
    if (ch == ']') {
      cur.advance();
      if (!row.empty()) rows.push_back(std::move(row));
      break;
    }
    if (ch == ';' || ch == '\n') {
      cur.advance();
      if (!row.empty()) rows.push_back(std::move(row));
      row.clear();
      continue;
    }
    row.push_back(parse_cell(cur));
  }
  return rows;
}

std::string parse_identifier(Cursor& cur) {
  cur.skip(true);
  std::size_t start = cur.pos;
  while (!cur.eof()) {
    char ch = cur.peek();
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.')
      cur.advance();
    else
      break;
  }
  return cur.text.substr(start, cur.pos - start);
}

}  // namespace

NetworkCase parse_matpower_case(const std::string& text) {
  Cursor cur{text};
  std::map<std::string, Matrix> matrices;
  std::map<std::string, double> scalars;
  std::string function_name;

  while (true) {
    cur.skip(true);
    if (cur.eof()) break;
    int line = cur.line, col = cur.col;
    std::string ident = parse_identifier(cur);
    if (ident.empty())
      throw ParseError(std::string("unexpected character '") + cur.peek() + "'", cur.line,
                       cur.col);
    if (ident == "function") {
      // "function mpc = caseXX"
      parse_identifier(cur);
      cur.skip(true);
      if (!cur.eof() && cur.peek() == '=') cur.advance();
      function_name = parse_identifier(cur);
      continue;
    }
    cur.skip(true);
    if (cur.eof() || cur.peek() != '=')
      throw ParseError("expected '=' after '" + ident + "'", line, col);
    cur.advance();
    cur.skip(true);
    if (cur.eof()) throw ParseError("unexpected end of file after '='", cur.line, cur.col);
    char ch = cur.peek();
    if (ch == '[') {
      matrices[ident] = parse_matrix(cur);
    } else if (ch == '\'') {
      cur.advance();
      while (!cur.eof() && cur.peek() != '\'') cur.advance();
      if (cur.eof()) throw ParseError("unterminated string", cur.line, cur.col);
      cur.advance();  // version strings and the like: accepted and ignored
    } else {
      scalars[ident] = parse_cell(cur);
    }
    cur.skip(true);
    if (!cur.eof() && cur.peek() == ';') cur.advance();
  }

  auto matrix_of = [&](const std::string& key, std::size_t min_cols,
                       bool required) -> const Matrix* {
    auto it = matrices.find("mpc." + key);
    if (it == matrices.end()) it = matrices.find(key);
    if (it == matrices.end() || it->second.empty()) {
      if (required) throw ParseError("missing required matrix: " + key);
      return nullptr;
    }
    for (std::size_t r = 0; r < it->second.size(); ++r)
      if (it->second[r].size() < min_cols)
        throw ParseError(key + " row " + std::to_string(r + 1) + " has " +
                         std::to_string(it->second[r].size()) + " columns, expected at least " +
                         std::to_string(min_cols));
    return &it->second;
  };

  NetworkCase c;
  c.name = function_name.empty() ? "case" : function_name;
  auto base_it = scalars.find("mpc.baseMVA");
  if (base_it == scalars.end()) base_it = scalars.find("baseMVA");
  if (base_it == scalars.end()) throw ParseError("missing required matrix: baseMVA");
  c.base_mva = base_it->second;

  const Matrix& bus = *matrix_of("bus", 13, true);
  for (const auto& row : bus) {
    BusRecord b;
    b.id = static_cast<int>(row[0]);
    int t = static_cast<int>(row[1]);
    if (t < 1 || t > 4) throw ParseError("bus " + std::to_string(b.id) + ": bad type");
    b.btype = static_cast<BusType>(t);
    b.pd = row[2];
    b.qd = row[3];
    b.gs = row[4];
    b.bs = row[5];
    b.vm = row[7];
    b.va = row[8];
    b.base_kv = row[9];
    b.vmax = row[11];
    b.vmin = row[12];
    c.buses.push_back(b);
  }

  const Matrix& gen = *matrix_of("gen", 10, true);
  for (const auto& row : gen) {
    GenRecord g;
    g.bus = static_cast<int>(row[0]);
    g.pg = row[1];
    g.qg = row[2];
    g.qmax = row[3];
    g.qmin = row[4];
    g.vg = row[5];
    g.status = static_cast<int>(row[7]);
    g.pmax = row[8];
    g.pmin = row[9];
    if (row.size() > 17 && row[17] > 0) {  // RAMP_10 column when present
      g.ramp_up = row[17];
      g.ramp_down = row[17];
    }
    c.gens.push_back(g);
  }

  const Matrix& branch = *matrix_of("branch", 13, true);
  for (const auto& row : branch) {
    BranchRecord br;
    br.fbus = static_cast<int>(row[0]);
    br.tbus = static_cast<int>(row[1]);
    br.r = row[2];
    br.x = row[3];
    br.b = row[4];
    br.rate_a = row[5];
    br.tap = row[8] == 0 ? 1.0 : row[8];  // MATPOWER convention
    br.shift = row[9];
    br.status = static_cast<int>(row[10]);
    br.angmin = row[11];
    br.angmax = row[12];
    c.branches.push_back(br);
  }

  if (const Matrix* gencost = matrix_of("gencost", 4, false)) {
    if (gencost->size() != c.gens.size())
      throw ParseError("gencost has " + std::to_string(gencost->size()) + " rows for " +
                       std::to_string(c.gens.size()) + " generators");
    for (const auto& row : *gencost) {
      GenCost gc;
      gc.model = static_cast<int>(row[0]);
      if (gc.model == 1)
        throw ParseError("piecewise-linear gencost rows are not accepted; "
                         "only polynomial (model 2) costs are supported");
      if (gc.model != 2) throw ParseError("unknown gencost model");
      gc.startup = row[1];
      gc.shutdown = row[2];
      gc.ncost = static_cast<int>(row[3]);
      if (row.size() < 4 + static_cast<std::size_t>(gc.ncost))
        throw ParseError("gencost row shorter than its ncost");
      for (int k = 0; k < gc.ncost; ++k) gc.coeffs.push_back(row[4 + k]);
      c.gencosts.push_back(gc);
    }
  }

  validate_case(c);
  return c;
}

// ---------------------------------------------------------------------------
// Registry and JSON interchange
// ---------------------------------------------------------------------------

std::vector<std::string> registry_names() {
  std::vector<std::string> names;
  for (const auto& [key, blob] : embedded::files()) {
    (void)blob;
    if (key.rfind("cases/", 0) == 0 && key.size() > 8 && key.substr(key.size() - 2) == ".m")
      names.push_back(key.substr(6, key.size() - 8));
  }
  std::sort(names.begin(), names.end());
  return names;
}

NetworkCase load_case(const std::string& name) {
  const auto& files = embedded::files();
  auto it = files.find("cases/" + name + ".m");
  if (it != files.end()) {
    NetworkCase c = parse_matpower_case(std::string(it->second));
    c.name = name;
    return c;
  }
  std::ifstream in(name, std::ios::binary);
  if (!in) throw Error("unknown case name or unreadable path: " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (name.size() > 5 && name.substr(name.size() - 5) == ".json")
    return json_to_case(nlohmann::json::parse(text));
  return parse_matpower_case(text);
}

namespace {

const nlohmann::json& require(const nlohmann::json& doc, const char* key,
                              const std::string& pointer) {
  if (!doc.is_object() || !doc.contains(key))
    throw SchemaError("missing required key '" + std::string(key) + "'", pointer);
  return doc.at(key);
}

double require_number(const nlohmann::json& doc, const char* key, const std::string& pointer) {
  const auto& v = require(doc, key, pointer);
  if (!v.is_number()) throw SchemaError("expected a number", pointer + "/" + key);
  return v.get<double>();
}

}  // namespace

nlohmann::ordered_json case_to_json(const NetworkCase& c) {
  nlohmann::ordered_json doc;
  doc["schema"] = "case/1";
  doc["name"] = c.name;
  doc["base_mva"] = c.base_mva;
  doc["buses"] = nlohmann::ordered_json::array();
  for (const auto& b : c.buses) {
    doc["buses"].push_back({{"id", b.id},
                            {"btype", to_string(b.btype)},
                            {"pd", b.pd},
                            {"qd", b.qd},
                            {"gs", b.gs},
                            {"bs", b.bs},
                            {"vm", b.vm},
                            {"va", b.va},
                            {"base_kv", b.base_kv},
                            {"vmax", b.vmax},
                            {"vmin", b.vmin}});
  }
  doc["gens"] = nlohmann::ordered_json::array();
  for (const auto& g : c.gens) {
    doc["gens"].push_back({{"bus", g.bus},
                           {"pg", g.pg},
                           {"qg", g.qg},
                           {"qmax", g.qmax},
                           {"qmin", g.qmin},
                           {"vg", g.vg},
                           {"status", g.status},
                           {"pmax", g.pmax},
                           {"pmin", g.pmin},
                           {"ramp_up", g.ramp_up},
                           {"ramp_down", g.ramp_down}});
  }
  doc["branches"] = nlohmann::ordered_json::array();
  for (const auto& br : c.branches) {
    doc["branches"].push_back({{"fbus", br.fbus},
                               {"tbus", br.tbus},
                               {"r", br.r},
                               {"x", br.x},
                               {"b", br.b},
                               {"rate_a", br.rate_a},
                               {"tap", br.tap},
                               {"shift", br.shift},
                               {"status", br.status},
                               {"angmin", br.angmin},
                               {"angmax", br.angmax}});
  }
  doc["gencosts"] = nlohmann::ordered_json::array();
  for (const auto& gc : c.gencosts) {
    doc["gencosts"].push_back({{"model", gc.model},
                               {"startup", gc.startup},
                               {"shutdown", gc.shutdown},
                               {"ncost", gc.ncost},
                               {"coeffs", gc.coeffs}});
  }
  return doc;
}

NetworkCase json_to_case(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("case document must be an object", "/");
  if (doc.contains("schema") && doc.at("schema") != "case/1")
    throw SchemaError("unsupported case schema '" + doc.at("schema").get<std::string>() + "'",
                      "/schema");
  NetworkCase c;
  c.name = require(doc, "name", "/").get<std::string>();
  c.base_mva = require_number(doc, "base_mva", "/");
  const auto& buses = require(doc, "buses", "/");
  if (!buses.is_array()) throw SchemaError("expected an array", "/buses");
  int i = 0;
  for (const auto& jb : buses) {
    std::string ptr = "/buses/" + std::to_string(i++);
    BusRecord b;
    b.id = static_cast<int>(require_number(jb, "id", ptr));
    b.btype = bus_type_from_string(require(jb, "btype", ptr).get<std::string>());
    b.pd = require_number(jb, "pd", ptr);
    b.qd = require_number(jb, "qd", ptr);
    b.gs = require_number(jb, "gs", ptr);
    b.bs = require_number(jb, "bs", ptr);
    b.vm = require_number(jb, "vm", ptr);
    b.va = require_number(jb, "va", ptr);
    b.base_kv = require_number(jb, "base_kv", ptr);
    b.vmax = require_number(jb, "vmax", ptr);
    b.vmin = require_number(jb, "vmin", ptr);
    c.buses.push_back(b);
  }
  const auto& gens = require(doc, "gens", "/");
  if (!gens.is_array()) throw SchemaError("expected an array", "/gens");
  i = 0;
  for (const auto& jg : gens) {
    std::string ptr = "/gens/" + std::to_string(i++);
    GenRecord g;
    g.bus = static_cast<int>(require_number(jg, "bus", ptr));
    g.pg = require_number(jg, "pg", ptr);
    g.qg = require_number(jg, "qg", ptr);
    g.qmax = require_number(jg, "qmax", ptr);
    g.qmin = require_number(jg, "qmin", ptr);
    g.vg = require_number(jg, "vg", ptr);
    g.status = static_cast<int>(require_number(jg, "status", ptr));
    g.pmax = require_number(jg, "pmax", ptr);
    g.pmin = require_number(jg, "pmin", ptr);
    g.ramp_up = jg.value("ramp_up", 0.0);
    g.ramp_down = jg.value("ramp_down", 0.0);
    c.gens.push_back(g);
  }
  const auto& branches = require(doc, "branches", "/");
  if (!branches.is_array()) throw SchemaError("expected an array", "/branches");
  i = 0;
  for (const auto& jb : branches) {
    std::string ptr = "/branches/" + std::to_string(i++);
    BranchRecord br;
    br.fbus = static_cast<int>(require_number(jb, "fbus", ptr));
    br.tbus = static_cast<int>(require_number(jb, "tbus", ptr));
    br.r = require_number(jb, "r", ptr);
    br.x = require_number(jb, "x", ptr);
    br.b = require_number(jb, "b", ptr);
    br.rate_a = require_number(jb, "rate_a", ptr);
    double tap = require_number(jb, "tap", ptr);
    br.tap = tap == 0 ? 1.0 : tap;
    br.shift = require_number(jb, "shift", ptr);
    br.status = static_cast<int>(require_number(jb, "status", ptr));
    br.angmin = jb.value("angmin", -360.0);
    br.angmax = jb.value("angmax", 360.0);
    c.branches.push_back(br);
  }
  if (doc.contains("gencosts")) {
    int k = 0;
    for (const auto& jc : doc.at("gencosts")) {
      std::string ptr = "/gencosts/" + std::to_string(k++);
      GenCost gc;
      gc.model = static_cast<int>(require_number(jc, "model", ptr));
      gc.startup = require_number(jc, "startup", ptr);
      gc.shutdown = require_number(jc, "shutdown", ptr);
      gc.ncost = static_cast<int>(require_number(jc, "ncost", ptr));
      const auto& coeffs = require(jc, "coeffs", ptr);
      if (!coeffs.is_array()) throw SchemaError("expected an array", ptr + "/coeffs");
      for (const auto& v : coeffs) gc.coeffs.push_back(v.get<double>());
      c.gencosts.push_back(gc);
    }
  }
  validate_case(c);
  return c;
}

bool cases_equal(const NetworkCase& a, const NetworkCase& b) {
  return case_to_json(a) == case_to_json(b);
}

// ---------------------------------------------------------------------------
// Admittance assembly
// ---------------------------------------------------------------------------

AdmittanceMatrix build_admittance(const NetworkCase& c) {
  using Cplx = std::complex<double>;
  const int n = static_cast<int>(c.buses.size());

  std::vector<int> rows;
  for (std::size_t l = 0; l < c.branches.size(); ++l)
    if (c.branches[l].status == 1) rows.push_back(static_cast<int>(l));
  const int nl = static_cast<int>(rows.size());

  std::vector<Eigen::Triplet<Cplx>> tf, tt, tb;
  tf.reserve(2 * nl);
  tt.reserve(2 * nl);
  tb.reserve(4 * nl + n);

  for (int row = 0; row < nl; ++row) {
    const auto& br = c.branches[rows[row]];
    if (br.r == 0 && br.x == 0)
      throw InvariantError("in-service branch " + std::to_string(rows[row] + 1) +
                           " has zero impedance");
    const Cplx ys = 1.0 / Cplx(br.r, br.x);
    const Cplx bc(0.0, br.b / 2.0);
    const double tau = br.tap == 0 ? 1.0 : br.tap;
    const Cplx shift = std::polar(1.0, br.shift * M_PI / 180.0);

    const Cplx ytt = ys + bc;
    const Cplx yff = ytt / (tau * tau);
    const Cplx yft = -ys / (tau * std::conj(shift));
    const Cplx ytf = -ys / (tau * shift);

    const int f = c.bus_index(br.fbus);
    const int t = c.bus_index(br.tbus);
    tf.emplace_back(row, f, yff);
    tf.emplace_back(row, t, yft);
    tt.emplace_back(row, f, ytf);
    tt.emplace_back(row, t, ytt);
    tb.emplace_back(f, f, yff);
    tb.emplace_back(f, t, yft);
    tb.emplace_back(t, f, ytf);
    tb.emplace_back(t, t, ytt);
  }
  for (int i = 0; i < n; ++i) {
    const auto& b = c.buses[i];
    if (b.gs != 0 || b.bs != 0)
      tb.emplace_back(i, i, Cplx(b.gs / c.base_mva, b.bs / c.base_mva));
  }

  AdmittanceMatrix y;
  y.ybus.resize(n, n);
  y.yf.resize(nl, n);
  y.yt.resize(nl, n);
  y.ybus.setFromTriplets(tb.begin(), tb.end());
  y.yf.setFromTriplets(tf.begin(), tf.end());
  y.yt.setFromTriplets(tt.begin(), tt.end());
  y.branch_rows = std::move(rows);
  return y;
}

}  // namespace opfkit
