#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>
#include <nlohmann/json.hpp>

namespace opfkit {

enum class BusType { PQ = 1, PV = 2, REF = 3, ISOLATED = 4 };

struct BusRecord {
  int id = 0;
  BusType btype = BusType::PQ;
  double pd = 0, qd = 0;   // demand, MW / MVAr
  double gs = 0, bs = 0;   // shunt at V = 1 p.u., MW / MVAr
  double vm = 1, va = 0;   // initial magnitude (p.u.) and angle (degrees)
  double base_kv = 0;
  double vmax = 1.1, vmin = 0.9;
};

struct GenRecord {
  int bus = 0;
  double pg = 0, qg = 0;       // initial output, MW / MVAr
  double qmax = 0, qmin = 0;   // MVAr
  double vg = 1;               // voltage setpoint, p.u.
  int status = 1;
  double pmax = 0, pmin = 0;   // MW
  double ramp_up = 0, ramp_down = 0;  // MW per period; 0 means pmax - pmin
};

struct BranchRecord {
  int fbus = 0, tbus = 0;
  double r = 0, x = 0;  // series impedance, p.u.
  double b = 0;         // total line charging, p.u.
  double rate_a = 0;    // MVA; 0 = unlimited
  double tap = 1;       // off-nominal turns ratio (0 normalised to 1 at parse)
  double shift = 0;     // degrees
  int status = 1;
  double angmin = -360, angmax = 360;  // degrees
};

struct GenCost {
  int model = 2;  // polynomial; piecewise-linear (1) is rejected at parse
  double startup = 0, shutdown = 0;
  int ncost = 0;
  std::vector<double> coeffs;  // highest order first
};

struct NetworkCase {
  std::string name;
  double base_mva = 100;
  std::vector<BusRecord> buses;
  std::vector<GenRecord> gens;
  std::vector<BranchRecord> branches;
  std::vector<GenCost> gencosts;  // aligned with gens

  int bus_index(int bus_id) const;                 // -1 when absent
  const BusRecord& bus_by_id(int bus_id) const;    // throws on dangling id
  std::vector<int> gens_at_bus(int bus_id) const;  // gen row indices
  std::vector<int> branches_between(int fbus, int tbus) const;  // either orientation
  double total_pd() const;
  double ramp_up_of(int gen_row) const;
  double ramp_down_of(int gen_row) const;
};

/// Throws InvariantError describing the first violated case invariant.
void validate_case(const NetworkCase& c);

struct AdmittanceMatrix {
  Eigen::SparseMatrix<std::complex<double>> ybus;  // n x n
  Eigen::SparseMatrix<std::complex<double>> yf;    // nl x n (in-service rows only)
  Eigen::SparseMatrix<std::complex<double>> yt;    // nl x n
  std::vector<int> branch_rows;  // case branch index per yf/yt row
};

/// MATPOWER-style case-file import.
NetworkCase parse_matpower_case(const std::string& text);

/// Resolve a registry key (case9/case14/case30/case39), a .m path, or a
/// native-JSON path.
NetworkCase load_case(const std::string& name);

/// Names available through the embedded registry.
std::vector<std::string> registry_names();

nlohmann::ordered_json case_to_json(const NetworkCase& c);
NetworkCase json_to_case(const nlohmann::json& doc);

/// Pi-model bus admittance assembly with taps, shifts and bus shunts.
AdmittanceMatrix build_admittance(const NetworkCase& c);

bool cases_equal(const NetworkCase& a, const NetworkCase& b);

std::string to_string(BusType t);
BusType bus_type_from_string(const std::string& s);

}  // namespace opfkit
