#include <doctest.h>

#include <complex>
#include <set>

#include "opfkit/case.hpp"
#include "opfkit/embedded.hpp"
#include "opfkit/errors.hpp"
#include "opfkit/rng.hpp"

using namespace opfkit;

TEST_CASE("embedded case9 parses with expected shape") {
  NetworkCase c = load_case("case9");
  CHECK(c.buses.size() == 9);
  CHECK(c.branches.size() == 9);
  CHECK(c.gens.size() == 3);
  CHECK(c.base_mva == 100.0);
  CHECK(c.bus_by_id(5).pd == 90.0);
  CHECK(c.gencosts[0].coeffs == std::vector<double>{0.11, 5.0, 150.0});
}

TEST_CASE("embedded case14 parses with expected shape") {
  NetworkCase c = load_case("case14");
  CHECK(c.buses.size() == 14);
  CHECK(c.branches.size() == 20);
  CHECK(c.gens.size() == 5);
  CHECK(c.bus_by_id(9).bs == 19.0);
  // tap of 0 in the raw data is normalised to 1 at parse time
  for (const auto& br : c.branches) CHECK(br.tap >= 0.9);
}

TEST_CASE("embedded case30 and case39 shapes") {
  NetworkCase c30 = load_case("case30");
  CHECK(c30.buses.size() == 30);
  CHECK(c30.branches.size() == 41);
  CHECK(c30.gens.size() == 6);

  NetworkCase c39 = load_case("case39");
  CHECK(c39.buses.size() == 39);
  CHECK(c39.branches.size() == 46);
  CHECK(c39.gens.size() == 10);
  CHECK(c39.total_pd() == doctest::Approx(6254.23));
}

TEST_CASE("unknown registry name errors") {
  CHECK_THROWS_WITH_AS(load_case("nonexistent"),
                       doctest::Contains("unknown case name"), Error);
}

TEST_CASE("empty bus matrix is a missing-matrix error") {
  std::string text = "mpc.baseMVA = 100;\nmpc.bus = [];\nmpc.gen = [];\nmpc.branch = [];\n";
  CHECK_THROWS_WITH_AS(parse_matpower_case(text),
                       doctest::Contains("missing required matrix"), ParseError);
}

TEST_CASE("non-numeric cell reports position") {
  std::string text =
      "mpc.baseMVA = 100;\n"
      "mpc.bus = [\n1 3 0 0 0 0 1 1 0 345 1 1.1 0.9;\n2 1 oops 0 0 0 1 1 0 345 1 1.1 0.9;\n];\n"
      "mpc.gen = [1 0 0 10 -10 1 100 1 10 0;];\n"
      "mpc.branch = [1 2 0 0.1 0 0 0 0 0 0 1 -360 360;];\n";
  CHECK_THROWS_AS(parse_matpower_case(text), ParseError);
}

TEST_CASE("duplicate bus ids and dangling references are invariant errors") {
  std::string dup =
      "mpc.baseMVA = 100;\n"
      "mpc.bus = [1 3 0 0 0 0 1 1 0 345 1 1.1 0.9; 1 1 0 0 0 0 1 1 0 345 1 1.1 0.9;];\n"
      "mpc.gen = [1 0 0 10 -10 1 100 1 10 0;];\n"
      "mpc.branch = [1 1 0 0.1 0 0 0 0 0 0 1 -360 360;];\n";
  CHECK_THROWS_AS(parse_matpower_case(dup), InvariantError);

  std::string dangling =
      "mpc.baseMVA = 100;\n"
      "mpc.bus = [1 3 0 0 0 0 1 1 0 345 1 1.1 0.9; 2 1 0 0 0 0 1 1 0 345 1 1.1 0.9;];\n"
      "mpc.gen = [7 0 0 10 -10 1 100 1 10 0;];\n"
      "mpc.branch = [1 2 0 0.1 0 0 0 0 0 0 1 -360 360;];\n";
  CHECK_THROWS_WITH_AS(parse_matpower_case(dangling), doctest::Contains("missing bus"),
                       InvariantError);
}

TEST_CASE("piecewise-linear gencost is rejected with a clear error") {
  std::string text =
      "mpc.baseMVA = 100;\n"
      "mpc.bus = [1 3 0 0 0 0 1 1 0 345 1 1.1 0.9; 2 1 10 0 0 0 1 1 0 345 1 1.1 0.9;];\n"
      "mpc.gen = [1 0 0 10 -10 1 100 1 10 0;];\n"
      "mpc.branch = [1 2 0 0.1 0 0 0 0 0 0 1 -360 360;];\n"
      "mpc.gencost = [1 0 0 2 0 0 10 100;];\n";
  CHECK_THROWS_WITH_AS(parse_matpower_case(text), doctest::Contains("piecewise"), ParseError);
}

TEST_CASE("json round trip is lossless for every embedded case") {
  for (const auto& name : registry_names()) {
    NetworkCase c = load_case(name);
    NetworkCase back = json_to_case(case_to_json(c));
    CHECK(cases_equal(c, back));
  }
}

TEST_CASE("json document missing base_mva is a schema error with pointer") {
  nlohmann::json doc = case_to_json(load_case("case9"));
  doc.erase("base_mva");
  try {
    json_to_case(doc);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("base_mva") != std::string::npos);
  }
}

TEST_CASE("single line admittance matches hand calculation") {
  std::string text =
      "mpc.baseMVA = 100;\n"
      "mpc.bus = [1 3 0 0 0 0 1 1 0 345 1 1.1 0.9; 2 1 0 0 0 0 1 1 0 345 1 1.1 0.9;];\n"
      "mpc.gen = [1 0 0 10 -10 1 100 1 10 0;];\n"
      "mpc.branch = [1 2 0 0.1 0 0 0 0 0 0 1 -360 360;];\n";
  NetworkCase c = parse_matpower_case(text);
  AdmittanceMatrix y = build_admittance(c);
  Eigen::MatrixXcd dense = y.ybus.toDense();
  CHECK(dense(0, 1).imag() == doctest::Approx(10.0));
  CHECK(dense(1, 0).imag() == doctest::Approx(10.0));
  CHECK(dense(0, 0).imag() == doctest::Approx(-10.0));
  CHECK(dense(1, 1).imag() == doctest::Approx(-10.0));
  CHECK(std::abs(dense(0, 0).real()) < 1e-15);
}

TEST_CASE("zero impedance in-service branch errors at assembly") {
  std::string text =
      "mpc.baseMVA = 100;\n"
      "mpc.bus = [1 3 0 0 0 0 1 1 0 345 1 1.1 0.9; 2 1 0 0 0 0 1 1 0 345 1 1.1 0.9;];\n"
      "mpc.gen = [1 0 0 10 -10 1 100 1 10 0;];\n"
      "mpc.branch = [1 2 0 0 0 0 0 0 0 0 1 -360 360;];\n";
  CHECK_THROWS_AS(parse_matpower_case(text), InvariantError);
}

TEST_CASE("admittance is complex-symmetric for tap-free networks") {
  NetworkCase c = load_case("case9");
  AdmittanceMatrix y = build_admittance(c);
  Eigen::MatrixXcd dense = y.ybus.toDense();
  for (int i = 0; i < dense.rows(); ++i)
    for (int j = 0; j < i; ++j) CHECK(std::abs(dense(i, j) - dense(j, i)) < 1e-12);
}

TEST_CASE("row sums equal half line charging when no shunts, taps or shifts") {
  NetworkCase c = load_case("case9");
  AdmittanceMatrix y = build_admittance(c);
  Eigen::MatrixXcd dense = y.ybus.toDense();
  for (int i = 0; i < dense.rows(); ++i) {
    std::complex<double> sum = dense.row(i).sum();
    double charging = 0;
    for (const auto& br : c.branches)
      if (br.fbus == c.buses[i].id || br.tbus == c.buses[i].id) charging += br.b / 2.0;
    CHECK(sum.real() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sum.imag() == doctest::Approx(charging).epsilon(1e-9));
  }
}

TEST_CASE("flat profile with no charging or shunts yields zero flows") {
  std::string text =
      "mpc.baseMVA = 100;\n"
      "mpc.bus = [1 3 0 0 0 0 1 1 0 345 1 1.1 0.9; 2 1 0 0 0 0 1 1 0 345 1 1.1 0.9;"
      " 3 1 0 0 0 0 1 1 0 345 1 1.1 0.9;];\n"
      "mpc.gen = [1 0 0 10 -10 1 100 1 10 0;];\n"
      "mpc.branch = [1 2 0.01 0.1 0 0 0 0 0 0 1 -360 360;"
      " 2 3 0.02 0.2 0 0 0 0 0 0 1 -360 360;];\n";
  NetworkCase c = parse_matpower_case(text);
  AdmittanceMatrix y = build_admittance(c);
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(3);
  Eigen::VectorXcd flows_from = y.yf * v;
  Eigen::VectorXcd flows_to = y.yt * v;
  CHECK(flows_from.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(flows_to.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("parser totality: mutated sources either parse or raise, never crash") {
  const auto& files = opfkit::embedded::files();
  std::string base(files.at("cases/case9.m"));
  Rng rng(1234);
  int parsed = 0, raised = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::string mutated = base;
    int edits = 1 + static_cast<int>(rng.next_below(4));
    for (int e = 0; e < edits; ++e) {
      std::size_t pos = rng.next_below(mutated.size());
      switch (rng.next_below(3)) {
        case 0: mutated[pos] = static_cast<char>(32 + rng.next_below(95)); break;
        case 1: mutated.erase(pos, 1 + rng.next_below(5)); break;
        default: mutated.insert(pos, 1, static_cast<char>(32 + rng.next_below(95))); break;
      }
      if (mutated.empty()) mutated = "x";
    }
    try {
      parse_matpower_case(mutated);
      ++parsed;
    } catch (const Error&) {
      ++raised;
    }
  }
  CHECK(parsed + raised == 300);
  CHECK(raised > 0);
}
