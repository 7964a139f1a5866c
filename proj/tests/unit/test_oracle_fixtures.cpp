#include <doctest.h>

#include <fstream>

#include "opfkit/acderiv.hpp"
#include "opfkit/case.hpp"
#include "opfkit/formulations.hpp"
#include "opfkit/powerflow.hpp"
#include "opfkit/solver.hpp"

using namespace opfkit;

namespace {

nlohmann::json load_fixture(const std::string& name) {
  std::ifstream in(std::string(OPFKIT_TEST_DIR) + "/fixtures/" + name);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("case14 dc opf matches the independent reference oracle") {
  // frozen from tests/oracle/dcopf_oracle.py over data/cases/case14.m
  const double f0 = 7642.591777192636;
  Solution s = solve_qp_lp(build_dcopf(load_case("case14")), solver_options_for(5e-6));
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(std::abs(s.f - f0) / f0 < 1e-8);
}

TEST_CASE("case9 newton power flow reproduces the frozen oracle state") {
  nlohmann::json fx = load_fixture("case9_pf.json");
  NetworkCase c = load_case("case9");
  PowerFlowResult r = newton_power_flow(c);
  REQUIRE(r.converged);
  for (int i = 0; i < 9; ++i) {
    CHECK(r.vm[i] == doctest::Approx(fx["vm"][i].get<double>()).epsilon(1e-8));
    CHECK(r.va[i] * 180 / M_PI ==
          doctest::Approx(fx["va_deg"][i].get<double>()).epsilon(1e-6));
  }

  // admittance cross-check: the solved state balances through ybus/yf/yt
  AdmittanceMatrix y = build_admittance(c);
  CVec v(9);
  for (int i = 0; i < 9; ++i)
    v[i] = std::polar(fx["vm"][i].get<double>(), fx["va_deg"][i].get<double>() * M_PI / 180);
  CVec s_inj = (v.array() * (y.ybus * v).conjugate().array()).matrix();
  CVec s_spec(9);
  for (int i = 0; i < 9; ++i)
    s_spec[i] = std::complex<double>(-c.buses[i].pd, -c.buses[i].qd) / c.base_mva;
  for (const auto& g : c.gens) {
    // the oracle state carries the slack/PV outputs implicitly; only PQ buses
    // have fully specified injections
    (void)g;
  }
  double residual = 0;
  for (int i = 0; i < 9; ++i)
    if (c.buses[i].btype == BusType::PQ)
      residual = std::max(residual, std::abs(s_inj[i] - s_spec[i]));
  CHECK(residual < 1e-6);
}
