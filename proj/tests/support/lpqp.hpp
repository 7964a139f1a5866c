#pragma once

// Deterministic generator for the randomized small DC-OPF instances used in
// the LP/QP oracle-equivalence check. The frozen expected objectives in
// tests/fixtures/lpqp_expected.json were produced by running
// tests/oracle/dcopf_oracle.py over a dump of exactly these instances, so
// this recipe must not change without regenerating the fixture.

#include <string>
#include <vector>

#include "opfkit/case.hpp"
#include "opfkit/rng.hpp"

namespace opfkit::testsupport {

inline NetworkCase lpqp_instance(int index) {
  Rng rng = Rng::substream(0xD00DFEEDull, static_cast<std::uint64_t>(index));
  NetworkCase c;
  c.name = "lpqp_" + std::to_string(index);
  c.base_mva = 100.0;

  const int nb = 3 + static_cast<int>(rng.next_below(3));  // 3..5 buses
  for (int i = 0; i < nb; ++i) {
    BusRecord b;
    b.id = i + 1;
    b.btype = i == 0 ? BusType::REF : BusType::PQ;
    b.vm = 1.0;
    b.va = 0.0;
    b.base_kv = 100.0;
    b.vmax = 1.1;
    b.vmin = 0.9;
    c.buses.push_back(b);
  }

  // ring plus random chords
  std::vector<std::pair<int, int>> lines;
  for (int i = 0; i < nb; ++i) lines.emplace_back(i + 1, (i + 1) % nb + 1);
  for (int i = 1; i <= nb; ++i)
    for (int j = i + 2; j <= nb; ++j) {
      if (i == 1 && j == nb) continue;  // ring edge already present
      if (rng.next_double() < 0.35) lines.emplace_back(i, j);
    }

  const int ngen = 2 + static_cast<int>(rng.next_below(2));
  double total_pmax = 0;
  for (int g = 0; g < ngen && g < nb; ++g) {
    GenRecord gen;
    gen.bus = g == 0 ? 1 : 1 + static_cast<int>(rng.next_below(nb));
    gen.qmax = 300;
    gen.qmin = -300;
    gen.vg = 1.0;
    gen.pmax = rng.uniform(80, 200);
    gen.pmin = 0;
    c.gens.push_back(gen);
    total_pmax += gen.pmax;

    GenCost gc;
    gc.ncost = 3;
    gc.coeffs = {rng.uniform(0.005, 0.05), rng.uniform(5, 40), rng.uniform(0, 50)};
    c.gencosts.push_back(gc);
  }

  const double total_load = total_pmax * rng.uniform(0.45, 0.7);
  std::vector<double> shares(nb);
  double sum = 0;
  for (int i = 0; i < nb; ++i) {
    shares[i] = rng.uniform(0.1, 1.0);
    sum += shares[i];
  }
  for (int i = 0; i < nb; ++i) c.buses[i].pd = total_load * shares[i] / sum;

  for (auto [f, t] : lines) {
    BranchRecord br;
    br.fbus = f;
    br.tbus = t;
    br.r = 0;
    br.x = rng.uniform(0.05, 0.3);
    br.rate_a = rng.next_double() < 0.7 ? total_load * rng.uniform(0.6, 1.3) : 0.0;
    c.branches.push_back(br);
  }
  return c;
}

inline std::vector<NetworkCase> lpqp_instances(int count = 50) {
  std::vector<NetworkCase> out;
  for (int i = 0; i < count; ++i) out.push_back(lpqp_instance(i));
  return out;
}

}  // namespace opfkit::testsupport
