#include "opfkit/powerflow.hpp"

#include <Eigen/SparseLU>

#include "opfkit/acderiv.hpp"
#include "opfkit/errors.hpp"
#include "opfkit/formulations.hpp"

namespace opfkit {

PowerFlowResult newton_power_flow(const NetworkCase& c, int max_iter, double tol,
                                  bool throw_on_divergence) {
  validate_case(c);
  const int nb = static_cast<int>(c.buses.size());
  const double base = c.base_mva;
  AdmittanceMatrix y = build_admittance(c);

  // specified injections at the stored dispatch
  CVec s_spec(nb);
  for (int i = 0; i < nb; ++i)
    s_spec[i] = std::complex<double>(-c.buses[i].pd / base, -c.buses[i].qd / base);
  for (const auto& g : c.gens) {
    if (g.status != 1) continue;
    s_spec[c.bus_index(g.bus)] += std::complex<double>(g.pg / base, g.qg / base);
  }

  std::vector<int> pv, pq;
  int ref = -1;
  for (int i = 0; i < nb; ++i) {
    switch (c.buses[i].btype) {
      case BusType::REF: ref = i; break;
      case BusType::PV: pv.push_back(i); break;
      case BusType::PQ: pq.push_back(i); break;
      case BusType::ISOLATED: break;
    }
  }
  if (ref < 0) throw InvariantError("power flow needs a REF bus");

  Eigen::VectorXd vm(nb), va(nb);
  for (int i = 0; i < nb; ++i) {
    vm[i] = c.buses[i].vm;
    va[i] = c.buses[i].va * M_PI / 180.0;
  }
  for (const auto& g : c.gens)
    if (g.status == 1) vm[c.bus_index(g.bus)] = g.vg;  // setpoints hold at PV/ref buses

  // unknown ordering: angles at pv+pq, magnitudes at pq
  std::vector<int> ang_idx = pv;
  ang_idx.insert(ang_idx.end(), pq.begin(), pq.end());
  const int na = static_cast<int>(ang_idx.size());
  const int nm = static_cast<int>(pq.size());

  PowerFlowResult out;
  for (int iter = 0; iter <= max_iter; ++iter) {
    CVec v = polar_voltages(vm, va);
    CVec mis = (v.array() * (y.ybus * v).conjugate().array()).matrix() - s_spec;
    Eigen::VectorXd f(na + nm);
    for (int k = 0; k < na; ++k) f[k] = mis[ang_idx[k]].real();
    for (int k = 0; k < nm; ++k) f[na + k] = mis[pq[k]].imag();
    out.max_mismatch = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    out.iterations = iter;
    if (out.max_mismatch < tol) {
      out.converged = true;
      break;
    }
    if (iter == max_iter || !f.allFinite() || out.max_mismatch > 1e6) break;

    auto d = bus_injection_derivatives(y.ybus, v);
    Eigen::MatrixXcd dva = d.ds_dva.toDense();
    Eigen::MatrixXcd dvm = d.ds_dvm.toDense();
    Eigen::MatrixXd jac(na + nm, na + nm);
    for (int r = 0; r < na; ++r) {
      for (int ccol = 0; ccol < na; ++ccol) jac(r, ccol) = dva(ang_idx[r], ang_idx[ccol]).real();
      for (int ccol = 0; ccol < nm; ++ccol) jac(r, na + ccol) = dvm(ang_idx[r], pq[ccol]).real();
    }
    for (int r = 0; r < nm; ++r) {
      for (int ccol = 0; ccol < na; ++ccol) jac(na + r, ccol) = dva(pq[r], ang_idx[ccol]).imag();
      for (int ccol = 0; ccol < nm; ++ccol) jac(na + r, na + ccol) = dvm(pq[r], pq[ccol]).imag();
    }
    Eigen::VectorXd step = jac.partialPivLu().solve(-f);
    if (!step.allFinite()) break;
    for (int k = 0; k < na; ++k) va[ang_idx[k]] += step[k];
    for (int k = 0; k < nm; ++k) vm[pq[k]] += step[na + k];
  }

  out.vm = vm;
  out.va = va;
  if (!out.converged && throw_on_divergence)
    throw Error("power flow diverged after " + std::to_string(out.iterations) +
                " iterations (mismatch " + std::to_string(out.max_mismatch) + " p.u.)");
  return out;
}

Eigen::VectorXd dc_angles(const NetworkCase& c, const Eigen::VectorXd& injection_pu,
                          const std::vector<int>& excluded) {
  const int nb = static_cast<int>(c.buses.size());
  DcNetwork dc = make_dc_network(c, excluded);
  int ref = -1;
  for (int i = 0; i < nb; ++i)
    if (c.buses[i].btype == BusType::REF) ref = i;
  if (ref < 0) throw InvariantError("dc_angles needs a REF bus");

  // solve Bbus theta = injection with the reference angle pinned to zero
  SpMat a = dc.bbus;
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      if (it.row() != ref) trips.emplace_back(it.row(), it.col(), it.value());
  trips.emplace_back(ref, ref, 1.0);
  SpMat pinned(nb, nb);
  pinned.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd rhs = injection_pu - dc.pbusinj;
  rhs[ref] = 0.0;

  Eigen::SparseLU<SpMat> lu;
  pinned.makeCompressed();
  lu.compute(pinned);
  if (lu.info() != Eigen::Success)
    throw Error("dc_angles: singular susceptance system (islanded network?)");
  return lu.solve(rhs);
}

}  // namespace opfkit
