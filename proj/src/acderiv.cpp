#include "opfkit/acderiv.hpp"

#include <vector>

namespace opfkit {

using Cplx = std::complex<double>;

CVec polar_voltages(const Eigen::VectorXd& vm, const Eigen::VectorXd& va) {
  CVec v(vm.size());
  for (int i = 0; i < vm.size(); ++i) v[i] = std::polar(vm[i], va[i]);
  return v;
}

namespace {

CMat cdiag(const CVec& d) {
  CMat m(d.size(), d.size());
  m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  for (int i = 0; i < d.size(); ++i) m.insert(i, i) = d[i];
  m.makeCompressed();
  return m;
}

}  // namespace

FlowDerivatives bus_injection_derivatives(const CMat& ybus, const CVec& v) {
  const int n = static_cast<int>(v.size());
  CVec ibus = ybus * v;
  CVec e(n);  // unit-magnitude phasors V ./ |V|
  for (int i = 0; i < n; ++i) e[i] = v[i] / std::abs(v[i]);

  CMat diag_v = cdiag(v);
  CMat diag_i = cdiag(ibus);
  CMat diag_e = cdiag(e);

  FlowDerivatives d;
  d.s = diag_v * ibus.conjugate();
  CMat yv = ybus * diag_v;
  d.ds_dva = Cplx(0, 1) * (diag_v * (CMat(diag_i - yv)).conjugate());
  d.ds_dvm = diag_v * (CMat(ybus * diag_e)).conjugate() + CMat(diag_i.conjugate()) * diag_e;
  return d;
}

FlowDerivatives branch_flow_derivatives(const CMat& ybr, const CMat& cbr, const CVec& v) {
  const int n = static_cast<int>(v.size());
  CVec ibr = ybr * v;
  CVec vbr = cbr * v;
  CVec e(n);
  for (int i = 0; i < n; ++i) e[i] = v[i] / std::abs(v[i]);

  CMat diag_v = cdiag(v);
  CMat diag_e = cdiag(e);
  CMat diag_ibr = cdiag(ibr);
  CMat diag_vbr = cdiag(vbr);

  FlowDerivatives d;
  d.s = vbr.array() * ibr.conjugate().array();
  d.ds_dva = Cplx(0, 1) * (CMat(diag_ibr.conjugate()) * cbr * diag_v -
                           diag_vbr * (CMat(ybr * diag_v)).conjugate());
  d.ds_dvm = CMat(diag_ibr.conjugate()) * cbr * diag_e +
             diag_vbr * (CMat(ybr * diag_e)).conjugate();
  return d;
}

ScalarFormHessian scalar_form_hessian(const CMat& a, const CVec& v) {
  const int n = static_cast<int>(v.size());
  // B = diag(V) A diag(conj(V))
  CMat b = cdiag(v) * a * cdiag(v.conjugate());
  CMat bt = CMat(b.transpose());
  CVec row_sums = b * CVec::Ones(n);
  CVec col_sums = bt * CVec::Ones(n);
  CMat d_row = cdiag(row_sums);
  CMat d_col = cdiag(col_sums);
  CVec inv_vm(n);
  for (int i = 0; i < n; ++i) inv_vm[i] = 1.0 / std::abs(v[i]);
  CMat g = cdiag(inv_vm);

  ScalarFormHessian h;
  h.aa = b + bt - d_row - d_col;
  h.av = Cplx(0, 1) * CMat(b - bt + d_row - d_col) * g;
  h.vv = g * CMat(b + bt) * g;
  return h;
}

ScalarFormHessian bus_injection_hessian(const CMat& ybus, const CVec& v,
                                        const Eigen::VectorXd& lam) {
  CVec clam(lam.size());
  for (int i = 0; i < lam.size(); ++i) clam[i] = lam[i];
  CMat a = cdiag(clam) * CMat(ybus.conjugate());
  return scalar_form_hessian(a, v);
}

ScalarFormHessian branch_flow_hessian(const CMat& ybr, const CMat& cbr, const CVec& v,
                                      const CVec& lam) {
  CMat a = CMat(cbr.transpose()) * cdiag(lam) * CMat(ybr.conjugate());
  return scalar_form_hessian(a, v);
}

}  // namespace opfkit
