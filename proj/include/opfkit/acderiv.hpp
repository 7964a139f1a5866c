#pragma once

#include <complex>

#include <Eigen/SparseCore>

namespace opfkit {

using CMat = Eigen::SparseMatrix<std::complex<double>>;
using CVec = Eigen::VectorXcd;

/// Complex bus voltages from polar coordinates.
CVec polar_voltages(const Eigen::VectorXd& vm, const Eigen::VectorXd& va);

/// S(V) = diag(V) conj(Y V) for a bus- or branch-side matrix Y; for branch
/// quantities pass the branch-to-bus matrix and the side incidence C so that
/// S = diag(C V) conj(Y V). For bus injections C is the identity.
struct FlowDerivatives {
  CVec s;         // flow/injection values
  CMat ds_dva;    // rows x n
  CMat ds_dvm;    // rows x n
};

FlowDerivatives bus_injection_derivatives(const CMat& ybus, const CVec& v);
FlowDerivatives branch_flow_derivatives(const CMat& ybr, const CMat& cbr, const CVec& v);

/// Second derivatives of the scalar s(V) = V^T A conj(V) in polar
/// coordinates; every injection/flow Hessian reduces to this form with a
/// multiplier-folded A. Blocks are ordered (Va, Vm); d2_av has Va rows and
/// Vm columns and the full Hessian is [[aa, av], [av^T, vv]].
struct ScalarFormHessian {
  CMat aa, av, vv;
};

ScalarFormHessian scalar_form_hessian(const CMat& a, const CVec& v);

/// Hessian of lam' * S_bus in polar coordinates (complex; caller takes real
/// or imaginary parts for P/Q multipliers).
ScalarFormHessian bus_injection_hessian(const CMat& ybus, const CVec& v,
                                        const Eigen::VectorXd& lam);

/// Hessian of lam' * S_br for branch flows S = diag(C V) conj(Y V) with a
/// complex multiplier vector (used with lam = conj(S) .* nu for |S|^2 terms).
ScalarFormHessian branch_flow_hessian(const CMat& ybr, const CMat& cbr, const CVec& v,
                                      const CVec& lam);

}  // namespace opfkit
