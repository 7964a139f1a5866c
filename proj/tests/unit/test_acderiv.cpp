#include <doctest.h>

#include <Eigen/Dense>

#include "opfkit/acderiv.hpp"
#include "opfkit/case.hpp"
#include "opfkit/rng.hpp"

using namespace opfkit;

namespace {

struct Point {
  Eigen::VectorXd vm, va;
};

Point random_point(int n, Rng& rng) {
  Point p;
  p.vm.resize(n);
  p.va.resize(n);
  for (int i = 0; i < n; ++i) {
    p.vm[i] = rng.uniform(0.95, 1.05);
    p.va[i] = rng.uniform(-0.3, 0.3);
  }
  return p;
}

constexpr double kH = 1e-6;

}  // namespace

TEST_CASE("bus injection jacobian matches finite differences") {
  NetworkCase c = load_case("case9");
  AdmittanceMatrix y = build_admittance(c);
  Rng rng(7);
  const int n = static_cast<int>(c.buses.size());
  for (int trial = 0; trial < 4; ++trial) {
    Point p = random_point(n, rng);
    auto d = bus_injection_derivatives(y.ybus, polar_voltages(p.vm, p.va));
    for (int k = 0; k < n; ++k) {
      Point pa = p, pb = p;
      pa.va[k] += kH;
      pb.va[k] -= kH;
      CVec fd = (bus_injection_derivatives(y.ybus, polar_voltages(pa.vm, pa.va)).s -
                 bus_injection_derivatives(y.ybus, polar_voltages(pb.vm, pb.va)).s) /
                (2 * kH);
      for (int i = 0; i < n; ++i)
        CHECK(std::abs(CMat(d.ds_dva).coeff(i, k) - fd[i]) <
              1e-6 * (1 + std::abs(fd[i])));
      pa = p;
      pb = p;
      pa.vm[k] += kH;
      pb.vm[k] -= kH;
      fd = (bus_injection_derivatives(y.ybus, polar_voltages(pa.vm, pa.va)).s -
            bus_injection_derivatives(y.ybus, polar_voltages(pb.vm, pb.va)).s) /
           (2 * kH);
      for (int i = 0; i < n; ++i)
        CHECK(std::abs(CMat(d.ds_dvm).coeff(i, k) - fd[i]) <
              1e-6 * (1 + std::abs(fd[i])));
    }
  }
}

TEST_CASE("bus injection hessian matches finite differences of the gradient") {
  NetworkCase c = load_case("case9");
  AdmittanceMatrix y = build_admittance(c);
  Rng rng(11);
  const int n = static_cast<int>(c.buses.size());
  Point p = random_point(n, rng);
  Eigen::VectorXd lam(n);
  for (int i = 0; i < n; ++i) lam[i] = rng.uniform(-2, 2);

  auto grad_of = [&](const Point& q) {
    // gradient of lam' * S over (va, vm), complex-valued
    auto d = bus_injection_derivatives(y.ybus, polar_voltages(q.vm, q.va));
    CVec clam(n);
    for (int i = 0; i < n; ++i) clam[i] = lam[i];
    CVec g(2 * n);
    g.head(n) = CMat(d.ds_dva.transpose()) * clam;
    g.tail(n) = CMat(d.ds_dvm.transpose()) * clam;
    return g;
  };

  ScalarFormHessian h = bus_injection_hessian(y.ybus, polar_voltages(p.vm, p.va), lam);
  Eigen::MatrixXcd full(2 * n, 2 * n);
  full.topLeftCorner(n, n) = h.aa.toDense();
  full.topRightCorner(n, n) = h.av.toDense();
  full.bottomLeftCorner(n, n) = h.av.toDense().transpose();
  full.bottomRightCorner(n, n) = h.vv.toDense();

  for (int k = 0; k < 2 * n; ++k) {
    Point pa = p, pb = p;
    if (k < n) {
      pa.va[k] += kH;
      pb.va[k] -= kH;
    } else {
      pa.vm[k - n] += kH;
      pb.vm[k - n] -= kH;
    }
    CVec fd = (grad_of(pa) - grad_of(pb)) / (2 * kH);
    for (int i = 0; i < 2 * n; ++i)
      CHECK(std::abs(full(i, k) - fd[i]) < 2e-5 * (1 + std::abs(fd[i])));
  }
}

TEST_CASE("squared branch flow hessian matches finite differences") {
  NetworkCase c = load_case("case9");
  AdmittanceMatrix y = build_admittance(c);
  const int n = static_cast<int>(c.buses.size());
  const int nl = static_cast<int>(y.branch_rows.size());

  // from-side incidence
  CMat cf(nl, n);
  for (int row = 0; row < nl; ++row)
    cf.insert(row, c.bus_index(c.branches[y.branch_rows[row]].fbus)) = 1.0;
  cf.makeCompressed();

  Rng rng(13);
  Point p = random_point(n, rng);
  Eigen::VectorXd nu(nl);
  for (int i = 0; i < nl; ++i) nu[i] = rng.uniform(0, 2);

  auto grad_sq = [&](const Point& q) {
    auto d = branch_flow_derivatives(y.yf, cf, polar_voltages(q.vm, q.va));
    Eigen::MatrixXcd jac(nl, 2 * n);
    jac << d.ds_dva.toDense(), d.ds_dvm.toDense();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n);
    for (int l = 0; l < nl; ++l)
      g += nu[l] * 2.0 * (std::conj(d.s[l]) * jac.row(l)).real().transpose();
    return g;
  };

  CVec v = polar_voltages(p.vm, p.va);
  auto d = branch_flow_derivatives(y.yf, cf, v);
  CVec lam(nl);
  for (int l = 0; l < nl; ++l) lam[l] = nu[l] * std::conj(d.s[l]);
  ScalarFormHessian h = branch_flow_hessian(y.yf, cf, v, lam);

  Eigen::MatrixXcd flow_part(2 * n, 2 * n);
  flow_part.topLeftCorner(n, n) = h.aa.toDense();
  flow_part.topRightCorner(n, n) = h.av.toDense();
  flow_part.bottomLeftCorner(n, n) = h.av.toDense().transpose();
  flow_part.bottomRightCorner(n, n) = h.vv.toDense();

  Eigen::MatrixXcd jac(nl, 2 * n);
  jac << d.ds_dva.toDense(), d.ds_dvm.toDense();
  Eigen::MatrixXd full = 2.0 * flow_part.real() +
                         2.0 * (jac.transpose() * nu.asDiagonal() * jac.conjugate()).real();

  for (int k = 0; k < 2 * n; ++k) {
    Point pa = p, pb = p;
    if (k < n) {
      pa.va[k] += kH;
      pb.va[k] -= kH;
    } else {
      pa.vm[k - n] += kH;
      pb.vm[k - n] -= kH;
    }
    Eigen::VectorXd fd = (grad_sq(pa) - grad_sq(pb)) / (2 * kH);
    for (int i = 0; i < 2 * n; ++i)
      CHECK(std::abs(full(i, k) - fd[i]) < 3e-5 * (1 + std::abs(fd[i])));
  }
}
