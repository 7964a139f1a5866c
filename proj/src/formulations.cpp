#include "opfkit/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <set>

#include "opfkit/acderiv.hpp"
#include "opfkit/errors.hpp"
#include "opfkit/util.hpp"

namespace opfkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegToRad = M_PI / 180.0;

Vec constant(int n, double v) { return Vec::Constant(n, v); }

}  // namespace

std::vector<int> in_service_gens(const NetworkCase& c) {
  std::vector<int> rows;
  for (std::size_t i = 0; i < c.gens.size(); ++i)
    if (c.gens[i].status == 1) rows.push_back(static_cast<int>(i));
  return rows;
}

namespace {

int ref_bus_index(const NetworkCase& c) {
  for (std::size_t i = 0; i < c.buses.size(); ++i)
    if (c.buses[i].btype == BusType::REF) return static_cast<int>(i);
  throw InvariantError("case has no slack bus");
}

/// Generator-to-bus mapping for the in-service generators.
SpMat make_cg(const NetworkCase& c, const std::vector<int>& on) {
  SpMat cg(static_cast<int>(c.buses.size()), static_cast<int>(on.size()));
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t k = 0; k < on.size(); ++k)
    trips.emplace_back(c.bus_index(c.gens[on[k]].bus), static_cast<int>(k), 1.0);
  cg.setFromTriplets(trips.begin(), trips.end());
  return cg;
}

void require_costs(const NetworkCase& c, const std::vector<int>& on) {
  if (on.empty()) throw InvariantError("no in-service generator");
  if (c.gencosts.size() != c.gens.size())
    throw InvariantError("case has no generator cost data");
  for (int g : on)
    if (c.gencosts[g].model != 2)
      throw InvariantError("generation cost must be polynomial");
}

/// Polynomial cost over one Pg block; coefficients act on MW.
void add_generation_cost(OptimizationProblem& p, const NetworkCase& c,
                         const std::vector<int>& on, const std::string& pg_block,
                         const std::string& term_name) {
  const int off = p.offset_of(pg_block);
  const int ng = static_cast<int>(on.size());
  const double base = c.base_mva;
  QuadraticTerm t;
  t.name = term_name;
  t.tag = "generation cost";
  t.Q.resize(p.num_vars(), p.num_vars());
  t.c = Vec::Zero(p.num_vars());
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < ng; ++k) {
    const GenCost& gc = c.gencosts[on[k]];
    double c2 = 0, c1 = 0, c0 = 0;
    if (gc.ncost >= 3) {
      c2 = gc.coeffs[gc.ncost - 3];
      c1 = gc.coeffs[gc.ncost - 2];
      c0 = gc.coeffs[gc.ncost - 1];
    } else if (gc.ncost == 2) {
      c1 = gc.coeffs[0];
      c0 = gc.coeffs[1];
    } else if (gc.ncost == 1) {
      c0 = gc.coeffs[0];
    }
    if (c2 != 0) trips.emplace_back(off + k, off + k, 2.0 * c2 * base * base);
    t.c[off + k] = c1 * base;
    t.k += c0;
  }
  t.Q.setFromTriplets(trips.begin(), trips.end());
  p.add_quadratic(std::move(t));
}

/// Shared evaluation context for the AC constraint callbacks.
struct AcContext {
  int nb = 0, ng = 0;
  int va_off = 0, vm_off = 0, pg_off = 0, qg_off = 0;
  int shed_off = -1, nshed = 0;
  CMat ybus;
  SpMat cg;
  Vec pd_pu, qd_pu;
  SpMat cd;  // shed-to-bus mapping
  CVec voltages(const Vec& x) const {
    return polar_voltages(x.segment(vm_off, nb), x.segment(va_off, nb));
  }
};

struct AcFlowSide {
  CMat ybr;  // rated rows only
  CMat cbr;
  Vec rate_pu;
  int slack_off = -1;  // per-row overload slack when >= 0
};

void add_ac_balance(OptimizationProblem& p, std::shared_ptr<AcContext> ctx) {
  const int nx = p.num_vars();
  NonlinearConstraint con;
  con.name = "power_balance";
  con.kind = ConstraintKind::Equality;
  con.rows = 2 * ctx->nb;
  con.tag = "bus active/reactive power balance";
  con.value = [ctx](const Vec& x) {
    CVec v = ctx->voltages(x);
    CVec s = (v.array() * (ctx->ybus * v).conjugate().array()).matrix();
    Vec g(2 * ctx->nb);
    Vec pg = x.segment(ctx->pg_off, ctx->ng);
    Vec qg = x.segment(ctx->qg_off, ctx->ng);
    g.head(ctx->nb) = s.real() + ctx->pd_pu - ctx->cg * pg;
    g.tail(ctx->nb) = s.imag() + ctx->qd_pu - ctx->cg * qg;
    if (ctx->shed_off >= 0)
      g.head(ctx->nb) -= ctx->cd * x.segment(ctx->shed_off, ctx->nshed);
    return g;
  };
  con.jacobian = [ctx, nx](const Vec& x) {
    auto d = bus_injection_derivatives(ctx->ybus, ctx->voltages(x));
    std::vector<Eigen::Triplet<double>> trips;
    auto scatter = [&](const CMat& m, int row0, int col0, bool real_part) {
      for (int k = 0; k < m.outerSize(); ++k)
        for (CMat::InnerIterator it(m, k); it; ++it)
          trips.emplace_back(row0 + static_cast<int>(it.row()),
                             col0 + static_cast<int>(it.col()),
                             real_part ? it.value().real() : it.value().imag());
    };
    scatter(d.ds_dva, 0, ctx->va_off, true);
    scatter(d.ds_dvm, 0, ctx->vm_off, true);
    scatter(d.ds_dva, ctx->nb, ctx->va_off, false);
    scatter(d.ds_dvm, ctx->nb, ctx->vm_off, false);
    for (int k = 0; k < ctx->cg.outerSize(); ++k)
      for (SpMat::InnerIterator it(ctx->cg, k); it; ++it) {
        trips.emplace_back(static_cast<int>(it.row()), ctx->pg_off + static_cast<int>(it.col()),
                           -it.value());
        trips.emplace_back(ctx->nb + static_cast<int>(it.row()),
                           ctx->qg_off + static_cast<int>(it.col()), -it.value());
      }
    if (ctx->shed_off >= 0)
      for (int k = 0; k < ctx->cd.outerSize(); ++k)
        for (SpMat::InnerIterator it(ctx->cd, k); it; ++it)
          trips.emplace_back(static_cast<int>(it.row()),
                             ctx->shed_off + static_cast<int>(it.col()), -it.value());
    SpMat j(2 * ctx->nb, nx);
    j.setFromTriplets(trips.begin(), trips.end());
    return j;
  };
  con.hessian = [ctx, nx](const Vec& x, const Vec& lam) {
    CVec v = ctx->voltages(x);
    ScalarFormHessian hp = bus_injection_hessian(ctx->ybus, v, lam.head(ctx->nb));
    ScalarFormHessian hq = bus_injection_hessian(ctx->ybus, v, lam.tail(ctx->nb));
    std::vector<Eigen::Triplet<double>> trips;
    auto scatter = [&](const CMat& m, int row0, int col0, bool real_part) {
      for (int k = 0; k < m.outerSize(); ++k)
        for (CMat::InnerIterator it(m, k); it; ++it) {
          double val = real_part ? it.value().real() : it.value().imag();
          if (val != 0)
            trips.emplace_back(row0 + static_cast<int>(it.row()),
                               col0 + static_cast<int>(it.col()), val);
        }
    };
    // real part for P multipliers, imaginary for Q
    scatter(hp.aa, ctx->va_off, ctx->va_off, true);
    scatter(hp.av, ctx->va_off, ctx->vm_off, true);
    scatter(CMat(hp.av.transpose()), ctx->vm_off, ctx->va_off, true);
    scatter(hp.vv, ctx->vm_off, ctx->vm_off, true);
    scatter(hq.aa, ctx->va_off, ctx->va_off, false);
    scatter(hq.av, ctx->va_off, ctx->vm_off, false);
    scatter(CMat(hq.av.transpose()), ctx->vm_off, ctx->va_off, false);
    scatter(hq.vv, ctx->vm_off, ctx->vm_off, false);
    SpMat h(nx, nx);
    h.setFromTriplets(trips.begin(), trips.end());
    return h;
  };
  p.add_nonlinear_constraint(std::move(con));
}

/// Squared apparent-power limit |S|^2 <= (rate + s)^2 on one branch end.
void add_ac_flow(OptimizationProblem& p, std::shared_ptr<AcContext> ctx,
                 std::shared_ptr<AcFlowSide> side, const std::string& name) {
  const int nx = p.num_vars();
  const int rows = static_cast<int>(side->rate_pu.size());
  if (rows == 0) return;
  NonlinearConstraint con;
  con.name = name;
  con.kind = ConstraintKind::Inequality;
  con.rows = rows;
  con.tag = "branch apparent-power limit";
  con.value = [ctx, side, rows](const Vec& x) {
    CVec v = ctx->voltages(x);
    CVec s = ((side->cbr * v).array() * (side->ybr * v).conjugate().array()).matrix();
    Vec h(rows);
    for (int l = 0; l < rows; ++l) {
      double lim = side->rate_pu[l];
      if (side->slack_off >= 0) lim += x[side->slack_off + l];
      h[l] = std::norm(s[l]) - lim * lim;
    }
    return h;
  };
  con.jacobian = [ctx, side, rows, nx](const Vec& x) {
    CVec v = ctx->voltages(x);
    auto d = branch_flow_derivatives(side->ybr, side->cbr, v);
    std::vector<Eigen::Triplet<double>> trips;
    auto scatter = [&](const CMat& m, int col0) {
      for (int k = 0; k < m.outerSize(); ++k)
        for (CMat::InnerIterator it(m, k); it; ++it) {
          double val = 2.0 * (std::conj(d.s[it.row()]) * it.value()).real();
          if (val != 0)
            trips.emplace_back(static_cast<int>(it.row()), col0 + static_cast<int>(it.col()),
                               val);
        }
    };
    scatter(d.ds_dva, ctx->va_off);
    scatter(d.ds_dvm, ctx->vm_off);
    if (side->slack_off >= 0)
      for (int l = 0; l < rows; ++l)
        trips.emplace_back(l, side->slack_off + l,
                           -2.0 * (side->rate_pu[l] + x[side->slack_off + l]));
    SpMat j(rows, nx);
    j.setFromTriplets(trips.begin(), trips.end());
    return j;
  };
  con.hessian = [ctx, side, rows, nx](const Vec& x, const Vec& nu) {
    CVec v = ctx->voltages(x);
    auto d = branch_flow_derivatives(side->ybr, side->cbr, v);
    CVec lam(rows);
    for (int l = 0; l < rows; ++l) lam[l] = nu[l] * std::conj(d.s[l]);
    ScalarFormHessian hs = branch_flow_hessian(side->ybr, side->cbr, v, lam);
    const int nb = ctx->nb;
    Eigen::MatrixXcd jac(rows, 2 * nb);
    jac << d.ds_dva.toDense(), d.ds_dvm.toDense();
    Eigen::MatrixXd outer =
        2.0 * (jac.transpose() * nu.asDiagonal() * jac.conjugate()).real();
    std::vector<Eigen::Triplet<double>> trips;
    auto scatter_c = [&](const CMat& m, int row0, int col0) {
      for (int k = 0; k < m.outerSize(); ++k)
        for (CMat::InnerIterator it(m, k); it; ++it) {
          double val = 2.0 * it.value().real();
          if (val != 0)
            trips.emplace_back(row0 + static_cast<int>(it.row()),
                               col0 + static_cast<int>(it.col()), val);
        }
    };
    scatter_c(hs.aa, ctx->va_off, ctx->va_off);
    scatter_c(hs.av, ctx->va_off, ctx->vm_off);
    scatter_c(CMat(hs.av.transpose()), ctx->vm_off, ctx->va_off);
    scatter_c(hs.vv, ctx->vm_off, ctx->vm_off);
    auto place = [&](int i) { return i < nb ? ctx->va_off + i : ctx->vm_off + i - nb; };
    for (int i = 0; i < 2 * nb; ++i)
      for (int j = 0; j < 2 * nb; ++j)
        if (outer(i, j) != 0) trips.emplace_back(place(i), place(j), outer(i, j));
    if (side->slack_off >= 0)
      for (int l = 0; l < rows; ++l)
        trips.emplace_back(side->slack_off + l, side->slack_off + l, -2.0 * nu[l]);
    SpMat h(nx, nx);
    h.setFromTriplets(trips.begin(), trips.end());
    return h;
  };
  p.add_nonlinear_constraint(std::move(con));
}

/// Branch angle-difference limits; MATPOWER convention (+-360 or a 0/0 pair
/// means unconstrained).
void add_angle_limits(OptimizationProblem& p, const NetworkCase& c, int va_off,
                      const std::string& name) {
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<double> rhs;
  int row = 0;
  for (const auto& br : c.branches) {
    if (br.status != 1) continue;
    const bool lo = br.angmin > -360 && (br.angmin != 0 || br.angmax != 0);
    const bool hi = br.angmax < 360 && (br.angmin != 0 || br.angmax != 0);
    const int f = c.bus_index(br.fbus), t = c.bus_index(br.tbus);
    if (hi) {
      trips.emplace_back(row, va_off + f, 1.0);
      trips.emplace_back(row, va_off + t, -1.0);
      rhs.push_back(br.angmax * kDegToRad);
      ++row;
    }
    if (lo) {
      trips.emplace_back(row, va_off + f, -1.0);
      trips.emplace_back(row, va_off + t, 1.0);
      rhs.push_back(-br.angmin * kDegToRad);
      ++row;
    }
  }
  if (row == 0) return;
  LinearConstraint con;
  con.name = name;
  con.kind = ConstraintKind::Inequality;
  con.A.resize(row, p.num_vars());
  con.A.setFromTriplets(trips.begin(), trips.end());
  con.rhs = Eigen::Map<Vec>(rhs.data(), row);
  con.tag = "branch angle-difference limit";
  p.add_linear_constraint(std::move(con));
}

void add_gen_blocks(OptimizationProblem& p, const NetworkCase& c, const std::vector<int>& on,
                    bool with_q, const std::string& suffix = "") {
  const int ng = static_cast<int>(on.size());
  const double base = c.base_mva;
  Vec plb(ng), pub(ng), p0(ng), qlb(ng), qub(ng), q0(ng);
  for (int k = 0; k < ng; ++k) {
    const GenRecord& g = c.gens[on[k]];
    plb[k] = g.pmin / base;
    pub[k] = g.pmax / base;
    p0[k] = std::clamp(g.pg / base, plb[k], pub[k]);
    qlb[k] = g.qmin / base;
    qub[k] = g.qmax / base;
    q0[k] = std::clamp(g.qg / base, qlb[k], qub[k]);
  }
  p.add_block("Pg" + suffix, ng, plb, pub, p0);
  if (with_q) p.add_block("Qg" + suffix, ng, qlb, qub, q0);
}

OptimizationProblem build_ac_family(const NetworkCase& c,
                                    const std::vector<double>& shed_weights, bool with_shed) {
  validate_case(c);
  const auto on = in_service_gens(c);
  require_costs(c, on);
  const int nb = static_cast<int>(c.buses.size());
  const int ng = static_cast<int>(on.size());
  const double base = c.base_mva;

  OptimizationProblem p;
  // reference angle fixed by bound-pinning
  Vec va_lb = constant(nb, -kInf), va_ub = constant(nb, kInf), va0(nb);
  const int ref = ref_bus_index(c);
  va_lb[ref] = va_ub[ref] = 0.0;
  for (int i = 0; i < nb; ++i) va0[i] = c.buses[i].va * kDegToRad;
  va0[ref] = 0.0;
  p.add_block("Va", nb, va_lb, va_ub, va0);

  Vec vm_lb(nb), vm_ub(nb), vm0(nb);
  for (int i = 0; i < nb; ++i) {
    vm_lb[i] = c.buses[i].vmin;
    vm_ub[i] = c.buses[i].vmax;
    vm0[i] = c.buses[i].vm;
  }
  for (int g : on) vm0[c.bus_index(c.gens[g].bus)] = c.gens[g].vg;  // setpoint start
  for (int i = 0; i < nb; ++i) vm0[i] = std::clamp(vm0[i], vm_lb[i], vm_ub[i]);
  p.add_block("Vm", nb, vm_lb, vm_ub, vm0);

  add_gen_blocks(p, c, on, /*with_q=*/true);

  auto ctx = std::make_shared<AcContext>();
  ctx->nb = nb;
  ctx->ng = ng;
  ctx->va_off = p.offset_of("Va");
  ctx->vm_off = p.offset_of("Vm");
  ctx->pg_off = p.offset_of("Pg");
  ctx->qg_off = p.offset_of("Qg");
  ctx->ybus = build_admittance(c).ybus;
  ctx->cg = make_cg(c, on);
  ctx->pd_pu.resize(nb);
  ctx->qd_pu.resize(nb);
  for (int i = 0; i < nb; ++i) {
    ctx->pd_pu[i] = c.buses[i].pd / base;
    ctx->qd_pu[i] = c.buses[i].qd / base;
  }

  if (with_shed) {
    std::vector<int> shed_buses;
    for (int i = 0; i < nb; ++i)
      if (c.buses[i].pd > 0) shed_buses.push_back(i);
    const int nd = static_cast<int>(shed_buses.size());
    std::vector<double> w = shed_weights;
    if (w.size() == 1) w.assign(nd, w[0]);
    if (static_cast<int>(w.size()) != nd)
      throw InvariantError("expected one shed weight or one per load bus (" +
                           std::to_string(nd) + ")");
    for (double wi : w)
      if (wi < 0) throw InvariantError("shed weights must be nonnegative");
    Vec lb = Vec::Zero(nd), ub(nd);
    for (int k = 0; k < nd; ++k) ub[k] = c.buses[shed_buses[k]].pd / base;
    p.add_block("Lshed", nd, lb, ub, Vec::Zero(nd));
    ctx->shed_off = p.offset_of("Lshed");
    ctx->nshed = nd;
    ctx->cd.resize(nb, nd);
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < nd; ++k) trips.emplace_back(shed_buses[k], k, 1.0);
    ctx->cd.setFromTriplets(trips.begin(), trips.end());
    QuadraticTerm t;
    t.name = "shed_cost";
    t.tag = "unserved-energy penalty";
    t.c = Vec::Zero(p.num_vars());
    for (int k = 0; k < nd; ++k) t.c[ctx->shed_off + k] = w[k] * base;
    p.add_quadratic(std::move(t));
  }

  add_ac_balance(p, ctx);

  AdmittanceMatrix y = build_admittance(c);
  std::vector<int> rated;
  for (std::size_t row = 0; row < y.branch_rows.size(); ++row)
    if (c.branches[y.branch_rows[row]].rate_a > 0) rated.push_back(static_cast<int>(row));
  const int nr = static_cast<int>(rated.size());
  if (nr > 0) {
    auto from = std::make_shared<AcFlowSide>();
    auto to = std::make_shared<AcFlowSide>();
    from->ybr.resize(nr, nb);
    to->ybr.resize(nr, nb);
    from->cbr.resize(nr, nb);
    to->cbr.resize(nr, nb);
    from->rate_pu.resize(nr);
    to->rate_pu.resize(nr);
    std::vector<Eigen::Triplet<std::complex<double>>> tfy, tty, tfc, ttc;
    for (int k = 0; k < nr; ++k) {
      const int row = rated[k];
      const auto& br = c.branches[y.branch_rows[row]];
      for (int col = 0; col < y.yf.outerSize(); ++col) {
        for (CMat::InnerIterator it(y.yf, col); it; ++it)
          if (it.row() == row) tfy.emplace_back(k, col, it.value());
        for (CMat::InnerIterator it(y.yt, col); it; ++it)
          if (it.row() == row) tty.emplace_back(k, col, it.value());
      }
      tfc.emplace_back(k, c.bus_index(br.fbus), 1.0);
      ttc.emplace_back(k, c.bus_index(br.tbus), 1.0);
      from->rate_pu[k] = br.rate_a / base;
      to->rate_pu[k] = br.rate_a / base;
    }
    from->ybr.setFromTriplets(tfy.begin(), tfy.end());
    to->ybr.setFromTriplets(tty.begin(), tty.end());
    from->cbr.setFromTriplets(tfc.begin(), tfc.end());
    to->cbr.setFromTriplets(ttc.begin(), ttc.end());
    add_ac_flow(p, ctx, from, "flow_from");
    add_ac_flow(p, ctx, to, "flow_to");
  }

  add_angle_limits(p, c, ctx->va_off, "angle_limits");
  add_generation_cost(p, c, on, "Pg", "gen_cost");
  return p;
}

}  // namespace

OptimizationProblem build_acopf(const NetworkCase& c) { return build_ac_family(c, {}, false); }

OptimizationProblem build_load_shedding(const NetworkCase& c,
                                        const std::vector<double>& weights) {
  if (weights.empty()) throw InvariantError("load shedding requires weights");
  return build_ac_family(c, weights, true);
}

DcNetwork make_dc_network(const NetworkCase& c, const std::vector<int>& excluded) {
  const int nb = static_cast<int>(c.buses.size());
  std::set<int> skip(excluded.begin(), excluded.end());
  DcNetwork dc;
  std::vector<Eigen::Triplet<double>> tf;
  std::vector<double> pfinj, limits;
  int row = 0;
  for (std::size_t l = 0; l < c.branches.size(); ++l) {
    const auto& br = c.branches[l];
    if (br.status != 1 || skip.count(static_cast<int>(l) + 1)) continue;
    if (br.x == 0) throw InvariantError("branch " + std::to_string(l + 1) +
                                        " has zero reactance; DC susceptance undefined");
    const double b = 1.0 / (br.x * (br.tap == 0 ? 1.0 : br.tap));
    const int f = c.bus_index(br.fbus), t = c.bus_index(br.tbus);
    tf.emplace_back(row, f, b);
    tf.emplace_back(row, t, -b);
    pfinj.push_back(-b * br.shift * kDegToRad);
    limits.push_back(br.rate_a / c.base_mva);
    dc.branch_rows.push_back(static_cast<int>(l));
    ++row;
  }
  dc.bf.resize(row, nb);
  dc.bf.setFromTriplets(tf.begin(), tf.end());
  dc.pfinj = Eigen::Map<Vec>(pfinj.data(), row);
  dc.flow_limit = Eigen::Map<Vec>(limits.data(), row);

  // Bbus = (Cf - Ct)' * Bf, Pbusinj = (Cf - Ct)' * Pfinj
  SpMat cft(row, nb);
  std::vector<Eigen::Triplet<double>> tc;
  for (int k = 0; k < row; ++k) {
    const auto& br = c.branches[dc.branch_rows[k]];
    tc.emplace_back(k, c.bus_index(br.fbus), 1.0);
    tc.emplace_back(k, c.bus_index(br.tbus), -1.0);
  }
  cft.setFromTriplets(tc.begin(), tc.end());
  dc.bbus = SpMat(cft.transpose()) * dc.bf;
  dc.pbusinj = cft.transpose() * dc.pfinj;
  return dc;
}

bool branch_is_bridge(const NetworkCase& c, int excluded) {
  const int nb = static_cast<int>(c.buses.size());
  std::vector<std::vector<int>> adj(nb);
  for (std::size_t l = 0; l < c.branches.size(); ++l) {
    if (c.branches[l].status != 1 || static_cast<int>(l) + 1 == excluded) continue;
    int f = c.bus_index(c.branches[l].fbus), t = c.bus_index(c.branches[l].tbus);
    adj[f].push_back(t);
    adj[t].push_back(f);
  }
  std::vector<bool> seen(nb, false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
  }
  return count != nb;
}

namespace {

void add_dc_core(OptimizationProblem& p, const NetworkCase& c, const DcNetwork& dc,
                 const std::vector<int>& on, const Vec& pd_mw, const std::string& suffix) {
  const int nb = static_cast<int>(c.buses.size());
  const double base = c.base_mva;

  Vec va_lb = constant(nb, -kInf), va_ub = constant(nb, kInf), va0(nb);
  const int ref = ref_bus_index(c);
  va_lb[ref] = va_ub[ref] = 0.0;
  for (int i = 0; i < nb; ++i) va0[i] = c.buses[i].va * kDegToRad;
  va0[ref] = 0.0;
  p.add_block("Va" + suffix, nb, va_lb, va_ub, va0);
  add_gen_blocks(p, c, on, /*with_q=*/false, suffix);

  const int va_off = p.offset_of("Va" + suffix);
  const int pg_off = p.offset_of("Pg" + suffix);
  const int ng = static_cast<int>(on.size());

  LinearConstraint bal;
  bal.name = "power_balance" + suffix;
  bal.kind = ConstraintKind::Equality;
  bal.tag = "bus active power balance (linearised)";
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < dc.bbus.outerSize(); ++k)
    for (SpMat::InnerIterator it(dc.bbus, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), va_off + static_cast<int>(it.col()),
                         it.value());
  SpMat cg = make_cg(c, on);
  for (int k = 0; k < cg.outerSize(); ++k)
    for (SpMat::InnerIterator it(cg, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), pg_off + static_cast<int>(it.col()),
                         -it.value());
  bal.A.resize(nb, p.num_vars());
  bal.A.setFromTriplets(trips.begin(), trips.end());
  bal.rhs.resize(nb);
  for (int i = 0; i < nb; ++i)
    bal.rhs[i] = -dc.pbusinj[i] - (pd_mw[i] + c.buses[i].gs) / base;
  p.add_linear_constraint(std::move(bal));

  std::vector<int> rated;
  for (std::size_t k = 0; k < dc.branch_rows.size(); ++k)
    if (dc.flow_limit[k] > 0) rated.push_back(static_cast<int>(k));
  if (!rated.empty()) {
    const int nr = static_cast<int>(rated.size());
    LinearConstraint lim;
    lim.name = "flow_limits" + suffix;
    lim.kind = ConstraintKind::Inequality;
    lim.tag = "branch flow limit (linearised)";
    std::vector<Eigen::Triplet<double>> lt;
    lim.rhs.resize(2 * nr);
    for (int i = 0; i < nr; ++i) {
      const int k = rated[i];
      for (int col = 0; col < dc.bf.outerSize(); ++col)
        for (SpMat::InnerIterator it(dc.bf, col); it; ++it)
          if (it.row() == k) {
            lt.emplace_back(i, va_off + col, it.value());
            lt.emplace_back(nr + i, va_off + col, -it.value());
          }
      lim.rhs[i] = dc.flow_limit[k] - dc.pfinj[k];
      lim.rhs[nr + i] = dc.flow_limit[k] + dc.pfinj[k];
    }
    lim.A.resize(2 * nr, p.num_vars());
    lim.A.setFromTriplets(lt.begin(), lt.end());
    p.add_linear_constraint(std::move(lim));
  }

  add_angle_limits(p, c, va_off, "angle_limits" + suffix);
  add_generation_cost(p, c, on, "Pg" + suffix, "gen_cost" + suffix);
  (void)ng;
}

}  // namespace

OptimizationProblem build_dcopf(const NetworkCase& c) {
  validate_case(c);
  const auto on = in_service_gens(c);
  require_costs(c, on);
  OptimizationProblem p;
  Vec pd(static_cast<int>(c.buses.size()));
  for (std::size_t i = 0; i < c.buses.size(); ++i) pd[i] = c.buses[i].pd;
  add_dc_core(p, c, make_dc_network(c), on, pd, "");
  return p;
}

OptimizationProblem build_ed(const NetworkCase& c) {
  validate_case(c);
  const auto on = in_service_gens(c);
  require_costs(c, on);
  OptimizationProblem p;
  add_gen_blocks(p, c, on, /*with_q=*/false);
  LinearConstraint bal;
  bal.name = "power_balance";
  bal.kind = ConstraintKind::Equality;
  bal.tag = "total generation equals total demand";
  bal.A.resize(1, p.num_vars());
  for (int k = 0; k < static_cast<int>(on.size()); ++k) bal.A.insert(0, k) = 1.0;
  bal.rhs = constant(1, c.total_pd() / c.base_mva);
  p.add_linear_constraint(std::move(bal));
  add_generation_cost(p, c, on, "Pg", "gen_cost");
  return p;
}

OptimizationProblem build_multiperiod_dc(const NetworkCase& c,
                                         const std::vector<std::vector<double>>& profile,
                                         int horizon) {
  validate_case(c);
  if (horizon < 1) throw InvariantError("horizon must be at least 1");
  if (static_cast<int>(profile.size()) != horizon)
    throw InvariantError("profile shape mismatch: expected one row per period");
  const int nb = static_cast<int>(c.buses.size());
  const auto on = in_service_gens(c);
  require_costs(c, on);
  const int ng = static_cast<int>(on.size());
  const double base = c.base_mva;

  OptimizationProblem p;
  DcNetwork dc = make_dc_network(c);
  for (int t = 0; t < horizon; ++t) {
    const auto& row = profile[t];
    if (row.size() != 1 && static_cast<int>(row.size()) != nb)
      throw InvariantError("profile shape mismatch at period " + std::to_string(t + 1));
    Vec pd(nb);
    for (int i = 0; i < nb; ++i)
      pd[i] = c.buses[i].pd * (row.size() == 1 ? row[0] : row[i]);
    add_dc_core(p, c, dc, on, pd, "_t" + std::to_string(t + 1));
  }

  if (horizon > 1) {
    std::vector<Eigen::Triplet<double>> trips;
    Vec rhs(2 * ng * (horizon - 1));
    int row = 0;
    for (int t = 1; t < horizon; ++t) {
      const int prev = p.offset_of("Pg_t" + std::to_string(t));
      const int cur = p.offset_of("Pg_t" + std::to_string(t + 1));
      for (int k = 0; k < ng; ++k) {
        trips.emplace_back(row, cur + k, 1.0);
        trips.emplace_back(row, prev + k, -1.0);
        rhs[row++] = c.ramp_up_of(on[k]) / base;
        trips.emplace_back(row, prev + k, 1.0);
        trips.emplace_back(row, cur + k, -1.0);
        rhs[row++] = c.ramp_down_of(on[k]) / base;
      }
    }
    LinearConstraint ramp;
    ramp.name = "ramping";
    ramp.kind = ConstraintKind::Inequality;
    ramp.tag = "inter-period generator ramp limit";
    ramp.A.resize(row, p.num_vars());
    ramp.A.setFromTriplets(trips.begin(), trips.end());
    ramp.rhs = rhs;
    p.add_linear_constraint(std::move(ramp));
  }
  return p;
}

OptimizationProblem build_ots_dc(const NetworkCase& c, const std::vector<int>& switchable,
                                 int switchable_cap) {
  validate_case(c);
  if (switchable.empty()) return build_dcopf(c);
  if (static_cast<int>(switchable.size()) > switchable_cap)
    throw InvariantError("switchable set exceeds the tractability cap of " +
                         std::to_string(switchable_cap));
  std::set<int> sw_set;
  for (int idx : switchable) {
    if (idx < 1 || idx > static_cast<int>(c.branches.size()))
      throw InvariantError("switchable index " + std::to_string(idx) + " out of range");
    const auto& br = c.branches[idx - 1];
    if (br.status != 1)
      throw InvariantError("switchable branch " + std::to_string(idx) + " is out of service");
    if (br.rate_a <= 0)
      throw InvariantError("switchable branch " + std::to_string(idx) +
                           " needs a thermal rating for the switching encoding");
    if (!sw_set.insert(idx).second)
      throw InvariantError("duplicate switchable index " + std::to_string(idx));
  }

  const auto on = in_service_gens(c);
  require_costs(c, on);
  const int nb = static_cast<int>(c.buses.size());
  const int ns = static_cast<int>(switchable.size());
  const double base = c.base_mva;

  OptimizationProblem p;
  DcNetwork fixed = make_dc_network(c, switchable);
  Vec pd(nb);
  for (int i = 0; i < nb; ++i) pd[i] = c.buses[i].pd;
  add_dc_core(p, c, fixed, on, pd, "");

  // switchable flows and binary statuses
  Vec flb(ns), fub(ns);
  std::vector<double> bsw(ns), msw(ns), pinj(ns);
  for (int k = 0; k < ns; ++k) {
    const auto& br = c.branches[switchable[k] - 1];
    const double b = 1.0 / (br.x * (br.tap == 0 ? 1.0 : br.tap));
    bsw[k] = b;
    pinj[k] = -b * br.shift * kDegToRad;
    const double lim = br.rate_a / base;
    flb[k] = -lim;
    fub[k] = lim;
    double span = (std::min(br.angmax, 360.0) - std::max(br.angmin, -360.0)) * kDegToRad;
    if (span <= 0) span = 4 * M_PI;
    msw[k] = std::abs(b) * span;
  }
  p.add_block("Pflow", ns, flb, fub, Vec::Zero(ns));
  p.add_block("z", ns, Vec::Zero(ns), Vec::Ones(ns), Vec::Ones(ns), /*integral=*/true);
  const int va_off = p.offset_of("Va");
  const int pf_off = p.offset_of("Pflow");
  const int z_off = p.offset_of("z");

  // splice switchable flows into the balance rows
  {
    LinearConstraint* bal = nullptr;
    // rebuild: remove and re-add with the flow columns
    SpMat a;
    Vec rhs;
    for (const auto& con : p.linear_constraints())
      if (con.name == "power_balance") {
        a = con.A;
        rhs = con.rhs;
      }
    p.remove_constraint("power_balance");
    a.conservativeResize(nb, p.num_vars());
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < a.outerSize(); ++k)
      for (SpMat::InnerIterator it(a, k); it; ++it)
        trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int k = 0; k < ns; ++k) {
      const auto& br = c.branches[switchable[k] - 1];
      trips.emplace_back(c.bus_index(br.fbus), pf_off + k, 1.0);
      trips.emplace_back(c.bus_index(br.tbus), pf_off + k, -1.0);
    }
    LinearConstraint nb_bal;
    nb_bal.name = "power_balance";
    nb_bal.kind = ConstraintKind::Equality;
    nb_bal.tag = "bus active power balance (linearised, switchable flows explicit)";
    nb_bal.A.resize(nb, p.num_vars());
    nb_bal.A.setFromTriplets(trips.begin(), trips.end());
    nb_bal.rhs = rhs;
    p.add_linear_constraint(std::move(nb_bal));
    (void)bal;
  }

  // big-M coupling P = b (theta_f - theta_t - shift) when z = 1, and
  // |P| <= z * limit
  {
    std::vector<Eigen::Triplet<double>> trips;
    Vec rhs(4 * ns);
    int row = 0;
    for (int k = 0; k < ns; ++k) {
      const auto& br = c.branches[switchable[k] - 1];
      const int f = c.bus_index(br.fbus), t = c.bus_index(br.tbus);
      const double lim = br.rate_a / base;
      //  P - b(th_f - th_t) - pinj + M z <= M
      trips.emplace_back(row, pf_off + k, 1.0);
      trips.emplace_back(row, va_off + f, -bsw[k]);
      trips.emplace_back(row, va_off + t, bsw[k]);
      trips.emplace_back(row, z_off + k, msw[k]);
      rhs[row++] = msw[k] + pinj[k];
      // -(P - b(th_f - th_t) - pinj) + M z <= M
      trips.emplace_back(row, pf_off + k, -1.0);
      trips.emplace_back(row, va_off + f, bsw[k]);
      trips.emplace_back(row, va_off + t, -bsw[k]);
      trips.emplace_back(row, z_off + k, msw[k]);
      rhs[row++] = msw[k] - pinj[k];
      //  P <= lim z
      trips.emplace_back(row, pf_off + k, 1.0);
      trips.emplace_back(row, z_off + k, -lim);
      rhs[row++] = 0.0;
      // -P <= lim z
      trips.emplace_back(row, pf_off + k, -1.0);
      trips.emplace_back(row, z_off + k, -lim);
      rhs[row++] = 0.0;
    }
    LinearConstraint sw;
    sw.name = "switch_coupling";
    sw.kind = ConstraintKind::Inequality;
    sw.tag = "big-M switching flow relation";
    sw.A.resize(row, p.num_vars());
    sw.A.setFromTriplets(trips.begin(), trips.end());
    sw.rhs = rhs;
    p.add_linear_constraint(std::move(sw));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Extensions
// ---------------------------------------------------------------------------

namespace {

double param_of(const ObjectiveExt& ext, const std::string& key) {
  auto it = ext.params.find(key);
  if (it == ext.params.end())
    throw InvariantError("extension " + ext.name + " is missing parameter '" + key + "'");
  if (!std::isfinite(it->second))
    throw InvariantError("extension " + ext.name + ": parameter '" + key + "' must be finite");
  return it->second;
}

std::vector<std::string> blocks_with_prefix(const OptimizationProblem& p,
                                            const std::string& prefix) {
  std::vector<std::string> names;
  for (const auto& b : p.blocks())
    if (b.name.rfind(prefix, 0) == 0 &&
        (b.name.size() == prefix.size() || b.name[prefix.size()] == '_'))
      names.push_back(b.name);
  return names;
}

/// Signed in-service-branch incidence with bus-index columns.
SpMat incidence(const NetworkCase& c) {
  std::vector<Eigen::Triplet<double>> trips;
  int row = 0;
  for (const auto& br : c.branches) {
    if (br.status != 1) continue;
    trips.emplace_back(row, c.bus_index(br.fbus), 1.0);
    trips.emplace_back(row, c.bus_index(br.tbus), -1.0);
    ++row;
  }
  SpMat e(row, static_cast<int>(c.buses.size()));
  e.setFromTriplets(trips.begin(), trips.end());
  return e;
}

void apply_lop(OptimizationProblem& p, double lambda, const NetworkCase& c) {
  const double base = c.base_mva;
  // linearised problems: rebuild the flow rows with a per-branch slack
  bool applied = false;
  for (const auto& con : p.linear_constraints()) {
    if (con.name != "flow_limits") continue;
    SpMat a = con.A;
    Vec rhs = con.rhs;
    const int nr = static_cast<int>(rhs.size()) / 2;
    p.remove_constraint("flow_limits");
    p.add_block("FlowSlack", nr, Vec::Zero(nr), constant(nr, kInf), Vec::Zero(nr));
    const int s_off = p.offset_of("FlowSlack");
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < a.outerSize(); ++k)
      for (SpMat::InnerIterator it(a, k); it; ++it)
        trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int i = 0; i < nr; ++i) {
      trips.emplace_back(i, s_off + i, -1.0);
      trips.emplace_back(nr + i, s_off + i, -1.0);
    }
    LinearConstraint relaxed;
    relaxed.name = "flow_limits";
    relaxed.kind = ConstraintKind::Inequality;
    relaxed.tag = "branch flow limit relaxed by overload slack";
    relaxed.A.resize(2 * nr, p.num_vars());
    relaxed.A.setFromTriplets(trips.begin(), trips.end());
    relaxed.rhs = rhs;
    p.add_linear_constraint(std::move(relaxed));
    QuadraticTerm t;
    t.name = "overload_penalty";
    t.tag = "thermal overload economic penalty";
    t.c = Vec::Zero(p.num_vars());
    for (int i = 0; i < nr; ++i) t.c[s_off + i] = lambda * base;
    p.add_quadratic(std::move(t));
    applied = true;
    break;
  }
  if (applied) return;

  // AC problems: re-derive the flow constraints with a shared per-branch slack
  std::vector<int> rated_rows;
  AdmittanceMatrix y = build_admittance(c);
  for (std::size_t row = 0; row < y.branch_rows.size(); ++row)
    if (c.branches[y.branch_rows[row]].rate_a > 0) rated_rows.push_back(static_cast<int>(row));
  const int nr = static_cast<int>(rated_rows.size());
  bool has_ac_flows = false;
  for (const auto& con : p.nonlinear_constraints())
    if (con.name == "flow_from") has_ac_flows = true;
  if (!has_ac_flows || nr == 0) {
    log_warn("LOP extension: problem has no rated-branch flow constraints; nothing to relax");
    return;
  }
  p.remove_constraint("flow_from");
  p.remove_constraint("flow_to");
  p.add_block("FlowSlack", nr, Vec::Zero(nr), constant(nr, kInf), Vec::Zero(nr));
  const int s_off = p.offset_of("FlowSlack");
  const int nb = static_cast<int>(c.buses.size());

  auto ctx = std::make_shared<AcContext>();
  ctx->nb = nb;
  ctx->va_off = p.offset_of("Va");
  ctx->vm_off = p.offset_of("Vm");
  ctx->ybus = y.ybus;

  for (int side_id = 0; side_id < 2; ++side_id) {
    auto side = std::make_shared<AcFlowSide>();
    side->ybr.resize(nr, nb);
    side->cbr.resize(nr, nb);
    side->rate_pu.resize(nr);
    side->slack_off = s_off;
    std::vector<Eigen::Triplet<std::complex<double>>> ty, tc;
    const CMat& ymat = side_id == 0 ? y.yf : y.yt;
    for (int k = 0; k < nr; ++k) {
      const int row = rated_rows[k];
      const auto& br = c.branches[y.branch_rows[row]];
      for (int col = 0; col < ymat.outerSize(); ++col)
        for (CMat::InnerIterator it(ymat, col); it; ++it)
          if (it.row() == row) ty.emplace_back(k, col, it.value());
      tc.emplace_back(k, c.bus_index(side_id == 0 ? br.fbus : br.tbus), 1.0);
      side->rate_pu[k] = br.rate_a / c.base_mva;
    }
    side->ybr.setFromTriplets(ty.begin(), ty.end());
    side->cbr.setFromTriplets(tc.begin(), tc.end());
    add_ac_flow(p, ctx, side, side_id == 0 ? "flow_from" : "flow_to");
  }
  QuadraticTerm t;
  t.name = "overload_penalty";
  t.tag = "thermal overload economic penalty";
  t.c = Vec::Zero(p.num_vars());
  for (int i = 0; i < nr; ++i) t.c[s_off + i] = lambda * base;
  p.add_quadratic(std::move(t));
}

}  // namespace

OptimizationProblem add_objective_extension(OptimizationProblem p, const ObjectiveExt& ext,
                                            const NetworkCase& c) {
  const double base = c.base_mva;
  if (ext.name == "ADP") {
    const double beta = param_of(ext, "beta");
    auto va_blocks = blocks_with_prefix(p, "Va");
    va_blocks.erase(std::remove_if(va_blocks.begin(), va_blocks.end(),
                                   [](const std::string& n) {
                                     return n.rfind("Va_c", 0) == 0;  // contingency angles
                                   }),
                    va_blocks.end());
    if (va_blocks.empty()) throw InvariantError("extension ADP requires a Va block");
    SpMat e = incidence(c);
    SpMat ete = SpMat(e.transpose()) * e;
    QuadraticTerm t;
    t.name = "angle_spread_penalty";
    t.tag = "quadratic penalty on branch angle differences";
    t.Q.resize(p.num_vars(), p.num_vars());
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& name : va_blocks) {
      const int off = p.offset_of(name);
      for (int k = 0; k < ete.outerSize(); ++k)
        for (SpMat::InnerIterator it(ete, k); it; ++it)
          trips.emplace_back(off + static_cast<int>(it.row()),
                             off + static_cast<int>(it.col()), 2.0 * beta * it.value());
    }
    t.Q.setFromTriplets(trips.begin(), trips.end());
    p.add_quadratic(std::move(t));
    return p;
  }
  if (ext.name == "VDP") {
    const double beta = param_of(ext, "beta");
    const VariableBlock* vm = p.find_block("Vm");
    if (!vm) throw InvariantError("extension VDP requires a Vm block");
    QuadraticTerm t;
    t.name = "voltage_deviation_penalty";
    t.tag = "quadratic penalty on voltage deviations from 1 p.u.";
    t.Q.resize(p.num_vars(), p.num_vars());
    t.c = Vec::Zero(p.num_vars());
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < vm->size; ++i) {
      trips.emplace_back(vm->offset + i, vm->offset + i, 2.0 * beta);
      t.c[vm->offset + i] = -2.0 * beta;
    }
    t.Q.setFromTriplets(trips.begin(), trips.end());
    t.k = beta * vm->size;
    p.add_quadratic(std::move(t));
    return p;
  }
  if (ext.name == "LOP") {
    if (p.find_block("Pflow"))
      throw InvariantError("LOP is not defined for switch-coupled flow limits");
    apply_lop(p, param_of(ext, "lambda"), c);
    return p;
  }
  if (ext.name == "EEC") {
    const double alpha = param_of(ext, "alpha");
    const double beta = param_of(ext, "beta");
    const double gamma = param_of(ext, "gamma");
    const double zeta = param_of(ext, "zeta");
    const double lam = param_of(ext, "lambda");
    auto pg_blocks = blocks_with_prefix(p, "Pg");
    if (pg_blocks.empty()) throw InvariantError("extension EEC requires a Pg block");
    std::vector<std::pair<int, int>> spans;
    for (const auto& name : pg_blocks) {
      const VariableBlock* b = p.find_block(name);
      spans.emplace_back(b->offset, b->size);
    }
    const int nx = p.num_vars();
    NonlinearTerm t;
    t.name = "emission_cost";
    t.tag = "quadratic-plus-exponential emission cost";
    t.value = [spans, alpha, beta, gamma, zeta, lam, base](const Vec& x) {
      double f = 0;
      for (auto [off, n] : spans)
        for (int k = 0; k < n; ++k) {
          const double pg = x[off + k] * base;
          f += alpha * pg * pg + beta * pg + gamma + zeta * std::exp(lam * pg);
        }
      return f;
    };
    t.gradient = [spans, alpha, beta, zeta, lam, base, nx](const Vec& x) {
      Vec g = Vec::Zero(nx);
      for (auto [off, n] : spans)
        for (int k = 0; k < n; ++k) {
          const double pg = x[off + k] * base;
          g[off + k] = (2 * alpha * pg + beta + zeta * lam * std::exp(lam * pg)) * base;
        }
      return g;
    };
    t.hessian = [spans, alpha, zeta, lam, base, nx](const Vec& x) {
      std::vector<Eigen::Triplet<double>> trips;
      for (auto [off, n] : spans)
        for (int k = 0; k < n; ++k) {
          const double pg = x[off + k] * base;
          trips.emplace_back(off + k, off + k,
                             (2 * alpha + zeta * lam * lam * std::exp(lam * pg)) * base * base);
        }
      SpMat h(nx, nx);
      h.setFromTriplets(trips.begin(), trips.end());
      return h;
    };
    p.add_nonlinear(std::move(t));
    return p;
  }
  if (ext.name == "PLC") {
    auto pg_blocks = blocks_with_prefix(p, "Pg");
    if (pg_blocks.empty()) throw InvariantError("extension PLC requires a Pg block");
    QuadraticTerm t;
    t.name = "loss_cost";
    t.tag = "total active power losses";
    t.c = Vec::Zero(p.num_vars());
    for (const auto& name : pg_blocks) {
      const VariableBlock* b = p.find_block(name);
      for (int k = 0; k < b->size; ++k) t.c[b->offset + k] = base;
      t.k -= c.total_pd();
    }
    p.add_quadratic(std::move(t));
    return p;
  }
  if (ext.name == "RRI") {
    const double w = param_of(ext, "w");
    const VariableBlock* qg = p.find_block("Qg");
    if (!qg) throw InvariantError("extension RRI requires a Qg block");
    QuadraticTerm t;
    t.name = "reactive_reserve_margin";
    t.tag = "negative reactive reserve margin";
    t.c = Vec::Zero(p.num_vars());
    const auto on = in_service_gens(c);
    for (int k = 0; k < qg->size; ++k) {
      t.c[qg->offset + k] = w * base;
      t.k -= w * c.gens[on[k]].qmax;
    }
    p.add_quadratic(std::move(t));
    return p;
  }
  throw InvariantError("unknown objective extension " + ext.name);
}

OptimizationProblem add_constraint_extension(OptimizationProblem p, const ConstraintExt& ext,
                                             const NetworkCase& c) {
  const double base = c.base_mva;
  if (ext.name == "N1_SECURITY_DC") {
    // preventive dispatch on a linearised network only
    if (!p.nonlinear_constraints().empty() || p.find_block("Pflow") || !p.find_block("Va") ||
        p.find_block("Vm"))
      throw InvariantError("N-1 security requires a plain DC problem");
    const int nb = static_cast<int>(c.buses.size());
    const auto on = in_service_gens(c);
    const int pg_off = p.offset_of("Pg");
    for (int k : ext.contingencies) {
      if (k < 1 || k > static_cast<int>(c.branches.size()) || c.branches[k - 1].status != 1)
        throw InvariantError("contingency index " + std::to_string(k) +
                             " does not reference an in-service branch");
      if (branch_is_bridge(c, k)) {
        log_warn("skipping contingency " + std::to_string(k) +
                 ": outage would disconnect the network");
        continue;
      }
      const std::string tag = "_c" + std::to_string(k);
      DcNetwork dck = make_dc_network(c, {k});
      Vec va_lb = constant(nb, -kInf), va_ub = constant(nb, kInf);
      const int ref = ref_bus_index(c);
      va_lb[ref] = va_ub[ref] = 0.0;
      Vec va0(nb);
      for (int i = 0; i < nb; ++i) va0[i] = c.buses[i].va * kDegToRad;
      va0[ref] = 0.0;
      p.add_block("Va" + tag, nb, va_lb, va_ub, va0);
      const int va_off = p.offset_of("Va" + tag);

      LinearConstraint bal;
      bal.name = "n1_balance" + tag;
      bal.kind = ConstraintKind::Equality;
      bal.tag = "post-contingency power balance";
      std::vector<Eigen::Triplet<double>> trips;
      for (int col = 0; col < dck.bbus.outerSize(); ++col)
        for (SpMat::InnerIterator it(dck.bbus, col); it; ++it)
          trips.emplace_back(static_cast<int>(it.row()), va_off + static_cast<int>(it.col()),
                             it.value());
      SpMat cg = make_cg(c, on);
      for (int col = 0; col < cg.outerSize(); ++col)
        for (SpMat::InnerIterator it(cg, col); it; ++it)
          trips.emplace_back(static_cast<int>(it.row()), pg_off + static_cast<int>(it.col()),
                             -it.value());
      bal.A.resize(nb, p.num_vars());
      bal.A.setFromTriplets(trips.begin(), trips.end());
      bal.rhs.resize(nb);
      for (int i = 0; i < nb; ++i)
        bal.rhs[i] = -dck.pbusinj[i] - (c.buses[i].pd + c.buses[i].gs) / base;
      p.add_linear_constraint(std::move(bal));

      std::vector<int> rated;
      for (std::size_t r = 0; r < dck.branch_rows.size(); ++r)
        if (dck.flow_limit[r] > 0) rated.push_back(static_cast<int>(r));
      if (!rated.empty()) {
        const int nr = static_cast<int>(rated.size());
        LinearConstraint lim;
        lim.name = "n1_flow" + tag;
        lim.kind = ConstraintKind::Inequality;
        lim.tag = "post-contingency flow limit";
        std::vector<Eigen::Triplet<double>> lt;
        lim.rhs.resize(2 * nr);
        for (int i = 0; i < nr; ++i) {
          const int r = rated[i];
          for (int col = 0; col < dck.bf.outerSize(); ++col)
            for (SpMat::InnerIterator it(dck.bf, col); it; ++it)
              if (it.row() == r) {
                lt.emplace_back(i, va_off + col, it.value());
                lt.emplace_back(nr + i, va_off + col, -it.value());
              }
          lim.rhs[i] = dck.flow_limit[r] - dck.pfinj[r];
          lim.rhs[nr + i] = dck.flow_limit[r] + dck.pfinj[r];
        }
        lim.A.resize(2 * nr, p.num_vars());
        lim.A.setFromTriplets(lt.begin(), lt.end());
        p.add_linear_constraint(std::move(lim));
      }
    }
    return p;
  }
  if (ext.name == "RESERVE_LIMIT") {
    const auto on = in_service_gens(c);
    const int ng = static_cast<int>(on.size());
    auto broadcast = [&](const std::vector<double>& v, const char* what) {
      if (v.empty()) throw InvariantError(std::string("RESERVE_LIMIT missing ") + what);
      std::vector<double> out = v;
      if (out.size() == 1) out.assign(ng, out[0]);
      if (static_cast<int>(out.size()) != ng)
        throw InvariantError(std::string("RESERVE_LIMIT ") + what +
                             " must be scalar or one per in-service generator");
      for (double x : out)
        if (x < 0) throw InvariantError("reserve ranges must be nonnegative");
      return out;
    };
    auto up = broadcast(ext.reserve_up, "up range");
    auto down = broadcast(ext.reserve_down, "down range");
    auto pg_blocks = blocks_with_prefix(p, "Pg");
    if (pg_blocks.empty()) throw InvariantError("RESERVE_LIMIT requires a Pg block");
    for (const auto& name : pg_blocks) {
      VariableBlock* b = p.find_block_mutable(name);
      if (b->size != ng) throw InvariantError("RESERVE_LIMIT: generator count mismatch");
      for (int k = 0; k < ng; ++k) {
        const GenRecord& g = c.gens[on[k]];
        // schedule projected into the admissible box so the window is never empty
        const double pg0 = std::clamp(g.pg, g.pmin, g.pmax);
        b->lb[k] = std::max(b->lb[k], (pg0 - down[k]) / base);
        b->ub[k] = std::min(b->ub[k], (pg0 + up[k]) / base);
        b->x0[k] = std::clamp(b->x0[k], b->lb[k], b->ub[k]);
      }
    }
    return p;
  }
  throw InvariantError("unknown constraint extension " + ext.name);
}

OptimizationProblem build_problem(const NetworkCase& c, const StructuralMod& s,
                                  const ResolutionSpec& r) {
  (void)r;  // solver options derive from it at solve time
  OptimizationProblem p;
  const ProblemParams& pp = s.problem_params;
  switch (s.problem) {
    case ProblemType::ACOPF: p = build_acopf(c); break;
    case ProblemType::DCOPF: p = build_dcopf(c); break;
    case ProblemType::ED: p = build_ed(c); break;
    case ProblemType::LOAD_SHED: {
      if (pp.shed_weight <= 0)
        throw InvariantError("LOAD_SHED requires a positive shed_weight in problem_params");
      p = build_load_shedding(c, {pp.shed_weight});
      break;
    }
    case ProblemType::MULTIPERIOD_DC: {
      if (pp.horizon < 1 || pp.profile.empty())
        throw InvariantError("MULTIPERIOD_DC requires horizon and profile in problem_params");
      p = build_multiperiod_dc(c, pp.profile, pp.horizon);
      break;
    }
    case ProblemType::OTS_DC: p = build_ots_dc(c, pp.switchable); break;
  }
  for (const auto& ext : s.objective_mods) p = add_objective_extension(std::move(p), ext, c);
  for (const auto& ext : s.constraint_mods) p = add_constraint_extension(std::move(p), ext, c);
  return p;
}

SolvedCase extract_solution(const OptimizationProblem& p, const Vec& x, const NetworkCase& c,
                            const ResolutionSpec& r) {
  if (x.size() != p.num_vars())
    throw InvariantError("primal vector length " + std::to_string(x.size()) +
                         " does not match problem size " + std::to_string(p.num_vars()));
  SolvedCase out;
  out.case_data = c;

  const VariableBlock* va = p.find_block("Va");
  if (!va) va = p.find_block("Va_t1");
  const VariableBlock* vm = p.find_block("Vm");
  const VariableBlock* pg = p.find_block("Pg");
  if (!pg) pg = p.find_block("Pg_t1");
  const VariableBlock* qg = p.find_block("Qg");

  if (va)
    for (int i = 0; i < va->size; ++i)
      out.case_data.buses[i].va = x[va->offset + i] / kDegToRad;
  if (vm) {
    for (int i = 0; i < vm->size; ++i) out.case_data.buses[i].vm = x[vm->offset + i];
  } else if (va) {
    for (auto& b : out.case_data.buses) b.vm = 1.0;  // linearised convention
  }
  const auto on = in_service_gens(c);
  if (pg)
    for (std::size_t k = 0; k < on.size(); ++k)
      out.case_data.gens[on[k]].pg = x[pg->offset + k] * c.base_mva;
  if (qg) {
    for (std::size_t k = 0; k < on.size(); ++k)
      out.case_data.gens[on[k]].qg = x[qg->offset + k] * c.base_mva;
  } else if (pg) {
    for (std::size_t k = 0; k < on.size(); ++k) out.case_data.gens[on[k]].qg = 0.0;
  }

  out.f = p.objective_value(x);
  out.violation = p.max_violation(x);
  out.success = out.violation <= r.opf_violation;
  return out;
}

}  // namespace opfkit
