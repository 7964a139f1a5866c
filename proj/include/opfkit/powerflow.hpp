#pragma once

#include <Eigen/Dense>

#include "opfkit/case.hpp"

namespace opfkit {

struct PowerFlowResult {
  bool converged = false;
  int iterations = 0;
  Eigen::VectorXd vm, va;  // va in radians
  double max_mismatch = 0;  // p.u.
};

/// Newton-Raphson power flow at the case's stored dispatch. Used as an
/// independent feasibility check next to the optimization path. Throws on
/// divergence when `throw_on_divergence` is set.
PowerFlowResult newton_power_flow(const NetworkCase& c, int max_iter = 30, double tol = 1e-8,
                                  bool throw_on_divergence = true);

/// DC angles for a fixed injection vector (p.u., net of demand); excluded
/// lists 1-based branch indices removed from the network. Reference angle 0.
Eigen::VectorXd dc_angles(const NetworkCase& c, const Eigen::VectorXd& injection_pu,
                          const std::vector<int>& excluded = {});

}  // namespace opfkit
