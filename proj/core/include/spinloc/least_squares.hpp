#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace spinloc {

/// Fills the residual vector and, when `jacobian` is non-null, its Jacobian.
using ResidualFunction =
    std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& residual, Eigen::MatrixXd* jacobian)>;

struct LevenbergMarquardtOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-10;  // on max |J^T r|
  double step_tolerance = 1e-9;       // on |dx|
  double relative_cost_tolerance = 1e-15;
  double initial_lambda = 1e-3;
};

struct LevenbergMarquardtResult {
  Eigen::VectorXd x;
  double cost = 0.0;  // sum of squared residuals
  int iterations = 0;
  bool converged = false;
  std::string reason;
  std::vector<double> cost_trace;  // accepted iterates only, starting with x0
  Eigen::MatrixXd jacobian;
};

/// Damped Gauss-Newton with Marquardt diagonal scaling. Steps are accepted
/// only if they lower the cost, so cost_trace is non-increasing.
LevenbergMarquardtResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                             const LevenbergMarquardtOptions& options = {});

}  // namespace spinloc
