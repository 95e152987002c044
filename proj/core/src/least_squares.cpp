#include "spinloc/least_squares.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "spinloc/error.hpp"

namespace spinloc {

LevenbergMarquardtResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                             const LevenbergMarquardtOptions& options) {
  LevenbergMarquardtResult out;
  out.x = x0;
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  f(out.x, r, &j);
  require(r.allFinite() && j.allFinite(), ErrorKind::Domain, "non-finite residual at the starting point");
  out.cost = r.squaredNorm();
  out.cost_trace.push_back(out.cost);
  double lambda = options.initial_lambda;

  Eigen::VectorXd r_trial;
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    const Eigen::VectorXd g = j.transpose() * r;
    if (g.size() == 0 || g.cwiseAbs().maxCoeff() < options.gradient_tolerance) {
      out.converged = true;
      out.reason = "gradient";
      break;
    }
    const Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::VectorXd scale = jtj.diagonal().cwiseMax(1e-12 * std::max(1.0, jtj.diagonal().maxCoeff()));

    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * scale;
      const Eigen::VectorXd dx = a.ldlt().solve(-g);
      if (!dx.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd x_trial = out.x + dx;
      f(x_trial, r_trial, nullptr);
      const double cost_trial = r_trial.allFinite() ? r_trial.squaredNorm() : std::numeric_limits<double>::infinity();
      if (cost_trial < out.cost) {
        const double drop = out.cost - cost_trial;
        out.x = x_trial;
        out.cost = cost_trial;
        out.cost_trace.push_back(out.cost);
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        f(out.x, r, &j);
        if (dx.norm() < options.step_tolerance) {
          out.converged = true;
          out.reason = "step";
        } else if (drop <= options.relative_cost_tolerance * std::max(out.cost, 1e-300)) {
          out.converged = true;
          out.reason = "cost";
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent direction left at working precision.
      out.converged = true;
      out.reason = "stalled";
      break;
    }
    if (out.converged) {
      ++out.iterations;
      break;
    }
  }
  out.jacobian = j;
  return out;
}

}  // namespace spinloc
