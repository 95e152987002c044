#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spinloc/placement.hpp"

namespace spinloc {

struct RefineConfig {
  int max_iterations = 500;
  double gradient_tolerance = 1e-9;  // Hz^2 / A on the frozen-sign cost
  double step_tolerance = 1e-6;      // A
  /// Weight residuals by 1/sigma. Off by default so the objective is the
  /// plain sum of squared frequency mismatches.
  bool weighted = false;
  double min_detectable = 3.0;
  std::string anchor_label = "Si1";
  ConstantsTable constants;
};

struct Displacement {
  std::string label;
  Vec3 delta = Vec3::Zero();
  double norm = 0.0;
};

struct DisplacementReport {
  std::vector<Displacement> rows;
  double mean = 0.0;
  double max = 0.0;
  std::string max_label;
};

struct RefinementResult {
  std::map<std::string, Vec3> positions;
  double residual = 0.0;
  double initial_residual = 0.0;
  DisplacementReport displacements;
  int iterations = 0;
  std::string stop_reason;
  std::vector<double> residual_trace;
  /// Gauge: the anchor is frozen and `gauge_label` keeps its azimuth about
  /// the anchor's c axis.
  std::string gauge_label;
  int parameters = 0;
  int measurements = 0;
  int rank = 0;
  double hessian_condition = 0.0;
  bool underdetermined = false;
  /// Coupling signs at the optimum agree with the ones frozen at the start.
  bool signs_consistent = true;
};

/// Levenberg-Marquardt on r_k = f_k - s_k C_k / 2 with s_k frozen from the
/// lattice solution. Throws Convergence when the iteration cap is reached.
RefinementResult refine(const PlacementSolution& initial, const std::vector<CouplingMeasurement>& measurements,
                        const RefineConfig& config = {});

struct ResidualGradient {
  double residual = 0.0;
  /// d residual / d coordinate, laid out (x0, y0, z0, x1, ...) in the order
  /// of the input labels.
  Eigen::VectorXd gradient;
};

/// eps = sum_k (f_k - |C_k| / 2)^2 over detectable measurements between the
/// given labels, with its analytic gradient.
ResidualGradient residual_and_gradient(const std::vector<std::string>& labels, const std::vector<Vec3>& positions,
                                       const std::vector<CouplingMeasurement>& measurements,
                                       const ConstantsTable& constants = {}, double min_detectable = 3.0);

DisplacementReport displacement_report(const std::map<std::string, Vec3>& initial,
                                       const std::map<std::string, Vec3>& refined);

}  // namespace spinloc
