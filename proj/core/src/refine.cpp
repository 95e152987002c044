#include "spinloc/refine.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "spinloc/error.hpp"
#include "spinloc/least_squares.hpp"
#include "spinloc/spinphys.hpp"

namespace spinloc {

namespace {

struct Term {
  std::size_t i = 0;
  std::size_t j = 0;
  double f = 0.0;
  double alpha = 0.0;
  double weight = 1.0;
};

std::vector<Term> collect_terms(const std::vector<std::string>& labels,
                                const std::vector<CouplingMeasurement>& measurements, const ConstantsTable& constants,
                                double min_detectable, bool weighted) {
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < labels.size(); ++k) index[labels[k]] = k;
  std::vector<Term> terms;
  for (const auto& m : measurements) {
    if (m.f_hz < min_detectable) continue;
    auto a = index.find(m.spin_a);
    auto b = index.find(m.spin_b);
    if (a == index.end() || b == index.end()) continue;
    terms.push_back({a->second, b->second, m.f_hz,
                     dipolar_prefactor(spin_species_of_label(m.spin_a, constants),
                                       spin_species_of_label(m.spin_b, constants)),
                     weighted ? 1.0 / m.sigma_hz : 1.0});
  }
  return terms;
}

// C and dC/d(delta) for delta = p_j - p_i.
double coupling_and_gradient(const Vec3& d, double alpha, Vec3* grad) {
  const double r2 = d.squaredNorm();
  require(r2 > 1e-18, ErrorKind::Domain, "coincident spin positions");
  const double r = std::sqrt(r2);
  const double r3 = r2 * r;
  const double r5 = r3 * r2;
  const double r7 = r5 * r2;
  const double z2 = d.z() * d.z();
  if (grad) {
    const double lateral = alpha * (3.0 / r5 - 15.0 * z2 / r7);
    (*grad) << lateral * d.x(), lateral * d.y(), alpha * (9.0 * d.z() / r5 - 15.0 * z2 * d.z() / r7);
  }
  return alpha * (3.0 * z2 / r5 - 1.0 / r3);
}

}  // namespace

ResidualGradient residual_and_gradient(const std::vector<std::string>& labels, const std::vector<Vec3>& positions,
                                       const std::vector<CouplingMeasurement>& measurements,
                                       const ConstantsTable& constants, double min_detectable) {
  require(labels.size() == positions.size(), ErrorKind::InvalidArgument, "labels and positions differ in length");
  ResidualGradient out;
  out.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * positions.size()));
  for (const Term& t : collect_terms(labels, measurements, constants, min_detectable, false)) {
    Vec3 dc;
    const double c = coupling_and_gradient(positions[t.j] - positions[t.i], t.alpha, &dc);
    const double s = c < 0.0 ? -1.0 : 1.0;
    const double res = t.f - 0.5 * std::abs(c);
    out.residual += res * res;
    // d(res^2)/d delta = -res * s * dC/d delta.
    const Vec3 g = -res * s * dc;
    out.gradient.segment<3>(static_cast<Eigen::Index>(3 * t.j)) += g;
    out.gradient.segment<3>(static_cast<Eigen::Index>(3 * t.i)) -= g;
  }
  return out;
}

DisplacementReport displacement_report(const std::map<std::string, Vec3>& initial,
                                       const std::map<std::string, Vec3>& refined) {
  require(initial.size() == refined.size(), ErrorKind::InvalidArgument, "displacement report: label sets differ");
  DisplacementReport out;
  for (const auto& [label, p0] : initial) {
    auto it = refined.find(label);
    require(it != refined.end(), ErrorKind::InvalidArgument,
            fmt::format("displacement report: '{}' missing from the refined set", label));
    Displacement row{label, it->second - p0, 0.0};
    row.norm = row.delta.norm();
    out.mean += row.norm;
    if (row.norm > out.max || out.max_label.empty()) {
      out.max = row.norm;
      out.max_label = label;
    }
    out.rows.push_back(row);
  }
  if (!out.rows.empty()) out.mean /= static_cast<double>(out.rows.size());
  return out;
}

RefinementResult refine(const PlacementSolution& initial, const std::vector<CouplingMeasurement>& measurements,
                        const RefineConfig& config) {
  const Assignment& a = initial.assignment;
  require(a.contains(config.anchor_label), ErrorKind::InvalidArgument,
          fmt::format("refinement needs the anchor '{}' in the solution", config.anchor_label));

  // Free spins in order of the assignment; the anchor stays put.
  std::vector<std::string> labels{config.anchor_label};
  std::vector<Vec3> start{a.at(config.anchor_label).position};
  for (const auto& [label, site] : a) {
    if (label == config.anchor_label) continue;
    labels.push_back(label);
    start.push_back(site.position);
  }
  const std::vector<Term> terms =
      collect_terms(labels, measurements, config.constants, config.min_detectable, config.weighted);
  const Vec3 anchor = start[0];

  // Gauge spin: the first free spin off the anchor's c axis keeps its azimuth.
  std::size_t gauge = 0;
  Vec3 u = Vec3::UnitX();
  for (std::size_t k = 1; k < start.size(); ++k) {
    const Vec3 off(start[k].x() - anchor.x(), start[k].y() - anchor.y(), 0.0);
    if (off.norm() > 0.1) {
      gauge = k;
      u = off.normalized();
      break;
    }
  }

  // Parameter layout: gauge spin (radial, z), other free spins (x, y, z).
  std::vector<int> offset(labels.size(), -1);
  int n_params = 0;
  for (std::size_t k = 1; k < labels.size(); ++k) {
    offset[k] = n_params;
    n_params += k == gauge ? 2 : 3;
  }
  Eigen::VectorXd x0(n_params);
  for (std::size_t k = 1; k < labels.size(); ++k) {
    if (k == gauge) {
      x0(offset[k]) = (start[k] - anchor).dot(u);
      x0(offset[k] + 1) = start[k].z();
    } else {
      x0.segment<3>(offset[k]) = start[k];
    }
  }
  auto unpack = [&](const Eigen::VectorXd& x) {
    std::vector<Vec3> p(labels.size());
    p[0] = anchor;
    for (std::size_t k = 1; k < labels.size(); ++k) {
      if (k == gauge) {
        p[k] = anchor + x(offset[k]) * u;
        p[k].z() = x(offset[k] + 1);
      } else {
        p[k] = x.segment<3>(offset[k]);
      }
    }
    return p;
  };

  std::vector<double> sign(terms.size(), 1.0);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double c = coupling_and_gradient(start[terms[t].j] - start[terms[t].i], terms[t].alpha, nullptr);
    sign[t] = c < 0.0 ? -1.0 : 1.0;
  }

  auto add_jacobian = [&](Eigen::MatrixXd& jac, Eigen::Index row, std::size_t k, const Vec3& g) {
    if (k == 0) return;
    if (k == gauge) {
      jac(row, offset[k]) += g.dot(u);
      jac(row, offset[k] + 1) += g.z();
    } else {
      jac.block<1, 3>(row, offset[k]) += g.transpose();
    }
  };

  const ResidualFunction fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const std::vector<Vec3> p = unpack(x);
    r.resize(static_cast<Eigen::Index>(terms.size()));
    if (jac) jac->setZero(static_cast<Eigen::Index>(terms.size()), x.size());
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const Term& term = terms[t];
      Vec3 dc;
      const Vec3 d = p[term.j] - p[term.i];
      if (d.squaredNorm() < 1e-12) {
        r.setConstant(std::numeric_limits<double>::infinity());
        return;
      }
      const double c = coupling_and_gradient(d, term.alpha, jac ? &dc : nullptr);
      const auto row = static_cast<Eigen::Index>(t);
      r(row) = term.weight * (term.f - 0.5 * sign[t] * c);
      if (jac) {
        const Vec3 g = -0.5 * term.weight * sign[t] * dc;
        add_jacobian(*jac, row, term.j, g);
        add_jacobian(*jac, row, term.i, -g);
      }
    }
  };

  LevenbergMarquardtOptions opts;
  opts.max_iterations = config.max_iterations;
  opts.gradient_tolerance = config.gradient_tolerance;
  opts.step_tolerance = config.step_tolerance;
  const LevenbergMarquardtResult lm = levenberg_marquardt(fn, x0, opts);
  if (!lm.converged) {
    fail(ErrorKind::Convergence,
         fmt::format("refinement did not converge in {} iterations (cost {:.6g} Hz^2, started at {:.6g})",
                     lm.iterations, lm.cost, lm.cost_trace.front()));
  }

  RefinementResult out;
  const std::vector<Vec3> p = unpack(lm.x);
  for (std::size_t k = 0; k < labels.size(); ++k) out.positions[labels[k]] = p[k];
  out.gauge_label = gauge ? labels[gauge] : std::string();
  out.iterations = lm.iterations;
  out.stop_reason = lm.reason;
  out.residual_trace = lm.cost_trace;
  out.parameters = n_params;
  out.measurements = static_cast<int>(terms.size());

  const ResidualGradient before = residual_and_gradient(labels, start, measurements, config.constants, config.min_detectable);
  const ResidualGradient after = residual_and_gradient(labels, p, measurements, config.constants, config.min_detectable);
  out.initial_residual = before.residual;
  out.residual = after.residual;
  if (!config.weighted) {
    require(out.residual <= out.initial_residual * (1.0 + 1e-12) + 1e-18, ErrorKind::Internal,
            "refinement increased the residual");
  }
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double c = coupling_and_gradient(p[terms[t].j] - p[terms[t].i], terms[t].alpha, nullptr);
    if ((c < 0.0 ? -1.0 : 1.0) != sign[t]) out.signs_consistent = false;
  }

  if (n_params > 0) {
    const Eigen::MatrixXd jtj = lm.jacobian.transpose() * lm.jacobian;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jtj);
    const Eigen::VectorXd ev = eig.eigenvalues();
    const double top = ev.maxCoeff();
    out.rank = static_cast<int>((ev.array() > 1e-10 * std::max(top, 1e-300)).count());
    out.hessian_condition = ev.minCoeff() > 1e-10 * top ? top / ev.minCoeff() : std::numeric_limits<double>::infinity();
  }
  out.underdetermined = out.rank < n_params;

  std::map<std::string, Vec3> initial_positions;
  for (std::size_t k = 0; k < labels.size(); ++k) initial_positions[labels[k]] = start[k];
  out.displacements = displacement_report(initial_positions, out.positions);
  return out;
}

}  // namespace spinloc
