#pragma once

#include <Eigen/Dense>

#include <functional>

namespace dualmix {

/// Axis-aligned feasible region; trial points are projected onto it.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::VectorXd project(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
  }
};

struct OptimizeOptions {
  int max_evaluations = 200;
  double x_tolerance = 1e-10;   // simplex diameter / step length
  double f_tolerance = 1e-14;   // relative spread of objective values
  double initial_step = 0.25;
};

struct OptimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
/// Returns the value and writes the gradient into `grad`.
using GradientObjective =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd& grad)>;

/// Derivative-free simplex maximizer. The starting point is a simplex vertex,
/// so the returned value never falls below f(x0).
OptimizeResult maximize_nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                                    const Box& box, const OptimizeOptions& options = {});

/// Projected BFGS with Armijo backtracking; also never returns below f(x0).
OptimizeResult maximize_bfgs(const GradientObjective& f, const Eigen::VectorXd& x0,
                             const Box& box, const OptimizeOptions& options = {});

}  // namespace dualmix
