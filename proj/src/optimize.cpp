#include "dualmix/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace dualmix {

namespace {

// Non-finite objective values rank below every finite one.
double sanitize(double v) {
  return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
}

}  // namespace

OptimizeResult maximize_nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                                    const Box& box, const OptimizeOptions& options) {
  const Eigen::Index dim = x0.size();
  int evaluations = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evaluations;
    return sanitize(f(x));
  };

  std::vector<Eigen::VectorXd> simplex;
  std::vector<double> values;
  simplex.push_back(box.project(x0));
  values.push_back(eval(simplex[0]));
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::VectorXd v = simplex[0];
    v[i] += options.initial_step;
    v = box.project(v);
    if (v[i] == simplex[0][i]) {
      v[i] -= options.initial_step;
      v = box.project(v);
    }
    simplex.push_back(v);
    values.push_back(eval(v));
  }

  std::vector<std::size_t> order(simplex.size());
  bool converged = false;
  while (evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    {
      std::vector<Eigen::VectorXd> s;
      std::vector<double> v;
      for (auto i : order) {
        s.push_back(simplex[i]);
        v.push_back(values[i]);
      }
      simplex.swap(s);
      values.swap(v);
    }

    double diameter = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      diameter = std::max(diameter, (simplex[i] - simplex[0]).lpNorm<Eigen::Infinity>());
    }
    const double spread = values.front() - values.back();
    if (diameter < options.x_tolerance ||
        (std::isfinite(spread) &&
         spread <= options.f_tolerance * std::abs(values.front()) &&
         diameter < std::sqrt(options.x_tolerance))) {
      converged = true;
      break;
    }

    const std::size_t worst = simplex.size() - 1;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < worst; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(worst);

    const Eigen::VectorXd reflected = box.project(centroid + (centroid - simplex[worst]));
    const double f_reflected = eval(reflected);
    if (f_reflected > values[0]) {
      const Eigen::VectorXd expanded =
          box.project(centroid + 2.0 * (centroid - simplex[worst]));
      const double f_expanded = eval(expanded);
      if (f_expanded > f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected > values[worst - 1]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected > values[worst];
    const Eigen::VectorXd contracted =
        outside ? box.project(centroid + 0.5 * (reflected - centroid))
                : box.project(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted > std::max(f_reflected, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best = std::max_element(values.begin(), values.end()) - values.begin();
  return {simplex[best], values[best], evaluations, converged};
}

OptimizeResult maximize_bfgs(const GradientObjective& f, const Eigen::VectorXd& x0,
                             const Box& box, const OptimizeOptions& options) {
  const Eigen::Index dim = x0.size();
  int evaluations = 0;
  Eigen::VectorXd x = box.project(x0);
  Eigen::VectorXd grad(dim);
  double value = sanitize(f(x, grad));
  ++evaluations;
  if (!std::isfinite(value)) return {x, value, evaluations, false};

  // Inverse Hessian approximation of -f.
  Eigen::MatrixXd inverse_hessian = Eigen::MatrixXd::Identity(dim, dim);
  bool converged = false;
  while (evaluations < options.max_evaluations) {
    // Ascent direction; components pushing against an active bound are dropped.
    Eigen::VectorXd direction = inverse_hessian * grad;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if ((x[i] <= box.lower[i] && direction[i] < 0.0) ||
          (x[i] >= box.upper[i] && direction[i] > 0.0)) {
        direction[i] = 0.0;
      }
    }
    if (direction.dot(grad) <= 0.0) {
      direction = grad;
      inverse_hessian.setIdentity();
    }
    if (direction.lpNorm<Eigen::Infinity>() < options.x_tolerance) {
      converged = true;
      break;
    }

    double step = 1.0;
    Eigen::VectorXd trial;
    Eigen::VectorXd trial_grad(dim);
    double trial_value = value;
    bool accepted = false;
    while (evaluations < options.max_evaluations) {
      trial = box.project(x + step * direction);
      trial_value = sanitize(f(trial, trial_grad));
      ++evaluations;
      if (trial_value >= value + 1e-4 * grad.dot(trial - x) && trial_value >= value) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if ((trial - x).lpNorm<Eigen::Infinity>() < options.x_tolerance) break;
    }
    if (!accepted) {
      converged = true;
      break;
    }

    const Eigen::VectorXd s = trial - x;
    // Curvature of -f along s.
    const Eigen::VectorXd y = grad - trial_grad;
    const double sy = s.dot(y);
    const double improvement = trial_value - value;
    x = trial;
    grad = trial_grad;
    value = trial_value;
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      inverse_hessian = (eye - rho * s * y.transpose()) * inverse_hessian *
                            (eye - rho * y * s.transpose()) +
                        rho * s * s.transpose();
    }
    if (s.lpNorm<Eigen::Infinity>() < options.x_tolerance ||
        improvement <= options.f_tolerance * std::abs(value)) {
      converged = true;
      break;
    }
  }
  return {x, value, evaluations, converged};
}

}  // namespace dualmix
