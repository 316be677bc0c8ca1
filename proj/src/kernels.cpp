#include "dualmix/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dualmix {

std::string_view to_string(KernelFamily family) {
  return family == KernelFamily::kExponential ? "exp" : "pl";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "exp" || name == "exponential") return KernelFamily::kExponential;
  if (name == "pl" || name == "powerlaw" || name == "power-law") {
    return KernelFamily::kPowerLaw;
  }
  throw std::invalid_argument("unknown kernel family '" + std::string(name) + "'");
}

int num_kernel_params(KernelFamily family) {
  return family == KernelFamily::kExponential ? 1 : 2;
}

KernelParams KernelParams::exponential(double theta) {
  KernelParams k{KernelFamily::kExponential, theta, 0.0};
  validate(k);
  return k;
}

KernelParams KernelParams::power_law(double theta, double c) {
  KernelParams k{KernelFamily::kPowerLaw, theta, c};
  validate(k);
  return k;
}

void validate(const KernelParams& kernel) {
  if (!(kernel.theta > 0.0) || !std::isfinite(kernel.theta)) {
    throw std::invalid_argument("kernel theta must be positive and finite");
  }
  if (kernel.family == KernelFamily::kPowerLaw &&
      (!(kernel.c > 0.0) || !std::isfinite(kernel.c))) {
    throw std::invalid_argument("power-law cutoff c must be positive and finite");
  }
}

namespace {

void check_lag(double tau) {
  if (!(tau >= 0.0)) throw std::domain_error("kernel evaluated at negative lag");
}

}  // namespace

double kernel_pdf(const KernelParams& kernel, double tau) {
  check_lag(tau);
  if (kernel.family == KernelFamily::kExponential) {
    return kernel.theta * std::exp(-kernel.theta * tau);
  }
  return kernel.theta / kernel.c * std::pow(1.0 + tau / kernel.c, -(1.0 + kernel.theta));
}

double kernel_log_pdf(const KernelParams& kernel, double tau) {
  check_lag(tau);
  if (kernel.family == KernelFamily::kExponential) {
    return std::log(kernel.theta) - kernel.theta * tau;
  }
  return std::log(kernel.theta) - std::log(kernel.c) -
         (1.0 + kernel.theta) * std::log1p(tau / kernel.c);
}

double kernel_log_tail(const KernelParams& kernel, double x) {
  check_lag(x);
  if (kernel.family == KernelFamily::kExponential) return -kernel.theta * x;
  return -kernel.theta * std::log1p(x / kernel.c);
}

double kernel_tail(const KernelParams& kernel, double x) {
  return std::exp(kernel_log_tail(kernel, x));
}

double kernel_inverse_tail(const KernelParams& kernel, double u) {
  if (!(u > 0.0 && u <= 1.0)) {
    throw std::domain_error("tail probability must lie in (0, 1]");
  }
  if (kernel.family == KernelFamily::kExponential) {
    return -std::log(u) / kernel.theta;
  }
  // c * (u^(-1/theta) - 1), written to stay accurate for u near 1.
  return kernel.c * std::expm1(-std::log(u) / kernel.theta);
}

}  // namespace dualmix
