#pragma once

#include <string>
#include <string_view>

namespace dualmix {

enum class KernelFamily { kExponential, kPowerLaw };

std::string_view to_string(KernelFamily family);
/// Accepts "exp"/"exponential" and "pl"/"powerlaw"/"power-law".
KernelFamily parse_kernel_family(std::string_view name);
int num_kernel_params(KernelFamily family);

// Box used by every kernel optimizer.
inline constexpr double kThetaMin = 1e-6;
inline constexpr double kThetaMax = 1e4;
inline constexpr double kCutoffMin = 1e-6;
inline constexpr double kCutoffMax = 1e6;

/// Memory kernel g(tau), a probability density on [0, inf).
///   exponential: theta * exp(-theta * tau)
///   power law:   theta * c^theta * (tau + c)^-(1 + theta)
/// `c` is 0 for the exponential family.
struct KernelParams {
  KernelFamily family = KernelFamily::kExponential;
  double theta = 1.0;
  double c = 0.0;

  static KernelParams exponential(double theta);
  static KernelParams power_law(double theta, double c);

  bool operator==(const KernelParams&) const = default;
};

/// Throws std::invalid_argument for non-positive or non-finite parameters.
void validate(const KernelParams& kernel);

double kernel_pdf(const KernelParams& kernel, double tau);
double kernel_log_pdf(const KernelParams& kernel, double tau);

/// 1 - integral_0^x g, in closed form.
double kernel_tail(const KernelParams& kernel, double x);
double kernel_log_tail(const KernelParams& kernel, double x);

/// Smallest x with kernel_tail(x) == u, for u in (0, 1].
double kernel_inverse_tail(const KernelParams& kernel, double u);

}  // namespace dualmix
