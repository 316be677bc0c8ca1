#pragma once

#include "dualmix/borel.hpp"
#include "dualmix/cascade.hpp"
#include "dualmix/kernels.hpp"
#include "dualmix/likelihood.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dualmix {

struct BorelComponent {
  BranchingFactor n_star{0.0};
  double weight = 1.0;
  bool operator==(const BorelComponent&) const = default;
};

struct BorelMixture {
  std::vector<BorelComponent> components;
  bool operator==(const BorelMixture&) const = default;
};

struct KernelComponent {
  KernelParams kernel;
  double weight = 1.0;
  bool operator==(const KernelComponent&) const = default;
};

/// Every component shares one kernel family.
struct KernelMixture {
  std::vector<KernelComponent> components;
  KernelFamily family() const { return components.front().kernel.family; }
  bool operator==(const KernelMixture&) const = default;
};

struct DualComponent {
  BranchingFactor n_star{0.0};
  KernelParams kernel;
  double weight = 1.0;
};

/// Cartesian product of a Borel and a kernel mixture; weights multiply.
struct DualMixture {
  BorelMixture borel;
  KernelMixture kernel;
  std::vector<DualComponent> product;
};

/// Throws std::invalid_argument unless weights are positive-or-zero and sum
/// to 1 within 1e-9 and the mixture is non-empty.
void validate(const BorelMixture& mixture);
void validate(const KernelMixture& mixture);

struct FitReport {
  double final_log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Some component fell below the collapse weight and was frozen.
  bool collapsed = false;
  /// More components requested than distinct observations.
  bool over_parameterized = false;
  int restarts = 0;
  /// Mixture log-likelihood before every M-step of the kept restart.
  std::vector<double> log_likelihood_trace;
  /// Posterior memberships, one row per cascade, columns in component order.
  std::optional<Eigen::MatrixXd> membership;
};

struct EmConfig {
  int max_components = 8;
  double tolerance = 1e-8;
  int bmm_max_iterations = 1000;
  int kmm_max_iterations = 200;
  int restarts = 5;
  std::uint64_t seed = 0;
  double collapse_weight = 1e-6;
  bool keep_membership = false;
  KernelFitOptions kernel_fit{};
};

/// Distinct cascade sizes (ascending) with their multiplicities.
struct SizeCounts {
  std::vector<std::int64_t> sizes;
  std::vector<double> counts;

  double total() const;
};

SizeCounts compress_sizes(std::span<const std::int64_t> sizes);

struct BmmFit {
  BorelMixture mixture;
  FitReport report;
};

struct KmmFit {
  KernelMixture mixture;
  FitReport report;
};

/// EM for a k-component Borel mixture over cascade sizes. Components come
/// back sorted by n*. The multiset overload compresses first; memberships (if
/// requested) are expanded back to one row per input size.
BmmFit fit_bmm(std::span<const std::int64_t> sizes, int k, const EmConfig& config = {});
/// Membership rows follow `counts.sizes`.
BmmFit fit_bmm(const SizeCounts& counts, int k, const EmConfig& config = {});

/// EM for a k-component kernel mixture over the inter-arrival structure.
/// Single-event cascades carry no kernel information and are skipped;
/// membership rows follow the remaining cascades in input order. Components
/// come back sorted by theta. Throws DataError when no cascade has two or
/// more events.
KmmFit fit_kmm(std::span<const Cascade> cascades, int k, KernelFamily family,
               const EmConfig& config = {});

double bmm_log_likelihood(const BorelMixture& mixture, const SizeCounts& counts);
double kmm_log_likelihood(const KernelMixture& mixture, std::span<const Cascade> cascades,
                          const LikelihoodOptions& options = {});

struct AicEntry {
  int k = 0;
  double log_likelihood = 0.0;
  double aic = 0.0;
};

struct KSelection {
  int best_k = 1;
  std::vector<AicEntry> table;
  BmmFit best;
};

/// Fits every k in [k_min, k_max] and keeps the smallest 2k - 2 L; ties go
/// to the smaller k.
KSelection select_k_bmm(std::span<const std::int64_t> sizes, int k_min, int k_max,
                        const EmConfig& config = {});

DualMixture assemble_dual(const BorelMixture& borel, const KernelMixture& kernel);

}  // namespace dualmix
