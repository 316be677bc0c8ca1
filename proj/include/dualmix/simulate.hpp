#pragma once

#include "dualmix/borel.hpp"
#include "dualmix/cascade.hpp"
#include "dualmix/kernels.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace dualmix {

using Rng = std::mt19937_64;

/// Independent stream `stream` of master seed `seed`. Task i of a batch
/// always draws from make_stream(seed, i), whatever the scheduling.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

/// Uniform draw in (0, 1].
double uniform_open_closed(Rng& rng);

struct SimConfig {
  BranchingFactor n_star{0.0};
  KernelParams kernel;
  std::int64_t max_events = 1'000'000;
  std::uint64_t seed = 0;
  /// Events at or after the horizon are dropped together with their subtrees.
  std::optional<double> horizon;
};

struct SimulatedCascade {
  Cascade cascade{{0.0}};
  /// Index of each event's parent in `cascade`; -1 for the seed and for
  /// events of an observed prefix.
  std::vector<std::int64_t> parents;
  /// Z_0, Z_1, ...: number of events per generation.
  std::vector<std::int64_t> generation_sizes;
  bool truncated = false;
};

/// Cluster-representation simulation: each event spawns Poisson(n*)
/// children, each delayed by an independent kernel draw. Generated breadth
/// first; stops at max_events with `truncated` set.
SimulatedCascade simulate_cascade(const SimConfig& config, Rng& rng);
/// Draws from make_stream(config.seed, 0).
SimulatedCascade simulate_cascade(const SimConfig& config);

/// Future of an observed prefix: Poisson(residual) direct offspring after
/// `horizon`, each seeding an independent subtree. Returns the merged cascade.
SimulatedCascade simulate_continuation(const Cascade& observed, double horizon,
                                       const SimConfig& config, Rng& rng);

}  // namespace dualmix
