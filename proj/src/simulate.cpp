#include "dualmix/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dualmix {

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  return Rng(seq);
}

double uniform_open_closed(Rng& rng) {
  // 53 random bits mapped to (0, 1].
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

namespace {

struct Event {
  double time;
  std::int64_t parent;
  std::int64_t generation;
};

// Expands `frontier` (indices into events) breadth first until exhaustion or
// the cap. Returns true when the cap stopped the expansion.
bool grow(std::vector<Event>& events, std::size_t first_new, const SimConfig& config,
          Rng& rng) {
  std::poisson_distribution<std::int64_t> offspring(config.n_star.value());
  const bool fertile = config.n_star.value() > 0.0;
  for (std::size_t i = first_new; i < events.size() && fertile; ++i) {
    const std::int64_t children = offspring(rng);
    for (std::int64_t k = 0; k < children; ++k) {
      const double t = events[i].time + kernel_inverse_tail(config.kernel, uniform_open_closed(rng));
      if (config.horizon && t >= *config.horizon) continue;
      if (static_cast<std::int64_t>(events.size()) >= config.max_events) return true;
      events.push_back({t, static_cast<std::int64_t>(i), events[i].generation + 1});
    }
  }
  return false;
}

SimulatedCascade finish(std::vector<Event> events, bool truncated,
                        std::optional<double> horizon) {
  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return events[a].time < events[b].time;
  });
  std::vector<std::int64_t> position(events.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = static_cast<std::int64_t>(i);

  SimulatedCascade out;
  std::vector<double> times;
  times.reserve(events.size());
  out.parents.reserve(events.size());
  for (auto i : order) {
    times.push_back(events[i].time);
    out.parents.push_back(events[i].parent < 0 ? -1 : position[events[i].parent]);
    const auto g = static_cast<std::size_t>(events[i].generation);
    if (out.generation_sizes.size() <= g) out.generation_sizes.resize(g + 1, 0);
    ++out.generation_sizes[g];
  }
  out.cascade = Cascade(std::move(times), horizon);
  out.truncated = truncated;
  return out;
}

}  // namespace

SimulatedCascade simulate_cascade(const SimConfig& config, Rng& rng) {
  validate(config.kernel);
  if (config.max_events < 1) throw std::invalid_argument("max_events must be >= 1");
  std::vector<Event> events{{0.0, -1, 0}};
  const bool truncated = grow(events, 0, config, rng);
  return finish(std::move(events), truncated, config.horizon);
}

SimulatedCascade simulate_cascade(const SimConfig& config) {
  Rng rng = make_stream(config.seed, 0);
  return simulate_cascade(config, rng);
}

SimulatedCascade simulate_continuation(const Cascade& observed, double horizon,
                                       const SimConfig& config, Rng& rng) {
  validate(config.kernel);
  if (!(horizon > 0.0)) throw std::invalid_argument("invalid horizon: must be > 0");

  std::vector<Event> events;
  std::vector<double> tails;
  double residual = 0.0;
  for (double t : observed.times()) {
    if (t >= horizon) break;
    events.push_back({t, -1, 0});
    tails.push_back(kernel_tail(config.kernel, horizon - t));
    residual += tails.back();
  }
  residual *= config.n_star.value();

  bool truncated = false;
  const std::size_t first_new = events.size();
  if (residual > 0.0) {
    std::poisson_distribution<std::int64_t> direct(residual);
    std::discrete_distribution<std::size_t> pick_parent(tails.begin(), tails.end());
    const std::int64_t count = direct(rng);
    for (std::int64_t k = 0; k < count; ++k) {
      const std::size_t parent = pick_parent(rng);
      // Lag conditioned on exceeding horizon - t_parent.
      const double u = uniform_open_closed(rng) * tails[parent];
      const double t = events[parent].time + kernel_inverse_tail(config.kernel, u);
      if (config.horizon && t >= *config.horizon) continue;
      if (static_cast<std::int64_t>(events.size()) >= config.max_events) {
        truncated = true;
        break;
      }
      events.push_back({std::max(t, horizon), static_cast<std::int64_t>(parent), 1});
    }
  }
  if (!truncated) truncated = grow(events, first_new, config, rng);
  return finish(std::move(events), truncated, config.horizon);
}

}  // namespace dualmix
