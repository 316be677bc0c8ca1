#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dualmix {

/// Seconds without a new event after which a cascade is considered finished.
inline constexpr double kCompletionHorizon = 30.0 * 24.0 * 3600.0;

/// One diffusion: the seed post at t = 0 followed by its reshares, in
/// seconds relative to the seed. Ties are kept as distinct events in input
/// order. When `observed_until` is set every event lies strictly before it.
class Cascade {
 public:
  explicit Cascade(std::vector<double> event_times,
                   std::optional<double> observed_until = std::nullopt);

  std::span<const double> times() const noexcept { return times_; }
  std::optional<double> observed_until() const noexcept { return observed_until_; }
  std::size_t size() const noexcept { return times_.size(); }
  double last_time() const noexcept { return times_.back(); }

  bool operator==(const Cascade&) const = default;

 private:
  std::vector<double> times_;
  std::optional<double> observed_until_;
};

/// Items are keyed by opaque identifiers; a group holds every cascade that
/// discusses one item.
struct CascadeGroup {
  std::string item_id;
  std::string publisher_id;
  std::vector<Cascade> cascades;
};

std::int64_t cascade_size(const Cascade& cascade);

/// Keeps the events strictly before `horizon` and records the horizon.
/// Throws std::invalid_argument when horizon <= 0.
Cascade truncate(const Cascade& cascade, double horizon);

std::vector<std::int64_t> cascade_sizes(std::span<const Cascade> cascades);

}  // namespace dualmix
