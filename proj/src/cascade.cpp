#include "dualmix/cascade.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dualmix {

Cascade::Cascade(std::vector<double> event_times,
                 std::optional<double> observed_until)
    : times_(std::move(event_times)), observed_until_(observed_until) {
  if (times_.empty()) {
    throw std::invalid_argument("cascade has no events");
  }
  if (times_.front() != 0.0) {
    throw std::invalid_argument("cascade must start at t = 0");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || times_[i] < times_[i - 1]) {
      throw std::invalid_argument("cascade times must be finite and sorted (index " +
                                  std::to_string(i) + ")");
    }
  }
  if (observed_until_) {
    if (!(*observed_until_ > 0.0)) {
      throw std::invalid_argument("observation horizon must be positive");
    }
    if (!(times_.back() < *observed_until_)) {
      throw std::invalid_argument("cascade has events at or after its horizon");
    }
  }
}

std::int64_t cascade_size(const Cascade& cascade) {
  return static_cast<std::int64_t>(cascade.size());
}

Cascade truncate(const Cascade& cascade, double horizon) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("invalid horizon: must be > 0");
  }
  std::vector<double> kept;
  for (double t : cascade.times()) {
    if (t >= horizon) break;
    kept.push_back(t);
  }
  return Cascade(std::move(kept), horizon);
}

std::vector<std::int64_t> cascade_sizes(std::span<const Cascade> cascades) {
  std::vector<std::int64_t> sizes;
  sizes.reserve(cascades.size());
  for (const auto& c : cascades) sizes.push_back(cascade_size(c));
  return sizes;
}

}  // namespace dualmix
