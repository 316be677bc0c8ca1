#include <doctest.h>

#include "dualmix/borel.hpp"
#include "dualmix/forecast.hpp"
#include "dualmix/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

using dualmix::BranchingFactor;
using dualmix::Cascade;
using dualmix::KernelParams;
using dualmix::SimConfig;

namespace {

SimConfig config(double n, KernelParams k) { return {BranchingFactor(n), k, 1'000'000, 0, std::nullopt}; }

// Kolmogorov distribution tail: P[sqrt(n) D > x]
double ks_pvalue(double d, double n) {
  const double x = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int j = 1; j < 100; ++j) p += 2.0 * (j % 2 ? 1 : -1) * std::exp(-2.0 * j * j * x * x);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

TEST_CASE("no branching means a lone seed") {
  auto rng = dualmix::make_stream(1, 0);
  for (int i = 0; i < 100; ++i) {
    const auto s = dualmix::simulate_cascade(config(0.0, KernelParams::exponential(1.0)), rng);
    CHECK(s.cascade == Cascade({0.0}));
  }
}

TEST_CASE("simulated sizes follow the Borel law") {
  auto rng = dualmix::make_stream(2, 0);
  const auto cfg = config(0.5, KernelParams::exponential(1.0));
  const int runs = 100000;
  std::map<std::int64_t, int> freq;
  double sum = 0.0;
  for (int i = 0; i < runs; ++i) {
    const auto size = dualmix::cascade_size(dualmix::simulate_cascade(cfg, rng).cascade);
    ++freq[size];
    sum += size;
  }
  const auto m = dualmix::borel_mean_var(BranchingFactor(0.5));
  CHECK(std::abs(sum / runs - m.mean) <= 3 * std::sqrt(m.variance / runs));
  for (std::int64_t k = 1; k <= 10; ++k) {
    const double p = std::exp(dualmix::borel_log_pmf(BranchingFactor(0.5), k));
    CHECK(std::abs(freq[k] / double(runs) - p) <= 3 * std::sqrt(p * (1 - p) / runs));
  }
}

TEST_CASE("offspring counts are Poisson") {
  // chi-square over per-parent offspring counts, pooled tail bin
  auto rng = dualmix::make_stream(3, 0);
  const double n = 0.7;
  const auto cfg = config(n, KernelParams::power_law(1.0, 1.0));
  std::vector<double> observed(5, 0.0);  // 0,1,2,3,>=4
  std::int64_t parents = 0;
  while (parents < 100000) {
    const auto s = dualmix::simulate_cascade(cfg, rng);
    std::vector<std::int64_t> kids(s.parents.size(), 0);
    for (auto p : s.parents) {
      if (p >= 0) ++kids[static_cast<std::size_t>(p)];
    }
    for (auto k : kids) {
      ++observed[static_cast<std::size_t>(std::min<std::int64_t>(k, 4))];
      ++parents;
    }
  }
  double chi2 = 0.0;
  double tail = 1.0;
  for (int k = 0; k < 5; ++k) {
    const double p = k < 4 ? std::exp(dualmix::poisson_log_pmf(k, n)) : tail;
    tail -= k < 4 ? p : 0.0;
    const double e = p * parents;
    chi2 += (observed[k] - e) * (observed[k] - e) / e;
  }
  CHECK(chi2 < 13.28);  // chi-square(4) at 0.01
}

TEST_CASE("parent-child delays follow the kernel") {
  for (const auto& k : {KernelParams::exponential(0.3), KernelParams::power_law(1.5, 2.0)}) {
    auto rng = dualmix::make_stream(4, 0);
    const auto cfg = config(0.8, k);
    std::vector<double> delays;
    while (delays.size() < 100000) {
      const auto s = dualmix::simulate_cascade(cfg, rng);
      const auto t = s.cascade.times();
      for (std::size_t i = 0; i < s.parents.size(); ++i) {
        if (s.parents[i] >= 0) delays.push_back(t[i] - t[static_cast<std::size_t>(s.parents[i])]);
      }
    }
    std::sort(delays.begin(), delays.end());
    double d = 0.0;
    const double n = static_cast<double>(delays.size());
    for (std::size_t i = 0; i < delays.size(); ++i) {
      const double cdf = 1.0 - dualmix::kernel_tail(k, delays[i]);
      d = std::max({d, std::abs(cdf - i / n), std::abs((i + 1) / n - cdf)});
    }
    CHECK(ks_pvalue(d, n) > 0.01);
  }
}

TEST_CASE("generation sizes add up and events are sorted") {
  auto rng = dualmix::make_stream(5, 0);
  const auto s = dualmix::simulate_cascade(config(0.9, KernelParams::exponential(1.0)), rng);
  std::int64_t total = 0;
  for (auto z : s.generation_sizes) total += z;
  CHECK(total == dualmix::cascade_size(s.cascade));
  CHECK(s.generation_sizes.front() == 1);
  const auto t = s.cascade.times();
  CHECK(std::is_sorted(t.begin(), t.end()));
  for (std::size_t i = 1; i < s.parents.size(); ++i) CHECK(t[static_cast<std::size_t>(s.parents[i])] <= t[i]);
}

TEST_CASE("the event cap truncates and flags") {
  SimConfig cfg = config(0.99, KernelParams::exponential(1.0));
  cfg.max_events = 5;
  auto rng = dualmix::make_stream(6, 0);
  bool seen = false;
  for (int i = 0; i < 200; ++i) {
    const auto s = dualmix::simulate_cascade(cfg, rng);
    CHECK(dualmix::cascade_size(s.cascade) <= 5);
    seen = seen || s.truncated;
  }
  CHECK(seen);
}

TEST_CASE("same seed, same cascade") {
  SimConfig cfg = config(0.8, KernelParams::power_law(0.9, 3.0));
  cfg.seed = 99;
  CHECK(dualmix::simulate_cascade(cfg).cascade == dualmix::simulate_cascade(cfg).cascade);
  auto a = dualmix::make_stream(7, 3);
  auto b = dualmix::make_stream(7, 3);
  auto c = dualmix::make_stream(7, 4);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  for (int i = 0; i < 1000; ++i) {
    const double u = dualmix::uniform_open_closed(a);
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("continuations extend the prefix past T") {
  const Cascade prefix({0.0, 0.3, 0.9}, 1.0);
  const auto k = KernelParams::exponential(1.0);
  const SimConfig cfg = config(0.6, k);
  auto rng = dualmix::make_stream(8, 0);
  const int runs = 50000;
  double extra = 0.0;
  for (int r = 0; r < runs; ++r) {
    const auto s = dualmix::simulate_continuation(prefix, 1.0, cfg, rng);
    const auto t = s.cascade.times();
    CHECK(std::equal(prefix.times().begin(), prefix.times().end(), t.begin()));
    for (std::size_t i = prefix.size(); i < t.size(); ++i) REQUIRE(t[i] > 1.0);
    extra += static_cast<double>(t.size() - prefix.size());
  }
  const double lambda = dualmix::residual_intensity(BranchingFactor(0.6), k, prefix, 1.0);
  CHECK(extra / runs == doctest::Approx(lambda / 0.4).epsilon(0.02));

  // nothing can follow once the kernel has no mass left
  const Cascade late({0.0}, 1e6);
  const auto s = dualmix::simulate_continuation(late, 1e6, cfg, rng);
  CHECK(s.cascade.times().size() == 1);
}
