#include "dualmix/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dualmix {

Summary summarize(const DualMixture& mixture) {
  Summary s;
  for (const auto& b : mixture.borel.components) s.n_star += b.weight * b.n_star.value();
  for (const auto& k : mixture.kernel.components) {
    s.theta += k.weight * k.kernel.theta;
    s.c += k.weight * k.kernel.c;
  }
  return s;
}

std::vector<double> weighted_quantiles(std::span<const WeightedSample> samples,
                                       std::span<const double> levels) {
  if (samples.empty()) throw std::invalid_argument("weighted quantiles of an empty sample");
  std::vector<WeightedSample> sorted(samples.begin(), samples.end());
  double total = 0.0;
  for (const auto& s : sorted) {
    if (!(s.weight > 0.0) || !std::isfinite(s.value)) {
      throw std::invalid_argument("weighted quantiles need finite values and positive weights");
    }
    total += s.weight;
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const WeightedSample& a, const WeightedSample& b) { return a.value < b.value; });

  const double n = static_cast<double>(sorted.size());
  std::vector<double> cumulative(sorted.size());
  double running = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    running += sorted[i].weight * n / total;
    cumulative[i] = running;
  }
  cumulative.back() = n;

  // Right-continuous step read-off: the first value whose cumulative weight
  // reaches the rank.
  auto at_rank = [&](double rank) {
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), rank);
    if (it == cumulative.end()) return sorted.back().value;
    return sorted[static_cast<std::size_t>(it - cumulative.begin())].value;
  };

  std::vector<double> out;
  out.reserve(levels.size());
  for (double p : levels) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
    const double order = 1.0 + (n - 1.0) * p;
    const double low = std::max(std::floor(order), 1.0);
    const double high = std::min(low + 1.0, n);
    const double frac = order - std::floor(order);
    out.push_back((1.0 - frac) * at_rank(low) + frac * at_rank(high));
  }
  return out;
}

bool BinEdges::operator==(const BinEdges& other) const {
  return n_star.size() == other.n_star.size() && c.size() == other.c.size() &&
         theta.size() == other.theta.size() && n_star == other.n_star && c == other.c &&
         theta == other.theta;
}

namespace {

Eigen::VectorXd edges_of(const std::vector<WeightedSample>& samples, int bins) {
  std::vector<double> levels(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) levels[static_cast<std::size_t>(i)] = static_cast<double>(i) / bins;
  if (samples.empty()) return Eigen::VectorXd::Zero(bins + 1);
  const auto q = weighted_quantiles(samples, levels);
  return Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
}

Eigen::VectorXd histogram(const Eigen::VectorXd& edges,
                          const std::vector<WeightedSample>& samples, bool& out_of_range) {
  const Eigen::Index bins = edges.size() - 1;
  if (samples.empty()) return Eigen::VectorXd::Constant(bins, 1.0 / static_cast<double>(bins));
  Eigen::VectorXd h = Eigen::VectorXd::Zero(bins);
  for (const auto& s : samples) h[bin_index(edges, s.value, &out_of_range)] += s.weight;
  const double total = h.sum();
  if (total > 0.0) h /= total;
  return h;
}

void check_bins(int bins) {
  if (bins < 1) throw std::invalid_argument("need at least one bin");
}

}  // namespace

BinEdges corpus_bin_edges(std::span<const BorelMixture> borel,
                          std::span<const KernelMixture> kernel, int bins) {
  check_bins(bins);
  std::vector<WeightedSample> n_star, c, theta;
  for (const auto& m : borel) {
    for (const auto& comp : m.components) {
      if (comp.weight > 0.0) n_star.push_back({comp.n_star.value(), comp.weight});
    }
  }
  for (const auto& m : kernel) {
    for (const auto& comp : m.components) {
      if (comp.weight <= 0.0) continue;
      theta.push_back({comp.kernel.theta, comp.weight});
      c.push_back({comp.kernel.c, comp.weight});
    }
  }
  return {edges_of(n_star, bins), edges_of(c, bins), edges_of(theta, bins)};
}

int bin_index(const Eigen::VectorXd& edges, double value, bool* out_of_range) {
  const Eigen::Index bins = edges.size() - 1;
  if (bins < 1) throw std::invalid_argument("bin edges need at least two entries");
  if (out_of_range && (value < edges[0] || value > edges[bins])) *out_of_range = true;
  for (Eigen::Index i = 1; i <= bins; ++i) {
    if (value <= edges[i]) return static_cast<int>(i - 1);
  }
  return static_cast<int>(bins - 1);
}

DiffusionEmbedding build_embedding(const BorelMixture& borel, const KernelMixture& kernel,
                                   const BinEdges& edges) {
  if (edges.c.size() != edges.n_star.size() || edges.theta.size() != edges.n_star.size()) {
    throw std::invalid_argument("mismatched bin edge counts");
  }
  check_bins(edges.bins());
  std::vector<WeightedSample> n_star, c, theta;
  for (const auto& comp : borel.components) n_star.push_back({comp.n_star.value(), comp.weight});
  for (const auto& comp : kernel.components) {
    theta.push_back({comp.kernel.theta, comp.weight});
    c.push_back({comp.kernel.c, comp.weight});
  }
  if (borel.components.empty()) throw std::invalid_argument("empty Borel mixture");
  DiffusionEmbedding e;
  e.edges = edges;
  e.kernel_missing = kernel.components.empty();
  e.n_star = histogram(edges.n_star, n_star, e.out_of_range);
  e.c = histogram(edges.c, c, e.out_of_range);
  e.theta = histogram(edges.theta, theta, e.out_of_range);
  return e;
}

DiffusionEmbedding build_embedding(const DualMixture& mixture, const BinEdges& edges) {
  return build_embedding(mixture.borel, mixture.kernel, edges);
}

double wasserstein1(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("histogram lengths differ");
  double distance = 0.0;
  double ca = 0.0;
  double cb = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    ca += a[i];
    cb += b[i];
    distance += std::abs(ca - cb);
  }
  return distance;
}

double embedding_distance(const DiffusionEmbedding& a, const DiffusionEmbedding& b) {
  if (!(a.edges == b.edges)) throw std::invalid_argument("embeddings use different bin edges");
  return wasserstein1(a.n_star, b.n_star) + wasserstein1(a.c, b.c) +
         wasserstein1(a.theta, b.theta);
}

DiffusionEmbedding pool_publisher_embedding(std::span<const DiffusionEmbedding> embeddings) {
  if (embeddings.empty()) throw std::invalid_argument("no embeddings to pool");
  DiffusionEmbedding pooled = embeddings.front();
  for (std::size_t i = 1; i < embeddings.size(); ++i) {
    const auto& e = embeddings[i];
    if (!(e.edges == pooled.edges)) throw std::invalid_argument("embeddings use different bin edges");
    pooled.n_star += e.n_star;
    pooled.c += e.c;
    pooled.theta += e.theta;
    pooled.out_of_range = pooled.out_of_range || e.out_of_range;
    pooled.kernel_missing = pooled.kernel_missing && e.kernel_missing;
  }
  const double count = static_cast<double>(embeddings.size());
  for (Eigen::VectorXd* v : {&pooled.n_star, &pooled.c, &pooled.theta}) {
    *v /= count;
    const double total = v->sum();
    if (total > 0.0) *v /= total;
  }
  return pooled;
}

}  // namespace dualmix
