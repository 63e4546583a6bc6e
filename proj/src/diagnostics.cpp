#include "heataco/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heataco {

namespace {

constexpr double kProbClamp = 1e-12;

double clamp_prob(double h) { return std::clamp(h, kProbClamp, 1.0 - kProbClamp); }

}  // namespace

CandidateStats candidate_stats(std::span<const Edge> edges, const Tour& reference, int n) {
  if (auto violation = validate_tour(reference.perm, n))
    throw std::invalid_argument("candidate_stats: " + *violation);

  const std::vector<Edge> ref_edges = tour_edge_set(reference.perm);
  long long intersection = 0;
  for (const Edge& e : edges)
    if (std::binary_search(ref_edges.begin(), ref_edges.end(), e)) ++intersection;

  CandidateStats stats;
  stats.edges_per_node = double(edges.size()) / n;
  stats.coverage = double(intersection) / n;
  stats.miss_count = double(n - intersection);
  stats.miss_percent = 100.0 * stats.miss_count / n;
  return stats;
}

CrossEntropyResult cross_entropy(const Heatmap& h, const Tour& reference) {
  const int n = h.size();
  if (auto violation = validate_tour(reference.perm, n))
    throw std::invalid_argument("cross_entropy: " + *violation);

  const std::vector<Edge> ref_edges = tour_edge_set(reference.perm);
  const long long pairs = (long long)n * (n - 1) / 2;
  const long long n_pos = (long long)ref_edges.size();
  const long long n_neg = pairs - n_pos;

  double sum = 0.0;
  double pos_sum = 0.0;
  double neg_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = clamp_prob(h.at(i, j));
      const bool on_tour = std::binary_search(ref_edges.begin(), ref_edges.end(), Edge{i, j});
      const double loss = on_tour ? -std::log(p) : -std::log1p(-p);
      sum += loss;
      (on_tour ? pos_sum : neg_sum) += loss;
    }
  }

  CrossEntropyResult out;
  out.ce = sum / double(pairs);
  // Balanced weighting: each class contributes total weight 1/2.
  out.wce = 0.0;
  if (n_pos > 0) out.wce += pos_sum / (2.0 * double(n_pos));
  if (n_neg > 0) out.wce += neg_sum / (2.0 * double(n_neg));
  return out;
}

std::vector<double> default_interval_bins() {
  std::vector<double> edges{0.0, 1e-3, 1e-2, 0.05};
  for (int i = 1; i <= 10; ++i) edges.push_back(i / 10.0);
  return edges;
}

IntervalContribution interval_contribution(const Heatmap& h, std::span<const Edge> candidate_edges,
                                           const Tour& reference,
                                           std::span<const double> bin_edges) {
  const int n = h.size();
  if (bin_edges.size() < 2) throw std::invalid_argument("interval_contribution: need >= 2 bin edges");
  for (std::size_t b = 1; b < bin_edges.size(); ++b)
    if (!(bin_edges[b] > bin_edges[b - 1]))
      throw std::invalid_argument("interval_contribution: bin edges must ascend");
  if (auto violation = validate_tour(reference.perm, n))
    throw std::invalid_argument("interval_contribution: " + *violation);

  IntervalContribution out;
  out.bin_edges.assign(bin_edges.begin(), bin_edges.end());
  const std::size_t bins = bin_edges.size() - 1;
  out.candidate_counts_per_node.assign(bins, 0.0);
  out.tour_edge_fraction.assign(bins, 0.0);

  // Bin b holds confidences in (bin_edges[b], bin_edges[b+1]].
  const auto bin_of = [&](double c) -> long {
    if (!(c > bin_edges.front()) || c > bin_edges.back()) return -1;
    const auto it = std::lower_bound(bin_edges.begin(), bin_edges.end(), c);
    return (it - bin_edges.begin()) - 1;
  };

  for (const Edge& e : candidate_edges) {
    const long b = bin_of(h.at(e.i, e.j));
    if (b < 0)
      out.overflow_candidates_per_node += 1.0;
    else
      out.candidate_counts_per_node[std::size_t(b)] += 1.0;
  }
  for (const Edge& e : tour_edge_set(reference.perm)) {
    const long b = bin_of(h.at(e.i, e.j));
    if (b < 0)
      out.overflow_tour_fraction += 1.0;
    else
      out.tour_edge_fraction[std::size_t(b)] += 1.0;
  }

  for (double& v : out.candidate_counts_per_node) v /= n;
  for (double& v : out.tour_edge_fraction) v /= n;
  out.overflow_candidates_per_node /= n;
  out.overflow_tour_fraction /= n;
  return out;
}

double effective_support_size(std::span<const double> scores, double gamma, double delta) {
  if (scores.size() < 2)
    throw std::invalid_argument("effective_support_size: need >= 2 scores");
  if (!(delta > 0.0)) throw std::invalid_argument("effective_support_size: delta must be > 0");

  double max_score = scores[0];
  for (const double s : scores) max_score = std::max(max_score, s);

  // Work in log space relative to the largest normalized score: gamma only
  // enters through differences of logs, so equal scores stay exactly tied
  // for every gamma.
  const double denom = max_score + delta;
  std::vector<double> log_weights(scores.size());
  double max_lw = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < scores.size(); ++s) {
    log_weights[s] = gamma == 0.0 ? 0.0 : gamma * std::log(scores[s] / denom);
    max_lw = std::max(max_lw, log_weights[s]);
  }

  double z = 0.0;
  for (double& lw : log_weights) {
    lw -= max_lw;
    z += std::exp(lw);
  }

  double entropy = 0.0;
  const double log_z = std::log(z);
  for (const double lw : log_weights) {
    const double q = std::exp(lw) / z;
    if (q > 0.0) entropy -= q * (lw - log_z);
  }
  return std::exp(entropy);
}

EffectiveSupport effective_support(const FlooredHeatmap& h, const CandidateLists& candidates,
                                   double gamma, double delta) {
  EffectiveSupport out;
  std::vector<double> scores;
  for (int i = 0; i < candidates.size(); ++i) {
    const int tagged = candidates.heatmap_count(i);
    if (tagged < 2) continue;
    scores.clear();
    const auto neighbors = candidates.neighbors(i);
    for (int s = 0; s < tagged; ++s) scores.push_back(h.at(i, neighbors[s]));
    out.nodes.push_back(i);
    out.per_node.push_back(effective_support_size(scores, gamma, delta));
  }
  if (out.per_node.empty()) throw EntropyUndefinedError();

  std::vector<double> sorted = out.per_node;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  out.aggregate = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  return out;
}

GammaSelection select_gamma(const FlooredHeatmap& h, const CandidateLists& candidates,
                            double target, std::span<const double> grid, double delta) {
  if (grid.empty()) throw std::invalid_argument("select_gamma: empty grid");

  GammaSelection sel;
  sel.target = target;
  sel.delta = delta;
  sel.grid.assign(grid.begin(), grid.end());
  std::sort(sel.grid.begin(), sel.grid.end());

  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < sel.grid.size(); ++g) {
    const double support = effective_support(h, candidates, sel.grid[g], delta).aggregate;
    sel.support_per_gamma.push_back(support);
    const double dist = std::abs(support - target);
    if (dist < best_dist) {  // strict: ties keep the smaller gamma
      best_dist = dist;
      best = g;
    }
  }
  sel.gamma = sel.grid[best];
  sel.effective_support = sel.support_per_gamma[best];
  return sel;
}

}  // namespace heataco
