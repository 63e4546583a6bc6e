#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "heataco/heatmap.hpp"
#include "heataco/instance.hpp"

namespace heataco {

/// Sparsity and tour-edge recall of a filtered candidate edge set.
struct CandidateStats {
  double edges_per_node = 0.0;  // |E| / n
  double coverage = 0.0;        // |E ∩ E*| / n
  double miss_count = 0.0;      // n - |E ∩ E*|
  double miss_percent = 0.0;
};

CandidateStats candidate_stats(std::span<const Edge> edges, const Tour& reference, int n);

struct CrossEntropyResult {
  double ce = 0.0;
  double wce = 0.0;
};

/// Binary cross entropy of the heatmap against the reference-tour adjacency
/// over all i<j pairs, plus the class-balanced variant where tour and
/// non-tour edges each carry total weight 1/2. Confidences are clamped to
/// [1e-12, 1-1e-12] before taking logs.
CrossEntropyResult cross_entropy(const Heatmap& h, const Tour& reference);

/// Histogram of candidate-edge and reference-tour-edge confidences over
/// left-open bins (bin_edges[b], bin_edges[b+1]]. Values outside every bin
/// land in the overflow counters.
struct IntervalContribution {
  std::vector<double> bin_edges;
  std::vector<double> candidate_counts_per_node;  // bars: candidate edges per node
  std::vector<double> tour_edge_fraction;         // curve: reference edges / n
  double overflow_candidates_per_node = 0.0;
  double overflow_tour_fraction = 0.0;
};

/// Bins used when none are requested: fine subdivisions of the
/// low-confidence tail, then width-0.1 bins up to 1.
std::vector<double> default_interval_bins();

IntervalContribution interval_contribution(const Heatmap& h, std::span<const Edge> candidate_edges,
                                           const Tour& reference,
                                           std::span<const double> bin_edges);

/// Raised when no node has at least two heatmap-tagged candidates, so the
/// proposal entropy is undefined and the caller must fall back to a default
/// gamma.
class EntropyUndefinedError : public std::runtime_error {
 public:
  EntropyUndefinedError() : std::runtime_error("entropy undefined: no node with >= 2 heatmap candidates") {}
};

inline constexpr double kDefaultSupportDelta = 1e-12;
inline constexpr double kSupportTargetWithLs = 8.0;
inline constexpr double kSupportTargetNoLs = 4.0;
inline constexpr std::array<double, 4> kDefaultGammaGrid{0.1, 0.5, 1.0, 2.0};

/// Effective support size exp(entropy) of the sharpened distribution
/// q ∝ (s / (max s + delta))^gamma over one score vector.
double effective_support_size(std::span<const double> scores, double gamma,
                              double delta = kDefaultSupportDelta);

struct EffectiveSupport {
  std::vector<int> nodes;        // nodes with >= 2 heatmap-tagged candidates
  std::vector<double> per_node;  // S_i for each included node
  double aggregate = 0.0;        // median of per_node
};

/// Per-node effective support over heatmap-tagged candidates only
/// (distance fill entries are ignored).
EffectiveSupport effective_support(const FlooredHeatmap& h, const CandidateLists& candidates,
                                   double gamma, double delta = kDefaultSupportDelta);

struct GammaSelection {
  double gamma = 0.0;
  double effective_support = 0.0;  // S at the chosen gamma
  double target = 0.0;
  double delta = kDefaultSupportDelta;
  std::vector<double> grid;
  std::vector<double> support_per_gamma;
};

/// Grid search for the gamma whose aggregate effective support is closest
/// to the target; ties break toward the smaller gamma.
GammaSelection select_gamma(const FlooredHeatmap& h, const CandidateLists& candidates,
                            double target, std::span<const double> grid,
                            double delta = kDefaultSupportDelta);

}  // namespace heataco
