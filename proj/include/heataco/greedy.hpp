#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "heataco/heatmap.hpp"
#include "heataco/instance.hpp"

namespace heataco {

/// Edge score h/d (h/max(d, 1e-12) when endpoints coincide).
double greedy_score(double confidence, double distance);

struct ScoredEdge {
  double score = 0.0;
  std::int32_t i = 0;
  std::int32_t j = 0;
};

/// Greedy edge-merge baseline: scores all pairs by confidence/distance,
/// inserts in descending score order under degree-2 and subtour constraints,
/// closing the cycle with the final edge.
Tour greedy_merge(const Heatmap& h, const DistanceMatrix& d);

/// Core insertion over a pre-sorted edge stream. If the stream runs out
/// before a Hamiltonian cycle forms, the remaining path fragments are joined
/// nearest-endpoint-first. Exposed so truncated streams can be exercised.
Tour greedy_merge_stream(std::span<const ScoredEdge> sorted_edges, const DistanceMatrix& d);

}  // namespace heataco
