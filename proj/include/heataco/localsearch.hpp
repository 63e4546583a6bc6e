#pragma once

#include <cstdint>
#include <vector>

#include "heataco/heatmap.hpp"
#include "heataco/instance.hpp"

namespace heataco {

enum class MoveStrategy { FirstImprovement, BestImprovement };

struct LsParams {
  int max_passes_2opt = 50;
  int max_passes_3opt = 10;
  MoveStrategy strategy = MoveStrategy::FirstImprovement;
};

/// Scratch buffers reused across improvement calls (position index and
/// don't-look bits). Cheap to default-construct; sized lazily.
struct LsWorkspace {
  std::vector<int> pos;
  std::vector<std::uint8_t> dont_look;
};

/// Candidate-restricted 2-opt: accepts exchanges where at least one of the
/// two new edges joins a node to one of its candidates. Runs node-order
/// sweeps with don't-look bits until no improving move or the pass cap.
/// Returns the new length.
double two_opt_inplace(std::vector<int>& perm, double length, const DistanceMatrix& d,
                       const CandidateLists& candidates, const LsParams& params,
                       LsWorkspace& ws);

/// Candidate-restricted 3-opt. Starts from a full 2-opt descent (the 2-opt
/// neighborhood is contained in 3-opt), then alternates 3-opt sweeps over
/// candidate pairs with 2-opt descents until fixed point or the pass cap.
double three_opt_inplace(std::vector<int>& perm, double length, const DistanceMatrix& d,
                         const CandidateLists& candidates, const LsParams& params,
                         LsWorkspace& ws);

Tour two_opt(const Tour& tour, const DistanceMatrix& d, const CandidateLists& candidates,
             const LsParams& params = {});

Tour three_opt(const Tour& tour, const DistanceMatrix& d, const CandidateLists& candidates,
               const LsParams& params = {});

}  // namespace heataco
