#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "heataco/heatmap.hpp"
#include "heataco/instance.hpp"
#include "heataco/localsearch.hpp"
#include "heataco/rng.hpp"

namespace heataco {

enum class EvaporationScope { FullMatrix, CandidateBased };
enum class LocalSearchKind { None, TwoOpt, ThreeOpt };
enum class DepositRule { GlobalBest, IterationBest };

struct MmasParams {
  double alpha = 1.0;  // pheromone exponent
  double beta = 2.0;   // distance-heuristic exponent
  double gamma = 1.0;  // heatmap exponent; 0 disables guidance
  double rho = 0.02;   // evaporation rate
  int ants = 32;
  int iterations = 5000;
  std::uint64_t seed = 0;
  // Unset means: candidate-based when local search is on, full matrix otherwise.
  std::optional<EvaporationScope> evaporation_scope;
  LocalSearchKind local_search = LocalSearchKind::None;
  DepositRule deposit = DepositRule::GlobalBest;
  int threads = 1;
  LsParams ls;

  void validate() const;
  EvaporationScope resolved_scope() const {
    if (evaporation_scope) return *evaporation_scope;
    return local_search == LocalSearchKind::None ? EvaporationScope::FullMatrix
                                                 : EvaporationScope::CandidateBased;
  }
};

/// Pheromone matrix with MMAS clamp bounds and the best-so-far tour.
struct PheromoneState {
  int n = 0;
  std::vector<double> tau;  // row-major, kept symmetric
  double tau_min = 0.0;
  double tau_max = 0.0;
  Tour best;
  int iteration = 0;

  double tau_at(int i, int j) const { return tau[std::size_t(i) * n + j]; }
  void set_tau(int i, int j, double v) {
    tau[std::size_t(i) * n + j] = v;
    tau[std::size_t(j) * n + i] = v;
  }
};

struct ConvergenceTrace {
  std::vector<double> best_length;      // best-so-far after each iteration
  std::vector<double> elapsed_seconds;  // wall clock since run start
};

struct RunStats {
  double construct_seconds = 0.0;
  double local_search_seconds = 0.0;
  double update_seconds = 0.0;
};

struct RunResult {
  Tour best;
  ConvergenceTrace trace;
  RunStats stats;
};

/// Test/diagnostics hook. Observed runs are forced single-threaded so
/// callback order is deterministic.
struct RunObserver {
  virtual ~RunObserver() = default;
  virtual bool wants_transitions() const { return false; }
  virtual void on_transition(int ant, int step, int current, std::span<const int> choices,
                             std::span<const double> probabilities) {
    (void)ant, (void)step, (void)current, (void)choices, (void)probabilities;
  }
  virtual void on_iteration(const PheromoneState& state) { (void)state; }
};

Tour nearest_neighbor_tour(const DistanceMatrix& d, int start = 0);

/// Applies the configured local search to a constructed tour; the result is
/// what elite selection and pheromone deposit see. None is the identity.
Tour apply_local_search(const Tour& tour, const DistanceMatrix& d,
                        const CandidateLists& candidates, LocalSearchKind kind,
                        const LsParams& params = {});

/// Evaporate, deposit 1/elite.length on the elite edges, refresh the clamp
/// bounds from the best-so-far length, and clamp every touched entry.
void update_pheromones(PheromoneState& state, const Tour& elite, const MmasParams& params,
                       const CandidateLists& candidates);

/// MMAS search over candidate lists. When `heatmap` is null the transition
/// rule never consults a heatmap term (vanilla MMAS); with a heatmap it is
/// weighted in as a multiplicative prior with exponent gamma.
class MmasEngine {
 public:
  MmasEngine(const DistanceMatrix& d, const FlooredHeatmap* heatmap,
             const CandidateLists& candidates, const MmasParams& params);

  RunResult run(RunObserver* observer = nullptr);

  /// Probability vector over the evaluation set at `current`: unvisited
  /// candidates, or all unvisited nodes when every candidate is visited.
  void transition_distribution(int current, const std::vector<std::uint8_t>& visited,
                               const PheromoneState& state, std::vector<int>& choices,
                               std::vector<double>& probabilities) const;

  Tour construct_tour(Rng& rng, int start, const PheromoneState& state) const;

  /// Undirected candidate edges (deduplicated), the evaporation set in
  /// candidate-based scope.
  std::span<const Edge> candidate_edges() const { return candidate_edges_; }

  PheromoneState initial_state() const;

 private:
  struct AntWorkspace;

  void construct_into(Rng& rng, int start, const PheromoneState& state, AntWorkspace& ws,
                      RunObserver* observer, int ant_index) const;
  int sample_next(Rng& rng, int current, const std::vector<std::uint8_t>& visited,
                  const PheromoneState& state, AntWorkspace& ws, RunObserver* observer,
                  int ant_index, int step) const;
  double fallback_weight(int i, int j, const PheromoneState& state) const;

  const DistanceMatrix& d_;
  const FlooredHeatmap* heatmap_;
  const CandidateLists& cand_;
  MmasParams params_;
  std::vector<double> prior_;  // per candidate slot: eta^beta * (H~)^gamma
  std::vector<Edge> candidate_edges_;
};

RunResult run_mmas(const DistanceMatrix& d, const FlooredHeatmap* heatmap,
                   const CandidateLists& candidates, const MmasParams& params,
                   RunObserver* observer = nullptr);

/// Fig-style convergence comparison: for traces L_i(t) of equal length I,
/// returns y_i(t) = log10(L_i(t) - B + c) with B = min_i L_i(I) and
/// c = max(plot_alpha * median_i(L_i(t_mid) - B), max(|B|*1e-8, 1e-12)).
struct ConvergencePlot {
  double baseline = 0.0;  // B
  double offset = 0.0;    // c
  std::vector<std::vector<double>> y;
};

ConvergencePlot convergence_transform(const std::vector<std::vector<double>>& traces,
                                      double plot_alpha = 0.03, double t_mid_fraction = 0.5);

}  // namespace heataco
