#include "heataco/mmas.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace heataco {

namespace {

// Guard for duplicate points: eta = 1 / max(d, kMinDistance).
constexpr double kMinDistance = 1e-12;

double eta_pow(double distance, double beta) {
  return std::pow(1.0 / std::max(distance, kMinDistance), beta);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void MmasParams::validate() const {
  if (alpha < 0 || beta < 0 || gamma < 0)
    throw std::invalid_argument("mmas: exponents must be >= 0");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("mmas: rho must be in (0,1)");
  if (ants < 1) throw std::invalid_argument("mmas: need at least one ant");
  if (iterations < 1) throw std::invalid_argument("mmas: need at least one iteration");
  if (threads < 1) throw std::invalid_argument("mmas: thread count must be >= 1");
  if (ls.max_passes_2opt < 1 || ls.max_passes_3opt < 1)
    throw std::invalid_argument("mmas: local search pass caps must be >= 1");
}

Tour nearest_neighbor_tour(const DistanceMatrix& d, int start) {
  const int n = d.size();
  Tour tour;
  tour.perm.reserve(n);
  std::vector<std::uint8_t> visited(n, 0);
  int current = start;
  tour.perm.push_back(current);
  visited[current] = 1;
  for (int step = 1; step < n; ++step) {
    int next = -1;
    double best = 0.0;
    for (int j = 0; j < n; ++j) {
      if (visited[j]) continue;
      if (next < 0 || d(current, j) < best) {
        next = j;
        best = d(current, j);
      }
    }
    visited[next] = 1;
    tour.perm.push_back(next);
    tour.length += d(current, next);
    current = next;
  }
  tour.length += d(current, start);
  return tour;
}

Tour apply_local_search(const Tour& tour, const DistanceMatrix& d,
                        const CandidateLists& candidates, LocalSearchKind kind,
                        const LsParams& params) {
  switch (kind) {
    case LocalSearchKind::None: return tour;
    case LocalSearchKind::TwoOpt: return two_opt(tour, d, candidates, params);
    case LocalSearchKind::ThreeOpt: return three_opt(tour, d, candidates, params);
  }
  return tour;
}

namespace {

void apply_update(PheromoneState& state, const Tour& elite, const MmasParams& params,
                  std::span<const Edge> scope_edges, bool full_matrix) {
  const int n = state.n;
  const double keep = 1.0 - params.rho;

  if (full_matrix) {
    for (double& t : state.tau) t *= keep;
  } else {
    for (const Edge& e : scope_edges) state.set_tau(e.i, e.j, state.tau_at(e.i, e.j) * keep);
  }

  const double delta = 1.0 / elite.length;
  for (std::size_t t = 0; t < elite.perm.size(); ++t) {
    const int a = elite.perm[t];
    const int b = elite.perm[(t + 1) % elite.perm.size()];
    state.set_tau(a, b, state.tau_at(a, b) + delta);
  }

  state.tau_max = 1.0 / (params.rho * state.best.length);
  state.tau_min = state.tau_max / (2.0 * n);

  const auto clamp_edge = [&](int i, int j) {
    const double v = state.tau_at(i, j);
    state.set_tau(i, j, std::clamp(v, state.tau_min, state.tau_max));
  };
  if (full_matrix) {
    for (double& t : state.tau) t = std::clamp(t, state.tau_min, state.tau_max);
  } else {
    for (const Edge& e : scope_edges) clamp_edge(e.i, e.j);
    for (std::size_t t = 0; t < elite.perm.size(); ++t)
      clamp_edge(elite.perm[t], elite.perm[(t + 1) % elite.perm.size()]);
  }
}

}  // namespace

void update_pheromones(PheromoneState& state, const Tour& elite, const MmasParams& params,
                       const CandidateLists& candidates) {
  const bool full = params.resolved_scope() == EvaporationScope::FullMatrix;
  std::vector<Edge> scope;
  if (!full) {
    for (int i = 0; i < candidates.size(); ++i)
      for (const int j : candidates.neighbors(i))
        scope.push_back({std::min(i, j), std::max(i, j)});
    std::sort(scope.begin(), scope.end());
    scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
  }
  apply_update(state, elite, params, scope, full);
}

struct MmasEngine::AntWorkspace {
  std::vector<int> perm;
  std::vector<std::uint8_t> visited;
  std::vector<int> choices;
  std::vector<double> weights;
  double length = 0.0;
  LsWorkspace ls;
};

MmasEngine::MmasEngine(const DistanceMatrix& d, const FlooredHeatmap* heatmap,
                       const CandidateLists& candidates, const MmasParams& params)
    : d_(d), heatmap_(heatmap), cand_(candidates), params_(params) {
  params_.validate();
  if (heatmap_ && heatmap_->size() != d_.size())
    throw std::invalid_argument("mmas: heatmap size does not match instance");
  if (cand_.size() != d_.size())
    throw std::invalid_argument("mmas: candidate lists do not match instance");

  const int n = d_.size();
  const int ls = cand_.list_size();
  prior_.resize(std::size_t(n) * ls);
  for (int i = 0; i < n; ++i) {
    const auto neighbors = cand_.neighbors(i);
    for (int s = 0; s < ls; ++s) {
      const int j = neighbors[s];
      double p = eta_pow(d_(i, j), params_.beta);
      if (heatmap_) p *= std::pow(heatmap_->at(i, j), params_.gamma);
      prior_[std::size_t(i) * ls + s] = p;
    }
  }

  for (int i = 0; i < n; ++i)
    for (const int j : cand_.neighbors(i))
      candidate_edges_.push_back({std::min(i, j), std::max(i, j)});
  std::sort(candidate_edges_.begin(), candidate_edges_.end());
  candidate_edges_.erase(std::unique(candidate_edges_.begin(), candidate_edges_.end()),
                         candidate_edges_.end());
}

double MmasEngine::fallback_weight(int i, int j, const PheromoneState& state) const {
  const double tau = state.tau_at(i, j);
  double w = (params_.alpha == 1.0 ? tau : std::pow(tau, params_.alpha)) *
             eta_pow(d_(i, j), params_.beta);
  if (heatmap_) w *= std::pow(heatmap_->at(i, j), params_.gamma);
  return w;
}

int MmasEngine::sample_next(Rng& rng, int current, const std::vector<std::uint8_t>& visited,
                            const PheromoneState& state, AntWorkspace& ws,
                            RunObserver* observer, int ant_index, int step) const {
  ws.choices.clear();
  ws.weights.clear();
  double total = 0.0;

  const auto neighbors = cand_.neighbors(current);
  const double* prior_row = prior_.data() + std::size_t(current) * cand_.list_size();
  for (int s = 0; s < cand_.list_size(); ++s) {
    const int j = neighbors[s];
    if (visited[j]) continue;
    const double tau = state.tau_at(current, j);
    const double w = (params_.alpha == 1.0 ? tau : std::pow(tau, params_.alpha)) * prior_row[s];
    ws.choices.push_back(j);
    ws.weights.push_back(w);
    total += w;
  }

  if (ws.choices.empty()) {
    // Every candidate is visited: fall back to all unvisited nodes under the
    // same transition weights (heatmap entries there are floored).
    for (int j = 0; j < state.n; ++j) {
      if (visited[j] || j == current) continue;
      const double w = fallback_weight(current, j, state);
      ws.choices.push_back(j);
      ws.weights.push_back(w);
      total += w;
    }
  }

  if (observer && observer->wants_transitions()) {
    std::vector<double> probs(ws.weights.size());
    for (std::size_t s = 0; s < ws.weights.size(); ++s)
      probs[s] = total > 0.0 ? ws.weights[s] / total : 1.0 / double(ws.weights.size());
    observer->on_transition(ant_index, step, current, ws.choices, probs);
  }

  if (!(total > 0.0) || !std::isfinite(total)) {
    // Degenerate weights (all underflowed, or an overflow): keep sampling
    // well-defined. Infinite weights win outright, otherwise uniform.
    if (std::isinf(total)) {
      for (std::size_t s = 0; s < ws.weights.size(); ++s)
        if (std::isinf(ws.weights[s])) return ws.choices[s];
    }
    return ws.choices[rng.below(std::uint32_t(ws.choices.size()))];
  }

  const double r = rng.uniform01() * total;
  double cum = 0.0;
  for (std::size_t s = 0; s < ws.weights.size(); ++s) {
    cum += ws.weights[s];
    if (r < cum) return ws.choices[s];
  }
  return ws.choices.back();
}

void MmasEngine::construct_into(Rng& rng, int start, const PheromoneState& state,
                                AntWorkspace& ws, RunObserver* observer, int ant_index) const {
  const int n = state.n;
  ws.perm.clear();
  ws.perm.reserve(n);
  ws.visited.assign(n, 0);
  int current = start;
  ws.perm.push_back(current);
  ws.visited[current] = 1;
  double length = 0.0;
  for (int step = 1; step < n; ++step) {
    const int next = sample_next(rng, current, ws.visited, state, ws, observer, ant_index, step);
    ws.visited[next] = 1;
    ws.perm.push_back(next);
    length += d_(current, next);
    current = next;
  }
  length += d_(current, start);
  ws.length = length;
}

Tour MmasEngine::construct_tour(Rng& rng, int start, const PheromoneState& state) const {
  AntWorkspace ws;
  construct_into(rng, start, state, ws, nullptr, 0);
  return Tour{std::move(ws.perm), ws.length};
}

void MmasEngine::transition_distribution(int current, const std::vector<std::uint8_t>& visited,
                                         const PheromoneState& state, std::vector<int>& choices,
                                         std::vector<double>& probabilities) const {
  AntWorkspace ws;
  double total = 0.0;
  const auto neighbors = cand_.neighbors(current);
  const double* prior_row = prior_.data() + std::size_t(current) * cand_.list_size();
  for (int s = 0; s < cand_.list_size(); ++s) {
    const int j = neighbors[s];
    if (visited[j]) continue;
    const double tau = state.tau_at(current, j);
    const double w = (params_.alpha == 1.0 ? tau : std::pow(tau, params_.alpha)) * prior_row[s];
    ws.choices.push_back(j);
    ws.weights.push_back(w);
    total += w;
  }
  if (ws.choices.empty()) {
    for (int j = 0; j < state.n; ++j) {
      if (visited[j] || j == current) continue;
      ws.choices.push_back(j);
      ws.weights.push_back(fallback_weight(current, j, state));
      total += ws.weights.back();
    }
  }
  if (ws.choices.empty()) throw std::logic_error("transition: no unvisited node");

  choices = ws.choices;
  probabilities.resize(choices.size());
  for (std::size_t s = 0; s < probabilities.size(); ++s)
    probabilities[s] = total > 0.0 ? ws.weights[s] / total : 1.0 / double(choices.size());
}

PheromoneState MmasEngine::initial_state() const {
  const int n = d_.size();
  PheromoneState state;
  state.n = n;
  state.best = nearest_neighbor_tour(d_, 0);
  state.tau_max = 1.0 / (params_.rho * state.best.length);
  state.tau_min = state.tau_max / (2.0 * n);
  state.tau.assign(std::size_t(n) * n, state.tau_max);
  return state;
}

RunResult MmasEngine::run(RunObserver* observer) {
  const int n = d_.size();
  const bool full_evaporation = params_.resolved_scope() == EvaporationScope::FullMatrix;
  const int threads = observer ? 1 : params_.threads;

  PheromoneState state = initial_state();

  RunResult result;
  result.trace.best_length.reserve(params_.iterations);
  result.trace.elapsed_seconds.reserve(params_.iterations);

  std::vector<AntWorkspace> ants(params_.ants);
  const auto t0 = std::chrono::steady_clock::now();

  for (int iter = 0; iter < params_.iterations; ++iter) {
    state.iteration = iter;

    const auto t_construct = std::chrono::steady_clock::now();
#ifdef _OPENMP
#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1)
#endif
    for (int a = 0; a < params_.ants; ++a) {
      Rng rng = Rng::stream(params_.seed, std::uint64_t(iter), std::uint64_t(a));
      const int start = int(rng.below(std::uint32_t(n)));
      construct_into(rng, start, state, ants[a], observer, a);
    }
    result.stats.construct_seconds += seconds_since(t_construct);

    if (params_.local_search != LocalSearchKind::None) {
      const auto t_ls = std::chrono::steady_clock::now();
#ifdef _OPENMP
#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1)
#endif
      for (int a = 0; a < params_.ants; ++a) {
        if (params_.local_search == LocalSearchKind::TwoOpt)
          ants[a].length =
              two_opt_inplace(ants[a].perm, ants[a].length, d_, cand_, params_.ls, ants[a].ls);
        else
          ants[a].length =
              three_opt_inplace(ants[a].perm, ants[a].length, d_, cand_, params_.ls, ants[a].ls);
      }
      result.stats.local_search_seconds += seconds_since(t_ls);
    }

    const auto t_update = std::chrono::steady_clock::now();
    int iteration_best = 0;
    for (int a = 1; a < params_.ants; ++a)
      if (ants[a].length < ants[iteration_best].length) iteration_best = a;

    if (ants[iteration_best].length < state.best.length) {
      state.best.perm = ants[iteration_best].perm;
      state.best.length = ants[iteration_best].length;
    }

    if (params_.deposit == DepositRule::GlobalBest) {
      apply_update(state, state.best, params_, candidate_edges_, full_evaporation);
    } else {
      const Tour elite{ants[iteration_best].perm, ants[iteration_best].length};
      apply_update(state, elite, params_, candidate_edges_, full_evaporation);
    }
    result.stats.update_seconds += seconds_since(t_update);

    result.trace.best_length.push_back(state.best.length);
    result.trace.elapsed_seconds.push_back(seconds_since(t0));
    if (observer) observer->on_iteration(state);
  }

  result.best = std::move(state.best);
  return result;
}

RunResult run_mmas(const DistanceMatrix& d, const FlooredHeatmap* heatmap,
                   const CandidateLists& candidates, const MmasParams& params,
                   RunObserver* observer) {
  MmasEngine engine(d, heatmap, candidates, params);
  return engine.run(observer);
}

ConvergencePlot convergence_transform(const std::vector<std::vector<double>>& traces,
                                      double plot_alpha, double t_mid_fraction) {
  if (traces.empty()) throw std::domain_error("convergence_transform: no traces");
  const std::size_t len = traces.front().size();
  if (len == 0) throw std::domain_error("convergence_transform: empty trace");
  for (const auto& t : traces)
    if (t.size() != len) throw std::domain_error("convergence_transform: trace length mismatch");

  double baseline = traces[0][len - 1];
  for (const auto& t : traces) baseline = std::min(baseline, t[len - 1]);

  const std::size_t mid =
      std::size_t(std::clamp<long long>(std::llround(t_mid_fraction * double(len)), 1,
                                        (long long)len)) - 1;
  std::vector<double> mid_gaps;
  mid_gaps.reserve(traces.size());
  for (const auto& t : traces) mid_gaps.push_back(t[mid] - baseline);
  std::sort(mid_gaps.begin(), mid_gaps.end());
  const std::size_t m = mid_gaps.size();
  const double median = m % 2 == 1 ? mid_gaps[m / 2]
                                   : 0.5 * (mid_gaps[m / 2 - 1] + mid_gaps[m / 2]);

  const double eps = std::max(std::abs(baseline) * 1e-8, 1e-12);
  const double offset = std::max(plot_alpha * median, eps);

  ConvergencePlot plot;
  plot.baseline = baseline;
  plot.offset = offset;
  plot.y.resize(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    plot.y[i].resize(len);
    for (std::size_t t = 0; t < len; ++t)
      plot.y[i][t] = std::log10(traces[i][t] - baseline + offset);
  }
  return plot;
}

}  // namespace heataco
