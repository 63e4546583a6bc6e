#include "heataco/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heataco {

namespace {

constexpr double kMinDistance = 1e-12;

// Union-find over nodes; tracks path fragments while edges are inserted.
class Fragments {
 public:
  explicit Fragments(int n) : parent_(n), degree_(n, 0) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool can_insert(int i, int j, bool closing) {
    if (degree_[i] >= 2 || degree_[j] >= 2) return false;
    const bool same = find(i) == find(j);
    return closing ? same : !same;
  }

  void insert(int i, int j) {
    parent_[find(i)] = find(j);
    ++degree_[i];
    ++degree_[j];
  }

  int degree(int i) const { return degree_[i]; }

 private:
  std::vector<int> parent_;
  std::vector<int> degree_;
};

}  // namespace

double greedy_score(double confidence, double distance) {
  return confidence / std::max(distance, kMinDistance);
}

Tour greedy_merge_stream(std::span<const ScoredEdge> sorted_edges, const DistanceMatrix& d) {
  const int n = d.size();
  if (n < 3) throw std::invalid_argument("greedy_merge: need at least 3 nodes");

  Fragments frag(n);
  std::vector<std::array<int, 2>> adjacent(n, {-1, -1});
  const auto link = [&](int a, int b) {
    adjacent[a][adjacent[a][0] < 0 ? 0 : 1] = b;
    adjacent[b][adjacent[b][0] < 0 ? 0 : 1] = a;
    frag.insert(a, b);
  };

  int inserted = 0;
  for (const ScoredEdge& e : sorted_edges) {
    if (inserted == n) break;
    const bool closing = inserted == n - 1;
    if (!frag.can_insert(e.i, e.j, closing)) continue;
    link(e.i, e.j);
    ++inserted;
  }

  // Stream exhausted with open fragments: join endpoints nearest-first,
  // then close the cycle.
  while (inserted < n) {
    int from = -1;
    for (int i = 0; i < n && from < 0; ++i)
      if (frag.degree(i) < 2) from = i;
    int to = -1;
    double best = 0.0;
    const bool closing = inserted == n - 1;
    for (int j = 0; j < n; ++j) {
      if (j == from || frag.degree(j) >= 2) continue;
      if (!frag.can_insert(from, j, closing)) continue;
      if (to < 0 || d(from, j) < best) {
        to = j;
        best = d(from, j);
      }
    }
    link(from, to);
    ++inserted;
  }

  Tour tour;
  tour.perm.reserve(n);
  int prev = -1, cur = 0;
  for (int step = 0; step < n; ++step) {
    tour.perm.push_back(cur);
    const int next = adjacent[cur][0] == prev ? adjacent[cur][1] : adjacent[cur][0];
    prev = cur;
    cur = next;
  }
  tour.length = tour_length(tour.perm, d);
  return tour;
}

Tour greedy_merge(const Heatmap& h, const DistanceMatrix& d) {
  const int n = d.size();
  if (h.size() != n) throw std::invalid_argument("greedy_merge: size mismatch");
  if (n < 3) throw std::invalid_argument("greedy_merge: need at least 3 nodes");

  std::vector<ScoredEdge> edges;
  edges.reserve(std::size_t(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      edges.push_back({greedy_score(h.at(i, j), d(i, j)), i, j});

  // Descending score; ties by shorter distance, then lexicographic (i,j),
  // so runs are reproducible.
  std::sort(edges.begin(), edges.end(), [&](const ScoredEdge& a, const ScoredEdge& b) {
    if (a.score != b.score) return a.score > b.score;
    if (d(a.i, a.j) != d(b.i, b.j)) return d(a.i, a.j) < d(b.i, b.j);
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  return greedy_merge_stream(edges, d);
}

}  // namespace heataco
