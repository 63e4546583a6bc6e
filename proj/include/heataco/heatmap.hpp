#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "heataco/instance.hpp"

namespace heataco {

inline constexpr double kDefaultEpsH = 1e-4;
inline constexpr double kDefaultEpsFloor = 1e-9;
inline constexpr int kDefaultCandidateK = 20;

/// Dense edge-confidence matrix in [0,1], zero diagonal. Storage is float32
/// or float64 (dense matrices dominate memory at large n); reads always widen
/// to double so downstream accumulation is 64-bit.
class Heatmap {
 public:
  enum class Storage { F32, F64 };

  Heatmap() = default;
  Heatmap(int n, Storage storage) : n_(n), storage_(storage) {
    if (storage == Storage::F32)
      f32_.assign(std::size_t(n) * n, 0.0f);
    else
      f64_.assign(std::size_t(n) * n, 0.0);
  }

  static Heatmap uniform(int n, double value, Storage storage = Storage::F64) {
    Heatmap h(n, storage);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) h.set(i, j, value);
    return h;
  }

  int size() const { return n_; }
  Storage storage() const { return storage_; }

  double at(int i, int j) const {
    const std::size_t idx = std::size_t(i) * n_ + j;
    return storage_ == Storage::F32 ? double(f32_[idx]) : f64_[idx];
  }

  void set(int i, int j, double value) {
    const std::size_t idx = std::size_t(i) * n_ + j;
    if (storage_ == Storage::F32)
      f32_[idx] = static_cast<float>(value);
    else
      f64_[idx] = value;
  }

  std::size_t memory_bytes() const {
    return f32_.capacity() * sizeof(float) + f64_.capacity() * sizeof(double);
  }

 private:
  int n_ = 0;
  Storage storage_ = Storage::F64;
  std::vector<float> f32_;
  std::vector<double> f64_;
};

/// Heatmap after the clip-and-floor transform: every entry is either kept
/// verbatim (>= threshold) or replaced by the floor value.
class FlooredHeatmap {
 public:
  FlooredHeatmap() = default;

  int size() const { return h_.size(); }
  double at(int i, int j) const { return h_.at(i, j); }
  double threshold() const { return eps_h_; }
  /// Floor value as actually stored (for float32 storage this is the
  /// nearest representable value of the requested floor).
  double floor_value() const { return floor_; }
  std::size_t memory_bytes() const { return h_.memory_bytes(); }

 private:
  friend FlooredHeatmap clip_floor(Heatmap h, double eps_h, double eps_floor);
  Heatmap h_;
  double eps_h_ = kDefaultEpsH;
  double floor_ = kDefaultEpsFloor;
};

/// Dense binary format: "HMAP", version 1, uint32 little-endian n, then
/// n*n float32 row-major. Sparse text format: "n=<count>" header then
/// "i j h" triplets.
Heatmap load_heatmap(const std::string& path, int expected_n);
Heatmap read_dense_heatmap(std::istream& in, int expected_n);
Heatmap read_sparse_heatmap(std::istream& in, int expected_n);
void write_dense_heatmap(std::ostream& out, const Heatmap& h);

/// Elementwise (H + H^T) / 2. Idempotent.
Heatmap symmetrized(const Heatmap& h);

/// Entries >= eps_h are kept verbatim, everything else becomes eps_floor.
/// Requires 0 < eps_floor < eps_h < 1. Takes the heatmap by value: callers
/// that no longer need the raw map can move it in and avoid a second dense
/// allocation.
FlooredHeatmap clip_floor(Heatmap h, double eps_h = kDefaultEpsH,
                          double eps_floor = kDefaultEpsFloor);

enum class CandidateSource : std::uint8_t { Heatmap = 0, KnnFill = 1 };

/// Fixed-size per-node neighbor lists: heatmap-ranked entries first
/// (descending confidence, ties by distance then index), then nearest
/// neighbors by distance up to min(k, n-1).
class CandidateLists {
 public:
  CandidateLists() = default;
  CandidateLists(int n, int requested_k, int list_size)
      : n_(n),
        requested_k_(requested_k),
        list_size_(list_size),
        neighbors_(std::size_t(n) * list_size),
        sources_(std::size_t(n) * list_size, CandidateSource::KnnFill),
        heatmap_counts_(n, 0) {}

  int size() const { return n_; }
  int requested_k() const { return requested_k_; }
  int list_size() const { return list_size_; }

  std::span<const std::int32_t> neighbors(int i) const {
    return {neighbors_.data() + std::size_t(i) * list_size_, std::size_t(list_size_)};
  }
  std::span<const CandidateSource> sources(int i) const {
    return {sources_.data() + std::size_t(i) * list_size_, std::size_t(list_size_)};
  }
  int heatmap_count(int i) const { return heatmap_counts_[i]; }

  std::int32_t* mutable_neighbors(int i) {
    return neighbors_.data() + std::size_t(i) * list_size_;
  }
  CandidateSource* mutable_sources(int i) {
    return sources_.data() + std::size_t(i) * list_size_;
  }
  void set_heatmap_count(int i, int count) { heatmap_counts_[i] = count; }

  std::size_t memory_bytes() const {
    return neighbors_.capacity() * sizeof(std::int32_t) +
           sources_.capacity() * sizeof(CandidateSource) +
           heatmap_counts_.capacity() * sizeof(int);
  }

 private:
  int n_ = 0;
  int requested_k_ = 0;
  int list_size_ = 0;
  std::vector<std::int32_t> neighbors_;
  std::vector<CandidateSource> sources_;
  std::vector<int> heatmap_counts_;
};

CandidateLists build_candidate_lists(const FlooredHeatmap& h, const DistanceMatrix& d,
                                     int k = kDefaultCandidateK);

/// Pure nearest-neighbor lists (what build_candidate_lists degenerates to
/// when no entry clears the threshold).
CandidateLists knn_candidate_lists(const DistanceMatrix& d, int k = kDefaultCandidateK);

/// Undirected edge with i < j.
struct Edge {
  std::int32_t i = 0;
  std::int32_t j = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Raw thresholded diagnostics graph { (i,j) : i<j, h[i][j] >= eps_h };
/// per-node caps are not applied here. Result is sorted.
std::vector<Edge> thresholded_edge_set(const Heatmap& h, double eps_h);

/// Union over nodes of each node's k highest-confidence neighbors,
/// deduplicated as undirected edges. Requires 1 <= k <= n-1.
std::vector<Edge> topk_edge_set(const Heatmap& h, int k);

/// Geometric analogue of topk_edge_set: k nearest neighbors by distance.
std::vector<Edge> knn_edge_set(const DistanceMatrix& d, int k);

/// The n undirected edges of a closed tour, sorted.
std::vector<Edge> tour_edge_set(std::span<const int> perm);

}  // namespace heataco
