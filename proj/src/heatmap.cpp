#include "heataco/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace heataco {

namespace {

constexpr char kMagic[4] = {'H', 'M', 'A', 'P'};

void check_entry(double v, int i, int j) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream msg;
    msg << "heatmap entry (" << i << "," << j << ") = " << v << " outside [0,1]";
    throw ParseError(msg.str());
  }
}

std::uint32_t read_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw ParseError("truncated heatmap header");
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

}  // namespace

Heatmap read_dense_heatmap(std::istream& in, int expected_n) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError("bad heatmap magic, expected HMAP");
  char version = 0;
  in.read(&version, 1);
  if (!in || version != 1)
    throw ParseError("unsupported heatmap version " + std::to_string(int(version)));
  const std::uint32_t n = read_u32_le(in);
  if (expected_n > 0 && int(n) != expected_n)
    throw ParseError("heatmap is for n=" + std::to_string(n) + " but expected n=" +
                     std::to_string(expected_n));

  // The file carries float32, so float32 storage holds it verbatim.
  Heatmap h(int(n), Heatmap::Storage::F32);
  std::vector<float> row(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    in.read(reinterpret_cast<char*>(row.data()), std::streamsize(n) * 4);
    if (!in) throw ParseError("truncated heatmap payload at row " + std::to_string(i));
    for (std::uint32_t j = 0; j < n; ++j) {
      if (i == j) continue;  // self-loop confidence is noise; drop it
      check_entry(row[j], int(i), int(j));
      h.set(int(i), int(j), row[j]);
    }
  }
  return h;
}

Heatmap read_sparse_heatmap(std::istream& in, int expected_n) {
  std::string line;
  int line_no = 0;
  int n = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (line.rfind("n=", 0) != 0)
      throw ParseError("sparse heatmap must start with 'n=<count>'", line_no);
    try {
      n = std::stoi(line.substr(2));
    } catch (const std::exception&) {
      throw ParseError("malformed count '" + line.substr(2) + "'", line_no);
    }
    break;
  }
  if (n <= 0) throw ParseError("sparse heatmap missing 'n=<count>' header");
  if (expected_n > 0 && n != expected_n)
    throw ParseError("heatmap is for n=" + std::to_string(n) + " but expected n=" +
                     std::to_string(expected_n));

  Heatmap h(n, Heatmap::Storage::F64);
  std::unordered_set<std::uint64_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ls(line);
    long long i = -1, j = -1;
    double v = 0.0;
    if (!(ls >> i >> j >> v))
      throw ParseError("expected 'i j h' triplet", line_no);
    std::string extra;
    if (ls >> extra) throw ParseError("trailing token '" + extra + "'", line_no);
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw ParseError("node index out of range", line_no);
    if (i == j) throw ParseError("self-loop triplet (i == j)", line_no);
    check_entry(v, int(i), int(j));
    if (!seen.insert(std::uint64_t(i) * std::uint64_t(n) + std::uint64_t(j)).second)
      throw ParseError("duplicate triplet (" + std::to_string(i) + "," + std::to_string(j) + ")",
                       line_no);
    h.set(int(i), int(j), v);
  }

  // Directions are combined by max here; averaging (symmetrized) is applied
  // by the caller and is a no-op on the already-symmetric result.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double m = std::max(h.at(i, j), h.at(j, i));
      h.set(i, j, m);
      h.set(j, i, m);
    }
  }
  return h;
}

Heatmap load_heatmap(const std::string& path, int expected_n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open heatmap file: " + path);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.clear();
  in.seekg(0);
  if (std::memcmp(magic, kMagic, 4) == 0) return read_dense_heatmap(in, expected_n);
  return read_sparse_heatmap(in, expected_n);
}

void write_dense_heatmap(std::ostream& out, const Heatmap& h) {
  out.write(kMagic, 4);
  const char version = 1;
  out.write(&version, 1);
  const std::uint32_t n = std::uint32_t(h.size());
  unsigned char b[4] = {static_cast<unsigned char>(n & 0xff),
                        static_cast<unsigned char>((n >> 8) & 0xff),
                        static_cast<unsigned char>((n >> 16) & 0xff),
                        static_cast<unsigned char>((n >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
  std::vector<float> row(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) row[j] = float(h.at(int(i), int(j)));
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(n) * 4);
  }
}

Heatmap symmetrized(const Heatmap& h) {
  const int n = h.size();
  Heatmap out(n, h.storage());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (h.at(i, j) + h.at(j, i));
      out.set(i, j, avg);
      out.set(j, i, avg);
    }
  }
  return out;
}

FlooredHeatmap clip_floor(Heatmap h, double eps_h, double eps_floor) {
  if (!(0.0 < eps_floor && eps_floor < eps_h && eps_h < 1.0))
    throw std::domain_error("clip_floor: need 0 < eps_floor < eps_h < 1");
  const int n = h.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && h.at(i, j) < eps_h) h.set(i, j, eps_floor);

  FlooredHeatmap out;
  out.eps_h_ = eps_h;
  out.floor_ = h.storage() == Heatmap::Storage::F32 ? double(float(eps_floor)) : eps_floor;
  out.h_ = std::move(h);
  return out;
}

namespace {

struct RankedNeighbor {
  double confidence;
  double distance;
  std::int32_t node;
};

// Puts the `count` smallest elements (under a total order) sorted at the
// front; avoids full row sorts when only a short prefix is consumed.
template <typename Cmp>
void select_sorted_prefix(std::vector<std::int32_t>& v, std::size_t count, Cmp cmp) {
  if (count < v.size()) std::nth_element(v.begin(), v.begin() + count, v.end(), cmp);
  std::sort(v.begin(), v.begin() + std::min(count, v.size()), cmp);
}

}  // namespace

CandidateLists build_candidate_lists(const FlooredHeatmap& h, const DistanceMatrix& d, int k) {
  const int n = d.size();
  if (h.size() != n) throw std::invalid_argument("candidate lists: size mismatch");
  if (k < 1) throw std::invalid_argument("candidate lists: k must be >= 1");
  const int list_size = std::min(k, n - 1);
  CandidateLists lists(n, k, list_size);

  std::vector<RankedNeighbor> tagged;
  std::vector<std::int32_t> by_distance;
  by_distance.reserve(n);
  std::vector<std::uint8_t> taken(n);

  for (int i = 0; i < n; ++i) {
    tagged.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double c = h.at(i, j);
      if (c >= h.threshold()) tagged.push_back({c, d(i, j), j});
    }
    std::sort(tagged.begin(), tagged.end(), [](const RankedNeighbor& a, const RankedNeighbor& b) {
      if (a.confidence != b.confidence) return a.confidence > b.confidence;
      if (a.distance != b.distance) return a.distance < b.distance;
      return a.node < b.node;
    });

    std::fill(taken.begin(), taken.end(), 0);
    auto* neighbors = lists.mutable_neighbors(i);
    auto* sources = lists.mutable_sources(i);
    int count = 0;
    for (const auto& cand : tagged) {
      if (count == list_size) break;
      neighbors[count] = cand.node;
      sources[count] = CandidateSource::Heatmap;
      taken[cand.node] = 1;
      ++count;
    }
    lists.set_heatmap_count(i, count);

    if (count < list_size) {
      by_distance.clear();
      for (std::int32_t j = 0; j < n; ++j)
        if (j != i && !taken[j]) by_distance.push_back(j);
      select_sorted_prefix(by_distance, std::size_t(list_size - count),
                           [&](std::int32_t a, std::int32_t b) {
                             if (d(i, a) != d(i, b)) return d(i, a) < d(i, b);
                             return a < b;
                           });
      for (std::int32_t s = 0; count < list_size; ++s) {
        neighbors[count] = by_distance[s];
        sources[count] = CandidateSource::KnnFill;
        ++count;
      }
    }
  }
  return lists;
}

CandidateLists knn_candidate_lists(const DistanceMatrix& d, int k) {
  const int n = d.size();
  if (k < 1) throw std::invalid_argument("candidate lists: k must be >= 1");
  const int list_size = std::min(k, n - 1);
  CandidateLists lists(n, k, list_size);

  std::vector<std::int32_t> by_distance;
  by_distance.reserve(n);
  for (int i = 0; i < n; ++i) {
    by_distance.clear();
    for (std::int32_t j = 0; j < n; ++j)
      if (j != i) by_distance.push_back(j);
    select_sorted_prefix(by_distance, std::size_t(list_size),
                         [&](std::int32_t a, std::int32_t b) {
                           if (d(i, a) != d(i, b)) return d(i, a) < d(i, b);
                           return a < b;
                         });
    auto* neighbors = lists.mutable_neighbors(i);
    for (int s = 0; s < list_size; ++s) neighbors[s] = by_distance[s];
    lists.set_heatmap_count(i, 0);
  }
  return lists;
}

std::vector<Edge> thresholded_edge_set(const Heatmap& h, double eps_h) {
  std::vector<Edge> edges;
  const int n = h.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (h.at(i, j) >= eps_h) edges.push_back({i, j});
  return edges;
}

std::vector<Edge> topk_edge_set(const Heatmap& h, int k) {
  const int n = h.size();
  if (k < 1 || k > n - 1) throw std::invalid_argument("topk_edge_set: need 1 <= k <= n-1");
  std::vector<Edge> edges;
  std::vector<std::int32_t> order;
  order.reserve(n);
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (std::int32_t j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    select_sorted_prefix(order, std::size_t(k), [&](std::int32_t a, std::int32_t b) {
      if (h.at(i, a) != h.at(i, b)) return h.at(i, a) > h.at(i, b);
      return a < b;
    });
    for (int s = 0; s < k; ++s)
      edges.push_back({std::min(i, int(order[s])), std::max(i, int(order[s]))});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<Edge> knn_edge_set(const DistanceMatrix& d, int k) {
  const int n = d.size();
  if (k < 1 || k > n - 1) throw std::invalid_argument("knn_edge_set: need 1 <= k <= n-1");
  std::vector<Edge> edges;
  std::vector<std::int32_t> order;
  order.reserve(n);
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (std::int32_t j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    select_sorted_prefix(order, std::size_t(k), [&](std::int32_t a, std::int32_t b) {
      if (d(i, a) != d(i, b)) return d(i, a) < d(i, b);
      return a < b;
    });
    for (int s = 0; s < k; ++s)
      edges.push_back({std::min(i, int(order[s])), std::max(i, int(order[s]))});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<Edge> tour_edge_set(std::span<const int> perm) {
  std::vector<Edge> edges;
  const int n = int(perm.size());
  edges.reserve(n);
  for (int t = 0; t < n; ++t) {
    const int a = perm[t];
    const int b = perm[(t + 1) % n];
    edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace heataco
