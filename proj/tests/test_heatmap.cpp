#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "heataco/heatmap.hpp"
#include "heataco/instance.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace heataco;
using testsupport::random_heatmap;
using testsupport::random_instance;

namespace {

std::string dense_bytes(const Heatmap& h) {
  std::ostringstream out(std::ios::binary);
  write_dense_heatmap(out, h);
  return out.str();
}

}  // namespace

TEST_CASE("dense binary heatmap round-trips with zeroed diagonal") {
  Heatmap h = Heatmap::uniform(4, 0.5, Heatmap::Storage::F32);
  std::istringstream in(dense_bytes(h), std::ios::binary);
  const Heatmap loaded = read_dense_heatmap(in, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(loaded.at(i, j) == (i == j ? 0.0 : 0.5));
}

TEST_CASE("dense binary heatmap zeroes a diagonal the file carries") {
  Heatmap h = Heatmap::uniform(3, 0.25, Heatmap::Storage::F32);
  h.set(1, 1, 0.9);  // self-loop confidence is noise
  std::istringstream in(dense_bytes(h), std::ios::binary);
  const Heatmap loaded = read_dense_heatmap(in, 3);
  CHECK(loaded.at(1, 1) == 0.0);
}

TEST_CASE("dense binary heatmap rejects dimension mismatch and bad entries") {
  Heatmap h = Heatmap::uniform(4, 0.5, Heatmap::Storage::F32);
  {
    std::istringstream in(dense_bytes(h), std::ios::binary);
    CHECK_THROWS_AS(read_dense_heatmap(in, 8), ParseError);
  }
  {
    Heatmap bad = Heatmap::uniform(3, 0.5, Heatmap::Storage::F64);
    bad.set(0, 1, 1.5);
    std::istringstream in(dense_bytes(bad), std::ios::binary);
    CHECK_THROWS_AS(read_dense_heatmap(in, 3), ParseError);
  }
  {
    std::istringstream in(std::string("JUNK"), std::ios::binary);
    CHECK_THROWS_AS(read_dense_heatmap(in, 3), ParseError);
  }
}

TEST_CASE("sparse text heatmap: defaults, max-combining, and format errors") {
  {
    std::istringstream in("n=3\n0 1 0.9\n");
    const Heatmap h = read_sparse_heatmap(in, 3);
    CHECK(h.at(0, 1) == 0.9);
    CHECK(h.at(1, 0) == 0.9);  // directions combined by max on load
    CHECK(h.at(0, 2) == 0.0);
    CHECK(h.at(2, 1) == 0.0);
  }
  {
    std::istringstream in("n=3\n0 1 0.9\n1 0 0.3\n");
    const Heatmap h = read_sparse_heatmap(in, 3);
    CHECK(h.at(0, 1) == 0.9);
    CHECK(h.at(1, 0) == 0.9);
  }
  {
    std::istringstream in("n=500\n0 1 0.5\n");
    CHECK_THROWS_AS(read_sparse_heatmap(in, 1000), ParseError);
  }
  {
    std::istringstream in("n=3\n0 1 0.5\n0 1 0.6\n");
    CHECK_THROWS_WITH_AS(read_sparse_heatmap(in, 3), doctest::Contains("duplicate"), ParseError);
  }
  {
    std::istringstream in("n=3\n1 1 0.5\n");
    CHECK_THROWS_AS(read_sparse_heatmap(in, 3), ParseError);
  }
  {
    std::istringstream in("n=3\n0 1 1.5\n");
    CHECK_THROWS_AS(read_sparse_heatmap(in, 3), ParseError);
  }
}

TEST_CASE("symmetrize averages the two directions") {
  Heatmap h(3, Heatmap::Storage::F64);
  h.set(0, 1, 1.0);
  h.set(1, 0, 0.5);
  const Heatmap s = symmetrized(h);
  CHECK(s.at(0, 1) == 0.75);
  CHECK(s.at(1, 0) == 0.75);
}

TEST_CASE("symmetrize is a bitwise fixed point on symmetric input") {
  Heatmap h = random_heatmap(8, 11);
  const Heatmap once = symmetrized(h);
  const Heatmap twice = symmetrized(once);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      CHECK(once.at(i, j) == twice.at(i, j));
}

TEST_CASE("symmetrize matches the naive elementwise oracle") {
  const Heatmap h = random_heatmap(6, 3);
  const Heatmap s = symmetrized(h);
  const Heatmap expected = oracle::symmetrize_naive(h);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(s.at(i, j) == doctest::Approx(expected.at(i, j)).epsilon(1e-15));
}

TEST_CASE("clip_floor keeps entries at or above the threshold verbatim") {
  Heatmap h(3, Heatmap::Storage::F64);
  h.set(0, 1, 0.3);
  h.set(1, 0, 0.3);
  h.set(0, 2, 5e-5);
  h.set(2, 0, 5e-5);
  h.set(1, 2, 1e-4);  // boundary entry is kept (>= comparison)
  h.set(2, 1, 1e-4);
  const FlooredHeatmap f = clip_floor(std::move(h));
  CHECK(f.at(0, 1) == 0.3);
  CHECK(f.at(0, 2) == 1e-9);
  CHECK(f.at(1, 2) == 1e-4);
  CHECK(f.threshold() == 1e-4);
  CHECK(f.floor_value() == 1e-9);
}

TEST_CASE("clip_floor output partitions into kept and floored values") {
  const Heatmap h = random_heatmap(12, 9, 0.0, 2e-4);
  const FlooredHeatmap f = clip_floor(h);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      if (i == j) continue;
      const double v = f.at(i, j);
      const bool kept = v >= f.threshold();
      const bool floored = v == f.floor_value();
      CHECK(kept != floored);
    }
  }
}

TEST_CASE("clip_floor validates parameter ordering") {
  CHECK_THROWS_AS(clip_floor(Heatmap::uniform(3, 0.5), 1e-9, 1e-4), std::domain_error);
  CHECK_THROWS_AS(clip_floor(Heatmap::uniform(3, 0.5), 0.5, 0.5), std::domain_error);
}

TEST_CASE("candidate lists degenerate to pure KNN on an all-zero heatmap") {
  const TspInstance inst = random_instance(20, 2);
  const DistanceMatrix d = compute_distance_matrix(inst);
  const FlooredHeatmap f = clip_floor(Heatmap(20, Heatmap::Storage::F64));
  const CandidateLists lists = build_candidate_lists(f, d, 5);
  const CandidateLists knn = knn_candidate_lists(d, 5);
  REQUIRE(lists.list_size() == 5);
  for (int i = 0; i < 20; ++i) {
    CHECK(lists.heatmap_count(i) == 0);
    const auto a = lists.neighbors(i);
    const auto b = knn.neighbors(i);
    CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
    for (const auto src : lists.sources(i)) CHECK(src == CandidateSource::KnnFill);
  }
}

TEST_CASE("candidate lists fill up with nearest neighbors after tagged entries") {
  const TspInstance inst = random_instance(30, 4);
  const DistanceMatrix d = compute_distance_matrix(inst);
  Heatmap h(30, Heatmap::Storage::F64);
  // node 0 gets exactly three above-threshold neighbors
  h.set(0, 7, 0.9);
  h.set(7, 0, 0.9);
  h.set(0, 15, 0.5);
  h.set(15, 0, 0.5);
  h.set(0, 22, 0.2);
  h.set(22, 0, 0.2);
  const FlooredHeatmap f = clip_floor(std::move(h));
  const CandidateLists lists = build_candidate_lists(f, d, 20);

  CHECK(lists.heatmap_count(0) == 3);
  const auto neighbors = lists.neighbors(0);
  CHECK(neighbors[0] == 7);
  CHECK(neighbors[1] == 15);
  CHECK(neighbors[2] == 22);
  CHECK(lists.list_size() == 20);
  const auto sources = lists.sources(0);
  for (int s = 3; s < 20; ++s) CHECK(sources[s] == CandidateSource::KnnFill);

  // no duplicates, no self-loops
  std::vector<int> sorted(neighbors.begin(), neighbors.end());
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(std::find(sorted.begin(), sorted.end(), 0) == sorted.end());
}

TEST_CASE("candidate lists match the per-row sort oracle on a random instance") {
  const TspInstance inst = random_instance(12, 31);
  const DistanceMatrix d = compute_distance_matrix(inst);
  const Heatmap h = symmetrized(random_heatmap(12, 5, 0.0, 3e-4));
  const FlooredHeatmap f = clip_floor(h);
  const CandidateLists lists = build_candidate_lists(f, d, 6);
  for (int i = 0; i < 12; ++i) {
    const auto expected = oracle::candidate_row_oracle(f, d, i, 6);
    const auto got = lists.neighbors(i);
    REQUIRE(int(expected.neighbors.size()) == int(got.size()));
    for (std::size_t s = 0; s < expected.neighbors.size(); ++s)
      CHECK(got[s] == expected.neighbors[s]);
    CHECK(lists.heatmap_count(i) == expected.heatmap_count);
  }
}

TEST_CASE("candidate list structural invariants hold on random inputs") {
  const TspInstance inst = random_instance(25, 8);
  const DistanceMatrix d = compute_distance_matrix(inst);
  const FlooredHeatmap f = clip_floor(symmetrized(random_heatmap(25, 13, 0.0, 5e-4)));
  for (const int k : {1, 3, 20, 40}) {
    const CandidateLists lists = build_candidate_lists(f, d, k);
    CHECK(lists.list_size() == std::min(k, 24));
    for (int i = 0; i < 25; ++i) {
      const auto neighbors = lists.neighbors(i);
      const auto sources = lists.sources(i);
      std::vector<int> seen;
      for (int s = 0; s < lists.list_size(); ++s) {
        CHECK(neighbors[s] != i);
        seen.push_back(neighbors[s]);
        if (s > 0 && sources[s - 1] == CandidateSource::KnnFill)
          CHECK(sources[s] == CandidateSource::KnnFill);  // tagged prefix only
        if (sources[s] == CandidateSource::Heatmap)
          CHECK(f.at(i, neighbors[s]) >= f.threshold());
      }
      std::sort(seen.begin(), seen.end());
      CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    }
  }
}

TEST_CASE("thresholded_edge_set basics and oracle equality") {
  CHECK(thresholded_edge_set(Heatmap::uniform(4, 0.5), 1e-4).size() == 6);
  CHECK(thresholded_edge_set(Heatmap::uniform(4, 1e-5), 1e-4).empty());

  const Heatmap h = symmetrized(random_heatmap(15, 77, 0.0, 3e-4));
  const auto got = thresholded_edge_set(h, 1e-4);
  const auto expected = oracle::thresholded_edges_naive(h, 1e-4);
  CHECK(got == expected);
}

TEST_CASE("thresholded_edge_set is antitone in the threshold") {
  const Heatmap h = symmetrized(random_heatmap(20, 6));
  std::size_t prev = thresholded_edge_set(h, 0.0 + 1e-12).size();
  for (const double eps : {0.1, 0.3, 0.5, 0.8, 0.99}) {
    const std::size_t count = thresholded_edge_set(h, eps).size();
    CHECK(count <= prev);
    prev = count;
  }
}

TEST_CASE("topk_edge_set deduplicates mutual pairs and saturates at k=n-1") {
  Heatmap h(4, Heatmap::Storage::F64);
  // 0 and 1 are each other's top-1
  h.set(0, 1, 0.9);
  h.set(1, 0, 0.9);
  h.set(2, 0, 0.4);
  h.set(3, 1, 0.4);
  const auto top1 = topk_edge_set(h, 1);
  CHECK(std::count(top1.begin(), top1.end(), Edge{0, 1}) == 1);
  CHECK(top1.size() == 3);

  const Heatmap r = symmetrized(random_heatmap(7, 12));
  CHECK(topk_edge_set(r, 6).size() == 21);  // complete graph
}

TEST_CASE("topk_edge_set matches the per-row oracle and grows with k") {
  const Heatmap h = symmetrized(random_heatmap(10, 23));
  CHECK(topk_edge_set(h, 3) == oracle::topk_edges_naive(h, 3));
  std::size_t prev = 0;
  for (int k = 1; k <= 9; ++k) {
    const auto edges = topk_edge_set(h, k);
    CHECK(edges.size() >= prev);
    CHECK(edges.size() <= std::size_t(10 * k));
    prev = edges.size();
  }
}

TEST_CASE("load_heatmap dispatches on the magic bytes") {
  Heatmap h = Heatmap::uniform(5, 0.25, Heatmap::Storage::F32);
  const std::string dense = testsupport::write_temp_file("roundtrip.hmap", dense_bytes(h));
  const Heatmap loaded = load_heatmap(dense, 5);
  CHECK(loaded.at(0, 1) == 0.25);

  const std::string sparse = testsupport::write_temp_file("roundtrip.txt", "n=5\n0 1 0.5\n");
  const Heatmap sparse_loaded = load_heatmap(sparse, 5);
  CHECK(sparse_loaded.at(0, 1) == 0.5);
  CHECK_THROWS_AS(load_heatmap("/nonexistent.hmap", 5), ParseError);
}

TEST_CASE("float32 storage keeps the dense file values verbatim") {
  Heatmap h(3, Heatmap::Storage::F32);
  h.set(0, 1, 0.1);  // 0.1f is not exactly 0.1; the loaded value must equal the file's float
  h.set(1, 0, 0.1);
  std::istringstream in(dense_bytes(h), std::ios::binary);
  const Heatmap loaded = read_dense_heatmap(in, 3);
  CHECK(loaded.at(0, 1) == double(0.1f));
  CHECK(loaded.storage() == Heatmap::Storage::F32);
}
