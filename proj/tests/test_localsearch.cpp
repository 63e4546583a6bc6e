#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>

#include "heataco/localsearch.hpp"
#include "heataco/mmas.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace heataco;
using testsupport::random_instance;

namespace {

CandidateLists full_candidates(const DistanceMatrix& d) {
  return knn_candidate_lists(d, d.size() - 1);
}

Tour random_tour(const DistanceMatrix& d, std::uint64_t seed) {
  std::vector<int> perm(d.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (int i = int(perm.size()) - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  return make_tour(std::move(perm), d);
}

}  // namespace

TEST_CASE("two_opt uncrosses the square") {
  TspInstance inst;
  inst.n = 4;
  inst.coords = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const DistanceMatrix d = compute_distance_matrix(inst);
  const Tour crossing = make_tour({0, 2, 1, 3}, d);
  CHECK(crossing.length == doctest::Approx(2.0 + 2.0 * std::sqrt(2.0)));

  const Tour fixed = two_opt(crossing, d, full_candidates(d));
  CHECK(fixed.length == doctest::Approx(4.0));
  CHECK(!validate_tour(fixed.perm, 4));
}

TEST_CASE("two_opt returns an already-optimal tour unchanged") {
  const TspInstance inst = random_instance(8, 17);
  const DistanceMatrix d = compute_distance_matrix(inst);
  const Tour optimum = oracle::brute_force_optimum(d);
  const Tour improved = two_opt(optimum, d, full_candidates(d));
  CHECK(improved.perm == optimum.perm);
  CHECK(improved.length == doctest::Approx(optimum.length));
}

TEST_CASE("two_opt reaches a candidate-restricted fixed point") {
  for (const std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    const TspInstance inst = random_instance(8, seed);
    const DistanceMatrix d = compute_distance_matrix(inst);
    const CandidateLists cand = full_candidates(d);
    const Tour start = random_tour(d, seed * 11);
    const Tour improved = two_opt(start, d, cand);
    CHECK(improved.length <= start.length + 1e-12);
    CHECK(!validate_tour(improved.perm, 8));
    CHECK(!oracle::has_improving_two_opt(improved.perm, d, cand, 1e-9));
  }
}

TEST_CASE("two_opt fixed point also holds with sparse candidate lists") {
  for (const std::uint64_t seed : {10ull, 20ull, 30ull}) {
    const TspInstance inst = random_instance(12, seed);
    const DistanceMatrix d = compute_distance_matrix(inst);
    const CandidateLists cand = knn_candidate_lists(d, 4);
    const Tour improved = two_opt(random_tour(d, seed), d, cand);
    CHECK(!oracle::has_improving_two_opt(improved.perm, d, cand, 1e-9));
  }
}

TEST_CASE("two_opt best-improvement strategy reaches a fixed point too") {
  const TspInstance inst = random_instance(10, 55);
  const DistanceMatrix d = compute_distance_matrix(inst);
  const CandidateLists cand = full_candidates(d);
  LsParams params;
  params.strategy = MoveStrategy::BestImprovement;
  const Tour improved = two_opt(random_tour(d, 3), d, cand, params);
  CHECK(!oracle::has_improving_two_opt(improved.perm, d, cand, 1e-9));
}

TEST_CASE("three_opt leaves a fully 3-opt-optimal tour unchanged") {
  const TspInstance inst = random_instance(6, 23);
  const DistanceMatrix d = compute_distance_matrix(inst);
  const Tour optimum = oracle::brute_force_optimum(d);
  REQUIRE(oracle::best_three_opt_gain_full(optimum.perm, d) <= 1e-12);

  const Tour improved = three_opt(optimum, d, full_candidates(d));
  CHECK(improved.perm == optimum.perm);
}

TEST_CASE("three_opt on n=3 is the identity") {
  const TspInstance inst = random_instance(3, 2);
  const DistanceMatrix d = compute_distance_matrix(inst);
  const Tour tour = make_tour({0, 1, 2}, d);
  const Tour improved = three_opt(tour, d, full_candidates(d));
  CHECK(improved.perm == tour.perm);
}

TEST_CASE("three_opt from 20 random starts usually finds the optimum on n=9") {
  const TspInstance inst = random_instance(9, 41);
  const DistanceMatrix d = compute_distance_matrix(inst);
  const CandidateLists cand = full_candidates(d);
  const Tour optimum = oracle::brute_force_optimum(d);

  int hits = 0;
  for (int start = 0; start < 20; ++start) {
    const Tour improved = three_opt(random_tour(d, 100 + start), d, cand);
    CHECK(!validate_tour(improved.perm, 9));
    if (improved.length <= optimum.length * (1.0 + 1e-9)) ++hits;
  }
  CHECK(hits >= 18);
}

TEST_CASE("three_opt fixed points survive the exhaustive reconnection scan") {
  // With full candidate lists the combined 2-opt + 3-opt descent must end in
  // a state where no reconnection of any three removed edges improves.
  for (const std::uint64_t seed : {31ull, 32ull, 33ull, 34ull}) {
    const TspInstance inst = random_instance(8, seed);
    const DistanceMatrix d = compute_distance_matrix(inst);
    const Tour improved = three_opt(random_tour(d, seed + 7), d, full_candidates(d));
    CHECK(oracle::best_three_opt_gain_full(improved.perm, d) <= 1e-9);
  }
}

TEST_CASE("three_opt never ends above the two_opt result for the same input") {
  for (const std::uint64_t seed : {6ull, 7ull, 8ull, 9ull}) {
    const TspInstance inst = random_instance(14, seed);
    const DistanceMatrix d = compute_distance_matrix(inst);
    const CandidateLists cand = knn_candidate_lists(d, 6);
    const Tour start = random_tour(d, seed + 99);
    const Tour via2 = two_opt(start, d, cand);
    const Tour via3 = three_opt(start, d, cand);
    CHECK(via3.length <= via2.length + 1e-9);
    CHECK(!validate_tour(via3.perm, 14));
  }
}

TEST_CASE("improvement is monotone and cached lengths stay consistent") {
  const TspInstance inst = random_instance(16, 3);
  const DistanceMatrix d = compute_distance_matrix(inst);
  const CandidateLists cand = knn_candidate_lists(d, 5);
  const Tour start = random_tour(d, 12);
  const Tour improved = three_opt(start, d, cand);
  CHECK(improved.length <= start.length);
  CHECK(improved.length == doctest::Approx(tour_length(improved.perm, d)).epsilon(1e-9));
}

TEST_CASE("pass caps bound the work without breaking feasibility") {
  const TspInstance inst = random_instance(20, 9);
  const DistanceMatrix d = compute_distance_matrix(inst);
  const CandidateLists cand = knn_candidate_lists(d, 8);
  LsParams tight;
  tight.max_passes_2opt = 1;
  tight.max_passes_3opt = 1;
  const Tour improved = three_opt(random_tour(d, 5), d, cand, tight);
  CHECK(!validate_tour(improved.perm, 20));
  CHECK(improved.length == doctest::Approx(tour_length(improved.perm, d)).epsilon(1e-9));
}
