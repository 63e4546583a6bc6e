#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "heataco/instance.hpp"
#include "heataco/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace heataco;
using testsupport::random_instance;

namespace {

const char* kMinimalTsplib =
    "NAME : tiny\n"
    "TYPE : TSP\n"
    "DIMENSION : 3\n"
    "EDGE_WEIGHT_TYPE : EUC_2D\n"
    "NODE_COORD_SECTION\n"
    "1 0 0\n"
    "2 3 0\n"
    "3 0 4\n"
    "EOF\n";

}  // namespace

TEST_CASE("parse_tsplib reads the minimal EUC_2D file") {
  std::istringstream in(kMinimalTsplib);
  const TspInstance inst = parse_tsplib(in);
  CHECK(inst.n == 3);
  CHECK(inst.mode == DistanceMode::TsplibEuc2dRounded);
  CHECK(inst.name == "tiny");
  CHECK(inst.coords[2].y == doctest::Approx(4.0));
}

TEST_CASE("parse_tsplib rejects a dimension/coordinate mismatch") {
  std::istringstream in(
      "DIMENSION : 5\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n"
      "1 0 0\n2 1 0\n3 0 1\n4 1 1\nEOF\n");
  CHECK_THROWS_AS(parse_tsplib(in), ParseError);
}

TEST_CASE("parse_tsplib rejects unsupported edge weight types") {
  std::istringstream in("DIMENSION : 3\nEDGE_WEIGHT_TYPE : GEO\nNODE_COORD_SECTION\n");
  CHECK_THROWS_WITH_AS(parse_tsplib(in),
                       doctest::Contains("unsupported distance type"), ParseError);
}

TEST_CASE("parse_tsplib reports the line of a malformed token") {
  std::istringstream in(
      "DIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n"
      "1 0 0\n2 1 zzz\n3 0 1\nEOF\n");
  try {
    parse_tsplib(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
}

TEST_CASE("parse_coords handles the unit square and rejects tiny streams") {
  std::istringstream square("0 0\n1 0\n1 1\n0 1\n");
  const TspInstance inst = parse_coords(square);
  CHECK(inst.n == 4);
  CHECK(inst.mode == DistanceMode::EuclideanExact);

  std::istringstream empty("");
  CHECK_THROWS_WITH_AS(parse_coords(empty), doctest::Contains("instance too small"), ParseError);

  std::istringstream two("0 0\n1 1\n");
  CHECK_THROWS_AS(parse_coords(two), ParseError);
}

TEST_CASE("parse_coords round-trips a generated 500-node instance") {
  const TspInstance generated = random_instance(500, 7);
  std::ostringstream text;
  for (const Point& p : generated.coords) {
    char line[80];
    std::snprintf(line, sizeof(line), "%.17g %.17g\n", p.x, p.y);
    text << line;
  }
  std::istringstream in(text.str());
  const TspInstance parsed = parse_coords(in);
  REQUIRE(parsed.n == 500);
  for (int i = 0; i < parsed.n; ++i) {
    CHECK(parsed.coords[i].x == generated.coords[i].x);
    CHECK(parsed.coords[i].y == generated.coords[i].y);
  }
}

TEST_CASE("compute_distance_matrix: 3-4-5 triangle") {
  TspInstance inst;
  inst.n = 3;
  inst.coords = {{0, 0}, {3, 0}, {0, 4}};
  const DistanceMatrix d = compute_distance_matrix(inst);
  CHECK(d(0, 1) == doctest::Approx(3.0));
  CHECK(d(0, 2) == doctest::Approx(4.0));
  CHECK(d(1, 2) == doctest::Approx(5.0));
  CHECK(d(1, 0) == d(0, 1));
  CHECK(d(0, 0) == 0.0);
}

TEST_CASE("compute_distance_matrix rounds to nearest integer in TSPLIB mode") {
  TspInstance inst;
  inst.n = 3;
  inst.coords = {{0, 0}, {1.4, 0}, {0, 10}};
  inst.mode = DistanceMode::TsplibEuc2dRounded;
  const DistanceMatrix d = compute_distance_matrix(inst);
  CHECK(d(0, 1) == 1.0);
  CHECK(d(0, 2) == 10.0);

  inst.coords[1] = {1.5, 0};  // exact halves round up under nint
  const DistanceMatrix d2 = compute_distance_matrix(inst);
  CHECK(d2(0, 1) == 2.0);
}

TEST_CASE("tour_length: unit square perimeter and wraparound") {
  TspInstance inst;
  inst.n = 4;
  inst.coords = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const DistanceMatrix d = compute_distance_matrix(inst);
  const std::vector<int> perim{0, 1, 2, 3};
  CHECK(tour_length(perim, d) == doctest::Approx(4.0));
}

TEST_CASE("tour_length matches the reversed-order summation oracle") {
  const TspInstance inst = random_instance(7, 21);
  const DistanceMatrix d = compute_distance_matrix(inst);
  std::vector<int> perm{3, 1, 6, 0, 2, 5, 4};
  const double len = tour_length(perm, d);
  CHECK(len == doctest::Approx(oracle::cycle_length_reversed(perm, d)).epsilon(1e-12));
}

TEST_CASE("tour_length is invariant under rotation and reversal") {
  const TspInstance inst = random_instance(9, 5);
  const DistanceMatrix d = compute_distance_matrix(inst);
  Rng rng(99);
  std::vector<int> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  for (int round = 0; round < 20; ++round) {
    for (int i = 8; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    const double len = tour_length(perm, d);

    std::vector<int> rotated(perm.begin() + 3, perm.end());
    rotated.insert(rotated.end(), perm.begin(), perm.begin() + 3);
    CHECK(tour_length(rotated, d) == doctest::Approx(len).epsilon(1e-12));

    std::vector<int> reversed(perm.rbegin(), perm.rend());
    CHECK(tour_length(reversed, d) == doctest::Approx(len).epsilon(1e-12));
  }
}

TEST_CASE("tour_length rejects non-permutations") {
  const TspInstance inst = random_instance(5, 1);
  const DistanceMatrix d = compute_distance_matrix(inst);
  const std::vector<int> bad{0, 1, 1, 3, 4};
  CHECK_THROWS_AS(tour_length(bad, d), std::invalid_argument);
}

TEST_CASE("distance matrix is symmetric and satisfies the triangle inequality") {
  const TspInstance inst = random_instance(40, 77);
  const DistanceMatrix d = compute_distance_matrix(inst);
  for (int i = 0; i < inst.n; ++i) {
    CHECK(d(i, i) == 0.0);
    for (int j = 0; j < inst.n; ++j) {
      CHECK(d(i, j) == d(j, i));
      for (int k = 0; k < inst.n; k += 7)
        CHECK(d(i, j) <= d(i, k) + d(k, j) + 1e-12);
    }
  }
}

TEST_CASE("validate_tour names the first violation") {
  CHECK(!validate_tour(std::vector<int>{0, 1, 2, 3}, 4));
  const auto dup = validate_tour(std::vector<int>{0, 1, 1, 3}, 4);
  REQUIRE(dup.has_value());
  CHECK(*dup == "duplicate 1 / missing 2");
  const auto short_perm = validate_tour(std::vector<int>{0, 1, 2}, 4);
  REQUIRE(short_perm.has_value());
  CHECK(short_perm->find("length mismatch") != std::string::npos);
  const auto range = validate_tour(std::vector<int>{0, 1, 2, 7}, 4);
  REQUIRE(range.has_value());
  CHECK(range->find("out of range") != std::string::npos);
}

TEST_CASE("validate_tour accepts exactly the permutations (fuzz)") {
  Rng rng(4242);
  for (int round = 0; round < 200; ++round) {
    const int n = 3 + int(rng.below(12));
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    CHECK(!validate_tour(perm, n));

    std::vector<int> corrupted = perm;
    corrupted[rng.below(n)] = corrupted[rng.below(n)];
    const bool still_perm = [&] {
      std::vector<int> sorted = corrupted;
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < n; ++i)
        if (sorted[i] != i) return false;
      return true;
    }();
    CHECK(validate_tour(corrupted, n).has_value() != still_perm);
  }
}

TEST_CASE("optimality_gap formula and edge cases") {
  CHECK(optimality_gap(20.62, 16.55) == doctest::Approx(24.59).epsilon(1e-3));
  CHECK(optimality_gap(16.55, 16.55) == 0.0);
  CHECK(optimality_gap(33.10, 16.55) == doctest::Approx(100.0));
  CHECK(optimality_gap(16.0, 16.55) < 0.0);  // negative gaps pass through
  CHECK_THROWS_AS(optimality_gap(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(optimality_gap(1.0, -2.0), std::domain_error);

  double prev = optimality_gap(10.0, 10.0);
  for (double len = 10.5; len < 15.0; len += 0.5) {
    const double gap = optimality_gap(len, 10.0);
    CHECK(gap > prev);
    prev = gap;
  }
}

TEST_CASE("reference tour files round-trip with an L_star header") {
  std::istringstream in("# L_star=50778\n0 3 1\n2\n");
  const ReferenceTour ref = parse_reference_tour(in);
  REQUIRE(ref.reference_length.has_value());
  CHECK(*ref.reference_length == doctest::Approx(50778.0));
  CHECK(ref.perm == std::vector<int>{0, 3, 1, 2});

  std::istringstream plain("0 1 2 3\n");
  const ReferenceTour bare = parse_reference_tour(plain);
  CHECK(!bare.reference_length.has_value());
  CHECK(bare.perm.size() == 4);
}

TEST_CASE("TSPLIB tour files parse as 1-indexed TOUR_SECTION lists") {
  std::istringstream in(
      "NAME : tiny.opt.tour\nTYPE : TOUR\nDIMENSION : 4\nTOUR_SECTION\n"
      "1\n3\n2\n4\n-1\nEOF\n");
  const ReferenceTour ref = parse_reference_tour(in);
  CHECK(ref.perm == std::vector<int>{0, 2, 1, 3});
  CHECK(!ref.reference_length.has_value());

  std::istringstream zero("TOUR_SECTION\n0 1 2\n-1\n");
  CHECK_THROWS_WITH_AS(parse_reference_tour(zero), doctest::Contains("1-indexed"), ParseError);
}

TEST_CASE("write_tour emits a file parse_reference_tour reads back") {
  const TspInstance inst = random_instance(20, 3);
  const DistanceMatrix d = compute_distance_matrix(inst);
  std::vector<int> perm(20);
  std::iota(perm.begin(), perm.end(), 0);
  const Tour tour = make_tour(perm, d);

  std::ostringstream out;
  write_tour(out, tour, 123.5);
  std::istringstream in(out.str());
  const ReferenceTour ref = parse_reference_tour(in);
  CHECK(ref.perm == tour.perm);
  CHECK(*ref.reference_length == doctest::Approx(123.5));
}

TEST_CASE("load_instance sniffs both formats") {
  const std::string tsplib_path = testsupport::write_temp_file("sniff.tsp", kMinimalTsplib);
  const TspInstance a = load_instance(tsplib_path);
  CHECK(a.mode == DistanceMode::TsplibEuc2dRounded);

  const std::string coords_path =
      testsupport::write_temp_file("sniff.txt", "0 0\n1 0\n0 1\n");
  const TspInstance b = load_instance(coords_path);
  CHECK(b.mode == DistanceMode::EuclideanExact);
  CHECK_THROWS_AS(load_instance("/nonexistent/path.tsp"), ParseError);
}
