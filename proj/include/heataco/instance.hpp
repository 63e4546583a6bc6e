#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heataco {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// How pairwise distances are derived from coordinates. TSPLIB EUC_2D files
/// use nearest-integer rounding; plain coordinate files use exact distances.
enum class DistanceMode { EuclideanExact, TsplibEuc2dRounded };

struct TspInstance {
  int n = 0;
  std::vector<Point> coords;
  DistanceMode mode = DistanceMode::EuclideanExact;
  std::string name;
};

/// Dense symmetric distance matrix with zero diagonal, in instance units.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(int n) : n_(n), d_(std::size_t(n) * n, 0.0) {}

  int size() const { return n_; }
  double operator()(int i, int j) const { return d_[std::size_t(i) * n_ + j]; }

  void set(int i, int j, double value) {
    d_[std::size_t(i) * n_ + j] = value;
    d_[std::size_t(j) * n_ + i] = value;
  }

  std::size_t memory_bytes() const { return d_.capacity() * sizeof(double); }

 private:
  int n_ = 0;
  std::vector<double> d_;
};

/// A closed tour: permutation of {0,...,n-1} plus its cached cycle length.
struct Tour {
  std::vector<int> perm;
  double length = 0.0;
};

/// Parse failure with the 1-based input line where it was detected
/// (0 when no specific line applies).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) + ")"
                                    : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

/// TSPLIB subset: NAME / DIMENSION / EDGE_WEIGHT_TYPE EUC_2D / NODE_COORD_SECTION.
TspInstance parse_tsplib(std::istream& in, std::string name = {});

/// Plain text, one "x y" pair per nonempty line.
TspInstance parse_coords(std::istream& in, std::string name = {});

/// Loads either supported instance format, sniffing TSPLIB headers.
TspInstance load_instance(const std::string& path);

DistanceMatrix compute_distance_matrix(const TspInstance& inst);

/// Closed-cycle length of perm under D. Throws std::invalid_argument if perm
/// is not a permutation of {0,...,n-1}.
double tour_length(std::span<const int> perm, const DistanceMatrix& d);

/// std::nullopt when perm is a bijection onto {0,...,n-1}; otherwise a
/// description naming the first violation.
std::optional<std::string> validate_tour(std::span<const int> perm, int n);

/// (length - reference) / reference * 100. Negative gaps are returned as-is.
/// Throws std::domain_error when reference <= 0.
double optimality_gap(double length, double reference_length);

Tour make_tour(std::vector<int> perm, const DistanceMatrix& d);

/// Reference-tour file: whitespace-separated 0-indexed node ids, optionally
/// preceded by a first line "# L_star=<value>". TSPLIB tour files
/// (TOUR_SECTION, 1-indexed, -1 terminated) are also accepted.
struct ReferenceTour {
  std::vector<int> perm;
  std::optional<double> reference_length;
};

ReferenceTour parse_reference_tour(std::istream& in);
ReferenceTour load_reference_tour(const std::string& path);
void write_tour(std::ostream& out, const Tour& tour, std::optional<double> reference_length = {});

}  // namespace heataco
