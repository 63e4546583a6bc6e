#include "heataco/instance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace heataco {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string value_after_colon(const std::string& line) {
  const auto pos = line.find(':');
  if (pos == std::string::npos) return {};
  return trim(line.substr(pos + 1));
}

double parse_real(const std::string& token, int line_no) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &consumed);
  } catch (const std::exception&) {
    throw ParseError("malformed numeric token '" + token + "'", line_no);
  }
  if (consumed != token.size())
    throw ParseError("malformed numeric token '" + token + "'", line_no);
  if (!std::isfinite(value))
    throw ParseError("non-finite coordinate '" + token + "'", line_no);
  return value;
}

void check_instance(const TspInstance& inst) {
  if (inst.n < 3) throw ParseError("instance too small: need at least 3 nodes");
  if (static_cast<int>(inst.coords.size()) != inst.n)
    throw ParseError("coordinate count does not match node count");
}

}  // namespace

TspInstance parse_tsplib(std::istream& in, std::string name) {
  TspInstance inst;
  inst.name = std::move(name);
  inst.mode = DistanceMode::TsplibEuc2dRounded;

  int dimension = -1;
  bool saw_weight_type = false;
  bool in_coords = false;
  int line_no = 0;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;

    if (!in_coords) {
      if (t.rfind("NAME", 0) == 0) {
        inst.name = value_after_colon(t);
      } else if (t.rfind("DIMENSION", 0) == 0) {
        const std::string v = value_after_colon(t);
        try {
          dimension = std::stoi(v);
        } catch (const std::exception&) {
          throw ParseError("malformed DIMENSION '" + v + "'", line_no);
        }
      } else if (t.rfind("EDGE_WEIGHT_TYPE", 0) == 0) {
        const std::string v = value_after_colon(t);
        if (v != "EUC_2D")
          throw ParseError("unsupported distance type '" + v + "'", line_no);
        saw_weight_type = true;
      } else if (t == "NODE_COORD_SECTION") {
        if (dimension <= 0)
          throw ParseError("NODE_COORD_SECTION before DIMENSION", line_no);
        in_coords = true;
      }
      // TYPE / COMMENT / other header fields are ignored.
      continue;
    }

    if (t == "EOF") break;

    std::istringstream ls(t);
    std::string id_tok, x_tok, y_tok, extra;
    if (!(ls >> id_tok >> x_tok >> y_tok))
      throw ParseError("expected 'id x y' in coordinate section", line_no);
    if (ls >> extra)
      throw ParseError("trailing token '" + extra + "' in coordinate section", line_no);
    parse_real(id_tok, line_no);  // id is positional only; file order is kept
    Point p;
    p.x = parse_real(x_tok, line_no);
    p.y = parse_real(y_tok, line_no);
    inst.coords.push_back(p);
  }

  if (!saw_weight_type) throw ParseError("missing EDGE_WEIGHT_TYPE");
  if (dimension <= 0) throw ParseError("missing DIMENSION");
  if (static_cast<int>(inst.coords.size()) != dimension)
    throw ParseError("DIMENSION is " + std::to_string(dimension) + " but file lists " +
                     std::to_string(inst.coords.size()) + " coordinates");
  inst.n = dimension;
  check_instance(inst);
  return inst;
}

TspInstance parse_coords(std::istream& in, std::string name) {
  TspInstance inst;
  inst.name = std::move(name);
  inst.mode = DistanceMode::EuclideanExact;

  int line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ls(t);
    std::string x_tok, y_tok, extra;
    if (!(ls >> x_tok >> y_tok))
      throw ParseError("expected 'x y'", line_no);
    if (ls >> extra)
      throw ParseError("trailing token '" + extra + "'", line_no);
    Point p;
    p.x = parse_real(x_tok, line_no);
    p.y = parse_real(y_tok, line_no);
    inst.coords.push_back(p);
  }

  if (inst.coords.size() < 3) throw ParseError("instance too small: need at least 3 nodes");
  inst.n = static_cast<int>(inst.coords.size());
  check_instance(inst);
  return inst;
}

TspInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);

  // TSPLIB files start with header keywords; coordinate files are bare numbers.
  std::string head;
  {
    std::ostringstream buf;
    buf << in.rdbuf();
    head = buf.str();
  }
  std::istringstream stream(head);

  std::string stem = path;
  if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
    stem = stem.substr(slash + 1);
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos)
    stem = stem.substr(0, dot);

  const bool looks_tsplib = head.find("NODE_COORD_SECTION") != std::string::npos ||
                            head.find("DIMENSION") != std::string::npos;
  return looks_tsplib ? parse_tsplib(stream, stem) : parse_coords(stream, stem);
}

DistanceMatrix compute_distance_matrix(const TspInstance& inst) {
  DistanceMatrix d(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    for (int j = i + 1; j < inst.n; ++j) {
      const double dx = inst.coords[i].x - inst.coords[j].x;
      const double dy = inst.coords[i].y - inst.coords[j].y;
      double dist = std::sqrt(dx * dx + dy * dy);
      if (inst.mode == DistanceMode::TsplibEuc2dRounded)
        dist = std::floor(dist + 0.5);  // TSPLIB nint
      d.set(i, j, dist);
    }
  }
  return d;
}

double tour_length(std::span<const int> perm, const DistanceMatrix& d) {
  if (auto violation = validate_tour(perm, d.size()))
    throw std::invalid_argument("tour_length: " + *violation);
  double total = 0.0;
  const int n = d.size();
  int prev = perm[n - 1];
  for (int t = 0; t < n; ++t) {
    total += d(prev, perm[t]);
    prev = perm[t];
  }
  return total;
}

std::optional<std::string> validate_tour(std::span<const int> perm, int n) {
  if (static_cast<int>(perm.size()) != n)
    return "length mismatch: got " + std::to_string(perm.size()) + ", expected " +
           std::to_string(n);
  std::vector<std::uint8_t> seen(n, 0);
  for (const int v : perm) {
    if (v < 0 || v >= n) return "index " + std::to_string(v) + " out of range";
    if (seen[v]) {
      // Name the first duplicate and the first index it displaced.
      int missing = -1;
      for (int i = 0; i < n; ++i) {
        if (!std::count(perm.begin(), perm.end(), i)) {
          missing = i;
          break;
        }
      }
      return "duplicate " + std::to_string(v) + " / missing " + std::to_string(missing);
    }
    seen[v] = 1;
  }
  return std::nullopt;
}

double optimality_gap(double length, double reference_length) {
  if (!(reference_length > 0.0))
    throw std::domain_error("optimality_gap: reference length must be positive");
  return (length - reference_length) / reference_length * 100.0;
}

Tour make_tour(std::vector<int> perm, const DistanceMatrix& d) {
  Tour t;
  t.length = tour_length(perm, d);
  t.perm = std::move(perm);
  return t;
}

namespace {

// TSPLIB tour files carry header fields, then 1-indexed ids in TOUR_SECTION
// terminated by -1.
ReferenceTour parse_tsplib_tour(std::istream& in) {
  ReferenceTour ref;
  std::string line;
  int line_no = 0;
  bool in_section = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!in_section) {
      if (t == "TOUR_SECTION") in_section = true;
      continue;
    }
    if (t == "EOF") break;
    std::istringstream ls(t);
    std::string tok;
    while (ls >> tok) {
      long long id = 0;
      try {
        std::size_t used = 0;
        id = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("malformed node id '" + tok + "'", line_no);
      }
      if (id == -1) return ref;
      if (id < 1) throw ParseError("TSPLIB tours are 1-indexed", line_no);
      ref.perm.push_back(int(id - 1));
    }
  }
  if (ref.perm.empty()) throw ParseError("tour file has no node ids");
  return ref;
}

}  // namespace

ReferenceTour parse_reference_tour(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.find("TOUR_SECTION") != std::string::npos) {
    std::istringstream stream(text);
    return parse_tsplib_tour(stream);
  }

  ReferenceTour ref;
  std::istringstream stream(text);
  std::string line;
  bool first = true;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (first && t[0] == '#') {
      const auto key = t.find("L_star=");
      if (key != std::string::npos) {
        std::string v = trim(t.substr(key + 7));
        ref.reference_length = parse_real(v, line_no);
      }
      first = false;
      continue;
    }
    first = false;
    std::istringstream ls(t);
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        const int id = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        ref.perm.push_back(id);
      } catch (const std::exception&) {
        throw ParseError("malformed node id '" + tok + "'", line_no);
      }
    }
  }
  if (ref.perm.empty()) throw ParseError("reference tour file has no node ids");
  return ref;
}

ReferenceTour load_reference_tour(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open tour file: " + path);
  return parse_reference_tour(in);
}

void write_tour(std::ostream& out, const Tour& tour, std::optional<double> reference_length) {
  if (reference_length) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", *reference_length);
    out << "# L_star=" << buf << "\n";
  }
  for (std::size_t i = 0; i < tour.perm.size(); ++i)
    out << tour.perm[i] << ((i + 1) % 16 == 0 ? '\n' : ' ');
  out << "\n";
}

}  // namespace heataco
