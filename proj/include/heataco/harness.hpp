#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heataco/diagnostics.hpp"
#include "heataco/greedy.hpp"
#include "heataco/heatmap.hpp"
#include "heataco/instance.hpp"
#include "heataco/mmas.hpp"

namespace heataco {

enum class Decoder { Greedy, Mmas, Heataco };
enum class GammaMode { Fixed, GridSweep, EntropyTarget };

/// One (instance, heatmap, reference) triple to decode.
struct InstanceJob {
  std::string instance_path;
  std::string heatmap_path;    // empty: no heatmap (vanilla MMAS only)
  std::string reference_path;  // empty: no reference tour / L*
  std::optional<double> reference_length;  // explicit L*, overrides the file value
};

struct RunConfig {
  RunConfig() { mmas.threads = 16; }  // benchmark-protocol default

  std::vector<InstanceJob> jobs;
  Decoder decoder = Decoder::Heataco;
  MmasParams mmas;
  int candidate_k = kDefaultCandidateK;
  double eps_h = kDefaultEpsH;
  double eps_floor = kDefaultEpsFloor;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::string output_dir;  // empty: keep results in memory only
  GammaMode gamma_mode = GammaMode::Fixed;
  std::vector<double> gamma_grid{kDefaultGammaGrid.begin(), kDefaultGammaGrid.end()};
  std::optional<double> support_target;  // entropy target; defaults by local search

  void validate() const;  // throws std::invalid_argument on contradictions
};

struct ReportRow {
  std::string instance_id;
  std::string decoder_id;
  std::string heatmap_id;
  int seed_count = 0;
  double gamma = 0.0;
  double mean_length = 0.0;
  double std_length = 0.0;
  std::optional<double> gap_percent;
  double mean_decode_seconds = 0.0;
};

struct ExperimentResult {
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
  std::vector<std::string> trace_files;
  std::string report_path;  // empty when no output dir was set
};

/// Decoded output of a tour that failed validation. Harness treats this as a
/// hard failure (CLI exit code 1).
class InfeasibleTourError : public std::runtime_error {
 public:
  explicit InfeasibleTourError(const std::string& what) : std::runtime_error(what) {}
};

/// Inputs for one job after loading and preprocessing; reusable across seeds.
struct PreparedJob {
  TspInstance instance;
  DistanceMatrix dist;
  std::optional<Heatmap> raw_heatmap;  // symmetrized; kept for the greedy decoder
  std::optional<FlooredHeatmap> heatmap;
  CandidateLists candidates;
  std::optional<Tour> reference;
  std::optional<double> reference_length;
  double gamma = 0.0;  // the exponent actually used
  std::string instance_id;
  std::string heatmap_id;
  std::vector<std::string> warnings;
};

PreparedJob prepare_job(const RunConfig& config, const InstanceJob& job);

struct DecodeOutcome {
  Tour tour;
  double decode_seconds = 0.0;  // search only; excludes file I/O and preprocessing
  ConvergenceTrace trace;       // empty for the greedy decoder
};

DecodeOutcome decode_one(const PreparedJob& prepared, const RunConfig& config,
                         std::uint64_t seed);

/// Runs every (job, seed) pair, validates each output tour, aggregates per
/// job, and (when an output dir is set) writes report.csv plus per-seed and
/// per-method mean traces.
ExperimentResult run_experiment(const RunConfig& config);

/// run_experiment once per grid value with gamma fixed to it.
ExperimentResult sweep_gamma(const RunConfig& config, std::span<const double> grid);

std::string report_csv_header();
std::string report_csv_row(const ReportRow& row);

void write_trace_jsonl(std::ostream& out, const ConvergenceTrace& trace);
std::vector<double> read_trace_best_lengths(std::istream& in);

/// Plot data for trace comparison: applies the log-offset transform and
/// writes "method,iteration,y,raw_length" rows (raw values preserved).
void emit_convergence_csv(std::ostream& out, const std::vector<std::string>& method_names,
                          const std::vector<std::vector<double>>& traces,
                          double plot_alpha = 0.03, double t_mid_fraction = 0.5);

struct FilterSpec {
  enum class Kind { Threshold, TopK, Knn };
  Kind kind = Kind::Threshold;
  double eps_h = kDefaultEpsH;  // Threshold
  int k = kDefaultCandidateK;   // TopK / Knn
};

/// "threshold", "threshold:1e-3", "topk:20", "knn:20"; comma-separated list.
std::vector<FilterSpec> parse_filter_specs(const std::string& text);

struct DiagnoseRequest {
  std::string instance_path;
  std::string heatmap_path;
  std::string reference_path;
  std::vector<FilterSpec> filters{FilterSpec{}};
  std::vector<double> bins;  // empty: default_interval_bins()
};

/// One JSON record per (instance, heatmap, filter) with candidate stats,
/// CE/WCE, and the interval histogram.
void run_diagnostics(const DiagnoseRequest& request, std::ostream& out);

std::string decoder_id(Decoder decoder, LocalSearchKind local_search);

}  // namespace heataco
