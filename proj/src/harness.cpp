#include "heataco/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace heataco {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string file_stem(const std::string& path) {
  return fs::path(path).stem().string();
}

double now_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string decoder_id(Decoder decoder, LocalSearchKind local_search) {
  std::string id;
  switch (decoder) {
    case Decoder::Greedy: return "greedy";
    case Decoder::Mmas: id = "mmas"; break;
    case Decoder::Heataco: id = "heataco"; break;
  }
  if (local_search == LocalSearchKind::TwoOpt) id += "+2opt";
  if (local_search == LocalSearchKind::ThreeOpt) id += "+3opt";
  return id;
}

void RunConfig::validate() const {
  mmas.validate();
  if (jobs.empty()) throw std::invalid_argument("config: no instances");
  if (seeds.empty()) throw std::invalid_argument("config: seed list must not be empty");
  if (candidate_k < 1) throw std::invalid_argument("config: candidate list size must be >= 1");
  for (const InstanceJob& job : jobs) {
    if (decoder == Decoder::Heataco && job.heatmap_path.empty())
      throw std::invalid_argument("config: heataco decoder requires a heatmap for " +
                                  job.instance_path);
    if (decoder == Decoder::Greedy && job.heatmap_path.empty())
      throw std::invalid_argument("config: greedy decoder requires a heatmap for " +
                                  job.instance_path);
    if (decoder == Decoder::Mmas && !job.heatmap_path.empty())
      throw std::invalid_argument(
          "config: the mmas decoder is heatmap-free; use the heataco decoder for " +
          job.instance_path);
  }
}

PreparedJob prepare_job(const RunConfig& config, const InstanceJob& job) {
  PreparedJob prepared;
  prepared.instance = load_instance(job.instance_path);
  prepared.instance_id =
      prepared.instance.name.empty() ? file_stem(job.instance_path) : prepared.instance.name;
  prepared.dist = compute_distance_matrix(prepared.instance);
  prepared.gamma = config.mmas.gamma;

  if (!job.heatmap_path.empty()) {
    Heatmap raw = symmetrized(load_heatmap(job.heatmap_path, prepared.instance.n));
    prepared.heatmap_id = file_stem(job.heatmap_path);
    if (config.decoder == Decoder::Greedy) {
      // Greedy scores come from the unclipped map; no candidate lists needed.
      prepared.raw_heatmap = std::move(raw);
    } else {
      prepared.heatmap = clip_floor(std::move(raw), config.eps_h, config.eps_floor);
      prepared.candidates =
          build_candidate_lists(*prepared.heatmap, prepared.dist, config.candidate_k);
    }
  } else {
    prepared.heatmap_id = "none";
    prepared.candidates = knn_candidate_lists(prepared.dist, config.candidate_k);
  }

  if (!job.reference_path.empty()) {
    const ReferenceTour ref = load_reference_tour(job.reference_path);
    if (auto violation = validate_tour(ref.perm, prepared.instance.n))
      throw InfeasibleTourError("reference tour for " + job.instance_path + ": " + *violation);
    prepared.reference = make_tour(ref.perm, prepared.dist);
    prepared.reference_length = ref.reference_length;
  }
  if (job.reference_length) prepared.reference_length = job.reference_length;
  // File-supplied L* wins over the evaluated tour; fall back to evaluating.
  if (!prepared.reference_length && prepared.reference)
    prepared.reference_length = prepared.reference->length;

  if (config.gamma_mode == GammaMode::EntropyTarget && prepared.heatmap) {
    const double target = config.support_target.value_or(
        config.mmas.local_search == LocalSearchKind::None ? kSupportTargetNoLs
                                                          : kSupportTargetWithLs);
    try {
      const GammaSelection sel =
          select_gamma(*prepared.heatmap, prepared.candidates, target, config.gamma_grid);
      prepared.gamma = sel.gamma;
    } catch (const EntropyUndefinedError&) {
      prepared.warnings.push_back(prepared.instance_id +
                                  ": entropy undefined, keeping gamma=" +
                                  format_double(config.mmas.gamma));
    }
  }
  return prepared;
}

DecodeOutcome decode_one(const PreparedJob& prepared, const RunConfig& config,
                         std::uint64_t seed) {
  DecodeOutcome outcome;
  if (config.decoder == Decoder::Greedy) {
    const auto t0 = std::chrono::steady_clock::now();
    outcome.tour = greedy_merge(*prepared.raw_heatmap, prepared.dist);
    outcome.decode_seconds = now_seconds(t0);
    return outcome;
  }

  MmasParams params = config.mmas;
  params.seed = seed;
  params.gamma = prepared.gamma;
  const FlooredHeatmap* heatmap =
      config.decoder == Decoder::Heataco ? &*prepared.heatmap : nullptr;

  const auto t0 = std::chrono::steady_clock::now();
  RunResult result = run_mmas(prepared.dist, heatmap, prepared.candidates, params);
  outcome.decode_seconds = now_seconds(t0);
  outcome.tour = std::move(result.best);
  outcome.trace = std::move(result.trace);
  return outcome;
}

void write_trace_jsonl(std::ostream& out, const ConvergenceTrace& trace) {
  for (std::size_t t = 0; t < trace.best_length.size(); ++t) {
    json record{{"iteration", t + 1},
                {"best_length", trace.best_length[t]},
                {"elapsed_seconds", trace.elapsed_seconds[t]}};
    out << record.dump() << "\n";
  }
}

std::vector<double> read_trace_best_lengths(std::istream& in) {
  std::vector<double> lengths;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const json record = json::parse(line);
    lengths.push_back(record.at("best_length").get<double>());
  }
  return lengths;
}

std::string report_csv_header() {
  return "instance,decoder,heatmap,seeds,gamma,mean_length,std_length,gap_percent,"
         "mean_decode_seconds";
}

std::string report_csv_row(const ReportRow& row) {
  std::ostringstream out;
  out << row.instance_id << ',' << row.decoder_id << ',' << row.heatmap_id << ','
      << row.seed_count << ',' << format_double(row.gamma) << ','
      << format_double(row.mean_length) << ',' << format_double(row.std_length) << ',';
  if (row.gap_percent) out << format_double(*row.gap_percent);
  out << ',' << format_double(row.mean_decode_seconds);
  return out.str();
}

ExperimentResult run_experiment(const RunConfig& config) {
  config.validate();
  ExperimentResult result;

  const bool write_files = !config.output_dir.empty();
  if (write_files) fs::create_directories(config.output_dir);

  const std::string decoder = decoder_id(config.decoder, config.mmas.local_search);
  std::vector<std::vector<double>> method_traces;

  for (const InstanceJob& job : config.jobs) {
    PreparedJob prepared = prepare_job(config, job);
    for (const auto& w : prepared.warnings) result.warnings.push_back(w);

    // Greedy is deterministic, so one decode covers every seed.
    const std::vector<std::uint64_t> seeds =
        config.decoder == Decoder::Greedy ? std::vector<std::uint64_t>{config.seeds.front()}
                                          : config.seeds;

    double sum = 0.0, sum_sq = 0.0, time_sum = 0.0;
    for (const std::uint64_t seed : seeds) {
      const DecodeOutcome outcome = decode_one(prepared, config, seed);
      if (auto violation = validate_tour(outcome.tour.perm, prepared.instance.n))
        throw InfeasibleTourError(prepared.instance_id + " seed " + std::to_string(seed) +
                                  ": " + *violation);
      sum += outcome.tour.length;
      sum_sq += outcome.tour.length * outcome.tour.length;
      time_sum += outcome.decode_seconds;

      if (!outcome.trace.best_length.empty()) {
        method_traces.push_back(outcome.trace.best_length);
        if (write_files) {
          const std::string name = prepared.instance_id + "_" + decoder + "_seed" +
                                   std::to_string(seed) + ".trace.jsonl";
          const std::string path = (fs::path(config.output_dir) / name).string();
          std::ofstream out(path);
          write_trace_jsonl(out, outcome.trace);
          result.trace_files.push_back(path);
        }
      }
    }

    ReportRow row;
    row.instance_id = prepared.instance_id;
    row.decoder_id = decoder;
    row.heatmap_id = prepared.heatmap_id;
    row.seed_count = int(seeds.size());
    row.gamma = config.decoder == Decoder::Mmas ? 0.0 : prepared.gamma;
    row.mean_length = sum / double(seeds.size());
    const double variance =
        std::max(0.0, sum_sq / double(seeds.size()) - row.mean_length * row.mean_length);
    row.std_length = std::sqrt(variance);
    row.mean_decode_seconds = time_sum / double(seeds.size());
    if (prepared.reference_length) {
      row.gap_percent = optimality_gap(row.mean_length, *prepared.reference_length);
      if (*row.gap_percent < 0.0)
        result.warnings.push_back(prepared.instance_id +
                                  ": negative gap, decoded tour beats the reference length");
    } else {
      result.warnings.push_back(prepared.instance_id +
                                ": no reference length, gap left blank");
    }
    result.rows.push_back(std::move(row));
  }

  if (write_files) {
    const std::string report = (fs::path(config.output_dir) / "report.csv").string();
    std::ofstream out(report);
    out << report_csv_header() << "\n";
    for (const ReportRow& row : result.rows) out << report_csv_row(row) << "\n";
    result.report_path = report;

    // Method-level mean trace (across jobs and seeds) for convergence plots.
    if (!method_traces.empty()) {
      const std::size_t len = method_traces.front().size();
      const bool uniform = std::all_of(method_traces.begin(), method_traces.end(),
                                       [&](const auto& t) { return t.size() == len; });
      if (uniform) {
        ConvergenceTrace mean;
        mean.best_length.assign(len, 0.0);
        mean.elapsed_seconds.assign(len, 0.0);
        for (const auto& t : method_traces)
          for (std::size_t i = 0; i < len; ++i) mean.best_length[i] += t[i];
        for (std::size_t i = 0; i < len; ++i)
          mean.best_length[i] /= double(method_traces.size());
        const std::string path =
            (fs::path(config.output_dir) / ("trace_mean_" + decoder + ".jsonl")).string();
        std::ofstream mean_out(path);
        write_trace_jsonl(mean_out, mean);
        result.trace_files.push_back(path);
      }
    }
  }
  return result;
}

ExperimentResult sweep_gamma(const RunConfig& config, std::span<const double> grid) {
  if (config.decoder != Decoder::Heataco)
    throw std::invalid_argument("sweep_gamma: requires the heataco decoder");
  if (grid.empty()) throw std::invalid_argument("sweep_gamma: empty grid");

  ExperimentResult combined;
  for (const double gamma : grid) {
    RunConfig point = config;
    point.gamma_mode = GammaMode::Fixed;
    point.mmas.gamma = gamma;
    if (!config.output_dir.empty())
      point.output_dir =
          (fs::path(config.output_dir) / ("gamma_" + format_double(gamma))).string();
    ExperimentResult result = run_experiment(point);
    for (auto& row : result.rows) combined.rows.push_back(std::move(row));
    for (auto& w : result.warnings) combined.warnings.push_back(std::move(w));
    for (auto& t : result.trace_files) combined.trace_files.push_back(std::move(t));
  }

  if (!config.output_dir.empty()) {
    const std::string report = (fs::path(config.output_dir) / "sweep.csv").string();
    std::ofstream out(report);
    out << report_csv_header() << "\n";
    for (const ReportRow& row : combined.rows) out << report_csv_row(row) << "\n";
    combined.report_path = report;
  }
  return combined;
}

void emit_convergence_csv(std::ostream& out, const std::vector<std::string>& method_names,
                          const std::vector<std::vector<double>>& traces, double plot_alpha,
                          double t_mid_fraction) {
  if (method_names.size() != traces.size())
    throw std::invalid_argument("emit_convergence: one name per trace required");
  const ConvergencePlot plot = convergence_transform(traces, plot_alpha, t_mid_fraction);
  out << "# baseline=" << format_double(plot.baseline)
      << " offset=" << format_double(plot.offset) << "\n";
  out << "method,iteration,y,raw_length\n";
  for (std::size_t m = 0; m < traces.size(); ++m)
    for (std::size_t t = 0; t < traces[m].size(); ++t)
      out << method_names[m] << ',' << t + 1 << ',' << format_double(plot.y[m][t]) << ','
          << format_double(traces[m][t]) << "\n";
}

std::vector<FilterSpec> parse_filter_specs(const std::string& text) {
  std::vector<FilterSpec> specs;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    FilterSpec spec;
    std::string arg;
    if (const auto colon = item.find(':'); colon != std::string::npos) {
      arg = item.substr(colon + 1);
      item = item.substr(0, colon);
    }
    if (item == "threshold") {
      spec.kind = FilterSpec::Kind::Threshold;
      if (!arg.empty()) spec.eps_h = std::stod(arg);
    } else if (item == "topk") {
      spec.kind = FilterSpec::Kind::TopK;
      if (!arg.empty()) spec.k = std::stoi(arg);
    } else if (item == "knn") {
      spec.kind = FilterSpec::Kind::Knn;
      if (!arg.empty()) spec.k = std::stoi(arg);
    } else {
      throw std::invalid_argument("unknown filter '" + item + "'");
    }
    specs.push_back(spec);
  }
  if (specs.empty()) throw std::invalid_argument("no filters given");
  return specs;
}

void run_diagnostics(const DiagnoseRequest& request, std::ostream& out) {
  const TspInstance instance = load_instance(request.instance_path);
  const DistanceMatrix dist = compute_distance_matrix(instance);
  const Heatmap heatmap = symmetrized(load_heatmap(request.heatmap_path, instance.n));

  const ReferenceTour ref = load_reference_tour(request.reference_path);
  if (auto violation = validate_tour(ref.perm, instance.n))
    throw InfeasibleTourError("reference tour: " + *violation);
  const Tour reference = make_tour(ref.perm, dist);

  const CrossEntropyResult entropy = cross_entropy(heatmap, reference);
  const std::vector<double> bins =
      request.bins.empty() ? default_interval_bins() : request.bins;

  const std::string instance_id =
      instance.name.empty() ? file_stem(request.instance_path) : instance.name;
  const std::string heatmap_id = file_stem(request.heatmap_path);

  for (const FilterSpec& spec : request.filters) {
    std::vector<Edge> edges;
    json filter;
    switch (spec.kind) {
      case FilterSpec::Kind::Threshold:
        edges = thresholded_edge_set(heatmap, spec.eps_h);
        filter = {{"type", "threshold"}, {"eps_h", spec.eps_h}};
        break;
      case FilterSpec::Kind::TopK:
        edges = topk_edge_set(heatmap, std::min(spec.k, instance.n - 1));
        filter = {{"type", "topk"}, {"k", spec.k}};
        break;
      case FilterSpec::Kind::Knn:
        edges = knn_edge_set(dist, std::min(spec.k, instance.n - 1));
        filter = {{"type", "knn"}, {"k", spec.k}};
        break;
    }

    const CandidateStats stats = candidate_stats(edges, reference, instance.n);
    const IntervalContribution hist = interval_contribution(heatmap, edges, reference, bins);

    json record{{"instance", instance_id},
                {"heatmap", heatmap_id},
                {"filter", filter},
                {"edges_per_node", stats.edges_per_node},
                {"coverage", stats.coverage},
                {"miss_count", stats.miss_count},
                {"miss_percent", stats.miss_percent},
                {"ce", entropy.ce},
                {"wce", entropy.wce},
                {"interval",
                 {{"bin_edges", hist.bin_edges},
                  {"candidate_counts_per_node", hist.candidate_counts_per_node},
                  {"tour_edge_fraction", hist.tour_edge_fraction},
                  {"overflow_candidates_per_node", hist.overflow_candidates_per_node},
                  {"overflow_tour_fraction", hist.overflow_tour_fraction}}}};
    out << record.dump() << "\n";
  }
}

}  // namespace heataco
