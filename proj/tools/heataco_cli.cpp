// Command-line front end for the heataco shared library. Talks to the
// engine exclusively through the C API in heataco.h.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "heataco.h"

namespace {

// Exit codes: 0 success, 1 infeasible output, 2 input error.
int exit_code_for(heataco_status status) {
  if (status == HEATACO_OK) return 0;
  if (status == HEATACO_ERR_INFEASIBLE) return 1;
  return 2;
}

int report_failure(heataco_status status, const char* context) {
  std::fprintf(stderr, "error: %s: %s\n", context, heataco_last_error());
  return exit_code_for(status);
}

struct ParamFlags {
  heataco_params params{};
  std::string local_search = "none";
  std::string evaporation = "auto";
  std::string deposit = "global-best";

  void attach(CLI::App* cmd) {
    heataco_params_init(&params);
    cmd->add_option("--alpha", params.alpha, "Pheromone exponent");
    cmd->add_option("--beta", params.beta, "Distance-heuristic exponent");
    cmd->add_option("--gamma", params.gamma, "Heatmap exponent");
    cmd->add_option("--rho", params.rho, "Evaporation rate in (0,1)");
    cmd->add_option("--ants", params.ants, "Ants per iteration");
    cmd->add_option("--iterations", params.iterations, "Iteration budget");
    cmd->add_option("--k", params.candidate_k, "Candidate list size");
    cmd->add_option("--threads", params.threads, "Worker threads per run");
    cmd->add_option("--ls", local_search, "Local search: none, 2opt, 3opt");
    cmd->add_option("--evaporation", evaporation, "Evaporation scope: auto, full, candidate");
    cmd->add_option("--deposit", deposit, "Deposit rule: global-best, iteration-best");
    cmd->add_option("--eps-h", params.eps_h, "Heatmap threshold");
    cmd->add_option("--eps-floor", params.eps_floor, "Heatmap floor value");
    cmd->add_option("--max-passes-2opt", params.max_passes_2opt, "2-opt pass cap");
    cmd->add_option("--max-passes-3opt", params.max_passes_3opt, "3-opt pass cap");
  }

  // Resolves string flags; returns false (after printing) on bad values.
  bool finalize() {
    if (local_search == "none")
      params.local_search = HEATACO_LS_NONE;
    else if (local_search == "2opt")
      params.local_search = HEATACO_LS_2OPT;
    else if (local_search == "3opt")
      params.local_search = HEATACO_LS_3OPT;
    else {
      std::fprintf(stderr, "error: unknown --ls value '%s'\n", local_search.c_str());
      return false;
    }
    if (evaporation == "auto")
      params.evaporation_scope = HEATACO_EVAP_AUTO;
    else if (evaporation == "full")
      params.evaporation_scope = HEATACO_EVAP_FULL;
    else if (evaporation == "candidate")
      params.evaporation_scope = HEATACO_EVAP_CANDIDATE;
    else {
      std::fprintf(stderr, "error: unknown --evaporation value '%s'\n", evaporation.c_str());
      return false;
    }
    if (deposit == "global-best")
      params.deposit_rule = HEATACO_DEPOSIT_GLOBAL_BEST;
    else if (deposit == "iteration-best")
      params.deposit_rule = HEATACO_DEPOSIT_ITERATION_BEST;
    else {
      std::fprintf(stderr, "error: unknown --deposit value '%s'\n", deposit.c_str());
      return false;
    }
    if (const char* env = std::getenv("HEATACO_THREADS"))
      params.threads = std::atoi(env);
    return true;
  }
};

std::vector<uint64_t> expand_seeds(const std::vector<uint64_t>& seeds, int num_seeds) {
  if (!seeds.empty()) return seeds;
  std::vector<uint64_t> out;
  for (int s = 0; s < num_seeds; ++s) out.push_back(uint64_t(s));
  return out;
}

struct InstanceHandle {
  heataco_instance* ptr = nullptr;
  ~InstanceHandle() { heataco_instance_free(ptr); }
};
struct HeatmapHandle {
  heataco_heatmap* ptr = nullptr;
  ~HeatmapHandle() { heataco_heatmap_free(ptr); }
};
struct TourHandle {
  heataco_tour* ptr = nullptr;
  ~TourHandle() { heataco_tour_free(ptr); }
};

int run_decode(const std::string& instance_path, const std::string& heatmap_path,
               std::string decoder, const std::string& ref_tour, double l_star_flag,
               bool gamma_entropy, const std::string& out_tour, const std::string& trace_path,
               ParamFlags& flags) {
  if (!flags.finalize()) return 2;

  InstanceHandle instance;
  heataco_status status = heataco_instance_load(instance_path.c_str(), &instance.ptr);
  if (status != HEATACO_OK) return report_failure(status, "loading instance");

  HeatmapHandle heatmap;
  if (!heatmap_path.empty()) {
    status = heataco_heatmap_load(heatmap_path.c_str(), heataco_instance_size(instance.ptr),
                                  &heatmap.ptr);
    if (status != HEATACO_OK) return report_failure(status, "loading heatmap");
  }

  if (decoder.empty()) decoder = heatmap.ptr ? "heataco" : "mmas";
  if (decoder == "heataco" && !heatmap.ptr) {
    std::fprintf(stderr, "error: the heataco decoder requires --heatmap\n");
    return 2;
  }
  if (decoder == "greedy" && !heatmap.ptr) {
    std::fprintf(stderr, "error: the greedy decoder requires --heatmap\n");
    return 2;
  }
  if (decoder == "mmas" && heatmap.ptr) {
    std::fprintf(stderr, "error: mmas is heatmap-free; use --decoder heataco\n");
    return 2;
  }

  double l_star = l_star_flag;
  if (!ref_tour.empty() && l_star <= 0.0) {
    if (heataco_reference_length(ref_tour.c_str(), &l_star) != HEATACO_OK) {
      TourHandle reference;
      status = heataco_tour_load(ref_tour.c_str(), instance.ptr, &reference.ptr);
      if (status != HEATACO_OK) return report_failure(status, "loading reference tour");
      l_star = heataco_tour_length(reference.ptr);
    }
  }

  if (gamma_entropy && heatmap.ptr) {
    double support = 0.0;
    status = heataco_select_gamma(instance.ptr, heatmap.ptr, &flags.params, 0.0, nullptr, 0,
                                  &flags.params.gamma, &support);
    if (status == HEATACO_OK) {
      std::printf("selected gamma=%.3g (effective support %.4g)\n", flags.params.gamma, support);
    } else if (status == HEATACO_ERR_UNDEFINED) {
      std::fprintf(stderr, "warning: %s; keeping gamma=%.3g\n", heataco_last_error(),
                   flags.params.gamma);
    } else {
      return report_failure(status, "selecting gamma");
    }
  }

  TourHandle tour;
  double seconds = 0.0;
  if (decoder == "greedy") {
    status = heataco_decode_greedy(instance.ptr, heatmap.ptr, &tour.ptr);
  } else {
    status = heataco_decode_traced(instance.ptr, decoder == "heataco" ? heatmap.ptr : nullptr,
                                   &flags.params,
                                   trace_path.empty() ? nullptr : trace_path.c_str(), &tour.ptr,
                                   &seconds);
  }
  if (status != HEATACO_OK) return report_failure(status, "decoding");

  const double length = heataco_tour_length(tour.ptr);
  std::printf("instance=%s decoder=%s n=%d length=%.6f decode_seconds=%.3f", instance_path.c_str(),
              decoder.c_str(), heataco_instance_size(instance.ptr), length, seconds);
  if (l_star > 0.0) {
    double gap = 0.0;
    heataco_gap_percent(length, l_star, &gap);
    std::printf(" gap=%.4f%%", gap);
  }
  std::printf("\n");

  if (!out_tour.empty()) {
    status = heataco_tour_save(tour.ptr, out_tour.c_str());
    if (status != HEATACO_OK) return report_failure(status, "writing tour");
  }
  return 0;
}

int run_bench(const std::vector<std::string>& instances, const std::vector<std::string>& heatmaps,
              const std::vector<std::string>& ref_tours, const std::string& decoder,
              const std::vector<uint64_t>& seed_list, int num_seeds, const std::string& out_dir,
              const std::string& gamma_mode, const std::vector<double>& gamma_grid,
              double support_target, ParamFlags& flags) {
  if (!flags.finalize()) return 2;
  if (!heatmaps.empty() && heatmaps.size() != instances.size()) {
    std::fprintf(stderr, "error: need one --heatmap per --instance (or none)\n");
    return 2;
  }
  if (!ref_tours.empty() && ref_tours.size() != instances.size()) {
    std::fprintf(stderr, "error: need one --ref-tour per --instance (or none)\n");
    return 2;
  }

  heataco_experiment* experiment = nullptr;
  heataco_status status = heataco_experiment_new(&experiment);
  if (status != HEATACO_OK) return report_failure(status, "creating experiment");

  for (std::size_t i = 0; i < instances.size(); ++i) {
    status = heataco_experiment_add_job(
        experiment, instances[i].c_str(),
        heatmaps.empty() || heatmaps[i].empty() || heatmaps[i] == "none" ? nullptr
                                                                         : heatmaps[i].c_str(),
        ref_tours.empty() || ref_tours[i].empty() ? nullptr : ref_tours[i].c_str());
    if (status != HEATACO_OK) {
      heataco_experiment_free(experiment);
      return report_failure(status, "adding job");
    }
  }

  const std::vector<uint64_t> seeds = expand_seeds(seed_list, num_seeds);
  heataco_experiment_set_decoder(experiment, decoder.c_str());
  heataco_experiment_set_params(experiment, &flags.params);
  heataco_experiment_set_seeds(experiment, seeds.data(), int(seeds.size()));
  if (!out_dir.empty()) heataco_experiment_set_output_dir(experiment, out_dir.c_str());
  if (!gamma_mode.empty()) {
    status = heataco_experiment_set_gamma_mode(experiment, gamma_mode.c_str());
    if (status != HEATACO_OK) {
      heataco_experiment_free(experiment);
      return report_failure(status, "setting gamma mode");
    }
  }
  if (!gamma_grid.empty())
    heataco_experiment_set_gamma_grid(experiment, gamma_grid.data(), int(gamma_grid.size()));
  if (support_target > 0.0) heataco_experiment_set_support_target(experiment, support_target);

  status = heataco_experiment_run(experiment);
  if (status != HEATACO_OK) {
    const int code = report_failure(status, "running experiment");
    heataco_experiment_free(experiment);
    return code;
  }

  char line[1024];
  heataco_experiment_csv_header(line, sizeof(line));
  std::printf("%s\n", line);
  for (int r = 0; r < heataco_experiment_row_count(experiment); ++r) {
    if (heataco_experiment_row_csv(experiment, r, line, sizeof(line)) == HEATACO_OK)
      std::printf("%s\n", line);
  }
  for (int w = 0; w < heataco_experiment_warning_count(experiment); ++w) {
    if (heataco_experiment_warning(experiment, w, line, sizeof(line)) == HEATACO_OK)
      std::fprintf(stderr, "warning: %s\n", line);
  }
  heataco_experiment_free(experiment);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heataco: heatmap-guided ant-colony decoding for Euclidean TSP"};
  app.require_subcommand(1);

  // decode
  auto* decode = app.add_subcommand("decode", "Decode one instance with one seed");
  std::string instance_path, heatmap_path, decoder, ref_tour, out_tour, trace_path;
  double l_star = 0.0;
  bool gamma_entropy = false;
  ParamFlags decode_flags;
  decode->add_option("--instance", instance_path, "Instance file (TSPLIB or x-y text)")
      ->required();
  decode->add_option("--heatmap", heatmap_path, "Heatmap file (dense binary or sparse text)");
  decode->add_option("--decoder", decoder, "greedy, mmas, or heataco");
  decode->add_option("--ref-tour", ref_tour, "Reference tour file for gap reporting");
  decode->add_option("--l-star", l_star, "Reference length override");
  decode->add_flag("--gamma-entropy", gamma_entropy, "Pick gamma by entropy targeting");
  decode->add_option("--out-tour", out_tour, "Write the decoded tour here");
  decode->add_option("--trace", trace_path, "Write the iteration trace here (JSONL)");
  decode->add_option("--seed", decode_flags.params.seed, "RNG seed");
  decode_flags.attach(decode);

  // bench / sweep-gamma share most options
  std::vector<std::string> instances, heatmaps, ref_tours;
  std::vector<uint64_t> seed_list;
  int num_seeds = 10;
  std::string out_dir, gamma_mode;
  std::vector<double> gamma_grid;
  double support_target = 0.0;
  std::string bench_decoder = "heataco";

  auto add_bench_options = [&](CLI::App* cmd, ParamFlags& flags) {
    cmd->add_option("--instance", instances, "Instance file (repeatable)")->required();
    cmd->add_option("--heatmap", heatmaps, "Heatmap per instance ('none' to skip)");
    cmd->add_option("--ref-tour", ref_tours, "Reference tour per instance");
    cmd->add_option("--decoder", bench_decoder, "greedy, mmas, or heataco");
    cmd->add_option("--seed", seed_list, "Explicit seed (repeatable)");
    cmd->add_option("--num-seeds", num_seeds, "Use seeds 0..n-1 when --seed not given");
    cmd->add_option("--out-dir", out_dir, "Directory for report.csv and traces");
    cmd->add_option("--support-target", support_target, "Entropy target for gamma selection");
    flags.attach(cmd);
  };

  auto* bench = app.add_subcommand("bench", "Multi-instance, multi-seed protocol");
  ParamFlags bench_flags;
  add_bench_options(bench, bench_flags);
  bench->add_option("--gamma-mode", gamma_mode, "fixed, grid, or entropy");

  auto* sweep = app.add_subcommand("sweep-gamma", "Bench across a gamma grid");
  ParamFlags sweep_flags;
  add_bench_options(sweep, sweep_flags);
  sweep->add_option("--gamma-grid", gamma_grid, "Grid values (default 0.1 0.5 1 2)");

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "Heatmap reliability report");
  std::string diag_instance, diag_heatmap, diag_ref, diag_filters = "threshold", diag_out;
  diagnose->add_option("--instance", diag_instance)->required();
  diagnose->add_option("--heatmap", diag_heatmap)->required();
  diagnose->add_option("--ref-tour", diag_ref, "Reference tour (required for recall/CE)")
      ->required();
  diagnose->add_option("--filters", diag_filters, "threshold[:eps],topk:k,knn:k");
  diagnose->add_option("--out", diag_out, "Report path (JSONL)")->required();

  // select-gamma
  auto* select = app.add_subcommand("select-gamma", "Entropy-targeted gamma selection");
  std::string sel_instance, sel_heatmap;
  double sel_target = 0.0;
  std::vector<double> sel_grid;
  ParamFlags select_flags;
  select->add_option("--instance", sel_instance)->required();
  select->add_option("--heatmap", sel_heatmap)->required();
  select->add_option("--target", sel_target, "Effective-support target (default by --ls)");
  select->add_option("--grid", sel_grid, "Gamma grid (default 0.1 0.5 1 2)");
  select_flags.attach(select);

  // convergence
  auto* convergence = app.add_subcommand("convergence", "Combine traces into plot data");
  std::vector<std::string> conv_traces, conv_names;
  std::string conv_out;
  double conv_alpha = 0.03, conv_mid = 0.5;
  convergence->add_option("--trace", conv_traces, "Trace file (repeatable)")->required();
  convergence->add_option("--name", conv_names, "Method name per trace");
  convergence->add_option("--out", conv_out, "Output CSV")->required();
  convergence->add_option("--plot-alpha", conv_alpha, "Offset scale");
  convergence->add_option("--t-mid", conv_mid, "Mid-iteration fraction");

  CLI11_PARSE(app, argc, argv);

  if (decode->parsed())
    return run_decode(instance_path, heatmap_path, decoder, ref_tour, l_star, gamma_entropy,
                      out_tour, trace_path, decode_flags);

  if (bench->parsed())
    return run_bench(instances, heatmaps, ref_tours, bench_decoder, seed_list, num_seeds,
                     out_dir, gamma_mode, gamma_grid, support_target, bench_flags);

  if (sweep->parsed())
    return run_bench(instances, heatmaps, ref_tours, bench_decoder, seed_list, num_seeds,
                     out_dir, "grid", gamma_grid, support_target, sweep_flags);

  if (diagnose->parsed()) {
    const heataco_status status =
        heataco_diagnose(diag_instance.c_str(), diag_heatmap.c_str(), diag_ref.c_str(),
                         diag_filters.c_str(), diag_out.c_str());
    if (status != HEATACO_OK) return report_failure(status, "diagnose");
    std::printf("wrote %s\n", diag_out.c_str());
    return 0;
  }

  if (select->parsed()) {
    if (!select_flags.finalize()) return 2;
    InstanceHandle instance;
    heataco_status status = heataco_instance_load(sel_instance.c_str(), &instance.ptr);
    if (status != HEATACO_OK) return report_failure(status, "loading instance");
    HeatmapHandle heatmap;
    status = heataco_heatmap_load(sel_heatmap.c_str(), heataco_instance_size(instance.ptr),
                                  &heatmap.ptr);
    if (status != HEATACO_OK) return report_failure(status, "loading heatmap");
    double gamma = 0.0, support = 0.0;
    status = heataco_select_gamma(instance.ptr, heatmap.ptr, &select_flags.params, sel_target,
                                  sel_grid.empty() ? nullptr : sel_grid.data(),
                                  int(sel_grid.size()), &gamma, &support);
    if (status != HEATACO_OK) return report_failure(status, "select-gamma");
    std::printf("gamma=%.6g effective_support=%.6g\n", gamma, support);
    return 0;
  }

  if (convergence->parsed()) {
    std::vector<const char*> paths, names;
    for (const auto& t : conv_traces) paths.push_back(t.c_str());
    for (std::size_t i = 0; i < conv_traces.size(); ++i)
      names.push_back(i < conv_names.size() ? conv_names[i].c_str() : conv_traces[i].c_str());
    const heataco_status status =
        heataco_convergence_emit(paths.data(), names.data(), int(paths.size()), conv_alpha,
                                 conv_mid, conv_out.c_str());
    if (status != HEATACO_OK) return report_failure(status, "convergence");
    std::printf("wrote %s\n", conv_out.c_str());
    return 0;
  }

  return 2;
}
