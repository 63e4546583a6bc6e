#include "heataco.h"

#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "heataco/harness.hpp"

namespace {

using namespace heataco;

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

heataco_status fail(heataco_status status, const std::string& message) {
  set_error(message);
  return status;
}

/// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
heataco_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    // "cannot open" paths surface as IO, everything else as parse errors.
    const bool io = std::string(e.what()).rfind("cannot open", 0) == 0;
    return fail(io ? HEATACO_ERR_IO : HEATACO_ERR_PARSE, e.what());
  } catch (const InfeasibleTourError& e) {
    return fail(HEATACO_ERR_INFEASIBLE, e.what());
  } catch (const EntropyUndefinedError& e) {
    return fail(HEATACO_ERR_UNDEFINED, e.what());
  } catch (const std::domain_error& e) {
    return fail(HEATACO_ERR_DOMAIN, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(HEATACO_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(HEATACO_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HEATACO_ERR_INTERNAL, "unknown error");
  }
}

heataco_status copy_string(const std::string& text, char* buffer, int capacity) {
  if (!buffer || capacity <= int(text.size()))
    return fail(HEATACO_ERR_INVALID_ARGUMENT,
                "buffer too small: need " + std::to_string(text.size() + 1) + " bytes");
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return HEATACO_OK;
}

MmasParams to_mmas_params(const heataco_params& p) {
  MmasParams out;
  out.alpha = p.alpha;
  out.beta = p.beta;
  out.gamma = p.gamma;
  out.rho = p.rho;
  out.ants = p.ants;
  out.iterations = p.iterations;
  out.seed = p.seed;
  out.threads = p.threads;
  switch (p.local_search) {
    case HEATACO_LS_NONE: out.local_search = LocalSearchKind::None; break;
    case HEATACO_LS_2OPT: out.local_search = LocalSearchKind::TwoOpt; break;
    case HEATACO_LS_3OPT: out.local_search = LocalSearchKind::ThreeOpt; break;
    default: throw std::invalid_argument("bad local_search value");
  }
  switch (p.evaporation_scope) {
    case HEATACO_EVAP_AUTO: break;
    case HEATACO_EVAP_FULL: out.evaporation_scope = EvaporationScope::FullMatrix; break;
    case HEATACO_EVAP_CANDIDATE: out.evaporation_scope = EvaporationScope::CandidateBased; break;
    default: throw std::invalid_argument("bad evaporation_scope value");
  }
  switch (p.deposit_rule) {
    case HEATACO_DEPOSIT_GLOBAL_BEST: out.deposit = DepositRule::GlobalBest; break;
    case HEATACO_DEPOSIT_ITERATION_BEST: out.deposit = DepositRule::IterationBest; break;
    default: throw std::invalid_argument("bad deposit_rule value");
  }
  out.ls.max_passes_2opt = p.max_passes_2opt;
  out.ls.max_passes_3opt = p.max_passes_3opt;
  return out;
}

}  // namespace

struct heataco_instance {
  TspInstance instance;
  DistanceMatrix dist;
};

struct heataco_heatmap {
  Heatmap map;  // symmetrized on load
};

struct heataco_tour {
  Tour tour;
};

struct heataco_experiment {
  RunConfig config;
  ExperimentResult result;
  bool ran = false;
};

extern "C" {

const char* heataco_version(void) { return "0.1.0"; }

const char* heataco_last_error(void) { return g_last_error.c_str(); }

static heataco_status load_instance_impl(const char* path, heataco_instance** out, int kind) {
  return guarded([&]() -> heataco_status {
    if (!path || !out) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    TspInstance inst;
    if (kind == 0) {
      inst = load_instance(path);
    } else {
      std::ifstream in(path);
      if (!in) return fail(HEATACO_ERR_IO, std::string("cannot open instance file: ") + path);
      inst = kind == 1 ? parse_tsplib(in) : parse_coords(in);
    }
    auto* handle = new heataco_instance{std::move(inst), {}};
    handle->dist = compute_distance_matrix(handle->instance);
    *out = handle;
    return HEATACO_OK;
  });
}

heataco_status heataco_instance_load(const char* path, heataco_instance** out) {
  return load_instance_impl(path, out, 0);
}

heataco_status heataco_instance_load_tsplib(const char* path, heataco_instance** out) {
  return load_instance_impl(path, out, 1);
}

heataco_status heataco_instance_load_coords(const char* path, heataco_instance** out) {
  return load_instance_impl(path, out, 2);
}

void heataco_instance_free(heataco_instance* instance) { delete instance; }

int heataco_instance_size(const heataco_instance* instance) {
  return instance ? instance->instance.n : 0;
}

heataco_status heataco_heatmap_load(const char* path, int expected_n, heataco_heatmap** out) {
  return guarded([&]() -> heataco_status {
    if (!path || !out) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    Heatmap map = symmetrized(load_heatmap(path, expected_n));
    *out = new heataco_heatmap{std::move(map)};
    return HEATACO_OK;
  });
}

heataco_status heataco_heatmap_uniform(int n, double value, heataco_heatmap** out) {
  return guarded([&]() -> heataco_status {
    if (!out) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    if (n < 3) return fail(HEATACO_ERR_INVALID_ARGUMENT, "need n >= 3");
    if (!(value >= 0.0 && value <= 1.0))
      return fail(HEATACO_ERR_DOMAIN, "confidence outside [0,1]");
    *out = new heataco_heatmap{Heatmap::uniform(n, value)};
    return HEATACO_OK;
  });
}

void heataco_heatmap_free(heataco_heatmap* heatmap) { delete heatmap; }

int heataco_heatmap_size(const heataco_heatmap* heatmap) {
  return heatmap ? heatmap->map.size() : 0;
}

void heataco_tour_free(heataco_tour* tour) { delete tour; }

int heataco_tour_size(const heataco_tour* tour) {
  return tour ? int(tour->tour.perm.size()) : 0;
}

double heataco_tour_length(const heataco_tour* tour) { return tour ? tour->tour.length : 0.0; }

heataco_status heataco_tour_nodes(const heataco_tour* tour, int32_t* buffer, int capacity) {
  return guarded([&]() -> heataco_status {
    if (!tour || !buffer) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    if (capacity < int(tour->tour.perm.size()))
      return fail(HEATACO_ERR_INVALID_ARGUMENT, "buffer too small");
    for (std::size_t i = 0; i < tour->tour.perm.size(); ++i)
      buffer[i] = int32_t(tour->tour.perm[i]);
    return HEATACO_OK;
  });
}

heataco_status heataco_tour_save(const heataco_tour* tour, const char* path) {
  return guarded([&]() -> heataco_status {
    if (!tour || !path) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    std::ofstream out(path);
    if (!out) return fail(HEATACO_ERR_IO, std::string("cannot write tour file: ") + path);
    write_tour(out, tour->tour);
    return HEATACO_OK;
  });
}

heataco_status heataco_tour_load(const char* path, const heataco_instance* instance,
                                 heataco_tour** out) {
  return guarded([&]() -> heataco_status {
    if (!path || !instance || !out) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    const ReferenceTour ref = load_reference_tour(path);
    if (auto violation = validate_tour(ref.perm, instance->instance.n))
      return fail(HEATACO_ERR_INFEASIBLE, *violation);
    *out = new heataco_tour{make_tour(ref.perm, instance->dist)};
    return HEATACO_OK;
  });
}

heataco_status heataco_reference_length(const char* path, double* out) {
  return guarded([&]() -> heataco_status {
    if (!path || !out) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    const ReferenceTour ref = load_reference_tour(path);
    if (!ref.reference_length)
      return fail(HEATACO_ERR_UNDEFINED, "tour file carries no L_star line");
    *out = *ref.reference_length;
    return HEATACO_OK;
  });
}

heataco_status heataco_gap_percent(double length, double reference_length, double* out) {
  return guarded([&]() -> heataco_status {
    if (!out) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    *out = optimality_gap(length, reference_length);
    return HEATACO_OK;
  });
}

void heataco_params_init(heataco_params* params) {
  if (!params) return;
  const MmasParams defaults;
  params->alpha = defaults.alpha;
  params->beta = defaults.beta;
  params->gamma = defaults.gamma;
  params->rho = defaults.rho;
  params->ants = defaults.ants;
  params->iterations = defaults.iterations;
  params->seed = defaults.seed;
  params->local_search = HEATACO_LS_NONE;
  params->evaporation_scope = HEATACO_EVAP_AUTO;
  params->deposit_rule = HEATACO_DEPOSIT_GLOBAL_BEST;
  params->candidate_k = kDefaultCandidateK;
  params->threads = 16;  // benchmark-protocol default; HEATACO_THREADS overrides in the CLI
  params->max_passes_2opt = defaults.ls.max_passes_2opt;
  params->max_passes_3opt = defaults.ls.max_passes_3opt;
  params->eps_h = kDefaultEpsH;
  params->eps_floor = kDefaultEpsFloor;
}

static heataco_status decode_impl(const heataco_instance* instance,
                                  const heataco_heatmap* heatmap, const heataco_params* params,
                                  const char* trace_path, heataco_tour** out,
                                  double* decode_seconds) {
  return guarded([&]() -> heataco_status {
    if (!instance || !params || !out)
      return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    const MmasParams mmas = to_mmas_params(*params);

    FlooredHeatmap floored;
    CandidateLists candidates;
    if (heatmap) {
      floored = clip_floor(heatmap->map, params->eps_h, params->eps_floor);
      candidates = build_candidate_lists(floored, instance->dist, params->candidate_k);
    } else {
      candidates = knn_candidate_lists(instance->dist, params->candidate_k);
    }

    const auto t0 = std::chrono::steady_clock::now();
    RunResult result =
        run_mmas(instance->dist, heatmap ? &floored : nullptr, candidates, mmas);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (auto violation = validate_tour(result.best.perm, instance->instance.n))
      return fail(HEATACO_ERR_INFEASIBLE, *violation);

    if (trace_path) {
      std::ofstream trace(trace_path);
      if (!trace) return fail(HEATACO_ERR_IO, std::string("cannot write trace: ") + trace_path);
      write_trace_jsonl(trace, result.trace);
    }
    if (decode_seconds) *decode_seconds = seconds;
    *out = new heataco_tour{std::move(result.best)};
    return HEATACO_OK;
  });
}

heataco_status heataco_decode(const heataco_instance* instance, const heataco_heatmap* heatmap,
                              const heataco_params* params, heataco_tour** out) {
  return decode_impl(instance, heatmap, params, nullptr, out, nullptr);
}

heataco_status heataco_decode_traced(const heataco_instance* instance,
                                     const heataco_heatmap* heatmap,
                                     const heataco_params* params, const char* trace_path,
                                     heataco_tour** out, double* decode_seconds) {
  return decode_impl(instance, heatmap, params, trace_path, out, decode_seconds);
}

heataco_status heataco_decode_greedy(const heataco_instance* instance,
                                     const heataco_heatmap* heatmap, heataco_tour** out) {
  return guarded([&]() -> heataco_status {
    if (!instance || !heatmap || !out)
      return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    Tour tour = greedy_merge(heatmap->map, instance->dist);
    if (auto violation = validate_tour(tour.perm, instance->instance.n))
      return fail(HEATACO_ERR_INFEASIBLE, *violation);
    *out = new heataco_tour{std::move(tour)};
    return HEATACO_OK;
  });
}

heataco_status heataco_select_gamma(const heataco_instance* instance,
                                    const heataco_heatmap* heatmap,
                                    const heataco_params* params, double target,
                                    const double* grid, int grid_len, double* gamma_out,
                                    double* support_out) {
  return guarded([&]() -> heataco_status {
    if (!instance || !heatmap || !params || !gamma_out)
      return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    const FlooredHeatmap floored =
        clip_floor(heatmap->map, params->eps_h, params->eps_floor);
    const CandidateLists candidates =
        build_candidate_lists(floored, instance->dist, params->candidate_k);
    const double effective_target =
        target > 0.0 ? target
                     : (params->local_search == HEATACO_LS_NONE ? kSupportTargetNoLs
                                                                : kSupportTargetWithLs);
    std::vector<double> grid_values;
    if (grid && grid_len > 0)
      grid_values.assign(grid, grid + grid_len);
    else
      grid_values.assign(kDefaultGammaGrid.begin(), kDefaultGammaGrid.end());

    const GammaSelection sel = select_gamma(floored, candidates, effective_target, grid_values);
    *gamma_out = sel.gamma;
    if (support_out) *support_out = sel.effective_support;
    return HEATACO_OK;
  });
}

heataco_status heataco_diagnose(const char* instance_path, const char* heatmap_path,
                                const char* reference_path, const char* filters,
                                const char* report_path) {
  return guarded([&]() -> heataco_status {
    if (!instance_path || !heatmap_path || !reference_path || !report_path)
      return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    DiagnoseRequest request;
    request.instance_path = instance_path;
    request.heatmap_path = heatmap_path;
    request.reference_path = reference_path;
    if (filters) request.filters = parse_filter_specs(filters);
    std::ofstream out(report_path);
    if (!out) return fail(HEATACO_ERR_IO, std::string("cannot write report: ") + report_path);
    run_diagnostics(request, out);
    return HEATACO_OK;
  });
}

heataco_status heataco_experiment_new(heataco_experiment** out) {
  return guarded([&]() -> heataco_status {
    if (!out) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    auto* handle = new heataco_experiment;
    handle->config.jobs.clear();
    *out = handle;
    return HEATACO_OK;
  });
}

void heataco_experiment_free(heataco_experiment* experiment) { delete experiment; }

heataco_status heataco_experiment_add_job(heataco_experiment* experiment,
                                          const char* instance_path, const char* heatmap_path,
                                          const char* reference_path) {
  return guarded([&]() -> heataco_status {
    if (!experiment || !instance_path)
      return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    InstanceJob job;
    job.instance_path = instance_path;
    if (heatmap_path) job.heatmap_path = heatmap_path;
    if (reference_path) job.reference_path = reference_path;
    experiment->config.jobs.push_back(std::move(job));
    return HEATACO_OK;
  });
}

heataco_status heataco_experiment_set_decoder(heataco_experiment* experiment,
                                              const char* decoder) {
  return guarded([&]() -> heataco_status {
    if (!experiment || !decoder) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    const std::string name = decoder;
    if (name == "greedy")
      experiment->config.decoder = Decoder::Greedy;
    else if (name == "mmas")
      experiment->config.decoder = Decoder::Mmas;
    else if (name == "heataco")
      experiment->config.decoder = Decoder::Heataco;
    else
      return fail(HEATACO_ERR_INVALID_ARGUMENT, "unknown decoder '" + name + "'");
    return HEATACO_OK;
  });
}

heataco_status heataco_experiment_set_params(heataco_experiment* experiment,
                                             const heataco_params* params) {
  return guarded([&]() -> heataco_status {
    if (!experiment || !params) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    experiment->config.mmas = to_mmas_params(*params);
    experiment->config.candidate_k = params->candidate_k;
    experiment->config.eps_h = params->eps_h;
    experiment->config.eps_floor = params->eps_floor;
    return HEATACO_OK;
  });
}

heataco_status heataco_experiment_set_seeds(heataco_experiment* experiment,
                                            const uint64_t* seeds, int count) {
  return guarded([&]() -> heataco_status {
    if (!experiment || !seeds || count < 1)
      return fail(HEATACO_ERR_INVALID_ARGUMENT, "need at least one seed");
    experiment->config.seeds.assign(seeds, seeds + count);
    return HEATACO_OK;
  });
}

heataco_status heataco_experiment_set_output_dir(heataco_experiment* experiment,
                                                 const char* dir) {
  return guarded([&]() -> heataco_status {
    if (!experiment) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    experiment->config.output_dir = dir ? dir : "";
    return HEATACO_OK;
  });
}

heataco_status heataco_experiment_set_gamma_mode(heataco_experiment* experiment,
                                                 const char* mode) {
  return guarded([&]() -> heataco_status {
    if (!experiment || !mode) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    const std::string name = mode;
    if (name == "fixed")
      experiment->config.gamma_mode = GammaMode::Fixed;
    else if (name == "grid")
      experiment->config.gamma_mode = GammaMode::GridSweep;
    else if (name == "entropy")
      experiment->config.gamma_mode = GammaMode::EntropyTarget;
    else
      return fail(HEATACO_ERR_INVALID_ARGUMENT, "unknown gamma mode '" + name + "'");
    return HEATACO_OK;
  });
}

heataco_status heataco_experiment_set_gamma_grid(heataco_experiment* experiment,
                                                 const double* grid, int count) {
  return guarded([&]() -> heataco_status {
    if (!experiment || !grid || count < 1)
      return fail(HEATACO_ERR_INVALID_ARGUMENT, "need a nonempty grid");
    experiment->config.gamma_grid.assign(grid, grid + count);
    return HEATACO_OK;
  });
}

heataco_status heataco_experiment_set_support_target(heataco_experiment* experiment,
                                                     double target) {
  return guarded([&]() -> heataco_status {
    if (!experiment) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    if (!(target > 0.0)) return fail(HEATACO_ERR_DOMAIN, "support target must be positive");
    experiment->config.support_target = target;
    return HEATACO_OK;
  });
}

heataco_status heataco_experiment_run(heataco_experiment* experiment) {
  return guarded([&]() -> heataco_status {
    if (!experiment) return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    if (experiment->config.gamma_mode == GammaMode::GridSweep)
      experiment->result = sweep_gamma(experiment->config, experiment->config.gamma_grid);
    else
      experiment->result = run_experiment(experiment->config);
    experiment->ran = true;
    return HEATACO_OK;
  });
}

int heataco_experiment_row_count(const heataco_experiment* experiment) {
  return experiment && experiment->ran ? int(experiment->result.rows.size()) : 0;
}

heataco_status heataco_experiment_csv_header(char* buffer, int capacity) {
  return copy_string(report_csv_header(), buffer, capacity);
}

heataco_status heataco_experiment_row_csv(const heataco_experiment* experiment, int index,
                                          char* buffer, int capacity) {
  if (!experiment || !experiment->ran || index < 0 ||
      index >= int(experiment->result.rows.size()))
    return fail(HEATACO_ERR_INVALID_ARGUMENT, "row index out of range");
  return copy_string(report_csv_row(experiment->result.rows[index]), buffer, capacity);
}

int heataco_experiment_warning_count(const heataco_experiment* experiment) {
  return experiment && experiment->ran ? int(experiment->result.warnings.size()) : 0;
}

heataco_status heataco_experiment_warning(const heataco_experiment* experiment, int index,
                                          char* buffer, int capacity) {
  if (!experiment || !experiment->ran || index < 0 ||
      index >= int(experiment->result.warnings.size()))
    return fail(HEATACO_ERR_INVALID_ARGUMENT, "warning index out of range");
  return copy_string(experiment->result.warnings[index], buffer, capacity);
}

heataco_status heataco_convergence_emit(const char* const* trace_paths,
                                        const char* const* method_names, int method_count,
                                        double plot_alpha, double t_mid_fraction,
                                        const char* out_path) {
  return guarded([&]() -> heataco_status {
    if (!trace_paths || !method_names || method_count < 1 || !out_path)
      return fail(HEATACO_ERR_INVALID_ARGUMENT, "null argument");
    std::vector<std::string> names;
    std::vector<std::vector<double>> traces;
    for (int m = 0; m < method_count; ++m) {
      std::ifstream in(trace_paths[m]);
      if (!in)
        return fail(HEATACO_ERR_IO, std::string("cannot open trace: ") + trace_paths[m]);
      traces.push_back(read_trace_best_lengths(in));
      names.emplace_back(method_names[m]);
    }
    std::ofstream out(out_path);
    if (!out) return fail(HEATACO_ERR_IO, std::string("cannot write plot data: ") + out_path);
    emit_convergence_csv(out, names, traces, plot_alpha, t_mid_fraction);
    return HEATACO_OK;
  });
}

}  // extern "C"
