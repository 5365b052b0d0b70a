#include "dslr/dslr.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <random>
#include <string>
#include <vector>

#include "core/accel_sim.hpp"
#include "core/baseline.hpp"
#include "core/error.hpp"
#include "core/model_zoo.hpp"
#include "core/perf_model.hpp"
#include "core/report_format.hpp"
#include "core/tensor_io.hpp"

using namespace dslr;

struct dslr_config {
  zoo::ModelConfig model;
  baseline::TilesForm tiles = baseline::TilesForm::Product;
  bool literal_phases = false;
  perf::TrafficModel traffic = perf::TrafficModel::Unique;
};

struct dslr_report {
  perf::PerfReport rep;
};

namespace {

thread_local std::string g_last_error;

constexpr std::int64_t kDefaultStepGuard = std::int64_t(1) << 28;

dslr_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return DSLR_ERR_INVALID_ARGUMENT;
    case ErrorCode::Overflow: return DSLR_ERR_OVERFLOW;
    case ErrorCode::Shape: return DSLR_ERR_SHAPE;
    case ErrorCode::Range: return DSLR_ERR_RANGE;
    case ErrorCode::Parse: return DSLR_ERR_PARSE;
    case ErrorCode::Validation: return DSLR_ERR_VALIDATION;
    case ErrorCode::UnknownNetwork: return DSLR_ERR_UNKNOWN_NETWORK;
    case ErrorCode::Io: return DSLR_ERR_IO;
    case ErrorCode::Resource: return DSLR_ERR_RESOURCE;
    case ErrorCode::State: return DSLR_ERR_STATE;
  }
  return DSLR_ERR_INTERNAL;
}

template <class F>
dslr_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return DSLR_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DSLR_ERR_RESOURCE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DSLR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return DSLR_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void positive(double v, const char* what) {
  if (!(v > 0)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be > 0");
}

perf::ReportOptions report_options(const dslr_config& cfg) {
  perf::ReportOptions o;
  o.tile = cfg.model.tile;
  o.dslr_hw = cfg.model.dslr_hw;
  o.baseline_hw = cfg.model.baseline_hw;
  o.baseline = cfg.literal_phases ? baseline::BaselineConfig::literal(o.tile)
                               : baseline::BaselineConfig::for_tile(o.tile);
  o.baseline.tiles = cfg.tiles;
  o.traffic = cfg.traffic;
  return o;
}

LayerConfig to_layer(const dslr_layer_spec* s) {
  need(s, "layer");
  LayerConfig l;
  l.name = s->name ? s->name : "layer";
  l.N = s->N;
  l.M = s->M;
  l.R = s->R;
  l.C = s->C;
  l.K = s->K;
  l.stride = s->stride == 0 ? 1 : s->stride;
  l.padding = s->padding;
  require_valid(l);
  return l;
}

TileConfig tile_of(const dslr_config* cfg) { return cfg ? cfg->model.tile : TileConfig{}; }

const perf::DesignReport& design_of(const dslr_report* rep, dslr_design d) {
  need(rep, "report");
  if (d == DSLR_DESIGN_ONLINE) return rep->rep.dslr;
  if (d == DSLR_DESIGN_BASELINE && rep->rep.baseline) return *rep->rep.baseline;
  throw Error(ErrorCode::InvalidArgument, "report has no such design");
}

report::Format format_of(dslr_format f) {
  if (f == DSLR_FORMAT_CSV) return report::Format::Csv;
  if (f == DSLR_FORMAT_JSON) return report::Format::Json;
  throw Error(ErrorCode::InvalidArgument, "unknown format");
}

accel::Tensor random_tensor(std::vector<std::int64_t> shape, int width, std::mt19937_64& rng) {
  accel::Tensor t = accel::Tensor::fixed(std::move(shape), width);
  // Top bits of the engine output, so the values do not depend on the
  // standard library's distribution implementation.
  for (auto& v : t.data) v = std::int64_t(rng() >> (64 - width)) - (std::int64_t(1) << (width - 1));
  return t;
}

void check_guard(const LayerConfig& l, const TileConfig& tile, const dslr_sim_options& o) {
  const std::int64_t guard = o.max_multiplier_steps > 0 ? o.max_multiplier_steps : kDefaultStepGuard;
  const std::int64_t est = accel::estimated_multiplier_steps(l, tile);
  if (est > guard) {
    throw Error(ErrorCode::Resource, "layer needs " + std::to_string(est) +
                                         " multiplier steps, above the guard of " + std::to_string(guard) +
                                         "; refusing to simulate");
  }
}

void simulate(const LayerConfig& l, const TileConfig& tile, const accel::Tensor& in, const accel::Tensor& w,
              const dslr_sim_options& o, dslr_sim_result* r, const char* output_path) {
  std::memset(r, 0, sizeof *r);
  const accel::Tensor ref = accel::reference_conv(l, in, w);
  r->predicted_cycles = perf::dslr_cycles(l, tile);
  r->expected_weight_loads = ceil_div(l.M, tile.Tm) * ceil_div(l.N, tile.Tn);
  r->expected_first_digit_step = int(tile.delta_mult + tile.delta_add * (online::ceil_log2(std::uint64_t(l.K * l.K)) +
                                                                          online::ceil_log2(std::uint64_t(tile.Tn))) +
                                     1);
  accel::SimOptions so;
  so.threads = o.threads;
  so.inject_adder_fault = o.inject_adder_fault != 0;
  accel::RunResult run;
  try {
    run = accel::run_layer(l, tile, in, w, so);
  } catch (const Error& e) {
    // A corrupted datapath can leave digits that no longer form an exact
    // accumulator value; that is a verification failure, not an API error.
    if (e.code() != ErrorCode::Range && e.code() != ErrorCode::State) throw;
    r->mismatches = std::int64_t(ref.size());
    return;
  }
  r->measured_cycles = run.measured_cycles;
  r->per_pass_cycles = run.per_pass_cycles;
  r->passes = run.passes;
  r->first_digit_step = run.first_digit_step;
  r->weight_loads = run.weight_loads;
  r->multiplier_steps = run.multiplier_steps;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (run.outputs.data[i] != ref.data[i]) ++r->mismatches;
  }
  r->outputs_match = r->mismatches == 0 && run.outputs.frac_bits == ref.frac_bits;
  r->outputs_all_zero = 1;
  for (auto v : run.outputs.data) {
    if (v != 0) r->outputs_all_zero = 0;
  }
  r->cycles_match = run.measured_cycles == r->predicted_cycles;
  r->weight_loads_match = run.weight_loads == r->expected_weight_loads;
  r->latency_match = run.first_digit_step == r->expected_first_digit_step;
  if (output_path) io::save_tensor(output_path, run.outputs);
}

}  // namespace

extern "C" {

const char* dslr_version(void) { return "0.1.0"; }

const char* dslr_last_error(void) { return g_last_error.c_str(); }

const char* dslr_status_string(dslr_status s) {
  switch (s) {
    case DSLR_OK: return "ok";
    case DSLR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DSLR_ERR_OVERFLOW: return "overflow";
    case DSLR_ERR_SHAPE: return "shape mismatch";
    case DSLR_ERR_RANGE: return "out of range";
    case DSLR_ERR_PARSE: return "parse error";
    case DSLR_ERR_VALIDATION: return "validation error";
    case DSLR_ERR_UNKNOWN_NETWORK: return "unknown network";
    case DSLR_ERR_IO: return "i/o error";
    case DSLR_ERR_RESOURCE: return "resource limit";
    case DSLR_ERR_STATE: return "invalid state";
    case DSLR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void dslr_string_free(char* s) { std::free(s); }

dslr_status dslr_config_builtin(const char* network, dslr_config** out) {
  return guarded([&] {
    need(network, "network");
    need(out, "out");
    auto* c = new dslr_config;
    try {
      c->model.network = zoo::builtin(network);
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
  });
}

dslr_status dslr_config_load(const char* path, dslr_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto m = zoo::load_config(path);
    *out = new dslr_config{std::move(m)};
  });
}

dslr_status dslr_config_parse(const char* json_text, dslr_config** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    auto m = zoo::parse_config(json_text);
    *out = new dslr_config{std::move(m)};
  });
}

void dslr_config_free(dslr_config* cfg) { delete cfg; }

dslr_status dslr_config_network_name(const dslr_config* cfg, const char** name) {
  return guarded([&] {
    need(cfg, "config");
    need(name, "name");
    *name = cfg->model.network.name.c_str();
  });
}

dslr_status dslr_config_warning_count(const dslr_config* cfg, size_t* count) {
  return guarded([&] {
    need(cfg, "config");
    need(count, "count");
    *count = cfg->model.warnings.size();
  });
}

dslr_status dslr_config_warning(const dslr_config* cfg, size_t index, const char** message) {
  return guarded([&] {
    need(cfg, "config");
    need(message, "message");
    if (index >= cfg->model.warnings.size()) throw Error(ErrorCode::Range, "warning index out of range");
    *message = cfg->model.warnings[index].c_str();
  });
}

dslr_status dslr_config_emit(const dslr_config* cfg, char** json_text) {
  return guarded([&] {
    need(cfg, "config");
    need(json_text, "json_text");
    *json_text = dup_string(zoo::emit_config(cfg->model));
  });
}

dslr_status dslr_config_set_freq(dslr_config* cfg, double mhz) {
  return guarded([&] {
    need(cfg, "config");
    positive(mhz, "frequency");
    cfg->model.tile.clock_mhz = mhz;
    cfg->model.dslr_hw.clock_mhz = mhz;
    cfg->model.baseline_hw.clock_mhz = mhz;
  });
}

dslr_status dslr_config_set_power(dslr_config* cfg, double mw) {
  return guarded([&] {
    need(cfg, "config");
    positive(mw, "power");
    cfg->model.dslr_hw.power_mw = mw;
  });
}

dslr_status dslr_config_set_area(dslr_config* cfg, double um2) {
  return guarded([&] {
    need(cfg, "config");
    positive(um2, "area");
    cfg->model.dslr_hw.area_um2 = um2;
  });
}

dslr_status dslr_config_set_tiles_form(dslr_config* cfg, dslr_tiles_form form) {
  return guarded([&] {
    need(cfg, "config");
    if (form == DSLR_TILES_PRODUCT) {
      cfg->tiles = baseline::TilesForm::Product;
    } else if (form == DSLR_TILES_PERCOORD) {
      cfg->tiles = baseline::TilesForm::PerCoord;
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown tiles form");
    }
  });
}

dslr_status dslr_config_set_literal_phases(dslr_config* cfg, int literal) {
  return guarded([&] {
    need(cfg, "config");
    cfg->literal_phases = literal != 0;
  });
}

dslr_status dslr_config_set_traffic(dslr_config* cfg, dslr_traffic model) {
  return guarded([&] {
    need(cfg, "config");
    if (model == DSLR_TRAFFIC_UNIQUE) {
      cfg->traffic = perf::TrafficModel::Unique;
    } else if (model == DSLR_TRAFFIC_REWRITES) {
      cfg->traffic = perf::TrafficModel::Rewrites;
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown traffic model");
    }
  });
}

dslr_status dslr_config_layer_count(const dslr_config* cfg, size_t* count) {
  return guarded([&] {
    need(cfg, "config");
    need(count, "count");
    *count = cfg->model.network.layers.size();
  });
}

dslr_status dslr_config_layer(const dslr_config* cfg, size_t index, dslr_layer_spec* out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    const auto& layers = cfg->model.network.layers;
    if (index >= layers.size()) throw Error(ErrorCode::Range, "layer index out of range");
    const LayerConfig& l = layers[index];
    *out = dslr_layer_spec{l.name.c_str(), l.N, l.M, l.R, l.C, l.K, l.stride, l.padding};
  });
}

dslr_status dslr_config_find_layer(const dslr_config* cfg, const char* name, size_t* index) {
  return guarded([&] {
    need(cfg, "config");
    need(name, "name");
    need(index, "index");
    const auto& layers = cfg->model.network.layers;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (layers[i].name == name) {
        *index = i;
        return;
      }
    }
    throw Error(ErrorCode::InvalidArgument, "no layer named '" + std::string(name) + "' in network " +
                                                cfg->model.network.name);
  });
}

dslr_status dslr_report_build(const dslr_config* cfg, unsigned flags, dslr_report** out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    perf::ReportOptions o = report_options(*cfg);
    o.include_baseline = (flags & DSLR_REPORT_BASELINE) != 0;
    o.self_compare = (flags & DSLR_REPORT_SELF_COMPARE) != 0;
    auto r = perf::build_report(cfg->model.network, o);
    *out = new dslr_report{std::move(r)};
  });
}

void dslr_report_free(dslr_report* rep) { delete rep; }

dslr_status dslr_report_layer_count(const dslr_report* rep, size_t* count) {
  return guarded([&] {
    need(rep, "report");
    need(count, "count");
    *count = rep->rep.dslr.layers.size();
  });
}

dslr_status dslr_report_layer(const dslr_report* rep, dslr_design design, size_t index, dslr_layer_metrics* out) {
  return guarded([&] {
    need(out, "out");
    const auto& d = design_of(rep, design);
    if (index >= d.layers.size()) throw Error(ErrorCode::Range, "layer index out of range");
    const auto& m = d.layers[index];
    *out = dslr_layer_metrics{m.layer.c_str(), m.cycles, m.duration_ms, m.ops, m.gops,
                              m.tops_per_w, m.gops_per_mm2, m.oi};
  });
}

dslr_status dslr_report_summary(const dslr_report* rep, dslr_design design, dslr_summary* out) {
  return guarded([&] {
    need(out, "out");
    const auto& s = design_of(rep, design).summary;
    *out = dslr_summary{s.total_cycles, s.total_ms, s.mean_ms, s.peak_gops, s.peak_tops_per_w,
                        s.peak_gops_per_mm2};
  });
}

dslr_status dslr_report_speedup(const dslr_report* rep, double* speedup) {
  return guarded([&] {
    need(rep, "report");
    need(speedup, "speedup");
    if (!rep->rep.speedup) throw Error(ErrorCode::State, "report was built without a baseline");
    *speedup = *rep->rep.speedup;
  });
}

dslr_status dslr_report_render(const dslr_report* rep, dslr_format format, char** out) {
  return guarded([&] {
    need(rep, "report");
    need(out, "out");
    *out = dup_string(report::render_report(rep->rep, format_of(format)));
  });
}

dslr_status dslr_report_roofline(const dslr_report* rep, dslr_format format, char** out) {
  return guarded([&] {
    need(rep, "report");
    need(out, "out");
    *out = dup_string(report::render_roofline(rep->rep, format_of(format)));
  });
}

dslr_status dslr_compare_render(const dslr_report* const* reps, size_t count, dslr_format format, char** out) {
  return guarded([&] {
    need(out, "out");
    if (count == 0) throw Error(ErrorCode::InvalidArgument, "nothing to compare");
    need(reps, "reports");
    std::vector<perf::PerfReport> v;
    for (size_t i = 0; i < count; ++i) {
      need(reps[i], "report");
      v.push_back(reps[i]->rep);
    }
    *out = dup_string(report::render_compare(v, format_of(format)));
  });
}

void dslr_sim_options_init(dslr_sim_options* opts) {
  if (!opts) return;
  *opts = dslr_sim_options{0, 0, 0, 0, kDefaultStepGuard};
}

dslr_status dslr_estimate_steps(const dslr_layer_spec* layer, const dslr_config* cfg, int64_t* steps) {
  return guarded([&] {
    need(steps, "steps");
    const LayerConfig l = to_layer(layer);
    const TileConfig tile = tile_of(cfg);
    require_valid(tile);
    *steps = accel::estimated_multiplier_steps(l, tile);
  });
}

dslr_status dslr_simulate_layer(const dslr_layer_spec* layer, const dslr_config* cfg, const dslr_sim_options* opts,
                                dslr_sim_result* result) {
  return guarded([&] {
    need(opts, "options");
    need(result, "result");
    const LayerConfig l = to_layer(layer);
    const TileConfig tile = tile_of(cfg);
    require_valid(tile);
    check_guard(l, tile, *opts);
    const int width = int(tile.precision);
    if (width < 2 || width > 24) throw Error(ErrorCode::Validation, "simulated precision must lie in [2, 24]");
    std::mt19937_64 rng(opts->seed);
    accel::Tensor in = random_tensor({l.N, l.input_rows(), l.input_cols()}, width, rng);
    accel::Tensor w = random_tensor({l.M, l.N, l.K, l.K}, width, rng);
    if (opts->zero_weights) std::fill(w.data.begin(), w.data.end(), 0);
    simulate(l, tile, in, w, *opts, result, nullptr);
  });
}

dslr_status dslr_simulate_files(const dslr_layer_spec* layer, const dslr_config* cfg, const char* input_path,
                                const char* weight_path, const char* output_path, const dslr_sim_options* opts,
                                dslr_sim_result* result) {
  return guarded([&] {
    need(input_path, "input_path");
    need(weight_path, "weight_path");
    need(opts, "options");
    need(result, "result");
    const LayerConfig l = to_layer(layer);
    const TileConfig tile = tile_of(cfg);
    require_valid(tile);
    check_guard(l, tile, *opts);
    const accel::Tensor in = io::load_tensor(input_path);
    accel::Tensor w = io::load_tensor(weight_path);
    if (opts->zero_weights) std::fill(w.data.begin(), w.data.end(), 0);
    simulate(l, tile, in, w, *opts, result, output_path);
  });
}

}  // extern "C"
