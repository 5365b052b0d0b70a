// Command-line front end. Reports go to stdout, diagnostics to stderr.

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dslr/dslr.h"

namespace {

struct ConfigDeleter {
  void operator()(dslr_config* c) const { dslr_config_free(c); }
};
struct ReportDeleter {
  void operator()(dslr_report* r) const { dslr_report_free(r); }
};
using ConfigPtr = std::unique_ptr<dslr_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<dslr_report, ReportDeleter>;

struct Failure {
  int exit_code;
};

void check(dslr_status s, const char* what) {
  if (s == DSLR_OK) return;
  std::fprintf(stderr, "dslr: %s: %s\n", what, dslr_last_error());
  throw Failure{s == DSLR_ERR_RESOURCE ? 3 : 2};
}

// Flags shared by every subcommand.
struct Common {
  std::vector<std::string> networks;
  std::vector<std::string> configs;
  std::optional<double> freq;
  std::optional<double> power;
  std::optional<double> area;
  std::string format = "csv";
  bool baseline = false;
  std::string tiles_form = "product";
  bool literal_phases = false;
  std::string traffic = "unique";
};

void add_common(CLI::App* app, Common& c, bool many_networks) {
  auto* net = app->add_option("--network", c.networks, "Built-in network: alexnet, vgg16, resnet18");
  auto* cfg = app->add_option("--config", c.configs, "JSON configuration file")->check(CLI::ExistingFile);
  if (!many_networks) {
    net->expected(1);
    cfg->expected(1);
    net->excludes(cfg);
  } else {
    net->delimiter(',');
  }
  app->add_option("--freq", c.freq, "Clock frequency in MHz (both designs)");
  app->add_option("--power", c.power, "Power of the online design in mW");
  app->add_option("--area", c.area, "Area of the online design in um^2");
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_flag("--baseline", c.baseline, "Include the bit-serial baseline");
  app->add_option("--tiles-form", c.tiles_form, "Baseline spatial tile count form")
      ->check(CLI::IsMember({"product", "percoord"}));
  app->add_flag("--eq5-literal", c.literal_phases, "Baseline phases of P cycles instead of 2P-1");
  app->add_option("--traffic", c.traffic, "Memory traffic model for operational intensity")
      ->check(CLI::IsMember({"unique", "rewrites"}));
}

dslr_format format_of(const Common& c) { return c.format == "json" ? DSLR_FORMAT_JSON : DSLR_FORMAT_CSV; }

ConfigPtr open_config(const Common& c, const std::string* network, const std::string* config_path) {
  dslr_config* raw = nullptr;
  if (config_path) {
    check(dslr_config_load(config_path->c_str(), &raw), config_path->c_str());
  } else if (network) {
    check(dslr_config_builtin(network->c_str(), &raw), "network");
  } else {
    std::fprintf(stderr, "dslr: one of --network or --config is required\n");
    throw Failure{2};
  }
  ConfigPtr cfg(raw);

  size_t warnings = 0;
  check(dslr_config_warning_count(cfg.get(), &warnings), "config");
  for (size_t i = 0; i < warnings; ++i) {
    const char* msg = nullptr;
    check(dslr_config_warning(cfg.get(), i, &msg), "config");
    std::fprintf(stderr, "dslr: warning: %s\n", msg);
  }

  if (c.freq) check(dslr_config_set_freq(cfg.get(), *c.freq), "--freq");
  if (c.power) check(dslr_config_set_power(cfg.get(), *c.power), "--power");
  if (c.area) check(dslr_config_set_area(cfg.get(), *c.area), "--area");
  check(dslr_config_set_tiles_form(cfg.get(), c.tiles_form == "percoord" ? DSLR_TILES_PERCOORD : DSLR_TILES_PRODUCT),
        "--tiles-form");
  check(dslr_config_set_literal_phases(cfg.get(), c.literal_phases ? 1 : 0), "--eq5-literal");
  check(dslr_config_set_traffic(cfg.get(), c.traffic == "rewrites" ? DSLR_TRAFFIC_REWRITES : DSLR_TRAFFIC_UNIQUE),
        "--traffic");
  return cfg;
}

ConfigPtr single_config(const Common& c) {
  const std::string* net = c.networks.empty() ? nullptr : &c.networks.front();
  const std::string* path = c.configs.empty() ? nullptr : &c.configs.front();
  return open_config(c, net, path);
}

void emit(char* text) {
  std::fputs(text, stdout);
  dslr_string_free(text);
}

ReportPtr build(const dslr_config* cfg, unsigned flags) {
  dslr_report* raw = nullptr;
  check(dslr_report_build(cfg, flags, &raw), "report");
  return ReportPtr(raw);
}

int cmd_model(const Common& c) {
  ConfigPtr cfg = single_config(c);
  ReportPtr rep = build(cfg.get(), c.baseline ? DSLR_REPORT_BASELINE : 0u);
  char* text = nullptr;
  check(dslr_report_render(rep.get(), format_of(c), &text), "render");
  emit(text);
  return 0;
}

int cmd_roofline(const Common& c) {
  ConfigPtr cfg = single_config(c);
  ReportPtr rep = build(cfg.get(), c.baseline ? DSLR_REPORT_BASELINE : 0u);
  char* text = nullptr;
  check(dslr_report_roofline(rep.get(), format_of(c), &text), "roofline");
  emit(text);
  return 0;
}

int cmd_compare(const Common& c, bool self) {
  std::vector<ConfigPtr> cfgs;
  for (const auto& n : c.networks) cfgs.push_back(open_config(c, &n, nullptr));
  for (const auto& p : c.configs) cfgs.push_back(open_config(c, nullptr, &p));
  if (cfgs.empty()) {
    for (const char* n : {"alexnet", "vgg16", "resnet18"}) {
      const std::string name = n;
      cfgs.push_back(open_config(c, &name, nullptr));
    }
  }
  std::vector<ReportPtr> reps;
  std::vector<const dslr_report*> raw;
  for (const auto& cfg : cfgs) {
    reps.push_back(build(cfg.get(), self ? DSLR_REPORT_SELF_COMPARE : DSLR_REPORT_BASELINE));
    raw.push_back(reps.back().get());
  }
  char* text = nullptr;
  check(dslr_compare_render(raw.data(), raw.size(), format_of(c), &text), "compare");
  emit(text);
  return 0;
}

struct SimArgs {
  std::string layer;
  std::vector<long long> dims;
  unsigned long long seed = 1;
  bool zero_weights = false;
  bool inject_fault = false;
  long long max_steps = 0;
  std::string inputs, weights, output;
};

int cmd_simulate(const Common& c, const SimArgs& s) {
  ConfigPtr cfg;
  dslr_layer_spec spec{};
  std::string name = "layer";
  if (!s.dims.empty()) {
    if (s.dims.size() != 5 && s.dims.size() != 7) {
      std::fprintf(stderr, "dslr: --dims takes N,M,R,C,K or N,M,R,C,K,stride,padding\n");
      return 2;
    }
    if (!c.configs.empty()) cfg = single_config(c);
    spec = dslr_layer_spec{name.c_str(), s.dims[0], s.dims[1], s.dims[2], s.dims[3], s.dims[4],
                           s.dims.size() == 7 ? s.dims[5] : 1, s.dims.size() == 7 ? s.dims[6] : 0};
  } else {
    cfg = single_config(c);
    size_t index = 0;
    if (!s.layer.empty()) {
      check(dslr_config_find_layer(cfg.get(), s.layer.c_str(), &index), "--layer");
    }
    check(dslr_config_layer(cfg.get(), index, &spec), "layer");
  }

  dslr_sim_options opts;
  dslr_sim_options_init(&opts);
  opts.seed = s.seed;
  opts.zero_weights = s.zero_weights ? 1 : 0;
  opts.inject_adder_fault = s.inject_fault ? 1 : 0;
  if (s.max_steps > 0) opts.max_multiplier_steps = s.max_steps;

  dslr_sim_result r{};
  if (!s.inputs.empty() || !s.weights.empty()) {
    if (s.inputs.empty() || s.weights.empty()) {
      std::fprintf(stderr, "dslr: --inputs and --weights go together\n");
      return 2;
    }
    check(dslr_simulate_files(&spec, cfg.get(), s.inputs.c_str(), s.weights.c_str(),
                              s.output.empty() ? nullptr : s.output.c_str(), &opts, &r),
          "simulate");
  } else {
    check(dslr_simulate_layer(&spec, cfg.get(), &opts, &r), "simulate");
  }

  std::printf("layer %s: N=%lld M=%lld R=%lld C=%lld K=%lld stride=%lld padding=%lld\n", spec.name,
              (long long)spec.N, (long long)spec.M, (long long)spec.R, (long long)spec.C, (long long)spec.K,
              (long long)(spec.stride ? spec.stride : 1), (long long)spec.padding);
  std::printf("passes %lld, cycles/pass %lld, multiplier steps %lld\n", (long long)r.passes,
              (long long)r.per_pass_cycles, (long long)r.multiplier_steps);
  bool ok = true;
  auto line = [&](bool pass, const std::string& text) {
    ok = ok && pass;
    std::printf("%s %s\n", pass ? "PASS" : "FAIL", text.c_str());
  };
  line(r.outputs_match, "outputs match direct convolution (" + std::to_string(r.mismatches) + " mismatches)");
  line(r.cycles_match, "measured cycles " + std::to_string(r.measured_cycles) + " == analytic " +
                           std::to_string(r.predicted_cycles));
  line(r.latency_match, "first SoP digit on step " + std::to_string(r.first_digit_step) + " (expected " +
                            std::to_string(r.expected_first_digit_step) + ")");
  line(r.weight_loads_match, "weight loads " + std::to_string(r.weight_loads) + " (expected " +
                                 std::to_string(r.expected_weight_loads) + ")");
  if (s.zero_weights) line(r.outputs_all_zero, "zero weights give zero outputs");
  std::printf("%s\n", ok ? "RESULT PASS" : "RESULT FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online-arithmetic CNN accelerator model and simulator", "dslr"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dslr_version()));

  Common model_c, sim_c, cmp_c, roof_c;
  SimArgs sim;
  bool self_compare = false;

  auto* model = app.add_subcommand("model", "Per-layer analytic performance report");
  add_common(model, model_c, false);

  auto* simulate = app.add_subcommand("simulate", "Digit-accurate run of one layer, checked against the oracle");
  add_common(simulate, sim_c, false);
  simulate->add_option("--layer", sim.layer, "Layer name within the network (default: first layer)");
  simulate->add_option("--dims", sim.dims, "Synthetic layer N,M,R,C,K[,stride,padding]")->delimiter(',');
  simulate->add_option("--seed", sim.seed, "Seed for random activations and weights");
  simulate->add_flag("--zero-weights", sim.zero_weights, "Use all-zero kernels");
  simulate->add_option("--inputs", sim.inputs, "Activation tensor file")->check(CLI::ExistingFile);
  simulate->add_option("--weights", sim.weights, "Kernel tensor file")->check(CLI::ExistingFile);
  simulate->add_option("--output", sim.output, "Write the accumulator outputs here");
  simulate->add_option("--max-steps", sim.max_steps, "Multiplier-step guard (default 2^28)");
  simulate->add_flag("--inject-adder-fault", sim.inject_fault)->group("");

  auto* compare = app.add_subcommand("compare", "Online design against the baseline, per network");
  add_common(compare, cmp_c, true);
  compare->add_flag("--self", self_compare, "Compare the online design against itself");

  auto* roofline = app.add_subcommand("roofline", "Operational intensity and throughput per layer");
  add_common(roofline, roof_c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*model) return cmd_model(model_c);
    if (*simulate) return cmd_simulate(sim_c, sim);
    if (*compare) return cmd_compare(cmp_c, self_compare);
    if (*roofline) return cmd_roofline(roof_c);
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return 2;
}
