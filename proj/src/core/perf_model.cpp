#include "core/perf_model.hpp"

#include <algorithm>

#include "core/error.hpp"
#include "core/online_units.hpp"

namespace dslr::perf {

using online::ceil_log2;

HwProfile HwProfile::dslr_45nm() { return {"45nm", 1249.42, 84046898.0, 500.0, 1.0, 1.0}; }
HwProfile HwProfile::baseline_45nm() { return {"45nm", 795.21, 54206087.0, 500.0, 1.0, 1.0}; }

std::vector<std::string> validate(const HwProfile& hw) {
  std::vector<std::string> errs;
  const std::string who = hw.label.empty() ? std::string("hardware") : "hardware " + hw.label;
  if (!(hw.power_mw > 0)) errs.push_back(who + ": power_mw must be > 0");
  if (!(hw.area_um2 > 0)) errs.push_back(who + ": area_um2 must be > 0");
  if (!(hw.clock_mhz > 0)) errs.push_back(who + ": clock_mhz must be > 0");
  if (!(hw.freq_scale > 0)) errs.push_back(who + ": freq_scale must be > 0");
  if (!(hw.power_scale > 0)) errs.push_back(who + ": power_scale must be > 0");
  return errs;
}

std::int64_t dslr_per_pass_cycles(const LayerConfig& layer, const TileConfig& tile) {
  const std::int64_t kernel_depth = ceil_log2(std::uint64_t(layer.K * layer.K));
  const std::int64_t channel_depth = ceil_log2(std::uint64_t(tile.Tn));
  return tile.delta_mult + tile.delta_add * kernel_depth + tile.delta_add * channel_depth +
         tile.precision + kernel_depth + channel_depth;
}

std::int64_t dslr_cycles(const LayerConfig& layer, const TileConfig& tile) {
  require_valid(layer);
  require_valid(tile);
  return dslr_per_pass_cycles(layer, tile) * ceil_div(layer.R * layer.C, tile.Tr * tile.Tc) *
         ceil_div(layer.M, tile.Tm) * ceil_div(layer.N, tile.Tn);
}

std::int64_t layer_ops(const LayerConfig& l) { return 2 * l.M * l.N * l.R * l.C * l.K * l.K; }

double duration_ms(std::int64_t cycles, double clock_mhz) {
  if (!(clock_mhz > 0)) throw Error(ErrorCode::InvalidArgument, "clock must be > 0");
  return double(cycles) / (clock_mhz * 1e6) * 1e3;
}

double performance_gops(std::int64_t ops, double duration_ms) {
  if (!(duration_ms > 0)) throw Error(ErrorCode::InvalidArgument, "duration must be > 0");
  return double(ops) / (duration_ms * 1e-3) / 1e9;
}

Efficiency efficiency(double perf_gops, const HwProfile& hw) {
  // GOPS / mW == TOPS / W
  return {perf_gops / hw.effective_power_mw(), perf_gops / hw.area_mm2()};
}

std::int64_t traffic_bytes(const LayerConfig& l, const TileConfig& tile, int precision_bytes,
                           TrafficModel model) {
  std::int64_t words = l.N * l.input_rows() * l.input_cols() + l.M * l.N * l.K * l.K + l.M * l.R * l.C;
  if (model == TrafficModel::Rewrites) {
    words += 2 * l.M * l.R * l.C * (ceil_div(l.N, tile.Tn) - 1);
  }
  return words * precision_bytes;
}

double op_intensity(const LayerConfig& layer, const TileConfig& tile, int precision_bytes,
                    TrafficModel model) {
  return double(layer_ops(layer)) / double(traffic_bytes(layer, tile, precision_bytes, model));
}

namespace {

template <class CycleFn>
DesignReport design_report(const std::string& design, const NetworkDef& net, const HwProfile& hw,
                           const ReportOptions& opts, CycleFn cycles_of) {
  DesignReport rep;
  rep.design = design;
  rep.hw = hw;
  for (const auto& l : net.layers) {
    LayerMetrics m;
    m.layer = l.name;
    m.cycles = cycles_of(l);
    m.duration_ms = duration_ms(m.cycles, hw.effective_clock_mhz());
    m.ops = layer_ops(l);
    m.gops = performance_gops(m.ops, m.duration_ms);
    const Efficiency e = efficiency(m.gops, hw);
    m.tops_per_w = e.tops_per_w;
    m.gops_per_mm2 = e.gops_per_mm2;
    m.oi = op_intensity(l, opts.tile, opts.precision_bytes, opts.traffic);
    rep.layers.push_back(m);

    rep.summary.total_cycles += m.cycles;
    rep.summary.total_ms += m.duration_ms;
    rep.summary.peak_gops = std::max(rep.summary.peak_gops, m.gops);
  }
  rep.summary.mean_ms = rep.summary.total_ms / double(rep.layers.size());
  const Efficiency peak = efficiency(rep.summary.peak_gops, hw);
  rep.summary.peak_tops_per_w = peak.tops_per_w;
  rep.summary.peak_gops_per_mm2 = peak.gops_per_mm2;
  return rep;
}

void require_valid_hw(const HwProfile& hw) {
  auto errs = validate(hw);
  if (errs.empty()) return;
  std::string msg = "invalid hardware profile:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw Error(ErrorCode::Validation, msg);
}

}  // namespace

PerfReport build_report(const NetworkDef& net, const ReportOptions& opts) {
  if (net.layers.empty()) {
    throw Error(ErrorCode::Validation, "network '" + net.name + "' has no layers");
  }
  require_valid(opts.tile);
  for (const auto& l : net.layers) require_valid(l);
  require_valid_hw(opts.dslr_hw);

  PerfReport rep;
  rep.network = net.name;
  rep.dslr = design_report("dslr", net, opts.dslr_hw, opts,
                           [&](const LayerConfig& l) { return dslr_cycles(l, opts.tile); });
  if (opts.self_compare) {
    rep.baseline = rep.dslr;
  } else if (opts.include_baseline) {
    require_valid_hw(opts.baseline_hw);
    rep.baseline = design_report("baseline", net, opts.baseline_hw, opts, [&](const LayerConfig& l) {
      return baseline::baseline_cycles(l, opts.baseline);
    });
  }
  if (rep.baseline) {
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
      rep.layer_speedups.push_back(rep.baseline->layers[i].duration_ms / rep.dslr.layers[i].duration_ms);
    }
    rep.speedup = rep.baseline->summary.total_ms / rep.dslr.summary.total_ms;
  }
  return rep;
}

}  // namespace dslr::perf
