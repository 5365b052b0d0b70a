#pragma once

// Analytic cycle, duration, throughput, efficiency and operational-intensity
// model for the online design and the bit-serial baseline.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/baseline.hpp"
#include "core/config.hpp"

namespace dslr::perf {

struct HwProfile {
  std::string label;
  double power_mw = 0;
  double area_um2 = 0;
  double clock_mhz = 500;
  double freq_scale = 1;   // pass-through technology scaling
  double power_scale = 1;

  double effective_clock_mhz() const { return clock_mhz * freq_scale; }
  double effective_power_mw() const { return power_mw * power_scale; }
  double area_mm2() const { return area_um2 / 1e6; }

  // 45 nm synthesis figures at 500 MHz.
  static HwProfile dslr_45nm();
  static HwProfile baseline_45nm();
};

std::vector<std::string> validate(const HwProfile& hw);

enum class TrafficModel {
  Unique,    // each input, weight and output word moves once
  Rewrites,  // plus partial-sum read/write per extra input-channel pass
};

std::int64_t dslr_per_pass_cycles(const LayerConfig& layer, const TileConfig& tile);
std::int64_t dslr_cycles(const LayerConfig& layer, const TileConfig& tile);
std::int64_t layer_ops(const LayerConfig& layer);
double duration_ms(std::int64_t cycles, double clock_mhz);
// Throws Error(InvalidArgument) for a non-positive duration.
double performance_gops(std::int64_t ops, double duration_ms);

struct Efficiency {
  double tops_per_w = 0;
  double gops_per_mm2 = 0;
};
Efficiency efficiency(double perf_gops, const HwProfile& hw);

std::int64_t traffic_bytes(const LayerConfig& layer, const TileConfig& tile, int precision_bytes,
                           TrafficModel model);
double op_intensity(const LayerConfig& layer, const TileConfig& tile, int precision_bytes,
                    TrafficModel model);

struct LayerMetrics {
  std::string layer;
  std::int64_t cycles = 0;
  double duration_ms = 0;
  std::int64_t ops = 0;
  double gops = 0;
  double tops_per_w = 0;
  double gops_per_mm2 = 0;
  double oi = 0;
};

struct DesignSummary {
  std::int64_t total_cycles = 0;
  double total_ms = 0;
  double mean_ms = 0;
  double peak_gops = 0;
  double peak_tops_per_w = 0;
  double peak_gops_per_mm2 = 0;
};

struct DesignReport {
  std::string design;  // "dslr" or "baseline"
  HwProfile hw;
  std::vector<LayerMetrics> layers;
  DesignSummary summary;
};

struct ReportOptions {
  TileConfig tile;
  HwProfile dslr_hw = HwProfile::dslr_45nm();
  HwProfile baseline_hw = HwProfile::baseline_45nm();
  baseline::BaselineConfig baseline = baseline::BaselineConfig::for_tile(TileConfig{});
  bool include_baseline = false;
  // Compare the online design against itself in the baseline slot.
  bool self_compare = false;
  TrafficModel traffic = TrafficModel::Unique;
  int precision_bytes = 2;
};

struct PerfReport {
  std::string network;
  DesignReport dslr;
  std::optional<DesignReport> baseline;
  // baseline / dslr duration, per layer and over the whole network
  std::vector<double> layer_speedups;
  std::optional<double> speedup;
};

// Throws Error(Validation) for an empty network or invalid configs.
PerfReport build_report(const NetworkDef& net, const ReportOptions& opts);

}  // namespace dslr::perf
