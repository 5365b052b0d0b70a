#pragma once

// Digit-accurate simulation of one accelerator tile: weight-stationary window
// units built from online multipliers and reduction trees, driven by the
// control schedule, with exact partial-sum accumulation in the output buffer.

#include <cstdint>
#include <span>
#include <vector>

#include "core/config.hpp"
#include "core/online_units.hpp"
#include "core/signed_digit.hpp"

namespace dslr::accel {

using sd::DigitStream;
using sd::Dyadic;
using sd::Fixed;

// Dense row-major tensor of raw integers; element value = raw / 2^frac_bits.
// Activations and kernels use width = P_i, frac_bits = width - 1. Simulator
// outputs are exact accumulators: width 64, frac_bits = 2 (P_i - 1).
struct Tensor {
  std::vector<std::int64_t> shape;
  int width = 16;
  int frac_bits = 15;
  std::vector<std::int64_t> data;

  static Tensor fixed(std::vector<std::int64_t> shape, int width);
  static Tensor accumulator(std::vector<std::int64_t> shape, int frac_bits);

  std::size_t size() const { return data.size(); }
  std::int64_t dim(std::size_t i) const { return shape.at(i); }
  Dyadic value(std::size_t i) const { return Dyadic(data.at(i), -frac_bits); }
  // Checks shape/product consistency and, for Fixed tensors, the raw range.
  void check() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// One tile pass of the control loop nest.
struct TilePass {
  std::int64_t index = 0;
  std::int64_t m_tile = 0;
  std::int64_t n_tile = 0;
  std::int64_t spatial_tile = 0;
  std::int64_t m_begin = 0, m_end = 0;      // output channels [begin, end)
  std::int64_t n_begin = 0, n_end = 0;      // input channels
  std::int64_t pix_begin = 0, pix_end = 0;  // flattened output pixels r*C + c
  bool load_weights = false;   // kernel buffer -> PE parallel operands
  bool load_inputs = true;     // input buffer -> activation streams
  bool read_partials = false;  // accumulate onto an earlier input-channel pass
  bool store_outputs = false;  // last input-channel pass for these outputs
};

std::int64_t spatial_tiles(const LayerConfig& layer, const TileConfig& tile);
std::int64_t pass_count(const LayerConfig& layer, const TileConfig& tile);

// Loop nest: output-channel tiles, then input-channel tiles, then spatial
// tiles, so kernels stay resident while the feature map streams through.
std::vector<TilePass> control_schedule(const LayerConfig& layer, const TileConfig& tile);

// Golden model: direct nested-loop convolution in exact integer arithmetic.
// inputs N x R_in x C_in, weights M x N x K x K; output M x R x C accumulator.
Tensor reference_conv(const LayerConfig& layer, const Tensor& inputs, const Tensor& weights);

struct WindowResult {
  DigitStream stream;        // SoP over the window, MSDF
  int first_digit_step = 0;  // 1-based step of the first SoP digit
  int depth = 0;             // channel tree + kernel tree depth
  Dyadic value() const { return sd::stream_value(stream); }
};

// T_n x K^2 online multipliers holding one kernel slice. A PE is the T_n
// multipliers of one kernel pixel plus their channel tree; the K^2 PE outputs
// meet in the kernel tree.
class WindowUnit {
 public:
  WindowUnit(std::int64_t channels, std::int64_t kernel_pixels, int precision,
             bool inject_adder_fault = false);

  // Parallel operands, channel-major [c * K^2 + k]. Missing lanes are zero.
  void load_weights(std::span<const Fixed> weights);
  int weight_loads() const { return weight_loads_; }

  // Streams one window of activations (same layout as the weights) through
  // the unit until every digit has drained.
  WindowResult run(std::span<const Fixed> activations);

  int channel_depth() const { return channel_depth_; }
  int kernel_depth() const { return kernel_depth_; }

 private:
  std::int64_t channels_;
  std::int64_t kernel_pixels_;
  int precision_;
  bool fault_;
  int channel_depth_;
  int kernel_depth_;
  std::vector<Fixed> weights_;
  int weight_loads_ = 0;
};

struct SimOptions {
  unsigned threads = 0;  // 0: DSLR_SIM_THREADS or hardware concurrency
  bool inject_adder_fault = false;
};

struct RunResult {
  Tensor outputs;                     // M x R x C accumulator
  std::int64_t measured_cycles = 0;   // sum of per-pass measurements
  std::int64_t per_pass_cycles = 0;
  std::int64_t passes = 0;
  int first_digit_step = 0;
  std::int64_t weight_loads = 0;      // (m-tile, n-tile) kernel loads
  std::int64_t multiplier_steps = 0;
};

RunResult run_layer(const LayerConfig& layer, const TileConfig& tile, const Tensor& inputs,
                    const Tensor& weights, const SimOptions& opts = {});

// Multiplier steps a digit-accurate run of this layer performs.
std::int64_t estimated_multiplier_steps(const LayerConfig& layer, const TileConfig& tile);

unsigned worker_threads(unsigned requested);

}  // namespace dslr::accel
