#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dslr {

// One convolution layer. R, C are the output feature map dimensions.
struct LayerConfig {
  std::string name;
  std::int64_t N = 1;  // input channels
  std::int64_t M = 1;  // output channels
  std::int64_t R = 1;
  std::int64_t C = 1;
  std::int64_t K = 1;
  std::int64_t stride = 1;
  std::int64_t padding = 0;
  // Input feature map size; derived from R/C, K, stride, padding when absent.
  std::optional<std::int64_t> R_in;
  std::optional<std::int64_t> C_in;

  std::int64_t input_rows() const { return R_in ? *R_in : (R - 1) * stride + K - 2 * padding; }
  std::int64_t input_cols() const { return C_in ? *C_in : (C - 1) * stride + K - 2 * padding; }

  friend bool operator==(const LayerConfig&, const LayerConfig&) = default;
};

// Accelerator geometry and timing constants.
struct TileConfig {
  std::int64_t Tn = 16;
  std::int64_t Tm = 8;
  std::int64_t Tr = 8;
  std::int64_t Tc = 8;
  std::int64_t pe_window = 9;   // kernel-pixel PEs per window
  std::int64_t pe_spatial = 64;
  std::int64_t delta_mult = 2;
  std::int64_t delta_add = 2;
  std::int64_t precision = 16;  // P_i
  double clock_mhz = 500.0;

  friend bool operator==(const TileConfig&, const TileConfig&) = default;
};

struct NetworkDef {
  std::string name;
  std::vector<LayerConfig> layers;

  friend bool operator==(const NetworkDef&, const NetworkDef&) = default;
};

// Violated invariants, one message each; empty when valid.
std::vector<std::string> validate(const LayerConfig& layer);
std::vector<std::string> validate(const TileConfig& tile);

// Throws Error(Validation) listing every violation.
void require_valid(const LayerConfig& layer);
void require_valid(const TileConfig& tile);

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace dslr
