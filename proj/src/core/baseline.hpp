#pragma once

// Conventional bit-serial baseline: AND-array partial products, accumulator,
// adder trees. Functional multiply plus the analytic cycle count.

#include <cstdint>

#include "core/config.hpp"
#include "core/signed_digit.hpp"

namespace dslr::baseline {

enum class TilesForm {
  Product,   // ceil(R*C / (Tr*Tc))
  PerCoord,  // ceil(R/Tr) * ceil(C/Tc)
};

struct BaselineConfig {
  std::int64_t mult_phases = 1;
  std::int64_t acc_phases = 1;
  // Cycles per phase: the full product width 2*P_i - 1 by default, P_i under
  // literal().
  std::int64_t phase_cycles = 31;
  TilesForm tiles = TilesForm::Product;
  TileConfig tile;

  static BaselineConfig for_tile(const TileConfig& tile);
  static BaselineConfig literal(const TileConfig& tile);
};

// Shift-add product from AND-gated partial products; exact, at
// x.frac_bits() + y.frac_bits() fractional bits.
sd::Dyadic baseline_mult(const sd::Fixed& x, const sd::Fixed& y);

std::int64_t per_pass_cycles(const LayerConfig& layer, const BaselineConfig& cfg);
std::int64_t spatial_tiles(const LayerConfig& layer, const BaselineConfig& cfg);
std::int64_t baseline_cycles(const LayerConfig& layer, const BaselineConfig& cfg);

}  // namespace dslr::baseline
