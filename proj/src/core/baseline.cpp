#include "core/baseline.hpp"

#include "core/error.hpp"
#include "core/online_units.hpp"

namespace dslr::baseline {

BaselineConfig BaselineConfig::for_tile(const TileConfig& tile) {
  BaselineConfig cfg;
  cfg.tile = tile;
  cfg.phase_cycles = 2 * tile.precision - 1;
  return cfg;
}

BaselineConfig BaselineConfig::literal(const TileConfig& tile) {
  BaselineConfig cfg = for_tile(tile);
  cfg.phase_cycles = tile.precision;
  return cfg;
}

sd::Dyadic baseline_mult(const sd::Fixed& x, const sd::Fixed& y) {
  // Two's complement y: bit (w-1) weighs -2^(w-1), the rest are positive.
  const int w = y.width();
  const std::uint64_t ybits = std::uint64_t(y.raw()) & ((std::uint64_t(1) << w) - 1);
  std::int64_t acc = 0;
  for (int i = 0; i < w; ++i) {
    const std::int64_t partial = ((ybits >> i) & 1) ? x.raw() : 0;  // AND row
    const std::int64_t shifted = partial * (std::int64_t(1) << i);
    acc += (i == w - 1) ? -shifted : shifted;
  }
  return sd::Dyadic(acc, -(x.frac_bits() + y.frac_bits()));
}

std::int64_t per_pass_cycles(const LayerConfig& layer, const BaselineConfig& cfg) {
  return (cfg.mult_phases + cfg.acc_phases) * cfg.phase_cycles +
         online::ceil_log2(std::uint64_t(cfg.tile.Tn)) +
         online::ceil_log2(std::uint64_t(layer.K * layer.K));
}

std::int64_t spatial_tiles(const LayerConfig& layer, const BaselineConfig& cfg) {
  const auto& t = cfg.tile;
  if (cfg.tiles == TilesForm::PerCoord) return ceil_div(layer.R, t.Tr) * ceil_div(layer.C, t.Tc);
  return ceil_div(layer.R * layer.C, t.Tr * t.Tc);
}

std::int64_t baseline_cycles(const LayerConfig& layer, const BaselineConfig& cfg) {
  require_valid(layer);
  require_valid(cfg.tile);
  if (cfg.mult_phases < 1 || cfg.acc_phases < 1 || cfg.phase_cycles < 1) {
    throw Error(ErrorCode::Validation, "baseline phases and phase cycles must be positive");
  }
  return per_pass_cycles(layer, cfg) * spatial_tiles(layer, cfg) * ceil_div(layer.M, cfg.tile.Tm) *
         ceil_div(layer.N, cfg.tile.Tn);
}

}  // namespace dslr::baseline
