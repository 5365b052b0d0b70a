#include "core/config.hpp"

#include "core/error.hpp"

namespace dslr {

namespace {

std::string layer_label(const LayerConfig& l) {
  return l.name.empty() ? std::string("layer") : "layer " + l.name;
}

void check_extent(std::vector<std::string>& errs, const LayerConfig& l, const char* axis,
                  std::int64_t out, const std::optional<std::int64_t>& in) {
  if (!in) {
    const std::int64_t derived = (out - 1) * l.stride + l.K - 2 * l.padding;
    if (derived < 1) {
      errs.push_back(layer_label(l) + ": derived input " + axis + " extent " +
                     std::to_string(derived) + " < 1");
    }
    return;
  }
  const std::int64_t span = *in - l.K + 2 * l.padding;
  // Trailing rows that do not fill a whole stride are ignored, as in the
  // usual floor((in - K + 2P) / S) + 1.
  if (*in < 1 || span < 0 || span / l.stride + 1 != out) {
    errs.push_back(layer_label(l) + ": input " + axis + " extent " + std::to_string(*in) +
                   " inconsistent with output " + std::to_string(out) +
                   " = floor((in - K + 2P)/S) + 1");
  }
}

}  // namespace

std::vector<std::string> validate(const LayerConfig& l) {
  std::vector<std::string> errs;
  auto positive = [&](const char* field, std::int64_t v) {
    if (v < 1) errs.push_back(layer_label(l) + ": " + field + " must be >= 1 (got " + std::to_string(v) + ")");
  };
  positive("N", l.N);
  positive("M", l.M);
  positive("R", l.R);
  positive("C", l.C);
  positive("K", l.K);
  positive("stride", l.stride);
  if (l.padding < 0) errs.push_back(layer_label(l) + ": padding must be >= 0");
  if (!errs.empty()) return errs;
  check_extent(errs, l, "row", l.R, l.R_in);
  check_extent(errs, l, "column", l.C, l.C_in);
  return errs;
}

std::vector<std::string> validate(const TileConfig& t) {
  std::vector<std::string> errs;
  auto positive = [&](const char* field, std::int64_t v) {
    if (v < 1) errs.push_back(std::string("tile: ") + field + " must be >= 1 (got " + std::to_string(v) + ")");
  };
  positive("Tn", t.Tn);
  positive("Tm", t.Tm);
  positive("Tr", t.Tr);
  positive("Tc", t.Tc);
  positive("pe_window", t.pe_window);
  positive("pe_spatial", t.pe_spatial);
  positive("precision", t.precision);
  if (t.delta_mult < 0) errs.push_back("tile: delta_mult must be >= 0");
  if (t.delta_add < 0) errs.push_back("tile: delta_add must be >= 0");
  if (!(t.clock_mhz > 0)) errs.push_back("tile: clock_mhz must be > 0");
  if (t.Tr >= 1 && t.Tc >= 1 && t.Tr * t.Tc != t.pe_spatial) {
    errs.push_back("tile: Tr * Tc (" + std::to_string(t.Tr * t.Tc) + ") must equal pe_spatial (" +
                   std::to_string(t.pe_spatial) + ")");
  }
  return errs;
}

namespace {
template <class T>
void require(const T& v) {
  auto errs = validate(v);
  if (errs.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw Error(ErrorCode::Validation, msg);
}
}  // namespace

void require_valid(const LayerConfig& layer) { require(layer); }
void require_valid(const TileConfig& tile) { require(tile); }

}  // namespace dslr
