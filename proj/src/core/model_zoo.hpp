#pragma once

// Built-in layer tables and JSON configuration files.

#include <string>
#include <string_view>
#include <vector>

#include "core/config.hpp"
#include "core/perf_model.hpp"

namespace dslr::zoo {

// "alexnet", "vgg16", "resnet18" (case-insensitive). Throws
// Error(UnknownNetwork) for anything else.
NetworkDef builtin(std::string_view name);
std::vector<std::string> builtin_names();

// Channel-chaining mismatches (layer i's M != layer i+1's N). Warnings only.
std::vector<std::string> chaining_warnings(const NetworkDef& net);

struct ModelConfig {
  NetworkDef network;
  TileConfig tile;
  perf::HwProfile dslr_hw = perf::HwProfile::dslr_45nm();
  perf::HwProfile baseline_hw = perf::HwProfile::baseline_45nm();
  std::vector<std::string> warnings;
};

// Throws Error(Parse) with line/column or field path, Error(Validation)
// listing violated invariants, Error(UnknownNetwork) for an unknown builtin.
ModelConfig parse_config(std::string_view text);
ModelConfig load_config(const std::string& path);

std::string emit_config(const ModelConfig& cfg);

}  // namespace dslr::zoo
