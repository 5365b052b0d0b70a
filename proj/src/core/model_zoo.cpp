#include "core/model_zoo.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace dslr::zoo {

using nlohmann::json;

namespace {

LayerConfig conv(std::string name, std::int64_t n, std::int64_t m, std::int64_t rc, std::int64_t k,
                 std::int64_t stride, std::int64_t pad) {
  LayerConfig l;
  l.name = std::move(name);
  l.N = n;
  l.M = m;
  l.R = rc;
  l.C = rc;
  l.K = k;
  l.stride = stride;
  l.padding = pad;
  return l;
}

NetworkDef alexnet() {
  // Ungrouped channel counts.
  return {"alexnet",
          {conv("C1", 3, 96, 55, 11, 4, 0), conv("C2", 96, 256, 27, 5, 1, 2),
           conv("C3", 256, 384, 13, 3, 1, 1), conv("C4", 384, 384, 13, 3, 1, 1),
           conv("C5", 384, 256, 13, 3, 1, 1)}};
}

NetworkDef vgg16() {
  NetworkDef net{"vgg16", {}};
  const std::int64_t cfg[][3] = {{3, 64, 224},    {64, 64, 224},   {64, 128, 112}, {128, 128, 112},
                                 {128, 256, 56},  {256, 256, 56},  {256, 256, 56}, {256, 512, 28},
                                 {512, 512, 28},  {512, 512, 28},  {512, 512, 14}, {512, 512, 14},
                                 {512, 512, 14}};
  int i = 1;
  for (const auto& c : cfg) net.layers.push_back(conv("C" + std::to_string(i++), c[0], c[1], c[2], 3, 1, 1));
  return net;
}

NetworkDef resnet18() {
  // 17 3x3/7x7 convolutions; the 1x1 projection shortcuts are not listed.
  NetworkDef net{"resnet18", {conv("C1", 3, 64, 112, 7, 2, 3)}};
  net.layers[0].R_in = net.layers[0].C_in = 224;
  int i = 2;
  auto stage = [&](std::int64_t in, std::int64_t out, std::int64_t rc) {
    for (int j = 0; j < 4; ++j) {
      const bool first = j == 0;
      const std::int64_t stride = (first && in != out) ? 2 : 1;
      net.layers.push_back(conv("C" + std::to_string(i++), first ? in : out, out, rc, 3, stride, 1));
      if (stride == 2) net.layers.back().R_in = net.layers.back().C_in = 2 * rc;
    }
  };
  stage(64, 64, 56);
  stage(64, 128, 28);
  stage(128, 256, 14);
  stage(256, 512, 7);
  return net;
}

std::string lower(std::string_view s) {
  std::string r(s);
  std::transform(r.begin(), r.end(), r.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return r;
}

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Parse, "config field '" + path + "': " + what);
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
  std::set<std::string> ok(known.begin(), known.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) field_error(path.empty() ? key : path + "." + key, "unknown field");
  }
}

void read_int(const json& obj, const std::string& path, const char* key, std::int64_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) field_error(path + "." + key, "expected an integer");
  out = v.get<std::int64_t>();
}

void read_double(const json& obj, const std::string& path, const char* key, double& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number()) field_error(path + "." + key, "expected a number");
  out = v.get<double>();
}

void read_string(const json& obj, const std::string& path, const char* key, std::string& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_string()) field_error(path + "." + key, "expected a string");
  out = v.get<std::string>();
}

LayerConfig read_layer(const json& j, const std::string& path) {
  if (!j.is_object()) field_error(path, "expected an object");
  reject_unknown(j, path, {"name", "N", "M", "R", "C", "K", "stride", "padding", "R_in", "C_in"});
  for (const char* req : {"N", "M", "R", "C", "K"}) {
    if (!j.contains(req)) field_error(path + "." + req, "required");
  }
  LayerConfig l;
  read_string(j, path, "name", l.name);
  read_int(j, path, "N", l.N);
  read_int(j, path, "M", l.M);
  read_int(j, path, "R", l.R);
  read_int(j, path, "C", l.C);
  read_int(j, path, "K", l.K);
  read_int(j, path, "stride", l.stride);
  read_int(j, path, "padding", l.padding);
  if (j.contains("R_in")) {
    std::int64_t v = 0;
    read_int(j, path, "R_in", v);
    l.R_in = v;
  }
  if (j.contains("C_in")) {
    std::int64_t v = 0;
    read_int(j, path, "C_in", v);
    l.C_in = v;
  }
  return l;
}

perf::HwProfile read_hw(const json& j, const std::string& path, perf::HwProfile hw) {
  if (!j.is_object()) field_error(path, "expected an object");
  reject_unknown(j, path, {"label", "power_mw", "area_um2", "clock_mhz", "freq_scale", "power_scale"});
  read_string(j, path, "label", hw.label);
  read_double(j, path, "power_mw", hw.power_mw);
  read_double(j, path, "area_um2", hw.area_um2);
  read_double(j, path, "clock_mhz", hw.clock_mhz);
  read_double(j, path, "freq_scale", hw.freq_scale);
  read_double(j, path, "power_scale", hw.power_scale);
  return hw;
}

json layer_json(const LayerConfig& l) {
  json j = {{"name", l.name}, {"N", l.N}, {"M", l.M}, {"R", l.R}, {"C", l.C},
            {"K", l.K}, {"stride", l.stride}, {"padding", l.padding}};
  if (l.R_in) j["R_in"] = *l.R_in;
  if (l.C_in) j["C_in"] = *l.C_in;
  return j;
}

json hw_json(const perf::HwProfile& hw) {
  return {{"label", hw.label},         {"power_mw", hw.power_mw},     {"area_um2", hw.area_um2},
          {"clock_mhz", hw.clock_mhz}, {"freq_scale", hw.freq_scale}, {"power_scale", hw.power_scale}};
}

}  // namespace

NetworkDef builtin(std::string_view name) {
  const std::string n = lower(name);
  if (n == "alexnet") return alexnet();
  if (n == "vgg16" || n == "vgg-16") return vgg16();
  if (n == "resnet18" || n == "resnet-18") return resnet18();
  throw Error(ErrorCode::UnknownNetwork, "unknown network '" + std::string(name) +
                                             "' (known: alexnet, vgg16, resnet18)");
}

std::vector<std::string> builtin_names() { return {"alexnet", "vgg16", "resnet18"}; }

std::vector<std::string> chaining_warnings(const NetworkDef& net) {
  std::vector<std::string> w;
  for (std::size_t i = 0; i + 1 < net.layers.size(); ++i) {
    const auto& a = net.layers[i];
    const auto& b = net.layers[i + 1];
    if (a.M != b.N) {
      w.push_back("layer " + b.name + " has N = " + std::to_string(b.N) + " but layer " + a.name +
                  " produces M = " + std::to_string(a.M));
    }
  }
  return w;
}

ModelConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Locate the failing byte for a line:column diagnostic.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::Parse, "config parse error at line " + std::to_string(line) + ", column " +
                                      std::to_string(col) + ": " + e.what());
  }
  if (!root.is_object()) field_error("<root>", "expected an object");
  reject_unknown(root, "", {"network", "tile", "hardware"});
  if (!root.contains("network")) field_error("network", "required");

  ModelConfig cfg;
  const json& net = root.at("network");
  if (net.is_string()) {
    cfg.network = builtin(net.get<std::string>());
  } else if (net.is_object()) {
    reject_unknown(net, "network", {"name", "layers"});
    read_string(net, "network", "name", cfg.network.name);
    if (!net.contains("layers") || !net.at("layers").is_array()) field_error("network.layers", "expected an array");
    const json& layers = net.at("layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      LayerConfig l = read_layer(layers[i], "network.layers[" + std::to_string(i) + "]");
      if (l.name.empty()) l.name = "L" + std::to_string(i + 1);
      cfg.network.layers.push_back(std::move(l));
    }
    if (cfg.network.name.empty()) cfg.network.name = "custom";
  } else {
    field_error("network", "expected a builtin name or an object");
  }

  if (root.contains("tile")) {
    const json& t = root.at("tile");
    if (!t.is_object()) field_error("tile", "expected an object");
    reject_unknown(t, "tile", {"Tn", "Tm", "Tr", "Tc", "pe_window", "pe_spatial", "delta_mult",
                               "delta_add", "precision", "clock_mhz"});
    read_int(t, "tile", "Tn", cfg.tile.Tn);
    read_int(t, "tile", "Tm", cfg.tile.Tm);
    read_int(t, "tile", "Tr", cfg.tile.Tr);
    read_int(t, "tile", "Tc", cfg.tile.Tc);
    read_int(t, "tile", "pe_window", cfg.tile.pe_window);
    read_int(t, "tile", "pe_spatial", cfg.tile.pe_spatial);
    read_int(t, "tile", "delta_mult", cfg.tile.delta_mult);
    read_int(t, "tile", "delta_add", cfg.tile.delta_add);
    read_int(t, "tile", "precision", cfg.tile.precision);
    read_double(t, "tile", "clock_mhz", cfg.tile.clock_mhz);
  }
  // Profiles default to the tile clock unless they set their own.
  cfg.dslr_hw.clock_mhz = cfg.tile.clock_mhz;
  cfg.baseline_hw.clock_mhz = cfg.tile.clock_mhz;
  if (root.contains("hardware")) {
    const json& h = root.at("hardware");
    if (!h.is_object()) field_error("hardware", "expected an object");
    reject_unknown(h, "hardware", {"dslr", "baseline"});
    if (h.contains("dslr")) cfg.dslr_hw = read_hw(h.at("dslr"), "hardware.dslr", cfg.dslr_hw);
    if (h.contains("baseline")) cfg.baseline_hw = read_hw(h.at("baseline"), "hardware.baseline", cfg.baseline_hw);
  }

  std::vector<std::string> errs;
  if (cfg.network.layers.empty()) errs.push_back("network '" + cfg.network.name + "' has no layers");
  for (const auto& l : cfg.network.layers) {
    auto e = validate(l);
    errs.insert(errs.end(), e.begin(), e.end());
  }
  auto te = validate(cfg.tile);
  errs.insert(errs.end(), te.begin(), te.end());
  for (const auto* hw : {&cfg.dslr_hw, &cfg.baseline_hw}) {
    auto he = perf::validate(*hw);
    errs.insert(errs.end(), he.begin(), he.end());
  }
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw Error(ErrorCode::Validation, msg);
  }
  cfg.warnings = chaining_warnings(cfg.network);
  return cfg;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ModelConfig& cfg) {
  json layers = json::array();
  for (const auto& l : cfg.network.layers) layers.push_back(layer_json(l));
  const TileConfig& t = cfg.tile;
  json root = {
      {"network", {{"name", cfg.network.name}, {"layers", layers}}},
      {"tile",
       {{"Tn", t.Tn}, {"Tm", t.Tm}, {"Tr", t.Tr}, {"Tc", t.Tc}, {"pe_window", t.pe_window},
        {"pe_spatial", t.pe_spatial}, {"delta_mult", t.delta_mult}, {"delta_add", t.delta_add},
        {"precision", t.precision}, {"clock_mhz", t.clock_mhz}}},
      {"hardware", {{"dslr", hw_json(cfg.dslr_hw)}, {"baseline", hw_json(cfg.baseline_hw)}}},
  };
  return root.dump(2) + "\n";
}

}  // namespace dslr::zoo
