#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "core/error.hpp"
#include "core/model_zoo.hpp"

using namespace dslr;
using namespace dslr::zoo;

namespace {
ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorCode::State;
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}
}  // namespace

TEST(Builtin, AlexNet) {
  const auto n = builtin("alexnet");
  ASSERT_EQ(n.layers.size(), 5u);
  const auto& c1 = n.layers[0];
  EXPECT_EQ(c1.K, 11);
  EXPECT_EQ(c1.M, 96);
  EXPECT_EQ(c1.R, 55);
  EXPECT_EQ(c1.C, 55);
  EXPECT_EQ(c1.input_rows(), 227);
  const std::int64_t ks[] = {11, 5, 3, 3, 3}, ms[] = {96, 256, 384, 384, 256}, rs[] = {55, 27, 13, 13, 13};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(n.layers[i].K, ks[i]);
    EXPECT_EQ(n.layers[i].M, ms[i]);
    EXPECT_EQ(n.layers[i].R, rs[i]);
  }
}

TEST(Builtin, Vgg16) {
  const auto n = builtin("vgg16");
  ASSERT_EQ(n.layers.size(), 13u);
  for (const auto& l : n.layers) EXPECT_EQ(l.K, 3);
  EXPECT_EQ(n.layers[1].N, 64);
  EXPECT_EQ(n.layers[1].R, 224);
  EXPECT_EQ(n.layers.back().M, 512);
  EXPECT_EQ(n.layers.back().R, 14);
}

TEST(Builtin, ResNet18) {
  const auto n = builtin("resnet18");
  ASSERT_EQ(n.layers.size(), 17u);
  EXPECT_EQ(n.layers[0].K, 7);
  EXPECT_EQ(n.layers[0].M, 64);
  EXPECT_EQ(n.layers[0].R, 112);
  EXPECT_EQ(n.layers[0].input_rows(), 224);
  EXPECT_EQ(n.layers[5].stride, 2);
  EXPECT_EQ(n.layers[5].input_rows(), 56);
  EXPECT_TRUE(chaining_warnings(n).empty());
}

TEST(Builtin, UnknownName) {
  EXPECT_THROW(builtin("lenet"), Error);
  EXPECT_NO_THROW(builtin("VGG16"));
}

TEST(Config, MinimalFileGetsDefaults) {
  const auto c = parse_config(R"({"network": {"layers": [{"N": 4, "M": 2, "R": 5, "C": 5, "K": 3}]}})");
  ASSERT_EQ(c.network.layers.size(), 1u);
  EXPECT_EQ(c.network.layers[0].stride, 1);
  EXPECT_EQ(c.network.layers[0].padding, 0);
  EXPECT_EQ(c.network.layers[0].name, "L1");
  EXPECT_EQ(c.tile, TileConfig{});
  EXPECT_EQ(c.dslr_hw.power_mw, 1249.42);
}

TEST(Config, BuiltinByName) {
  const auto c = parse_config(R"({"network": "alexnet", "tile": {"precision": 8}})");
  EXPECT_EQ(c.network, builtin("alexnet"));
  EXPECT_EQ(c.tile.precision, 8);
}

TEST(Config, HardwareOverrides) {
  const auto c = parse_config(
      R"({"network": "vgg16", "tile": {"clock_mhz": 250},
          "hardware": {"dslr": {"power_mw": 1000, "label": "x"}, "baseline": {"area_um2": 5e7}}})");
  EXPECT_EQ(c.dslr_hw.power_mw, 1000);
  EXPECT_EQ(c.dslr_hw.clock_mhz, 250);
  EXPECT_EQ(c.baseline_hw.area_um2, 5e7);
  EXPECT_EQ(c.baseline_hw.clock_mhz, 250);
}

TEST(Config, SpatialTileMismatchIsAValidationError) {
  EXPECT_EQ(code_of(R"({"network": "alexnet", "tile": {"Tr": 4}})"), ErrorCode::Validation);
}

TEST(Config, ValidationListsEveryViolation) {
  const auto msg = message_of(
      R"({"network": {"layers": [{"N": 0, "M": 2, "R": 5, "C": 5, "K": 3}]}, "tile": {"Tm": 0}})");
  EXPECT_NE(msg.find("N must be"), std::string::npos);
  EXPECT_NE(msg.find("Tm must be"), std::string::npos);
}

TEST(Config, ParseErrorsCarryLocation) {
  EXPECT_EQ(code_of("{\n  \"network\": \"alexnet\",\n  oops\n}"), ErrorCode::Parse);
  EXPECT_NE(message_of("{\n  \"network\": \"alexnet\",\n  oops\n}").find("line 3"), std::string::npos);
  EXPECT_NE(message_of(R"({"network": "alexnet", "tile": {"Tn": "x"}})").find("tile.Tn"), std::string::npos);
  EXPECT_EQ(code_of(R"({"network": "alexnet", "extra": 1})"), ErrorCode::Parse);
  EXPECT_EQ(code_of(R"({"network": {"layers": [{"N": 1, "M": 1, "R": 1, "C": 1}]}})"), ErrorCode::Parse);
  EXPECT_EQ(code_of(R"({"tile": {}})"), ErrorCode::Parse);
  EXPECT_EQ(code_of(R"({"network": "lenet"})"), ErrorCode::UnknownNetwork);
  EXPECT_EQ(code_of(R"({"network": {"layers": []}})"), ErrorCode::Validation);
}

TEST(Config, ExplicitInputExtent) {
  const auto c = parse_config(
      R"({"network": {"layers": [{"N": 3, "M": 4, "R": 112, "C": 112, "K": 7, "stride": 2, "padding": 3,
                                  "R_in": 224, "C_in": 223}]}})");
  EXPECT_EQ(c.network.layers[0].input_rows(), 224);
  EXPECT_EQ(c.network.layers[0].input_cols(), 223);
  EXPECT_EQ(code_of(R"({"network": {"layers": [{"N": 3, "M": 4, "R": 112, "C": 112, "K": 7, "stride": 2,
                                                "padding": 3, "R_in": 230}]}})"),
            ErrorCode::Validation);
}

TEST(Config, ChainingMismatchWarns) {
  const auto c = parse_config(
      R"({"network": {"layers": [{"N": 4, "M": 2, "R": 5, "C": 5, "K": 3},
                                 {"N": 3, "M": 2, "R": 5, "C": 5, "K": 3}]}})");
  EXPECT_EQ(c.warnings.size(), 1u);
}

TEST(Config, RoundTrip) {
  for (const auto& name : builtin_names()) {
    ModelConfig c;
    c.network = builtin(name);
    c.tile.Tm = 4;
    c.dslr_hw.power_mw = 900.5;
    const auto back = parse_config(emit_config(c));
    EXPECT_EQ(back.network, c.network);
    EXPECT_EQ(back.tile, c.tile);
    EXPECT_EQ(back.dslr_hw.power_mw, 900.5);
  }
}

TEST(Config, LoadFromFile) {
  const std::string path = ::testing::TempDir() + "zoo_cfg.json";
  {
    std::ofstream f(path);
    f << R"({"network": {"name": "tiny", "layers": [{"name": "a", "N": 1, "M": 1, "R": 2, "C": 2, "K": 1}]}})";
  }
  const auto c = load_config(path);
  EXPECT_EQ(c.network.name, "tiny");
  std::remove(path.c_str());
  EXPECT_THROW(load_config(path), Error);
}
