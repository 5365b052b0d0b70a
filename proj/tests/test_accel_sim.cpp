#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "core/accel_sim.hpp"
#include "core/error.hpp"
#include "oracle.hpp"

using namespace dslr;
using namespace dslr::accel;

namespace {

LayerConfig layer(std::int64_t n, std::int64_t m, std::int64_t rc, std::int64_t k, std::int64_t stride = 1,
                  std::int64_t pad = 0) {
  LayerConfig l;
  l.name = "t";
  l.N = n;
  l.M = m;
  l.R = l.C = rc;
  l.K = k;
  l.stride = stride;
  l.padding = pad;
  return l;
}

Tensor random_fixed(std::vector<std::int64_t> shape, int width, std::mt19937_64& rng) {
  Tensor t = Tensor::fixed(std::move(shape), width);
  for (auto& v : t.data) v = oracle::random_raw(rng, width);
  return t;
}

struct Operands {
  Tensor in, w;
};

Operands random_operands(const LayerConfig& l, int width, std::mt19937_64& rng) {
  return {random_fixed({l.N, l.input_rows(), l.input_cols()}, width, rng),
          random_fixed({l.M, l.N, l.K, l.K}, width, rng)};
}

}  // namespace

TEST(Schedule, PassCounts) {
  const TileConfig t;
  EXPECT_EQ(control_schedule(layer(3, 96, 55, 11, 4), t).size(), 576u);
  EXPECT_EQ(control_schedule(layer(64, 64, 224, 3, 1, 1), t).size(), 25088u);
  EXPECT_EQ(control_schedule(layer(16, 8, 8, 3, 1, 1), t).size(), 1u);
}

TEST(Schedule, OrderAndFlags) {
  const TileConfig t;
  const auto s = control_schedule(layer(40, 20, 10, 3, 1, 1), t);
  // m tiles 3, n tiles 3, spatial tiles 2
  ASSERT_EQ(s.size(), 18u);
  EXPECT_EQ(s[0].m_tile, 0);
  EXPECT_EQ(s[1].spatial_tile, 1);
  EXPECT_EQ(s[2].n_tile, 1);
  EXPECT_EQ(s[6].m_tile, 1);
  int loads = 0;
  for (const auto& p : s) {
    loads += p.load_weights;
    EXPECT_EQ(p.read_partials, p.n_tile > 0);
    EXPECT_EQ(p.store_outputs, p.n_tile == 2);
  }
  EXPECT_EQ(loads, 9);
  EXPECT_EQ(s.back().m_end, 20);
  EXPECT_EQ(s.back().n_end, 40);
  EXPECT_EQ(s.back().pix_end, 100);
}

TEST(ReferenceConv, Examples) {
  const auto l = layer(1, 1, 1, 1);
  Tensor in = Tensor::fixed({1, 1, 1}, 16), w = Tensor::fixed({1, 1, 1, 1}, 16);
  in.data[0] = 1 << 14;
  w.data[0] = 1 << 14;
  const Tensor out = reference_conv(l, in, w);
  EXPECT_EQ(out.value(0), Dyadic(1, -2));
}

TEST(ReferenceConv, NearIdentityKernel) {
  std::mt19937_64 rng(2);
  const auto l = layer(1, 1, 6, 3, 1, 1);
  Tensor in = random_fixed({1, 6, 6}, 16, rng);
  Tensor w = Tensor::fixed({1, 1, 3, 3}, 16);
  w.data[4] = (1 << 15) - 1;
  const Tensor out = reference_conv(l, in, w);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double got = out.value(i).to_double(), want = in.value(i).to_double();
    EXPECT_LE(std::abs(got - want), std::ldexp(1.0, -15));
  }
}

TEST(ReferenceConv, MatchesIndependentOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto l = layer(1 + rng() % 4, 1 + rng() % 4, 1 + rng() % 6, 1 + rng() % 4, 1 + rng() % 2, rng() % 2);
    const auto ops = random_operands(l, 12, rng);
    EXPECT_EQ(reference_conv(l, ops.in, ops.w).data, oracle::conv(l, ops.in.data, ops.w.data));
  }
}

TEST(WindowUnit, SingleWindowAgainstProducts) {
  std::mt19937_64 rng(6);
  const int width = 10;
  WindowUnit u(4, 9, width);
  std::vector<Fixed> w, a;
  oracle::Rat want{0, 0};
  for (int i = 0; i < 36; ++i) {
    w.emplace_back(oracle::random_raw(rng, width), width);
    a.emplace_back(oracle::random_raw(rng, width), width);
    want = oracle::add(want, oracle::product(w.back().raw(), width, a.back().raw(), width));
  }
  u.load_weights(w);
  const auto r = u.run(a);
  EXPECT_TRUE(oracle::equal(oracle::stream_rat(r.stream), want));
  EXPECT_EQ(r.depth, 2 + 4);
  EXPECT_EQ(r.first_digit_step, 2 + 2 * 6 + 1);
  EXPECT_EQ(u.weight_loads(), 1);
}

TEST(RunLayer, FortyTwoCyclesForOneDefaultPass) {
  std::mt19937_64 rng(42);
  const auto l = layer(16, 8, 8, 3, 1, 1);
  const auto ops = random_operands(l, 16, rng);
  const auto r = run_layer(l, TileConfig{}, ops.in, ops.w);
  EXPECT_EQ(r.passes, 1);
  EXPECT_EQ(r.per_pass_cycles, 42);
  EXPECT_EQ(r.measured_cycles, 42);
  EXPECT_EQ(r.first_digit_step, 19);
  EXPECT_EQ(r.outputs.data, reference_conv(l, ops.in, ops.w).data);
}

TEST(RunLayer, ZeroWeightsGiveZeroOutputs) {
  std::mt19937_64 rng(1);
  const auto l = layer(16, 8, 8, 3, 1, 1);
  auto ops = random_operands(l, 16, rng);
  std::fill(ops.w.data.begin(), ops.w.data.end(), 0);
  const auto r = run_layer(l, TileConfig{}, ops.in, ops.w);
  for (auto v : r.outputs.data) EXPECT_EQ(v, 0);
  EXPECT_EQ(r.measured_cycles, 42);
}

TEST(RunLayer, MultiPassLayerMatchesReference) {
  std::mt19937_64 rng(77);
  const auto l = layer(32, 16, 10, 3, 1, 1);
  const auto ops = random_operands(l, 16, rng);
  const auto r = run_layer(l, TileConfig{}, ops.in, ops.w);
  EXPECT_EQ(r.outputs.data, oracle::conv(l, ops.in.data, ops.w.data));
  EXPECT_EQ(r.outputs.frac_bits, 30);
  // m tiles 2, n tiles 2, spatial tiles 2
  EXPECT_EQ(r.passes, 8);
  EXPECT_EQ(r.measured_cycles, 8 * 42);
  EXPECT_EQ(r.weight_loads, 4);
}

TEST(RunLayer, ExtremeOperands) {
  const auto l = layer(3, 2, 3, 3, 1, 1);
  Tensor in = Tensor::fixed({3, 3, 3}, 8), w = Tensor::fixed({2, 3, 3, 3}, 8);
  std::fill(in.data.begin(), in.data.end(), -128);
  std::fill(w.data.begin(), w.data.end(), -128);
  TileConfig t;
  t.precision = 8;
  const auto r = run_layer(l, t, in, w);
  EXPECT_EQ(r.outputs.data, oracle::conv(l, in.data, w.data));
}

TEST(RunLayer, DeterministicAcrossThreadCounts) {
  std::mt19937_64 rng(13);
  const auto l = layer(5, 20, 9, 3, 2, 1);
  const auto ops = random_operands(l, 12, rng);
  TileConfig t;
  t.precision = 12;
  SimOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = run_layer(l, t, ops.in, ops.w, one);
  const auto b = run_layer(l, t, ops.in, ops.w, four);
  EXPECT_EQ(a.outputs, b.outputs);
  EXPECT_EQ(a.measured_cycles, b.measured_cycles);
  EXPECT_EQ(a.outputs.data, oracle::conv(l, ops.in.data, ops.w.data));
}

TEST(RunLayer, Validation) {
  std::mt19937_64 rng(1);
  const auto l = layer(2, 2, 2, 3, 1, 1);
  const auto ops = random_operands(l, 16, rng);
  TileConfig t;
  t.delta_add = 3;
  EXPECT_THROW(run_layer(l, t, ops.in, ops.w), Error);
  t = TileConfig{};
  t.precision = 12;
  EXPECT_THROW(run_layer(l, t, ops.in, ops.w), Error);
  Tensor bad = ops.in;
  bad.shape = {2, 2, 3};
  bad.data.resize(12);
  EXPECT_THROW(run_layer(l, TileConfig{}, bad, ops.w), Error);
}

TEST(RunLayer, FaultInjectionIsDetected) {
  std::mt19937_64 rng(5);
  const auto l = layer(4, 2, 3, 3, 1, 1);
  const auto ops = random_operands(l, 8, rng);
  TileConfig t;
  t.precision = 8;
  SimOptions o;
  o.inject_adder_fault = true;
  bool differs = false;
  try {
    differs = run_layer(l, t, ops.in, ops.w, o).outputs.data != reference_conv(l, ops.in, ops.w).data;
  } catch (const Error&) {
    differs = true;
  }
  EXPECT_TRUE(differs);
}

TEST(WorkerThreads, EnvironmentCap) {
  ::setenv("DSLR_SIM_THREADS", "1", 1);
  EXPECT_EQ(worker_threads(0), 1u);
  EXPECT_EQ(worker_threads(3), 3u);
  ::unsetenv("DSLR_SIM_THREADS");
  EXPECT_GE(worker_threads(0), 1u);
}

TEST(Tensor, Checks) {
  Tensor t = Tensor::fixed({2, 2}, 8);
  t.data[0] = 200;
  EXPECT_THROW(t.check(), Error);
  t.data[0] = 0;
  t.data.pop_back();
  EXPECT_THROW(t.check(), Error);
}
