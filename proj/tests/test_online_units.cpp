#include <gtest/gtest.h>

#include <random>

#include "core/error.hpp"
#include "core/online_units.hpp"
#include "oracle.hpp"

using namespace dslr;
using namespace dslr::online;
using sd::fixed_to_stream;

namespace {

struct MulTrace {
  std::vector<int> digits;
  int first_step = 0;
  oracle::Rat max_residual{0, 0};
  bool residual_ok = true;  // |w| <= 7/8 throughout
};

MulTrace run_mul(std::int64_t xr, std::int64_t yr, int width) {
  OnlineMultiplier m(Fixed(xr, width));
  const auto y = fixed_to_stream(Fixed(yr, width));
  MulTrace t;
  const std::size_t steps = y.size() + 2 * std::size_t(width) + 4;
  for (std::size_t s = 0; s < steps; ++s) {
    auto p = m.step(s < y.size() ? y.at(s) : SignedDigit::zero());
    if (p) {
      if (t.digits.empty()) t.first_step = int(s) + 1;
      t.digits.push_back(p->value());
    }
    const auto w = m.residual();
    if (!oracle::abs_at_most({w.num(), -w.exp()}, 7, 3)) t.residual_ok = false;
  }
  return t;
}

}  // namespace

TEST(Selm, Thresholds) {
  EXPECT_EQ(selm(Dyadic(3, -2)).value(), 1);
  EXPECT_EQ(selm(Dyadic()).value(), 0);
  EXPECT_EQ(selm(Dyadic(-1, -1)).value(), -1);
  EXPECT_EQ(selm(Dyadic(1, -1)).value(), 1);
  EXPECT_EQ(selm(Dyadic(-1, -2)).value(), 0);
}

TEST(OnlineMultiplier, Examples) {
  const auto half = sd::DigitStream::from_ints({1, 0, 0, 0, 0, 0, 0, 0});
  const auto p = multiply_stream(Fixed(64, 8), half, 20);
  EXPECT_EQ(sd::stream_value(p), Dyadic(1, -2));
  const auto z = multiply_stream(Fixed(0, 8), fixed_to_stream(Fixed(-77, 8)), 20);
  EXPECT_TRUE(sd::stream_value(z).is_zero());
}

TEST(OnlineMultiplier, FirstDigitOnStepThree) {
  const auto t = run_mul(17, -9, 6);
  EXPECT_EQ(t.first_step, 3);
}

TEST(OnlineMultiplier, ExhaustiveWidth6) {
  const int w = 6;
  for (std::int64_t x = -32; x < 32; ++x) {
    for (std::int64_t y = -32; y < 32; ++y) {
      const auto t = run_mul(x, y, w);
      const int scale = y == -32 ? 1 : 0;
      ASSERT_TRUE(oracle::equal(oracle::digits_value(t.digits, scale), oracle::product(x, w, y, w)))
          << x << " * " << y;
      ASSERT_TRUE(t.residual_ok) << x << " * " << y;
      // Each emitted prefix is within one unit of its last digit.
      oracle::Rat prefix{0, 0};
      for (std::size_t j = 0; j < t.digits.size(); ++j) {
        prefix = oracle::add(prefix, {t.digits[j], int(j) + 1 - scale});
        const auto err = oracle::sub(oracle::product(x, w, y, w), prefix);
        ASSERT_TRUE(oracle::abs_less(err, 1, int(j) + 1 - scale)) << x << " * " << y << " j=" << j + 1;
      }
    }
  }
}

TEST(OnlineMultiplier, RandomWidth16) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 5000; ++i) {
    const auto x = oracle::random_raw(rng, 16), y = oracle::random_raw(rng, 16);
    const auto t = run_mul(x, y, 16);
    const int scale = y == -32768 ? 1 : 0;
    ASSERT_TRUE(oracle::equal(oracle::digits_value(t.digits, scale), oracle::product(x, 16, y, 16)));
    ASSERT_TRUE(t.residual_ok);
  }
}

TEST(OnlineMultiplier, FinalizeAndReset) {
  OnlineMultiplier m(Fixed(5, 8));
  m.step(SignedDigit::one());
  m.finalize();
  EXPECT_THROW(m.step(SignedDigit::zero()), Error);
  m.reset();
  EXPECT_NO_THROW(m.step(SignedDigit::zero()));
  EXPECT_EQ(m.steps(), 1);
}

TEST(OnlineAdder, Examples) {
  using sd::DigitStream;
  const auto s = add_streams(DigitStream::from_ints({1, 0}), DigitStream::from_ints({0, 1}));
  EXPECT_EQ(sd::stream_value(s), Dyadic(3, -2));
  EXPECT_EQ(s.scale_exp(), 1);
  const auto c = add_streams(DigitStream::from_ints({1}), DigitStream::from_ints({-1}));
  EXPECT_TRUE(sd::stream_value(c).is_zero());
}

TEST(OnlineAdder, ExhaustiveThreeDigitPairs) {
  std::vector<std::vector<int>> all;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c) all.push_back({a, b, c});
  for (const auto& x : all) {
    for (const auto& y : all) {
      OnlineAdder add;
      std::vector<int> z;
      int first = 0;
      for (int t = 0; t < 6; ++t) {
        const auto xd = SignedDigit::from_int(t < 3 ? x[std::size_t(t)] : 0);
        const auto yd = SignedDigit::from_int(t < 3 ? y[std::size_t(t)] : 0);
        if (auto d = add.step(xd, yd)) {
          if (z.empty()) first = t + 1;
          z.push_back(d->value());
        }
      }
      ASSERT_EQ(first, 3);
      ASSERT_EQ(z.size(), 4u);
      ASSERT_TRUE(oracle::equal(oracle::digits_value(z, 1),
                                oracle::add(oracle::digits_value(x, 0), oracle::digits_value(y, 0))));
    }
  }
}

TEST(OnlineAdder, RandomWidth16Pairs) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    const auto x = oracle::random_digits(rng, 16), y = oracle::random_digits(rng, 16);
    const auto s = add_streams(oracle::to_stream(x), oracle::to_stream(y));
    ASSERT_TRUE(oracle::equal(oracle::stream_rat(s),
                              oracle::add(oracle::digits_value(x, 0), oracle::digits_value(y, 0))));
  }
}

TEST(OnlineAdder, InjectedFaultCorruptsTheSum) {
  OnlineAdder add(true);
  const std::vector<int> x{1, 0, 0, 0, 0}, y{0, 1, 0, 0, 0};
  std::vector<int> z;
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (auto d = add.step(SignedDigit::from_int(x[t]), SignedDigit::from_int(y[t]))) z.push_back(d->value());
  }
  EXPECT_FALSE(oracle::equal(oracle::digits_value(z, 1), {3, 2}));
}

TEST(ReductionTree, SingleInputPassesThrough) {
  const auto s = sd::DigitStream::from_ints({1, -1, 0, 1});
  const auto r = tree_reduce(std::vector<sd::DigitStream>{s});
  EXPECT_EQ(r.depth, 0);
  EXPECT_EQ(r.first_digit_step, 1);
  EXPECT_EQ(r.latency(), 0);
  EXPECT_EQ(sd::stream_value(r.stream), sd::stream_value(s));
}

TEST(ReductionTree, SixteenEqualInputs) {
  const auto s = sd::DigitStream::from_ints({0, 0, 0, 0, 1});  // 1/32
  const std::vector<sd::DigitStream> in(16, s);
  const auto r = tree_reduce(in);
  EXPECT_EQ(r.depth, 4);
  EXPECT_EQ(r.latency(), 8);
  EXPECT_EQ(sd::stream_value(r.stream), Dyadic(1, -1));
  EXPECT_EQ(r.stream.scale_exp(), 4);
}

TEST(ReductionTree, NineInputsPadToDepthFour) {
  ReductionTree t(9);
  EXPECT_EQ(t.depth(), 4);
  EXPECT_EQ(t.latency(), 8);
  std::mt19937_64 rng(8);
  std::vector<sd::DigitStream> in;
  oracle::Rat want{0, 0};
  for (int i = 0; i < 9; ++i) {
    const auto d = oracle::random_digits(rng, 12);
    in.push_back(oracle::to_stream(d));
    want = oracle::add(want, oracle::digits_value(d, 0));
  }
  const auto r = tree_reduce(in);
  EXPECT_EQ(r.depth, 4);
  EXPECT_TRUE(oracle::equal(oracle::stream_rat(r.stream), want));
}

TEST(ReductionTree, MixedScalesAlignWithoutDelay) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng() % 20;
    std::vector<sd::DigitStream> in;
    oracle::Rat want{0, 0};
    for (std::size_t i = 0; i < m; ++i) {
      const auto d = oracle::random_digits(rng, 1 + rng() % 16);
      const int scale = int(rng() % 2);
      in.push_back(oracle::to_stream(d, scale));
      want = oracle::add(want, oracle::digits_value(d, scale));
    }
    const auto r = tree_reduce(in);
    ASSERT_TRUE(oracle::equal(oracle::stream_rat(r.stream), want));
    ASSERT_EQ(r.first_digit_step, 1 + 2 * oracle::clog2(m));
  }
}

TEST(ReductionTree, RejectsBadArguments) {
  EXPECT_THROW(tree_reduce(std::vector<sd::DigitStream>{}), Error);
  EXPECT_THROW(tree_reduce(std::vector<sd::DigitStream>{sd::DigitStream::from_ints({1})}, 3), Error);
  ReductionTree t(4);
  std::vector<SignedDigit> three(3);
  EXPECT_THROW(t.step(three), Error);
}
