#pragma once

// Cycle-stepped MSDF (online) arithmetic units. Each unit consumes one digit
// (or digit pair) per step and returns the digit it emits on that step, if
// any.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core/signed_digit.hpp"

namespace dslr::online {

using sd::DigitStream;
using sd::Dyadic;
using sd::Fixed;
using sd::SignedDigit;

// Output digit selection on the 2-fractional-bit estimate of v[j].
// +1 for v_hat >= 1/2, -1 for v_hat <= -1/2, otherwise 0.
SignedDigit selm(const Dyadic& v_hat);

// Serial-parallel multiplier: the parallel operand X is held for the unit's
// lifetime, the serial operand Y arrives MSDF one digit per step.
//
//   v[j]     = 2 w[j] + X y_(j+3) / 4
//   p_(j+1)  = selm(floor_(1/4)(v[j]))        (j >= 0)
//   w[j+1]   = v[j] - p_(j+1)
//
// Steps 1 and 2 only load the residual; p_1 leaves on step 3. After feeding n
// operand digits followed by enough zeros, the emitted stream (at the serial
// operand's scale) equals X * Y exactly.
class OnlineMultiplier {
 public:
  static constexpr int kOnlineDelay = 2;

  explicit OnlineMultiplier(const Fixed& x);

  std::optional<SignedDigit> step(SignedDigit y);
  // Marks the unit as drained; any later step() throws Error(State).
  void finalize() { finalized_ = true; }
  // Clears the residual for a new serial operand; keeps X.
  void reset() {
    w_ = 0;
    steps_ = 0;
    emitted_ = 0;
    finalized_ = false;
  }

  const Fixed& operand() const { return x_; }
  // Residual w after the most recent step.
  Dyadic residual() const;
  int steps() const { return steps_; }
  int emitted() const { return emitted_; }

 private:
  Fixed x_;
  // w scaled by 2^(width + 1): always an integer.
  std::int64_t w_ = 0;
  int steps_ = 0;
  int emitted_ = 0;
  bool finalized_ = false;
};

// Radix-2 online adder, delta = 2.
//
// Operands share a scale s; the result is produced at scale s + 1 (one-digit
// pre-shift), so |x + y| < 2^(s+1) always fits. The pre-shifted operand pair
// sum s_j = x_j + y_j is split as s_j = 2 t_j + u_j where the transfer t_j is
// chosen by looking at whether the next pair is non-negative; this keeps
// z_j = u_(j) + t_(j+1) inside {-1, 0, 1} with no carry past the leading digit.
// Output digit k leaves on step k + 2.
class OnlineAdder {
 public:
  static constexpr int kOnlineDelay = 2;

  OnlineAdder() = default;
  // Test hook: flips the sign of the second emitted digit.
  explicit OnlineAdder(bool inject_fault) : fault_(inject_fault) {}

  std::optional<SignedDigit> step(SignedDigit x, SignedDigit y);
  int steps() const { return steps_; }

 private:
  int steps_ = 0;
  int emitted_ = 0;
  int prev_sum_ = 0;         // s_(j-1), transfer not yet decided
  int prev_interim_ = 0;     // u_(j-2)
  std::optional<int> out_reg_;
  bool fault_ = false;
};

// Balanced binary tree of online adders over m inputs (padded with zero
// streams up to a power of two). Inputs may carry different scales; lower
// scales are zero-prefixed to the maximum, which does not delay any digit.
// The output stream has scale max_scale + depth and its first digit leaves
// 2 * depth steps after the first input digits.
class ReductionTree {
 public:
  explicit ReductionTree(std::size_t inputs, bool inject_fault = false);
  ReductionTree(std::span<const int> input_scales, bool inject_fault = false);

  std::size_t inputs() const { return inputs_; }
  int depth() const { return depth_; }
  int output_scale() const { return max_scale_ + depth_; }
  // Steps from first input digit to first output digit.
  int latency() const { return OnlineAdder::kOnlineDelay * depth_; }

  // One digit per input (input_count() entries). Returns the tree's output
  // digit for this step, if one is emitted.
  std::optional<SignedDigit> step(std::span<const SignedDigit> digits);

 private:
  void build(bool inject_fault);

  std::size_t inputs_;
  int depth_ = 0;
  int max_scale_ = 0;
  std::vector<int> shift_;                       // per-input alignment
  std::vector<std::vector<SignedDigit>> delay_;  // per-input alignment delay line
  std::vector<std::size_t> delay_pos_;
  std::vector<std::vector<OnlineAdder>> levels_;
  std::vector<std::vector<SignedDigit>> level_in_;
  std::vector<bool> level_live_;
  int steps_ = 0;
};

struct TreeResult {
  DigitStream stream;
  int first_digit_step = 0;  // 1-based step of the first output digit
  int depth = 0;
  int latency() const { return first_digit_step - 1; }
};

// Sums the streams through a ReductionTree, feeding zeros until drained.
// Throws Error(InvalidArgument) for an empty list or delta_add != 2.
TreeResult tree_reduce(std::span<const DigitStream> streams, int delta_add = 2);

// Runs a multiplier over the whole serial stream plus flush digits and returns
// the emitted stream (digits_out digits, scale = serial scale).
DigitStream multiply_stream(const Fixed& x, const DigitStream& y, std::size_t digits_out);

// Runs an adder over two equal-scale streams; result has scale + 1 and
// max(len) + 1 digits.
DigitStream add_streams(const DigitStream& x, const DigitStream& y);

int ceil_log2(std::uint64_t v);

}  // namespace dslr::online
