#include "core/online_units.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace dslr::online {

int ceil_log2(std::uint64_t v) {
  int d = 0;
  while ((std::uint64_t(1) << d) < v) ++d;
  return d;
}

SignedDigit selm(const Dyadic& v_hat) {
  static const Dyadic half = Dyadic::pow2(-1);
  if (v_hat >= half) return SignedDigit::one();
  if (v_hat <= -half) return SignedDigit::minus_one();
  return SignedDigit::zero();
}

OnlineMultiplier::OnlineMultiplier(const Fixed& x) : x_(x) {}

std::optional<SignedDigit> OnlineMultiplier::step(SignedDigit y) {
  if (finalized_) throw Error(ErrorCode::State, "online multiplier stepped after finalize()");
  ++steps_;
  const int w = x_.width();
  const std::int64_t v = 2 * w_ + x_.raw() * y.value();
  if (steps_ <= kOnlineDelay) {
    w_ = v;
    return std::nullopt;
  }
  // floor(4 v): v carries width + 1 fractional bits.
  const std::int64_t quarters = v >> (w - 1);
  int p = 0;
  if (quarters >= 2) {
    p = 1;
  } else if (quarters <= -2) {
    p = -1;
  }
  w_ = v - std::int64_t(p) * (std::int64_t(1) << (w + 1));
  ++emitted_;
  return SignedDigit::from_int(p);
}

Dyadic OnlineMultiplier::residual() const { return Dyadic(w_, -(x_.width() + 1)); }

namespace {

struct Split {
  int transfer;
  int interim;
};

// s = 2 t + u, with the branch for s = +-1 picked so that the next position's
// transfer cannot push u + t outside {-1, 0, 1}.
Split split_sum(int s, bool next_non_negative) {
  switch (s) {
    case 2: return {1, 0};
    case -2: return {-1, 0};
    case 1: return next_non_negative ? Split{1, -1} : Split{0, 1};
    case -1: return next_non_negative ? Split{0, -1} : Split{-1, 1};
    default: return {0, 0};
  }
}

}  // namespace

std::optional<SignedDigit> OnlineAdder::step(SignedDigit x, SignedDigit y) {
  ++steps_;
  const int s = x.value() + y.value();
  const bool non_negative = x.value() >= 0 && y.value() >= 0;

  std::optional<int> computed;
  if (steps_ >= 2) {
    const Split sp = split_sum(prev_sum_, non_negative);
    computed = prev_interim_ + sp.transfer;
    prev_interim_ = sp.interim;
  }
  prev_sum_ = s;

  std::optional<SignedDigit> out;
  if (out_reg_) {
    int z = *out_reg_;
    if (fault_ && emitted_ == 1) z = z == 0 ? 1 : -z;
    ++emitted_;
    out = SignedDigit::from_int(z);
  }
  out_reg_ = computed;
  return out;
}

ReductionTree::ReductionTree(std::size_t inputs, bool inject_fault)
    : inputs_(inputs), shift_(inputs, 0) {
  build(inject_fault);
}

ReductionTree::ReductionTree(std::span<const int> input_scales, bool inject_fault)
    : inputs_(input_scales.size()) {
  if (!input_scales.empty()) {
    max_scale_ = *std::max_element(input_scales.begin(), input_scales.end());
  }
  for (int s : input_scales) shift_.push_back(max_scale_ - s);
  build(inject_fault);
}

void ReductionTree::build(bool inject_fault) {
  if (inputs_ == 0) throw Error(ErrorCode::InvalidArgument, "reduction tree needs at least one input");
  depth_ = ceil_log2(inputs_);
  delay_.resize(inputs_);
  delay_pos_.assign(inputs_, 0);
  for (std::size_t i = 0; i < inputs_; ++i) {
    delay_[i].assign(std::size_t(shift_[i]), SignedDigit::zero());
  }
  std::size_t width = std::size_t(1) << depth_;
  level_in_.emplace_back(width, SignedDigit::zero());
  for (int l = 0; l < depth_; ++l) {
    width /= 2;
    levels_.emplace_back(width, OnlineAdder(inject_fault));
    level_in_.emplace_back(width, SignedDigit::zero());
  }
  level_live_.assign(std::size_t(depth_) + 1, false);
  level_live_[0] = true;
}

std::optional<SignedDigit> ReductionTree::step(std::span<const SignedDigit> digits) {
  if (digits.size() != inputs_) {
    throw Error(ErrorCode::InvalidArgument, "reduction tree fed the wrong number of digits");
  }
  ++steps_;
  auto& leaves = level_in_[0];
  for (std::size_t i = 0; i < inputs_; ++i) {
    if (shift_[i] == 0) {
      leaves[i] = digits[i];
    } else {
      auto& line = delay_[i];
      std::size_t& pos = delay_pos_[i];
      leaves[i] = line[pos];
      line[pos] = digits[i];
      pos = (pos + 1) % line.size();
    }
  }
  if (depth_ == 0) return leaves[0];

  for (std::size_t l = 0; l < levels_.size(); ++l) {
    if (!level_live_[l]) return std::nullopt;
    const auto& in = level_in_[l];
    auto& out = level_in_[l + 1];
    bool produced = false;
    for (std::size_t k = 0; k < levels_[l].size(); ++k) {
      auto z = levels_[l][k].step(in[2 * k], in[2 * k + 1]);
      if (z) {
        out[k] = *z;
        produced = true;
      }
    }
    if (!produced) return std::nullopt;
    level_live_[l + 1] = true;
  }
  return level_in_.back()[0];
}

TreeResult tree_reduce(std::span<const DigitStream> streams, int delta_add) {
  if (streams.empty()) throw Error(ErrorCode::InvalidArgument, "tree_reduce on an empty input list");
  if (delta_add != OnlineAdder::kOnlineDelay) {
    throw Error(ErrorCode::InvalidArgument, "the simulated online adder has delta = 2");
  }
  std::vector<int> scales;
  for (const auto& s : streams) scales.push_back(s.scale_exp());
  ReductionTree tree(scales);
  const int max_scale = *std::max_element(scales.begin(), scales.end());

  std::size_t aligned_len = 0;
  for (const auto& s : streams) {
    aligned_len = std::max(aligned_len, s.size() + std::size_t(max_scale - s.scale_exp()));
  }
  const std::size_t out_len = aligned_len + std::size_t(tree.depth());
  const std::size_t total_steps = out_len + std::size_t(2 * tree.depth());

  TreeResult r;
  r.depth = tree.depth();
  std::vector<SignedDigit> out;
  std::vector<SignedDigit> in(streams.size());
  for (std::size_t t = 0; t < total_steps; ++t) {
    for (std::size_t i = 0; i < streams.size(); ++i) {
      in[i] = t < streams[i].size() ? streams[i].at(t) : SignedDigit::zero();
    }
    if (auto z = tree.step(in)) {
      if (out.empty()) r.first_digit_step = int(t) + 1;
      out.push_back(*z);
    }
  }
  r.stream = DigitStream(std::move(out), tree.output_scale());
  return r;
}

DigitStream multiply_stream(const Fixed& x, const DigitStream& y, std::size_t digits_out) {
  OnlineMultiplier m(x);
  std::vector<SignedDigit> out;
  out.reserve(digits_out);
  for (std::size_t t = 0; out.size() < digits_out; ++t) {
    auto p = m.step(t < y.size() ? y.at(t) : SignedDigit::zero());
    if (p) out.push_back(*p);
  }
  return DigitStream(std::move(out), y.scale_exp());
}

DigitStream add_streams(const DigitStream& x, const DigitStream& y) {
  const int scale = std::max(x.scale_exp(), y.scale_exp());
  const DigitStream a = x.aligned_to(scale);
  const DigitStream b = y.aligned_to(scale);
  const std::size_t len = std::max(a.size(), b.size());
  OnlineAdder adder;
  std::vector<SignedDigit> out;
  for (std::size_t t = 0; t < len + 3; ++t) {
    auto z = adder.step(t < a.size() ? a.at(t) : SignedDigit::zero(),
                        t < b.size() ? b.at(t) : SignedDigit::zero());
    if (z) out.push_back(*z);
  }
  return DigitStream(std::move(out), scale + 1);
}

}  // namespace dslr::online
