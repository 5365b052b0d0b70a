#include "core/signed_digit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace dslr::sd {

namespace {

using Int = Dyadic::Int;

constexpr int kIntBits = 127;

int bit_length(Int v) {
  if (v < 0) v = -v;
  int n = 0;
  while (v != 0) {
    v >>= 1;
    ++n;
  }
  return n;
}

Int shl_checked(Int v, int k) {
  if (k == 0 || v == 0) return v;
  if (bit_length(v) + k >= kIntBits) {
    throw Error(ErrorCode::Overflow, "dyadic value exceeds 127-bit mantissa");
  }
  return v * (Int(1) << k);
}

// Both operands rewritten over the smaller exponent.
std::pair<Int, Int> common(const Dyadic& a, const Dyadic& b, int& exp) {
  if (a.is_zero()) {
    exp = b.exp();
    return {0, b.num()};
  }
  if (b.is_zero()) {
    exp = a.exp();
    return {a.num(), 0};
  }
  exp = std::min(a.exp(), b.exp());
  return {shl_checked(a.num(), a.exp() - exp), shl_checked(b.num(), b.exp() - exp)};
}

std::string int_to_string(Int v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  if (neg) v = -v;
  std::string s;
  while (v != 0) {
    s.push_back(char('0' + int(v % 10)));
    v /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace

SignedDigit SignedDigit::from_bits(bool plus, bool minus) {
  if (plus && minus) {
    throw Error(ErrorCode::InvalidArgument, "signed digit encoding (1,1) is not allowed");
  }
  return SignedDigit(plus, minus);
}

SignedDigit SignedDigit::from_int(int v) {
  switch (v) {
    case -1: return minus_one();
    case 0: return zero();
    case 1: return one();
    default:
      throw Error(ErrorCode::InvalidArgument,
                  "signed digit out of range: " + std::to_string(v));
  }
}

Dyadic::Dyadic(Int num, int exp) : num_(num), exp_(exp) {
  if (num_ == 0) {
    exp_ = 0;
    return;
  }
  while ((num_ & 1) == 0) {
    num_ >>= 1;
    ++exp_;
  }
}

Dyadic Dyadic::scaled(int k) const { return is_zero() ? *this : Dyadic(num_, exp_ + k); }

std::int64_t Dyadic::to_fixed_raw(int frac_bits) const {
  if (is_zero()) return 0;
  int shift = exp_ + frac_bits;
  if (shift < 0) {
    throw Error(ErrorCode::Range, "value " + to_string() + " is not a multiple of 2^-" +
                                      std::to_string(frac_bits));
  }
  Int v = shl_checked(num_, shift);
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw Error(ErrorCode::Range, "value does not fit a 64-bit raw word");
  }
  return static_cast<std::int64_t>(v);
}

std::int64_t Dyadic::floor_raw(int frac_bits) const {
  if (is_zero()) return 0;
  int shift = exp_ + frac_bits;
  Int v = shift >= 0 ? shl_checked(num_, shift) : (num_ >> std::min(-shift, 126));
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw Error(ErrorCode::Range, "value does not fit a 64-bit raw word");
  }
  return static_cast<std::int64_t>(v);
}

double Dyadic::to_double() const {
  return std::ldexp(static_cast<double>(num_), exp_);
}

std::string Dyadic::to_string() const {
  if (exp_ >= 0) return int_to_string(shl_checked(num_, exp_));
  return int_to_string(num_) + "/2^" + std::to_string(-exp_);
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  int e = 0;
  auto [x, y] = common(a, b, e);
  return Dyadic(x + y, e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (bit_length(a.num_) + bit_length(b.num_) >= kIntBits) {
    throw Error(ErrorCode::Overflow, "dyadic product exceeds 127-bit mantissa");
  }
  return Dyadic(a.num_ * b.num_, a.exp_ + b.exp_);
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  int e = 0;
  auto [x, y] = common(a, b, e);
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Fixed::Fixed(std::int64_t raw, int width) : raw_(raw), width_(width) {
  if (width < 2 || width > kMaxWidth) {
    throw Error(ErrorCode::InvalidArgument, "unsupported fixed-point width " + std::to_string(width));
  }
  const std::int64_t lim = std::int64_t(1) << (width - 1);
  if (raw < -lim || raw >= lim) {
    throw Error(ErrorCode::Range, "raw value " + std::to_string(raw) + " out of range for width " +
                                      std::to_string(width));
  }
}

DigitStream::DigitStream(std::vector<SignedDigit> digits, int scale_exp)
    : digits_(std::move(digits)), scale_exp_(scale_exp) {
  if (digits_.size() > kMaxDigits) {
    throw Error(ErrorCode::InvalidArgument, "digit stream longer than " + std::to_string(kMaxDigits));
  }
}

DigitStream DigitStream::from_ints(std::span<const int> digits, int scale_exp) {
  std::vector<SignedDigit> d;
  d.reserve(digits.size());
  for (int v : digits) d.push_back(SignedDigit::from_int(v));
  return DigitStream(std::move(d), scale_exp);
}

DigitStream DigitStream::from_ints(std::initializer_list<int> digits, int scale_exp) {
  return from_ints(std::span<const int>(digits.begin(), digits.size()), scale_exp);
}

DigitStream DigitStream::prefix(std::size_t j) const {
  j = std::min(j, digits_.size());
  return DigitStream(std::vector<SignedDigit>(digits_.begin(), digits_.begin() + long(j)), scale_exp_);
}

DigitStream DigitStream::aligned_to(int scale_exp) const {
  if (scale_exp < scale_exp_) {
    throw Error(ErrorCode::InvalidArgument, "cannot align a stream to a smaller scale");
  }
  std::vector<SignedDigit> d(std::size_t(scale_exp - scale_exp_), SignedDigit::zero());
  d.insert(d.end(), digits_.begin(), digits_.end());
  return DigitStream(std::move(d), scale_exp);
}

void DigitStream::push_back(SignedDigit d) {
  if (digits_.size() >= kMaxDigits) {
    throw Error(ErrorCode::InvalidArgument, "digit stream longer than " + std::to_string(kMaxDigits));
  }
  digits_.push_back(d);
}

Dyadic stream_value(const DigitStream& s) {
  // Horner over the digits: acc = sum d_i 2^(L-i), then scale by 2^(s-L).
  Int acc = 0;
  for (SignedDigit d : s.digits()) acc = acc * 2 + d.value();
  return Dyadic(acc, s.scale_exp() - int(s.size()));
}

DigitStream fixed_to_stream(const Fixed& x) {
  const int w = x.width();
  if (x.raw() == -(std::int64_t(1) << (w - 1))) {
    std::vector<SignedDigit> d(std::size_t(w), SignedDigit::zero());
    d[0] = SignedDigit::minus_one();
    return DigitStream(std::move(d), 1);
  }
  const std::int64_t mag = x.raw() < 0 ? -x.raw() : x.raw();
  const SignedDigit unit = x.raw() < 0 ? SignedDigit::minus_one() : SignedDigit::one();
  std::vector<SignedDigit> d(std::size_t(w), SignedDigit::zero());
  // Digit i (1-based) weighs 2^-i, i.e. bit (w-1-i) of the magnitude.
  for (int i = 1; i < w; ++i) {
    if ((mag >> (w - 1 - i)) & 1) d[std::size_t(i - 1)] = unit;
  }
  return DigitStream(std::move(d), 0);
}

Fixed stream_to_fixed(const DigitStream& s, int width) {
  const Dyadic v = stream_value(s);
  if (v >= Dyadic::from_int(1) || v < Dyadic::from_int(-1)) {
    throw Error(ErrorCode::Overflow, "stream value " + v.to_string() + " outside [-1, 1)");
  }
  const int fb = width - 1;
  std::int64_t raw = v.floor_raw(fb);
  // floor -> truncation toward zero for inexact negatives
  if (v.sign() < 0 && Dyadic(raw, -fb) != v) raw += 1;
  return Fixed(raw, width);
}

}  // namespace dslr::sd
