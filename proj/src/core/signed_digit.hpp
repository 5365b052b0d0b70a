#pragma once

// Radix-2 redundant signed-digit values: digits, MSDF digit streams, two's
// complement fractions and the exact dyadic rationals they evaluate to.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dslr::sd {

// One radix-2 signed digit, stored in (plus, minus) bit form.
class SignedDigit {
 public:
  constexpr SignedDigit() = default;

  // Throws Error(InvalidArgument) for the forbidden (1,1) encoding.
  static SignedDigit from_bits(bool plus, bool minus);
  // Throws Error(InvalidArgument) unless v is -1, 0 or 1.
  static SignedDigit from_int(int v);

  static constexpr SignedDigit zero() { return SignedDigit(); }
  static constexpr SignedDigit one() { return SignedDigit(true, false); }
  static constexpr SignedDigit minus_one() { return SignedDigit(false, true); }

  constexpr bool plus() const { return plus_; }
  constexpr bool minus() const { return minus_; }
  constexpr int value() const { return int(plus_) - int(minus_); }

  constexpr SignedDigit negated() const { return SignedDigit(minus_, plus_); }

  friend constexpr bool operator==(SignedDigit, SignedDigit) = default;

 private:
  constexpr SignedDigit(bool p, bool m) : plus_(p), minus_(m) {}
  bool plus_ = false;
  bool minus_ = false;
};

// Exact value num * 2^exp. Kept normalised (num odd, or num == 0 with exp 0),
// so structural equality is value equality.
class Dyadic {
 public:
  using Int = __int128;

  constexpr Dyadic() = default;
  Dyadic(Int num, int exp);
  static Dyadic from_int(long long v) { return Dyadic(Int(v), 0); }
  // 2^k
  static Dyadic pow2(int k) { return Dyadic(Int(1), k); }

  Int num() const { return num_; }
  int exp() const { return exp_; }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  // Value scaled by 2^k (exact).
  Dyadic scaled(int k) const;
  Dyadic abs() const { return num_ < 0 ? Dyadic(-num_, exp_) : *this; }

  // Integer representation at the given number of fractional bits; throws
  // Error(Range) when the value is not a multiple of 2^-frac_bits or does not
  // fit in 64 bits.
  std::int64_t to_fixed_raw(int frac_bits) const;
  // floor(value * 2^frac_bits)
  std::int64_t floor_raw(int frac_bits) const;

  double to_double() const;
  std::string to_string() const;  // "p/q" or an integer

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  Dyadic operator-() const { return Dyadic(-num_, exp_); }
  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }

  friend bool operator==(const Dyadic&, const Dyadic&) = default;
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

 private:
  Int num_ = 0;
  int exp_ = 0;
};

// Two's complement fraction: value = raw / 2^(width-1), range [-1, 1).
class Fixed {
 public:
  static constexpr int kMaxWidth = 32;

  // Throws Error(Range) when raw is outside [-2^(width-1), 2^(width-1)) and
  // Error(InvalidArgument) for an unsupported width.
  Fixed(std::int64_t raw, int width);

  std::int64_t raw() const { return raw_; }
  int width() const { return width_; }
  int frac_bits() const { return width_ - 1; }
  Dyadic value() const { return Dyadic(raw_, -(width_ - 1)); }

  friend bool operator==(const Fixed&, const Fixed&) = default;

 private:
  std::int64_t raw_;
  int width_;
};

// MSDF digit sequence; digit i (1-based) weighs 2^(scale_exp - i).
class DigitStream {
 public:
  static constexpr std::size_t kMaxDigits = 120;

  DigitStream() = default;
  explicit DigitStream(std::vector<SignedDigit> digits, int scale_exp = 0);
  static DigitStream from_ints(std::span<const int> digits, int scale_exp = 0);
  static DigitStream from_ints(std::initializer_list<int> digits, int scale_exp = 0);

  const std::vector<SignedDigit>& digits() const { return digits_; }
  std::size_t size() const { return digits_.size(); }
  int scale_exp() const { return scale_exp_; }
  SignedDigit at(std::size_t i) const { return digits_.at(i); }

  // First j digits, same scale.
  DigitStream prefix(std::size_t j) const;
  // Same value at scale_exp + k: k leading zero digits.
  DigitStream aligned_to(int scale_exp) const;

  void push_back(SignedDigit d);

 private:
  std::vector<SignedDigit> digits_;
  int scale_exp_ = 0;
};

Dyadic stream_value(const DigitStream& s);

// Sign-magnitude digitisation: width digits, digit i = sign(x) * bit i of |x|.
// The single value -1 is not representable at scale 0 and is emitted as
// [-1, 0, ...] with scale_exp 1.
DigitStream fixed_to_stream(const Fixed& x);

// Truncates toward zero at 2^-(width-1). Throws Error(Overflow) when the value
// lies outside [-1, 1).
Fixed stream_to_fixed(const DigitStream& s, int width);

}  // namespace dslr::sd
