#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace redsynth {

// Integer extended with -inf / +inf. Infinite values compare below / above
// every finite value; the payload of an infinite value is always zero.
class ExtInt {
 public:
  enum class Kind : std::uint8_t { NegInf = 0, Finite = 1, PosInf = 2 };

  constexpr ExtInt() = default;
  constexpr ExtInt(std::int64_t v) : kind_(Kind::Finite), v_(v) {}  // NOLINT

  static constexpr ExtInt neg_inf() { return ExtInt(Kind::NegInf); }
  static constexpr ExtInt pos_inf() { return ExtInt(Kind::PosInf); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::Finite; }
  constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  constexpr std::int64_t value() const { return v_; }

  constexpr bool operator==(const ExtInt&) const = default;
  constexpr std::strong_ordering operator<=>(const ExtInt& o) const {
    if (kind_ != o.kind_) return kind_ <=> o.kind_;
    return v_ <=> o.v_;
  }

  constexpr ExtInt operator-() const {
    if (kind_ == Kind::NegInf) return pos_inf();
    if (kind_ == Kind::PosInf) return neg_inf();
    return ExtInt(-v_);
  }

  std::string str() const;
  static std::optional<ExtInt> parse(std::string_view s);

 private:
  constexpr explicit ExtInt(Kind k) : kind_(k), v_(0) {}
  Kind kind_ = Kind::Finite;
  std::int64_t v_ = 0;
};

// Sum of two extended integers; nullopt when the result is indeterminate
// (+inf plus -inf).
std::optional<ExtInt> ext_add(ExtInt a, ExtInt b);
std::optional<ExtInt> ext_sub(ExtInt a, ExtInt b);

inline ExtInt ext_min(ExtInt a, ExtInt b) { return b < a ? b : a; }
inline ExtInt ext_max(ExtInt a, ExtInt b) { return a < b ? b : a; }

// Parity helpers; only meaningful for finite values.
inline bool is_odd(std::int64_t v) { return (v % 2) != 0; }
inline std::int64_t round_down_odd(std::int64_t v) { return is_odd(v) ? v : v - 1; }
inline std::int64_t round_up_odd(std::int64_t v) { return is_odd(v) ? v : v + 1; }
inline std::int64_t round_down_even(std::int64_t v) { return is_odd(v) ? v - 1 : v; }
inline std::int64_t round_up_even(std::int64_t v) { return is_odd(v) ? v + 1 : v; }

}  // namespace redsynth
