#include "redsynth/extint.hpp"

#include <charconv>

namespace redsynth {

std::string ExtInt::str() const {
  switch (kind_) {
    case Kind::NegInf: return "-inf";
    case Kind::PosInf: return "+inf";
    case Kind::Finite: break;
  }
  return std::to_string(v_);
}

std::optional<ExtInt> ExtInt::parse(std::string_view s) {
  if (s == "-inf" || s == "-oo") return neg_inf();
  if (s == "+inf" || s == "inf" || s == "+oo") return pos_inf();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return ExtInt(v);
}

std::optional<ExtInt> ext_add(ExtInt a, ExtInt b) {
  if (a.is_finite() && b.is_finite()) return ExtInt(a.value() + b.value());
  if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf())) return std::nullopt;
  if (a.is_pos_inf() || b.is_pos_inf()) return ExtInt::pos_inf();
  return ExtInt::neg_inf();
}

std::optional<ExtInt> ext_sub(ExtInt a, ExtInt b) { return ext_add(a, -b); }

}  // namespace redsynth
