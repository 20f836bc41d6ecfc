#pragma once

#include <string>
#include <vector>

#include "redsynth/config.hpp"
#include "redsynth/problem.hpp"

namespace redsynth::testing {

inline std::string config_path(const std::string& name) {
  return std::string(REDSYNTH_CONFIG_DIR) + "/" + name + ".conf";
}

inline ProblemSpec bundled(const std::string& name) { return load_config(config_path(name)); }

inline std::vector<std::string> bundled_names() {
  return {"odd_even_inc", "odd_even_add", "odd_even_sub", "odd_even_abs", "odd_even_inc_bootstrap",
          "safe_concat",  "safe_trim",    "safe_tolower", "safe_toupper", "safe_contains",
          "safe_charat",  "jsai_concat",  "jsai_trim",    "jsai_tolower", "jsai_toupper",
          "jsai_contains", "jsai_charat"};
}

inline ExtInt I(std::int64_t v) { return ExtInt(v); }
inline ConcreteValue C(std::int64_t v) { return ConcreteValue(ExtInt(v)); }
inline ConcreteValue S(std::string s) { return ConcreteValue(std::move(s)); }

// A point of the problem given as text; fails the calling test if it does
// not parse or is not part of the problem.
inline std::uint32_t point_of(const Problem& pb, const std::string& text) {
  auto in = pb.parse_point(text);
  if (!in) throw std::runtime_error("unparsable point " + text);
  auto p = pb.find(*in);
  if (!p) throw std::runtime_error("point not in problem: " + text);
  return *p;
}

}  // namespace redsynth::testing
