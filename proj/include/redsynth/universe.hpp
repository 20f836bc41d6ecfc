#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "redsynth/extint.hpp"

namespace redsynth {

enum class ValueKind : std::uint8_t { Int, Str, Bool };
std::string_view kind_name(ValueKind k);

// A concrete value: an extended integer, a string, or a truth value.
using ConcreteValue = std::variant<ExtInt, std::string, bool>;

ValueKind kind_of(const ConcreteValue& v);
std::string format_concrete(const ConcreteValue& v);
// Parses 5, -inf, "abc", true/false.
std::optional<ConcreteValue> parse_concrete(std::string_view text);

struct ConcreteValueHash {
  std::size_t operator()(const ConcreteValue& v) const;
};

enum class OpName : std::uint8_t { Inc, Add, Sub, Abs, Concat, Trim, ToLower, ToUpper, Contains, CharAt };

struct ConcreteOp {
  OpName name;
  int arity;
  std::vector<ValueKind> args;
  ValueKind result;

  static ConcreteOp get(OpName n);
  static std::optional<ConcreteOp> parse(std::string_view s);
  std::string_view str() const;
};

struct UniverseConfig {
  std::int64_t int_bound = 16;      // integer inputs range over [-B, B]
  std::int64_t int_out_bound = 34;  // integer outputs range over [-B_out, B_out]
  std::string alphabet = "aN123 -";
  int max_len = 6;
  int max_out_len = 12;
  int ssk_k = 1;
  std::vector<std::string> keywords = default_keywords();

  static std::vector<std::string> default_keywords();
  // Throws std::invalid_argument naming the violated invariant.
  void validate() const;
  std::string fingerprint_text() const;
};

// A validated configuration plus lazily materialized carriers.
class Universe {
 public:
  explicit Universe(UniverseConfig cfg);

  const UniverseConfig& config() const { return cfg_; }
  // [-B..B] ascending, no sentinels.
  std::vector<ExtInt> ints() const;
  // Every string of length <= max_len, length-then-alphabet order. Cached.
  const std::vector<std::string>& strings() const;
  // Index domain for auxiliary positions: 0..max_len.
  std::vector<std::int64_t> indices() const;
  // The members of one kind as concrete values, in enumeration order. Cached.
  const std::vector<ConcreteValue>& values(ValueKind kind) const;
  // Per-member class ids of values(kind) under `classify`, cached under `key`
  // (the key names the classifier; callers keep it unique).
  const std::vector<std::uint32_t>& classes(const void* key, ValueKind kind,
                                            const std::function<std::uint32_t(const ConcreteValue&)>& classify) const;
  bool in_alphabet(std::string_view s) const;
  bool in_output_alphabet(char c) const;
  bool in_output_universe(const ConcreteValue& v) const;

 private:
  UniverseConfig cfg_;
  mutable std::once_flag strings_once_;
  mutable std::vector<std::string> strings_;
  mutable std::mutex cache_mu_;
  mutable std::map<ValueKind, std::vector<ConcreteValue>> values_;
  mutable std::map<std::pair<const void*, ValueKind>, std::vector<std::uint32_t>> classes_;
};

// Deterministic stream over one value kind (ints, strings or booleans).
std::vector<ConcreteValue> enumerate_universe(const Universe& u, ValueKind kind);
std::vector<std::string> all_strings(std::string_view alphabet, int max_len);

// Integer semantics over extended integers. nullopt when the result is
// indeterminate (e.g. +inf + -inf). Throws std::invalid_argument on arity
// mismatch or non-integer op.
std::optional<ExtInt> int_op_eval(OpName op, std::span<const ExtInt> args);

// String-operation semantics. Throws std::invalid_argument on misuse.
ConcreteValue str_op_eval(OpName op, std::span<const ConcreteValue> args);

// Either semantics; nullopt only for indeterminate integer results.
std::optional<ConcreteValue> apply_op(OpName op, std::span<const ConcreteValue> args);

std::string trim_spaces(std::string_view s);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

enum class StrClass : std::uint8_t { NumStr, OtherStr, SpecialStr };
std::string_view class_name(StrClass c);
StrClass classify_numeric(std::string_view s);
StrClass classify_special(std::string_view s, std::span<const std::string> keywords);

}  // namespace redsynth
