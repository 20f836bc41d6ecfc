#include "redsynth/universe.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace redsynth {

std::string_view kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::Int: return "int";
    case ValueKind::Str: return "str";
    case ValueKind::Bool: return "bool";
  }
  return "?";
}

ValueKind kind_of(const ConcreteValue& v) {
  return static_cast<ValueKind>(v.index());
}

std::string format_concrete(const ConcreteValue& v) {
  if (auto* i = std::get_if<ExtInt>(&v)) return i->str();
  if (auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  std::string out = "\"";
  for (char c : std::get<std::string>(v)) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::optional<ConcreteValue> parse_concrete(std::string_view t) {
  if (t == "true") return ConcreteValue(true);
  if (t == "false") return ConcreteValue(false);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') {
    std::string s;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      if (t[i] == '\\' && i + 2 < t.size()) ++i;
      s += t[i];
    }
    return ConcreteValue(std::move(s));
  }
  if (auto e = ExtInt::parse(t)) return ConcreteValue(*e);
  return std::nullopt;
}

std::size_t ConcreteValueHash::operator()(const ConcreteValue& v) const {
  std::size_t h = v.index() * 0x9e3779b97f4a7c15ULL;
  if (auto* i = std::get_if<ExtInt>(&v)) {
    h ^= std::hash<std::int64_t>{}(i->value()) + static_cast<std::size_t>(i->kind()) * 31;
  } else if (auto* s = std::get_if<std::string>(&v)) {
    h ^= std::hash<std::string>{}(*s);
  } else {
    h ^= std::get<bool>(v) ? 7 : 3;
  }
  return h;
}

namespace {
struct OpInfo {
  OpName name;
  std::string_view text;
  std::vector<ValueKind> args;
  ValueKind result;
};

const std::vector<OpInfo>& op_table() {
  using K = ValueKind;
  static const std::vector<OpInfo> t = {
      {OpName::Inc, "inc", {K::Int}, K::Int},
      {OpName::Add, "add", {K::Int, K::Int}, K::Int},
      {OpName::Sub, "sub", {K::Int, K::Int}, K::Int},
      {OpName::Abs, "abs", {K::Int}, K::Int},
      {OpName::Concat, "concat", {K::Str, K::Str}, K::Str},
      {OpName::Trim, "trim", {K::Str}, K::Str},
      {OpName::ToLower, "toLower", {K::Str}, K::Str},
      {OpName::ToUpper, "toUpper", {K::Str}, K::Str},
      {OpName::Contains, "contains", {K::Str, K::Str}, K::Bool},
      {OpName::CharAt, "charAt", {K::Str, K::Int}, K::Str},
  };
  return t;
}
}  // namespace

ConcreteOp ConcreteOp::get(OpName n) {
  for (const auto& i : op_table())
    if (i.name == n) return {i.name, static_cast<int>(i.args.size()), i.args, i.result};
  throw std::invalid_argument("unknown operation");
}

std::optional<ConcreteOp> ConcreteOp::parse(std::string_view s) {
  for (const auto& i : op_table())
    if (i.text == s) return get(i.name);
  return std::nullopt;
}

std::string_view ConcreteOp::str() const {
  for (const auto& i : op_table())
    if (i.name == name) return i.text;
  return "?";
}

std::vector<std::string> UniverseConfig::default_keywords() {
  return {"length",   "concat",      "join",          "pop",           "push",
          "shift",    "sort",        "splice",        "reverse",       "valueOf",
          "toString", "indexOf",     "lastIndexOf",   "constructor",   "isPrototypeOf",
          "toLocaleString", "hasOwnProperty", "propertyIsEnumerable"};
}

void UniverseConfig::validate() const {
  if (int_bound < 0) throw std::invalid_argument("universe: int_bound must be >= 0");
  if (int_out_bound < 2 * int_bound + 2)
    throw std::invalid_argument("universe: int_out_bound must be >= 2*int_bound+2");
  if (alphabet.empty()) throw std::invalid_argument("universe: alphabet must be non-empty");
  std::string sorted = alphabet;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("universe: alphabet has duplicate characters");
  if (max_len < 0) throw std::invalid_argument("universe: max_len must be >= 0");
  if (max_out_len < 2 * max_len) throw std::invalid_argument("universe: max_out_len must be >= 2*max_len");
  if (ssk_k < 1) throw std::invalid_argument("universe: k must be >= 1");
}

std::string UniverseConfig::fingerprint_text() const {
  std::ostringstream os;
  os << "B=" << int_bound << ";Bout=" << int_out_bound << ";alpha=" << alphabet << ";len=" << max_len
     << ";outlen=" << max_out_len << ";k=" << ssk_k << ";kw=";
  for (const auto& k : keywords) os << k << ',';
  return os.str();
}

Universe::Universe(UniverseConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::vector<ExtInt> Universe::ints() const {
  std::vector<ExtInt> out;
  for (std::int64_t v = -cfg_.int_bound; v <= cfg_.int_bound; ++v) out.emplace_back(v);
  return out;
}

const std::vector<std::string>& Universe::strings() const {
  std::call_once(strings_once_, [this] { strings_ = all_strings(cfg_.alphabet, cfg_.max_len); });
  return strings_;
}

const std::vector<ConcreteValue>& Universe::values(ValueKind kind) const {
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    if (auto it = values_.find(kind); it != values_.end()) return it->second;
  }
  auto v = enumerate_universe(*this, kind);
  std::lock_guard<std::mutex> lock(cache_mu_);
  return values_.emplace(kind, std::move(v)).first->second;
}

const std::vector<std::uint32_t>& Universe::classes(
    const void* key, ValueKind kind, const std::function<std::uint32_t(const ConcreteValue&)>& classify) const {
  const auto id = std::make_pair(key, kind);
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    if (auto it = classes_.find(id); it != classes_.end()) return it->second;
  }
  const auto& vs = values(kind);
  std::vector<std::uint32_t> out;
  out.reserve(vs.size());
  for (const auto& c : vs) out.push_back(classify(c));
  std::lock_guard<std::mutex> lock(cache_mu_);
  return classes_.emplace(id, std::move(out)).first->second;
}

std::vector<std::int64_t> Universe::indices() const {
  std::vector<std::int64_t> out;
  for (int i = 0; i <= cfg_.max_len; ++i) out.push_back(i);
  return out;
}

bool Universe::in_alphabet(std::string_view s) const {
  return std::all_of(s.begin(), s.end(), [&](char c) { return cfg_.alphabet.find(c) != std::string::npos; });
}

bool Universe::in_output_alphabet(char c) const {
  // Case mapping can leave the input alphabet ("a" -> "A"), so outputs may use
  // the case-mapped image of every alphabet character as well.
  for (char a : cfg_.alphabet) {
    if (a == c) return true;
    if (std::tolower(static_cast<unsigned char>(a)) == static_cast<unsigned char>(c)) return true;
    if (std::toupper(static_cast<unsigned char>(a)) == static_cast<unsigned char>(c)) return true;
  }
  return false;
}

bool Universe::in_output_universe(const ConcreteValue& v) const {
  if (auto* i = std::get_if<ExtInt>(&v))
    return !i->is_finite() || (i->value() >= -cfg_.int_out_bound && i->value() <= cfg_.int_out_bound);
  if (auto* s = std::get_if<std::string>(&v))
    return static_cast<int>(s->size()) <= cfg_.max_out_len &&
           std::all_of(s->begin(), s->end(), [&](char c) { return in_output_alphabet(c); });
  return true;
}

std::vector<std::string> all_strings(std::string_view alphabet, int max_len) {
  std::vector<std::string> out{""};
  std::size_t begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (char c : alphabet) out.push_back(out[i] + c);
    begin = end;
  }
  return out;
}

std::vector<ConcreteValue> enumerate_universe(const Universe& u, ValueKind kind) {
  std::vector<ConcreteValue> out;
  switch (kind) {
    case ValueKind::Int:
      for (auto v : u.ints()) out.emplace_back(v);
      break;
    case ValueKind::Str:
      for (const auto& s : u.strings()) out.emplace_back(s);
      break;
    case ValueKind::Bool:
      out.emplace_back(false);
      out.emplace_back(true);
      break;
  }
  return out;
}

std::optional<ExtInt> int_op_eval(OpName op, std::span<const ExtInt> a) {
  auto need = [&](std::size_t n) {
    if (a.size() != n) throw std::invalid_argument("arity mismatch");
  };
  switch (op) {
    case OpName::Inc: need(1); return ext_add(a[0], ExtInt(1));
    case OpName::Abs: need(1); return a[0] < ExtInt(0) ? -a[0] : a[0];
    case OpName::Add: need(2); return ext_add(a[0], a[1]);
    case OpName::Sub: need(2); return ext_sub(a[0], a[1]);
    default: throw std::invalid_argument("not an integer operation");
  }
}

std::string trim_spaces(std::string_view s) {
  std::size_t b = s.find_first_not_of(' ');
  if (b == std::string_view::npos) return "";
  std::size_t e = s.find_last_not_of(' ');
  return std::string(s.substr(b, e - b + 1));
}

std::string to_lower(std::string_view s) {
  std::string r(s);
  for (char& c : r) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return r;
}

std::string to_upper(std::string_view s) {
  std::string r(s);
  for (char& c : r) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return r;
}

ConcreteValue str_op_eval(OpName op, std::span<const ConcreteValue> a) {
  auto need = [&](std::size_t n) {
    if (a.size() != n) throw std::invalid_argument("arity mismatch");
  };
  auto str = [&](std::size_t i) -> const std::string& {
    auto* s = std::get_if<std::string>(&a[i]);
    if (!s) throw std::invalid_argument("expected a string argument");
    return *s;
  };
  switch (op) {
    case OpName::Concat: need(2); return str(0) + str(1);
    case OpName::Trim: need(1); return trim_spaces(str(0));
    case OpName::ToLower: need(1); return to_lower(str(0));
    case OpName::ToUpper: need(1); return to_upper(str(0));
    case OpName::Contains: need(2); return str(0).find(str(1)) != std::string::npos;
    case OpName::CharAt: {
      need(2);
      auto* i = std::get_if<ExtInt>(&a[1]);
      if (!i || !i->is_finite() || i->value() < 0) throw std::invalid_argument("charAt index must be a natural");
      const auto& s = str(0);
      if (static_cast<std::size_t>(i->value()) >= s.size()) return std::string();
      return std::string(1, s[static_cast<std::size_t>(i->value())]);
    }
    default: throw std::invalid_argument("not a string operation");
  }
}

std::optional<ConcreteValue> apply_op(OpName op, std::span<const ConcreteValue> args) {
  switch (op) {
    case OpName::Inc:
    case OpName::Add:
    case OpName::Sub:
    case OpName::Abs: {
      std::vector<ExtInt> ints;
      for (const auto& v : args) {
        auto* i = std::get_if<ExtInt>(&v);
        if (!i) throw std::invalid_argument("expected an integer argument");
        ints.push_back(*i);
      }
      auto r = int_op_eval(op, ints);
      if (!r) return std::nullopt;
      return ConcreteValue(*r);
    }
    default: return str_op_eval(op, args);
  }
}

std::string_view class_name(StrClass c) {
  switch (c) {
    case StrClass::NumStr: return "NumStr";
    case StrClass::OtherStr: return "OtherStr";
    case StrClass::SpecialStr: return "SpecialStr";
  }
  return "?";
}

StrClass classify_numeric(std::string_view s) {
  if (s == "NaN") return StrClass::NumStr;
  std::string_view d = s;
  if (!d.empty() && d.front() == '-') d.remove_prefix(1);
  if (d.empty()) return StrClass::OtherStr;
  for (char c : d)
    if (c < '0' || c > '9') return StrClass::OtherStr;
  return StrClass::NumStr;
}

StrClass classify_special(std::string_view s, std::span<const std::string> keywords) {
  for (const auto& k : keywords)
    if (k == s) return StrClass::SpecialStr;
  return classify_numeric(s);
}

}  // namespace redsynth
