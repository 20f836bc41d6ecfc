#include "redsynth/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "redsynth/textutil.hpp"

namespace redsynth {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

// Drops a '#' comment that is not inside a quoted run.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (quoted && s[i] == '\\') {
      ++i;
    } else if (s[i] == '"') {
      quoted = !quoted;
    } else if (!quoted && s[i] == '#') {
      return s.substr(0, i);
    }
  }
  return s;
}

// Whitespace-separated words; quoted words are unquoted.
std::vector<std::string> words(std::string_view s, std::size_t line) {
  std::vector<std::string> out;
  for (auto w : split_top_level(s, ' ')) {
    w = trim_ws(w);
    if (w.empty()) continue;
    if (w.front() == '"') {
      auto u = unquote(w);
      if (!u) fail(line, "malformed quoted string " + std::string(w));
      out.push_back(*u);
    } else {
      out.emplace_back(w);
    }
  }
  return out;
}

std::string single(std::string_view v, std::size_t line) {
  auto w = words(v, line);
  if (w.size() != 1) fail(line, "expected one value, got '" + std::string(v) + "'");
  return w[0];
}

template <class T>
T number(std::string_view v, std::size_t line) {
  const std::string s = single(v, line);
  T out{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size()) fail(line, "expected a number, got '" + s + "'");
  return out;
}

int small_int(std::string_view v, std::size_t line, int lo) {
  auto n = number<std::int64_t>(v, line);
  if (n < lo || n > 1'000'000'000) fail(line, "value " + std::to_string(n) + " out of range");
  return static_cast<int>(n);
}

bool boolean(std::string_view v, std::size_t line) {
  const std::string s = single(v, line);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  fail(line, "expected true or false, got '" + s + "'");
}

ClassifierRule rule(std::string_view v, std::size_t line) {
  auto w = words(v, line);
  if (w.size() < 2) fail(line, "rule needs a kind and an element");
  ClassifierRule r;
  r.element = w[1];
  const std::string& kind = w[0];
  auto arity = [&](std::size_t n) {
    if (w.size() != n) fail(line, "rule '" + kind + "' takes " + std::to_string(n - 2) + " argument(s)");
  };
  auto num = [&](std::size_t i) { return number<std::int64_t>(w[i], line); };
  if (kind == "keywords") {
    r.kind = ClassifierRule::Kind::Keywords;
    r.words.assign(w.begin() + 2, w.end());
  } else if (kind == "regex") {
    arity(3);
    r.kind = ClassifierRule::Kind::Regex;
    r.pattern = w[2];
  } else if (kind == "range") {
    arity(4);
    r.kind = ClassifierRule::Kind::Range;
    r.a = num(2);
    r.b = num(3);
  } else if (kind == "mod") {
    arity(4);
    r.kind = ClassifierRule::Kind::Mod;
    r.a = num(2);
    r.b = num(3);
    if (r.a <= 0) fail(line, "mod rule needs a positive modulus");
  } else if (kind == "bool") {
    arity(3);
    r.kind = ClassifierRule::Kind::Bool;
    r.truth = boolean(w[2], line);
  } else if (kind == "default") {
    arity(2);
    r.kind = ClassifierRule::Kind::Default;
  } else {
    fail(line, "unknown rule kind '" + kind + "'");
  }
  return r;
}

// "<input> -> value"
BootstrapSpec example(std::string_view v, std::string component, std::size_t line) {
  // Find the top-level "->" separator (inputs may contain negative numbers).
  std::size_t depth = 0, at = std::string_view::npos;
  bool quoted = false;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    char c = v[i];
    if (quoted) {
      if (c == '\\') ++i;
      else if (c == '"') quoted = false;
      continue;
    }
    if (c == '"') quoted = true;
    else if (c == '<' || c == '[' || c == '{' || c == '(') ++depth;
    else if (c == '>' || c == ']' || c == '}' || c == ')') depth = depth ? depth - 1 : 0;
    else if (c == '-' && v[i + 1] == '>' && depth == 0) at = i;
  }
  if (at == std::string_view::npos) fail(line, "example must read '<input> -> value'");
  BootstrapSpec b;
  b.input = std::string(trim_ws(v.substr(0, at)));
  b.output = std::string(trim_ws(v.substr(at + 2)));
  b.component = std::move(component);
  if (b.input.empty() || b.output.empty()) fail(line, "example must read '<input> -> value'");
  return b;
}

ValueKind value_kind(std::string_view v, std::size_t line) {
  const std::string s = single(v, line);
  if (s == "int") return ValueKind::Int;
  if (s == "str") return ValueKind::Str;
  if (s == "bool") return ValueKind::Bool;
  fail(line, "kind must be int, str or bool");
}

}  // namespace

ProblemSpec parse_config(std::string_view text) {
  ProblemSpec spec;
  bool have_op = false, have_components = false;
  std::string section;
  std::set<std::string> seen;  // section/key pairs that must not repeat
  std::string* grammar = nullptr;
  FiniteDomainSpec* custom = nullptr;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view s = trim_ws(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "malformed section header");
      section = std::string(trim_ws(s.substr(1, s.size() - 2)));
      grammar = nullptr;
      custom = nullptr;
      if (!seen.insert("[" + section + "]").second) fail(line, "duplicate section [" + section + "]");
      if (section.rfind("grammar.", 0) == 0) {
        const std::string name = section.substr(8);
        if (name.empty()) fail(line, "grammar section needs a component name");
        grammar = &spec.grammars[name];
      } else if (section.rfind("domain.", 0) == 0) {
        spec.custom.push_back(FiniteDomainSpec{});
        custom = &spec.custom.back();
        custom->name = section.substr(7);
        if (custom->name.empty()) fail(line, "domain section needs a name");
      } else if (section != "operation" && section != "domains" && section != "universe" && section != "budget" &&
                 section != "engine" && section != "golden" && section != "bootstrap") {
        fail(line, "unknown section [" + section + "]");
      }
      continue;
    }
    if (section.empty()) fail(line, "text outside any section");
    if (grammar) {
      *grammar += std::string(s) + "\n";
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) fail(line, "expected 'key = value'");
    const std::string key(trim_ws(s.substr(0, eq)));
    const std::string_view val = trim_ws(s.substr(eq + 1));
    const bool repeatable = (section == "bootstrap") || (custom && (key == "cover" || key == "rule"));
    if (!repeatable && !seen.insert(section + "." + key).second) fail(line, "duplicate key '" + key + "'");
    auto unknown = [&]() { fail(line, "unknown key '" + key + "' in [" + section + "]"); };

    if (custom) {
      if (key == "ref") {
        custom->ref = single(val, line);
      } else if (key == "kind") {
        custom->kind = value_kind(val, line);
      } else if (key == "elements") {
        custom->elements = words(val, line);
      } else if (key == "cover") {
        auto w = words(val, line);
        if (w.size() != 2) fail(line, "cover takes 'lower upper'");
        custom->covers.emplace_back(w[0], w[1]);
      } else if (key == "rule") {
        custom->rules.push_back(rule(val, line));
      } else {
        unknown();
      }
    } else if (section == "operation") {
      if (key != "name") unknown();
      spec.op = single(val, line);
      have_op = true;
    } else if (section == "domains") {
      if (key == "components") {
        spec.components = words(val, line);
        have_components = true;
      } else if (key == "outputs") {
        spec.outputs = words(val, line);
      } else if (key == "aux") {
        spec.aux = words(val, line);
      } else {
        unknown();
      }
    } else if (section == "universe") {
      auto& u = spec.universe;
      if (key == "int_bound") u.int_bound = number<std::int64_t>(val, line);
      else if (key == "int_out_bound") u.int_out_bound = number<std::int64_t>(val, line);
      else if (key == "alphabet") u.alphabet = single(val, line);
      else if (key == "max_len") u.max_len = small_int(val, line, 0);
      else if (key == "max_out_len") u.max_out_len = small_int(val, line, 0);
      else if (key == "ssk_k") u.ssk_k = small_int(val, line, 1);
      else if (key == "keywords") u.keywords = words(val, line);
      else unknown();
    } else if (section == "budget") {
      auto& b = spec.budget;
      if (key == "grid_bound") b.grid_bound = number<std::int64_t>(val, line);
      else if (key == "max_size") b.max_size = small_int(val, line, 1);
      else if (key == "depth") b.depth = small_int(val, line, 0);
      else if (key == "string_singleton_len") b.string_singleton_len = small_int(val, line, 0);
      else if (key == "string_pair_len") b.string_pair_len = small_int(val, line, 0);
      else if (key == "index_bound") b.index_bound = small_int(val, line, 0);
      else if (key == "deadline_seconds") b.deadline_seconds = number<double>(val, line);
      else unknown();
    } else if (section == "engine") {
      auto& e = spec.engine;
      if (key == "policy") {
        const std::string p = single(val, line);
        if (p == "alternate") e.policy = Policy::Alternate;
        else if (p == "random") e.policy = Policy::Random;
        else fail(line, "policy must be alternate or random");
      } else if (key == "seed") {
        e.seed = number<std::uint64_t>(val, line);
      } else if (key == "fair_window") {
        e.fair_window = small_int(val, line, 1);
      } else if (key == "inner_cap") {
        e.inner_cap = small_int(val, line, 1);
      } else if (key == "outer_cap") {
        e.outer_cap = small_int(val, line, 1);
      } else if (key == "drop_cap") {
        e.drop_cap = small_int(val, line, 0);
      } else if (key == "check_invariants") {
        e.check_invariants = boolean(val, line);
      } else if (key == "strict_witness") {
        e.strict_witness = boolean(val, line);
      } else if (key == "precision") {
        const std::string p = single(val, line);
        if (p == "component") e.precision = PrecisionScope::Component;
        else if (p == "product") e.precision = PrecisionScope::Product;
        else fail(line, "precision must be component or product");
      } else if (key == "workers") {
        e.workers = small_int(val, line, 1);
      } else {
        unknown();
      }
    } else if (section == "golden") {
      spec.goldens[key] = std::string(val);
    } else if (section == "bootstrap") {
      if (key == "positive") {
        spec.bootstrap.push_back(example(val, "", line));
      } else if (key.rfind("negative.", 0) == 0 && key.size() > 9) {
        spec.bootstrap.push_back(example(val, key.substr(9), line));
      } else {
        unknown();
      }
    }
  }
  if (!have_op) throw ConfigError("missing [operation] name");
  if (!have_components) throw ConfigError("missing [domains] components");
  for (const auto& [name, body] : spec.grammars)
    if (trim_ws(body).empty()) throw ConfigError("grammar." + name + ": empty grammar block");
  return spec;
}

ProblemSpec load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.filename().string() + ": " + e.what());
  }
}

}  // namespace redsynth
