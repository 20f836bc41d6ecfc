#include "redsynth/domains.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <stdexcept>

#include "redsynth/textutil.hpp"

namespace redsynth {

namespace {
std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}
}  // namespace

std::size_t AbstractValueHash::operator()(const AbstractValue& v) const {
  std::size_t h = static_cast<std::size_t>(v.tag);
  h = mix(h, std::hash<std::int64_t>{}(v.lo.value()) * 3 + static_cast<std::size_t>(v.lo.kind()));
  h = mix(h, std::hash<std::int64_t>{}(v.hi.value()) * 3 + static_cast<std::size_t>(v.hi.kind()));
  for (const auto& s : v.strs) h = mix(h, std::hash<std::string>{}(s));
  h = mix(h, v.elem);
  h = mix(h, ConcreteValueHash{}(v.cst));
  return h;
}

AbstractValue Domain::alpha(std::span<const ConcreteValue> s) const {
  auto acc = accumulator();
  for (const auto& c : s) {
    acc->add(c);
    if (acc->saturated()) break;
  }
  return acc->result();
}

std::vector<std::pair<std::string, AbstractValue>> Domain::constants() const {
  return {{"Bot", bot()}, {"Top", top()}};
}

// ---------------------------------------------------------------------------
// Intervals

IntervalDomain::IntervalDomain(Parity p)
    : Domain(p == Parity::Odd ? "odd" : p == Parity::Even ? "even" : "interval",
             p == Parity::Odd ? "o" : p == Parity::Even ? "e" : "i"),
      parity_(p) {}

AbstractValue IntervalDomain::make(ExtInt lo, ExtInt hi) {
  AbstractValue v;
  if (hi < lo) return v;
  v.tag = AbstractValue::Tag::Val;
  v.lo = lo;
  v.hi = hi;
  return v;
}

AbstractValue IntervalDomain::bot() const { return AbstractValue{}; }
AbstractValue IntervalDomain::top() const { return make(ExtInt::neg_inf(), ExtInt::pos_inf()); }

AbstractValue IntervalDomain::alpha_range(ExtInt mn, ExtInt mx) const {
  if (parity_ != Parity::Any) {
    bool odd = parity_ == Parity::Odd;
    if (mn.is_finite()) mn = odd ? round_down_odd(mn.value()) : round_down_even(mn.value());
    if (mx.is_finite()) mx = odd ? round_up_odd(mx.value()) : round_up_even(mx.value());
  }
  return make(mn, mx);
}

bool IntervalDomain::leq(const AbstractValue& a, const AbstractValue& b) const {
  if (a.tag == AbstractValue::Tag::Bot) return true;
  if (b.tag == AbstractValue::Tag::Bot) return false;
  return b.lo <= a.lo && a.hi <= b.hi;
}

AbstractValue IntervalDomain::join(const AbstractValue& a, const AbstractValue& b) const {
  if (a.tag == AbstractValue::Tag::Bot) return b;
  if (b.tag == AbstractValue::Tag::Bot) return a;
  return make(ext_min(a.lo, b.lo), ext_max(a.hi, b.hi));
}

AbstractValue IntervalDomain::meet(const AbstractValue& a, const AbstractValue& b) const {
  if (a.tag == AbstractValue::Tag::Bot || b.tag == AbstractValue::Tag::Bot) return bot();
  return make(ext_max(a.lo, b.lo), ext_min(a.hi, b.hi));
}

bool IntervalDomain::contains(const AbstractValue& a, const ConcreteValue& c) const {
  if (a.tag == AbstractValue::Tag::Bot) return false;
  const auto* x = std::get_if<ExtInt>(&c);
  if (!x) return false;
  if (x->is_neg_inf()) return a.lo.is_neg_inf();
  if (x->is_pos_inf()) return a.hi.is_pos_inf();
  return a.lo <= *x && *x <= a.hi;
}

std::vector<ConcreteValue> IntervalDomain::gamma(const AbstractValue& a, const Universe& u) const {
  std::vector<ConcreteValue> out;
  if (a.tag == AbstractValue::Tag::Bot) return out;
  const std::int64_t b = u.config().int_bound;
  if (a.lo.is_neg_inf()) out.emplace_back(ExtInt::neg_inf());
  ExtInt from = ext_max(a.lo, ExtInt(-b));
  ExtInt to = ext_min(a.hi, ExtInt(b));
  if (from.is_finite() && to.is_finite())
    for (std::int64_t v = from.value(); v <= to.value(); ++v) out.emplace_back(ExtInt(v));
  if (a.hi.is_pos_inf()) out.emplace_back(ExtInt::pos_inf());
  return out;
}

std::size_t IntervalDomain::gamma_size_hint(const AbstractValue& a, const Universe& u) const {
  if (a.tag == AbstractValue::Tag::Bot) return 0;
  const std::int64_t b = u.config().int_bound;
  ExtInt from = ext_max(a.lo, ExtInt(-b));
  ExtInt to = ext_min(a.hi, ExtInt(b));
  std::size_t n = (a.lo.is_neg_inf() ? 1 : 0) + (a.hi.is_pos_inf() ? 1 : 0);
  if (from.is_finite() && to.is_finite() && from <= to) n += static_cast<std::size_t>(to.value() - from.value() + 1);
  return n;
}

namespace {
class IntervalAcc final : public Accumulator {
 public:
  explicit IntervalAcc(const IntervalDomain& d) : d_(d) {}
  void add(const ConcreteValue& c) override {
    const auto& x = std::get<ExtInt>(c);
    if (!any_) {
      mn_ = mx_ = x;
      any_ = true;
    } else {
      mn_ = ext_min(mn_, x);
      mx_ = ext_max(mx_, x);
    }
  }
  bool saturated() const override { return any_ && mn_.is_neg_inf() && mx_.is_pos_inf(); }
  AbstractValue result() const override { return any_ ? d_.alpha_range(mn_, mx_) : d_.bot(); }

 private:
  const IntervalDomain& d_;
  bool any_ = false;
  ExtInt mn_, mx_;
};
}  // namespace

std::unique_ptr<Accumulator> IntervalDomain::accumulator() const { return std::make_unique<IntervalAcc>(*this); }

bool IntervalDomain::valid(const AbstractValue& a) const {
  if (a.tag == AbstractValue::Tag::Bot || parity_ == Parity::Any) return true;
  bool want_odd = parity_ == Parity::Odd;
  auto ok = [&](ExtInt x) { return !x.is_finite() || is_odd(x.value()) == want_odd; };
  return ok(a.lo) && ok(a.hi);
}

std::string IntervalDomain::format(const AbstractValue& a) const {
  if (a.tag == AbstractValue::Tag::Bot) return "bot";
  return "[" + a.lo.str() + "," + a.hi.str() + "]";
}

std::optional<AbstractValue> IntervalDomain::parse(std::string_view t) const {
  t = trim_ws(t);
  if (t == "bot" || t == "Bot") return bot();
  if (t == "top" || t == "Top") return top();
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') return std::nullopt;
  auto parts = split_top_level(t.substr(1, t.size() - 2), ',');
  if (parts.size() != 2) return std::nullopt;
  auto lo = ExtInt::parse(trim_ws(parts[0]));
  auto hi = ExtInt::parse(trim_ws(parts[1]));
  if (!lo || !hi) return std::nullopt;
  return make(*lo, *hi);
}

// ---------------------------------------------------------------------------
// Bounded string sets

StringSetDomain::StringSetDomain(int k) : Domain("ssk", "ssk"), k_(k) {}

AbstractValue StringSetDomain::bot() const { return AbstractValue{}; }

AbstractValue StringSetDomain::top() const {
  AbstractValue v;
  v.tag = AbstractValue::Tag::Top;
  return v;
}

AbstractValue StringSetDomain::make(std::vector<std::string> strs) const {
  std::sort(strs.begin(), strs.end());
  strs.erase(std::unique(strs.begin(), strs.end()), strs.end());
  if (strs.empty()) return bot();
  if (static_cast<int>(strs.size()) > k_) return top();
  AbstractValue v;
  v.tag = AbstractValue::Tag::Val;
  v.strs = std::move(strs);
  return v;
}

bool StringSetDomain::leq(const AbstractValue& a, const AbstractValue& b) const {
  using T = AbstractValue::Tag;
  if (a.tag == T::Bot || b.tag == T::Top) return true;
  if (b.tag == T::Bot || a.tag == T::Top) return false;
  return std::includes(b.strs.begin(), b.strs.end(), a.strs.begin(), a.strs.end());
}

AbstractValue StringSetDomain::join(const AbstractValue& a, const AbstractValue& b) const {
  using T = AbstractValue::Tag;
  if (a.tag == T::Bot) return b;
  if (b.tag == T::Bot) return a;
  if (a.tag == T::Top || b.tag == T::Top) return top();
  std::vector<std::string> u = a.strs;
  u.insert(u.end(), b.strs.begin(), b.strs.end());
  return make(std::move(u));
}

AbstractValue StringSetDomain::meet(const AbstractValue& a, const AbstractValue& b) const {
  using T = AbstractValue::Tag;
  if (a.tag == T::Top) return b;
  if (b.tag == T::Top) return a;
  if (a.tag == T::Bot || b.tag == T::Bot) return bot();
  std::vector<std::string> out;
  std::set_intersection(a.strs.begin(), a.strs.end(), b.strs.begin(), b.strs.end(), std::back_inserter(out));
  return make(std::move(out));
}

bool StringSetDomain::contains(const AbstractValue& a, const ConcreteValue& c) const {
  const auto* s = std::get_if<std::string>(&c);
  if (!s || a.tag == AbstractValue::Tag::Bot) return false;
  if (a.tag == AbstractValue::Tag::Top) return true;
  return std::binary_search(a.strs.begin(), a.strs.end(), *s);
}

std::vector<ConcreteValue> StringSetDomain::gamma(const AbstractValue& a, const Universe& u) const {
  std::vector<ConcreteValue> out;
  if (a.tag == AbstractValue::Tag::Top) {
    for (const auto& s : u.strings()) out.emplace_back(s);
  } else {
    for (const auto& s : a.strs) out.emplace_back(s);
  }
  return out;
}

std::size_t StringSetDomain::gamma_size_hint(const AbstractValue& a, const Universe& u) const {
  return a.tag == AbstractValue::Tag::Top ? u.strings().size() : a.strs.size();
}

namespace {
class SetAcc final : public Accumulator {
 public:
  explicit SetAcc(const StringSetDomain& d) : d_(d) {}
  void add(const ConcreteValue& c) override {
    if (top_) return;
    seen_.insert(std::get<std::string>(c));
    if (static_cast<int>(seen_.size()) > d_.k()) top_ = true;
  }
  bool saturated() const override { return top_; }
  AbstractValue result() const override {
    if (top_) return d_.top();
    return d_.make(std::vector<std::string>(seen_.begin(), seen_.end()));
  }

 private:
  const StringSetDomain& d_;
  std::set<std::string> seen_;
  bool top_ = false;
};
}  // namespace

std::unique_ptr<Accumulator> StringSetDomain::accumulator() const { return std::make_unique<SetAcc>(*this); }

bool StringSetDomain::valid(const AbstractValue& a) const {
  if (a.tag != AbstractValue::Tag::Val) return a.strs.empty();
  return !a.strs.empty() && static_cast<int>(a.strs.size()) <= k_ &&
         std::is_sorted(a.strs.begin(), a.strs.end());
}

std::string StringSetDomain::format(const AbstractValue& a) const {
  if (a.tag == AbstractValue::Tag::Bot) return "Bot";
  if (a.tag == AbstractValue::Tag::Top) return "Top";
  std::string out = "{";
  for (std::size_t i = 0; i < a.strs.size(); ++i) {
    if (i) out += ", ";
    out += quote(a.strs[i]);
  }
  return out + "}";
}

std::optional<AbstractValue> StringSetDomain::parse(std::string_view t) const {
  t = trim_ws(t);
  if (t == "Bot" || t == "bot") return bot();
  if (t == "Top" || t == "top") return top();
  if (t.size() < 2 || t.front() != '{' || t.back() != '}') return std::nullopt;
  std::vector<std::string> strs;
  for (auto part : split_top_level(t.substr(1, t.size() - 2), ',')) {
    part = trim_ws(part);
    if (part.empty()) continue;
    auto s = unquote(part);
    if (!s) return std::nullopt;
    strs.push_back(*s);
  }
  return make(std::move(strs));
}

// ---------------------------------------------------------------------------
// Finite lattices

FiniteDomain::FiniteDomain(std::string name, std::string ref, ValueKind kind, std::vector<std::string> elems,
                           std::vector<std::pair<std::uint32_t, std::uint32_t>> covers, Classifier classify)
    : Domain(std::move(name), std::move(ref)), kind_(kind), elems_(std::move(elems)), classify_(std::move(classify)) {
  const std::size_t n = elems_.size();
  if (n == 0) throw std::invalid_argument("finite domain '" + this->name() + "' has no elements");
  le_.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) le_[i][i] = true;
  for (auto [a, b] : covers) {
    if (a >= n || b >= n) throw std::invalid_argument("finite domain cover out of range");
    le_[a][b] = true;
  }
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t i = 0; i < n; ++i)
      if (le_[i][m])
        for (std::size_t j = 0; j < n; ++j)
          if (le_[m][j]) le_[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && le_[i][j] && le_[j][i])
        throw std::invalid_argument("finite domain '" + this->name() + "' order is cyclic");

  auto bound = [&](std::size_t a, std::size_t b, bool upper) -> std::uint32_t {
    std::vector<std::size_t> cands;
    for (std::size_t u = 0; u < n; ++u)
      if (upper ? (le_[a][u] && le_[b][u]) : (le_[u][a] && le_[u][b])) cands.push_back(u);
    for (auto c : cands) {
      bool best = std::all_of(cands.begin(), cands.end(), [&](std::size_t o) { return upper ? le_[c][o] : le_[o][c]; });
      if (best) return static_cast<std::uint32_t>(c);
    }
    throw std::invalid_argument("finite domain '" + this->name() + "' is not a lattice");
  };
  join_.assign(n, std::vector<std::uint32_t>(n));
  meet_.assign(n, std::vector<std::uint32_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      join_[i][j] = bound(i, j, true);
      meet_[i][j] = bound(i, j, false);
    }
  bot_ = top_ = 0;
  for (std::uint32_t i = 1; i < n; ++i) {
    bot_ = meet_[bot_][i];
    top_ = join_[top_][i];
  }
}

AbstractValue FiniteDomain::at(std::uint32_t i) const {
  AbstractValue v;
  v.tag = i == bot_ ? AbstractValue::Tag::Bot : i == top_ ? AbstractValue::Tag::Top : AbstractValue::Tag::Val;
  v.elem = i;
  return v;
}

AbstractValue FiniteDomain::named(std::string_view n) const {
  for (std::uint32_t i = 0; i < elems_.size(); ++i)
    if (elems_[i] == n) return at(i);
  throw std::invalid_argument("unknown element '" + std::string(n) + "' of domain " + name());
}

bool FiniteDomain::leq(const AbstractValue& a, const AbstractValue& b) const { return le_[a.elem][b.elem]; }

AbstractValue FiniteDomain::join(const AbstractValue& a, const AbstractValue& b) const {
  return at(join_[a.elem][b.elem]);
}

AbstractValue FiniteDomain::meet(const AbstractValue& a, const AbstractValue& b) const {
  return at(meet_[a.elem][b.elem]);
}

bool FiniteDomain::contains(const AbstractValue& a, const ConcreteValue& c) const {
  if (kind_of(c) != kind_) return false;
  return le_[classify_(c)][a.elem];
}

std::vector<ConcreteValue> FiniteDomain::gamma(const AbstractValue& a, const Universe& u) const {
  std::vector<ConcreteValue> out;
  if (a.elem == bot_) return out;
  const auto& vs = u.values(kind_);
  const auto& cls = u.classes(this, kind_, classify_);
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (le_[cls[i]][a.elem]) out.push_back(vs[i]);
  return out;
}

std::size_t FiniteDomain::gamma_size_hint(const AbstractValue& a, const Universe& u) const {
  if (a.elem == bot_) return 0;
  switch (kind_) {
    case ValueKind::Int: return static_cast<std::size_t>(2 * u.config().int_bound + 1);
    case ValueKind::Str: return u.strings().size();
    case ValueKind::Bool: return 2;
  }
  return 0;
}

namespace {
class FiniteAcc final : public Accumulator {
 public:
  explicit FiniteAcc(const FiniteDomain& d) : d_(d), cur_(d.bot()) {}
  void add(const ConcreteValue& c) override { cur_ = d_.join(cur_, d_.at(d_.classify(c))); }
  bool saturated() const override { return d_.is_top(cur_); }
  AbstractValue result() const override { return cur_; }

 private:
  const FiniteDomain& d_;
  AbstractValue cur_;
};
}  // namespace

std::unique_ptr<Accumulator> FiniteDomain::accumulator() const { return std::make_unique<FiniteAcc>(*this); }

std::string FiniteDomain::format(const AbstractValue& a) const { return elems_.at(a.elem); }

std::optional<AbstractValue> FiniteDomain::parse(std::string_view t) const {
  t = trim_ws(t);
  for (std::uint32_t i = 0; i < elems_.size(); ++i)
    if (elems_[i] == t) return at(i);
  if (t == "top" || t == "Top") return top();
  if (t == "bot" || t == "Bot") return bot();
  return std::nullopt;
}

std::vector<std::pair<std::string, AbstractValue>> FiniteDomain::constants() const {
  std::vector<std::pair<std::string, AbstractValue>> out;
  for (std::uint32_t i = 0; i < elems_.size(); ++i) out.emplace_back(elems_[i], at(i));
  return out;
}

// ---------------------------------------------------------------------------
// Flat lattices

FlatDomain::FlatDomain(std::string name, std::string ref, ValueKind kind)
    : Domain(std::move(name), std::move(ref)), kind_(kind) {}

AbstractValue FlatDomain::bot() const { return AbstractValue{}; }

AbstractValue FlatDomain::top() const {
  AbstractValue v;
  v.tag = AbstractValue::Tag::Top;
  return v;
}

AbstractValue FlatDomain::make(ConcreteValue c) {
  AbstractValue v;
  v.tag = AbstractValue::Tag::Val;
  v.cst = std::move(c);
  return v;
}

bool FlatDomain::leq(const AbstractValue& a, const AbstractValue& b) const {
  using T = AbstractValue::Tag;
  if (a.tag == T::Bot || b.tag == T::Top) return true;
  if (b.tag == T::Bot || a.tag == T::Top) return false;
  return a.cst == b.cst;
}

AbstractValue FlatDomain::join(const AbstractValue& a, const AbstractValue& b) const {
  if (leq(a, b)) return b;
  if (leq(b, a)) return a;
  return top();
}

AbstractValue FlatDomain::meet(const AbstractValue& a, const AbstractValue& b) const {
  if (leq(a, b)) return a;
  if (leq(b, a)) return b;
  return bot();
}

bool FlatDomain::contains(const AbstractValue& a, const ConcreteValue& c) const {
  if (kind_of(c) != kind_ || a.tag == AbstractValue::Tag::Bot) return false;
  if (a.tag == AbstractValue::Tag::Val) return a.cst == c;
  if (kind_ == ValueKind::Int) {
    const auto& x = std::get<ExtInt>(c);
    return x.is_finite() && x.value() >= 0;
  }
  return true;
}

std::vector<ConcreteValue> FlatDomain::gamma(const AbstractValue& a, const Universe& u) const {
  std::vector<ConcreteValue> out;
  if (a.tag == AbstractValue::Tag::Val) {
    out.push_back(a.cst);
  } else if (a.tag == AbstractValue::Tag::Top) {
    if (kind_ == ValueKind::Int) {
      for (auto i : u.indices()) out.emplace_back(ExtInt(i));
    } else {
      out = u.values(kind_);
    }
  }
  return out;
}

std::size_t FlatDomain::gamma_size_hint(const AbstractValue& a, const Universe& u) const {
  if (a.tag == AbstractValue::Tag::Val) return 1;
  if (a.tag == AbstractValue::Tag::Bot) return 0;
  if (kind_ == ValueKind::Int) return u.indices().size();
  if (kind_ == ValueKind::Bool) return 2;
  return u.strings().size();
}

namespace {
class FlatAcc final : public Accumulator {
 public:
  explicit FlatAcc(const FlatDomain& d) : d_(d), cur_(d.bot()) {}
  void add(const ConcreteValue& c) override {
    if (cur_.tag == AbstractValue::Tag::Bot) {
      cur_ = FlatDomain::make(c);
    } else if (cur_.tag == AbstractValue::Tag::Val && !(cur_.cst == c)) {
      cur_ = d_.top();
    }
  }
  bool saturated() const override { return cur_.tag == AbstractValue::Tag::Top; }
  AbstractValue result() const override { return cur_; }

 private:
  const FlatDomain& d_;
  AbstractValue cur_;
};
}  // namespace

std::unique_ptr<Accumulator> FlatDomain::accumulator() const { return std::make_unique<FlatAcc>(*this); }

std::string FlatDomain::format(const AbstractValue& a) const {
  if (a.tag == AbstractValue::Tag::Bot) return "Bot";
  if (a.tag == AbstractValue::Tag::Top) return "Top";
  return format_concrete(a.cst);
}

std::optional<AbstractValue> FlatDomain::parse(std::string_view t) const {
  t = trim_ws(t);
  if (t == "Bot" || t == "bot") return bot();
  if (t == "Top" || t == "top") return top();
  auto c = parse_concrete(t);
  if (!c || kind_of(*c) != kind_) return std::nullopt;
  return make(*c);
}

// ---------------------------------------------------------------------------
// Factories

DomainPtr make_finite_domain(const FiniteDomainSpec& spec) {
  auto index = [&](const std::string& n) -> std::uint32_t {
    for (std::uint32_t i = 0; i < spec.elements.size(); ++i)
      if (spec.elements[i] == n) return i;
    throw std::invalid_argument("domain " + spec.name + ": unknown element '" + n + "'");
  };
  std::vector<std::pair<std::uint32_t, std::uint32_t>> covers;
  for (const auto& [a, b] : spec.covers) covers.emplace_back(index(a), index(b));

  struct Rule {
    ClassifierRule r;
    std::uint32_t elem;
    std::optional<std::regex> re;
  };
  auto rules = std::make_shared<std::vector<Rule>>();
  bool has_default = false;
  for (const auto& r : spec.rules) {
    Rule x{r, index(r.element), std::nullopt};
    if (r.kind == ClassifierRule::Kind::Regex) x.re.emplace(r.pattern);
    if (r.kind == ClassifierRule::Kind::Default) has_default = true;
    rules->push_back(std::move(x));
  }
  if (!has_default) throw std::invalid_argument("domain " + spec.name + ": classifier needs a default rule");
  auto classify = [rules](const ConcreteValue& c) -> std::uint32_t {
    for (const auto& x : *rules) {
      switch (x.r.kind) {
        case ClassifierRule::Kind::Default: return x.elem;
        case ClassifierRule::Kind::Keywords:
          if (auto* s = std::get_if<std::string>(&c))
            if (std::find(x.r.words.begin(), x.r.words.end(), *s) != x.r.words.end()) return x.elem;
          break;
        case ClassifierRule::Kind::Regex:
          if (auto* s = std::get_if<std::string>(&c))
            if (std::regex_match(*s, *x.re)) return x.elem;
          break;
        case ClassifierRule::Kind::Range:
          if (auto* v = std::get_if<ExtInt>(&c))
            if (*v >= ExtInt(x.r.a) && *v <= ExtInt(x.r.b)) return x.elem;
          break;
        case ClassifierRule::Kind::Mod:
          if (auto* v = std::get_if<ExtInt>(&c))
            if (v->is_finite() && x.r.a != 0 && ((v->value() % x.r.a) + x.r.a) % x.r.a == x.r.b) return x.elem;
          break;
        case ClassifierRule::Kind::Bool:
          if (auto* b = std::get_if<bool>(&c))
            if (*b == x.r.truth) return x.elem;
          break;
      }
    }
    return 0;  // unreachable: a default rule exists
  };
  std::string ref = spec.ref.empty() ? spec.name : spec.ref;
  return std::make_shared<FiniteDomain>(spec.name, ref, spec.kind, spec.elements, covers, classify);
}

namespace {
DomainPtr make_no() {
  return std::make_shared<FiniteDomain>(
      "no", "no", ValueKind::Str, std::vector<std::string>{"Bot", "NumStr", "OtherStr", "Top"},
      std::vector<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}, {0, 2}, {1, 3}, {2, 3}},
      [](const ConcreteValue& c) -> std::uint32_t {
        return classify_numeric(std::get<std::string>(c)) == StrClass::NumStr ? 1 : 2;
      });
}

DomainPtr make_nos(std::vector<std::string> keywords) {
  return std::make_shared<FiniteDomain>(
      "nos", "nos", ValueKind::Str,
      std::vector<std::string>{"Bot", "NumStr", "SpecialStr", "OtherStr", "NotOther", "NotSpecial", "NotNum", "Top"},
      std::vector<std::pair<std::uint32_t, std::uint32_t>>{
          {0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 4}, {1, 5}, {3, 5}, {2, 6}, {3, 6}, {4, 7}, {5, 7}, {6, 7}},
      [kw = std::move(keywords)](const ConcreteValue& c) -> std::uint32_t {
        switch (classify_special(std::get<std::string>(c), kw)) {
          case StrClass::NumStr: return 1;
          case StrClass::SpecialStr: return 2;
          case StrClass::OtherStr: return 3;
        }
        return 3;
      });
}

DomainPtr make_bool() {
  return std::make_shared<FiniteDomain>(
      "bool", "bool", ValueKind::Bool, std::vector<std::string>{"BoolBot", "BoolTrue", "BoolFalse", "BoolTop"},
      std::vector<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}, {0, 2}, {1, 3}, {2, 3}},
      [](const ConcreteValue& c) -> std::uint32_t { return std::get<bool>(c) ? 1 : 2; });
}
}  // namespace

DomainPtr make_domain(std::string_view name, const UniverseConfig& cfg, const std::vector<FiniteDomainSpec>& custom) {
  if (name == "interval") return std::make_shared<IntervalDomain>(Parity::Any);
  if (name == "odd") return std::make_shared<IntervalDomain>(Parity::Odd);
  if (name == "even") return std::make_shared<IntervalDomain>(Parity::Even);
  if (name == "ssk") return std::make_shared<StringSetDomain>(cfg.ssk_k);
  if (name == "no") return make_no();
  if (name == "nos") return make_nos(cfg.keywords);
  if (name == "bool") return make_bool();
  if (name == "cs") return std::make_shared<FlatDomain>("cs", "cs", ValueKind::Str);
  if (name == "flatnum") return std::make_shared<FlatDomain>("flatnum", "pos", ValueKind::Int);
  for (const auto& s : custom)
    if (s.name == name) return make_finite_domain(s);
  throw std::invalid_argument("unknown domain '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Products

std::size_t InputTupleHash::operator()(const InputTuple& t) const {
  std::size_t h = t.size();
  for (const auto& p : t)
    for (const auto& c : p.comps) h = mix(h, AbstractValueHash{}(c));
  return h;
}

std::string format_product(const ArgSig& sig, const ProductValue& p) {
  if (sig.size() == 1) return sig[0]->format(p.comps.at(0));
  std::string out = "<";
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (i) out += ", ";
    out += sig[i]->format(p.comps.at(i));
  }
  return out + ">";
}

std::string format_input(const std::vector<ArgSig>& sigs, const InputTuple& in) {
  std::string out;
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    if (i) out += ", ";
    out += format_product(sigs[i], in.at(i));
  }
  return out;
}

std::optional<ProductValue> parse_product(const ArgSig& sig, std::string_view t) {
  t = trim_ws(t);
  ProductValue p;
  if (sig.size() == 1 && (t.empty() || t.front() != '<')) {
    auto v = sig[0]->parse(t);
    if (!v) return std::nullopt;
    p.comps.push_back(*v);
    return p;
  }
  if (t.size() < 2 || t.front() != '<' || t.back() != '>') return std::nullopt;
  auto parts = split_top_level(t.substr(1, t.size() - 2), ',');
  if (parts.size() != sig.size()) return std::nullopt;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    auto v = sig[i]->parse(parts[i]);
    if (!v) return std::nullopt;
    p.comps.push_back(*v);
  }
  return p;
}

std::optional<InputTuple> parse_input(const std::vector<ArgSig>& sigs, std::string_view t) {
  auto parts = split_top_level(trim_ws(t), ',');
  if (parts.size() != sigs.size()) return std::nullopt;
  InputTuple in;
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    auto p = parse_product(sigs[i], parts[i]);
    if (!p) return std::nullopt;
    in.push_back(std::move(*p));
  }
  return in;
}

bool is_bottom(const ArgSig& sig, const ProductValue& p) {
  for (std::size_t i = 0; i < sig.size(); ++i)
    if (sig[i]->is_bot(p.comps.at(i))) return true;
  return false;
}

std::vector<ConcreteValue> gamma_product(const ArgSig& sig, const ProductValue& p, const Universe& u) {
  if (is_bottom(sig, p)) return {};
  std::size_t driver = 0;
  std::size_t best = sig[0]->gamma_size_hint(p.comps[0], u);
  for (std::size_t i = 1; i < sig.size(); ++i) {
    std::size_t h = sig[i]->gamma_size_hint(p.comps[i], u);
    if (h < best) {
      best = h;
      driver = i;
    }
  }
  std::vector<ConcreteValue> out;
  for (auto& c : sig[driver]->gamma(p.comps[driver], u)) {
    bool ok = true;
    for (std::size_t i = 0; i < sig.size() && ok; ++i)
      if (i != driver && !sig[i]->contains(p.comps[i], c)) ok = false;
    if (ok) out.push_back(std::move(c));
  }
  return out;
}

ProductValue reduce_sigma(const ArgSig& sig, const ProductValue& p, const Universe& u) {
  auto g = gamma_product(sig, p, u);
  ProductValue r;
  r.reduced = true;
  for (const auto& d : sig) r.comps.push_back(d->alpha(g));
  return r;
}

void for_each_image(OpName op, const std::vector<std::vector<ConcreteValue>>& args,
                    const std::function<bool(const ConcreteValue&)>& fn) {
  if (args.size() == 1) {
    for (const auto& a : args[0]) {
      std::array<ConcreteValue, 1> v{a};
      auto r = apply_op(op, v);
      if (r && !fn(*r)) return;
    }
    return;
  }
  if (args.size() != 2) throw std::invalid_argument("unsupported arity");
  for (const auto& a : args[0])
    for (const auto& b : args[1]) {
      std::array<ConcreteValue, 2> v{a, b};
      auto r = apply_op(op, v);
      if (r && !fn(*r)) return;
    }
}

namespace {
AbstractValue alpha_image(OpName op, const Domain& out, const std::vector<std::vector<ConcreteValue>>& args) {
  auto acc = out.accumulator();
  for_each_image(op, args, [&](const ConcreteValue& c) {
    acc->add(c);
    return !acc->saturated();
  });
  return acc->result();
}
}  // namespace

AbstractValue ideal_transformer(OpName op, const Domain& out, const std::vector<ArgSig>& sigs, const InputTuple& in,
                                const Universe& u) {
  std::vector<std::vector<ConcreteValue>> args;
  for (std::size_t i = 0; i < sigs.size(); ++i) args.push_back(gamma_product(sigs[i], in.at(i), u));
  return alpha_image(op, out, args);
}

AbstractValue per_domain_transformer(OpName op, const Domain& out, const std::vector<ArgSig>& sigs,
                                     const InputTuple& in, std::size_t j, const Universe& u) {
  std::vector<std::vector<ConcreteValue>> args;
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    std::size_t c = sigs[i].size() == 1 ? 0 : j;
    args.push_back(sigs[i].at(c)->gamma(in.at(i).comps.at(c), u));
  }
  return alpha_image(op, out, args);
}

AbstractValue direct_component(OpName op, const std::vector<DomainPtr>& outs, std::size_t k,
                               const std::vector<ArgSig>& sigs, const InputTuple& in, const Universe& u) {
  std::size_t width = 0;
  for (const auto& s : sigs) width = std::max(width, s.size());
  if (outs.size() == width) return per_domain_transformer(op, *outs[k], sigs, in, k, u);
  AbstractValue acc = outs[k]->top();
  for (std::size_t j = 0; j < width; ++j)
    acc = outs[k]->meet(acc, per_domain_transformer(op, *outs[k], sigs, in, j, u));
  return acc;
}

}  // namespace redsynth
