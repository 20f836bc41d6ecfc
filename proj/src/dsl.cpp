#include "redsynth/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "redsynth/textutil.hpp"

namespace redsynth {

// ---------------------------------------------------------------------------
// Expressions

namespace {
struct NodeInfo {
  NodeKind kind;
  std::string_view name;
};

constexpr NodeInfo kNodes[] = {
    {NodeKind::Num, "num"},         {NodeKind::Inf, "inf"},        {NodeKind::Field, "field"},
    {NodeKind::Neg, "neg"},         {NodeKind::Add, "add"},        {NodeKind::Sub, "sub"},
    {NodeKind::Min, "min"},         {NodeKind::Max, "max"},        {NodeKind::Interval, "interval"},
    {NodeKind::If, "if"},           {NodeKind::TopBot, "topbot"},  {NodeKind::Alpha, "alpha"},
    {NodeKind::Map, "map"},         {NodeKind::Fold, "fold"},      {NodeKind::Fallback, "fallback"},
    {NodeKind::Const, "const"},     {NodeKind::Meet, "meet"},      {NodeKind::Direct, "direct"},
    {NodeKind::Hole, "hole"},
};

std::optional<NodeKind> node_by_name(std::string_view n) {
  for (const auto& i : kNodes)
    if (i.name == n && i.kind != NodeKind::Num && i.kind != NodeKind::Inf && i.kind != NodeKind::Hole) return i.kind;
  return std::nullopt;
}

bool is_int_node(NodeKind k) {
  switch (k) {
    case NodeKind::Num: case NodeKind::Inf: case NodeKind::Field: case NodeKind::Neg:
    case NodeKind::Add: case NodeKind::Sub: case NodeKind::Min: case NodeKind::Max:
      return true;
    default:
      return false;
  }
}
}  // namespace

std::string_view node_name(NodeKind k) {
  for (const auto& i : kNodes)
    if (i.kind == k) return i.name;
  return "?";
}

bool is_commutative(NodeKind k) {
  return k == NodeKind::Add || k == NodeKind::Min || k == NodeKind::Max || k == NodeKind::Meet;
}

bool Expr::operator==(const Expr& o) const {
  if (kind != o.kind || num != o.num || positive != o.positive || a != o.a || b != o.b || refs != o.refs ||
      kids.size() != o.kids.size())
    return false;
  for (std::size_t i = 0; i < kids.size(); ++i)
    if (!(*kids[i] == *o.kids[i])) return false;
  return true;
}

namespace ex {
ExprPtr num(std::int64_t v) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Num;
  e->num = v;
  return e;
}
ExprPtr inf(bool positive) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Inf;
  e->positive = positive;
  return e;
}
ExprPtr field(std::string ref, std::string side) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Field;
  e->a = std::move(ref);
  e->b = std::move(side);
  return e;
}
ExprPtr unary(NodeKind k, ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->kids = {std::move(x)};
  return e;
}
ExprPtr binary(NodeKind k, ExprPtr x, ExprPtr y) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->kids = {std::move(x), std::move(y)};
  return e;
}
ExprPtr interval(ExprPtr lo, ExprPtr hi) { return binary(NodeKind::Interval, std::move(lo), std::move(hi)); }
ExprPtr hole(std::string nt) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Hole;
  e->a = std::move(nt);
  return e;
}
}  // namespace ex

int expr_size(const Expr& e) {
  int n = e.kind == NodeKind::Hole ? 0 : 1;
  for (const auto& k : e.kids) n += expr_size(*k);
  return n;
}

int binary_depth(const Expr& e) {
  int d = 0;
  for (const auto& k : e.kids) d = std::max(d, binary_depth(*k));
  bool bin = e.kind == NodeKind::Add || e.kind == NodeKind::Sub || e.kind == NodeKind::Min || e.kind == NodeKind::Max;
  return d + (bin ? 1 : 0);
}

SExpr expr_to_sexpr(const Expr& e) {
  auto atom = [](std::string s) { return SExpr::make_atom(std::move(s)); };
  std::vector<SExpr> xs;
  switch (e.kind) {
    case NodeKind::Num: return atom(std::to_string(e.num));
    case NodeKind::Inf: return atom(e.positive ? "+inf" : "-inf");
    case NodeKind::Hole: return atom(e.a);
    case NodeKind::Field: return SExpr::make_list({atom("field"), atom(e.a), atom(e.b)});
    case NodeKind::Direct: return SExpr::make_list({atom("direct")});
    case NodeKind::Fallback: return SExpr::make_list({atom("fallback"), atom(e.a)});
    case NodeKind::Const: return SExpr::make_list({atom("const"), atom(e.a), atom(e.b)});
    case NodeKind::TopBot:
    case NodeKind::Map:
    case NodeKind::Fold:
      xs.push_back(atom(std::string(node_name(e.kind))));
      if (e.kind != NodeKind::TopBot) xs.push_back(atom(e.a));
      for (const auto& r : e.refs) xs.push_back(atom(r));
      return SExpr::make_list(std::move(xs));
    case NodeKind::Alpha:
      return SExpr::make_list({atom("alpha"), atom(e.a), expr_to_sexpr(*e.kids.at(0))});
    default:
      xs.push_back(atom(std::string(node_name(e.kind))));
      for (const auto& k : e.kids) xs.push_back(expr_to_sexpr(*k));
      return SExpr::make_list(std::move(xs));
  }
}

std::string print_expr(const Expr& e) { return print_sexpr(expr_to_sexpr(e)); }

namespace {

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

const std::string& atom_of(const SExpr& s, std::string_view what) {
  if (s.is_list) throw DslError("expected " + std::string(what) + ", got " + print_sexpr(s));
  return s.atom;
}

ExprPtr from_sexpr(const SExpr& s, const std::vector<std::string>& nts) {
  if (!s.is_list) {
    if (s.quoted) throw DslError("unexpected string literal \"" + s.atom + "\" in expression position");
    const std::string& t = s.atom;
    if (std::find(nts.begin(), nts.end(), t) != nts.end()) return ex::hole(t);
    if (t == "+inf" || t == "inf") return ex::inf(true);
    if (t == "-inf") return ex::inf(false);
    if (auto v = parse_int(t)) return ex::num(*v);
    auto dot = t.find('.');
    if (dot != std::string::npos && dot > 0 && (t.substr(dot + 1) == "l" || t.substr(dot + 1) == "r"))
      return ex::field(t.substr(0, dot), t.substr(dot + 1));
    throw DslError("unknown symbol '" + t + "'");
  }
  if (s.items.empty()) throw DslError("empty list in expression");
  const std::string& head = atom_of(s.at(0), "an operator name");
  auto kind = node_by_name(head);
  if (!kind) throw DslError("unknown operator '" + head + "'");
  auto e = std::make_shared<Expr>();
  e->kind = *kind;
  auto need = [&](std::size_t n) {
    if (s.size() != n + 1)
      throw DslError("'" + head + "' expects " + std::to_string(n) + " operand(s): " + print_sexpr(s));
  };
  switch (*kind) {
    case NodeKind::Field:
      need(2);
      e->a = atom_of(s.at(1), "a component reference");
      e->b = atom_of(s.at(2), "l or r");
      if (e->b != "l" && e->b != "r") throw DslError("field side must be l or r: " + print_sexpr(s));
      break;
    case NodeKind::Neg:
      need(1);
      e->kids = {from_sexpr(s.at(1), nts)};
      break;
    case NodeKind::Add: case NodeKind::Sub: case NodeKind::Min: case NodeKind::Max:
    case NodeKind::Interval: case NodeKind::Meet:
      need(2);
      e->kids = {from_sexpr(s.at(1), nts), from_sexpr(s.at(2), nts)};
      break;
    case NodeKind::If:
      need(3);
      e->kids = {from_sexpr(s.at(1), nts), from_sexpr(s.at(2), nts), from_sexpr(s.at(3), nts)};
      break;
    case NodeKind::TopBot:
      if (s.size() < 2) throw DslError("topbot needs at least one reference");
      for (std::size_t i = 1; i < s.size(); ++i) e->refs.push_back(atom_of(s.at(i), "a component reference"));
      break;
    case NodeKind::Map: case NodeKind::Fold:
      if (s.size() < 3) throw DslError("'" + head + "' needs an operation and at least one source");
      e->a = atom_of(s.at(1), "an operation name");
      if (!ConcreteOp::parse(e->a)) throw DslError("unknown operation '" + e->a + "'");
      for (std::size_t i = 2; i < s.size(); ++i) e->refs.push_back(atom_of(s.at(i), "a component reference"));
      break;
    case NodeKind::Alpha:
      need(2);
      e->a = atom_of(s.at(1), "a domain name");
      e->kids = {from_sexpr(s.at(2), nts)};
      break;
    case NodeKind::Fallback:
      need(1);
      e->a = atom_of(s.at(1), "a domain name");
      break;
    case NodeKind::Const:
      need(2);
      e->a = atom_of(s.at(1), "a domain name");
      e->b = atom_of(s.at(2), "an element name");
      break;
    case NodeKind::Direct:
      need(0);
      break;
    default:
      throw DslError("unsupported operator '" + head + "'");
  }
  return e;
}

}  // namespace

ExprPtr expr_from_sexpr(const SExpr& s, const std::vector<std::string>& nonterminals) {
  return from_sexpr(s, nonterminals);
}

ExprPtr parse_expr(std::string_view text, const std::vector<std::string>& nonterminals) {
  try {
    return from_sexpr(parse_sexpr(text), nonterminals);
  } catch (const SExprError& err) {
    throw DslError(err.what());
  }
}

std::string render_pseudo(const Expr& e, int indent) {
  std::string pad(static_cast<std::size_t>(indent), ' ');
  auto r = [&](const ExprPtr& k) { return render_pseudo(*k, 0); };
  switch (e.kind) {
    case NodeKind::Num: return std::to_string(e.num);
    case NodeKind::Inf: return e.positive ? "+inf" : "-inf";
    case NodeKind::Hole: return e.a;
    case NodeKind::Field: return e.a + "." + e.b;
    case NodeKind::Neg: return "-" + r(e.kids[0]);
    case NodeKind::Add: return "(" + r(e.kids[0]) + " + " + r(e.kids[1]) + ")";
    case NodeKind::Sub: return "(" + r(e.kids[0]) + " - " + r(e.kids[1]) + ")";
    case NodeKind::Min: return "min(" + r(e.kids[0]) + ", " + r(e.kids[1]) + ")";
    case NodeKind::Max: return "max(" + r(e.kids[0]) + ", " + r(e.kids[1]) + ")";
    case NodeKind::Interval: return pad + "[" + r(e.kids[0]) + ", " + r(e.kids[1]) + "]";
    case NodeKind::TopBot: {
      std::string out;
      for (std::size_t i = 0; i < e.refs.size(); ++i) out += (i ? " || " : "") + e.refs[i] + " in {top, bot}";
      return out;
    }
    case NodeKind::Map: case NodeKind::Fold: {
      std::string out = e.kind == NodeKind::Fold ? "fold{" : "{";
      out += e.a + "(";
      for (std::size_t i = 0; i < e.refs.size(); ++i) out += (i ? ", x" : "x") + std::to_string(i + 1);
      out += ") | ";
      for (std::size_t i = 0; i < e.refs.size(); ++i)
        out += (i ? ", x" : "x") + std::to_string(i + 1) + " <- " + e.refs[i];
      return out + "}";
    }
    case NodeKind::Alpha: return "alpha_" + e.a + r(e.kids[0]);
    case NodeKind::Fallback: return e.a + "-transformer(args)";
    case NodeKind::Const: return e.a + "." + e.b;
    case NodeKind::Meet: return r(e.kids[0]) + " meet " + r(e.kids[1]);
    case NodeKind::Direct: return "direct(args)";
    case NodeKind::If:
      return pad + "if (" + r(e.kids[0]) + ")\n" + pad + "  return " + r(e.kids[1]) + "\n" + pad + "else\n" + pad +
             "  return " + r(e.kids[2]);
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Grammars

const std::vector<ExprPtr>& Grammar::alternatives(const std::string& nt) const {
  auto it = productions.find(nt);
  if (it == productions.end()) throw DslError("unknown nonterminal '" + nt + "'");
  return it->second;
}

bool Grammar::is_nonterminal(std::string_view s) const {
  return std::find(nonterminals.begin(), nonterminals.end(), s) != nonterminals.end();
}

namespace {

void collect_holes(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == NodeKind::Hole) out.push_back(e.a);
  for (const auto& k : e.kids) collect_holes(*k, out);
}

// Splits "a | (b c) | d" on top-level bars.
std::vector<std::string> split_alternatives(std::string_view rhs) {
  std::vector<std::string> out;
  for (auto part : split_top_level(rhs, '|')) {
    auto t = trim_ws(part);
    if (t.empty()) throw DslError("empty alternative in grammar rule");
    out.emplace_back(t);
  }
  return out;
}

}  // namespace

Grammar parse_grammar(std::string_view text) {
  // First pass: collect rules (lhs, rhs text) with continuation lines.
  std::vector<std::pair<std::string, std::string>> rules;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto t = trim_ws(line);
    if (t.empty()) continue;
    if (t.front() == '|') {
      if (rules.empty()) throw DslError("grammar continuation line before any rule");
      rules.back().second += " " + std::string(t);
      continue;
    }
    auto def = t.find("::=");
    if (def == std::string_view::npos) throw DslError("grammar line lacks '::=': " + std::string(t));
    std::string lhs(trim_ws(t.substr(0, def)));
    if (lhs.empty() || lhs.find_first_of(" ()|") != std::string::npos)
      throw DslError("bad nonterminal name '" + lhs + "'");
    std::string rhs(trim_ws(t.substr(def + 3)));
    bool merged = false;
    for (auto& r : rules)
      if (r.first == lhs) {
        r.second += " | " + rhs;
        merged = true;
      }
    if (!merged) rules.emplace_back(lhs, rhs);
  }
  if (rules.empty()) throw DslError("grammar is empty");

  Grammar g;
  g.start = rules.front().first;
  for (const auto& r : rules) g.nonterminals.push_back(r.first);
  for (const auto& [lhs, rhs] : rules) {
    auto& alts = g.productions[lhs];
    for (const auto& alt : split_alternatives(rhs)) alts.push_back(parse_expr(alt, g.nonterminals));
  }

  // Reachability from the start symbol.
  std::set<std::string> seen{g.start};
  std::vector<std::string> work{g.start};
  while (!work.empty()) {
    auto nt = work.back();
    work.pop_back();
    for (const auto& alt : g.productions[nt]) {
      std::vector<std::string> hs;
      collect_holes(*alt, hs);
      for (const auto& h : hs)
        if (seen.insert(h).second) work.push_back(h);
    }
  }
  for (const auto& nt : g.nonterminals)
    if (!seen.count(nt)) throw DslError("nonterminal '" + nt + "' is unreachable from '" + g.start + "'");
  return g;
}

std::string print_grammar(const Grammar& g) {
  std::string out;
  for (const auto& nt : g.nonterminals) {
    out += nt + " ::= ";
    const auto& alts = g.productions.at(nt);
    for (std::size_t i = 0; i < alts.size(); ++i) out += (i ? " | " : "") + print_expr(*alts[i]);
    out += "\n";
  }
  return out;
}

namespace {

class Enumerator {
 public:
  explicit Enumerator(const Grammar& g) : g_(g) {
    for (const auto& nt : g.nonterminals)
      for (const auto& alt : g.productions.at(nt)) {
        std::vector<std::string> hs;
        collect_holes(*alt, hs);
        bool rec = false;
        for (const auto& h : hs)
          if (reaches(h, nt)) rec = true;
        recursive_[alt.get()] = rec;
      }
  }

  // Expressions of exactly `size` nodes from `nt` with recursion budget d.
  const std::vector<ExprPtr>& exact(const std::string& nt, int d, int size) {
    auto key = nt + "#" + std::to_string(d) + "#" + std::to_string(size);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<ExprPtr> out;
    std::set<std::string> seen;
    for (const auto& alt : g_.productions.at(nt)) {
      std::vector<std::string> hs;
      collect_holes(*alt, hs);
      int base = expr_size(*alt);
      if (hs.empty()) {
        if (base == size && seen.insert(print_expr(*alt)).second) out.push_back(alt);
        continue;
      }
      bool rec = recursive_.at(alt.get());
      if (rec && d == 0) continue;
      int cd = rec ? d - 1 : d;
      int rest = size - base;
      if (rest < static_cast<int>(hs.size())) continue;
      std::vector<ExprPtr> chosen;
      fill(*alt, hs, cd, 0, rest, chosen, out, seen);
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  bool reaches(const std::string& from, const std::string& to) {
    std::set<std::string> seen{from};
    std::vector<std::string> work{from};
    while (!work.empty()) {
      auto nt = work.back();
      work.pop_back();
      if (nt == to) return true;
      for (const auto& alt : g_.productions.at(nt)) {
        std::vector<std::string> hs;
        collect_holes(*alt, hs);
        for (const auto& h : hs)
          if (seen.insert(h).second) work.push_back(h);
      }
    }
    return false;
  }

  void fill(const Expr& tmpl, const std::vector<std::string>& hs, int d, std::size_t i, int rest,
            std::vector<ExprPtr>& chosen, std::vector<ExprPtr>& out, std::set<std::string>& seen) {
    if (i == hs.size()) {
      if (rest != 0) return;
      std::size_t pos = 0;
      bool ok = true;
      ExprPtr e = instantiate(tmpl, chosen, pos, ok);
      if (ok && seen.insert(print_expr(*e)).second) out.push_back(e);
      return;
    }
    int remaining_holes = static_cast<int>(hs.size() - i - 1);
    for (int s = 1; s <= rest - remaining_holes; ++s) {
      if (i + 1 == hs.size() && s != rest) continue;
      for (const auto& c : exact(hs[i], d, s)) {
        chosen.push_back(c);
        fill(tmpl, hs, d, i + 1, rest - s, chosen, out, seen);
        chosen.pop_back();
      }
    }
  }

  // Rebuilds the template with holes replaced in depth-first order; rejects
  // non-canonical operand orders of commutative nodes over one nonterminal.
  ExprPtr instantiate(const Expr& t, const std::vector<ExprPtr>& chosen, std::size_t& pos, bool& ok) {
    if (t.kind == NodeKind::Hole) return chosen.at(pos++);
    if (t.kids.empty()) return std::make_shared<Expr>(t);
    auto e = std::make_shared<Expr>(t);
    e->kids.clear();
    for (const auto& k : t.kids) e->kids.push_back(instantiate(*k, chosen, pos, ok));
    if (is_commutative(t.kind) && t.kids.size() == 2 && t.kids[0]->kind == NodeKind::Hole &&
        t.kids[1]->kind == NodeKind::Hole && t.kids[0]->a == t.kids[1]->a) {
      if (print_expr(*e->kids[1]) < print_expr(*e->kids[0])) ok = false;
    }
    return e;
  }

  const Grammar& g_;
  std::map<const Expr*, bool> recursive_;
  std::map<std::string, std::vector<ExprPtr>> memo_;
};

}  // namespace

std::vector<ExprPtr> enumerate_from(const Grammar& g, const std::string& nt, int max_size, int depth) {
  if (max_size < 1) throw DslError("max_size must be >= 1");
  Enumerator en(g);
  std::vector<ExprPtr> out;
  for (int s = 1; s <= max_size; ++s) {
    const auto& xs = en.exact(nt, depth, s);
    out.insert(out.end(), xs.begin(), xs.end());
  }
  return out;
}

std::vector<ExprPtr> enumerate_exprs(const Grammar& g, int max_size, int depth) {
  return enumerate_from(g, g.start, max_size, depth);
}

// ---------------------------------------------------------------------------
// Schema

OpSchema OpSchema::make(OpName op, std::vector<ArgSig> sigs, std::vector<DomainPtr> outs) {
  OpSchema s;
  s.op = op;
  s.sigs = std::move(sigs);
  s.outs = std::move(outs);
  bool binary = s.sigs.size() > 1;
  for (std::size_t i = 0; i < s.sigs.size(); ++i)
    for (std::size_t j = 0; j < s.sigs[i].size(); ++j) {
      std::string name = s.sigs[i][j]->ref();
      if (binary && s.sigs[i].size() > 1) name += std::to_string(i + 1);
      if (s.refs.count(name)) throw DslError("ambiguous component reference '" + name + "'");
      s.refs[name] = Slot{i, j};
    }
  return s;
}

std::optional<OpSchema::Slot> OpSchema::find(std::string_view ref) const {
  auto it = refs.find(ref);
  if (it == refs.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> OpSchema::component_of(std::string_view dom) const {
  for (const auto& sig : sigs) {
    if (sig.size() < width()) continue;
    for (std::size_t j = 0; j < sig.size(); ++j)
      if (sig[j]->ref() == dom || sig[j]->name() == dom) return j;
  }
  return std::nullopt;
}

std::size_t OpSchema::width() const {
  std::size_t w = 0;
  for (const auto& s : sigs) w = std::max(w, s.size());
  return w;
}

void validate_expr(const Expr& e, const OpSchema& s, std::size_t k) {
  const Domain& out = *s.outs.at(k);
  auto check_ref = [&](const std::string& r) {
    if (!s.find(r)) throw DslError("unknown component reference '" + r + "'");
  };
  auto is_out = [&](const std::string& d) { return d == out.ref() || d == out.name(); };
  switch (e.kind) {
    case NodeKind::Hole: throw DslError("unexpanded nonterminal '" + e.a + "'");
    case NodeKind::Field: {
      check_ref(e.a);
      auto slot = *s.find(e.a);
      if (s.sigs[slot.arg][slot.comp]->family() != Domain::Family::Interval)
        throw DslError("'" + e.a + "' is not an interval component");
      break;
    }
    case NodeKind::Interval:
      if (out.family() != Domain::Family::Interval) throw DslError("interval built for non-interval output " + out.name());
      break;
    case NodeKind::TopBot: case NodeKind::Map: case NodeKind::Fold:
      for (const auto& r : e.refs) check_ref(r);
      if (e.kind == NodeKind::Fold && out.kind() != ValueKind::Bool)
        throw DslError("fold requires a boolean output domain");
      break;
    case NodeKind::Alpha:
      if (!is_out(e.a)) throw DslError("alpha targets '" + e.a + "' but the output domain is " + out.name());
      break;
    case NodeKind::Const:
      if (!is_out(e.a)) throw DslError("constant of '" + e.a + "' used for output domain " + out.name());
      if (!out.parse(e.b)) throw DslError("unknown element '" + e.b + "' of domain " + out.name());
      break;
    case NodeKind::Fallback:
      if (!s.component_of(e.a)) throw DslError("no input component of domain '" + e.a + "'");
      break;
    default:
      break;
  }
  for (const auto& c : e.kids) validate_expr(*c, s, k);
}

// ---------------------------------------------------------------------------
// Evaluation

AbstractValue EvalContext::fallback_value(std::size_t j) const {
  if (fallback) return fallback(j);
  return per_domain_transformer(schema->op, out(), schema->sigs, *input, j, *universe);
}

AbstractValue EvalContext::direct_value() const {
  if (direct) return direct();
  return direct_component(schema->op, schema->outs, k, schema->sigs, *input, *universe);
}

namespace {

const AbstractValue& comp_value(const EvalContext& ctx, std::string_view ref, const Domain** dom) {
  auto slot = ctx.schema->find(ref);
  if (!slot) throw DslError("unbound reference '" + std::string(ref) + "'");
  *dom = ctx.schema->sigs[slot->arg][slot->comp].get();
  return (*ctx.input)[slot->arg].comps.at(slot->comp);
}

// Concrete members of a finite source, or nullopt when it is top.
std::optional<std::vector<ConcreteValue>> source_members(const Domain& d, const AbstractValue& v) {
  if (d.is_top(v)) return std::nullopt;
  std::vector<ConcreteValue> out;
  if (d.is_bot(v)) return out;
  switch (d.family()) {
    case Domain::Family::StringSet:
      for (const auto& s : v.strs) out.emplace_back(s);
      return out;
    case Domain::Family::Flat:
      out.push_back(v.cst);
      return out;
    default:
      throw DslError("domain " + d.name() + " cannot be a pointwise source");
  }
}

Val map_values(const Expr& e, const EvalContext& ctx) {
  auto op = ConcreteOp::parse(e.a)->name;
  std::vector<std::vector<ConcreteValue>> args;
  for (const auto& r : e.refs) {
    const Domain* d = nullptr;
    const auto& v = comp_value(ctx, r, &d);
    auto m = source_members(*d, v);
    if (!m) {
      Val t;
      t.k = Val::K::SetTop;
      return t;
    }
    args.push_back(std::move(*m));
  }
  std::vector<ConcreteValue> out;
  for_each_image(op, args, [&](const ConcreteValue& c) {
    out.push_back(c);
    return true;
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  Val v;
  v.k = Val::K::Set;
  v.set = std::make_shared<const std::vector<ConcreteValue>>(std::move(out));
  return v;
}

Val alpha_of(const Val& s, const EvalContext& ctx) {
  if (s.k == Val::K::SetTop) return Val::of_abs(ctx.out().top());
  if (s.k != Val::K::Set) return Val::invalid();
  return Val::of_abs(ctx.out().alpha(*s.set));
}

Val int_binary(NodeKind k, const Val& x, const Val& y) {
  if (x.k == Val::K::Invalid || y.k == Val::K::Invalid) return Val::invalid();
  if (x.k == Val::K::Indet || y.k == Val::K::Indet) return Val::indet();
  switch (k) {
    case NodeKind::Add: {
      auto r = ext_add(x.i, y.i);
      return r ? Val::of_int(*r) : Val::indet();
    }
    case NodeKind::Sub: {
      auto r = ext_sub(x.i, y.i);
      return r ? Val::of_int(*r) : Val::indet();
    }
    case NodeKind::Min: return Val::of_int(ext_min(x.i, y.i));
    case NodeKind::Max: return Val::of_int(ext_max(x.i, y.i));
    default: return Val::invalid();
  }
}

}  // namespace

Val apply_node(const Expr& e, std::span<const Val> kids, const EvalContext& ctx) {
  switch (e.kind) {
    case NodeKind::Num: return Val::of_int(ExtInt(e.num));
    case NodeKind::Inf: return Val::of_int(e.positive ? ExtInt::pos_inf() : ExtInt::neg_inf());
    case NodeKind::Field: {
      const Domain* d = nullptr;
      const auto& v = comp_value(ctx, e.a, &d);
      if (d->is_bot(v)) return Val::indet();
      return Val::of_int(e.b == "l" ? v.lo : v.hi);
    }
    case NodeKind::Neg:
      if (kids[0].k != Val::K::Int) return kids[0];
      return Val::of_int(-kids[0].i);
    case NodeKind::Add: case NodeKind::Sub: case NodeKind::Min: case NodeKind::Max:
      return int_binary(e.kind, kids[0], kids[1]);
    case NodeKind::Interval: {
      auto limit = [](const Val& v, ExtInt indet) -> std::optional<ExtInt> {
        if (v.k == Val::K::Int) return v.i;
        if (v.k == Val::K::Indet) return indet;
        return std::nullopt;
      };
      auto lo = limit(kids[0], ExtInt::neg_inf());
      auto hi = limit(kids[1], ExtInt::pos_inf());
      if (!lo || !hi) return Val::invalid();
      auto iv = IntervalDomain::make(*lo, *hi);
      if (!ctx.out().valid(iv)) return Val::invalid();
      // Parity is judged on the limits even when they cross.
      if (iv.tag == AbstractValue::Tag::Bot) {
        auto probe = IntervalDomain::make(*lo, *lo);
        auto probe2 = IntervalDomain::make(*hi, *hi);
        if (!ctx.out().valid(probe) || !ctx.out().valid(probe2)) return Val::invalid();
      }
      return Val::of_abs(iv);
    }
    case NodeKind::If: {
      if (kids[0].k != Val::K::Bool) return Val::invalid();
      return kids[0].b ? kids[1] : kids[2];
    }
    case NodeKind::TopBot: {
      for (const auto& r : e.refs) {
        const Domain* d = nullptr;
        const auto& v = comp_value(ctx, r, &d);
        if (d->is_top(v) || d->is_bot(v)) return Val::of_bool(true);
      }
      return Val::of_bool(false);
    }
    case NodeKind::Map: return map_values(e, ctx);
    case NodeKind::Alpha: return alpha_of(kids[0], ctx);
    case NodeKind::Fold: return alpha_of(map_values(e, ctx), ctx);
    case NodeKind::Fallback: {
      auto j = ctx.schema->component_of(e.a);
      if (!j) throw DslError("no input component of domain '" + e.a + "'");
      return Val::of_abs(ctx.fallback_value(*j));
    }
    case NodeKind::Const: {
      auto v = ctx.out().parse(e.b);
      if (!v) throw DslError("unknown element '" + e.b + "'");
      return Val::of_abs(*v);
    }
    case NodeKind::Meet:
      if (kids[0].k != Val::K::Abs || kids[1].k != Val::K::Abs) return Val::invalid();
      return Val::of_abs(ctx.out().meet(kids[0].a, kids[1].a));
    case NodeKind::Direct: return Val::of_abs(ctx.direct_value());
    case NodeKind::Hole: throw DslError("cannot evaluate nonterminal '" + e.a + "'");
  }
  return Val::invalid();
}

Val eval_node(const Expr& e, const EvalContext& ctx) {
  if (ctx.memo) {
    if (auto it = ctx.memo->find(&e); it != ctx.memo->end()) return it->second;
  }
  std::vector<Val> kids;
  kids.reserve(e.kids.size());
  for (const auto& k : e.kids) kids.push_back(eval_node(*k, ctx));
  Val v = apply_node(e, kids, ctx);
  if (ctx.memo) ctx.memo->emplace(&e, v);
  return v;
}

std::optional<AbstractValue> finish_value(const Val& v, const EvalContext& ctx) {
  if (v.k != Val::K::Abs) return std::nullopt;
  if (!ctx.out().valid(v.a)) return std::nullopt;
  return v.a;
}

std::optional<AbstractValue> eval_component(const Expr& e, const EvalContext& ctx) {
  for (std::size_t i = 0; i < ctx.schema->sigs.size(); ++i)
    if (is_bottom(ctx.schema->sigs[i], (*ctx.input)[i])) return ctx.out().bot();
  if (is_int_node(e.kind)) return std::nullopt;
  return finish_value(eval_node(e, ctx), ctx);
}

}  // namespace redsynth
