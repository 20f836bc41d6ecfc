// End-to-end acceptance run: synthesizes every bundled problem and prints one
// PASS/FAIL line per acceptance criterion. Exits non-zero when any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "redsynth/artifact.hpp"
#include "redsynth/config.hpp"
#include "redsynth/engine.hpp"

using namespace redsynth;

namespace {

std::string config_path(const std::string& name) { return std::string(REDSYNTH_CONFIG_DIR) + "/" + name + ".conf"; }

// Collects the reasons a criterion failed.
struct Verdict {
  std::vector<std::string> problems;
  void require(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
  bool ok() const { return problems.empty(); }
};

struct Synthesized {
  std::unique_ptr<Problem> pb;
  EngineReport rep;
  std::string log;
};

std::map<std::string, Synthesized> g_runs;
bool g_invariant_violation = false;
std::string g_invariant_message;

Synthesized& synthesized(const std::string& name) {
  auto it = g_runs.find(name);
  if (it != g_runs.end()) return it->second;
  ProblemSpec spec = load_config(config_path(name));
  spec.engine.check_invariants = true;
  Synthesized s;
  s.pb = std::make_unique<Problem>(spec);
  std::ostringstream log;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    s.rep = Engine(*s.pb, &log).run();
  } catch (const InvariantViolation& e) {
    g_invariant_violation = true;
    g_invariant_message = name + ": " + e.what();
    s.rep.status = EngineStatus::Fail;
    s.rep.message = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::fprintf(stderr, "  synthesized %-24s %-8s %6.1fs\n", name.c_str(),
               std::string(status_name(s.rep.status)).c_str(), secs);
  s.log = log.str();
  return g_runs.emplace(name, std::move(s)).first->second;
}

std::vector<ExprPtr> goldens(const Problem& pb) {
  std::vector<ExprPtr> t;
  for (std::size_t k = 0; k < pb.width(); ++k) t.push_back(pb.golden(k));
  return t;
}

std::vector<ExprPtr> direct_tuple(const Problem& pb) {
  return std::vector<ExprPtr>(pb.width(), parse_expr("(direct)"));
}

std::string format_outputs(const Problem& pb, const std::vector<std::optional<AbstractValue>>& v) {
  std::string out = pb.width() > 1 ? "<" : "";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ", ";
    out += v[k] ? pb.out(k).format(*v[k]) : "invalid";
  }
  return out + (pb.width() > 1 ? ">" : "");
}

std::string format_outputs(const Problem& pb, const std::vector<AbstractValue>& v) {
  std::vector<std::optional<AbstractValue>> o(v.begin(), v.end());
  return format_outputs(pb, o);
}

// Synthesized tuple applied to an input given as text (reduced first).
std::string reduced_at(const std::string& name, const std::string& input) {
  auto& s = synthesized(name);
  auto in = s.pb->parse_point(input);
  if (!in || s.rep.status != EngineStatus::Ok) return "n/a";
  return format_outputs(*s.pb, s.pb->apply_tuple(s.rep.tuple, *in));
}

std::string direct_at(const std::string& name, const std::string& input) {
  auto& s = synthesized(name);
  auto in = s.pb->parse_point(input);
  if (!in) return "n/a";
  return format_outputs(*s.pb, s.pb->apply_direct(*in));
}

void expect_value(Verdict& v, const std::string& what, const std::string& got, const std::string& want) {
  v.require(got == want, what + " = " + got + ", expected " + want);
}

// --- criteria ---------------------------------------------------------------

Verdict integer_goldens() {
  Verdict v;
  for (const char* name : {"odd_even_inc", "odd_even_add", "odd_even_sub", "odd_even_abs"}) {
    auto& s = synthesized(name);
    if (s.rep.status != EngineStatus::Ok) {
      v.require(false, std::string(name) + ": engine " + std::string(status_name(s.rep.status)));
      continue;
    }
    Budget b = s.pb->spec().budget;
    b.grid_bound = 16;
    auto diff = compare_on_grid(*s.pb, s.rep.tuple, goldens(*s.pb), b);
    v.require(!diff, std::string(name) + ": differs from the golden at " + diff.value_or(""));
  }
  return v;
}

Verdict inc_values() {
  Verdict v;
  const std::string inc = "odd_even_inc";
  expect_value(v, "reduced inc <[5,5],[4,6]>", reduced_at(inc, "<[5,5], [4,6]>"), "<[5,7], [6,6]>");
  expect_value(v, "direct inc <[5,5],[4,6]>", direct_at(inc, "<[5,5], [4,6]>"), "<[5,7], [4,8]>");

  auto& s = synthesized(inc);
  const Problem& pb = *s.pb;
  const auto& sig = pb.schema().sigs[0];
  auto sigma = pb.parse_point("<[3,9], [-2,6]>");
  v.require(sigma && format_product(sig, (*sigma)[0]) == "<[3,7], [2,6]>", "sigma(<[3,9],[-2,6]>) != <[3,7], [2,6]>");

  // Three increments, reduced and direct.
  auto start = pb.parse_point("<[1,5], [2,6]>");
  if (!start || s.rep.status != EngineStatus::Ok) {
    v.require(false, "no synthesized inc to chain");
    return v;
  }
  InputTuple red = *start;
  for (int i = 0; i < 3; ++i) {
    auto out = pb.apply_tuple(s.rep.tuple, red);
    ProductValue next;
    for (auto& o : out) next.comps.push_back(o.value_or(pb.out(0).top()));
    red = pb.reduce({next});
  }
  expect_value(v, "three reduced incs", format_product(sig, red[0]), "<[5,9], [4,8]>");
  OutputGamma og(pb);
  auto g = og.gamma({red[0].comps[0], red[0].comps[1]});
  std::vector<ConcreteValue> want;
  for (int x = 5; x <= 8; ++x) want.emplace_back(ExtInt(x));
  v.require(g && *g == want, "gamma of the reduced chain is not {5..8}");

  InputTuple dir = *start;
  for (int i = 0; i < 3; ++i) dir[0].comps = pb.apply_direct(dir);
  expect_value(v, "three direct incs", format_product(sig, dir[0]), "<[1,11], [2,12]>");
  return v;
}

Verdict string_goldens() {
  Verdict v;
  for (const char* family : {"safe", "jsai"})
    for (const char* op : {"concat", "trim", "tolower", "toupper", "contains", "charat"}) {
      const std::string name = std::string(family) + "_" + op;
      auto& s = synthesized(name);
      if (s.rep.status != EngineStatus::Ok) {
        v.require(false, name + ": engine " + std::string(status_name(s.rep.status)));
        continue;
      }
      auto rep = validate_final(*s.pb, s.rep.tuple);
      v.require(rep.golden_gamma_equal.value_or(false), name + ": not gamma-equal to the golden");
      for (const auto& c : rep.components)
        v.require(c.matches_golden.value_or(false), name + ": component " + c.name + " differs from its golden");
    }

  // SAFE values.
  expect_value(v, "safe trim", reduced_at("safe_trim", "<{\" 123  \"}, OtherStr>"), "<{\"123\"}, NumStr>");
  expect_value(v, "direct safe trim", direct_at("safe_trim", "<{\" 123  \"}, OtherStr>"), "<{\"123\"}, Top>");
  expect_value(v, "safe toLower", reduced_at("safe_tolower", "<{\"123\"}, Top>"), "<{\"123\"}, NumStr>");
  expect_value(v, "direct safe toLower", direct_at("safe_tolower", "<{\"123\"}, Top>"), "<{\"123\"}, Top>");
  expect_value(v, "safe toUpper", reduced_at("safe_toupper", "<{\"NaN\"}, Top>"), "<{\"NAN\"}, OtherStr>");
  expect_value(v, "direct safe toUpper", direct_at("safe_toupper", "<{\"NaN\"}, Top>"), "<{\"NAN\"}, Top>");
  expect_value(v, "safe charAt", reduced_at("safe_charat", "<{\"a12\"}, OtherStr>, 1"), "<{\"1\"}, NumStr>");
  expect_value(v, "direct safe charAt", direct_at("safe_charat", "<{\"a12\"}, OtherStr>, 1"), "<{\"1\"}, Top>");

  // JSAI values: same inputs, constant strings and the special-aware lattice.
  expect_value(v, "jsai trim", reduced_at("jsai_trim", "<\" 1  \", OtherStr>"), "<\"1\", NumStr>");
  expect_value(v, "jsai toLower", reduced_at("jsai_tolower", "<\"11\", Top>"), "<\"11\", NumStr>");
  expect_value(v, "jsai toUpper", reduced_at("jsai_toupper", "<\"NaN\", Top>"), "<\"NAN\", OtherStr>");
  expect_value(v, "jsai charAt", reduced_at("jsai_charat", "<\"a1\", OtherStr>, 1"), "<\"1\", NumStr>");
  // The lattice component (second) of the direct output is strictly coarser.
  for (const auto& [name, input] : std::vector<std::pair<std::string, std::string>>{
           {"jsai_trim", "<\" 1  \", OtherStr>"},
           {"jsai_tolower", "<\"11\", Top>"},
           {"jsai_toupper", "<\"NaN\", Top>"},
           {"jsai_charat", "<\"a1\", OtherStr>, 1"}}) {
    auto& s = synthesized(name);
    auto in = s.pb->parse_point(input);
    if (!in || s.rep.status != EngineStatus::Ok) continue;
    auto red = s.pb->apply_tuple(s.rep.tuple, *in);
    auto dir = s.pb->apply_direct(*in);
    const Domain& d = s.pb->out(1);
    v.require(red[1] && d.leq(*red[1], dir[1]) && *red[1] != dir[1],
              name + ": reduction does not improve " + d.format(dir[1]));
  }
  return v;
}

Verdict validation() {
  Verdict v;
  std::vector<std::string> all{"odd_even_inc", "odd_even_add", "odd_even_sub", "odd_even_abs",
                               "odd_even_inc_bootstrap"};
  for (const char* family : {"safe", "jsai"})
    for (const char* op : {"concat", "trim", "tolower", "toupper", "contains", "charat"})
      all.push_back(std::string(family) + "_" + op);
  for (const auto& name : all) {
    auto& s = synthesized(name);
    if (s.rep.status != EngineStatus::Ok) {
      v.require(false, name + ": engine " + std::string(status_name(s.rep.status)));
      continue;
    }
    v.require(s.rep.invariant_checks > 0, name + ": invariant checks never ran");
    auto rep = validate_final(*s.pb, s.rep.tuple);
    v.require(rep.all_sound(), name + ": final validation finds it unsound");
    v.require(rep.all_precise(), name + ": final validation finds it not 1-precise");
  }
  v.require(!g_invariant_violation, "invariant violation: " + g_invariant_message);

  for (const char* name : {"odd_even_inc", "safe_trim", "safe_tolower", "safe_toupper", "safe_charat"}) {
    Problem pb(load_config(config_path(name)));
    auto rep = validate_final(pb, direct_tuple(pb));
    v.require(rep.all_sound(), std::string(name) + ": direct baseline unsound");
    bool witnessed = false;
    for (std::size_t k = 0; k < rep.components.size(); ++k) {
      const auto& c = rep.components[k];
      if (!c.precise && c.better && check_soundness(pb, k, *c.better->h).sound) witnessed = true;
    }
    v.require(!rep.all_precise() && witnessed, std::string(name) + ": direct baseline has no precision witness");
  }
  return v;
}

Verdict direct_oracles() {
  Verdict v;
  auto plus = [](ExtInt a, std::int64_t d) { return ext_add(a, ExtInt(d)).value(); };
  auto add = [](ExtInt a, ExtInt b) { return ext_add(a, b).value(); };
  auto sub = [](ExtInt a, ExtInt b) { return ext_sub(a, b).value(); };
  using Formula = std::function<std::pair<AbstractValue, AbstractValue>(const InputTuple&)>;
  const std::vector<std::pair<std::string, Formula>> cases{
      {"odd_even_inc",
       [&](const InputTuple& in) {
         const auto &o = in[0].comps[0], &e = in[0].comps[1];
         return std::pair{IntervalDomain::make(o.lo, plus(o.hi, 2)), IntervalDomain::make(e.lo, plus(e.hi, 2))};
       }},
      {"odd_even_add",
       [&](const InputTuple& in) {
         const auto &o1 = in[0].comps[0], &e1 = in[0].comps[1], &o2 = in[1].comps[0], &e2 = in[1].comps[1];
         return std::pair{IntervalDomain::make(plus(add(o1.lo, o2.lo), -1), plus(add(o1.hi, o2.hi), 1)),
                          IntervalDomain::make(add(e1.lo, e2.lo), add(e1.hi, e2.hi))};
       }},
      {"odd_even_sub", [&](const InputTuple& in) {
         const auto &o1 = in[0].comps[0], &e1 = in[0].comps[1], &o2 = in[1].comps[0], &e2 = in[1].comps[1];
         return std::pair{IntervalDomain::make(plus(sub(o1.lo, o2.hi), -1), plus(sub(o1.hi, o2.lo), 1)),
                          IntervalDomain::make(sub(e1.lo, e2.hi), sub(e1.hi, e2.lo))};
       }}};
  for (const auto& [name, formula] : cases) {
    Problem pb(load_config(config_path(name)));
    const std::int64_t b = pb.universe().config().int_bound;
    std::size_t checked = 0;
    for (std::uint32_t p = 0; p < pb.grid_size(); ++p) {
      const InputTuple& in = pb.point(p);
      bool skip = false;
      for (const auto& a : in) {
        skip = skip || is_bottom(pb.schema().sigs[0], a);
        for (const auto& c : a.comps)
          for (ExtInt x : {c.lo, c.hi}) skip = skip || (x.is_finite() && (x.value() < -b || x.value() > b));
      }
      if (skip) continue;
      auto [o, e] = formula(in);
      if (pb.direct(p, 0) != o || pb.direct(p, 1) != e) {
        v.require(false, name + ": direct output differs from the formula at " + pb.format_point(p));
        break;
      }
      ++checked;
    }
    v.require(checked > 0, name + ": no grid point checked");
  }

  // Ideal outputs are the least intervals containing the brute-force image.
  for (const char* name : {"odd_even_inc", "odd_even_abs"}) {
    Problem pb(load_config(config_path(name)));
    const auto& u = pb.universe();
    const bool is_abs = pb.op() == OpName::Abs;
    const std::int64_t bout = u.config().int_out_bound;
    for (std::size_t k = 0; k < pb.width() && v.ok(); ++k) {
      const bool odd = k == 0;
      std::vector<ExtInt> limits{ExtInt::neg_inf(), ExtInt::pos_inf()};
      for (std::int64_t x = -bout - 1; x <= bout + 1; ++x)
        if (is_odd(x) == odd) limits.push_back(ExtInt(x));
      for (std::uint32_t p = 0; p < pb.grid_size(); ++p) {
        const auto& comps = pb.point(p).at(0).comps;
        std::vector<ConcreteValue> domain = u.values(ValueKind::Int);
        domain.emplace_back(ExtInt::neg_inf());
        domain.emplace_back(ExtInt::pos_inf());
        std::vector<ExtInt> image;
        for (const auto& c : domain) {
          bool in_all = true;
          for (std::size_t j = 0; j < comps.size(); ++j) {
            const auto& a = comps[j];
            const ExtInt x = std::get<ExtInt>(c);
            // Infinite values belong to gamma only through an infinite limit.
            in_all = in_all && a.tag != AbstractValue::Tag::Bot && a.lo <= x && x <= a.hi &&
                     (x.is_finite() || x == a.lo || x == a.hi);
          }
          if (!in_all) continue;
          const ExtInt x = std::get<ExtInt>(c);
          image.push_back(is_abs ? (x < ExtInt(0) ? -x : x) : ext_add(x, ExtInt(1)).value());
        }
        const AbstractValue& ideal = pb.ideal(p, k);
        if (image.empty()) {
          v.require(pb.out(k).is_bot(ideal), std::string(name) + ": ideal not bottom at " + pb.format_point(p));
          continue;
        }
        const ExtInt mn = *std::min_element(image.begin(), image.end());
        const ExtInt mx = *std::max_element(image.begin(), image.end());
        bool minimal = ideal.lo <= mn && mx <= ideal.hi;
        for (auto lo : limits)
          for (auto hi : limits)
            if (lo <= mn && mx <= hi && !(lo <= ideal.lo && ideal.hi <= hi)) minimal = false;
        if (!minimal) {
          v.require(false, std::string(name) + ": ideal not minimal at " + pb.format_point(p));
          break;
        }
      }
    }
  }
  return v;
}

Verdict max_synth_zero() {
  Verdict v;
  Problem pb(load_config(config_path("maxsynth_zero")));
  auto space = make_space(pb, 0);
  auto p = pb.find(*pb.parse_point("[0,0]"));
  if (!p) {
    v.require(false, "[0,0] is not a grid point");
    return v;
  }
  ExampleSet ex;
  ex.pos.push_back(Example{*p, ExtInt(0)});
  ex.neg.push_back(Example{*p, ExtInt(1)});
  ex.neg.push_back(Example{*p, ExtInt(-1)});
  v.require(!space->synthesize(ex, Deadline()), "some candidate excludes both 1 and -1");
  auto r = space->max_synth(ex, Deadline());
  if (!r) {
    v.require(false, "max-synthesis found nothing");
    return v;
  }
  v.require(r->dropped.size() == 1, "dropped " + std::to_string(r->dropped.size()) + " negatives, expected 1");
  auto out = pb.eval(*r->expr, *p, 0);
  const std::string s = out ? pb.out(0).format(*out) : "invalid";
  v.require(s == "[-1,0]" || s == "[0,1]", "max-synthesis result at [0,0] is " + s);
  return v;
}

Verdict determinism() {
  Verdict v;
  for (const char* name : {"odd_even_inc", "safe_trim", "jsai_contains"}) {
    auto& first = synthesized(name);
    ProblemSpec spec = load_config(config_path(name));
    spec.engine.check_invariants = true;
    Problem pb(spec);
    std::ostringstream log;
    EngineReport rep = Engine(pb, &log).run();
    v.require(rep.status == first.rep.status, std::string(name) + ": status differs between runs");
    if (rep.status != EngineStatus::Ok || first.rep.status != EngineStatus::Ok) continue;
    v.require(write_artifact(make_artifact(pb, rep)) == write_artifact(make_artifact(*first.pb, first.rep)),
              std::string(name) + ": artifacts differ between runs");
    v.require(log.str() == first.log, std::string(name) + ": event logs differ between runs");
    v.require(!log.str().empty(), std::string(name) + ": empty event log");
  }
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 integer transformers match the goldens on the B=16 reduced grid", integer_goldens},
      {"2 inc values, reduction and the three-step chain", inc_values},
      {"3 string transformers match the goldens and improve on the direct product", string_goldens},
      {"4 final validation, precision witnesses for direct baselines, invariants hold", validation},
      {"5 direct-product formulas and minimal ideal outputs", direct_oracles},
      {"6 max-synthesis drops exactly one negative for the constant-zero function", max_synth_zero},
      {"7 byte-identical artifacts and event logs across runs", determinism},
  };
  int failed = 0;
  for (const auto& [title, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (v.ok() ? "PASS" : "FAIL") << " criterion " << title << std::endl;
    for (const auto& p : v.problems) std::cout << "    " << p << std::endl;
    if (!v.ok()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
