// Soundness and precision checks, the direct-product baseline and final
// validation.

#include <gtest/gtest.h>

#include <functional>

#include "redsynth/verification.hpp"
#include "support.hpp"

namespace redsynth {
namespace {

using testing::C;
using testing::point_of;

std::vector<ExprPtr> direct_tuple(const Problem& pb) {
  return std::vector<ExprPtr>(pb.width(), parse_expr("(direct)"));
}

std::vector<ExprPtr> golden_tuple(const Problem& pb) {
  std::vector<ExprPtr> t;
  for (std::size_t k = 0; k < pb.width(); ++k) t.push_back(pb.golden(k));
  return t;
}

TEST(CheckPos, GenuinePairsOnly) {
  Problem pb(testing::bundled("odd_even_inc_bootstrap"));
  ASSERT_EQ(pb.bootstrap_positive().size(), 1u);
  const Example& boot = pb.bootstrap_positive()[0];
  EXPECT_EQ(pb.format_point(boot.point), "<[27,29], [28,30]>");
  EXPECT_EQ(boot.out, C(30));
  EXPECT_TRUE(check_pos(pb, boot));
  // gamma of the input is {28, 29}; its image under inc is {29, 30}.
  EXPECT_TRUE(check_pos(pb, Example{boot.point, C(29)}));
  EXPECT_FALSE(check_pos(pb, Example{boot.point, C(31)}));
  EXPECT_FALSE(check_pos(pb, Example{boot.point, C(28)}));
}

TEST(Soundness, GoldenIsSoundAndWrongCandidatesAreNot) {
  Problem pb(testing::bundled("odd_even_inc_bootstrap"));
  for (std::size_t k = 0; k < pb.width(); ++k) EXPECT_TRUE(check_soundness(pb, k, *pb.golden(k)).sound);
  for (const char* text : {"(interval (add (field e l) 1) (sub (field e r) 1))", "(interval 1 -1)"}) {
    auto bad = parse_expr(text);
    auto r = check_soundness(pb, 0, *bad);
    ASSERT_FALSE(r.sound) << text;
    ASSERT_TRUE(r.witness);
    // The witness is a genuine output the candidate misses.
    EXPECT_TRUE(check_pos(pb, *r.witness));
    auto out = pb.eval(*bad, r.witness->point, 0);
    EXPECT_TRUE(!out || !pb.out(0).contains(*out, r.witness->out));
  }
}

// [min(e.l+1, o.r), o.r+2] for the odd component: every input value lies in
// [o.l, o.r] and at or above e.l, so the image of inc lies within
// [e.l+1, o.r+1] and the candidate is sound. It is not 1-precise: the upper
// limit can be tightened wherever the largest value is odd.
TEST(Soundness, IntermediateCandidateIsSoundButImprecise) {
  Problem pb(testing::bundled("odd_even_inc_bootstrap"));
  auto mid = parse_expr("(interval (min (add (field e l) 1) (field o r)) (add (field o r) 2))");
  EXPECT_TRUE(check_soundness(pb, 0, *mid).sound);
  auto rep = validate_final(pb, {mid, pb.golden(1)});
  EXPECT_TRUE(rep.components[0].sound);
  EXPECT_FALSE(rep.components[0].precise);
  ASSERT_TRUE(rep.components[0].better);
  EXPECT_TRUE(rep.components[1].precise);
}

// Direct-product formulas written out by hand for the odd x even product;
// limits use extended arithmetic.
ExtInt plus(ExtInt a, std::int64_t d) { return ext_add(a, ExtInt(d)).value(); }
ExtInt add(ExtInt a, ExtInt b) { return ext_add(a, b).value(); }
ExtInt sub(ExtInt a, ExtInt b) { return ext_sub(a, b).value(); }

void expect_direct(const std::string& config,
                   const std::function<std::pair<AbstractValue, AbstractValue>(const InputTuple&)>& formula) {
  Problem pb(testing::bundled(config));
  std::size_t checked = 0;
  for (std::uint32_t p = 0; p < pb.grid_size(); ++p) {
    const InputTuple& in = pb.point(p);
    bool bottom = false;
    for (const auto& a : in) bottom = bottom || is_bottom(pb.schema().sigs[0], a);
    if (bottom) continue;
    // The formulas reason about unbounded integers; at the edge of the
    // bounded universe the enumerated direct output may be tighter.
    const std::int64_t b = pb.universe().config().int_bound;
    bool inside = true;
    for (const auto& a : in)
      for (const auto& c : a.comps)
        for (ExtInt x : {c.lo, c.hi}) inside = inside && (!x.is_finite() || (x.value() >= -b && x.value() <= b));
    if (!inside) continue;
    auto [o, e] = formula(in);
    ASSERT_EQ(pb.direct(p, 0), o) << config << " " << pb.format_point(p);
    ASSERT_EQ(pb.direct(p, 1), e) << config << " " << pb.format_point(p);
    ++checked;
  }
  EXPECT_GT(checked, 100u);
}

TEST(DirectProduct, IncFormula) {
  expect_direct("odd_even_inc", [](const InputTuple& in) {
    const auto& o = in[0].comps[0];
    const auto& e = in[0].comps[1];
    return std::pair{IntervalDomain::make(o.lo, plus(o.hi, 2)), IntervalDomain::make(e.lo, plus(e.hi, 2))};
  });
}

TEST(DirectProduct, AddFormula) {
  expect_direct("odd_even_add", [](const InputTuple& in) {
    const auto &o1 = in[0].comps[0], &e1 = in[0].comps[1], &o2 = in[1].comps[0], &e2 = in[1].comps[1];
    return std::pair{IntervalDomain::make(plus(add(o1.lo, o2.lo), -1), plus(add(o1.hi, o2.hi), 1)),
                     IntervalDomain::make(add(e1.lo, e2.lo), add(e1.hi, e2.hi))};
  });
}

TEST(DirectProduct, SubFormula) {
  expect_direct("odd_even_sub", [](const InputTuple& in) {
    const auto &o1 = in[0].comps[0], &e1 = in[0].comps[1], &o2 = in[1].comps[0], &e2 = in[1].comps[1];
    return std::pair{IntervalDomain::make(plus(sub(o1.lo, o2.hi), -1), plus(sub(o1.hi, o2.lo), 1)),
                     IntervalDomain::make(sub(e1.lo, e2.hi), sub(e1.hi, e2.lo))};
  });
}

TEST(DirectProduct, ApplyWithoutReduction) {
  Problem pb(testing::bundled("odd_even_inc"));
  auto in = pb.parse_point("<[5,5], [4,6]>");
  ASSERT_TRUE(in);
  auto d = pb.apply_direct(*in);
  EXPECT_EQ(pb.out(0).format(d[0]), "[5,7]");
  EXPECT_EQ(pb.out(1).format(d[1]), "[4,8]");
  auto ideal = pb.apply_ideal(*in);
  EXPECT_EQ(pb.out(0).format(ideal[0]), "[5,7]");
  EXPECT_EQ(pb.out(1).format(ideal[1]), "[6,6]");
}

TEST(Validation, GoldensPass) {
  for (const char* name : {"odd_even_inc", "safe_tolower", "jsai_toupper"}) {
    Problem pb(testing::bundled(name));
    auto rep = validate_final(pb, golden_tuple(pb));
    EXPECT_TRUE(rep.all_sound()) << name;
    EXPECT_TRUE(rep.all_precise()) << name;
    ASSERT_TRUE(rep.golden_gamma_equal) << name;
    EXPECT_TRUE(*rep.golden_gamma_equal) << name;
  }
}

TEST(Validation, DirectBaselineIsSoundButImprecise) {
  for (const char* name : {"odd_even_inc", "safe_trim", "safe_tolower", "safe_toupper", "safe_charat"}) {
    Problem pb(testing::bundled(name));
    auto rep = validate_final(pb, direct_tuple(pb));
    EXPECT_TRUE(rep.all_sound()) << name;
    EXPECT_FALSE(rep.all_precise()) << name;
    bool witnessed = false;
    for (const auto& c : rep.components) {
      if (c.precise) continue;
      ASSERT_TRUE(c.better) << name << " " << c.name;
      // The witness candidate is sound and excludes a value the direct
      // output admits at that point.
      std::size_t k = 0;
      while (pb.out(k).name() != c.name) ++k;
      EXPECT_TRUE(check_soundness(pb, k, *c.better->h).sound);
      EXPECT_TRUE(pb.out(k).contains(pb.direct(c.better->point, k), c.better->value));
      auto better = pb.eval(*c.better->h, c.better->point, k);
      ASSERT_TRUE(better);
      EXPECT_FALSE(pb.out(k).contains(*better, c.better->value));
      witnessed = true;
    }
    EXPECT_TRUE(witnessed) << name;
  }
}

TEST(Validation, UnsoundTupleIsReported) {
  Problem pb(testing::bundled("odd_even_inc"));
  auto t = golden_tuple(pb);
  t[1] = parse_expr("(interval (field o l) (field o r))");  // even limits from odd ones: invalid
  auto rep = validate_final(pb, t);
  EXPECT_FALSE(rep.all_sound());
  EXPECT_TRUE(rep.components[0].sound);
  EXPECT_FALSE(rep.components[1].sound);
}

TEST(PrecisionScope, ViewHidesOtherComponents) {
  TupleOutputs cur{{IntervalDomain::make(1, 3)}, {IntervalDomain::make(2, 4)}};
  auto comp = precision_view(cur, 1, PrecisionScope::Component);
  EXPECT_FALSE(comp[0][0]);
  EXPECT_EQ(comp[1][0], cur[1][0]);
  EXPECT_EQ(precision_view(cur, 1, PrecisionScope::Product), cur);
}

// Measured against the intersection of all components, the direct tuple of
// a unary string operation leaves nothing to tighten: the other component
// already excludes what a better one would. Per component it is imprecise.
TEST(PrecisionScope, ProductScopeIsWeaker) {
  ProblemSpec spec = testing::bundled("safe_tolower");
  spec.engine.precision = PrecisionScope::Product;
  Problem product(spec);
  EXPECT_TRUE(validate_final(product, direct_tuple(product)).all_precise());
  spec.engine.precision = PrecisionScope::Component;
  Problem component(spec);
  EXPECT_FALSE(validate_final(component, direct_tuple(component)).all_precise());
}

TEST(GridComparison, GoldenAgainstItselfAndDirect) {
  Problem pb(testing::bundled("odd_even_inc"));
  Budget b = pb.spec().budget;
  b.grid_bound = 6;
  EXPECT_FALSE(compare_on_grid(pb, golden_tuple(pb), golden_tuple(pb), b));
  auto diff = compare_on_grid(pb, golden_tuple(pb), direct_tuple(pb), b);
  ASSERT_TRUE(diff);
  EXPECT_FALSE(diff->empty());
  OutputGamma og(pb);
  auto g = og.gamma({IntervalDomain::make(5, 9), IntervalDomain::make(4, 8)});
  ASSERT_TRUE(g);
  EXPECT_EQ(*g, (std::vector<ConcreteValue>{C(5), C(6), C(7), C(8)}));
}

}  // namespace
}  // namespace redsynth
