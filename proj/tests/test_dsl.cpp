// S-expressions, the transformer language, grammars and evaluation.

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "redsynth/dsl.hpp"
#include "support.hpp"

namespace redsynth {
namespace {

using testing::point_of;

TEST(SExpr, ParsePrintRoundTrip) {
  const std::string text = "(a (b \"c d\" -3) () x)";
  SExpr s = parse_sexpr(text);
  ASSERT_TRUE(s.is_list);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_TRUE(s.at(1).at(1).quoted);
  EXPECT_EQ(s.at(1).at(1).atom, "c d");
  EXPECT_EQ(print_sexpr(s), text);
  EXPECT_EQ(parse_sexpr(print_sexpr(s)), s);
  EXPECT_EQ(parse_sexpr("  ; comment\n (x) ; tail\n"), parse_sexpr("(x)"));
  EXPECT_EQ(parse_sexprs("(a) b (c)").size(), 3u);
}

TEST(SExpr, MalformedInputThrows) {
  EXPECT_THROW(parse_sexpr("(a b"), SExprError);
  EXPECT_THROW(parse_sexpr("a)"), SExprError);
  EXPECT_THROW(parse_sexpr("(a) (b)"), SExprError);
  EXPECT_THROW(parse_sexpr("\"open"), SExprError);
  EXPECT_THROW(parse_sexpr(""), SExprError);
}

TEST(Exprs, ParsePrintRoundTrip) {
  for (const char* t : {"(interval (add (field e l) 1) (add (field e r) 1))",
                        "(interval -inf (max (field o r) (neg 2)))",
                        "(if (topbot ssk) (fallback ssk) (alpha ssk (map trim ssk)))",
                        "(if (topbot ssk1 ssk2) (meet (fallback ssk) (const ssk Top)) (fold contains ssk1 ssk2))",
                        "(direct)"}) {
    ExprPtr e = parse_expr(t);
    EXPECT_EQ(print_expr(*e), t);
    EXPECT_EQ(*parse_expr(print_expr(*e)), *e);
    EXPECT_FALSE(render_pseudo(*e).empty());
  }
}

TEST(Exprs, SizeCountsNodesNotAttributes) {
  EXPECT_EQ(expr_size(*parse_expr("(interval (add (field e l) 1) (add (field e r) 1))")), 7);
  EXPECT_EQ(expr_size(*parse_expr("(fallback ssk)")), 1);
  EXPECT_EQ(expr_size(*parse_expr("(alpha ssk (map trim ssk))")), 2);
  EXPECT_EQ(binary_depth(*parse_expr("(add (add 1 1) (neg (sub 1 1)))")), 2);
}

TEST(Exprs, MalformedExpressionsThrow) {
  EXPECT_THROW(parse_expr("(frobnicate 1)"), DslError);
  EXPECT_THROW(parse_expr("(add 1)"), DslError);
  EXPECT_THROW(parse_expr("(field o middle)"), DslError);
  EXPECT_THROW(parse_expr("(interval 1 2 3)"), DslError);
}

TEST(Grammars, ParseAndReject) {
  Grammar g = parse_grammar("F ::= (interval E E)\nE ::= 0 | 1\n  | (add E E)\n");
  EXPECT_EQ(g.start, "F");
  EXPECT_EQ(g.nonterminals, (std::vector<std::string>{"F", "E"}));
  EXPECT_EQ(g.alternatives("E").size(), 3u);
  EXPECT_TRUE(g.is_nonterminal("E"));
  EXPECT_FALSE(g.is_nonterminal("0"));
  EXPECT_EQ(parse_grammar(print_grammar(g)).alternatives("E").size(), 3u);
  EXPECT_THROW(parse_grammar(""), DslError);
  EXPECT_THROW(parse_grammar("F ::= (interval E E)\nX ::= 1\nE ::= 0"), DslError);  // X unreachable
  EXPECT_THROW(parse_grammar("F ::= (interval E E)"), DslError);                     // E undefined
}

// Hand count: E of size 1 is 0 or 1 (2 terms); of size 3 it is (add a b) over
// unordered pairs from {0,1} (3 terms). F = (interval E E) of size <= 5 takes
// sizes (1,1): 4, (1,3): 6, (3,1): 6.
TEST(Grammars, EnumerationIsCanonicalAndOrdered) {
  Grammar g = parse_grammar("F ::= (interval E E)\nE ::= 0 | 1 | (add E E)\n");
  auto all = enumerate_exprs(g, 5, 3);
  ASSERT_EQ(all.size(), 16u);
  std::set<std::string> seen;
  int last = 0;
  for (const auto& e : all) {
    EXPECT_TRUE(seen.insert(print_expr(*e)).second) << print_expr(*e);
    EXPECT_GE(expr_size(*e), last);
    last = expr_size(*e);
  }
  EXPECT_EQ(print_expr(*all.front()), "(interval 0 0)");
  EXPECT_EQ(std::count_if(all.begin(), all.end(), [](const ExprPtr& e) { return expr_size(*e) == 3; }), 4);
  // Same enumeration twice: same order.
  auto again = enumerate_exprs(g, 5, 3);
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(*all[i], *again[i]);
  // Depth 0 forbids unrolling the recursive production.
  EXPECT_EQ(enumerate_exprs(g, 5, 0).size(), 4u);
}

TEST(Eval, ReducedIncrementAtASinglePoint) {
  Problem pb(testing::bundled("odd_even_inc"));
  auto p = point_of(pb, "<[5,5], [4,6]>");
  EXPECT_EQ(pb.format_point(p), "<[5,5], [4,6]>");
  ASSERT_TRUE(pb.golden(0) && pb.golden(1));
  EXPECT_EQ(pb.out(0).format(*pb.eval(*pb.golden(0), p, 0)), "[5,7]");
  EXPECT_EQ(pb.out(1).format(*pb.eval(*pb.golden(1), p, 1)), "[6,6]");
  auto direct = parse_expr("(direct)");
  EXPECT_EQ(pb.out(0).format(*pb.eval(*direct, p, 0)), "[5,7]");
  EXPECT_EQ(pb.out(1).format(*pb.eval(*direct, p, 1)), "[4,8]");
  // A parity-violating output is invalid.
  EXPECT_FALSE(pb.eval(*parse_expr("(interval (field e l) (field o r))"), p, 0));
  // Arithmetic on infinite limits.
  auto q = point_of(pb, "<[1,+inf], [2,+inf]>");
  EXPECT_EQ(pb.out(0).format(*pb.eval(*pb.golden(0), q, 0)), "[3,+inf]");
}

TEST(Eval, ValidationRejectsUnknownSymbols) {
  Problem pb(testing::bundled("odd_even_inc"));
  EXPECT_NO_THROW(validate_expr(*pb.golden(0), pb.schema(), 0));
  EXPECT_THROW(validate_expr(*parse_expr("(interval (field q l) 1)"), pb.schema(), 0), DslError);
  EXPECT_THROW(validate_expr(*parse_expr("(fallback ssk)"), pb.schema(), 0), DslError);
}

TEST(Eval, StringTransformers) {
  Problem pb(testing::bundled("safe_trim"));
  // Off the synthesis grid (the string is longer than the grid strings).
  auto in = pb.parse_point("<{\" 123  \"}, OtherStr>");
  ASSERT_TRUE(in);
  auto at = [&](const std::string& e0, const std::string& e1) {
    auto out = pb.apply_tuple({parse_expr(e0), parse_expr(e1)}, *in);
    return pb.out(0).format(*out[0]) + " " + pb.out(1).format(*out[1]);
  };
  auto golden = pb.apply_tuple({pb.golden(0), pb.golden(1)}, *in);
  EXPECT_EQ(pb.out(0).format(*golden[0]), "{\"123\"}");
  EXPECT_EQ(pb.out(1).format(*golden[1]), "NumStr");
  EXPECT_EQ(at("(direct)", "(direct)"), "{\"123\"} Top");
  EXPECT_EQ(at("(const ssk Top)", "(meet (fallback no) (const no NumStr))"), "Top NumStr");
  auto top = point_of(pb, "<Top, OtherStr>");
  EXPECT_EQ(pb.out(0).format(*pb.eval(*pb.golden(0), top, 0)), "Top");
}

TEST(Eval, BinaryReferenceNames) {
  Problem pb(testing::bundled("odd_even_add"));
  EXPECT_TRUE(pb.schema().find("o1"));
  EXPECT_TRUE(pb.schema().find("e2"));
  EXPECT_FALSE(pb.schema().find("o"));
  Problem ch(testing::bundled("safe_charat"));
  EXPECT_TRUE(ch.schema().find("ssk1"));
  EXPECT_TRUE(ch.schema().find("pos"));
}

}  // namespace
}  // namespace redsynth
