#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace redsynth {

// Minimal s-expression tree: an atom (symbol, number or quoted string) or a
// parenthesized list.
struct SExpr {
  bool is_list = false;
  bool quoted = false;  // atom came from a "..." literal
  std::string atom;
  std::vector<SExpr> items;

  static SExpr make_atom(std::string a) { return SExpr{false, false, std::move(a), {}}; }
  static SExpr make_string(std::string a) { return SExpr{false, true, std::move(a), {}}; }
  static SExpr make_list(std::vector<SExpr> xs) { return SExpr{true, false, {}, std::move(xs)}; }

  bool is_atom(std::string_view a) const { return !is_list && !quoted && atom == a; }
  const SExpr& at(std::size_t i) const { return items.at(i); }
  std::size_t size() const { return items.size(); }
  bool operator==(const SExpr&) const = default;
};

class SExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses exactly one expression (surrounding whitespace and ';' comments are
// allowed). Throws SExprError with a position on malformed input.
SExpr parse_sexpr(std::string_view text);
// Parses a sequence of top-level expressions.
std::vector<SExpr> parse_sexprs(std::string_view text);

std::string print_sexpr(const SExpr& e);
// Multi-line rendering: lists whose flat form exceeds `width` break one child
// per line.
std::string pretty_sexpr(const SExpr& e, std::size_t width = 88, int indent = 0);

}  // namespace redsynth
