#include "redsynth/sexpr.hpp"

#include "redsynth/textutil.hpp"

namespace redsynth {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view t) : t_(t) {}

  bool at_end() {
    skip();
    return pos_ >= t_.size();
  }

  SExpr read() {
    skip();
    if (pos_ >= t_.size()) fail("unexpected end of input");
    char c = t_[pos_];
    if (c == ')') fail("unexpected ')'");
    if (c == '(') {
      ++pos_;
      std::vector<SExpr> items;
      for (;;) {
        skip();
        if (pos_ >= t_.size()) fail("unterminated list");
        if (t_[pos_] == ')') {
          ++pos_;
          return SExpr::make_list(std::move(items));
        }
        items.push_back(read());
      }
    }
    if (c == '"') {
      std::string s;
      ++pos_;
      for (;;) {
        if (pos_ >= t_.size()) fail("unterminated string");
        char d = t_[pos_++];
        if (d == '"') break;
        if (d == '\\') {
          if (pos_ >= t_.size()) fail("dangling escape");
          d = t_[pos_++];
        }
        s += d;
      }
      return SExpr::make_string(std::move(s));
    }
    std::size_t start = pos_;
    while (pos_ < t_.size() && !is_delim(t_[pos_])) ++pos_;
    return SExpr::make_atom(std::string(t_.substr(start, pos_ - start)));
  }

 private:
  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == '"' || c == ';' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
  }

  void skip() {
    while (pos_ < t_.size()) {
      char c = t_[pos_];
      if (c == ';') {
        while (pos_ < t_.size() && t_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw SExprError("s-expression: " + what + " at offset " + std::to_string(pos_));
  }

  std::string_view t_;
  std::size_t pos_ = 0;
};

}  // namespace

SExpr parse_sexpr(std::string_view text) {
  Reader r(text);
  SExpr e = r.read();
  if (!r.at_end()) throw SExprError("s-expression: trailing input after expression");
  return e;
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  Reader r(text);
  std::vector<SExpr> out;
  while (!r.at_end()) out.push_back(r.read());
  return out;
}

std::string print_sexpr(const SExpr& e) {
  if (!e.is_list) return e.quoted ? quote(e.atom) : e.atom;
  std::string out = "(";
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    if (i) out += ' ';
    out += print_sexpr(e.items[i]);
  }
  return out + ")";
}

std::string pretty_sexpr(const SExpr& e, std::size_t width, int indent) {
  std::string flat = print_sexpr(e);
  if (!e.is_list || flat.size() + static_cast<std::size_t>(indent) <= width || e.items.empty()) return flat;
  std::string out = "(" + print_sexpr(e.items[0]);
  std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  for (std::size_t i = 1; i < e.items.size(); ++i) out += "\n" + pad + pretty_sexpr(e.items[i], width, indent + 2);
  return out + ")";
}

}  // namespace redsynth
