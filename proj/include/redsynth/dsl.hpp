#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "redsynth/domains.hpp"
#include "redsynth/sexpr.hpp"

namespace redsynth {

// ---------------------------------------------------------------------------
// Expressions

enum class NodeKind : std::uint8_t {
  Num,       // integer literal
  Inf,       // +inf / -inf
  Field,     // (field REF l|r): limit of an interval component
  Neg,
  Add,
  Sub,
  Min,
  Max,
  Interval,  // (interval LO HI)
  If,        // (if GUARD ELSE-BRANCH THEN-BRANCH): guard true selects the first
  TopBot,    // (topbot REF...): some listed component is top or bottom
  Alpha,     // (alpha DOM SET)
  Map,       // (map OP REF...): pointwise image over finite sources
  Fold,      // (fold OP REF...): abstract-boolean fold of a pointwise image
  Fallback,  // (fallback DOM): per-domain direct transformer through DOM
  Const,     // (const DOM ELEMENT)
  Meet,      // (meet X Y)
  Direct,    // (direct): direct-product component
  Hole,      // grammar nonterminal (only inside grammar templates)
};

std::string_view node_name(NodeKind k);
bool is_commutative(NodeKind k);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  NodeKind kind = NodeKind::Num;
  std::int64_t num = 0;           // Num
  bool positive = true;           // Inf
  std::string a, b;               // attributes (see NodeKind)
  std::vector<std::string> refs;  // TopBot / Map / Fold sources
  std::vector<ExprPtr> kids;

  bool operator==(const Expr& o) const;
};

namespace ex {
ExprPtr num(std::int64_t v);
ExprPtr inf(bool positive);
ExprPtr field(std::string ref, std::string side);
ExprPtr unary(NodeKind k, ExprPtr x);
ExprPtr binary(NodeKind k, ExprPtr x, ExprPtr y);
ExprPtr interval(ExprPtr lo, ExprPtr hi);
ExprPtr hole(std::string nt);
}  // namespace ex

// Node count; attributes (references, domain and operation names) are not
// nodes, holes count zero.
int expr_size(const Expr& e);
// Nesting depth of binary arithmetic operators.
int binary_depth(const Expr& e);

SExpr expr_to_sexpr(const Expr& e);
std::string print_expr(const Expr& e);
// `nonterminals` turns matching symbols in expression position into holes.
ExprPtr expr_from_sexpr(const SExpr& s, const std::vector<std::string>& nonterminals = {});
ExprPtr parse_expr(std::string_view text, const std::vector<std::string>& nonterminals = {});
// Human-readable infix rendering.
std::string render_pseudo(const Expr& e, int indent = 0);

class DslError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Grammars

struct Grammar {
  std::string start;
  std::vector<std::string> nonterminals;                 // declaration order
  std::map<std::string, std::vector<ExprPtr>> productions;  // templates

  const std::vector<ExprPtr>& alternatives(const std::string& nt) const;
  bool is_nonterminal(std::string_view s) const;
};

// Line-oriented BNF: "N ::= alt | alt"; a line starting with '|' continues the
// previous rule. The first rule's left-hand side is the start symbol.
// Throws DslError on empty text, unknown symbols or unreachable nonterminals.
Grammar parse_grammar(std::string_view text);
std::string print_grammar(const Grammar& g);

// Every expression derivable from `nt` with at most `max_size` nodes, where
// recursive productions are unrolled at most `depth` times along any path.
// Ordered by size, then production order; commutative operands over the same
// nonterminal are canonicalized; each expression appears once.
std::vector<ExprPtr> enumerate_exprs(const Grammar& g, int max_size, int depth = 3);
std::vector<ExprPtr> enumerate_from(const Grammar& g, const std::string& nt, int max_size, int depth = 3);

// ---------------------------------------------------------------------------
// Evaluation

// Static description of an operation's abstract signature: argument products,
// output components and the reference names grammar terminals use.
struct OpSchema {
  OpName op = OpName::Inc;
  std::vector<ArgSig> sigs;
  std::vector<DomainPtr> outs;

  struct Slot {
    std::size_t arg = 0, comp = 0;
  };
  std::map<std::string, Slot, std::less<>> refs;

  // Reference names: a domain's short name, suffixed with the 1-based
  // argument index when the operation is binary and the argument is a
  // product of several components ("o1", "ssk2"); single-component
  // arguments use the bare name ("pos").
  static OpSchema make(OpName op, std::vector<ArgSig> sigs, std::vector<DomainPtr> outs);

  std::optional<Slot> find(std::string_view ref) const;
  // Index j of the product component whose domain has short name `dom`.
  std::optional<std::size_t> component_of(std::string_view dom) const;
  std::size_t width() const;
};

// Validates that every reference and domain attribute in `e` resolves for
// output component k. Throws DslError naming the offending symbol.
void validate_expr(const Expr& e, const OpSchema& s, std::size_t k);

// Intermediate value of a node.
struct Val {
  enum class K : std::uint8_t { Int, Indet, Bool, Abs, Set, SetTop, Invalid };
  K k = K::Invalid;
  ExtInt i;
  bool b = false;
  AbstractValue a;
  std::shared_ptr<const std::vector<ConcreteValue>> set;

  static Val of_int(ExtInt x) { Val v; v.k = K::Int; v.i = x; return v; }
  static Val indet() { Val v; v.k = K::Indet; return v; }
  static Val of_bool(bool x) { Val v; v.k = K::Bool; v.b = x; return v; }
  static Val of_abs(AbstractValue x) { Val v; v.k = K::Abs; v.a = std::move(x); return v; }
  static Val invalid() { return Val{}; }
};

// Everything an expression may read at one abstract input.
struct EvalContext {
  const OpSchema* schema = nullptr;
  const Universe* universe = nullptr;
  std::size_t k = 0;                 // output component
  const InputTuple* input = nullptr;
  // Overridable providers (default: computed from the domains directly).
  std::function<AbstractValue(std::size_t j)> fallback;
  std::function<AbstractValue()> direct;
  // Optional per-input memo of node values, keyed by node address; only
  // sound when the enumerated programs share their subtrees.
  std::unordered_map<const Expr*, Val>* memo = nullptr;

  const Domain& out() const { return *schema->outs.at(k); }
  AbstractValue fallback_value(std::size_t j) const;
  AbstractValue direct_value() const;
};

// Applies node `e` to already evaluated children.
Val apply_node(const Expr& e, std::span<const Val> kids, const EvalContext& ctx);
Val eval_node(const Expr& e, const EvalContext& ctx);
// Top-level conversion of a node value to an output value; nullopt marks an
// invalid output (wrong parity, wrong kind), which checks treat as unsound.
std::optional<AbstractValue> finish_value(const Val& v, const EvalContext& ctx);
// Component transformer: strict in bottom arguments, otherwise eval + finish.
std::optional<AbstractValue> eval_component(const Expr& e, const EvalContext& ctx);

}  // namespace redsynth
