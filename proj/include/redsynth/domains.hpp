#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "redsynth/universe.hpp"

namespace redsynth {

// One abstract value of some component domain. The owning Domain decides
// which fields are meaningful; unused fields keep their defaults so that
// equality and hashing are plain field-wise operations.
struct AbstractValue {
  enum class Tag : std::uint8_t { Bot, Val, Top };

  Tag tag = Tag::Bot;
  ExtInt lo{0}, hi{0};            // interval limits
  std::vector<std::string> strs;  // string sets (sorted, unique)
  std::uint32_t elem = 0;         // element index in a finite lattice
  ConcreteValue cst{ExtInt(0)};   // flat-lattice constant

  bool operator==(const AbstractValue&) const = default;
  std::strong_ordering operator<=>(const AbstractValue&) const = default;
};

struct AbstractValueHash {
  std::size_t operator()(const AbstractValue& v) const;
};

// Incremental abstraction: feed concrete values, read alpha of the set so far.
class Accumulator {
 public:
  virtual ~Accumulator() = default;
  virtual void add(const ConcreteValue& c) = 0;
  // True once no further value can change the result.
  virtual bool saturated() const = 0;
  virtual AbstractValue result() const = 0;
};

class Domain {
 public:
  enum class Family : std::uint8_t { Interval, StringSet, Finite, Flat };

  virtual ~Domain() = default;

  const std::string& name() const { return name_; }
  // Short reference name used by grammar terminals (o, e, ssk, no, pos, ...).
  const std::string& ref() const { return ref_; }
  virtual Family family() const = 0;
  virtual ValueKind kind() const = 0;

  virtual AbstractValue bot() const = 0;
  virtual AbstractValue top() const = 0;
  bool is_bot(const AbstractValue& a) const { return a == bot(); }
  bool is_top(const AbstractValue& a) const { return a == top(); }

  virtual bool leq(const AbstractValue& a, const AbstractValue& b) const = 0;
  virtual AbstractValue join(const AbstractValue& a, const AbstractValue& b) const = 0;
  virtual AbstractValue meet(const AbstractValue& a, const AbstractValue& b) const = 0;

  // c in gamma(a); c may lie anywhere in the output universe.
  virtual bool contains(const AbstractValue& a, const ConcreteValue& c) const = 0;
  // gamma(a) restricted to the input universe (integer domains add the
  // -inf / +inf sentinels for infinite limits).
  virtual std::vector<ConcreteValue> gamma(const AbstractValue& a, const Universe& u) const = 0;
  // Cheap upper bound on |gamma(a)|, used to pick the enumeration driver.
  virtual std::size_t gamma_size_hint(const AbstractValue& a, const Universe& u) const = 0;

  virtual std::unique_ptr<Accumulator> accumulator() const = 0;
  AbstractValue alpha(std::span<const ConcreteValue> s) const;

  // Structural well-formedness (e.g. parity of interval limits).
  virtual bool valid(const AbstractValue& a) const { (void)a; return true; }

  virtual std::string format(const AbstractValue& a) const = 0;
  virtual std::optional<AbstractValue> parse(std::string_view text) const = 0;
  // Named constants usable as DSL terminals (const D NAME).
  virtual std::vector<std::pair<std::string, AbstractValue>> constants() const;

 protected:
  Domain(std::string name, std::string ref) : name_(std::move(name)), ref_(std::move(ref)) {}

 private:
  std::string name_;
  std::string ref_;
};

using DomainPtr = std::shared_ptr<const Domain>;

enum class Parity : std::uint8_t { Any, Odd, Even };

class IntervalDomain final : public Domain {
 public:
  explicit IntervalDomain(Parity p);
  Parity parity() const { return parity_; }
  Family family() const override { return Family::Interval; }
  ValueKind kind() const override { return ValueKind::Int; }
  AbstractValue bot() const override;
  AbstractValue top() const override;
  bool leq(const AbstractValue& a, const AbstractValue& b) const override;
  AbstractValue join(const AbstractValue& a, const AbstractValue& b) const override;
  AbstractValue meet(const AbstractValue& a, const AbstractValue& b) const override;
  bool contains(const AbstractValue& a, const ConcreteValue& c) const override;
  std::vector<ConcreteValue> gamma(const AbstractValue& a, const Universe& u) const override;
  std::size_t gamma_size_hint(const AbstractValue& a, const Universe& u) const override;
  std::unique_ptr<Accumulator> accumulator() const override;
  bool valid(const AbstractValue& a) const override;
  std::string format(const AbstractValue& a) const override;
  std::optional<AbstractValue> parse(std::string_view text) const override;

  // Canonical interval: lo > hi collapses to bottom. No parity rounding.
  static AbstractValue make(ExtInt lo, ExtInt hi);
  // alpha of the set {min..max}: rounds limits outward to the parity.
  AbstractValue alpha_range(ExtInt min, ExtInt max) const;

 private:
  Parity parity_;
};

class StringSetDomain final : public Domain {
 public:
  explicit StringSetDomain(int k);
  int k() const { return k_; }
  Family family() const override { return Family::StringSet; }
  ValueKind kind() const override { return ValueKind::Str; }
  AbstractValue bot() const override;
  AbstractValue top() const override;
  bool leq(const AbstractValue& a, const AbstractValue& b) const override;
  AbstractValue join(const AbstractValue& a, const AbstractValue& b) const override;
  AbstractValue meet(const AbstractValue& a, const AbstractValue& b) const override;
  bool contains(const AbstractValue& a, const ConcreteValue& c) const override;
  std::vector<ConcreteValue> gamma(const AbstractValue& a, const Universe& u) const override;
  std::size_t gamma_size_hint(const AbstractValue& a, const Universe& u) const override;
  std::unique_ptr<Accumulator> accumulator() const override;
  bool valid(const AbstractValue& a) const override;
  std::string format(const AbstractValue& a) const override;
  std::optional<AbstractValue> parse(std::string_view text) const override;

  AbstractValue make(std::vector<std::string> strs) const;

 private:
  int k_;
};

// A finite lattice given by its elements and cover relation; concrete values
// are mapped to elements by a classifier, and alpha joins the classes.
class FiniteDomain final : public Domain {
 public:
  using Classifier = std::function<std::uint32_t(const ConcreteValue&)>;

  // covers: pairs (lower, upper) of element indices. Throws
  // std::invalid_argument if the order is not a lattice.
  FiniteDomain(std::string name, std::string ref, ValueKind kind, std::vector<std::string> elems,
               std::vector<std::pair<std::uint32_t, std::uint32_t>> covers, Classifier classify);

  Family family() const override { return Family::Finite; }
  ValueKind kind() const override { return kind_; }
  AbstractValue bot() const override { return at(bot_); }
  AbstractValue top() const override { return at(top_); }
  bool leq(const AbstractValue& a, const AbstractValue& b) const override;
  AbstractValue join(const AbstractValue& a, const AbstractValue& b) const override;
  AbstractValue meet(const AbstractValue& a, const AbstractValue& b) const override;
  bool contains(const AbstractValue& a, const ConcreteValue& c) const override;
  std::vector<ConcreteValue> gamma(const AbstractValue& a, const Universe& u) const override;
  std::size_t gamma_size_hint(const AbstractValue& a, const Universe& u) const override;
  std::unique_ptr<Accumulator> accumulator() const override;
  std::string format(const AbstractValue& a) const override;
  std::optional<AbstractValue> parse(std::string_view text) const override;
  std::vector<std::pair<std::string, AbstractValue>> constants() const override;

  std::size_t size() const { return elems_.size(); }
  AbstractValue at(std::uint32_t i) const;
  AbstractValue named(std::string_view n) const;  // throws on unknown name
  std::uint32_t classify(const ConcreteValue& c) const { return classify_(c); }

 private:
  ValueKind kind_;
  std::vector<std::string> elems_;
  std::vector<std::vector<bool>> le_;
  std::vector<std::vector<std::uint32_t>> join_, meet_;
  std::uint32_t bot_ = 0, top_ = 0;
  Classifier classify_;
};

// Flat lattice over concrete values of one kind (constant strings, naturals).
class FlatDomain final : public Domain {
 public:
  FlatDomain(std::string name, std::string ref, ValueKind kind);
  Family family() const override { return Family::Flat; }
  ValueKind kind() const override { return kind_; }
  AbstractValue bot() const override;
  AbstractValue top() const override;
  bool leq(const AbstractValue& a, const AbstractValue& b) const override;
  AbstractValue join(const AbstractValue& a, const AbstractValue& b) const override;
  AbstractValue meet(const AbstractValue& a, const AbstractValue& b) const override;
  bool contains(const AbstractValue& a, const ConcreteValue& c) const override;
  std::vector<ConcreteValue> gamma(const AbstractValue& a, const Universe& u) const override;
  std::size_t gamma_size_hint(const AbstractValue& a, const Universe& u) const override;
  std::unique_ptr<Accumulator> accumulator() const override;
  std::string format(const AbstractValue& a) const override;
  std::optional<AbstractValue> parse(std::string_view text) const override;

  static AbstractValue make(ConcreteValue c);

 private:
  ValueKind kind_;
};

// Declarative description of a custom finite domain.
struct ClassifierRule {
  enum class Kind : std::uint8_t { Keywords, Regex, Range, Mod, Bool, Default };
  Kind kind = Kind::Default;
  std::string element;
  std::vector<std::string> words;  // Keywords
  std::string pattern;             // Regex
  std::int64_t a = 0, b = 0;       // Range [a,b] or Mod (value mod a == b)
  bool truth = false;              // Bool
};

struct FiniteDomainSpec {
  std::string name;
  std::string ref;
  ValueKind kind = ValueKind::Str;
  std::vector<std::string> elements;
  std::vector<std::pair<std::string, std::string>> covers;  // (lower, upper)
  std::vector<ClassifierRule> rules;                        // first match wins
};

DomainPtr make_finite_domain(const FiniteDomainSpec& spec);

// Built-in domains by name: interval, odd, even, ssk, no, nos, cs, bool,
// flatnum; otherwise one of the custom specs.
DomainPtr make_domain(std::string_view name, const UniverseConfig& cfg,
                      const std::vector<FiniteDomainSpec>& custom = {});

// ---------------------------------------------------------------------------
// Products

struct ProductValue {
  std::vector<AbstractValue> comps;
  bool reduced = false;

  bool operator==(const ProductValue&) const = default;
  auto operator<=>(const ProductValue&) const = default;
};

// Abstract input of an operation: one product value per argument.
using InputTuple = std::vector<ProductValue>;

struct InputTupleHash {
  std::size_t operator()(const InputTuple& t) const;
};

// Component domains of one argument.
using ArgSig = std::vector<DomainPtr>;

std::string format_product(const ArgSig& sig, const ProductValue& p);
std::string format_input(const std::vector<ArgSig>& sigs, const InputTuple& in);
// Parses "<a, b>" (or a bare value for single-component arguments).
std::optional<ProductValue> parse_product(const ArgSig& sig, std::string_view text);
// Parses comma/space separated products for every argument.
std::optional<InputTuple> parse_input(const std::vector<ArgSig>& sigs, std::string_view text);

bool is_bottom(const ArgSig& sig, const ProductValue& p);

// Intersection of the component concretizations, in the driver component's
// enumeration order.
std::vector<ConcreteValue> gamma_product(const ArgSig& sig, const ProductValue& p, const Universe& u);

// sigma: every component replaced by alpha_i of the common concretization.
ProductValue reduce_sigma(const ArgSig& sig, const ProductValue& p, const Universe& u);

// Enumerates f over the cartesian product of the argument sets; the callback
// returns false to stop early. Indeterminate integer results are skipped.
void for_each_image(OpName op, const std::vector<std::vector<ConcreteValue>>& args,
                    const std::function<bool(const ConcreteValue&)>& fn);

// alpha_out({ f(c) | c in gamma(in) }).
AbstractValue ideal_transformer(OpName op, const Domain& out, const std::vector<ArgSig>& sigs,
                                const InputTuple& in, const Universe& u);

// alpha_out({ f(c) | c_i in gamma(in_i[j]) }) where product arguments contribute
// only component j and single-component (auxiliary) arguments contribute
// their value.
AbstractValue per_domain_transformer(OpName op, const Domain& out, const std::vector<ArgSig>& sigs,
                                     const InputTuple& in, std::size_t j, const Universe& u);

// Direct-product component k: component k of every product argument when the
// output product mirrors the inputs, otherwise the meet over every input
// component.
AbstractValue direct_component(OpName op, const std::vector<DomainPtr>& outs, std::size_t k,
                               const std::vector<ArgSig>& sigs, const InputTuple& in, const Universe& u);

}  // namespace redsynth
