#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "redsynth/domains.hpp"
#include "redsynth/dsl.hpp"

namespace redsynth {

// Search and verification bounds.
struct Budget {
  std::int64_t grid_bound = 16;  // interval grid limits range over [-grid_bound, grid_bound]
  int max_size = 12;             // node cap for candidate expressions (per limit for intervals)
  int depth = 3;                 // recursive-production unrolling cap
  int string_singleton_len = 3;  // singleton string sets on the grid use strings this long
  int string_pair_len = 1;       // two-element sets use strings this long
  int index_bound = 3;           // flat index arguments range over 0..index_bound
  double deadline_seconds = 0;   // per-check wall-clock limit, 0 = none
};

enum class Policy : std::uint8_t { Alternate, Random };

// What a precision witness has to tighten. Component: the component's own
// output. Product: the intersection of all component outputs (weaker; a
// component that is precise per component is precise for the product too).
enum class PrecisionScope : std::uint8_t { Component, Product };

struct EngineSettings {
  Policy policy = Policy::Alternate;
  std::uint64_t seed = 1;
  int fair_window = 4;  // random policy: a check kind never waits longer than this
  int inner_cap = 10000;
  int outer_cap = 100;
  int drop_cap = 50;  // total negatives a component may drop
  bool check_invariants = false;
  bool strict_witness = false;  // precision witnesses come from sound candidates only
  PrecisionScope precision = PrecisionScope::Component;
  int workers = 1;
};

struct BootstrapSpec {
  std::string input;      // abstract input text
  std::string output;     // concrete value text
  std::string component;  // empty: positive example; else negative for this output component
};

// Everything a configuration file describes.
struct ProblemSpec {
  std::string op;
  std::vector<std::string> components;  // product component domains of every operand
  std::vector<std::string> outputs;     // output components (default: components)
  std::vector<std::string> aux;         // trailing single-domain operands
  UniverseConfig universe;
  Budget budget;
  EngineSettings engine;
  std::map<std::string, std::string> grammars;  // output domain name -> BNF
  std::map<std::string, std::string> goldens;   // output domain name -> expression
  std::vector<BootstrapSpec> bootstrap;
  std::vector<FiniteDomainSpec> custom;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a check exceeds the configured deadline.
class DeadlineExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Deadline {
 public:
  explicit Deadline(double seconds = 0);
  void check() const;  // throws DeadlineExceeded once expired

 private:
  bool armed_ = false;
  std::chrono::steady_clock::time_point end_;
};

// A concrete output at an abstract input (point index); negatives may be hard
// (never dropped by max-synthesis).
struct Example {
  std::uint32_t point = 0;
  ConcreteValue out{ExtInt(0)};
  bool hard = false;

  bool operator==(const Example& o) const { return point == o.point && out == o.out; }
};

// A fully resolved synthesis problem: domains, schema, grammars, the
// verification grid and per-point caches of ideal and direct outputs.
class Problem {
 public:
  explicit Problem(ProblemSpec spec);

  const ProblemSpec& spec() const { return spec_; }
  OpName op() const { return op_; }
  const Universe& universe() const { return *universe_; }
  const OpSchema& schema() const { return schema_; }
  std::size_t width() const { return schema_.outs.size(); }
  const Domain& out(std::size_t k) const { return *schema_.outs.at(k); }
  const Grammar& grammar(std::size_t k) const { return grammars_.at(k); }
  const ExprPtr& golden(std::size_t k) const { return goldens_.at(k); }  // may be null
  // Every component of every operand is an interval domain.
  bool integer_problem() const { return integer_; }
  std::string fingerprint() const;

  // Points: the verification grid first, then off-grid bootstrap inputs.
  std::size_t grid_size() const { return grid_size_; }
  std::size_t num_points() const { return points_.size(); }
  const InputTuple& point(std::uint32_t p) const { return points_.at(p); }
  std::optional<std::uint32_t> find(const InputTuple& in) const;
  std::string format_point(std::uint32_t p) const;
  // The sigma-reduced grid values of one operand under another budget (used
  // to compare transformers beyond the synthesis grid).
  std::vector<ProductValue> operand_grid(std::size_t arg, const Budget& b) const;
  // Parses and sigma-reduces an abstract input.
  std::optional<InputTuple> parse_point(std::string_view text) const;
  InputTuple reduce(const InputTuple& in) const;

  const std::vector<Example>& bootstrap_positive() const { return boot_pos_; }
  const std::vector<std::vector<Example>>& bootstrap_negative() const { return boot_neg_; }

  const AbstractValue& ideal(std::uint32_t p, std::size_t k) const;
  const AbstractValue& direct(std::uint32_t p, std::size_t k) const;
  const AbstractValue& fallback(std::uint32_t p, std::size_t k, std::size_t j) const;
  // Fills the ideal and direct caches for every point (in parallel when the
  // engine settings allow several workers).
  void warm_caches() const;

  EvalContext context(std::uint32_t p, std::size_t k) const;
  std::optional<AbstractValue> eval(const Expr& e, std::uint32_t p, std::size_t k) const;
  std::vector<std::optional<AbstractValue>> eval_all(const Expr& e, std::size_t k) const;
  // Direct-product transformer applied without reduction.
  std::vector<AbstractValue> apply_direct(const InputTuple& in) const;
  std::vector<AbstractValue> apply_ideal(const InputTuple& in) const;
  // A transformer tuple evaluated at an arbitrary (not necessarily grid) input.
  std::vector<std::optional<AbstractValue>> apply_tuple(const std::vector<ExprPtr>& tuple,
                                                        const InputTuple& in) const;

  // c is f(x) for some x in gamma(point p).
  bool in_image(std::uint32_t p, const ConcreteValue& c) const;
  // The first image element outside gamma(out); with no output (invalid) the
  // first image element.
  std::optional<ConcreteValue> image_outside(std::uint32_t p, std::size_t k,
                                             const std::optional<AbstractValue>& out) const;
  // Not in gamma of the direct-product output: cannot be a positive example.
  bool surely_negative(std::uint32_t p, std::size_t k, const ConcreteValue& c) const;

 private:
  using Gamma = std::shared_ptr<const std::vector<ConcreteValue>>;

  void build_grid();
  std::vector<ProductValue> operand_candidates(const ArgSig& sig, const Budget& b) const;
  std::uint32_t intern(InputTuple in);
  void load_bootstrap();
  Gamma arg_gamma(const ArgSig& sig, const ProductValue& v) const;
  std::vector<std::vector<ConcreteValue>> arg_gammas(const InputTuple& in) const;
  // Sorted image when small enough to keep, else null.
  Gamma image(std::uint32_t p) const;
  void compute_ideal(std::uint32_t p) const;

  ProblemSpec spec_;
  OpName op_;
  std::unique_ptr<Universe> universe_;
  OpSchema schema_;
  std::vector<Grammar> grammars_;
  std::vector<ExprPtr> goldens_;
  bool integer_ = false;

  std::vector<InputTuple> points_;
  std::unordered_map<InputTuple, std::uint32_t, InputTupleHash> index_;
  std::size_t grid_size_ = 0;
  std::vector<Example> boot_pos_;
  std::vector<std::vector<Example>> boot_neg_;

  mutable std::mutex mu_;
  mutable std::vector<std::vector<std::optional<AbstractValue>>> ideal_, direct_;
  mutable std::map<std::tuple<std::uint32_t, std::size_t, std::size_t>, AbstractValue> fallback_;
  mutable std::map<std::pair<const ArgSig*, ProductValue>, Gamma> gammas_;
  mutable std::vector<std::optional<Gamma>> images_;
  mutable std::map<std::pair<std::uint32_t, ConcreteValue>, bool> membership_;
};

}  // namespace redsynth
