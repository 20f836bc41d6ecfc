#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "redsynth/problem.hpp"

namespace redsynth {

// Examples visible to one component: the shared positives and its private
// negatives (hard ones may not be dropped).
struct ExampleSet {
  std::vector<Example> pos;
  std::vector<Example> neg;
};

// Output of every component of the current tuple at every point; nullopt
// marks an invalid output (treated as top when intersecting).
using TupleOutputs = std::vector<std::vector<std::optional<AbstractValue>>>;

struct Witness {
  ExprPtr h;                    // the candidate that beats the current component
  std::uint32_t point = 0;      // grid point
  ConcreteValue value{ExtInt(0)};
};

struct MaxSynthResult {
  ExprPtr expr;
  std::vector<std::size_t> dropped;  // indices into the negative list
};

// The candidate transformers of one output component, with the queries the
// engine needs. Candidates are visited in a fixed order: total size, then
// enumeration order; "first" always refers to it.
class CandidateSpace {
 public:
  virtual ~CandidateSpace() = default;
  virtual std::string kind() const = 0;
  virtual std::size_t candidate_count() const = 0;

  // First candidate including every positive and excluding every negative.
  virtual ExprPtr synthesize(const ExampleSet& ex, const Deadline& dl) = 0;
  // Candidate including every positive and excluding every hard negative
  // that excludes the most soft negatives (then smallest, then first);
  // nullopt when the hard constraints cannot be met.
  virtual std::optional<MaxSynthResult> max_synth(const ExampleSet& ex, const Deadline& dl) = 0;
  // First candidate consistent with `ex` that excludes some (g, c) with c in
  // the current reduced output at g but outside the ideal output; with
  // `strict` only sound candidates qualify.
  virtual std::optional<Witness> improving(const ExampleSet& ex, const TupleOutputs& cur, bool strict,
                                           const Deadline& dl) = 0;
  // A sound candidate whose reduced output is contained in the current one
  // everywhere and strictly smaller somewhere (independent re-validation).
  virtual std::optional<Witness> better_sound(const TupleOutputs& cur, const Deadline& dl) = 0;
};

// Limit-pair search for interval outputs whose grammar is
// (interval LO HI) over arithmetic nonterminals; nullptr when not applicable.
std::unique_ptr<CandidateSpace> make_limit_space(const Problem& pb, std::size_t k);
// Generic enumeration of the component grammar.
std::unique_ptr<CandidateSpace> make_program_space(const Problem& pb, std::size_t k);
std::unique_ptr<CandidateSpace> make_space(const Problem& pb, std::size_t k);

// Example satisfaction for one output value (nullopt = invalid output).
bool satisfies_positive(const Domain& d, const std::optional<AbstractValue>& v, const ConcreteValue& c);
bool satisfies_negative(const Domain& d, const std::optional<AbstractValue>& v, const ConcreteValue& c);

}  // namespace redsynth
