#pragma once

#include <optional>
#include <string>
#include <vector>

#include "redsynth/space.hpp"

namespace redsynth {

struct SoundnessResult {
  bool sound = true;
  std::optional<Example> witness;  // image element the component misses
};

// Bounded-exhaustive soundness of component k: at every grid point (in grid
// order) the output must be valid and contain the whole concrete image.
SoundnessResult check_soundness(const Problem& pb, std::size_t k, const std::vector<std::optional<AbstractValue>>& outs,
                                const Deadline& dl = Deadline());
SoundnessResult check_soundness(const Problem& pb, std::size_t k, const Expr& e, const Deadline& dl = Deadline());

struct PrecisionResult {
  bool precise = true;
  std::optional<Witness> witness;
};

// The outputs a precision check of component k measures against: all of
// them for the product scope, only component k's for the component scope
// (the others become unconstrained).
TupleOutputs precision_view(const TupleOutputs& cur, std::size_t k, PrecisionScope scope);

// One-step precision of component k under the examples: is there a candidate
// consistent with them that excludes a further value of the current reduced
// output that the ideal output also excludes?
PrecisionResult check_precision_1(CandidateSpace& space, const ExampleSet& ex, const TupleOutputs& cur, bool strict,
                                  const Deadline& dl = Deadline());

// check_pos: the example is a genuine input/output pair of the operation.
bool check_pos(const Problem& pb, const Example& e);

struct ComponentVerdict {
  std::string name;
  bool sound = true;
  std::optional<Example> unsound_at;
  bool precise = true;
  std::optional<Witness> better;  // sound candidate that tightens the reduced output
  // Grid points where the component differs from the ideal output.
  std::size_t ideal_gap = 0;
  std::optional<bool> matches_golden;
  std::optional<std::uint32_t> golden_mismatch_at;
};

struct ValidationReport {
  std::vector<ComponentVerdict> components;
  // With a golden for every component: the tuple and the goldens denote the
  // same concrete sets (intersection over the components) at every point.
  std::optional<bool> golden_gamma_equal;
  std::optional<std::uint32_t> golden_gamma_mismatch_at;
  bool all_sound() const;
  bool all_precise() const;
};

// Independent final validation of a transformer tuple: soundness by
// re-enumeration, 1-precision as "no sound candidate is comparable and
// strictly better", plus agreement with the ideal and golden outputs.
ValidationReport validate_final(const Problem& pb, const std::vector<ExprPtr>& tuple, const Deadline& dl = Deadline());

// Concretization of output products, with integers ranging over the output
// universe rather than the input bound.
class OutputGamma {
 public:
  explicit OutputGamma(const Problem& pb);
  // Sorted concrete set of a product output; nullopt when a component is invalid.
  std::optional<std::vector<ConcreteValue>> gamma(const std::vector<std::optional<AbstractValue>>& v) const;
  bool equal(const std::vector<std::optional<AbstractValue>>& a, const std::vector<std::optional<AbstractValue>>& b) const;

 private:
  const Problem& pb_;
  Universe wide_;
};

// Product-level gamma equality of two transformer tuples over the grid
// obtained from `budget` (not necessarily the synthesis grid); returns the
// first input where they differ, formatted.
std::optional<std::string> compare_on_grid(const Problem& pb, const std::vector<ExprPtr>& a,
                                           const std::vector<ExprPtr>& b, const Budget& budget);

}  // namespace redsynth
