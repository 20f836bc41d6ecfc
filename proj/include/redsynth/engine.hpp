#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "redsynth/verification.hpp"

namespace redsynth {

enum class EngineStatus : std::uint8_t { Ok, Fail, NonTermination, Indeterminate };
std::string_view status_name(EngineStatus s);

// A flag invariant failed while another component was being worked on: a
// component other than the current one is unsound, or a component flagged
// precise has a precision witness (only with check_invariants on).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PhaseTimes {
  double setup = 0, synthesize = 0, max_synth = 0, soundness = 0, precision = 0;
};

struct EngineReport {
  EngineStatus status = EngineStatus::Ok;
  std::string message;
  std::vector<ExprPtr> tuple;
  std::vector<std::string> origin;  // per component: "synthesized" or "direct"
  std::vector<Example> positives;
  std::vector<std::vector<Example>> negatives;
  std::vector<std::size_t> dropped;  // per component, total negatives dropped
  std::vector<std::string> history;  // one line per counterexample
  std::size_t iterations = 0, outer_sweeps = 0;
  std::size_t soundness_checks = 0, precision_checks = 0, invariant_checks = 0;
  PhaseTimes times;
};

enum class Check : std::uint8_t { Soundness, Precision };

// Chooses the check of each inner iteration. Alternate: soundness on even
// iterations, precision on odd ones. Random: seeded coin flips, except that
// neither check is skipped more than `window` times in a row.
class Scheduler {
 public:
  Scheduler(Policy p, std::uint64_t seed, int window);
  // `iteration` counts from zero within one inner loop.
  Check next(std::size_t iteration);

 private:
  Policy policy_;
  std::mt19937_64 rng_;
  int window_;
  Check last_ = Check::Precision;
  int run_ = 0;
};

// The dual counterexample-guided loop: starts from the direct product and
// alternates synthesis with soundness and 1-precision checks per component
// until every component is both, sharing positives and keeping negatives
// private. `events` (optional) receives one JSON object per line.
class Engine {
 public:
  Engine(const Problem& pb, std::ostream* events = nullptr);
  EngineReport run();

 private:
  void emit(const std::string& line);
  void check_flag_invariants(std::size_t k, const std::vector<ExprPtr>& tuple, const TupleOutputs& cur,
              const std::vector<bool>& precise, const std::vector<ExampleSet>& sets, EngineReport& rep);

  const Problem& pb_;
  std::ostream* events_;
  std::vector<std::unique_ptr<CandidateSpace>> spaces_;
};

}  // namespace redsynth
