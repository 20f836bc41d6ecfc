#include "redsynth/engine.hpp"

#include <chrono>
#include <ostream>

#include "json.hpp"

namespace redsynth {

using Json = nlohmann::ordered_json;

std::string_view status_name(EngineStatus s) {
  switch (s) {
    case EngineStatus::Ok: return "ok";
    case EngineStatus::Fail: return "fail";
    case EngineStatus::NonTermination: return "non-termination";
    case EngineStatus::Indeterminate: return "indeterminate";
  }
  return "?";
}

Scheduler::Scheduler(Policy p, std::uint64_t seed, int window) : policy_(p), rng_(seed), window_(std::max(1, window)) {}

Check Scheduler::next(std::size_t iteration) {
  if (policy_ == Policy::Alternate) return iteration % 2 == 0 ? Check::Soundness : Check::Precision;
  Check c = (rng_() >> 63) ? Check::Precision : Check::Soundness;
  if (c == last_ && run_ >= window_) c = c == Check::Soundness ? Check::Precision : Check::Soundness;
  run_ = c == last_ ? run_ + 1 : 1;
  last_ = c;
  return c;
}

namespace {

class Stopwatch {
 public:
  explicit Stopwatch(double& acc) : acc_(acc), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() { acc_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  double& acc_;
  std::chrono::steady_clock::time_point start_;
};

struct Stop {
  EngineStatus status;
  std::string message;
};

}  // namespace

Engine::Engine(const Problem& pb, std::ostream* events) : pb_(pb), events_(events) {}

void Engine::emit(const std::string& line) {
  if (events_) *events_ << line << '\n';
}

void Engine::check_flag_invariants(std::size_t k, const std::vector<ExprPtr>& tuple, const TupleOutputs& cur,
                    const std::vector<bool>& precise, const std::vector<ExampleSet>& sets, EngineReport& rep) {
  ++rep.invariant_checks;
  for (std::size_t j = 0; j < pb_.width(); ++j) {
    if (j == k) continue;
    if (!check_soundness(pb_, j, cur[j]).sound)
      throw InvariantViolation("component " + pb_.out(j).name() + " is unsound while working on " +
                               pb_.out(k).name() + ": " + print_expr(*tuple[j]));
  }
  for (std::size_t j = 0; j < pb_.width(); ++j) {
    if (!precise[j]) continue;
    auto r = check_precision_1(*spaces_[j], sets[j], precision_view(cur, j, pb_.spec().engine.precision),
                               pb_.spec().engine.strict_witness);
    if (!r.precise)
      throw InvariantViolation("component " + pb_.out(j).name() + " is flagged precise but " +
                               print_expr(*r.witness->h) + " excludes " + format_concrete(r.witness->value) + " at " +
                               pb_.format_point(r.witness->point));
  }
}

EngineReport Engine::run() {
  EngineReport rep;
  const auto& cfg = pb_.spec().engine;
  const std::size_t n = pb_.width();
  {
    Stopwatch sw(rep.times.setup);
    pb_.warm_caches();
    spaces_.clear();
    for (std::size_t k = 0; k < n; ++k) spaces_.push_back(make_space(pb_, k));
  }

  std::vector<ExprPtr> tuple(n, std::make_shared<const Expr>(Expr{NodeKind::Direct, 0, true, {}, {}, {}, {}}));
  rep.origin.assign(n, "direct");
  rep.dropped.assign(n, 0);
  TupleOutputs cur;
  for (std::size_t k = 0; k < n; ++k) cur.push_back(pb_.eval_all(*tuple[k], k));
  std::vector<bool> sound(n, true), precise(n, false);
  std::vector<Example> pos = pb_.bootstrap_positive();
  std::vector<std::vector<Example>> neg = pb_.bootstrap_negative();
  for (std::size_t k = 0; k < n; ++k)
    for (auto& e : neg[k]) e.hard = pb_.surely_negative(e.point, k, e.out);
  Scheduler sched(cfg.policy, cfg.seed, cfg.fair_window);

  auto name = [&](std::size_t k) { return pb_.out(k).name(); };
  auto example_json = [&](const Example& e) {
    return Json{{"inputs", pb_.format_point(e.point)}, {"output", format_concrete(e.out)}};
  };
  auto flags_event = [&](std::size_t k) {
    emit(Json{{"event", "flags"}, {"component", name(k)}, {"sound", bool(sound[k])}, {"precise", bool(precise[k])}}
             .dump());
  };
  auto set_precise = [&](std::size_t k, bool v) {
    if (precise[k] == v) return false;
    precise[k] = v;
    flags_event(k);
    return true;
  };
  auto set_sound = [&](std::size_t k, bool v) {
    if (sound[k] == v) return;
    sound[k] = v;
    flags_event(k);
  };
  auto sets = [&]() {
    std::vector<ExampleSet> s;
    for (std::size_t k = 0; k < n; ++k) s.push_back(ExampleSet{pos, neg[k]});
    return s;
  };

  try {
    bool changed = true;
    while (changed) {
      if (++rep.outer_sweeps > static_cast<std::size_t>(cfg.outer_cap))
        throw Stop{EngineStatus::NonTermination, "outer loop exceeded " + std::to_string(cfg.outer_cap) + " sweeps"};
      changed = false;
      for (std::size_t k = 0; k < n; ++k) {
        std::size_t inner = 0;
        while (!(sound[k] && precise[k])) {
          if (inner >= static_cast<std::size_t>(cfg.inner_cap))
            throw Stop{EngineStatus::NonTermination,
                       "component " + name(k) + ": inner loop exceeded " + std::to_string(cfg.inner_cap) + " iterations"};
          ++rep.iterations;
          if (cfg.check_invariants) check_flag_invariants(k, tuple, cur, precise, sets(), rep);

          // Synthesize, relaxing the negatives when they cannot all be met.
          ExampleSet ex{pos, neg[k]};
          ExprPtr cand;
          {
            Stopwatch sw(rep.times.synthesize);
            cand = spaces_[k]->synthesize(ex, Deadline(pb_.spec().budget.deadline_seconds));
          }
          if (cand) {
            emit(Json{{"event", "synthesize"}, {"phase", "synthesize"}, {"component", name(k)},
                      {"candidate_size", expr_size(*cand)}, {"dropped", 0}, {"candidate", print_expr(*cand)}}
                     .dump());
          } else {
            std::optional<MaxSynthResult> ms;
            {
              Stopwatch sw(rep.times.max_synth);
              ms = spaces_[k]->max_synth(ex, Deadline(pb_.spec().budget.deadline_seconds));
            }
            if (!ms) {
              emit(Json{{"event", "synthesize"}, {"phase", "max_synth"}, {"component", name(k)},
                        {"candidate_size", nullptr}, {"dropped", nullptr}}
                       .dump());
              throw Stop{EngineStatus::Fail, "component " + name(k) +
                                                 ": no candidate satisfies the positives and surely-negative examples"};
            }
            Json dropped = Json::array();
            std::vector<Example> kept;
            for (std::size_t i = 0, d = 0; i < neg[k].size(); ++i) {
              if (d < ms->dropped.size() && ms->dropped[d] == i) {
                dropped.push_back(example_json(neg[k][i]));
                ++d;
              } else {
                kept.push_back(neg[k][i]);
              }
            }
            neg[k] = std::move(kept);
            rep.dropped[k] += ms->dropped.size();
            cand = ms->expr;
            emit(Json{{"event", "synthesize"}, {"phase", "max_synth"}, {"component", name(k)},
                      {"candidate_size", expr_size(*cand)}, {"dropped", ms->dropped.size()},
                      {"candidate", print_expr(*cand)}}
                     .dump());
            emit(Json{{"event", "drop"}, {"component", name(k)}, {"dropped", dropped}}.dump());
            if (rep.dropped[k] > static_cast<std::size_t>(cfg.drop_cap))
              throw Stop{EngineStatus::NonTermination, "component " + name(k) + ": dropped more than " +
                                                           std::to_string(cfg.drop_cap) + " negatives"};
          }
          if (!(*cand == *tuple[k])) {
            tuple[k] = cand;
            rep.origin[k] = "synthesized";
            cur[k] = pb_.eval_all(*cand, k);
            // Flags describe the current candidate; other components' precision
            // was judged against the previous one.
            set_sound(k, false);
            set_precise(k, false);
            for (std::size_t j = 0; j < n; ++j)
              if (j != k && set_precise(j, false)) changed = true;
          }

          const Check which = sched.next(inner++);
          const Deadline dl(pb_.spec().budget.deadline_seconds);
          if (which == Check::Soundness) {
            ++rep.soundness_checks;
            SoundnessResult r;
            {
              Stopwatch sw(rep.times.soundness);
              r = check_soundness(pb_, k, cur[k], dl);
            }
            set_sound(k, r.sound);
            if (!r.sound) {
              set_precise(k, false);
              const Example& e = *r.witness;
              pos.push_back(e);
              emit(Json{{"event", "counterexample"}, {"check", "soundness"}, {"component", name(k)},
                        {"inputs", pb_.format_point(e.point)}, {"output", format_concrete(e.out)},
                        {"verdict", "positive"}}
                       .dump());
              rep.history.push_back("soundness " + name(k) + " " + pb_.format_point(e.point) + " -> " +
                                    format_concrete(e.out) + " positive");
            } else {
              emit(Json{{"event", "check"}, {"check", "soundness"}, {"component", name(k)}, {"verdict", "sound"}}
                       .dump());
            }
          } else {
            ++rep.precision_checks;
            PrecisionResult r;
            {
              Stopwatch sw(rep.times.precision);
              r = check_precision_1(*spaces_[k], ExampleSet{pos, neg[k]}, precision_view(cur, k, cfg.precision),
                                   cfg.strict_witness, dl);
            }
            if (r.precise) {
              set_precise(k, true);
              emit(Json{{"event", "check"}, {"check", "precision"}, {"component", name(k)}, {"verdict", "precise"}}
                       .dump());
              continue;
            }
            set_precise(k, false);
            set_sound(k, false);
            Example e{r.witness->point, r.witness->value, false};
            std::string verdict;
            if (check_pos(pb_, e)) {
              // A genuine output: it belongs with the positives instead.
              pos.push_back(e);
              verdict = "promoted";
            } else {
              e.hard = pb_.surely_negative(e.point, k, e.out);
              neg[k].push_back(e);
              verdict = e.hard ? "hard-negative" : "negative";
            }
            emit(Json{{"event", "counterexample"}, {"check", "precision"}, {"component", name(k)},
                      {"inputs", pb_.format_point(e.point)}, {"output", format_concrete(e.out)}, {"verdict", verdict},
                      {"witness", print_expr(*r.witness->h)}}
                     .dump());
            rep.history.push_back("precision " + name(k) + " " + pb_.format_point(e.point) + " -> " +
                                  format_concrete(e.out) + " " + verdict);
            for (std::size_t j = 0; j < n; ++j) set_precise(j, false);
            changed = true;
          }
        }
      }
    }
  } catch (const Stop& s) {
    rep.status = s.status;
    rep.message = s.message;
  } catch (const DeadlineExceeded& e) {
    rep.status = EngineStatus::Indeterminate;
    rep.message = e.what();
  }
  rep.tuple = tuple;
  rep.positives = pos;
  rep.negatives = neg;
  Json done{{"event", "done"}, {"status", status_name(rep.status)}, {"iterations", rep.iterations},
            {"outer_sweeps", rep.outer_sweeps}, {"positives", pos.size()}};
  Json negs = Json::object();
  for (std::size_t k = 0; k < n; ++k) negs[name(k)] = neg[k].size();
  done["negatives"] = negs;
  if (!rep.message.empty()) done["message"] = rep.message;
  emit(done.dump());
  return rep;
}

}  // namespace redsynth
