// Example-driven synthesis, max-synthesis, the check scheduler and the
// counterexample-guided engine.

#include <gtest/gtest.h>

#include <sstream>

#include "redsynth/artifact.hpp"
#include "redsynth/engine.hpp"
#include "support.hpp"

namespace redsynth {
namespace {

using testing::C;
using testing::point_of;

TEST(Synthesize, PositiveExampleIsIncluded) {
  Problem pb(testing::bundled("odd_even_inc_bootstrap"));
  const Example& boot = pb.bootstrap_positive().at(0);
  for (std::size_t k = 0; k < pb.width(); ++k) {
    auto space = make_space(pb, k);
    ExampleSet ex;
    ex.pos.push_back(boot);
    ExprPtr e = space->synthesize(ex, Deadline());
    ASSERT_TRUE(e) << k;
    auto out = pb.eval(*e, boot.point, k);
    ASSERT_TRUE(out);
    EXPECT_TRUE(pb.out(k).contains(*out, C(30))) << pb.out(k).format(*out);
  }
}

TEST(Synthesize, ContradictoryExamplesHaveNoSolution) {
  Problem pb(testing::bundled("maxsynth_zero"));
  auto space = make_space(pb, 0);
  auto p = point_of(pb, "[0,0]");
  ExampleSet ex;
  ex.pos.push_back(Example{p, C(0)});
  ex.neg.push_back(Example{p, C(0)});
  EXPECT_FALSE(space->synthesize(ex, Deadline()));
}

// The constant-zero function against candidates [0,i] and [-i,0]: the
// positive 0 is always included, and no candidate excludes both 1 and -1,
// so max-synthesis must drop exactly one negative.
TEST(MaxSynth, DropsExactlyOneNegative) {
  Problem pb(testing::bundled("maxsynth_zero"));
  auto space = make_space(pb, 0);
  auto p = point_of(pb, "[0,0]");
  ExampleSet ex;
  ex.pos.push_back(Example{p, C(0)});
  ex.neg.push_back(Example{p, C(1)});
  ex.neg.push_back(Example{p, C(-1)});
  EXPECT_FALSE(space->synthesize(ex, Deadline()));
  auto r = space->max_synth(ex, Deadline());
  ASSERT_TRUE(r);
  ASSERT_EQ(r->dropped.size(), 1u);
  auto out = pb.eval(*r->expr, p, 0);
  ASSERT_TRUE(out);
  const std::string s = pb.out(0).format(*out);
  EXPECT_TRUE(s == "[-1,0]" || s == "[0,1]") << s;
  // The kept negative is excluded, the dropped one admitted.
  const Example& kept = ex.neg[1 - r->dropped[0]];
  EXPECT_FALSE(pb.out(0).contains(*out, kept.out));
}

TEST(MaxSynth, HardNegativesAreNeverDropped) {
  Problem pb(testing::bundled("maxsynth_zero"));
  auto space = make_space(pb, 0);
  auto p = point_of(pb, "[0,0]");
  ExampleSet ex;
  ex.pos.push_back(Example{p, C(0)});
  ex.neg.push_back(Example{p, C(1), true});
  ex.neg.push_back(Example{p, C(-1)});
  auto r = space->max_synth(ex, Deadline());
  ASSERT_TRUE(r);
  ASSERT_EQ(r->dropped, std::vector<std::size_t>{1});
  EXPECT_EQ(pb.out(0).format(*pb.eval(*r->expr, p, 0)), "[-1,0]");
  // Both hard: unsatisfiable.
  ex.neg[1].hard = true;
  EXPECT_FALSE(space->max_synth(ex, Deadline()));
}

TEST(Scheduler, AlternateInterleaves) {
  Scheduler s(Policy::Alternate, 1, 4);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(s.next(i), i % 2 == 0 ? Check::Soundness : Check::Precision);
}

TEST(Scheduler, RandomIsSeededAndFair) {
  for (int window : {1, 2, 4}) {
    Scheduler a(Policy::Random, 7, window), b(Policy::Random, 7, window);
    int run = 0;
    Check last = Check::Precision;
    bool saw[2] = {false, false};
    for (std::size_t i = 0; i < 2000; ++i) {
      Check c = a.next(i);
      EXPECT_EQ(c, b.next(i));
      saw[static_cast<int>(c)] = true;
      run = c == last ? run + 1 : 1;
      last = c;
      // A check kind is skipped at most `window` times in a row.
      EXPECT_LE(run, window);
    }
    EXPECT_TRUE(saw[0] && saw[1]);
  }
}

std::vector<ExprPtr> goldens(const Problem& pb) {
  std::vector<ExprPtr> t;
  for (std::size_t k = 0; k < pb.width(); ++k) t.push_back(pb.golden(k));
  return t;
}

TEST(Engine, IncWithInvariantChecks) {
  ProblemSpec spec = testing::bundled("odd_even_inc");
  spec.engine.check_invariants = true;
  Problem pb(spec);
  Engine engine(pb);
  EngineReport rep = engine.run();
  ASSERT_EQ(rep.status, EngineStatus::Ok) << rep.message;
  EXPECT_GT(rep.invariant_checks, 0u);
  EXPECT_GT(rep.soundness_checks, 0u);
  EXPECT_GT(rep.precision_checks, 0u);
  auto v = validate_final(pb, rep.tuple);
  EXPECT_TRUE(v.all_sound());
  EXPECT_TRUE(v.all_precise());
  ASSERT_TRUE(v.golden_gamma_equal);
  EXPECT_TRUE(*v.golden_gamma_equal);
  // Every recorded positive is genuine.
  for (const auto& e : rep.positives) EXPECT_TRUE(check_pos(pb, e));
}

TEST(Engine, BootstrapPositiveSurvives) {
  Problem pb(testing::bundled("odd_even_inc_bootstrap"));
  EngineReport rep = Engine(pb).run();
  ASSERT_EQ(rep.status, EngineStatus::Ok) << rep.message;
  const Example& boot = pb.bootstrap_positive().at(0);
  for (std::size_t k = 0; k < pb.width(); ++k) {
    auto out = pb.eval(*rep.tuple[k], boot.point, k);
    ASSERT_TRUE(out);
    EXPECT_TRUE(pb.out(k).contains(*out, C(30)));
  }
  EXPECT_TRUE(validate_final(pb, rep.tuple).all_precise());
}

TEST(Engine, RandomPolicyAlsoConverges) {
  ProblemSpec spec = testing::bundled("safe_tolower");
  spec.engine.policy = Policy::Random;
  spec.engine.seed = 11;
  Problem pb(spec);
  EngineReport rep = Engine(pb).run();
  ASSERT_EQ(rep.status, EngineStatus::Ok) << rep.message;
  auto v = validate_final(pb, rep.tuple);
  EXPECT_TRUE(v.all_sound() && v.all_precise());
}

TEST(Engine, DeterministicArtifactAndLog) {
  auto once = [] {
    Problem pb(testing::bundled("odd_even_inc"));
    std::ostringstream log;
    EngineReport rep = Engine(pb, &log).run();
    EXPECT_EQ(rep.status, EngineStatus::Ok);
    return std::pair{write_artifact(make_artifact(pb, rep)), log.str()};
  };
  auto a = once(), b = once();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_FALSE(a.second.empty());
  // One JSON object per line.
  std::istringstream lines(a.second);
  for (std::string line; std::getline(lines, line);) {
    ASSERT_FALSE(line.empty());
    EXPECT_EQ(line.front(), '{');
    EXPECT_EQ(line.back(), '}');
  }
}

}  // namespace
}  // namespace redsynth
