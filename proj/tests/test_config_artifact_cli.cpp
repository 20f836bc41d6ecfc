// Configuration parsing, artifacts and the command-line tool's exit codes.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "redsynth/artifact.hpp"
#include "support.hpp"

namespace redsynth {
namespace {

namespace fs = std::filesystem;

const char* kMinimal = R"(
[operation]
name = inc
[domains]
components = odd even
[grammar.odd]
F ::= (interval E E)
E ::= (field o l) | 1
[grammar.even]
F ::= (interval E E)
E ::= (field e l) | 1
)";

TEST(Config, BundledConfigsLoad) {
  for (const auto& name : testing::bundled_names()) {
    ProblemSpec spec = testing::bundled(name);
    EXPECT_FALSE(spec.op.empty()) << name;
    EXPECT_FALSE(spec.grammars.empty()) << name;
    EXPECT_EQ(spec.goldens.size(), spec.outputs.empty() ? spec.components.size() : spec.outputs.size()) << name;
  }
}

TEST(Config, ParsesEverySection) {
  ProblemSpec s = parse_config(std::string(kMinimal) + R"(
[universe]
int_bound = 5   # trailing comment
int_out_bound = 12
alphabet = "a #b"
[budget]
grid_bound = 3
deadline_seconds = 1.5
[engine]
policy = random
seed = 9
precision = product
check_invariants = yes
[bootstrap]
positive = <[1,1], [0,2]> -> 2
negative.odd = <[1,1], [0,2]> -> -1
)");
  EXPECT_EQ(s.op, "inc");
  EXPECT_EQ(s.components, (std::vector<std::string>{"odd", "even"}));
  EXPECT_EQ(s.universe.int_bound, 5);
  EXPECT_EQ(s.universe.alphabet, "a #b");
  EXPECT_EQ(s.budget.grid_bound, 3);
  EXPECT_DOUBLE_EQ(s.budget.deadline_seconds, 1.5);
  EXPECT_EQ(s.engine.policy, Policy::Random);
  EXPECT_EQ(s.engine.seed, 9u);
  EXPECT_EQ(s.engine.precision, PrecisionScope::Product);
  EXPECT_TRUE(s.engine.check_invariants);
  ASSERT_EQ(s.bootstrap.size(), 2u);
  EXPECT_EQ(s.bootstrap[0].input, "<[1,1], [0,2]>");
  EXPECT_EQ(s.bootstrap[0].output, "2");
  EXPECT_EQ(s.bootstrap[1].component, "odd");
  EXPECT_EQ(s.bootstrap[1].output, "-1");
  Problem pb(s);
  EXPECT_EQ(pb.bootstrap_positive().size(), 1u);
}

TEST(Config, RejectsMalformedInput) {
  const std::string base(kMinimal);
  EXPECT_THROW(parse_config("[domains]\ncomponents = odd\n"), ConfigError);       // no operation
  EXPECT_THROW(parse_config("[operation]\nname = inc\n"), ConfigError);           // no components
  EXPECT_THROW(parse_config(base + "[nonsense]\n"), ConfigError);                 // unknown section
  EXPECT_THROW(parse_config(base + "[budget]\ncolour = red\n"), ConfigError);     // unknown key
  EXPECT_THROW(parse_config(base + "[budget]\nmax_size = 3\nmax_size = 4\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "[budget]\nmax_size = many\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "[engine]\nprecision = total\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "[engine]\npolicy = greedy\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "[bootstrap]\npositive = <[1,1], [0,2]>\n"), ConfigError);
  EXPECT_THROW(parse_config("name = inc\n"), ConfigError);  // outside any section
  try {
    parse_config(base + "[budget]\ncolour = red\n");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line "), std::string::npos);
  }
}

TEST(Config, ProblemRejectsInconsistentSpecs) {
  ProblemSpec s = parse_config(kMinimal);
  s.universe.int_out_bound = 3;  // below 2B+2
  EXPECT_ANY_THROW(Problem{s});
  ProblemSpec t = parse_config(kMinimal);
  t.op = "reverse";
  EXPECT_ANY_THROW(Problem{t});
  ProblemSpec u = parse_config(kMinimal);
  u.grammars["odd"] = "F ::= (interval (field q l) 1)\n";
  Problem pu(u);
  EXPECT_ANY_THROW(make_space(pu, 0));
}

TEST(Artifact, WriteReadRoundTrip) {
  Problem pb(testing::bundled("odd_even_inc"));
  EngineReport rep;
  for (std::size_t k = 0; k < pb.width(); ++k) {
    rep.tuple.push_back(pb.golden(k));
    rep.origin.push_back("synthesized");
    rep.negatives.push_back({Example{0, ConcreteValue(ExtInt(k))}});
    rep.dropped.push_back(k);
  }
  Artifact a = make_artifact(pb, rep);
  std::string text = write_artifact(a);
  Artifact b = read_artifact(text);
  EXPECT_EQ(write_artifact(b), text);
  EXPECT_EQ(b.op, "inc");
  EXPECT_EQ(b.fingerprint, pb.fingerprint());
  ASSERT_EQ(b.tuple.size(), 2u);
  EXPECT_EQ(b.tuple[1].dropped, 1u);
  EXPECT_EQ(b.tuple[0].negatives, 1u);
  auto tuple = bind_artifact(b, pb);
  EXPECT_EQ(*tuple[0], *pb.golden(0));
  EXPECT_NE(render_artifact(b).find("odd"), std::string::npos);
}

TEST(Artifact, FingerprintGuardsTheProblem) {
  Problem inc(testing::bundled("odd_even_inc"));
  Problem wide(testing::bundled("odd_even_inc_bootstrap"));
  EXPECT_NE(inc.fingerprint(), wide.fingerprint());
  // Grammars and engine settings do not change the problem.
  ProblemSpec s = testing::bundled("odd_even_inc");
  s.engine.seed = 99;
  s.grammars["odd"] = "F ::= (interval (field o l) (field o r))\n";
  EXPECT_EQ(Problem(s).fingerprint(), inc.fingerprint());
  Artifact a = direct_artifact(inc);
  EXPECT_THROW(bind_artifact(a, wide), FingerprintMismatch);
  EXPECT_NO_THROW(bind_artifact(a, inc));
}

TEST(Artifact, MalformedTextIsRejected) {
  EXPECT_THROW(read_artifact("(artifact"), ArtifactError);
  EXPECT_THROW(read_artifact("(transformer (op inc))"), ArtifactError);
  EXPECT_THROW(read_artifact("(artifact (op inc) (components odd) (fingerprint \"x\"))"), ArtifactError);
  EXPECT_THROW(read_artifact("(artifact (op inc) (components odd) (fingerprint \"x\") (colour red))"),
               ArtifactError);
  Problem pb(testing::bundled("odd_even_inc"));
  Artifact a = direct_artifact(pb);
  a.tuple.pop_back();
  EXPECT_THROW(bind_artifact(a, pb), ArtifactError);
}

// --- command-line tool ------------------------------------------------------

struct CliRun {
  int code = -1;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("redsynth-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun run(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt";
    const std::string cmd = std::string(REDSYNTH_CLI) + " " + args + " >" + out.string() + " 2>" +
                            (dir_ / "stderr.txt").string();
    int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream f(out);
    std::ostringstream ss;
    ss << f.rdbuf();
    r.out = ss.str();
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string config(const std::string& name) { return testing::config_path(name); }

  fs::path dir_;
};

TEST_F(Cli, SynthVerifyApply) {
  const std::string art = path("inc.sexpr");
  CliRun s = run("synth --config " + config("odd_even_inc") + " --out " + art + " --log " + path("inc.jsonl"));
  ASSERT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("(artifact"), std::string::npos);
  ASSERT_TRUE(fs::exists(art));
  EXPECT_TRUE(fs::exists(path("inc.jsonl")));

  CliRun v = run("verify " + art + " --config " + config("odd_even_inc"));
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("odd: sound, 1-precise"), std::string::npos) << v.out;
  EXPECT_NE(v.out.find("golden: gamma-equal on the grid"), std::string::npos) << v.out;

  CliRun a = run("apply " + art + " --config " + config("odd_even_inc") + " --input '<[1,5], [2,6]>' --repeat 3");
  EXPECT_EQ(a.code, 0);
  EXPECT_NE(a.out.find("3: <[5,9], [4,8]>  |gamma| = 4"), std::string::npos) << a.out;
  CliRun d = run("apply " + art + " --config " + config("odd_even_inc") +
              " --input '<[1,5], [2,6]>' --repeat 3 --mode direct");
  EXPECT_EQ(d.code, 0);
  EXPECT_NE(d.out.find("3: <[1,11], [2,12]>"), std::string::npos) << d.out;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("synth").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("synth --config " + path("missing.conf")).code, 2);
  {
    std::ofstream bad(path("bad.conf"));
    bad << "[operation]\nname = inc\n[bogus]\n";
  }
  EXPECT_EQ(run("synth --config " + path("bad.conf")).code, 2);
  // The max-synthesis fixture's tiny space cannot express abs soundly.
  EXPECT_EQ(run("synth --config " + config("maxsynth_zero")).code, 3);

  // An artifact bound to a different problem.
  const std::string art = path("inc.sexpr");
  {
    Problem pb(testing::bundled("odd_even_inc"));
    std::ofstream f(art);
    f << write_artifact(direct_artifact(pb));
  }
  EXPECT_EQ(run("verify " + art + " --config " + config("odd_even_inc_bootstrap")).code, 7);
  EXPECT_EQ(run("verify " + path("none.sexpr") + " --config " + config("odd_even_inc")).code, 8);
  {
    std::ofstream f(path("junk.sexpr"));
    f << "(artifact";
  }
  EXPECT_EQ(run("verify " + path("junk.sexpr") + " --config " + config("odd_even_inc")).code, 8);

  // A sound but imprecise artifact verifies with a warning; an unsound one fails.
  EXPECT_EQ(run("verify " + art + " --config " + config("odd_even_inc")).code, 0);
  {
    Problem pb(testing::bundled("odd_even_inc"));
    Artifact a = direct_artifact(pb);
    a.tuple[0].expr = parse_expr("(interval (field o l) (field o r))");
    std::ofstream f(path("unsound.sexpr"));
    f << write_artifact(a);
  }
  EXPECT_EQ(run("verify " + path("unsound.sexpr") + " --config " + config("odd_even_inc")).code, 6);
}

TEST_F(Cli, OracleTable) {
  CliRun r = run("oracle --config " + config("odd_even_inc") + " --input '<[5,5], [4,6]>'");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("<[5,5], [4,6]> -> <[5,7], [6,6]>"), std::string::npos) << r.out;
  CliRun csv = run("oracle --config " + config("odd_even_inc") + " --component even --csv " + path("t.csv"));
  EXPECT_EQ(csv.code, 0);
  std::ifstream f(path("t.csv"));
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "input,even");
}

}  // namespace
}  // namespace redsynth
