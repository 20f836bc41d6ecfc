// Command-line front end: synth, verify, apply and oracle.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "redsynth/artifact.hpp"
#include "redsynth/config.hpp"

using namespace redsynth;

namespace {

// Stable exit codes (documented in the README).
enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kFail = 3,
  kNonTermination = 4,
  kIndeterminate = 5,
  kUnsound = 6,
  kFingerprint = 7,
  kIo = 8,
  kInvariant = 9,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<int> max_size;
  std::optional<std::int64_t> bound;
  std::optional<int> workers;
  bool strict_witness = false;
};

ProblemSpec load(const std::string& path, const Overrides& o) {
  ProblemSpec spec = load_config(path);
  if (o.seed) spec.engine.seed = *o.seed;
  if (o.policy) spec.engine.policy = *o.policy == "random" ? Policy::Random : Policy::Alternate;
  if (o.max_size) spec.budget.max_size = *o.max_size;
  if (o.bound) {
    if (*o.bound < 0 || *o.bound > spec.universe.int_bound)
      throw UsageError("--bound must lie in [0, " + std::to_string(spec.universe.int_bound) + "]");
    spec.budget.grid_bound = *o.bound;
  }
  if (o.workers) spec.engine.workers = *o.workers;
  if (o.strict_witness) spec.engine.strict_witness = true;
  return spec;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << text) || !f.flush()) throw IoError("cannot write " + path);
}

int exit_for(EngineStatus s) {
  switch (s) {
    case EngineStatus::Ok: return kOk;
    case EngineStatus::Fail: return kFail;
    case EngineStatus::NonTermination: return kNonTermination;
    case EngineStatus::Indeterminate: return kIndeterminate;
  }
  return kFail;
}

std::string format_outputs(const Problem& pb, const std::vector<std::optional<AbstractValue>>& v) {
  std::string out = pb.width() > 1 ? "<" : "";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ", ";
    out += v[k] ? pb.out(k).format(*v[k]) : "invalid";
  }
  return out + (pb.width() > 1 ? ">" : "");
}

int cmd_synth(const std::string& config, const std::string& out, const std::string& log, const std::string& emit,
              const Overrides& o) {
  Problem pb(load(config, o));
  std::ofstream events;
  if (!log.empty()) {
    events.open(log, std::ios::binary | std::ios::trunc);
    if (!events) throw IoError("cannot write " + log);
  }
  Engine engine(pb, log.empty() ? nullptr : &events);
  EngineReport rep = engine.run();
  if (!log.empty() && !events.flush()) throw IoError("cannot write " + log);

  std::fprintf(stderr, "status: %s (%zu iterations, %zu sweeps, %zu soundness / %zu precision checks)\n",
               std::string(status_name(rep.status)).c_str(), rep.iterations, rep.outer_sweeps, rep.soundness_checks,
               rep.precision_checks);
  if (!rep.message.empty()) std::fprintf(stderr, "%s\n", rep.message.c_str());
  std::fprintf(stderr, "time: setup %.2fs, synthesize %.2fs, max-synth %.2fs, soundness %.2fs, precision %.2fs\n",
               rep.times.setup, rep.times.synthesize, rep.times.max_synth, rep.times.soundness, rep.times.precision);
  if (rep.status != EngineStatus::Ok) return exit_for(rep.status);

  const Artifact a = make_artifact(pb, rep);
  const std::string text = write_artifact(a);
  if (!out.empty()) write_file(out, text);
  std::cout << (emit == "pseudo" ? render_artifact(a) : text);
  return kOk;
}

int cmd_verify(const std::string& artifact, const std::string& config, const Overrides& o) {
  Problem pb(load(config, o));
  const Artifact a = read_artifact(read_file(artifact));
  const auto tuple = bind_artifact(a, pb);
  const ValidationReport rep = validate_final(pb, tuple, Deadline(pb.spec().budget.deadline_seconds));
  std::cout << "grid points: " << pb.grid_size() << "\n";
  for (const auto& c : rep.components) {
    std::cout << c.name << ": " << (c.sound ? "sound" : "UNSOUND");
    if (c.unsound_at)
      std::cout << " (misses " << format_concrete(c.unsound_at->out) << " at " << pb.format_point(c.unsound_at->point)
                << ")";
    std::cout << ", " << (c.precise ? "1-precise" : "not 1-precise");
    if (c.better)
      std::cout << " (" << print_expr(*c.better->h) << " excludes " << format_concrete(c.better->value) << " at "
                << pb.format_point(c.better->point) << ")";
    std::cout << ", ideal gap " << c.ideal_gap << "/" << pb.grid_size();
    if (c.matches_golden) std::cout << ", golden " << (*c.matches_golden ? "match" : "MISMATCH");
    if (c.golden_mismatch_at) std::cout << " at " << pb.format_point(*c.golden_mismatch_at);
    std::cout << "\n";
  }
  if (rep.golden_gamma_equal) {
    std::cout << "golden: " << (*rep.golden_gamma_equal ? "gamma-equal on the grid" : "DIFFERS");
    if (rep.golden_gamma_mismatch_at) std::cout << " at " << pb.format_point(*rep.golden_gamma_mismatch_at);
    std::cout << "\n";
  }
  if (!rep.all_sound()) return kUnsound;
  if (!rep.all_precise()) std::cerr << "warning: the transformer is sound but not 1-precise\n";
  return kOk;
}

int cmd_apply(const std::string& artifact, const std::string& config, const std::string& input, int repeat,
              const std::string& mode, const Overrides& o) {
  Problem pb(load(config, o));
  const Artifact a = read_artifact(read_file(artifact));
  const auto tuple = bind_artifact(a, pb);
  const auto& sigs = pb.schema().sigs;
  auto in = pb.parse_point(input);
  if (!in) throw UsageError("input '" + input + "' does not parse as " + std::to_string(sigs.size()) + " operand(s)");
  if (repeat > 0) {
    // Chaining feeds the output back as the first operand.
    bool chain = sigs[0].size() == pb.width();
    for (std::size_t k = 0; chain && k < pb.width(); ++k) chain = sigs[0][k]->name() == pb.out(k).name();
    if (!chain && repeat > 1) throw UsageError("outputs differ from the first operand's domains; use --repeat 1");
  }
  auto gamma_size = [&](const ProductValue& v) { return gamma_product(sigs[0], v, pb.universe()).size(); };
  std::cout << "0: " << format_input(sigs, *in) << "  |gamma| = " << gamma_size((*in)[0]) << "\n";
  for (int i = 1; i <= repeat; ++i) {
    std::vector<std::optional<AbstractValue>> out;
    if (mode == "direct") {
      for (const auto& v : pb.apply_direct(*in)) out.emplace_back(v);
    } else {
      out = pb.apply_tuple(tuple, *in);
    }
    ProductValue next;
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (!out[k]) {
        std::cout << i << ": " << format_outputs(pb, out) << "\n";
        std::cerr << "component " << pb.out(k).name() << " produced an invalid value\n";
        return kUnsound;
      }
      next.comps.push_back(*out[k]);
    }
    if (sigs[0].size() == pb.width() && (*in)[0].comps.size() == next.comps.size()) {
      (*in)[0] = next;
      std::cout << i << ": " << format_product(sigs[0], next) << "  |gamma| = " << gamma_size(next) << "\n";
    } else {
      std::cout << i << ": " << format_outputs(pb, out) << "\n";
    }
  }
  return kOk;
}

int cmd_oracle(const std::string& config, const std::string& component, const std::string& csv,
               const std::string& input, const Overrides& o) {
  Problem pb(load(config, o));
  std::vector<std::size_t> ks;
  for (std::size_t k = 0; k < pb.width(); ++k)
    if (component.empty() || component == "product" || component == pb.out(k).name()) ks.push_back(k);
  if (ks.empty()) throw UsageError("no output component named '" + component + "'");

  auto row = [&](const InputTuple& in) {
    const auto ideal = pb.apply_ideal(in);
    std::vector<std::string> cells{format_input(pb.schema().sigs, in)};
    for (auto k : ks) cells.push_back(pb.out(k).format(ideal[k]));
    return cells;
  };
  std::vector<std::vector<std::string>> rows;
  if (!input.empty()) {
    auto in = pb.parse_point(input);
    if (!in) throw UsageError("input '" + input + "' does not parse");
    rows.push_back(row(*in));
  } else {
    pb.warm_caches();
    for (std::uint32_t p = 0; p < pb.grid_size(); ++p) {
      std::vector<std::string> cells{pb.format_point(p)};
      for (auto k : ks) cells.push_back(pb.out(k).format(pb.ideal(p, k)));
      rows.push_back(std::move(cells));
    }
  }
  for (const auto& r : rows) {
    const bool product = r.size() > 2;
    std::cout << r[0] << " -> " << (product ? "<" : "");
    for (std::size_t i = 1; i < r.size(); ++i) std::cout << (i > 1 ? ", " : "") << r[i];
    std::cout << (product ? ">" : "") << "\n";
  }
  if (!csv.empty()) {
    auto field = [](const std::string& s) {
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    };
    std::string text = "input";
    for (auto k : ks) text += "," + pb.out(k).name();
    text += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) text += (i ? "," : "") + field(r[i]);
      text += "\n";
    }
    write_file(csv, text);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesizes sound, 1-precise reduced-product abstract transformers"};
  app.require_subcommand(1);
  Overrides o;
  std::string config, out, log, emit = "sexpr", artifact, input, mode = "reduced", component, csv;
  int repeat = 1;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Problem configuration file")->required();
    sub->add_option("--seed", o.seed, "Scheduler seed");
    sub->add_option("--policy", o.policy, "Check scheduling policy")->check(CLI::IsMember({"alternate", "random"}));
    sub->add_option("--max-size", o.max_size, "Expression size cap")->check(CLI::PositiveNumber);
    sub->add_option("--bound", o.bound, "Interval grid bound");
    sub->add_option("--workers", o.workers, "Worker threads for cache warm-up")->check(CLI::PositiveNumber);
    sub->add_flag("--strict-witness", o.strict_witness, "Precision witnesses from sound candidates only");
  };
  auto* synth = app.add_subcommand("synth", "Synthesize a transformer tuple");
  common(synth);
  synth->add_option("--out", out, "Artifact output path");
  synth->add_option("--log", log, "JSONL event log path");
  synth->add_option("--emit", emit, "Stdout rendering")->check(CLI::IsMember({"sexpr", "pseudo"}));

  auto* verify = app.add_subcommand("verify", "Check an artifact for soundness and 1-precision");
  common(verify);
  verify->add_option("artifact", artifact, "Artifact file")->required();

  auto* apply = app.add_subcommand("apply", "Apply an artifact to an abstract input");
  common(apply);
  apply->add_option("artifact", artifact, "Artifact file")->required();
  apply->add_option("--input", input, "Abstract input, e.g. \"<[1,5], [2,6]>\"")->required();
  apply->add_option("--repeat", repeat, "Number of applications")->check(CLI::NonNegativeNumber);
  apply->add_option("--mode", mode, "reduced or direct")->check(CLI::IsMember({"reduced", "direct"}));

  auto* oracle = app.add_subcommand("oracle", "Print the ideal transformer table");
  common(oracle);
  oracle->add_option("--component", component, "Output component name, or 'product'");
  oracle->add_option("--csv", csv, "Also write the table as CSV");
  oracle->add_option("--input", input, "Print a single row for this input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) return cmd_synth(config, out, log, emit, o);
    if (*verify) return cmd_verify(artifact, config, o);
    if (*apply) return cmd_apply(artifact, config, input, repeat, mode, o);
    if (*oracle) return cmd_oracle(config, component, csv, input, o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const FingerprintMismatch& e) {
    std::cerr << "refusing: " << e.what() << "\n";
    return kFingerprint;
  } catch (const ArtifactError& e) {
    std::cerr << "artifact error: " << e.what() << "\n";
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const DeadlineExceeded& e) {
    std::cerr << "indeterminate: " << e.what() << "\n";
    return kIndeterminate;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  }
  return kUsage;
}
