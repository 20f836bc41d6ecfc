#include "redsynth/verification.hpp"

#include <algorithm>

namespace redsynth {

SoundnessResult check_soundness(const Problem& pb, std::size_t k, const std::vector<std::optional<AbstractValue>>& outs,
                                const Deadline& dl) {
  const Domain& d = pb.out(k);
  for (std::uint32_t g = 0; g < pb.grid_size(); ++g) {
    if ((g & 63) == 0) dl.check();
    const auto& o = outs.at(g);
    // Ideal below the output means the output covers the whole image.
    if (o && d.leq(pb.ideal(g, k), *o)) continue;
    if (auto c = pb.image_outside(g, k, o)) return {false, Example{g, *c, false}};
  }
  return {};
}

SoundnessResult check_soundness(const Problem& pb, std::size_t k, const Expr& e, const Deadline& dl) {
  return check_soundness(pb, k, pb.eval_all(e, k), dl);
}

TupleOutputs precision_view(const TupleOutputs& cur, std::size_t k, PrecisionScope scope) {
  if (scope == PrecisionScope::Product) return cur;
  TupleOutputs v(cur.size());
  for (std::size_t j = 0; j < cur.size(); ++j)
    v[j] = j == k ? cur[j] : std::vector<std::optional<AbstractValue>>(cur[j].size());
  return v;
}

PrecisionResult check_precision_1(CandidateSpace& space, const ExampleSet& ex, const TupleOutputs& cur, bool strict,
                                  const Deadline& dl) {
  auto w = space.improving(ex, cur, strict, dl);
  if (!w) return {};
  return {false, std::move(w)};
}

bool check_pos(const Problem& pb, const Example& e) { return pb.in_image(e.point, e.out); }

bool ValidationReport::all_sound() const {
  for (const auto& c : components)
    if (!c.sound) return false;
  return true;
}

bool ValidationReport::all_precise() const {
  for (const auto& c : components)
    if (!c.precise) return false;
  return true;
}

ValidationReport validate_final(const Problem& pb, const std::vector<ExprPtr>& tuple, const Deadline& dl) {
  ValidationReport rep;
  TupleOutputs cur;
  for (std::size_t k = 0; k < pb.width(); ++k) cur.push_back(pb.eval_all(*tuple.at(k), k));
  for (std::size_t k = 0; k < pb.width(); ++k) {
    ComponentVerdict v;
    v.name = pb.out(k).name();
    auto s = check_soundness(pb, k, cur[k], dl);
    v.sound = s.sound;
    v.unsound_at = s.witness;
    auto space = make_space(pb, k);
    v.better = space->better_sound(precision_view(cur, k, pb.spec().engine.precision), dl);
    v.precise = !v.better;
    for (std::uint32_t g = 0; g < pb.grid_size(); ++g)
      if (!cur[k][g] || !(*cur[k][g] == pb.ideal(g, k))) ++v.ideal_gap;
    if (const auto& gold = pb.golden(k)) {
      v.matches_golden = true;
      for (std::uint32_t g = 0; g < pb.grid_size(); ++g)
        if (cur[k][g] != pb.eval(*gold, g, k)) {
          v.matches_golden = false;
          v.golden_mismatch_at = g;
          break;
        }
    }
    rep.components.push_back(std::move(v));
  }
  bool all_golden = true;
  for (std::size_t k = 0; k < pb.width(); ++k) all_golden = all_golden && pb.golden(k);
  if (all_golden) {
    const OutputGamma og(pb);
    rep.golden_gamma_equal = true;
    for (std::uint32_t g = 0; g < pb.grid_size(); ++g) {
      if ((g & 63) == 0) dl.check();
      std::vector<std::optional<AbstractValue>> a, b;
      for (std::size_t k = 0; k < pb.width(); ++k) {
        a.push_back(cur[k][g]);
        b.push_back(pb.eval(*pb.golden(k), g, k));
      }
      if (!og.equal(a, b)) {
        rep.golden_gamma_equal = false;
        rep.golden_gamma_mismatch_at = g;
        break;
      }
    }
  }
  return rep;
}

namespace {
UniverseConfig widened(UniverseConfig c) {
  c.int_bound = std::max(c.int_bound, c.int_out_bound);
  c.int_out_bound = std::max(c.int_out_bound, 2 * c.int_bound + 2);
  return c;
}
}  // namespace

OutputGamma::OutputGamma(const Problem& pb) : pb_(pb), wide_(widened(pb.universe().config())) {}

std::optional<std::vector<ConcreteValue>> OutputGamma::gamma(const std::vector<std::optional<AbstractValue>>& v) const {
  ProductValue p;
  for (const auto& c : v) {
    if (!c) return std::nullopt;
    p.comps.push_back(*c);
  }
  auto g = gamma_product(pb_.schema().outs, p, wide_);
  std::sort(g.begin(), g.end());
  return g;
}

bool OutputGamma::equal(const std::vector<std::optional<AbstractValue>>& a,
                        const std::vector<std::optional<AbstractValue>>& b) const {
  if (a == b) return true;
  return gamma(a) == gamma(b);
}

std::optional<std::string> compare_on_grid(const Problem& pb, const std::vector<ExprPtr>& a,
                                           const std::vector<ExprPtr>& b, const Budget& budget) {
  const auto& sigs = pb.schema().sigs;
  std::vector<std::vector<ProductValue>> per;
  for (std::size_t i = 0; i < sigs.size(); ++i) per.push_back(pb.operand_grid(i, budget));
  const OutputGamma og(pb);
  InputTuple in(sigs.size());
  auto differs = [&]() { return !og.equal(pb.apply_tuple(a, in), pb.apply_tuple(b, in)); };
  if (per.size() == 1) {
    for (const auto& x : per[0]) {
      in[0] = x;
      if (differs()) return format_input(sigs, in);
    }
    return std::nullopt;
  }
  for (const auto& x : per[0])
    for (const auto& y : per[1]) {
      in[0] = x;
      in[1] = y;
      if (differs()) return format_input(sigs, in);
    }
  return std::nullopt;
}

}  // namespace redsynth
