// Generic candidate space: every program the component grammar derives
// within the size and depth caps, evaluated once at every problem point.
// Programs with identical output vectors are merged into their first member.

#include <algorithm>
#include <set>
#include <unordered_map>

#include "redsynth/space.hpp"

namespace redsynth {

bool satisfies_positive(const Domain& d, const std::optional<AbstractValue>& v, const ConcreteValue& c) {
  return v && d.contains(*v, c);
}

bool satisfies_negative(const Domain& d, const std::optional<AbstractValue>& v, const ConcreteValue& c) {
  return v && !d.contains(*v, c);
}

namespace {

constexpr std::uint32_t kInvalid = UINT32_MAX;

class ProgramSpace final : public CandidateSpace {
 public:
  ProgramSpace(const Problem& pb, std::size_t k) : pb_(pb), k_(k), d_(pb.out(k)), n_(pb.num_points()) {
    auto all = enumerate_exprs(pb.grammar(k), pb.spec().budget.max_size, pb.spec().budget.depth);
    for (const auto& e : all) validate_expr(*e, pb.schema(), k);
    // Point-major evaluation so that shared subtrees are computed once per point.
    std::vector<std::uint32_t> table(all.size() * n_);
    std::unordered_map<const Expr*, Val> memo;
    for (std::uint32_t p = 0; p < n_; ++p) {
      memo.clear();
      EvalContext ctx = pb.context(p, k);
      ctx.memo = &memo;
      for (std::size_t i = 0; i < all.size(); ++i) table[i * n_ + p] = intern(eval_component(*all[i], ctx));
    }
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
    for (std::size_t i = 0; i < all.size(); ++i) {
      auto row = table.begin() + static_cast<std::ptrdiff_t>(i * n_);
      std::uint64_t h = 1469598103934665603ULL;
      for (std::uint32_t p = 0; p < n_; ++p) h = (h ^ row[p]) * 1099511628211ULL;
      auto& bucket = seen[h];
      bool dup = false;
      for (auto j : bucket)
        if (std::equal(row, row + static_cast<std::ptrdiff_t>(n_), out_.begin() + static_cast<std::ptrdiff_t>(j * n_)))
          dup = true;
      if (dup) continue;
      bucket.push_back(progs_.size());
      progs_.push_back(all[i]);
      out_.insert(out_.end(), row, row + static_cast<std::ptrdiff_t>(n_));
    }
    sound_.assign(progs_.size(), -1);
    init_representatives();
  }

  std::string kind() const override { return "programs"; }
  std::size_t candidate_count() const override { return progs_.size(); }

  ExprPtr synthesize(const ExampleSet& ex, const Deadline& dl) override {
    for (std::size_t i = 0; i < progs_.size(); ++i) {
      if ((i & 255) == 0) dl.check();
      if (consistent(i, ex)) return progs_[i];
    }
    return nullptr;
  }

  std::optional<MaxSynthResult> max_synth(const ExampleSet& ex, const Deadline& dl) override {
    std::optional<std::size_t> best;
    int best_score = -1;
    for (std::size_t i = 0; i < progs_.size(); ++i) {
      if ((i & 255) == 0) dl.check();
      if (!positives_ok(i, ex)) continue;
      bool ok = true;
      int score = 0;
      for (const auto& e : ex.neg) {
        bool x = satisfies_negative(d_, value(i, e.point), e.out);
        if (e.hard && !x) {
          ok = false;
          break;
        }
        if (!e.hard && x) ++score;
      }
      // Programs are in size order, so the first best is also the smallest.
      if (ok && score > best_score) {
        best_score = score;
        best = i;
      }
    }
    if (!best) return std::nullopt;
    MaxSynthResult r;
    r.expr = progs_[*best];
    for (std::size_t j = 0; j < ex.neg.size(); ++j)
      if (!satisfies_negative(d_, value(*best, ex.neg[j].point), ex.neg[j].out)) r.dropped.push_back(j);
    return r;
  }

  std::optional<Witness> improving(const ExampleSet& ex, const TupleOutputs& cur, bool strict,
                                   const Deadline& dl) override {
    // Open pairs: c in the reduced output at g but outside the ideal output.
    std::vector<std::pair<std::uint32_t, ConcreteValue>> open;
    for (std::uint32_t g = 0; g < pb_.grid_size(); ++g) {
      std::vector<std::optional<AbstractValue>> vals;
      bool empty = false;
      for (const auto& col : cur) {
        if (col[g] && col[g]->tag == AbstractValue::Tag::Bot) empty = true;
      }
      if (empty) continue;
      const auto& ideal = pb_.ideal(g, k_);
      for (const auto& c : candidates(g, cur, nullptr)) {
        if (d_.contains(ideal, c)) continue;
        bool in = true;
        for (std::size_t j = 0; j < cur.size() && in; ++j)
          if (cur[j][g]) in = pb_.out(j).contains(*cur[j][g], c);
        if (in) open.emplace_back(g, c);
      }
    }
    if (open.empty()) return std::nullopt;
    for (std::size_t i = 0; i < progs_.size(); ++i) {
      if ((i & 255) == 0) dl.check();
      if (!consistent(i, ex)) continue;
      if (strict && !sound(i)) continue;
      for (const auto& [g, c] : open)
        if (satisfies_negative(d_, value(i, g), c)) return Witness{progs_[i], g, c};
    }
    return std::nullopt;
  }

  std::optional<Witness> better_sound(const TupleOutputs& cur, const Deadline& dl) override {
    for (std::size_t i = 0; i < progs_.size(); ++i) {
      if ((i & 63) == 0) dl.check();
      if (!sound(i)) continue;
      bool ok = true;
      std::optional<std::pair<std::uint32_t, ConcreteValue>> strict_at;
      for (std::uint32_t g = 0; g < pb_.grid_size() && ok; ++g) {
        bool empty = false;
        for (std::size_t j = 0; j < cur.size(); ++j)
          if (j != k_ && cur[j][g] && cur[j][g]->tag == AbstractValue::Tag::Bot) empty = true;
        if (empty) continue;
        auto h = value(i, g);
        const auto& f = cur[k_][g];
        for (const auto& c : candidates(g, cur, &*h)) {
          bool in_rest = true;
          for (std::size_t j = 0; j < cur.size() && in_rest; ++j)
            if (j != k_ && cur[j][g]) in_rest = pb_.out(j).contains(*cur[j][g], c);
          if (!in_rest) continue;
          bool in_f = !f || d_.contains(*f, c);
          bool in_h = d_.contains(*h, c);
          if (in_h && !in_f) {
            ok = false;
            break;
          }
          if (in_f && !in_h && !strict_at) strict_at = std::make_pair(g, c);
        }
      }
      if (ok && strict_at) return Witness{progs_[i], strict_at->first, strict_at->second};
    }
    return std::nullopt;
  }

 private:
  std::uint32_t intern(const std::optional<AbstractValue>& v) {
    if (!v) return kInvalid;
    auto [it, fresh] = ids_.emplace(*v, static_cast<std::uint32_t>(vals_.size()));
    if (fresh) vals_.push_back(*v);
    return it->second;
  }

  std::optional<AbstractValue> value(std::size_t prog, std::uint32_t p) const {
    auto id = out_[prog * n_ + p];
    if (id == kInvalid) return std::nullopt;
    return vals_[id];
  }

  bool positives_ok(std::size_t i, const ExampleSet& ex) const {
    for (const auto& e : ex.pos)
      if (!satisfies_positive(d_, value(i, e.point), e.out)) return false;
    return true;
  }

  bool consistent(std::size_t i, const ExampleSet& ex) const {
    if (!positives_ok(i, ex)) return false;
    for (const auto& e : ex.neg)
      if (!satisfies_negative(d_, value(i, e.point), e.out)) return false;
    return true;
  }

  bool sound(std::size_t i) {
    if (sound_[i] >= 0) return sound_[i] == 1;
    bool ok = true;
    for (std::uint32_t g = 0; g < pb_.grid_size() && ok; ++g) {
      auto v = value(i, g);
      ok = v && d_.leq(pb_.ideal(g, k_), *v);
    }
    sound_[i] = ok ? 1 : 0;
    return ok;
  }

  // Fixed witnesses per value class: a few universe members of every class of
  // each finite output domain, plus the first universe members.
  void init_representatives() {
    const auto& u = pb_.universe();
    switch (d_.kind()) {
      case ValueKind::Bool:
        reps_ = {ConcreteValue(false), ConcreteValue(true)};
        return;
      case ValueKind::Int: {
        std::int64_t b = u.config().int_out_bound;
        reps_.emplace_back(ExtInt::neg_inf());
        for (std::int64_t v = -b; v <= b; ++v) reps_.emplace_back(ExtInt(v));
        reps_.emplace_back(ExtInt::pos_inf());
        return;
      }
      case ValueKind::Str:
        break;
    }
    const std::size_t per_class = 2 * static_cast<std::size_t>(u.config().ssk_k) + 2;
    const auto& strs = u.strings();
    for (std::size_t i = 0; i < strs.size() && i < 8; ++i) reps_.emplace_back(strs[i]);
    for (std::size_t j = 0; j < pb_.width(); ++j) {
      const auto* fd = dynamic_cast<const FiniteDomain*>(&pb_.out(j));
      if (!fd) continue;
      std::map<std::uint32_t, std::size_t> taken;
      for (const auto& s : strs) {
        ConcreteValue c(s);
        auto& n = taken[fd->classify(c)];
        if (n < per_class) {
          ++n;
          reps_.push_back(c);
        }
      }
    }
    std::set<ConcreteValue> uniq;
    std::vector<ConcreteValue> kept;
    for (auto& c : reps_)
      if (uniq.insert(c).second) kept.push_back(c);
    reps_ = std::move(kept);
  }

  // Candidate concrete outputs at g, in a fixed order.
  std::vector<ConcreteValue> candidates(std::uint32_t g, const TupleOutputs& cur, const AbstractValue* extra) const {
    std::vector<ConcreteValue> out;
    std::set<ConcreteValue> seen;
    auto push = [&](const ConcreteValue& c) {
      if (pb_.universe().in_output_universe(c) && seen.insert(c).second) out.push_back(c);
    };
    auto from_value = [&](const AbstractValue& v) {
      for (const auto& s : v.strs) push(ConcreteValue(s));
      if (v.tag == AbstractValue::Tag::Val && kind_of(v.cst) == d_.kind()) push(v.cst);
    };
    if (d_.kind() == ValueKind::Str) {
      for (const auto& col : cur)
        if (col[g]) from_value(*col[g]);
      from_value(pb_.ideal(g, k_));
      if (extra) from_value(*extra);
    }
    for (const auto& c : reps_) push(c);
    return out;
  }

  const Problem& pb_;
  std::size_t k_;
  const Domain& d_;
  std::size_t n_;
  std::vector<ExprPtr> progs_;
  std::vector<std::uint32_t> out_;  // programs x points, value ids
  std::vector<AbstractValue> vals_;
  std::unordered_map<AbstractValue, std::uint32_t, AbstractValueHash> ids_;
  std::vector<std::int8_t> sound_;
  std::vector<ConcreteValue> reps_;
};

}  // namespace

std::unique_ptr<CandidateSpace> make_program_space(const Problem& pb, std::size_t k) {
  return std::make_unique<ProgramSpace>(pb, k);
}

}  // namespace redsynth
