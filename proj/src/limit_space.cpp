// Limit-pair search for interval outputs.
//
// An interval candidate is a pair of limit expressions. Both limits are drawn
// from the same bounded family: level-1 terms (terminals and their
// negations), level-2 terms (one operator over level-1 terms), and roots (one
// operator over two terms, at least one of level 2). Terms are deduplicated
// by their value vector over every problem point, so each class is
// represented by its first (smallest) expression.
//
// Soundness, example satisfaction and the one-step improvement test are all
// separable per limit, so each side is filtered and grouped independently
// (by which negatives it excludes and whether it improves) and pairs are
// searched over group representatives by total size.

#include <algorithm>
#include <bit>
#include <unordered_map>

#include "redsynth/space.hpp"

namespace redsynth {

namespace {

constexpr std::int32_t kInf = 1 << 29;
constexpr std::int32_t kNInf = -(1 << 29);
constexpr std::int32_t kIndet = INT32_MIN;

std::int32_t encode(ExtInt x) {
  if (x.is_pos_inf()) return kInf;
  if (x.is_neg_inf()) return kNInf;
  return static_cast<std::int32_t>(std::clamp<std::int64_t>(x.value(), kNInf + 1, kInf - 1));
}

ExtInt decode(std::int32_t v) {
  if (v >= kInf) return ExtInt::pos_inf();
  if (v <= kNInf) return ExtInt::neg_inf();
  return ExtInt(v);
}

std::int32_t e_neg(std::int32_t a) {
  if (a == kIndet) return kIndet;
  if (a == kInf) return kNInf;
  if (a == kNInf) return kInf;
  return -a;
}

std::int32_t e_add(std::int32_t a, std::int32_t b) {
  if (a == kIndet || b == kIndet) return kIndet;
  if (a == kInf) return b == kNInf ? kIndet : kInf;
  if (a == kNInf) return b == kInf ? kIndet : kNInf;
  if (b == kInf || b == kNInf) return b;
  std::int64_t s = static_cast<std::int64_t>(a) + b;
  return static_cast<std::int32_t>(std::clamp<std::int64_t>(s, kNInf + 1, kInf - 1));
}

std::int32_t apply(NodeKind op, std::int32_t a, std::int32_t b) {
  switch (op) {
    case NodeKind::Add: return e_add(a, b);
    case NodeKind::Sub: return e_add(a, e_neg(b));
    case NodeKind::Min: return (a == kIndet || b == kIndet) ? kIndet : std::min(a, b);
    case NodeKind::Max: return (a == kIndet || b == kIndet) ? kIndet : std::max(a, b);
    default: return kIndet;
  }
}

// The output universe: -inf, [-bout, bout], +inf.
struct OutU {
  std::int32_t bout;
  std::optional<std::int32_t> prev(std::int32_t x) const {
    if (x == kNInf) return std::nullopt;
    if (x == kInf) return bout;
    return x - 1 < -bout ? kNInf : x - 1;
  }
  std::optional<std::int32_t> next(std::int32_t x) const {
    if (x == kInf) return std::nullopt;
    if (x == kNInf) return -bout;
    return x + 1 > bout ? kInf : x + 1;
  }
  std::int32_t floor(std::int32_t x) const {
    if (x == kInf || x == kNInf) return x;
    if (x > bout) return bout;
    return x < -bout ? kNInf : x;
  }
  std::int32_t ceil(std::int32_t x) const {
    if (x == kInf || x == kNInf) return x;
    if (x < -bout) return -bout;
    return x > bout ? kInf : x;
  }
};

// Bounded term family of one arithmetic nonterminal.
struct Table {
  struct Class {
    ExprPtr e;
    int size;
    int level;
  };
  struct Root {
    NodeKind op;
    std::uint32_t x, y;
    int size;
  };
  std::size_t n = 0;  // points
  std::vector<Class> classes;
  std::vector<std::int32_t> cv;  // classes x points
  std::vector<Root> roots;
  // Candidate ids: classes first (id < classes.size()), then roots. Positions
  // order every candidate by (size, class-before-root, id).
  std::vector<std::uint32_t> order;
  std::vector<int> pos_size;
  std::vector<std::uint32_t> size_begin;  // first position of each size (size+1 entries)
  int cap = 0;

  std::int32_t value(std::uint32_t id, std::uint32_t p) const {
    if (id < classes.size()) return cv[static_cast<std::size_t>(id) * n + p];
    const Root& r = roots[id - classes.size()];
    return apply(r.op, cv[static_cast<std::size_t>(r.x) * n + p], cv[static_cast<std::size_t>(r.y) * n + p]);
  }
  ExprPtr expr(std::uint32_t id) const {
    if (id < classes.size()) return classes[id].e;
    const Root& r = roots[id - classes.size()];
    return ex::binary(r.op, classes[r.x].e, classes[r.y].e);
  }
};

struct ArithNT {
  std::vector<ExprPtr> terminals;
  bool neg = false;
  std::vector<NodeKind> ops;
};

// Alternatives of `nt` when it is a plain arithmetic nonterminal.
std::optional<ArithNT> arith_nt(const Grammar& g, const std::string& nt) {
  ArithNT a;
  for (const auto& alt : g.alternatives(nt)) {
    auto self = [&](const ExprPtr& e) { return e->kind == NodeKind::Hole && e->a == nt; };
    switch (alt->kind) {
      case NodeKind::Num: case NodeKind::Inf: case NodeKind::Field:
        a.terminals.push_back(alt);
        break;
      case NodeKind::Neg:
        if (!self(alt->kids[0])) return std::nullopt;
        a.neg = true;
        break;
      case NodeKind::Add: case NodeKind::Sub: case NodeKind::Min: case NodeKind::Max:
        if (!self(alt->kids[0]) || !self(alt->kids[1])) return std::nullopt;
        if (std::find(a.ops.begin(), a.ops.end(), alt->kind) == a.ops.end()) a.ops.push_back(alt->kind);
        break;
      default:
        return std::nullopt;
    }
  }
  if (a.terminals.empty()) return std::nullopt;
  return a;
}

std::uint64_t hash_row(const std::int32_t* row, std::size_t n) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<std::uint32_t>(row[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

std::shared_ptr<Table> build_table(const Problem& pb, std::size_t k, const ArithNT& nt) {
  auto t = std::make_shared<Table>();
  const std::size_t n = pb.num_points();
  t->n = n;
  t->cap = pb.spec().budget.max_size;
  EvalContext base;
  base.schema = &pb.schema();
  base.universe = &pb.universe();
  base.k = k;

  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> seen;
  std::vector<std::int32_t> row(n);
  auto add_class = [&](ExprPtr e, int size, int level) {
    if (size > t->cap) return;
    std::uint64_t h = hash_row(row.data(), n);
    auto& bucket = seen[h];
    for (auto c : bucket)
      if (std::equal(row.begin(), row.end(), t->cv.begin() + static_cast<std::ptrdiff_t>(c * n))) return;
    bucket.push_back(static_cast<std::uint32_t>(t->classes.size()));
    t->classes.push_back({std::move(e), size, level});
    t->cv.insert(t->cv.end(), row.begin(), row.end());
  };

  // Level 1: terminals, then their negations.
  for (const auto& term : nt.terminals) {
    for (std::uint32_t p = 0; p < n; ++p) {
      auto ctx = base;
      ctx.input = &pb.point(p);
      auto v = eval_node(*term, ctx);
      row[p] = v.k == Val::K::Int ? encode(v.i) : kIndet;
    }
    add_class(term, 1, 1);
  }
  std::size_t nterm = t->classes.size();
  if (nt.neg)
    for (std::uint32_t c = 0; c < nterm; ++c) {
      for (std::size_t p = 0; p < n; ++p) row[p] = e_neg(t->cv[c * n + p]);
      add_class(ex::unary(NodeKind::Neg, t->classes[c].e), 2, 1);
    }
  // Level 2: one operator over level-1 terms, by size then generation order.
  std::size_t nl1 = t->classes.size();
  struct Pending {
    int size;
    NodeKind op;
    std::uint32_t x, y;
  };
  std::vector<Pending> pend;
  for (auto op : nt.ops)
    for (std::uint32_t x = 0; x < nl1; ++x)
      for (std::uint32_t y = 0; y < nl1; ++y) {
        if (is_commutative(op) && y < x) continue;
        if (op != NodeKind::Add && x == y) continue;
        pend.push_back({1 + t->classes[x].size + t->classes[y].size, op, x, y});
      }
  std::stable_sort(pend.begin(), pend.end(), [](const Pending& a, const Pending& b) { return a.size < b.size; });
  for (const auto& q : pend) {
    for (std::size_t p = 0; p < n; ++p) row[p] = apply(q.op, t->cv[q.x * n + p], t->cv[q.y * n + p]);
    add_class(ex::binary(q.op, t->classes[q.x].e, t->classes[q.y].e), q.size, 2);
  }

  // Roots, in (size, operator, x, y) order.
  const auto nc = static_cast<std::uint32_t>(t->classes.size());
  for (int s = 3; s <= t->cap; ++s)
    for (auto op : nt.ops)
      for (std::uint32_t x = 0; x < nc; ++x) {
        int sy = s - 1 - t->classes[x].size;
        if (sy < 1) continue;
        for (std::uint32_t y = is_commutative(op) ? x : 0; y < nc; ++y) {
          if (t->classes[y].size != sy) continue;
          if (op != NodeKind::Add && x == y) continue;
          if (t->classes[x].level < 2 && t->classes[y].level < 2) continue;
          t->roots.push_back({op, x, y, s});
        }
      }

  t->size_begin.assign(static_cast<std::size_t>(t->cap) + 2, 0);
  std::vector<std::vector<std::uint32_t>> by_size(static_cast<std::size_t>(t->cap) + 1);
  for (std::uint32_t c = 0; c < nc; ++c) by_size[t->classes[c].size].push_back(c);
  for (std::uint32_t r = 0; r < t->roots.size(); ++r) by_size[t->roots[r].size].push_back(nc + r);
  for (int s = 0; s <= t->cap; ++s) {
    t->size_begin[s] = static_cast<std::uint32_t>(t->order.size());
    for (auto id : by_size[s]) {
      t->order.push_back(id);
      t->pos_size.push_back(s);
    }
  }
  t->size_begin[t->cap + 1] = static_cast<std::uint32_t>(t->order.size());
  return t;
}

using Mask = std::vector<std::uint64_t>;

struct Group {
  Mask mask;
  bool imp = false;
  std::uint32_t id = 0;
  std::uint32_t imp_point = 0;
  std::int32_t imp_value = 0;
};

// One open point of a side: the improvement test there needs only the lower
// (upper) end of the current reduced output and a precomputed bound.
struct Open {
  std::uint32_t point;
  std::int32_t bound;  // lo: min(prev(ideal lo), floor(P hi)); hi: max(next(ideal hi), ceil(P lo))
  std::int32_t edge;   // lo: P lo; hi: P hi
};

class LimitSpace final : public CandidateSpace {
 public:
  LimitSpace(const Problem& pb, std::size_t k, std::shared_ptr<Table> lo, std::shared_ptr<Table> hi)
      : pb_(pb), k_(k), u_{static_cast<std::int32_t>(pb.universe().config().int_out_bound)} {
    parity_ = static_cast<const IntervalDomain&>(pb.out(k)).parity();
    sides_[0].t = std::move(lo);
    sides_[0].lo = true;
    sides_[1].t = std::move(hi);
    sides_[1].lo = false;
    for (auto& s : sides_) {
      s.alive.resize(s.t->order.size());
      for (std::uint32_t i = 0; i < s.alive.size(); ++i) s.alive[i] = i;
      s.sound.assign(s.t->order.size(), -1);
    }
  }

  std::string kind() const override { return "limit-pairs"; }
  std::size_t candidate_count() const override { return sides_[0].t->order.size() * sides_[1].t->order.size(); }

  ExprPtr synthesize(const ExampleSet& ex, const Deadline& dl) override {
    prepare(ex, nullptr, false);
    auto r = search(false, dl);
    if (!r) return nullptr;
    return pair_expr(r->first->id, r->second->id);
  }

  std::optional<MaxSynthResult> max_synth(const ExampleSet& ex, const Deadline& dl) override {
    prepare(ex, nullptr, false);
    Mask hard(words_, 0), soft(words_, 0);
    for (std::size_t i = 0; i < ex.neg.size(); ++i) (ex.neg[i].hard ? hard : soft)[i / 64] |= 1ULL << (i % 64);
    std::optional<std::pair<const Group*, const Group*>> best;
    int best_score = -1;
    const int cap = std::max(sides_[0].t->cap, sides_[1].t->cap);
    for (int total = 2; total <= 2 * cap; ++total)
      for (int sl = std::max(1, total - sides_[1].t->cap); sl <= std::min(sides_[0].t->cap, total - 1); ++sl) {
        const auto& gl = groups(0, sl, dl);
        const auto& gh = groups(1, total - sl, dl);
        for (const auto& a : gl)
          for (const auto& b : gh) {
            bool ok = true;
            int score = 0;
            for (std::size_t w = 0; w < words_ && ok; ++w) {
              std::uint64_t cov = a.mask[w] | b.mask[w];
              if ((cov & hard[w]) != hard[w]) ok = false;
              score += std::popcount(cov & soft[w]);
            }
            if (ok && score > best_score) {
              best_score = score;
              best = std::make_pair(&a, &b);
            }
          }
      }
    if (!best) return std::nullopt;
    MaxSynthResult r;
    r.expr = pair_expr(best->first->id, best->second->id);
    for (std::size_t i = 0; i < ex.neg.size(); ++i) {
      std::uint64_t bit = 1ULL << (i % 64);
      if (!((best->first->mask[i / 64] | best->second->mask[i / 64]) & bit)) r.dropped.push_back(i);
    }
    return r;
  }

  std::optional<Witness> improving(const ExampleSet& ex, const TupleOutputs& cur, bool strict,
                                   const Deadline& dl) override {
    prepare(ex, &cur, strict);
    if (open_[0].empty() && open_[1].empty()) return std::nullopt;
    auto r = search(true, dl);
    if (!r) return std::nullopt;
    const Group& a = *r->first;
    const Group& b = *r->second;
    Witness w;
    w.h = pair_expr(a.id, b.id);
    if (a.imp && (!b.imp || a.imp_point <= b.imp_point)) {
      w.point = a.imp_point;
      w.value = decode(a.imp_value);
    } else {
      w.point = b.imp_point;
      w.value = decode(b.imp_value);
    }
    return w;
  }

  std::optional<Witness> better_sound(const TupleOutputs& cur, const Deadline& dl) override {
    // Per side: the first sound limit that never loosens the reduced output,
    // and the first that also tightens it somewhere.
    struct Found {
      std::optional<std::uint32_t> ok, strict;
      std::uint32_t point = 0;
      std::int32_t value = 0;
    } f[2];
    const auto grid = static_cast<std::uint32_t>(pb_.grid_size());
    for (int side = 0; side < 2; ++side) {
      const bool lo = side == 0;
      std::vector<std::int32_t> rest(grid), mine(grid);
      std::vector<bool> skip(grid, false);
      for (std::uint32_t g = 0; g < grid; ++g) {
        std::int32_t r = lo ? kNInf : kInf;
        for (std::size_t j = 0; j < cur.size(); ++j) {
          const auto& v = cur[j][g];
          if (!v) continue;
          if (v->tag == AbstractValue::Tag::Bot) {
            skip[g] = true;
            continue;
          }
          std::int32_t x = encode(lo ? v->lo : v->hi);
          if (j == k_) {
            mine[g] = x;
          } else {
            r = lo ? std::max(r, x) : std::min(r, x);
          }
        }
        if (!cur[k_][g]) mine[g] = lo ? kNInf : kInf;
        rest[g] = r;
      }
      const Table& t = *sides_[side].t;
      for (std::uint32_t pos = 0; pos < t.order.size() && !f[side].strict; ++pos) {
        if ((pos & 1023) == 0) dl.check();
        std::uint32_t id = t.order[pos];
        if (!side_sound(side, id)) continue;
        bool ok = true;
        std::optional<std::uint32_t> strict_at;
        for (std::uint32_t g = 0; g < grid && ok; ++g) {
          if (skip[g]) continue;
          std::int32_t v = eff(lo, t.value(id, g));
          std::int32_t hv = lo ? std::max(v, rest[g]) : std::min(v, rest[g]);
          std::int32_t fv = lo ? std::max(mine[g], rest[g]) : std::min(mine[g], rest[g]);
          if (lo ? hv < fv : hv > fv) ok = false;
          else if (hv != fv && !strict_at) strict_at = g;
        }
        if (!ok) continue;
        if (!f[side].ok) f[side].ok = id;
        if (strict_at) {
          f[side].strict = id;
          f[side].point = *strict_at;
          std::int32_t fv = lo ? std::max(mine[*strict_at], rest[*strict_at])
                               : std::min(mine[*strict_at], rest[*strict_at]);
          f[side].value = lo ? u_.ceil(fv) : u_.floor(fv);
        }
      }
    }
    for (int side = 0; side < 2; ++side) {
      if (!f[side].strict || !f[1 - side].ok) continue;
      Witness w;
      w.h = side == 0 ? pair_expr(*f[0].strict, *f[1].ok) : pair_expr(*f[0].ok, *f[1].strict);
      w.point = f[side].point;
      w.value = decode(f[side].value);
      return w;
    }
    return std::nullopt;
  }

 private:
  struct Side {
    std::shared_ptr<Table> t;
    bool lo = true;
    std::vector<std::uint32_t> alive;  // positions consistent with the positives seen so far
    std::size_t pos_seen = 0;
    std::vector<Example> seen;
    std::vector<std::int8_t> sound;  // per id: -1 unknown
    std::map<int, std::vector<Group>> groups;
  };

  bool valid(std::int32_t v) const {
    if (v == kInf || v == kNInf || parity_ == Parity::Any) return true;
    bool odd = (v % 2) != 0;
    return odd == (parity_ == Parity::Odd);
  }
  static std::int32_t eff(bool lo, std::int32_t v) { return v == kIndet ? (lo ? kNInf : kInf) : v; }

  bool side_sound(int side, std::uint32_t id) {
    auto& s = sides_[side];
    if (s.sound[id] >= 0) return s.sound[id] == 1;
    bool ok = true;
    for (std::uint32_t g = 0; g < pb_.grid_size() && ok; ++g) {
      const auto& ideal = pb_.ideal(g, k_);
      std::int32_t v = eff(s.lo, s.t->value(id, g));
      if (!valid(v)) {
        ok = false;
      } else if (ideal.tag != AbstractValue::Tag::Bot) {
        ok = s.lo ? v <= encode(ideal.lo) : v >= encode(ideal.hi);
      }
    }
    s.sound[id] = ok ? 1 : 0;
    return ok;
  }

  bool accepts_positive(const Side& s, std::uint32_t id, const Example& e) const {
    std::int32_t v = eff(s.lo, s.t->value(id, e.point));
    std::int32_t c = encode(std::get<ExtInt>(e.out));
    return valid(v) && (s.lo ? v <= c : v >= c);
  }

  bool excludes(const Side& s, std::uint32_t id, const Example& e) const {
    std::int32_t v = eff(s.lo, s.t->value(id, e.point));
    std::int32_t c = encode(std::get<ExtInt>(e.out));
    return valid(v) && (s.lo ? v > c : v < c);
  }

  // Improvement test at the first open point where this limit helps.
  std::optional<std::pair<std::uint32_t, std::int32_t>> improves(int side, std::uint32_t id) const {
    const auto& s = sides_[side];
    for (const auto& o : open_[side]) {
      std::int32_t v = eff(s.lo, s.t->value(id, o.point));
      if (!valid(v)) continue;
      if (s.lo) {
        auto pv = u_.prev(v);
        if (!pv) continue;
        std::int32_t c = std::min(*pv, o.bound);
        if (c >= o.edge) return std::make_pair(o.point, c);
      } else {
        auto nv = u_.next(v);
        if (!nv) continue;
        std::int32_t c = std::max(*nv, o.bound);
        if (c <= o.edge) return std::make_pair(o.point, c);
      }
    }
    return std::nullopt;
  }

  void prepare(const ExampleSet& ex, const TupleOutputs* cur, bool strict) {
    for (auto& s : sides_) {
      bool prefix = s.seen.size() <= ex.pos.size() && std::equal(s.seen.begin(), s.seen.end(), ex.pos.begin());
      if (!prefix) {
        s.alive.resize(s.t->order.size());
        for (std::uint32_t i = 0; i < s.alive.size(); ++i) s.alive[i] = i;
        s.seen.clear();
      }
      for (std::size_t i = s.seen.size(); i < ex.pos.size(); ++i) {
        const Example& e = ex.pos[i];
        std::erase_if(s.alive, [&](std::uint32_t pos) { return !accepts_positive(s, s.t->order[pos], e); });
        s.seen.push_back(e);
      }
      s.groups.clear();
    }
    neg_ = ex.neg;
    words_ = (neg_.size() + 63) / 64;
    strict_ = strict;
    precision_ = cur != nullptr;
    open_[0].clear();
    open_[1].clear();
    if (!cur) return;
    for (std::uint32_t g = 0; g < pb_.grid_size(); ++g) {
      const auto& ideal = pb_.ideal(g, k_);
      if (ideal.tag == AbstractValue::Tag::Bot) continue;
      std::int32_t pl = kNInf, ph = kInf;
      bool empty = false;
      for (const auto& col : *cur) {
        const auto& v = col[g];
        if (!v) continue;
        if (v->tag == AbstractValue::Tag::Bot) {
          empty = true;
          break;
        }
        pl = std::max(pl, encode(v->lo));
        ph = std::min(ph, encode(v->hi));
      }
      if (empty || pl > ph) continue;
      if (auto a = u_.prev(encode(ideal.lo))) {
        std::int32_t bound = std::min(*a, u_.floor(ph));
        if (bound >= pl && bound != kIndet) open_[0].push_back({g, bound, pl});
      }
      if (auto b = u_.next(encode(ideal.hi))) {
        std::int32_t bound = std::max(*b, u_.ceil(pl));
        if (bound <= ph) open_[1].push_back({g, bound, ph});
      }
    }
  }

  const std::vector<Group>& groups(int side, int size, const Deadline& dl) {
    auto& s = sides_[side];
    if (auto it = s.groups.find(size); it != s.groups.end()) return it->second;
    auto& out = s.groups[size];
    if (size < 1 || size > s.t->cap) return out;
    auto b = std::lower_bound(s.alive.begin(), s.alive.end(), s.t->size_begin[size]);
    auto e = std::lower_bound(s.alive.begin(), s.alive.end(), s.t->size_begin[size + 1]);
    std::unordered_map<std::string, std::size_t> index;
    std::string key;
    std::size_t count = 0;
    for (auto it = b; it != e; ++it) {
      if ((++count & 4095) == 0) dl.check();
      std::uint32_t id = s.t->order[*it];
      if (strict_ && !side_sound(side, id)) continue;
      Group g;
      g.id = id;
      g.mask.assign(words_, 0);
      for (std::size_t i = 0; i < neg_.size(); ++i)
        if (excludes(s, id, neg_[i])) g.mask[i / 64] |= 1ULL << (i % 64);
      if (precision_) {
        if (auto r = improves(side, id)) {
          g.imp = true;
          g.imp_point = r->first;
          g.imp_value = r->second;
        }
      }
      key.assign(reinterpret_cast<const char*>(g.mask.data()), g.mask.size() * sizeof(std::uint64_t));
      key.push_back(g.imp ? '\1' : '\0');
      if (index.emplace(key, out.size()).second) out.push_back(std::move(g));
    }
    return out;
  }

  bool full(const Mask& a, const Mask& b) const {
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t want = w + 1 < words_ || neg_.size() % 64 == 0 ? ~0ULL : (1ULL << (neg_.size() % 64)) - 1;
      if ((a[w] | b[w]) != want) return false;
    }
    return true;
  }

  std::optional<std::pair<const Group*, const Group*>> search(bool need_imp, const Deadline& dl) {
    const int cap_l = sides_[0].t->cap, cap_h = sides_[1].t->cap;
    for (int total = 2; total <= cap_l + cap_h; ++total)
      for (int sl = std::max(1, total - cap_h); sl <= std::min(cap_l, total - 1); ++sl) {
        const auto& gl = groups(0, sl, dl);
        if (gl.empty()) continue;
        const auto& gh = groups(1, total - sl, dl);
        for (const auto& a : gl)
          for (const auto& b : gh)
            if ((!need_imp || a.imp || b.imp) && full(a.mask, b.mask)) return std::make_pair(&a, &b);
      }
    return std::nullopt;
  }

  ExprPtr pair_expr(std::uint32_t lo, std::uint32_t hi) const {
    return ex::interval(sides_[0].t->expr(lo), sides_[1].t->expr(hi));
  }

  const Problem& pb_;
  std::size_t k_;
  OutU u_;
  Parity parity_ = Parity::Any;
  Side sides_[2];
  std::vector<Example> neg_;
  std::size_t words_ = 0;
  bool strict_ = false;
  bool precision_ = false;
  std::vector<Open> open_[2];
};

}  // namespace

std::unique_ptr<CandidateSpace> make_limit_space(const Problem& pb, std::size_t k) {
  if (pb.out(k).family() != Domain::Family::Interval || !pb.integer_problem()) return nullptr;
  if (pb.spec().budget.depth != 3) return nullptr;
  const Grammar& g = pb.grammar(k);
  const auto& start = g.alternatives(g.start);
  if (start.size() != 1 || start[0]->kind != NodeKind::Interval) return nullptr;
  const auto& lo = start[0]->kids[0];
  const auto& hi = start[0]->kids[1];
  if (lo->kind != NodeKind::Hole || hi->kind != NodeKind::Hole) return nullptr;
  auto a = arith_nt(g, lo->a);
  auto b = arith_nt(g, hi->a);
  if (!a || !b) return nullptr;
  for (const auto* nt : {&*a, &*b})
    for (const auto& t : nt->terminals) validate_expr(*t, pb.schema(), k);
  auto tl = build_table(pb, k, *a);
  auto th = lo->a == hi->a ? tl : build_table(pb, k, *b);
  return std::make_unique<LimitSpace>(pb, k, tl, th);
}

std::unique_ptr<CandidateSpace> make_space(const Problem& pb, std::size_t k) {
  if (auto s = make_limit_space(pb, k)) return s;
  return make_program_space(pb, k);
}

}  // namespace redsynth
