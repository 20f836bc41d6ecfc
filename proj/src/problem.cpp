#include "redsynth/problem.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <thread>

#include "redsynth/textutil.hpp"

namespace redsynth {

Deadline::Deadline(double seconds) {
  if (seconds > 0) {
    armed_ = true;
    end_ = std::chrono::steady_clock::now() +
           std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds));
  }
}

void Deadline::check() const {
  if (armed_ && std::chrono::steady_clock::now() > end_) throw DeadlineExceeded("check exceeded its deadline");
}

namespace {

// Images larger than this are enumerated on demand instead of being kept.
constexpr std::size_t kImageCacheLimit = 250000;

std::vector<DomainPtr> resolve(const std::vector<std::string>& names, const ProblemSpec& spec) {
  std::vector<DomainPtr> out;
  for (const auto& n : names) {
    try {
      out.push_back(make_domain(n, spec.universe, spec.custom));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

}  // namespace

Problem::Problem(ProblemSpec spec) : spec_(std::move(spec)) {
  auto op = ConcreteOp::parse(spec_.op);
  if (!op) throw ConfigError("unknown operation '" + spec_.op + "'");
  op_ = op->name;
  try {
    universe_ = std::make_unique<Universe>(spec_.universe);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (spec_.components.empty()) throw ConfigError("domains: no components");
  if (spec_.outputs.empty()) spec_.outputs = spec_.components;
  if (static_cast<int>(spec_.aux.size()) >= op->arity) throw ConfigError("domains: too many auxiliary operands");

  auto comps = resolve(spec_.components, spec_);
  std::vector<ArgSig> sigs;
  std::size_t products = op->arity - spec_.aux.size();
  for (std::size_t i = 0; i < products; ++i) sigs.push_back(comps);
  for (const auto& a : resolve(spec_.aux, spec_)) sigs.push_back({a});
  for (std::size_t i = 0; i < sigs.size(); ++i)
    for (const auto& d : sigs[i])
      if (d->kind() != op->args[i])
        throw ConfigError("domain " + d->name() + " does not abstract " + std::string(kind_name(op->args[i])) +
                          " operand " + std::to_string(i + 1));
  auto outs = resolve(spec_.outputs, spec_);
  for (const auto& d : outs)
    if (d->kind() != op->result) throw ConfigError("output domain " + d->name() + " has the wrong value kind");
  try {
    schema_ = OpSchema::make(op_, std::move(sigs), std::move(outs));
  } catch (const DslError& e) {
    throw ConfigError(e.what());
  }

  integer_ = true;
  for (const auto& s : schema_.sigs)
    for (const auto& d : s)
      if (d->family() != Domain::Family::Interval) integer_ = false;

  for (std::size_t k = 0; k < width(); ++k) {
    const auto& name = out(k).name();
    auto g = spec_.grammars.find(name);
    if (g == spec_.grammars.end()) throw ConfigError("no grammar for output component '" + name + "'");
    try {
      grammars_.push_back(parse_grammar(g->second));
    } catch (const std::exception& e) {
      throw ConfigError("grammar." + name + ": " + e.what());
    }
    ExprPtr golden;
    if (auto it = spec_.goldens.find(name); it != spec_.goldens.end()) {
      try {
        golden = parse_expr(it->second);
        validate_expr(*golden, schema_, k);
      } catch (const std::exception& e) {
        throw ConfigError("golden." + name + ": " + e.what());
      }
    }
    goldens_.push_back(golden);
  }
  for (const auto& [name, text] : spec_.grammars) {
    (void)text;
    if (std::none_of(schema_.outs.begin(), schema_.outs.end(), [&](const DomainPtr& d) { return d->name() == name; }))
      throw ConfigError("grammar for unknown output component '" + name + "'");
  }

  build_grid();
  grid_size_ = points_.size();
  load_bootstrap();
  ideal_.assign(points_.size(), std::vector<std::optional<AbstractValue>>(width()));
  direct_.assign(points_.size(), std::vector<std::optional<AbstractValue>>(width()));
  images_.assign(points_.size(), std::nullopt);
  for (const auto& e : boot_pos_)
    if (!in_image(e.point, e.out))
      throw ConfigError("bootstrap: positive " + format_concrete(e.out) + " at " + format_point(e.point) +
                        " is not an output of the operation");
  for (const auto& neg : boot_neg_)
    for (const auto& e : neg)
      if (in_image(e.point, e.out))
        throw ConfigError("bootstrap: negative " + format_concrete(e.out) + " at " + format_point(e.point) +
                          " is an output of the operation");
}

std::string Problem::fingerprint() const {
  std::string text = "op=" + spec_.op + ";comps=";
  for (const auto& c : spec_.components) text += c + ",";
  text += ";outs=";
  for (const auto& c : spec_.outputs) text += c + ",";
  text += ";aux=";
  for (const auto& c : spec_.aux) text += c + ",";
  text += ";" + spec_.universe.fingerprint_text();
  // Custom domains change what element names mean.
  for (const auto& d : spec_.custom) {
    text += ";domain=" + d.name + "," + d.ref + "," + std::to_string(static_cast<int>(d.kind)) + ":";
    for (const auto& e : d.elements) text += e + ",";
    for (const auto& [lo, hi] : d.covers) text += lo + "<" + hi + ",";
    for (const auto& r : d.rules) {
      text += std::to_string(static_cast<int>(r.kind)) + " " + r.element + " " + r.pattern + " " +
              std::to_string(r.a) + " " + std::to_string(r.b) + " " + (r.truth ? "t" : "f");
      for (const auto& w : r.words) text += " " + w;
      text += ",";
    }
  }
  return hex64(fnv1a64(text));
}

// ---------------------------------------------------------------------------
// Grid

std::vector<ProductValue> Problem::operand_grid(std::size_t arg, const Budget& b) const {
  return operand_candidates(schema_.sigs.at(arg), b);
}

std::vector<ProductValue> Problem::operand_candidates(const ArgSig& sig, const Budget& b) const {
  std::vector<ProductValue> raw;
  if (std::all_of(sig.begin(), sig.end(), [](const DomainPtr& d) { return d->family() == Domain::Family::Interval; })) {
    // Ranges [x,y] by width (infinite limits count as far away), then x.
    struct R {
      ExtInt x, y;
      std::int64_t w;
    };
    std::vector<R> ranges;
    std::vector<ExtInt> lows{ExtInt::neg_inf()}, highs;
    for (std::int64_t v = -b.grid_bound; v <= b.grid_bound; ++v) {
      lows.emplace_back(v);
      highs.emplace_back(v);
    }
    highs.push_back(ExtInt::pos_inf());
    auto pos = [](ExtInt v) { return v.is_finite() ? v.value() : v.is_neg_inf() ? -1000000 : 1000000; };
    for (auto x : lows)
      for (auto y : highs)
        if (x <= y) ranges.push_back({x, y, pos(y) - pos(x)});
    std::stable_sort(ranges.begin(), ranges.end(), [](const R& a, const R& c) { return a.w < c.w; });
    for (const auto& r : ranges) {
      ProductValue p;
      for (const auto& d : sig) p.comps.push_back(static_cast<const IntervalDomain&>(*d).alpha_range(r.x, r.y));
      raw.push_back(std::move(p));
    }
  } else {
    // Cartesian product of per-domain candidates.
    std::vector<std::vector<AbstractValue>> per;
    for (const auto& d : sig) {
      std::vector<AbstractValue> c;
      switch (d->family()) {
        case Domain::Family::StringSet: {
          const auto& ss = static_cast<const StringSetDomain&>(*d);
          for (const auto& s : all_strings(spec_.universe.alphabet, b.string_singleton_len))
            c.push_back(ss.make({s}));
          if (ss.k() >= 2) {
            auto small = all_strings(spec_.universe.alphabet, b.string_pair_len);
            for (std::size_t i = 0; i < small.size(); ++i)
              for (std::size_t j = i + 1; j < small.size(); ++j) c.push_back(ss.make({small[i], small[j]}));
          }
          c.push_back(ss.top());
          break;
        }
        case Domain::Family::Flat:
          if (d->kind() == ValueKind::Int) {
            for (std::int64_t i = 0; i <= std::min<std::int64_t>(b.index_bound, spec_.universe.max_len); ++i)
              c.push_back(FlatDomain::make(ExtInt(i)));
          } else if (d->kind() == ValueKind::Str) {
            for (const auto& s : all_strings(spec_.universe.alphabet, b.string_singleton_len))
              c.push_back(FlatDomain::make(s));
          } else {
            c.push_back(FlatDomain::make(false));
            c.push_back(FlatDomain::make(true));
          }
          c.push_back(d->top());
          break;
        case Domain::Family::Finite:
          for (const auto& [name, v] : d->constants())
            if (!d->is_bot(v)) c.push_back(v);
          break;
        case Domain::Family::Interval:
          throw ConfigError("interval components cannot be mixed with non-interval components");
      }
      per.push_back(std::move(c));
    }
    std::vector<std::size_t> idx(sig.size(), 0);
    while (true) {
      ProductValue p;
      for (std::size_t i = 0; i < sig.size(); ++i) p.comps.push_back(per[i][idx[i]]);
      raw.push_back(std::move(p));
      std::size_t i = sig.size();
      while (i > 0) {
        --i;
        if (++idx[i] < per[i].size()) break;
        idx[i] = 0;
        if (i == 0) {
          i = sig.size() + 1;
          break;
        }
      }
      if (i == sig.size() + 1) break;
    }
  }

  std::vector<ProductValue> out;
  std::set<ProductValue> seen;
  for (const auto& p : raw) {
    auto r = reduce_sigma(sig, p, universe());
    if (is_bottom(sig, r)) continue;
    if (seen.insert(r).second) out.push_back(std::move(r));
  }
  if (!integer_) {
    // Smaller concretizations first; generation order breaks ties.
    std::vector<std::size_t> hint;
    for (const auto& p : out) {
      std::size_t h = SIZE_MAX;
      for (std::size_t i = 0; i < sig.size(); ++i) h = std::min(h, sig[i]->gamma_size_hint(p.comps[i], universe()));
      hint.push_back(h);
    }
    std::vector<std::size_t> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return hint[a] < hint[c]; });
    std::vector<ProductValue> sorted;
    for (auto i : order) sorted.push_back(out[i]);
    out = std::move(sorted);
  }
  return out;
}

void Problem::build_grid() {
  std::vector<std::vector<ProductValue>> per;
  for (const auto& sig : schema_.sigs) per.push_back(operand_candidates(sig, spec_.budget));
  if (per.size() == 1) {
    for (auto& p : per[0]) intern({p});
    return;
  }
  // Two operands: by rank sum, then by the first operand's rank.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < per[0].size(); ++i)
    for (std::size_t j = 0; j < per[1].size(); ++j) pairs.emplace_back(i, j);
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return a.first + a.second < b.first + b.second; });
  for (const auto& [i, j] : pairs) intern({per[0][i], per[1][j]});
}

std::uint32_t Problem::intern(InputTuple in) {
  for (auto& p : in) p.reduced = true;
  if (auto it = index_.find(in); it != index_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(points_.size());
  index_.emplace(in, id);
  points_.push_back(std::move(in));
  return id;
}

std::optional<std::uint32_t> Problem::find(const InputTuple& in) const {
  InputTuple key = in;
  for (auto& p : key) p.reduced = true;
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Problem::format_point(std::uint32_t p) const { return format_input(schema_.sigs, points_.at(p)); }

InputTuple Problem::reduce(const InputTuple& in) const {
  InputTuple out;
  for (std::size_t i = 0; i < schema_.sigs.size(); ++i) out.push_back(reduce_sigma(schema_.sigs[i], in.at(i), universe()));
  return out;
}

std::optional<InputTuple> Problem::parse_point(std::string_view text) const {
  auto in = parse_input(schema_.sigs, text);
  if (!in) return std::nullopt;
  return reduce(*in);
}

void Problem::load_bootstrap() {
  boot_neg_.assign(width(), {});
  for (const auto& b : spec_.bootstrap) {
    auto in = parse_point(b.input);
    if (!in) throw ConfigError("bootstrap: cannot parse input '" + b.input + "'");
    for (std::size_t i = 0; i < in->size(); ++i)
      if (is_bottom(schema_.sigs[i], (*in)[i])) throw ConfigError("bootstrap: input '" + b.input + "' is empty");
    auto c = parse_concrete(trim_ws(b.output));
    if (!c || kind_of(*c) != ConcreteOp::get(op_).result || !universe().in_output_universe(*c))
      throw ConfigError("bootstrap: bad output value '" + b.output + "'");
    Example e{intern(std::move(*in)), *c, false};
    if (b.component.empty()) {
      if (std::find(boot_pos_.begin(), boot_pos_.end(), e) == boot_pos_.end()) boot_pos_.push_back(e);
      continue;
    }
    std::optional<std::size_t> k;
    for (std::size_t i = 0; i < width(); ++i)
      if (out(i).name() == b.component || out(i).ref() == b.component) k = i;
    if (!k) throw ConfigError("bootstrap: unknown component '" + b.component + "'");
    e.hard = false;
    if (std::find(boot_neg_[*k].begin(), boot_neg_[*k].end(), e) == boot_neg_[*k].end()) boot_neg_[*k].push_back(e);
  }
}

// ---------------------------------------------------------------------------
// Caches

Problem::Gamma Problem::arg_gamma(const ArgSig& sig, const ProductValue& v) const {
  auto key = std::make_pair(&sig, v);
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = gammas_.find(key); it != gammas_.end()) return it->second;
  }
  auto g = std::make_shared<const std::vector<ConcreteValue>>(gamma_product(sig, v, universe()));
  std::lock_guard<std::mutex> lock(mu_);
  return gammas_.emplace(std::move(key), g).first->second;
}

std::vector<std::vector<ConcreteValue>> Problem::arg_gammas(const InputTuple& in) const {
  std::vector<std::vector<ConcreteValue>> out;
  for (std::size_t i = 0; i < schema_.sigs.size(); ++i) out.push_back(*arg_gamma(schema_.sigs[i], in.at(i)));
  return out;
}

void Problem::compute_ideal(std::uint32_t p) const {
  const auto& in = points_.at(p);
  std::vector<Gamma> gs;
  for (std::size_t i = 0; i < schema_.sigs.size(); ++i) gs.push_back(arg_gamma(schema_.sigs[i], in.at(i)));
  std::vector<std::unique_ptr<Accumulator>> acc;
  for (std::size_t k = 0; k < width(); ++k) acc.push_back(out(k).accumulator());
  auto feed = [&](const ConcreteValue& c) {
    bool all = true;
    for (auto& a : acc) {
      if (!a->saturated()) a->add(c);
      all = all && a->saturated();
    }
    return !all;
  };
  if (gs.size() == 1) {
    for (const auto& a : *gs[0]) {
      std::array<ConcreteValue, 1> v{a};
      if (auto r = apply_op(op_, v); r && !feed(*r)) break;
    }
  } else {
    bool go = true;
    for (const auto& a : *gs[0]) {
      for (const auto& b : *gs[1]) {
        std::array<ConcreteValue, 2> v{a, b};
        if (auto r = apply_op(op_, v); r && !feed(*r)) {
          go = false;
          break;
        }
      }
      if (!go) break;
    }
  }
  for (std::size_t k = 0; k < width(); ++k) ideal_[p][k] = acc[k]->result();
}

const AbstractValue& Problem::ideal(std::uint32_t p, std::size_t k) const {
  if (!ideal_.at(p)[k]) compute_ideal(p);
  return *ideal_[p][k];
}

const AbstractValue& Problem::direct(std::uint32_t p, std::size_t k) const {
  auto& slot = direct_.at(p)[k];
  if (!slot) slot = direct_component(op_, schema_.outs, k, schema_.sigs, points_[p], universe());
  return *slot;
}

const AbstractValue& Problem::fallback(std::uint32_t p, std::size_t k, std::size_t j) const {
  auto key = std::make_tuple(p, k, j);
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = fallback_.find(key); it != fallback_.end()) return it->second;
  }
  auto v = per_domain_transformer(op_, out(k), schema_.sigs, points_.at(p), j, universe());
  std::lock_guard<std::mutex> lock(mu_);
  return fallback_.emplace(key, std::move(v)).first->second;
}

void Problem::warm_caches() const {
  auto work = [this](std::uint32_t begin, std::uint32_t end, std::uint32_t step) {
    for (std::uint32_t p = begin; p < end; p += step) {
      if (!ideal_[p][0]) compute_ideal(p);
      for (std::size_t k = 0; k < width(); ++k) direct(p, k);
    }
  };
  auto n = static_cast<std::uint32_t>(points_.size());
  int workers = std::max(1, spec_.engine.workers);
  if (workers == 1) {
    work(0, n, 1);
    return;
  }
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) threads.emplace_back(work, static_cast<std::uint32_t>(w), n, workers);
  for (auto& t : threads) t.join();
}

EvalContext Problem::context(std::uint32_t p, std::size_t k) const {
  EvalContext ctx;
  ctx.schema = &schema_;
  ctx.universe = universe_.get();
  ctx.k = k;
  ctx.input = &points_.at(p);
  ctx.fallback = [this, p, k](std::size_t j) { return fallback(p, k, j); };
  ctx.direct = [this, p, k] { return direct(p, k); };
  return ctx;
}

std::optional<AbstractValue> Problem::eval(const Expr& e, std::uint32_t p, std::size_t k) const {
  return eval_component(e, context(p, k));
}

std::vector<std::optional<AbstractValue>> Problem::eval_all(const Expr& e, std::size_t k) const {
  std::vector<std::optional<AbstractValue>> out;
  out.reserve(points_.size());
  for (std::uint32_t p = 0; p < points_.size(); ++p) out.push_back(eval(e, p, k));
  return out;
}

std::vector<AbstractValue> Problem::apply_direct(const InputTuple& in) const {
  std::vector<AbstractValue> out;
  for (std::size_t k = 0; k < width(); ++k)
    out.push_back(direct_component(op_, schema_.outs, k, schema_.sigs, in, universe()));
  return out;
}

std::vector<AbstractValue> Problem::apply_ideal(const InputTuple& in) const {
  std::vector<AbstractValue> res;
  for (std::size_t k = 0; k < width(); ++k)
    res.push_back(ideal_transformer(op_, out(k), schema_.sigs, in, universe()));
  return res;
}

std::vector<std::optional<AbstractValue>> Problem::apply_tuple(const std::vector<ExprPtr>& tuple,
                                                               const InputTuple& in) const {
  EvalContext ctx;
  ctx.schema = &schema_;
  ctx.universe = universe_.get();
  ctx.input = &in;
  std::vector<std::optional<AbstractValue>> res;
  for (std::size_t k = 0; k < width(); ++k) {
    ctx.k = k;
    res.push_back(eval_component(*tuple.at(k), ctx));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Images

Problem::Gamma Problem::image(std::uint32_t p) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (images_.at(p)) return *images_[p];
  }
  const auto& in = points_[p];
  std::vector<Gamma> gs;
  std::size_t total = 1;
  for (std::size_t i = 0; i < schema_.sigs.size(); ++i) {
    gs.push_back(arg_gamma(schema_.sigs[i], in.at(i)));
    total = gs.back()->size() == 0 ? 0 : std::min(total * gs.back()->size(), kImageCacheLimit + 1);
  }
  Gamma result;
  if (total <= kImageCacheLimit) {
    std::vector<std::vector<ConcreteValue>> args;
    for (const auto& g : gs) args.push_back(*g);
    std::vector<ConcreteValue> img;
    for_each_image(op_, args, [&](const ConcreteValue& c) {
      img.push_back(c);
      return true;
    });
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    result = std::make_shared<const std::vector<ConcreteValue>>(std::move(img));
  }
  std::lock_guard<std::mutex> lock(mu_);
  images_[p] = result;
  return result;
}

bool Problem::in_image(std::uint32_t p, const ConcreteValue& c) const {
  if (auto img = image(p)) return std::binary_search(img->begin(), img->end(), c);
  auto key = std::make_pair(p, c);
  if (auto it = membership_.find(key); it != membership_.end()) return it->second;
  bool found = false;
  const auto& in = points_[p];
  if (op_ == OpName::Concat) {
    // Split membership: some prefix/suffix split lies in the operands.
    const auto* s = std::get_if<std::string>(&c);
    auto member = [&](std::size_t i, const std::string& part) {
      if (static_cast<int>(part.size()) > universe().config().max_len || !universe().in_alphabet(part)) return false;
      ConcreteValue v(part);
      for (std::size_t j = 0; j < schema_.sigs[i].size(); ++j)
        if (!schema_.sigs[i][j]->contains(in[i].comps[j], v)) return false;
      return true;
    };
    if (s)
      for (std::size_t cut = 0; cut <= s->size() && !found; ++cut)
        found = member(0, s->substr(0, cut)) && member(1, s->substr(cut));
  } else {
    for_each_image(op_, arg_gammas(in), [&](const ConcreteValue& r) {
      found = r == c;
      return !found;
    });
  }
  membership_.emplace(key, found);
  return found;
}

std::optional<ConcreteValue> Problem::image_outside(std::uint32_t p, std::size_t k,
                                                    const std::optional<AbstractValue>& o) const {
  auto outside = [&](const ConcreteValue& c) { return !o || !out(k).contains(*o, c); };
  if (auto img = image(p)) {
    for (const auto& c : *img)
      if (outside(c)) return c;
    return std::nullopt;
  }
  std::optional<ConcreteValue> w;
  for_each_image(op_, arg_gammas(points_[p]), [&](const ConcreteValue& c) {
    if (outside(c)) w = c;
    return !w;
  });
  return w;
}

bool Problem::surely_negative(std::uint32_t p, std::size_t k, const ConcreteValue& c) const {
  return !out(k).contains(direct(p, k), c);
}

}  // namespace redsynth
