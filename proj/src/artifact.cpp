#include "redsynth/artifact.hpp"

#include <charconv>

#include "redsynth/sexpr.hpp"

namespace redsynth {

namespace {

SExpr names(const std::string& head, const std::vector<std::string>& xs) {
  std::vector<SExpr> items{SExpr::make_atom(head)};
  for (const auto& x : xs) items.push_back(SExpr::make_atom(x));
  return SExpr::make_list(std::move(items));
}

SExpr count(const std::string& head, std::size_t n) {
  return SExpr::make_list({SExpr::make_atom(head), SExpr::make_atom(std::to_string(n))});
}

std::vector<std::string> read_names(const SExpr& s) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s.at(i).is_list || s.at(i).quoted) throw ArtifactError("expected a name in (" + s.at(0).atom + " ...)");
    out.push_back(s.at(i).atom);
  }
  return out;
}

std::size_t read_count(const SExpr& s) {
  if (s.size() != 2 || s.at(1).is_list) throw ArtifactError("expected (" + s.at(0).atom + " N)");
  const std::string& a = s.at(1).atom;
  std::size_t n = 0;
  auto [p, ec] = std::from_chars(a.data(), a.data() + a.size(), n);
  if (ec != std::errc() || p != a.data() + a.size()) throw ArtifactError("bad count '" + a + "'");
  return n;
}

bool tagged(const SExpr& s) { return s.is_list && s.size() >= 1 && !s.at(0).is_list && !s.at(0).quoted; }

}  // namespace

Artifact make_artifact(const Problem& pb, const EngineReport& rep) {
  Artifact a;
  const auto& spec = pb.spec();
  a.op = spec.op;
  a.components = spec.components;
  for (std::size_t k = 0; k < pb.width(); ++k) a.outputs.push_back(pb.out(k).name());
  a.aux = spec.aux;
  a.fingerprint = pb.fingerprint();
  for (std::size_t k = 0; k < pb.width(); ++k) {
    ArtifactComponent c;
    c.name = pb.out(k).name();
    c.expr = rep.tuple.at(k);
    c.origin = rep.origin.at(k);
    c.positives = rep.positives.size();
    c.negatives = rep.negatives.at(k).size();
    c.dropped = rep.dropped.at(k);
    a.tuple.push_back(std::move(c));
  }
  return a;
}

Artifact direct_artifact(const Problem& pb) {
  EngineReport rep;
  for (std::size_t k = 0; k < pb.width(); ++k) {
    rep.tuple.push_back(parse_expr("(direct)"));
    rep.origin.push_back("direct");
    rep.dropped.push_back(0);
    rep.negatives.emplace_back();
  }
  return make_artifact(pb, rep);
}

std::string write_artifact(const Artifact& a) {
  std::vector<SExpr> items{SExpr::make_atom("artifact"),
                           SExpr::make_list({SExpr::make_atom("op"), SExpr::make_atom(a.op)}),
                           names("components", a.components), names("outputs", a.outputs)};
  if (!a.aux.empty()) items.push_back(names("aux", a.aux));
  items.push_back(SExpr::make_list({SExpr::make_atom("fingerprint"), SExpr::make_string(a.fingerprint)}));
  for (const auto& c : a.tuple) {
    SExpr prov = SExpr::make_list({SExpr::make_atom("provenance"),
                                   SExpr::make_list({SExpr::make_atom("origin"), SExpr::make_atom(c.origin)}),
                                   count("positives", c.positives), count("negatives", c.negatives),
                                   count("dropped", c.dropped)});
    items.push_back(SExpr::make_list({SExpr::make_atom("component"), SExpr::make_atom(c.name),
                                      expr_to_sexpr(*c.expr), std::move(prov)}));
  }
  return pretty_sexpr(SExpr::make_list(std::move(items))) + "\n";
}

Artifact read_artifact(std::string_view text) {
  SExpr root;
  try {
    root = parse_sexpr(text);
  } catch (const SExprError& e) {
    throw ArtifactError(std::string("malformed artifact: ") + e.what());
  }
  if (!tagged(root) || !root.at(0).is_atom("artifact")) throw ArtifactError("expected (artifact ...)");
  Artifact a;
  bool have_op = false, have_fp = false;
  for (std::size_t i = 1; i < root.size(); ++i) {
    const SExpr& s = root.at(i);
    if (!tagged(s)) throw ArtifactError("expected a tagged list inside (artifact ...)");
    const std::string& tag = s.at(0).atom;
    if (tag == "op") {
      auto v = read_names(s);
      if (v.size() != 1) throw ArtifactError("expected (op NAME)");
      a.op = v[0];
      have_op = true;
    } else if (tag == "components") {
      a.components = read_names(s);
    } else if (tag == "outputs") {
      a.outputs = read_names(s);
    } else if (tag == "aux") {
      a.aux = read_names(s);
    } else if (tag == "fingerprint") {
      if (s.size() != 2 || !s.at(1).quoted) throw ArtifactError("expected (fingerprint \"hex\")");
      a.fingerprint = s.at(1).atom;
      have_fp = true;
    } else if (tag == "component") {
      if (s.size() < 3 || s.at(1).is_list) throw ArtifactError("expected (component NAME EXPR ...)");
      ArtifactComponent c;
      c.name = s.at(1).atom;
      try {
        c.expr = expr_from_sexpr(s.at(2));
      } catch (const std::exception& e) {
        throw ArtifactError("component " + c.name + ": " + e.what());
      }
      for (std::size_t j = 3; j < s.size(); ++j) {
        const SExpr& p = s.at(j);
        if (!tagged(p) || !p.at(0).is_atom("provenance")) throw ArtifactError("expected (provenance ...)");
        for (std::size_t q = 1; q < p.size(); ++q) {
          const SExpr& f = p.at(q);
          if (!tagged(f)) throw ArtifactError("malformed provenance");
          const std::string& ft = f.at(0).atom;
          if (ft == "origin") {
            auto v = read_names(f);
            if (v.size() != 1) throw ArtifactError("expected (origin NAME)");
            c.origin = v[0];
          } else if (ft == "positives") {
            c.positives = read_count(f);
          } else if (ft == "negatives") {
            c.negatives = read_count(f);
          } else if (ft == "dropped") {
            c.dropped = read_count(f);
          } else {
            throw ArtifactError("unknown provenance field '" + ft + "'");
          }
        }
      }
      a.tuple.push_back(std::move(c));
    } else {
      throw ArtifactError("unknown artifact field '" + tag + "'");
    }
  }
  if (!have_op || !have_fp || a.components.empty() || a.tuple.empty())
    throw ArtifactError("artifact needs op, components, fingerprint and at least one component");
  return a;
}

std::string render_artifact(const Artifact& a) {
  std::string out = "transformer for " + a.op + "\n";
  for (const auto& c : a.tuple) out += c.name + " :=\n" + render_pseudo(*c.expr, 1) + "\n";
  return out;
}

std::vector<ExprPtr> bind_artifact(const Artifact& a, const Problem& pb) {
  if (a.fingerprint != pb.fingerprint())
    throw FingerprintMismatch("artifact fingerprint " + a.fingerprint + " does not match the problem's " +
                              pb.fingerprint());
  std::vector<ExprPtr> tuple(pb.width());
  for (const auto& c : a.tuple) {
    std::size_t k = 0;
    while (k < pb.width() && pb.out(k).name() != c.name) ++k;
    if (k == pb.width()) throw ArtifactError("artifact component '" + c.name + "' is not an output of the problem");
    if (tuple[k]) throw ArtifactError("artifact lists component '" + c.name + "' twice");
    try {
      validate_expr(*c.expr, pb.schema(), k);
    } catch (const std::exception& e) {
      throw ArtifactError("component " + c.name + ": " + e.what());
    }
    tuple[k] = c.expr;
  }
  for (std::size_t k = 0; k < pb.width(); ++k)
    if (!tuple[k]) throw ArtifactError("artifact lacks component '" + pb.out(k).name() + "'");
  return tuple;
}

}  // namespace redsynth
