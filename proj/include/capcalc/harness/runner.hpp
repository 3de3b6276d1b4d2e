#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../capcalc.hpp"
#include "generator.hpp"
#include "mutate.hpp"

namespace capcalc::harness {

enum class Status { Pass, Skip, Fail, Finding };

struct Verdict {
  Status status = Status::Pass;
  std::string detail;
};
inline Verdict pass() { return {}; }
inline Verdict skip(std::string why = {}) { return {Status::Skip, std::move(why)}; }
inline Verdict fail(std::string why) { return {Status::Fail, std::move(why)}; }
inline Verdict finding(std::string why) { return {Status::Finding, std::move(why)}; }

// One generated input. Not every property uses every field.
struct Case {
  Env env;
  std::optional<Term> term;
  std::vector<Type> types;
  std::optional<Var> x;  // a distinguished binding of env (avoid, narrowing)
};

inline std::string describe(const Case& c) {
  std::ostringstream os;
  os << print(c.env);
  if (c.x) os << "x = " << print(CaptureSet{*c.x}) << "\n";
  if (c.term) os << "term: " << print(*c.term) << "\n";
  for (auto& t : c.types) os << "type: " << print(t) << "\n";
  return os.str();
}

struct RunConfig {
  GenConfig gen;
  std::size_t count = 100;
  bool mixed_bias = true;  // per-case box_bias drawn from {0, .25, .5, .75, 1}
  double mirror_k = 8;     // termination mirror ratio
  std::size_t fuel = kDefaultFuel;
  bool broken_cv = false;  // mutation mode: the harness must catch this
  bool shrink = true;
  // keep generating until this many non-skipped cases per property (0 = off)
  std::size_t min_checked = 0;
  std::size_t max_attempts = 0;  // cap when min_checked is set (0 = 20×count)
};

struct Ctx {
  const RunConfig& cfg;
  std::uint64_t seed;

  Fuel fuel() const { return Fuel(cfg.fuel); }
};

struct Property {
  std::string name;
  std::string about;
  std::function<Case(Generator&, const Ctx&)> gen;
  std::function<Verdict(const Case&, const Ctx&)> check;
};

struct Failure {
  std::string property;
  std::uint64_t seed = 0;
  Status status = Status::Fail;
  std::string input;  // minimized
  std::string detail;
};

struct PropStats {
  std::size_t run = 0, passed = 0, skipped = 0, failed = 0, findings = 0;
  double seconds = 0;
};

struct Report {
  std::size_t cases_run = 0;
  std::vector<Failure> failures;  // includes findings; see status
  std::map<std::string, PropStats> stats;

  std::size_t failure_count() const {
    return std::count_if(failures.begin(), failures.end(), [](auto& f) { return f.status == Status::Fail; });
  }
  bool ok() const { return failure_count() == 0; }
};

// ---- a deliberately wrong cv, for mutation mode ------------------------------

inline CaptureSet mutant_cv(const Term& t) {
  return std::visit(overloaded{
                        [&](const Unbox& u) { return CaptureSet{u.x}; },  // forgets the annotation
                        [&](const Abs& a) { return mutant_cv(a.body).without(a.x); },
                        [&](const TAbs& a) { return mutant_cv(a.body); },
                        [&](const Let& l) {
                          auto body = mutant_cv(l.body);
                          if (is_answer(l.bound) && !body.contains(l.x)) return body;
                          return mutant_cv(l.bound).united(body.without(l.x));
                        },
                        [&](const auto&) { return cv(t); },
                    },
                    t.node().v);
}

// ---- generators shared by several properties ---------------------------------

namespace gen {

inline Case program(Generator& g, const Ctx&) {
  auto p = g.gen_welltyped();
  return {p.env, p.term, {}, {}};
}

// a well-typed program with some boxes (and eta wrappers) removed
inline Case perturbed(Generator& g, const Ctx& ctx) {
  auto p = g.gen_welltyped();
  auto t = drop_boxes(p.term, g.rng(), ctx.cfg.gen.drop_rate);
  t = drop_eta(t, g.rng(), ctx.cfg.gen.drop_rate);
  return {p.env, t, {}, {}};
}

// half intact, half perturbed: the equivalence corpus
inline Case mixed(Generator& g, const Ctx& ctx) {
  return g.rng().chance(0.5) ? program(g, ctx) : perturbed(g, ctx);
}

inline Type simple_type(Generator& g, const Env& env, std::size_t depth) {
  for (int i = 0; i < 20; ++i) {
    auto t = g.gen_type(env, depth);
    if (is_simple_formed(t)) return t;
  }
  return top_type();
}

inline Case one_type(Generator& g, const Ctx&) {
  auto env = g.gen_env();
  return {env, {}, {simple_type(g, env, 3)}, {}};
}

// a pair (T, U) that is usually related by subtyping one way or the other
inline Case type_pair(Generator& g, const Ctx&) {
  auto env = g.gen_env();
  auto t = simple_type(g, env, 3);
  switch (g.rng().below(4)) {
    case 0: return {env, {}, {t, g.gen_super(env, t)}, {}};
    case 1: return {env, {}, {g.gen_sub(env, t), t}, {}};
    case 2: return {env, {}, {t, simple_type(g, env, 3)}, {}};
    default: return {env, {}, {t, g.gen_super(env, g.gen_super(env, t))}, {}};
  }
}

inline Case type_chain(Generator& g, const Ctx&) {
  auto env = g.gen_env();
  if (g.rng().chance(0.5)) {
    auto t = simple_type(g, env, 3);
    auto u = g.gen_super(env, t);
    return {env, {}, {t, u, g.gen_super(env, u)}, {}};
  }
  auto v = simple_type(g, env, 3);
  auto u = g.gen_sub(env, v);
  return {env, {}, {g.gen_sub(env, u), u, v}, {}};
}

// inputs to adaptation: supertypes with boxes moved around
inline Case adapt_pair(Generator& g, const Ctx&) {
  auto env = g.gen_env();
  auto t = simple_type(g, env, 3);
  if (g.rng().chance(0.3)) t = g.perturb_boxes(t);
  auto u = g.rng().chance(0.7) ? g.perturb_boxes(g.gen_super(env, t)) : g.gen_super(env, t);
  return {env, {}, {t, u}, {}};
}

inline Case related_pair(Generator& g, const Ctx&) {
  auto env = g.gen_env();
  auto t = simple_type(g, env, 3);
  return {env, {}, {t, g.gen_super(env, t)}, {}};
}

// Γ, x : D S  and a type T under it
inline Case avoid_case(Generator& g, const Ctx&) {
  auto env = g.gen_env();
  auto x = g.fresh_var("x");
  auto tx = simple_type(g, env, 2);
  if (tx.captures.empty()) tx = capturing(g.gen_captures(env), tx.shape.is<BoxedShape>() ? top_shape() : tx.shape);
  auto ext = env.extended(x, tx);
  auto t = simple_type(g, ext, 3);
  if (g.rng().chance(0.6)) t = capturing(t.captures.with(x), t.shape.is<BoxedShape>() ? top_shape() : t.shape);
  // a candidate upper bound that does not mention x
  auto d = tx.captures;
  auto av = avoid(x, d, t);
  auto up = g.gen_super(env, g.rng().chance(0.5) ? av : g.gen_super(ext, t));
  return {ext, {}, {t, up}, x};
}

// a subtyping pair plus a narrower replacement for one term binding
inline Case narrowing_case(Generator& g, const Ctx& ctx) {
  auto c = type_pair(g, ctx);
  auto vs = c.env.term_vars();
  auto x = g.rng().pick(vs);
  auto tx = *c.env.lookup(x);
  c.types.push_back(g.gen_sub(c.env, tx));
  c.x = x;
  return c;
}

}  // namespace gen

// ---- helpers -----------------------------------------------------------------

namespace detail {

template <class F>
auto attempt(F&& f) -> std::optional<decltype(f())> {
  try {
    return f();
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline std::string cs_str(const CaptureSet& c) { return print(c); }

inline Env replace_binding(const Env& env, const Var& x, const Type& t) {
  std::vector<Binding> bs;
  for (auto& b : env.bindings()) {
    if (auto* tb = std::get_if<TermBind>(&b); tb && tb->x == x)
      bs.push_back(TermBind{x, t});
    else
      bs.push_back(b);
  }
  return make_env(bs);
}

inline bool sub_ok(const Ctx& ctx, const Env& g, const Type& a, const Type& b) {
  auto fuel = ctx.fuel();
  return subtype(g, a, b, fuel);
}

}  // namespace detail

// ---- the property table ----------------------------------------------------------

inline const std::vector<Property>& properties() {
  using detail::attempt;
  static const std::vector<Property> props = {
      {"adp-completeness", "infer returns well-typed terms unchanged, at the same type", gen::program,
       [](const Case& c, const Ctx& ctx) {
         auto fuel = ctx.fuel();
         auto ty = attempt([&] { return typecheck(c.env, *c.term, fuel); });
         if (!ty) return skip("not well-typed");
         Fuel f2(ctx.cfg.fuel);
         std::optional<Inferred> r;
         try {
           r = infer(c.env, *c.term, f2);
         } catch (const Error& e) {
           return fail(std::string("infer rejected: ") + e.what());
         }
         if (!alpha_eq(r->term, *c.term)) return fail("term changed: " + print(r->term));
         if (!alpha_eq(r->type, *ty)) return fail("typecheck: " + print(*ty) + "\ninfer: " + print(r->type));
         return pass();
       }},

      {"adp-soundness", "whatever infer elaborates typechecks at a subtype of the inferred type", gen::perturbed,
       [](const Case& c, const Ctx& ctx) {
         Fuel fuel(ctx.cfg.fuel);
         auto r = attempt([&] { return infer(c.env, *c.term, fuel); });
         if (!r) return skip("rejected by infer");
         Fuel f2(ctx.cfg.fuel);
         std::optional<Type> back;
         try {
           back = typecheck(c.env, r->term, f2);
         } catch (const Error& e) {
           return fail("elaborated " + print(r->term) + "\nrejected: " + e.what());
         }
         if (!detail::sub_ok(ctx, c.env, *back, r->type))
           return fail("elaborated " + print(r->term) + "\nchecks at " + print(*back) + "\nnot <: " + print(r->type));
         return pass();
       }},

      {"adp-adpt-equivalence", "term-level and type-level inference agree", gen::mixed,
       [](const Case& c, const Ctx& ctx) {
         Fuel f1(ctx.cfg.fuel), f2(ctx.cfg.fuel);
         std::optional<Inferred> a;
         std::optional<InferredT> b;
         std::string ea, eb;
         try {
           a = infer(c.env, *c.term, f1);
         } catch (const Error& e) {
           ea = e.what();
         }
         try {
           b = infer_t(c.env, *c.term, f2);
         } catch (const Error& e) {
           eb = e.what();
         }
         if (!a && !b) return pass();
         if (!a) return fail("term engine rejected (" + ea + "), type engine gave " + print(b->type));
         if (!b) return fail("type engine rejected (" + eb + "), term engine gave " + print(a->term));
         if (!alpha_eq(a->type, b->type)) return fail("types differ: " + print(a->type) + " vs " + print(b->type));
         auto want = ctx.cfg.broken_cv ? mutant_cv(a->term) : cv(a->term);
         if (b->captures != want)
           return fail("cv(" + print(a->term) + ") = " + print(want) + " but type engine says " + print(b->captures));
         return pass();
       }},

      {"sub-reflexivity", "T <: T", gen::one_type,
       [](const Case& c, const Ctx& ctx) {
         return detail::sub_ok(ctx, c.env, c.types[0], c.types[0]) ? pass() : fail("not reflexive");
       }},

      {"sub-transitivity", "T <: U and U <: V imply T <: V", gen::type_chain,
       [](const Case& c, const Ctx& ctx) {
         auto& ts = c.types;
         if (!detail::sub_ok(ctx, c.env, ts[0], ts[1]) || !detail::sub_ok(ctx, c.env, ts[1], ts[2]))
           return skip("premises do not hold");
         return detail::sub_ok(ctx, c.env, ts[0], ts[2]) ? pass() : fail("T <: V fails");
       }},

      {"sub-capt-equivalence", "subtype and subtype_capt agree", gen::type_pair,
       [](const Case& c, const Ctx& ctx) {
         auto f1 = ctx.fuel(), f2 = ctx.fuel();
         bool a = subtype(c.env, c.types[0], c.types[1], f1);
         bool b = subtype_capt(c.env, c.types[0], c.types[1], f2);
         if (a != b) return fail(std::string("subtype says ") + (a ? "yes" : "no") + ", subtype_capt says " + (b ? "yes" : "no"));
         return pass();
       }},

      {"sub-captures", "T <: U implies cs(T) <: cs(U)", gen::type_pair,
       [](const Case& c, const Ctx& ctx) {
         if (!detail::sub_ok(ctx, c.env, c.types[0], c.types[1])) return skip("not a subtype");
         return subcapture(c.env, c.types[0].captures, c.types[1].captures) ? pass() : fail("capture sets unrelated");
       }},

      {"narrowing", "subtyping survives narrowing a term binding", gen::narrowing_case,
       [](const Case& c, const Ctx& ctx) {
         auto x = *c.x;
         auto old = *c.env.lookup(x);
         auto& nt = c.types[2];
         // the replacement must be well-formed where the binding lives
         std::vector<Binding> prefix;
         for (auto& b : c.env.bindings()) {
           if (auto* tb = std::get_if<TermBind>(&b); tb && tb->x == x) break;
           prefix.push_back(b);
         }
         auto pre = make_env(prefix);
         if (!is_wf(pre, nt) || !is_simple_formed(nt) || !detail::sub_ok(ctx, pre, nt, old)) return skip("no narrower type");
         if (!detail::sub_ok(ctx, c.env, c.types[0], c.types[1])) return skip("premise does not hold");
         auto narrow = detail::replace_binding(c.env, x, nt);
         return detail::sub_ok(ctx, narrow, c.types[0], c.types[1]) ? pass() : fail("lost after narrowing");
       }},

      {"subcapture-transitivity", "C1 <: C2 and C2 <: C3 imply C1 <: C3", gen::type_chain,
       [](const Case& c, const Ctx&) {
         auto& a = c.types[0].captures;
         auto& b = c.types[1].captures;
         auto& d = c.types[2].captures;
         if (!subcapture(c.env, a, a)) return fail("not reflexive on " + print(a));
         if (!subcapture(c.env, a, b) || !subcapture(c.env, b, d)) return skip("premises do not hold");
         return subcapture(c.env, a, d) ? pass() : fail("C1 <: C3 fails");
       }},

      {"adapt-identity", "adaptation returns the input when subtyping already holds", gen::related_pair,
       [](const Case& c, const Ctx& ctx) {
         auto ns = supply_for(c.env, c.types[0], c.types[1]);
         auto x = ns.fresh("x");
         auto g = c.env.extended(x, c.types[0]);
         if (!detail::sub_ok(ctx, g, c.types[0], c.types[1])) return skip("not a subtype");
         auto fuel = ctx.fuel();
         std::optional<Term> r;
         try {
           r = adapt_sub(g, x, c.types[0], c.types[1], fuel, ns);
         } catch (const Error& e) {
           return fail(std::string("adaptation failed: ") + e.what());
         }
         if (auto* v = r->as<VarRef>(); v && v->x == x) return pass();
         return fail("got " + print(*r));
       }},

      {"adapt-equivalence", "adapt_sub and adapt_sub_t agree on kind and captured variables", gen::adapt_pair,
       [](const Case& c, const Ctx& ctx) {
         auto ns = supply_for(c.env, c.types[0], c.types[1]);
         auto x = ns.fresh("x");
         auto g = c.env.extended(x, c.types[0]);
         auto f1 = ctx.fuel(), f2 = ctx.fuel();
         std::optional<Adapted> a;
         std::optional<AdaptResult> b;
         std::string ea, eb;
         try {
           a = adapt_sub_traced(g, x, c.types[0], c.types[1], f1, ns);
         } catch (const Error& e) {
           ea = e.what();
         }
         try {
           b = adapt_sub_t(g, c.types[0], c.types[1], f2);
         } catch (const Error& e) {
           eb = e.what();
         }
         if (!a && !b) return pass();
         if (!a) return fail("term side rejected (" + ea + ")");
         if (!b) return fail("type side rejected (" + eb + "), term side gave " + print(a->term));
         if (kind_of(a->term) != b->kind)
           return fail("kind of " + print(a->term) + " is " + print(kind_of(a->term)) + ", predicted " + print(b->kind));
         auto got = ctx.cfg.broken_cv ? mutant_cv(a->term) : cv(a->term);
         if (got != fill_hole(b->leak, x))
           return fail("cv(" + print(a->term) + ") = " + print(got) + ", predicted " + print(b->leak));
         return pass();
       }},

      {"hole-presence", "the predicted leak mentions the input unless the root rule boxes", gen::adapt_pair,
       [](const Case& c, const Ctx& ctx) {
         auto f = ctx.fuel();
         auto b = attempt([&] { return adapt_sub_t(c.env, c.types[0], c.types[1], f); });
         if (!b) return skip("rejected");
         if (b->root == AdaptRule::Box || b->leak.hole) return pass();
         return fail(std::string("no hole under ") + to_string(b->root));
       }},

      {"adapt-var-stability", "a bare variable result is the input variable", gen::adapt_pair,
       [](const Case& c, const Ctx& ctx) {
         auto ns = supply_for(c.env, c.types[0], c.types[1]);
         auto x = ns.fresh("x");
         auto g = c.env.extended(x, c.types[0]);
         auto f = ctx.fuel();
         auto a = attempt([&] { return adapt_sub(g, x, c.types[0], c.types[1], f, ns); });
         if (!a) return skip("rejected");
         if (auto* v = a->as<VarRef>(); v && v->x != x) return fail("returned " + print(*a));
         return pass();
       }},

      {"monotone-captures", "outside a top-level box the adapted term still captures its input", gen::adapt_pair,
       [](const Case& c, const Ctx& ctx) {
         auto ns = supply_for(c.env, c.types[0], c.types[1]);
         auto x = ns.fresh("x");
         auto g = c.env.extended(x, c.types[0]);
         auto f = ctx.fuel();
         auto a = attempt([&] { return adapt_sub_traced(g, x, c.types[0], c.types[1], f, ns); });
         if (!a) return skip("rejected");
         if (a->root == AdaptRule::Box || cv(a->term).contains(x)) return pass();
         return fail(print(a->term) + " does not capture the input");
       }},

      {"normalize-preservation", "normalize keeps the type up to subtyping", gen::program,
       [](const Case& c, const Ctx& ctx) {
         auto f = ctx.fuel();
         auto ty = attempt([&] { return typecheck(c.env, *c.term, f); });
         if (!ty) return skip("not well-typed");
         auto n = normalize(*c.term);
         std::optional<Type> back;
         try {
           Fuel f2(ctx.cfg.fuel);
           back = typecheck(c.env, n, f2);
         } catch (const Error& e) {
           return fail("normalized " + print(n) + "\nrejected: " + e.what());
         }
         if (!detail::sub_ok(ctx, c.env, *back, *ty)) return fail(print(n) + " : " + print(*back) + " not <: " + print(*ty));
         return pass();
       }},

      {"normalize-idempotence", "normalize is idempotent (reported, not required)", gen::mixed,
       [](const Case& c, const Ctx&) {
         auto n = normalize(*c.term);
         auto nn = normalize(n);
         if (!alpha_eq(n, nn)) return finding("once: " + print(n) + "\ntwice: " + print(nn));
         if (!cv(n).included_in(cv(*c.term)))
           return finding("cv grew: " + print(cv(*c.term)) + " -> " + print(cv(n)));
         return pass();
       }},

      {"termination-mirror", "infer terminates whenever the erased program checks in F<:", gen::mixed,
       [](const Case& c, const Ctx& ctx) {
         Fuel ff(ctx.cfg.fuel);
         try {
           fsub_typecheck(erase(c.env), erase(*c.term), ff);
         } catch (const Error&) {
           return skip("erased image rejected");
         } catch (const FuelExhausted&) {
           return skip("erased image diverges");
         }
         auto n = std::max<std::size_t>(ff.used(), 1);
         Fuel fc(ctx.cfg.fuel);
         try {
           infer(c.env, *c.term, fc);
         } catch (const Error&) {
         } catch (const FuelExhausted&) {
           return fail("infer ran out of fuel; F<: needed " + std::to_string(n));
         }
         if (static_cast<double>(fc.used()) > ctx.cfg.mirror_k * static_cast<double>(n))
           return finding("infer used " + std::to_string(fc.used()) + ", F<: used " + std::to_string(n));
         return pass();
       }},

      {"erase-fsub", "erased well-typed programs check in F<:", gen::program,
       [](const Case& c, const Ctx& ctx) {
         auto f = ctx.fuel();
         if (!attempt([&] { return typecheck(c.env, *c.term, f); })) return skip("not well-typed");
         auto d = erase(c.env);
         auto e = erase(*c.term);
         if (!alpha_eq(erase(e), e)) return fail("erase not idempotent");
         try {
           Fuel ff(ctx.cfg.fuel);
           fsub_typecheck(d, e, ff);
         } catch (const Error& err) {
           return fail(print(e) + " rejected: " + err.what());
         }
         return pass();
       }},

      {"roundtrip", "print then parse is alpha-stable", gen::program,
       [](const Case& c, const Ctx&) {
         auto back = attempt([&] { return parse_term(print(*c.term)); });
         if (!back || !alpha_eq(*back, *c.term)) return fail("term did not round-trip: " + print(*c.term));
         auto genv = attempt([&] { return parse_env(print(c.env)); });
         if (!genv || print(*genv) != print(c.env)) return fail("environment did not round-trip");
         if (auto ty = attempt([&] { return typecheck(c.env, *c.term); })) {
           auto tb = attempt([&] { return parse_type(print(*ty)); });
           if (!tb || !alpha_eq(*tb, *ty)) return fail("type did not round-trip: " + print(*ty));
         }
         return pass();
       }},

      {"cv-subset-fv", "cv(t) ⊆ fv(t)", gen::mixed,
       [](const Case& c, const Ctx&) {
         auto f = fv(*c.term);
         auto got = cv(*c.term);
         if (got.has_root()) return fail("cv mentions cap");
         for (auto& v : got.vars())
           if (!f.count(v)) return fail(print(CaptureSet{v}) + " in cv but not fv");
         return pass();
       }},

      {"subst-composition", "renaming x to y then y to z is renaming x to z", gen::program,
       [](const Case& c, const Ctx&) {
         auto f = fv(*c.term);
         if (f.empty()) return skip("closed");
         auto x = *f.begin();
         auto ns = supply_for(c.env, *c.term);
         auto y = ns.fresh("y"), z = ns.fresh("z");
         auto a = subst(subst(*c.term, x, y, ns), y, z, ns);
         auto b = subst(*c.term, x, z, ns);
         return alpha_eq(a, b) ? pass() : fail(print(a) + " vs " + print(b));
       }},

      {"typecheck-wf", "typecheck only derives well-formed types", gen::program,
       [](const Case& c, const Ctx& ctx) {
         auto f = ctx.fuel();
         auto ty = attempt([&] { return typecheck(c.env, *c.term, f); });
         if (!ty) return skip("not well-typed");
         auto again = typecheck(c.env, *c.term);
         if (print(again) != print(*ty)) return fail("nondeterministic");
         return is_wf(c.env, *ty) ? pass() : fail(print(*ty) + " is not well-formed");
       }},

      {"avoid-soundness", "T <: avoid(x, D, T)", gen::avoid_case,
       [](const Case& c, const Ctx& ctx) {
         auto d = c.env.lookup(*c.x)->captures;
         auto av = avoid(*c.x, d, c.types[0]);
         if (fv_type(av).vars.count(*c.x)) return fail("x still free in " + print(av));
         return detail::sub_ok(ctx, c.env, c.types[0], av) ? pass() : fail(print(c.types[0]) + " not <: " + print(av));
       }},

      {"avoid-minimality", "avoid is below every x-free supertype", gen::avoid_case,
       [](const Case& c, const Ctx& ctx) {
         auto& up = c.types[1];
         if (fv_type(up).vars.count(*c.x)) return skip("bound mentions x");
         if (!detail::sub_ok(ctx, c.env, c.types[0], up)) return skip("not an upper bound");
         auto av = avoid(*c.x, c.env.lookup(*c.x)->captures, c.types[0]);
         return detail::sub_ok(ctx, c.env, av, up) ? pass() : fail(print(av) + " not <: " + print(up));
       }},
  };
  return props;
}

inline const Property* find_property(const std::string& name) {
  for (auto& p : properties())
    if (p.name == name) return &p;
  return nullptr;
}

inline std::vector<std::string> property_names() {
  std::vector<std::string> out;
  for (auto& p : properties()) out.push_back(p.name);
  return out;
}

// ---- running, replay and shrinking -----------------------------------------------

namespace detail {

inline std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ULL;
  return h;
}

inline Verdict guarded(const Property& p, const Case& c, const Ctx& ctx) {
  // inputs must be well-formed before a property is asked about them
  try {
    wf_env(c.env);
    for (auto& t : c.types) {
      if (!is_simple_formed(t)) return skip("not simple-formed");
      wf_type(c.env, t);
    }
    if (c.term) {
      auto f = free_vars(*c.term);
      for (auto& v : f.vars)
        if (!c.env.binds(v)) return skip("open term");
      for (auto& v : f.tvars)
        if (!c.env.binds(v)) return skip("open term");
    }
  } catch (const Error&) {
    return skip("ill-formed input");
  }
  try {
    return p.check(c, ctx);
  } catch (const FuelExhausted& e) {
    return skip(std::string("fuel: ") + e.what());
  } catch (const Error& e) {
    return fail(std::string("unexpected error: ") + e.what());
  }
}

inline std::vector<Term> term_shrinks(const Term& t) {
  std::vector<Term> out;
  std::visit(overloaded{
                 [&](const Let& l) {
                   if (!fv(l.body).count(l.x)) out.push_back(l.body);
                   out.push_back(l.bound);
                   for (auto& b : term_shrinks(l.bound)) out.push_back(let_(l.x, b, l.body));
                   for (auto& b : term_shrinks(l.body)) out.push_back(let_(l.x, l.bound, b));
                 },
                 [&](const Abs& a) {
                   if (!fv(a.body).count(a.x)) out.push_back(a.body);
                   for (auto& b : term_shrinks(a.body)) out.push_back(abs_(a.x, a.param, b));
                 },
                 [&](const TAbs& a) {
                   out.push_back(a.body);
                   for (auto& b : term_shrinks(a.body)) out.push_back(tabs(a.x, a.bound, b));
                 },
                 [&](const App& a) { out.push_back(var_ref(a.f)); },
                 [&](const TApp& a) { out.push_back(var_ref(a.f)); },
                 [&](const Unbox& u) { out.push_back(var_ref(u.x)); },
                 [&](const BoxV& b) { out.push_back(var_ref(b.x)); },
                 [&](const VarRef&) {},
             },
             t.node().v);
  return out;
}

inline std::vector<Type> type_shrinks(const Type& t) {
  std::vector<Type> out;
  if (!t.captures.empty()) out.push_back(shape_type(t.captures.has_root() || t.shape.is<BoxedShape>() ? top_shape() : t.shape));
  if (!t.shape.is<TopShape>()) out.push_back(capturing(t.captures, top_shape()));
  auto& s = t.shape;
  if (auto* f = s.as<FunShape>()) {
    out.push_back(f->result);
    for (auto& p : type_shrinks(f->param)) out.push_back(capturing(t.captures, fun_shape(f->binder, p, f->result)));
    for (auto& r : type_shrinks(f->result)) out.push_back(capturing(t.captures, fun_shape(f->binder, f->param, r)));
  } else if (auto* f = s.as<TFunShape>()) {
    out.push_back(f->result);
    for (auto& r : type_shrinks(f->result)) out.push_back(capturing(t.captures, tfun_shape(f->binder, f->bound, r)));
  } else if (auto* b = s.as<BoxedShape>()) {
    out.push_back(b->inner);
    for (auto& r : type_shrinks(b->inner)) out.push_back(capturing(t.captures, boxed_shape(r)));
  }
  return out;
}

}  // namespace detail

inline Case case_for(const Property& p, const RunConfig& cfg, std::uint64_t seed) {
  GenConfig gc = cfg.gen;
  gc.seed = seed;
  if (cfg.mixed_bias) gc.box_bias = 0.25 * static_cast<double>(seed % 5);
  Generator g(gc);
  Ctx ctx{cfg, seed};
  return p.gen(g, ctx);
}

inline std::uint64_t case_seed(const RunConfig& cfg, const std::string& prop, std::size_t i) {
  return mix_seed(cfg.gen.seed ^ detail::name_hash(prop), i);
}

// Greedy: environments first, then the term, then the types. Each accepted
// step still fails the same property.
inline Case shrink(const Property& p, Case c, const Ctx& ctx, Status want) {
  auto still = [&](const Case& k) { return detail::guarded(p, k, ctx).status == want; };
  for (int round = 0; round < 50; ++round) {
    bool progress = false;
    auto bs = c.env.bindings();
    for (std::size_t i = bs.size(); i-- > 0 && !progress;) {
      if (auto* tb = std::get_if<TermBind>(&bs[i]); tb && c.x && tb->x == *c.x) continue;
      auto fewer = bs;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(i));
      Case k = c;
      k.env = make_env(fewer);
      if (still(k)) c = k, progress = true;
    }
    if (progress) continue;
    if (c.term)
      for (auto& s : detail::term_shrinks(*c.term)) {
        Case k = c;
        k.term = s;
        if (still(k)) {
          c = k, progress = true;
          break;
        }
      }
    if (progress) continue;
    for (std::size_t i = 0; i < c.types.size() && !progress; ++i)
      for (auto& s : detail::type_shrinks(c.types[i])) {
        Case k = c;
        k.types[i] = s;
        if (still(k)) {
          c = k, progress = true;
          break;
        }
      }
    if (!progress) break;
  }
  return c;
}

// Re-run one case from its seed alone.
inline Verdict replay(const Property& p, const RunConfig& cfg, std::uint64_t seed) {
  Ctx ctx{cfg, seed};
  return detail::guarded(p, case_for(p, cfg, seed), ctx);
}

inline Report run_differential(const RunConfig& cfg, const std::vector<std::string>& names) {
  Report rep;
  for (auto& name : names) {
    auto* p = find_property(name);
    if (!p) continue;
    auto& st = rep.stats[name];
    auto t0 = std::chrono::steady_clock::now();
    std::size_t limit = cfg.min_checked ? (cfg.max_attempts ? cfg.max_attempts : 20 * cfg.count) : cfg.count;
    for (std::size_t i = 0; i < limit; ++i) {
      if (cfg.min_checked && st.run - st.skipped >= cfg.min_checked) break;
      auto seed = case_seed(cfg, name, i);
      Ctx ctx{cfg, seed};
      Case c;
      try {
        c = case_for(*p, cfg, seed);
      } catch (const Error&) {
        ++st.run, ++st.skipped;
        continue;
      }
      auto v = detail::guarded(*p, c, ctx);
      ++st.run;
      ++rep.cases_run;
      switch (v.status) {
        case Status::Pass: ++st.passed; break;
        case Status::Skip: ++st.skipped; break;
        case Status::Fail:
        case Status::Finding: {
          (v.status == Status::Fail ? st.failed : st.findings)++;
          auto small = cfg.shrink ? shrink(*p, c, ctx, v.status) : c;
          auto sv = detail::guarded(*p, small, ctx);
          rep.failures.push_back({name, seed, v.status, describe(small), sv.detail});
          break;
        }
      }
    }
    st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  std::stable_sort(rep.failures.begin(), rep.failures.end(),
                   [](auto& a, auto& b) { return std::tie(a.property, a.seed) < std::tie(b.property, b.seed); });
  return rep;
}

// ---- output ----------------------------------------------------------------------

inline void write_jsonl(std::ostream& os, const Report& rep) {
  for (auto& f : rep.failures) {
    nlohmann::json j = {{"property", f.property},
                        {"seed", f.seed},
                        {"status", f.status == Status::Fail ? "fail" : "finding"},
                        {"input", f.input},
                        {"detail", f.detail}};
    os << j.dump() << "\n";
  }
  for (auto& [name, st] : rep.stats) {
    nlohmann::json j = {{"property", name},  {"run", st.run},       {"passed", st.passed}, {"skipped", st.skipped},
                        {"failed", st.failed}, {"findings", st.findings}, {"seconds", st.seconds}};
    os << j.dump() << "\n";
  }
}

inline void write_summary(std::ostream& os, const Report& rep) {
  for (auto& [name, st] : rep.stats) {
    char line[256];
    std::snprintf(line, sizeof line, "%-24s run %6zu  pass %6zu  skip %6zu  fail %4zu  findings %4zu  %7.2fs\n",
                  name.c_str(), st.run, st.passed, st.skipped, st.failed, st.findings, st.seconds);
    os << line;
  }
  for (auto& f : rep.failures) {
    os << (f.status == Status::Fail ? "FAIL " : "note ") << f.property << " seed=" << f.seed << "\n";
    os << "  " << f.detail << "\n";
    std::istringstream in(f.input);
    for (std::string l; std::getline(in, l);) os << "  | " << l << "\n";
  }
  os << rep.cases_run << " cases, " << rep.failure_count() << " failures\n";
}

}  // namespace capcalc::harness
