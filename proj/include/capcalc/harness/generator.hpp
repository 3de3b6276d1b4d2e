#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "../capcalc.hpp"
#include "rng.hpp"

namespace capcalc::harness {

struct GenConfig {
  std::uint64_t seed = 1;
  std::size_t max_env = 8;
  std::size_t max_depth = 4;
  double box_bias = 0.5;
  double drop_rate = 0.5;  // used by the mutators
  bool hostile = false;    // allow the F<: divergence pattern
};

struct Program {
  Env env;
  Term term;
};

// Random, well-scoped, simple-formed types and well-typed terms. Every
// output is checked against the real typechecker before it is returned.
class Generator {
 public:
  explicit Generator(const GenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  Rng& rng() { return rng_; }

  // ---- names --------------------------------------------------------------

  Var fresh_var(const char* base) { return var(base + std::to_string(counter_++)); }
  TVar fresh_tvar(const char* base) { return tvar_name(base + std::to_string(counter_++)); }

  // ---- capture sets and types --------------------------------------------

  CaptureSet gen_captures(const Env& g) {
    CaptureSet c;
    auto vs = g.term_vars();
    if (vs.empty() || rng_.chance(0.4)) return rng_.chance(0.1) ? CaptureSet::root() : c;
    auto n = 1 + rng_.below(2);
    for (std::size_t i = 0; i < n; ++i) c.add(rng_.pick(vs));
    if (rng_.chance(0.1)) c.add_root();
    return c;
  }

  Type gen_type(const Env& g, std::size_t depth) {
    auto c = gen_captures(g);
    return capturing(c, gen_shape(g, depth, !c.empty()));
  }

  Shape gen_shape(const Env& g, std::size_t depth, bool no_box = false) {
    auto tvs = g.type_vars();
    bool deep = depth > 0;
    switch (rng_.weighted({3, tvs.empty() ? 0u : 2u, deep ? 3u : 0u, deep ? 1u : 0u,
                           deep && !no_box ? 2u : 0u})) {
      case 1: return tvar_shape(rng_.pick(tvs));
      case 2: {
        auto a = fresh_var("a");
        auto p = gen_type(g, depth - 1);
        return fun_shape(a, p, gen_type(g.extended(a, p), depth - 1));
      }
      case 3: {
        auto x = fresh_tvar("Y");
        auto b = gen_shape(g, depth - 1);
        return tfun_shape(x, b, gen_type(g.extended(x, b), depth - 1));
      }
      case 4: {
        auto c = gen_captures(g);
        return boxed_shape(capturing(c, gen_shape(g, depth - 1, true)));
      }
      default: return top_shape();
    }
  }

  // A supertype of t (usually; callers check).
  Type gen_super(const Env& g, const Type& t) {
    auto c = t.captures;
    if (rng_.chance(0.3)) c.merge(gen_captures(g));
    if (rng_.chance(0.3) && !c.vars().empty()) {
      // replace an element by its declared set (sc-var in reverse)
      auto v = *std::next(c.vars().begin(), rng_.below(c.vars().size()));
      if (auto d = g.lookup(v)) c = c.without(v).united(d->captures);
    }
    if (rng_.chance(0.1)) c.add_root();
    if (rng_.chance(0.12)) return capturing(c, top_shape());
    auto& s = t.shape;
    if (auto* x = s.as<TVarShape>()) {
      if (rng_.chance(0.5))
        if (auto b = g.lookup(x->var)) return capturing(c, *b);
      return capturing(c, s);
    }
    if (auto* f = s.as<FunShape>()) {
      auto p = gen_sub(g, f->param);
      return capturing(c, fun_shape(f->binder, p, gen_super(g.extended(f->binder, p), f->result)));
    }
    if (auto* f = s.as<TFunShape>())
      return capturing(c, tfun_shape(f->binder, f->bound, gen_super(g.extended(f->binder, f->bound), f->result)));
    if (auto* b = s.as<BoxedShape>()) return capturing(c, boxed_shape(gen_super(g, b->inner)));
    return capturing(c, s);
  }

  // A subtype of t (usually; callers check).
  Type gen_sub(const Env& g, const Type& t) {
    CaptureSet c;
    c = t.captures;
    for (auto& v : t.captures.vars())
      if (rng_.chance(0.3)) c.remove(v);
    if (c.has_root() && rng_.chance(0.3)) c = CaptureSet(c.vars());
    auto& s = t.shape;
    if (s.is<TopShape>() && rng_.chance(0.3)) return capturing(c, gen_shape(g, 1, !c.empty()));
    if (auto* x = s.as<TVarShape>()) {
      for (auto& y : g.type_vars())
        if (auto b = g.lookup(y); b && b->is<TVarShape>() && b->as<TVarShape>()->var == x->var && rng_.chance(0.5))
          return capturing(c, tvar_shape(y));
      return capturing(c, s);
    }
    if (auto* f = s.as<FunShape>()) {
      auto p = gen_super(g, f->param);
      return capturing(c, fun_shape(f->binder, p, gen_sub(g.extended(f->binder, f->param), f->result)));
    }
    if (auto* f = s.as<TFunShape>())
      return capturing(c, tfun_shape(f->binder, f->bound, gen_sub(g.extended(f->binder, f->bound), f->result)));
    if (auto* b = s.as<BoxedShape>()) return capturing(c, boxed_shape(gen_sub(g, b->inner)));
    return capturing(c, s);
  }

  // Adds or removes boxes at random positions (for adaptation inputs).
  Type perturb_boxes(const Type& t) {
    if (auto* b = t.shape.as<BoxedShape>(); b && rng_.chance(0.3)) return perturb_boxes(b->inner);
    auto s = perturb_shape(t.shape);
    if (!s.is<BoxedShape>() && rng_.chance(0.2)) return shape_type(boxed_shape(capturing(t.captures, s)));
    return capturing(t.captures, s);
  }

  // ---- environments -------------------------------------------------------

  Env gen_env() {
    Env g;
    static const char* caps[] = {"io", "fs", "net"};
    auto ncaps = 1 + rng_.below(3);
    std::vector<Var> cs;
    for (std::size_t i = 0; i < ncaps; ++i) {
      cs.push_back(var(caps[i]));
      g = g.extended(cs.back(), capturing(CaptureSet::root(), top_shape()));
    }
    auto cap_set = [&] {
      CaptureSet c{rng_.pick(cs)};
      if (rng_.chance(0.3)) c.add(rng_.pick(cs));
      return c;
    };
    auto payload = [&] {
      auto c = cap_set();
      switch (rng_.below(3)) {
        case 0: return capturing(c, top_shape());
        case 1: {
          auto u = fresh_var("u");
          return capturing(c, fun_shape(u, top_type(), top_type()));
        }
        default: {
          auto a = fresh_var("a");
          return capturing(c, fun_shape(a, capturing(c, top_shape()), capturing(CaptureSet{a}, top_shape())));
        }
      }
    };

    std::vector<TVar> tvs;
    auto ntv = rng_.below(3);
    for (std::size_t i = 0; i < ntv; ++i) {
      auto x = fresh_tvar("X");
      Shape b = top_shape();
      switch (rng_.below(4)) {
        case 1: b = payload().shape; break;
        case 2: b = boxed_shape(payload()); break;
        case 3:
          if (!tvs.empty()) b = tvar_shape(rng_.pick(tvs));
          break;
        default: break;
      }
      g = g.extended(x, b);
      tvs.push_back(x);
    }

    if (cfg_.hostile) {
      auto h = tvar_name("H");
      g = g.extended(h, parse_shape("all [A <: Top] -> all [Y <: all [B <: A] -> all [Z <: B] -> Z] -> Y"));
      g = g.extended(var("hq"), shape_type(tfun_shape(tvar_name("W"), parse_shape("all [B <: H] -> all [Z <: B] -> Z"),
                                                      top_type())));
    }

    auto budget = cfg_.max_env > g.size() ? cfg_.max_env - g.size() : 1;
    for (std::size_t i = 0; i < budget; ++i) {
      Var v = fresh_var("v");
      Type ty = top_type();
      switch (rng_.below(11)) {
        case 0: ty = capturing(cap_set(), top_shape()); break;
        case 1: {
          auto a = fresh_var("a");
          auto c = cap_set();
          ty = capturing(c, fun_shape(a, capturing(c, top_shape()), capturing(CaptureSet{a}, top_shape())));
          break;
        }
        case 2: {
          auto a = fresh_var("a");
          ty = shape_type(fun_shape(a, shape_type(boxed_shape(payload())), top_type()));
          break;
        }
        case 3: ty = shape_type(boxed_shape(payload())); break;
        case 4: {
          auto x = fresh_tvar("Y");
          auto a = fresh_var("a");
          ty = shape_type(tfun_shape(x, top_shape(), shape_type(fun_shape(a, shape_type(tvar_shape(x)),
                                                                         capturing(CaptureSet{a}, tvar_shape(x))))));
          break;
        }
        case 5: {
          // higher-order consumer plus a matching plain consumer: eta fodder
          auto p = payload();
          auto a = fresh_var("a"), k = fresh_var("k"), b = fresh_var("a");
          auto inner = capturing(CaptureSet::root(), fun_shape(a, shape_type(boxed_shape(p)), top_type()));
          ty = shape_type(fun_shape(k, inner, top_type()));
          g = g.extended(fresh_var("v"), shape_type(fun_shape(b, p, top_type())));
          break;
        }
        case 6: {
          auto a = fresh_var("a");
          ty = shape_type(fun_shape(a, payload(), top_type()));
          break;
        }
        case 7:
          if (!tvs.empty()) ty = capturing(cap_set(), tvar_shape(rng_.pick(tvs)));
          break;
        case 8: {
          auto a = fresh_var("a");
          auto c = cap_set();
          ty = shape_type(boxed_shape(capturing(c, fun_shape(a, capturing(c, top_shape()), capturing(CaptureSet{a}, top_shape())))));
          break;
        }
        case 9: {
          auto x = fresh_tvar("Y");
          auto a = fresh_var("a");
          auto c = cap_set();
          ty = shape_type(tfun_shape(x, top_shape(),
                                     shape_type(fun_shape(a, shape_type(boxed_shape(capturing(c, tvar_shape(x)))), top_type()))));
          break;
        }
        default: {
          ty = gen_type(g, 2);
          if (!is_simple_formed(ty)) ty = top_type();
          break;
        }
      }
      g = g.extended(v, ty);
    }
    return g;
  }

  // ---- terms --------------------------------------------------------------

  Term gen_term(const Env& g, std::size_t depth) {
    if (depth > 0) {
      switch (rng_.weighted({5, 2, 1, 3})) {
        case 0: {
          auto s = gen_term(g, depth - 1);
          auto ty = try_type(g, s);
          if (!ty) break;
          auto x = fresh_var("x");
          return let_(x, s, gen_term(g.extended(x, *ty), depth - 1));
        }
        case 1: {
          auto a = fresh_var("a");
          auto p = param_type(g);
          return abs_(a, p, gen_term(g.extended(a, p), depth - 1));
        }
        case 2: {
          auto x = fresh_tvar("Y");
          auto b = rng_.chance(0.5) ? top_shape() : gen_shape(g, 1);
          return tabs(x, b, gen_term(g.extended(x, b), depth - 1));
        }
        default: break;
      }
    }
    return atomic(g);
  }

  Program gen_welltyped() {
    for (int attempt = 0; attempt < 50; ++attempt) {
      auto g = gen_env();
      auto t = gen_term(g, cfg_.max_depth);
      if (cfg_.hostile) return {g, t};
      if (try_type(g, t)) return {g, t};
    }
    fail(ErrorKind::GenerationExhausted, "gen", "could not generate a well-typed term");
  }

  std::optional<Type> try_type(const Env& g, const Term& t) {
    try {
      // hostile environments diverge on purpose; give up early there
      Fuel fuel(cfg_.hostile ? 500 : kDefaultFuel);
      return typecheck(g, t, fuel);
    } catch (const Error&) {
      return std::nullopt;
    } catch (const FuelExhausted&) {
      return std::nullopt;
    }
  }

 private:
  Shape perturb_shape(const Shape& s) {
    if (auto* f = s.as<FunShape>()) return fun_shape(f->binder, perturb_boxes(f->param), perturb_boxes(f->result));
    if (auto* f = s.as<TFunShape>()) return tfun_shape(f->binder, f->bound, perturb_boxes(f->result));
    if (auto* b = s.as<BoxedShape>()) return boxed_shape(perturb_boxes(b->inner));
    return s;
  }

  Type param_type(const Env& g) {
    auto vs = g.term_vars();
    switch (rng_.below(4)) {
      case 0: {
        // a capability-like parameter
        CaptureSet c;
        if (!vs.empty()) c.add(rng_.pick(vs));
        return capturing(c, top_shape());
      }
      case 1:
        if (!vs.empty()) {
          // same type as something in scope, so it can be passed on
          auto t = *g.lookup(rng_.pick(vs));
          if (is_simple_formed(t)) return t;
        }
        return top_type();
      default: {
        auto t = gen_type(g, 1);
        return is_simple_formed(t) ? t : top_type();
      }
    }
  }

  bool sub(const Env& g, const Type& a, const Type& b) {
    try {
      Fuel fuel(cfg_.hostile ? 500 : 2000);
      return subtype(g, a, b, fuel);
    } catch (...) {
      return false;
    }
  }

  Term atomic(const Env& g) {
    std::vector<Term> plain, boxy;
    auto vs = g.term_vars();
    bool allow_box = cfg_.box_bias > 0;
    for (auto& x : vs) {
      plain.push_back(var_ref(x));
      if (allow_box) boxy.push_back(box_(x));
      auto w = widen_var(g, x);
      if (auto* b = w.shape.as<BoxedShape>(); b && allow_box && g.dom_contains(b->inner.captures)) {
        auto c = b->inner.captures;
        if (rng_.chance(0.3)) c.add(rng_.pick(vs));
        boxy.push_back(unbox_(c, x));
      }
    }
    // keep the candidate search bounded on big environments
    for (std::size_t k = 0; k < 6 && !vs.empty(); ++k) {
      auto f = rng_.pick(vs);
      auto ft = widen_var(g, f);
      Term head = var_ref(f);
      Var fv = f;
      bool unboxed_head = false;
      if (auto* b = ft.shape.as<BoxedShape>(); b && allow_box && g.dom_contains(b->inner.captures)) {
        fv = fresh_var("h");
        head = unbox_(b->inner.captures, f);
        ft = b->inner;
        if (auto* tv = ft.shape.as<TVarShape>()) ft = capturing(ft.captures, widen_tvar(g, tv->var));
        unboxed_head = true;
      }
      auto wrap = [&](Term body) { return unboxed_head ? let_(fv, head, body) : body; };
      if (auto* fn = ft.shape.as<FunShape>()) {
        for (std::size_t j = 0; j < 4; ++j) {
          auto a = rng_.pick(vs);
          auto at = var_type(g, a);
          auto* pb = fn->param.shape.as<BoxedShape>();
          if (sub(g, at, fn->param)) (unboxed_head ? boxy : plain).push_back(wrap(app(fv, a)));
          if (!allow_box) continue;
          if (pb && sub(g, at, pb->inner)) {
            auto y = fresh_var("y");
            boxy.push_back(let_(y, box_(a), wrap(app(fv, y))));
          }
          auto aw = widen_var(g, a);
          if (auto* ab = aw.shape.as<BoxedShape>(); ab && g.dom_contains(ab->inner.captures) && sub(g, ab->inner, fn->param)) {
            auto y = fresh_var("y");
            boxy.push_back(let_(y, unbox_(ab->inner.captures, a), wrap(app(fv, y))));
          }
          // eta: the parameter wants a function over a boxed argument
          if (auto* pf = fn->param.shape.as<FunShape>()) {
            auto* zb = pf->param.shape.as<BoxedShape>();
            auto a2 = widen_var(g, a).shape.as<FunShape>();
            if (zb && a2 && g.dom_contains(zb->inner.captures)) {
              auto z = fresh_var("z"), o = fresh_var("o"), w = fresh_var("w");
              auto lam = abs_(z, pf->param, let_(o, unbox_(zb->inner.captures, z), app(a, o)));
              boxy.push_back(let_(w, lam, wrap(app(fv, w))));
            }
          }
        }
      }
      if (auto* tf = ft.shape.as<TFunShape>()) {
        std::vector<Shape> args;
        if (is_wf(g, shape_type(tf->bound))) args.push_back(tf->bound);
        for (auto& y : g.type_vars()) args.push_back(tvar_shape(y));
        args.push_back(top_shape());
        args.push_back(gen_shape(g, 1));
        if (allow_box) args.push_back(boxed_shape(var_type(g, rng_.pick(vs))));
        for (auto& s : args)
          if (sub(g, shape_type(s), shape_type(tf->bound))) {
            bool boxed_arg = s.is<BoxedShape>() || unboxed_head;
            (boxed_arg ? boxy : plain).push_back(wrap(tapp(fv, s)));
          }
      }
    }
    if (cfg_.hostile && g.binds(var("hq")) && rng_.chance(0.3)) return tapp(var("hq"), tvar_shape(tvar_name("H")));
    auto& pool = (!boxy.empty() && rng_.chance(cfg_.box_bias)) ? boxy : plain;
    if (pool.empty()) return var_ref(vs.empty() ? var("unbound") : vs.front());
    // prefer candidates that do something: variables are cheap filler
    for (int tries = 0; tries < 8; ++tries) {
      auto& c = rng_.pick(pool);
      if (try_type(g, c)) return c;
    }
    return var_ref(rng_.pick(vs));
  }

  GenConfig cfg_;
  Rng rng_;
  std::size_t counter_ = 0;
};

inline Program gen_welltyped(const GenConfig& cfg) { return Generator(cfg).gen_welltyped(); }

}  // namespace capcalc::harness
