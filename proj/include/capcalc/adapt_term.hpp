#pragma once

#include "normalize.hpp"
#include "typing.hpp"

namespace capcalc {

// Root rule of an adaptation derivation (same table for both systems).
enum class AdaptRule { Refl, TVar, Top, Boxed, Fun, TFun, Box, Unbox };

inline const char* to_string(AdaptRule r) {
  switch (r) {
    case AdaptRule::Refl: return "ba-refl";
    case AdaptRule::TVar: return "ba-tvar";
    case AdaptRule::Top: return "ba-top";
    case AdaptRule::Boxed: return "ba-boxed";
    case AdaptRule::Fun: return "ba-fun";
    case AdaptRule::TFun: return "ba-tfun";
    case AdaptRule::Box: return "ba-box";
    case AdaptRule::Unbox: return "ba-unbox";
  }
  return "?";
}

struct Adapted {
  Term term;
  AdaptRule root;  // first rule after ba-tvar widening
};

struct Inferred {
  Term term;
  Type type;
};

namespace detail {

// Rule choice for adapting C S to C' S'. Driven by the shapes only, so the
// term- and type-level engines always pick the same rule.
inline AdaptRule choose_rule(const Shape& s, const Shape& u) {
  if (auto* x = s.as<TVarShape>()) {
    if (auto* y = u.as<TVarShape>(); y && y->var == x->var) return AdaptRule::Refl;
    if (u.is<TopShape>()) return AdaptRule::Top;
    return AdaptRule::TVar;
  }
  if (u.is<TopShape>()) return AdaptRule::Top;
  bool sb = s.is<BoxedShape>(), ub = u.is<BoxedShape>();
  if (sb && ub) return AdaptRule::Boxed;
  if (sb) return AdaptRule::Unbox;
  if (ub) return AdaptRule::Box;
  if (s.is<FunShape>() && u.is<FunShape>()) return AdaptRule::Fun;
  if (s.is<TFunShape>() && u.is<TFunShape>()) return AdaptRule::TFun;
  fail(ErrorKind::AdaptFailure, "adapt", "no adaptation rule applies");
}

class TermAdapter {
 public:
  TermAdapter(Fuel& fuel, NameSupply& ns) : fuel_(fuel), ns_(ns) {}

  Adapted adapt(const Env& g, const Var& x, const Type& t, const Type& u) {
    auto rule = choose_rule(t.shape, u.shape);
    fuel_.spend(to_string(rule));
    switch (rule) {
      case AdaptRule::Refl:
      case AdaptRule::Top:
        if (!subcapture(g, t.captures, u.captures))
          fail(ErrorKind::SubcaptureFailure, to_string(rule),
               print(t.captures) + " does not subcapture " + print(u.captures));
        return {var_ref(x), rule};
      case AdaptRule::TVar: {
        auto& tv = t.shape.as<TVarShape>()->var;
        auto b = g.lookup(tv);
        if (!b) fail(ErrorKind::UnboundVariable, "ba-tvar", "unbound type variable " + tv.name);
        // report the rule that does the work, not the widening step
        return adapt(g, x, capturing(t.captures, *b), u);
      }
      case AdaptRule::Boxed: return {boxed(g, x, t, u), rule};
      case AdaptRule::Unbox: return {unboxing(g, x, t, u), rule};
      case AdaptRule::Box: return {boxing(g, x, t, u), rule};
      case AdaptRule::Fun: return {eta_fun(g, x, t, u), rule};
      case AdaptRule::TFun: return {eta_tfun(g, x, t, u), rule};
    }
    fail(ErrorKind::AdaptFailure, "adapt", "unreachable");
  }

  Inferred infer(const Env& g, const Term& t) {
    return std::visit(overloaded{
                          [&](const VarRef& v) -> Inferred {
                            fuel_.spend("bi-var");
                            return {t, var_type(g, v.x)};
                          },
                          [&](const Abs& a) { return infer_abs(g, a); },
                          [&](const TAbs& a) { return infer_tabs(g, a); },
                          [&](const App& a) { return infer_app(g, a); },
                          [&](const TApp& a) { return infer_tapp(g, a); },
                          [&](const BoxV& b) -> Inferred {
                            fuel_.spend("bi-box");
                            auto t0 = var_type(g, b.x);
                            if (!g.dom_contains(t0.captures))
                              fail(ErrorKind::EscapeViolation, "bi-box", "boxed capture set escapes");
                            return {t, shape_type(boxed_shape(t0))};
                          },
                          [&](const Unbox& u) { return infer_unbox(g, t, u); },
                          [&](const Let& l) { return infer_let(g, l); },
                      },
                      t.node().v);
  }

  // var-return / var-unbox
  Inferred unbox_var(const Env& g, const Var& x) {
    auto w = widen_var(g, x);
    if (auto* b = w.shape.as<BoxedShape>(); b && g.dom_contains(b->inner.captures))
      return {unbox_(b->inner.captures, x), b->inner};
    return {var_ref(x), w};
  }

  Term box_adapt(const Env& g, const Var& x, const Type& u) {
    wf_type(g, u);
    return adapt(g, x, var_type(g, x), u).term;
  }

 private:
  Term boxed(const Env& g, const Var& x, const Type& t, const Type& u) {
    auto& inner = t.shape.as<BoxedShape>()->inner;
    auto& target = u.shape.as<BoxedShape>()->inner;
    auto y = ns_.fresh("y");
    auto ty = adapt(g, y, inner, target).term;
    // the unbox survives normalization only when ty does real work
    if (!ty.is<VarRef>() && !g.dom_contains(inner.captures))
      fail(ErrorKind::EscapeViolation, "ba-boxed", "cannot unbox " + print(inner.captures) + " to adapt it");
    auto z = ns_.fresh("z");
    auto r = normalize(let_(y, unbox_(inner.captures, x), let_(z, ty, box_(z))), ns_);
    // No fresh box survives when the result collapses to x or to `C unbox x`;
    // then the outer capture set is still there and must fit.
    std::optional<CaptureSet> outer;
    if (r.is<VarRef>()) outer = t.captures;
    if (auto* ub = r.as<Unbox>()) outer = ub->captures;
    if (outer && !subcapture(g, *outer, u.captures))
      fail(ErrorKind::SubcaptureFailure, "ba-boxed", print(*outer) + " does not subcapture " + print(u.captures));
    return r;
  }

  Term unboxing(const Env& g, const Var& x, const Type& t, const Type& u) {
    auto& inner = t.shape.as<BoxedShape>()->inner;
    if (!g.dom_contains(inner.captures))
      fail(ErrorKind::EscapeViolation, "ba-unbox", "cannot unbox " + print(inner.captures));
    auto y = ns_.fresh("y");
    auto ty = adapt(g, y, inner, u).term;
    return let_(y, unbox_(inner.captures, x), ty);
  }

  Term boxing(const Env& g, const Var& x, const Type& t, const Type& u) {
    auto& target = u.shape.as<BoxedShape>()->inner;
    if (!g.dom_contains(target.captures))
      fail(ErrorKind::EscapeViolation, "ba-box", "cannot box into " + print(target.captures));
    auto tx = adapt(g, x, t, target).term;
    auto y = ns_.fresh("y");
    return let_(y, tx, box_(y));
  }

  Term eta_fun(const Env& g, const Var& xf, const Type& t, const Type& u) {
    auto& f = *t.shape.as<FunShape>();
    auto& h = *u.shape.as<FunShape>();
    auto x = ns_.fresh(h.binder.name);
    auto r1 = subst(f.result, f.binder, x, ns_);
    auto r2 = subst(h.result, h.binder, x, ns_);
    auto tx = adapt(g, x, h.param, f.param).term;
    auto x2 = ns_.fresh(x.name);
    auto r1p = tx.is<VarRef>() ? r1 : subst(r1, x, x2, ns_);
    auto z = ns_.fresh("z");
    auto tz = adapt(g.extended(x, h.param).extended(x2, f.param), z, r1p, r2).term;
    auto tf = normalize(abs_(x, h.param, let_(x2, tx, let_(z, app(xf, x2), tz))), ns_);
    check_closure(g, xf, t.captures, tf, u.captures, "ba-fun");
    return tf;
  }

  Term eta_tfun(const Env& g, const Var& xf, const Type& t, const Type& u) {
    auto& f = *t.shape.as<TFunShape>();
    auto& h = *u.shape.as<TFunShape>();
    if (!subtype(g, shape_type(h.bound), shape_type(f.bound), fuel_, ns_))
      fail(ErrorKind::SubtypeFailure, "ba-tfun", "type bound " + print(h.bound) + " is not below " + print(f.bound));
    auto x = ns_.fresh_tvar(h.binder.name);
    auto r1 = subst(f.result, f.binder, tvar_shape(x), ns_);
    auto r2 = subst(h.result, h.binder, tvar_shape(x), ns_);
    auto z = ns_.fresh("z");
    auto tz = adapt(g.extended(x, h.bound), z, r1, r2).term;
    auto tf = normalize(tabs(x, h.bound, let_(z, tapp(xf, tvar_shape(x)), tz)), ns_);
    check_closure(g, xf, t.captures, tf, u.captures, "ba-tfun");
    return tf;
  }

  void check_closure(const Env& g, const Var& xf, const CaptureSet& c, const Term& tf,
                     const CaptureSet& expected, const char* rule) {
    auto leaked = subst(cv(tf), xf, c);
    if (!subcapture(g, leaked, expected))
      fail(ErrorKind::SubcaptureFailure, rule,
           "adapted function captures " + print(leaked) + ", expected at most " + print(expected));
  }

  Inferred infer_abs(const Env& g, const Abs& a) {
    fuel_.spend("bi-abs");
    wf_type(g, a.param);
    auto [x, body] = fresh_if_bound(g, a.x, a.body);
    auto r = infer(g.extended(x, a.param), body);
    return {abs_(x, a.param, r.term), capturing(cv(r.term).without(x), fun_shape(x, a.param, r.type))};
  }

  Inferred infer_tabs(const Env& g, const TAbs& a) {
    fuel_.spend("bi-tabs");
    wf_shape(g, a.bound);
    auto x = a.x;
    auto body = a.body;
    if (g.binds(x)) {
      x = ns_.fresh_tvar(a.x.name);
      body = rename_tvar_in(body, a.x, x, ns_);
    }
    auto r = infer(g.extended(x, a.bound), body);
    return {tabs(x, a.bound, r.term), capturing(cv(r.term), tfun_shape(x, a.bound, r.type))};
  }

  Inferred infer_app(const Env& g, const App& a) {
    fuel_.spend("bi-app");
    auto head = unbox_var(g, a.f);
    auto* f = head.type.shape.as<FunShape>();
    if (!f) fail(ErrorKind::NotAFunction, "bi-app", a.f.name + " is not a function");
    auto ty = box_adapt(g, a.arg, f->param);
    auto x1 = ns_.fresh(a.f.name);
    auto y1 = ns_.fresh(a.arg.name);
    auto term = normalize(let_(x1, head.term, let_(y1, ty, app(x1, y1))), ns_);
    if (ty.is<VarRef>()) return {term, subst(f->result, f->binder, a.arg, ns_)};
    auto r = subst(f->result, f->binder, y1, ns_);
    return {term, avoid(y1, f->param.captures, r)};
  }

  Inferred infer_tapp(const Env& g, const TApp& a) {
    fuel_.spend("bi-tapp");
    auto head = unbox_var(g, a.f);
    auto* f = head.type.shape.as<TFunShape>();
    if (!f) fail(ErrorKind::NotATypeFunction, "bi-tapp", a.f.name + " is not a type function");
    wf_shape(g, a.arg);
    if (!subtype(g, shape_type(a.arg), shape_type(f->bound), fuel_, ns_))
      fail(ErrorKind::SubtypeFailure, "bi-tapp",
           "type argument " + print(a.arg) + " does not conform to " + print(f->bound));
    auto x1 = ns_.fresh(a.f.name);
    auto term = normalize(let_(x1, head.term, tapp(x1, a.arg)), ns_);
    return {term, subst(f->result, f->binder, a.arg, ns_)};
  }

  Inferred infer_unbox(const Env& g, const Term& t, const Unbox& u) {
    fuel_.spend("bi-unbox");
    auto w = widen_var(g, u.x);
    auto* b = w.shape.as<BoxedShape>();
    if (!b) fail(ErrorKind::NotABoxed, "bi-unbox", u.x.name + " is not boxed");
    if (!g.dom_contains(b->inner.captures) || !g.dom_contains(u.captures))
      fail(ErrorKind::EscapeViolation, "bi-unbox", "unboxing " + print(b->inner.captures) + " escapes");
    if (!subcapture(g, b->inner.captures, u.captures))
      fail(ErrorKind::SubtypeFailure, "bi-unbox",
           print(b->inner.captures) + " does not subcapture " + print(u.captures));
    return {t, b->inner};
  }

  Inferred infer_let(const Env& g, const Let& l) {
    fuel_.spend("bi-let");
    auto s = infer(g, l.bound);
    auto [x, body] = fresh_if_bound(g, l.x, l.body);
    auto r = infer(g.extended(x, s.type), body);
    return {let_(x, s.term, r.term), avoid(x, s.type.captures, r.type)};
  }

  std::pair<Var, Term> fresh_if_bound(const Env& g, const Var& x, const Term& body) {
    if (!g.binds(x)) return {x, body};
    auto nx = ns_.fresh(x.name);
    return {nx, subst(body, x, nx, ns_)};
  }

  Fuel& fuel_;
  NameSupply& ns_;
};

}  // namespace detail

inline Adapted adapt_sub_traced(const Env& g, const Var& x, const Type& t, const Type& u, Fuel& fuel,
                                NameSupply& ns) {
  return detail::TermAdapter(fuel, ns).adapt(g, x, t, u);
}
inline Term adapt_sub(const Env& g, const Var& x, const Type& t, const Type& u, Fuel& fuel, NameSupply& ns) {
  return adapt_sub_traced(g, x, t, u, fuel, ns).term;
}
inline Term adapt_sub(const Env& g, const Var& x, const Type& t, const Type& u, Fuel& fuel) {
  auto ns = supply_for(g, x, t, u);
  return adapt_sub(g, x, t, u, fuel, ns);
}
inline Term adapt_sub(const Env& g, const Var& x, const Type& t, const Type& u) {
  Fuel fuel;
  return adapt_sub(g, x, t, u, fuel);
}

inline Term box_adapt(const Env& g, const Var& x, const Type& u, Fuel& fuel, NameSupply& ns) {
  return detail::TermAdapter(fuel, ns).box_adapt(g, x, u);
}
inline Term box_adapt(const Env& g, const Var& x, const Type& u, Fuel& fuel) {
  auto ns = supply_for(g, x, u);
  return box_adapt(g, x, u, fuel, ns);
}
inline Term box_adapt(const Env& g, const Var& x, const Type& u) {
  Fuel fuel;
  return box_adapt(g, x, u, fuel);
}

inline Inferred unbox_var(const Env& g, const Var& x) {
  Fuel fuel;
  auto ns = supply_for(g);
  return detail::TermAdapter(fuel, ns).unbox_var(g, x);
}

inline Inferred infer(const Env& g, const Term& t, Fuel& fuel, NameSupply& ns) {
  return detail::TermAdapter(fuel, ns).infer(g, t);
}
inline Inferred infer(const Env& g, const Term& t, Fuel& fuel) {
  auto ns = supply_for(g, t);
  return infer(g, t, fuel, ns);
}
inline Inferred infer(const Env& g, const Term& t) {
  Fuel fuel;
  return infer(g, t, fuel);
}

}  // namespace capcalc
