#pragma once

#include "printer.hpp"
#include "subtype.hpp"

namespace capcalc {

namespace detail {

inline Type avoid_at(const Var& x, const CaptureSet& d, const Type& t, bool positive);

inline Shape avoid_shape(const Var& x, const CaptureSet& d, const Shape& s, bool positive) {
  return std::visit(
      overloaded{
          [&](const TVarShape&) { return s; },
          [&](const TopShape&) { return s; },
          [&](const FunShape& f) {
            auto p = avoid_at(x, d, f.param, !positive);
            if (f.binder == x) return fun_shape(f.binder, p, f.result);
            return fun_shape(f.binder, p, avoid_at(x, d, f.result, positive));
          },
          [&](const TFunShape& f) {
            return tfun_shape(f.binder, avoid_shape(x, d, f.bound, !positive),
                              avoid_at(x, d, f.result, positive));
          },
          [&](const BoxedShape& b) { return boxed_shape(avoid_at(x, d, b.inner, positive)); },
      },
      s.node().v);
}

inline Type avoid_at(const Var& x, const CaptureSet& d, const Type& t, bool positive) {
  auto c = t.captures;
  if (c.contains(x)) {
    c.remove(x);
    if (positive) c.merge(d);
  }
  return Type{c, avoid_shape(x, d, t.shape, positive)};
}

}  // namespace detail

// Smallest supertype of t without x: x ↦ d covariantly, x ↦ {} contravariantly.
inline Type avoid(const Var& x, const CaptureSet& d, const Type& t) {
  return detail::avoid_at(x, d, t, true);
}

namespace detail {

// The ccAlgo checker. Binders already in Γ are renamed before extension so
// the environment never shadows.
class Checker {
 public:
  Checker(Fuel& fuel, NameSupply& ns) : fuel_(fuel), ns_(ns) {}

  Type check(const Env& g, const Term& t) {
    return std::visit(overloaded{
                          [&](const VarRef& v) {
                            fuel_.spend("alg-var");
                            return var_type(g, v.x);
                          },
                          [&](const Abs& a) { return check_abs(g, a); },
                          [&](const TAbs& a) { return check_tabs(g, a); },
                          [&](const App& a) { return check_app(g, a); },
                          [&](const TApp& a) { return check_tapp(g, a); },
                          [&](const BoxV& b) {
                            fuel_.spend("alg-box");
                            auto t0 = var_type(g, b.x);
                            if (!g.dom_contains(t0.captures))
                              fail(ErrorKind::EscapeViolation, "alg-box", "boxed capture set escapes");
                            return shape_type(boxed_shape(t0));
                          },
                          [&](const Unbox& u) { return check_unbox(g, u); },
                          [&](const Let& l) { return check_let(g, l); },
                      },
                      t.node().v);
  }

 private:
  Type check_abs(const Env& g, const Abs& a) {
    fuel_.spend("alg-abs");
    wf_type(g, a.param);
    auto [x, body] = fresh_if_bound(g, a.x, a.body);
    auto r = check(g.extended(x, a.param), body);
    return capturing(cv(body).without(x), fun_shape(x, a.param, r));
  }

  Type check_tabs(const Env& g, const TAbs& a) {
    fuel_.spend("alg-tabs");
    wf_shape(g, a.bound);
    auto x = a.x;
    auto body = a.body;
    if (g.binds(x)) {
      x = ns_.fresh_tvar(a.x.name);
      body = rename_tvar(body, a.x, x);
    }
    auto r = check(g.extended(x, a.bound), body);
    return capturing(cv(body), tfun_shape(x, a.bound, r));
  }

  Type check_app(const Env& g, const App& a) {
    fuel_.spend("alg-app");
    auto ft = widen_var(g, a.f);
    auto* f = ft.shape.as<FunShape>();
    if (!f) fail(ErrorKind::NotAFunction, "alg-app", a.f.name + " is not a function");
    auto at = var_type(g, a.arg);
    if (!subtype(g, at, f->param, fuel_, ns_))
      fail(ErrorKind::SubtypeFailure, "alg-app",
           "argument type " + print(at) + " is not a subtype of " + print(f->param));
    return subst(f->result, f->binder, a.arg, ns_);
  }

  Type check_tapp(const Env& g, const TApp& a) {
    fuel_.spend("alg-tapp");
    auto ft = widen_var(g, a.f);
    auto* f = ft.shape.as<TFunShape>();
    if (!f) fail(ErrorKind::NotATypeFunction, "alg-tapp", a.f.name + " is not a type function");
    wf_shape(g, a.arg);
    if (!subtype(g, shape_type(a.arg), shape_type(f->bound), fuel_, ns_))
      fail(ErrorKind::SubtypeFailure, "alg-tapp",
           "type argument " + print(a.arg) + " does not conform to " + print(f->bound));
    return subst(f->result, f->binder, a.arg, ns_);
  }

  Type check_unbox(const Env& g, const Unbox& u) {
    fuel_.spend("alg-unbox");
    auto w = widen_var(g, u.x);
    auto* b = w.shape.as<BoxedShape>();
    if (!b) fail(ErrorKind::NotABoxed, "alg-unbox", u.x.name + " is not boxed");
    if (!g.dom_contains(u.captures))
      fail(ErrorKind::EscapeViolation, "alg-unbox", "unbox annotation " + print(u.captures) + " is not in scope");
    if (!subcapture(g, b->inner.captures, u.captures)) {
      if (b->inner.captures.has_root())
        fail(ErrorKind::EscapeViolation, "alg-unbox", "unboxing the root capability");
      fail(ErrorKind::SubtypeFailure, "alg-unbox",
           print(b->inner.captures) + " does not subcapture " + print(u.captures));
    }
    return b->inner;
  }

  Type check_let(const Env& g, const Let& l) {
    fuel_.spend("alg-let");
    auto t = check(g, l.bound);
    auto [x, body] = fresh_if_bound(g, l.x, l.body);
    auto u = check(g.extended(x, t), body);
    return avoid(x, t.captures, u);
  }

  std::pair<Var, Term> fresh_if_bound(const Env& g, const Var& x, const Term& body) {
    if (!g.binds(x)) return {x, body};
    auto nx = ns_.fresh(x.name);
    return {nx, subst(body, x, nx, ns_)};
  }

  Term rename_tvar(const Term& t, const TVar& from, const TVar& to);

  Fuel& fuel_;
  NameSupply& ns_;
};

// Type-variable renaming inside a term (only annotations mention tvars).
inline Term rename_tvar_in(const Term& t, const TVar& from, const TVar& to, NameSupply& ns) {
  auto s = Substitution::tvar(from, tvar_shape(to));
  return std::visit(
      overloaded{
          [&](const VarRef&) { return t; },
          [&](const Abs& a) { return abs_(a.x, s.apply(a.param, ns), rename_tvar_in(a.body, from, to, ns)); },
          [&](const TAbs& a) {
            auto b = s.apply(a.bound, ns);
            if (a.x == from) return tabs(a.x, b, a.body);
            return tabs(a.x, b, rename_tvar_in(a.body, from, to, ns));
          },
          [&](const App&) { return t; },
          [&](const TApp& a) { return tapp(a.f, s.apply(a.arg, ns)); },
          [&](const BoxV&) { return t; },
          [&](const Unbox&) { return t; },
          [&](const Let& l) {
            return let_(l.x, rename_tvar_in(l.bound, from, to, ns), rename_tvar_in(l.body, from, to, ns));
          },
      },
      t.node().v);
}

inline Term Checker::rename_tvar(const Term& t, const TVar& from, const TVar& to) {
  return rename_tvar_in(t, from, to, ns_);
}

}  // namespace detail

inline Type typecheck(const Env& g, const Term& t, Fuel& fuel, NameSupply& ns) {
  return detail::Checker(fuel, ns).check(g, t);
}
inline Type typecheck(const Env& g, const Term& t, Fuel& fuel) {
  auto ns = supply_for(g, t);
  return typecheck(g, t, fuel, ns);
}
inline Type typecheck(const Env& g, const Term& t) {
  Fuel fuel;
  return typecheck(g, t, fuel);
}

}  // namespace capcalc
