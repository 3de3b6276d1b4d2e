#pragma once

#include "adapt_term.hpp"

namespace capcalc {

struct AdaptResult {
  Kind kind;
  HoledCaptureSet leak;
  AdaptRule root;  // first rule after ba-tvar widening
  // the elaborated term is exactly `C unbox ◊` once normalized; an enclosing
  // ba-boxed then collapses to a single unbox (see boxed below)
  bool bare_unbox = false;
};

struct InferredT {
  Type type;
  CaptureSet captures;
};

namespace detail {

inline HoledCaptureSet holed(CaptureSet c) { return {std::move(c), true}; }

// Same dispatch as TermAdapter, but only the kind and leaked set are kept.
class TypeAdapter {
 public:
  TypeAdapter(Fuel& fuel, NameSupply& ns) : fuel_(fuel), ns_(ns) {}

  AdaptResult adapt(const Env& g, const Type& t, const Type& u) {
    auto rule = choose_rule(t.shape, u.shape);
    fuel_.spend(to_string(rule));
    switch (rule) {
      case AdaptRule::Refl:
      case AdaptRule::Top:
        if (!subcapture(g, t.captures, u.captures))
          fail(ErrorKind::SubcaptureFailure, std::string("t-") + to_string(rule),
               print(t.captures) + " does not subcapture " + print(u.captures));
        return {Kind::Var, HoledCaptureSet::just_hole(), rule};
      case AdaptRule::TVar: {
        auto& tv = t.shape.as<TVarShape>()->var;
        auto b = g.lookup(tv);
        if (!b) fail(ErrorKind::UnboundVariable, "t-ba-tvar", "unbound type variable " + tv.name);
        return adapt(g, capturing(t.captures, *b), u);
      }
      case AdaptRule::Boxed: return boxed(g, t, u);
      case AdaptRule::Unbox: return unboxing(g, t, u);
      case AdaptRule::Box: return boxing(g, t, u);
      case AdaptRule::Fun: return eta_fun(g, t, u);
      case AdaptRule::TFun: return eta_tfun(g, t, u);
    }
    fail(ErrorKind::AdaptFailure, "t-adapt", "unreachable");
  }

  std::pair<Kind, CaptureSet> box_adapt(const Env& g, const Var& x, const Type& u) {
    wf_type(g, u);
    auto r = adapt(g, var_type(g, x), u);
    return {r.kind, fill_hole(r.leak, x)};
  }

  // t-var-return / t-var-unbox
  InferredT unbox_var(const Env& g, const Var& x) {
    auto w = widen_var(g, x);
    if (auto* b = w.shape.as<BoxedShape>(); b && g.dom_contains(b->inner.captures))
      return {b->inner, b->inner.captures.with(x)};
    return {w, CaptureSet{x}};
  }

  InferredT infer(const Env& g, const Term& t) {
    return std::visit(overloaded{
                          [&](const VarRef& v) -> InferredT {
                            fuel_.spend("t-bi-var");
                            return {var_type(g, v.x), CaptureSet{v.x}};
                          },
                          [&](const Abs& a) -> InferredT {
                            fuel_.spend("t-bi-abs");
                            wf_type(g, a.param);
                            auto [x, body] = fresh_if_bound(g, a.x, a.body);
                            auto r = infer(g.extended(x, a.param), body);
                            auto c = r.captures.without(x);
                            return {capturing(c, fun_shape(x, a.param, r.type)), c};
                          },
                          [&](const TAbs& a) -> InferredT {
                            fuel_.spend("t-bi-tabs");
                            wf_shape(g, a.bound);
                            auto x = a.x;
                            auto body = a.body;
                            if (g.binds(x)) {
                              x = ns_.fresh_tvar(a.x.name);
                              body = rename_tvar_in(body, a.x, x, ns_);
                            }
                            auto r = infer(g.extended(x, a.bound), body);
                            return {capturing(r.captures, tfun_shape(x, a.bound, r.type)), r.captures};
                          },
                          [&](const App& a) { return infer_app(g, a); },
                          [&](const TApp& a) { return infer_tapp(g, a); },
                          [&](const BoxV& b) -> InferredT {
                            fuel_.spend("t-bi-box");
                            auto t0 = var_type(g, b.x);
                            if (!g.dom_contains(t0.captures))
                              fail(ErrorKind::EscapeViolation, "t-bi-box", "boxed capture set escapes");
                            return {shape_type(boxed_shape(t0)), CaptureSet{}};
                          },
                          [&](const Unbox& u) { return infer_unbox(g, u); },
                          [&](const Let& l) { return infer_let(g, l); },
                      },
                      t.node().v);
  }

 private:
  AdaptResult boxed(const Env& g, const Type& t, const Type& u) {
    auto& inner = t.shape.as<BoxedShape>()->inner;
    auto& target = u.shape.as<BoxedShape>()->inner;
    auto r = adapt(g, inner, target);
    auto outer_fits = [&](const CaptureSet& c) {
      if (!subcapture(g, c, u.captures))
        fail(ErrorKind::SubcaptureFailure, "t-ba-boxed", print(c) + " does not subcapture " + print(u.captures));
    };
    if (r.kind == Kind::Var) {
      outer_fits(t.captures);
      return {Kind::Var, HoledCaptureSet::just_hole(), AdaptRule::Boxed};
    }
    if (!g.dom_contains(inner.captures))
      fail(ErrorKind::EscapeViolation, "t-ba-boxed", "cannot unbox " + print(inner.captures) + " to adapt it");
    // let y = C unbox x in let z = C' unbox y in box z  ~>  C unbox x
    if (r.bare_unbox) {
      outer_fits(inner.captures);
      return {Kind::Trm, holed(inner.captures), AdaptRule::Boxed, true};
    }
    if (r.kind == Kind::Val) return {Kind::Trm, holed(inner.captures), AdaptRule::Boxed};
    return {Kind::Trm, holed(r.leak.base.united(inner.captures)), AdaptRule::Boxed};
  }

  AdaptResult unboxing(const Env& g, const Type& t, const Type& u) {
    auto& inner = t.shape.as<BoxedShape>()->inner;
    if (!g.dom_contains(inner.captures))
      fail(ErrorKind::EscapeViolation, "t-ba-unbox", "cannot unbox " + print(inner.captures));
    auto r = adapt(g, inner, u);
    return {Kind::Trm, holed(inner.captures.united(r.leak.base)), AdaptRule::Unbox, r.kind == Kind::Var};
  }

  AdaptResult boxing(const Env& g, const Type& t, const Type& u) {
    auto& target = u.shape.as<BoxedShape>()->inner;
    if (!g.dom_contains(target.captures))
      fail(ErrorKind::EscapeViolation, "t-ba-box", "cannot box into " + print(target.captures));
    auto r = adapt(g, t, target);
    if (r.kind == Kind::Trm) return {Kind::Trm, r.leak, AdaptRule::Box};
    return {Kind::Trm, HoledCaptureSet{}, AdaptRule::Box};
  }

  AdaptResult eta_fun(const Env& g, const Type& t, const Type& u) {
    auto& f = *t.shape.as<FunShape>();
    auto& h = *u.shape.as<FunShape>();
    auto x = ns_.fresh(h.binder.name);
    auto r1 = subst(f.result, f.binder, x, ns_);
    auto r2 = subst(h.result, h.binder, x, ns_);
    auto a = adapt(g, h.param, f.param);
    auto x2 = ns_.fresh(x.name);
    auto r1p = a.kind == Kind::Var ? r1 : subst(r1, x, x2, ns_);
    auto b = adapt(g.extended(x, h.param).extended(x2, f.param), r1p, r2);
    auto cf = a.leak.base.united(b.leak.base).without(x).without(x2);
    check_closure(g, cf, t.captures, u.captures, "t-ba-fun");
    bool var = a.kind == Kind::Var && b.kind == Kind::Var;
    return {var ? Kind::Var : Kind::Val, holed(cf), AdaptRule::Fun};
  }

  AdaptResult eta_tfun(const Env& g, const Type& t, const Type& u) {
    auto& f = *t.shape.as<TFunShape>();
    auto& h = *u.shape.as<TFunShape>();
    if (!subtype(g, shape_type(h.bound), shape_type(f.bound), fuel_, ns_))
      fail(ErrorKind::SubtypeFailure, "t-ba-tfun", "type bound " + print(h.bound) + " is not below " + print(f.bound));
    auto x = ns_.fresh_tvar(h.binder.name);
    auto r1 = subst(f.result, f.binder, tvar_shape(x), ns_);
    auto r2 = subst(h.result, h.binder, tvar_shape(x), ns_);
    auto r = adapt(g.extended(x, h.bound), r1, r2);
    // the input function stays captured: keep ◊
    check_closure(g, r.leak.base, t.captures, u.captures, "t-ba-tfun");
    return {r.kind == Kind::Var ? Kind::Var : Kind::Val, holed(r.leak.base), AdaptRule::TFun};
  }

  void check_closure(const Env& g, const CaptureSet& cf, const CaptureSet& c, const CaptureSet& expected,
                     const char* rule) {
    auto leaked = fill_hole(holed(cf), c);
    if (!subcapture(g, leaked, expected))
      fail(ErrorKind::SubcaptureFailure, rule,
           "adapted function captures " + print(leaked) + ", expected at most " + print(expected));
  }

  InferredT infer_app(const Env& g, const App& a) {
    fuel_.spend("t-bi-app");
    auto head = unbox_var(g, a.f);
    auto* f = head.type.shape.as<FunShape>();
    if (!f) fail(ErrorKind::NotAFunction, "t-bi-app", a.f.name + " is not a function");
    auto [kind, c2] = box_adapt(g, a.arg, f->param);
    auto c = head.captures.united(c2);
    if (kind == Kind::Var) return {subst(f->result, f->binder, a.arg, ns_), c};
    return {avoid(f->binder, f->param.captures, f->result), c};
  }

  InferredT infer_tapp(const Env& g, const TApp& a) {
    fuel_.spend("t-bi-tapp");
    auto head = unbox_var(g, a.f);
    auto* f = head.type.shape.as<TFunShape>();
    if (!f) fail(ErrorKind::NotATypeFunction, "t-bi-tapp", a.f.name + " is not a type function");
    wf_shape(g, a.arg);
    if (!subtype(g, shape_type(a.arg), shape_type(f->bound), fuel_, ns_))
      fail(ErrorKind::SubtypeFailure, "t-bi-tapp",
           "type argument " + print(a.arg) + " does not conform to " + print(f->bound));
    return {subst(f->result, f->binder, a.arg, ns_), head.captures};
  }

  InferredT infer_unbox(const Env& g, const Unbox& u) {
    fuel_.spend("t-bi-unbox");
    auto w = widen_var(g, u.x);
    auto* b = w.shape.as<BoxedShape>();
    if (!b) fail(ErrorKind::NotABoxed, "t-bi-unbox", u.x.name + " is not boxed");
    if (!g.dom_contains(b->inner.captures) || !g.dom_contains(u.captures))
      fail(ErrorKind::EscapeViolation, "t-bi-unbox", "unboxing " + print(b->inner.captures) + " escapes");
    if (!subcapture(g, b->inner.captures, u.captures))
      fail(ErrorKind::SubtypeFailure, "t-bi-unbox",
           print(b->inner.captures) + " does not subcapture " + print(u.captures));
    return {b->inner, u.captures.with(u.x)};
  }

  InferredT infer_let(const Env& g, const Let& l) {
    fuel_.spend("t-bi-let");
    auto s = infer(g, l.bound);
    auto [x, body] = fresh_if_bound(g, l.x, l.body);
    auto r = infer(g.extended(x, s.type), body);
    auto type = avoid(x, s.type.captures, r.type);
    // kinds survive elaboration, so the source term's kind decides hiding
    if (is_answer(l.bound) && !r.captures.contains(x)) return {type, r.captures};
    return {type, s.captures.united(r.captures.without(x))};
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

inline AdaptResult adapt_sub_t(const Env& g, const Type& t, const Type& u, Fuel& fuel, NameSupply& ns) {
  return detail::TypeAdapter(fuel, ns).adapt(g, t, u);
}
inline AdaptResult adapt_sub_t(const Env& g, const Type& t, const Type& u, Fuel& fuel) {
  auto ns = supply_for(g, t, u);
  return adapt_sub_t(g, t, u, fuel, ns);
}
inline AdaptResult adapt_sub_t(const Env& g, const Type& t, const Type& u) {
  Fuel fuel;
  return adapt_sub_t(g, t, u, fuel);
}

inline std::pair<Kind, CaptureSet> box_adapt_t(const Env& g, const Var& x, const Type& u, Fuel& fuel) {
  auto ns = supply_for(g, x, u);
  return detail::TypeAdapter(fuel, ns).box_adapt(g, x, u);
}
inline std::pair<Kind, CaptureSet> box_adapt_t(const Env& g, const Var& x, const Type& u) {
  Fuel fuel;
  return box_adapt_t(g, x, u, fuel);
}

inline InferredT unbox_var_t(const Env& g, const Var& x) {
  Fuel fuel;
  auto ns = supply_for(g);
  return detail::TypeAdapter(fuel, ns).unbox_var(g, x);
}

inline InferredT infer_t(const Env& g, const Term& t, Fuel& fuel, NameSupply& ns) {
  return detail::TypeAdapter(fuel, ns).infer(g, t);
}
inline InferredT infer_t(const Env& g, const Term& t, Fuel& fuel) {
  auto ns = supply_for(g, t);
  return infer_t(g, t, fuel, ns);
}
inline InferredT infer_t(const Env& g, const Term& t) {
  Fuel fuel;
  return infer_t(g, t, fuel);
}

}  // namespace capcalc
