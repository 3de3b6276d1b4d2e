#pragma once

#include "printer.hpp"
#include "typing.hpp"

// F<: images live in the same AST: a type/term/env with no capture sets,
// no Box and no box/unbox nodes. `is_fsub` checks that invariant.

namespace capcalc {

using FType = Type;
using FTerm = Term;
using FEnv = Env;

inline Type erase(const Type& t);

inline Shape erase(const Shape& s) {
  return std::visit(overloaded{
                        [&](const TVarShape&) { return s; },
                        [&](const TopShape&) { return s; },
                        [&](const FunShape& f) { return fun_shape(f.binder, erase(f.param), erase(f.result)); },
                        [&](const TFunShape& f) { return tfun_shape(f.binder, erase(f.bound), erase(f.result)); },
                        [&](const BoxedShape& b) { return erase(b.inner).shape; },
                    },
                    s.node().v);
}

inline Type erase(const Type& t) { return shape_type(erase(t.shape)); }

inline Term erase(const Term& t) {
  return std::visit(overloaded{
                        [&](const VarRef&) { return t; },
                        [&](const Abs& a) { return abs_(a.x, erase(a.param), erase(a.body)); },
                        [&](const TAbs& a) { return tabs(a.x, erase(a.bound), erase(a.body)); },
                        [&](const App&) { return t; },
                        [&](const TApp& a) { return tapp(a.f, erase(a.arg)); },
                        [&](const BoxV& b) { return var_ref(b.x); },
                        [&](const Unbox& u) { return var_ref(u.x); },
                        [&](const Let& l) { return let_(l.x, erase(l.bound), erase(l.body)); },
                    },
                    t.node().v);
}

inline Env erase(const Env& g) {
  Env out;
  for (auto& b : g.bindings())
    std::visit(overloaded{
                   [&](const TermBind& tb) { out = out.extended(tb.x, erase(tb.type)); },
                   [&](const TypeBind& tb) { out = out.extended(tb.x, erase(tb.bound)); },
               },
               b);
  return out;
}

inline bool is_fsub(const Type& t);
inline bool is_fsub(const Shape& s) {
  return std::visit(overloaded{
                        [](const FunShape& f) { return is_fsub(f.param) && is_fsub(f.result); },
                        [](const TFunShape& f) { return is_fsub(f.bound) && is_fsub(f.result); },
                        [](const BoxedShape&) { return false; },
                        [](const auto&) { return true; },
                    },
                    s.node().v);
}
inline bool is_fsub(const Type& t) { return t.captures.empty() && is_fsub(t.shape); }

namespace detail {

class FsubChecker {
 public:
  FsubChecker(Fuel& fuel, NameSupply& ns) : fuel_(fuel), ns_(ns) {}

  bool sub(const Env& d, const Shape& s, const Shape& u) {
    if (auto* x = s.as<TVarShape>()) {
      if (auto* y = u.as<TVarShape>(); y && y->var == x->var) {
        fuel_.spend("fs-refl");
        return true;
      }
    }
    if (u.is<TopShape>()) {
      fuel_.spend("fs-top");
      return true;
    }
    if (auto* x = s.as<TVarShape>()) {
      fuel_.spend("fs-tvar");
      auto b = d.lookup(x->var);
      if (!b) fail(ErrorKind::UnboundVariable, "fs-tvar", "unbound type variable " + x->var.name);
      return sub(d, *b, u);
    }
    if (auto* f = s.as<FunShape>()) {
      auto* h = u.as<FunShape>();
      if (!h) return false;
      fuel_.spend("fs-fun");
      return sub(d, h->param.shape, f->param.shape) && sub(d, f->result.shape, h->result.shape);
    }
    if (auto* f = s.as<TFunShape>()) {
      auto* h = u.as<TFunShape>();
      if (!h) return false;
      fuel_.spend("fs-tfun");
      if (!sub(d, h->bound, f->bound)) return false;
      auto x = common_binder(d, f->binder, h->binder, ns_);
      auto r1 = f->binder == x ? f->result : subst(f->result, f->binder, tvar_shape(x), ns_);
      auto r2 = h->binder == x ? h->result : subst(h->result, h->binder, tvar_shape(x), ns_);
      return sub(d.extended(x, h->bound), r1.shape, r2.shape);
    }
    return false;
  }

  Shape promote(const Env& d, Shape s) {
    while (auto* x = s.as<TVarShape>()) {
      fuel_.spend("fs-promote");
      auto b = d.lookup(x->var);
      if (!b) fail(ErrorKind::UnboundVariable, "fs-app", "unbound type variable " + x->var.name);
      s = *b;
    }
    return s;
  }

  Shape check(const Env& d, const Term& t) {
    return std::visit(
        overloaded{
            [&](const VarRef& v) -> Shape {
              fuel_.spend("fs-var");
              auto ty = d.lookup(v.x);
              if (!ty) fail(ErrorKind::UnboundVariable, "fs-var", "unbound variable " + v.x.name);
              return ty->shape;
            },
            [&](const Abs& a) -> Shape {
              fuel_.spend("fs-abs");
              auto x = a.x;
              auto body = a.body;
              if (d.binds(x)) {
                x = ns_.fresh(a.x.name);
                body = subst(body, a.x, x, ns_);
              }
              auto r = check(d.extended(x, a.param), body);
              return fun_shape(x, a.param, shape_type(r));
            },
            [&](const TAbs& a) -> Shape {
              fuel_.spend("fs-tabs");
              auto x = a.x;
              auto body = a.body;
              if (d.binds(x)) {
                x = ns_.fresh_tvar(a.x.name);
                body = rename_tvar_in(body, a.x, x, ns_);
              }
              auto r = check(d.extended(x, a.bound), body);
              return tfun_shape(x, a.bound, shape_type(r));
            },
            [&](const App& a) -> Shape {
              fuel_.spend("fs-app");
              auto ft = d.lookup(a.f);
              if (!ft) fail(ErrorKind::UnboundVariable, "fs-app", "unbound variable " + a.f.name);
              auto fs = promote(d, ft->shape);
              auto* f = fs.as<FunShape>();
              if (!f) fail(ErrorKind::NotAFunction, "fs-app", a.f.name + " is not a function");
              auto at = d.lookup(a.arg);
              if (!at) fail(ErrorKind::UnboundVariable, "fs-app", "unbound variable " + a.arg.name);
              if (!sub(d, at->shape, f->param.shape))
                fail(ErrorKind::SubtypeFailure, "fs-app", "argument does not conform");
              return f->result.shape;
            },
            [&](const TApp& a) -> Shape {
              fuel_.spend("fs-tapp");
              auto ft = d.lookup(a.f);
              if (!ft) fail(ErrorKind::UnboundVariable, "fs-tapp", "unbound variable " + a.f.name);
              auto fs = promote(d, ft->shape);
              auto* f = fs.as<TFunShape>();
              if (!f) fail(ErrorKind::NotATypeFunction, "fs-tapp", a.f.name + " is not a type function");
              if (!sub(d, a.arg, f->bound))
                fail(ErrorKind::SubtypeFailure, "fs-tapp", "type argument does not conform");
              return subst(f->result, f->binder, a.arg, ns_).shape;
            },
            [&](const BoxV&) -> Shape { fail(ErrorKind::IllFormedType, "fs", "box in an F<: term"); },
            [&](const Unbox&) -> Shape { fail(ErrorKind::IllFormedType, "fs", "unbox in an F<: term"); },
            [&](const Let& l) -> Shape {
              fuel_.spend("fs-let");
              auto s = check(d, l.bound);
              auto x = l.x;
              auto body = l.body;
              if (d.binds(x)) {
                x = ns_.fresh(l.x.name);
                body = subst(body, l.x, x, ns_);
              }
              return check(d.extended(x, shape_type(s)), body);
            },
        },
        t.node().v);
  }

 private:
  Fuel& fuel_;
  NameSupply& ns_;
};

}  // namespace detail

inline bool fsub_subtype(const Env& d, const Type& t, const Type& u, Fuel& fuel) {
  auto ns = supply_for(d, t, u);
  return detail::FsubChecker(fuel, ns).sub(d, t.shape, u.shape);
}
inline bool fsub_subtype(const Env& d, const Type& t, const Type& u) {
  Fuel fuel;
  return fsub_subtype(d, t, u, fuel);
}

inline Type fsub_typecheck(const Env& d, const Term& t, Fuel& fuel) {
  auto ns = supply_for(d, t);
  return shape_type(detail::FsubChecker(fuel, ns).check(d, t));
}
inline Type fsub_typecheck(const Env& d, const Term& t) {
  Fuel fuel;
  return fsub_typecheck(d, t, fuel);
}

}  // namespace capcalc
