#pragma once

#include "errors.hpp"
#include "subcapture.hpp"
#include "syntax_ops.hpp"

namespace capcalc {

// widen-shape / widen-tvar: follow X <: Y chains to a concrete shape.
inline Shape widen_tvar(const Env& g, const TVar& x) {
  auto cur = x;
  for (std::size_t steps = 0; steps <= g.size(); ++steps) {
    auto b = g.lookup(cur);
    if (!b) fail(ErrorKind::UnboundVariable, "widen-tvar", "unbound type variable " + cur.name);
    auto* next = b->as<TVarShape>();
    if (!next) return *b;
    cur = next->var;
  }
  fail(ErrorKind::IllFormedType, "widen-tvar", "cyclic type variable bounds at " + x.name);
}

// alg-var: Γ(x) = C S gives {x} S
inline Type var_type(const Env& g, const Var& x) {
  auto t = g.lookup(x);
  if (!t) fail(ErrorKind::UnboundVariable, "alg-var", "unbound variable " + x.name);
  return capturing(CaptureSet{x}, t->shape);
}

// var-lookup / var-widen
inline Type widen_var(const Env& g, const Var& x) {
  auto t = var_type(g, x);
  if (auto* tv = t.shape.as<TVarShape>()) return capturing(t.captures, widen_tvar(g, tv->var));
  return t;
}

namespace detail {

// Picks a common binder for two scopes; reuses the names when that is safe.
template <class V>
V common_binder(const Env& g, const V& a, const V& b, NameSupply& ns) {
  if (a == b && !g.binds(a)) return a;
  if constexpr (std::is_same_v<V, Var>) return ns.fresh(b.name);
  else return ns.fresh_tvar(b.name);
}

class Subtyper {
 public:
  Subtyper(Fuel& fuel, NameSupply& ns) : fuel_(fuel), ns_(ns) {}

  // alg-capt
  bool sub(const Env& g, const Type& t, const Type& u) {
    fuel_.spend("alg-capt");
    if (!subcapture(g, t.captures, u.captures)) return false;
    return sub_shape(g, t.shape, u.shape);
  }

  bool sub_shape(const Env& g, const Shape& s, const Shape& u) {
    if (auto* x = s.as<TVarShape>()) {
      if (auto* y = u.as<TVarShape>(); y && y->var == x->var) {
        fuel_.spend("alg-refl");
        return true;
      }
      if (u.is<TopShape>()) {
        fuel_.spend("alg-top");
        return true;
      }
      fuel_.spend("alg-tvar");
      auto b = g.lookup(x->var);
      if (!b) fail(ErrorKind::UnboundVariable, "alg-tvar", "unbound type variable " + x->var.name);
      return sub_shape(g, *b, u);
    }
    if (u.is<TopShape>()) {
      fuel_.spend("alg-top");
      return true;
    }
    if (auto* f = s.as<FunShape>()) {
      auto* h = u.as<FunShape>();
      if (!h) return false;
      fuel_.spend("alg-fun");
      if (!sub(g, h->param, f->param)) return false;
      auto x = common_binder(g, f->binder, h->binder, ns_);
      auto r1 = f->binder == x ? f->result : subst(f->result, f->binder, x, ns_);
      auto r2 = h->binder == x ? h->result : subst(h->result, h->binder, x, ns_);
      return sub(g.extended(x, h->param), r1, r2);
    }
    if (auto* f = s.as<TFunShape>()) {
      auto* h = u.as<TFunShape>();
      if (!h) return false;
      fuel_.spend("alg-tfun");
      if (!sub_shape(g, h->bound, f->bound)) return false;
      auto x = common_binder(g, f->binder, h->binder, ns_);
      auto r1 = f->binder == x ? f->result : subst(f->result, f->binder, tvar_shape(x), ns_);
      auto r2 = h->binder == x ? h->result : subst(h->result, h->binder, tvar_shape(x), ns_);
      return sub(g.extended(x, h->bound), r1, r2);
    }
    if (auto* b = s.as<BoxedShape>()) {
      auto* c = u.as<BoxedShape>();
      if (!c) return false;
      fuel_.spend("alg-boxed");
      return sub(g, b->inner, c->inner);
    }
    return false;  // Top against a non-Top shape
  }

  // algc-*: every rule carries its own subcapture premise
  bool subc(const Env& g, const Type& t, const Type& u) {
    auto& s = t.shape;
    auto& v = u.shape;
    auto capt = [&] { return subcapture(g, t.captures, u.captures); };
    if (auto* x = s.as<TVarShape>()) {
      if (auto* y = v.as<TVarShape>(); y && y->var == x->var) {
        fuel_.spend("algc-refl");
        return capt();
      }
      if (v.is<TopShape>()) {
        fuel_.spend("algc-top");
        return capt();
      }
      fuel_.spend("algc-tvar");
      auto b = g.lookup(x->var);
      if (!b) fail(ErrorKind::UnboundVariable, "algc-tvar", "unbound type variable " + x->var.name);
      return subc(g, capturing(t.captures, *b), u);
    }
    if (v.is<TopShape>()) {
      fuel_.spend("algc-top");
      return capt();
    }
    if (auto* f = s.as<FunShape>()) {
      auto* h = v.as<FunShape>();
      if (!h) return false;
      fuel_.spend("algc-fun");
      if (!capt() || !subc(g, h->param, f->param)) return false;
      auto x = common_binder(g, f->binder, h->binder, ns_);
      auto r1 = f->binder == x ? f->result : subst(f->result, f->binder, x, ns_);
      auto r2 = h->binder == x ? h->result : subst(h->result, h->binder, x, ns_);
      return subc(g.extended(x, h->param), r1, r2);
    }
    if (auto* f = s.as<TFunShape>()) {
      auto* h = v.as<TFunShape>();
      if (!h) return false;
      fuel_.spend("algc-tfun");
      if (!capt() || !subc(g, shape_type(h->bound), shape_type(f->bound))) return false;
      auto x = common_binder(g, f->binder, h->binder, ns_);
      auto r1 = f->binder == x ? f->result : subst(f->result, f->binder, tvar_shape(x), ns_);
      auto r2 = h->binder == x ? h->result : subst(h->result, h->binder, tvar_shape(x), ns_);
      return subc(g.extended(x, h->bound), r1, r2);
    }
    if (auto* b = s.as<BoxedShape>()) {
      auto* c = v.as<BoxedShape>();
      if (!c) return false;
      fuel_.spend("algc-boxed");
      return capt() && subc(g, b->inner, c->inner);
    }
    return false;
  }

 private:
  Fuel& fuel_;
  NameSupply& ns_;
};

}  // namespace detail

inline bool subtype(const Env& g, const Type& t, const Type& u, Fuel& fuel, NameSupply& ns) {
  return detail::Subtyper(fuel, ns).sub(g, t, u);
}
inline bool subtype(const Env& g, const Type& t, const Type& u, Fuel& fuel) {
  auto ns = supply_for(g, t, u);
  return subtype(g, t, u, fuel, ns);
}
inline bool subtype(const Env& g, const Type& t, const Type& u) {
  Fuel fuel;
  return subtype(g, t, u, fuel);
}

inline bool subtype_capt(const Env& g, const Type& t, const Type& u, Fuel& fuel, NameSupply& ns) {
  return detail::Subtyper(fuel, ns).subc(g, t, u);
}
inline bool subtype_capt(const Env& g, const Type& t, const Type& u, Fuel& fuel) {
  auto ns = supply_for(g, t, u);
  return subtype_capt(g, t, u, fuel, ns);
}
inline bool subtype_capt(const Env& g, const Type& t, const Type& u) {
  Fuel fuel;
  return subtype_capt(g, t, u, fuel);
}

}  // namespace capcalc
