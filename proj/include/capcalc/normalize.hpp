#pragma once

#include "syntax_ops.hpp"

namespace capcalc {

namespace detail {

inline Term compact_let(const Var& y, const Term& s, const Term& body, NameSupply& ns) {
  // nl-box
  if (auto* u = s.as<Unbox>())
    if (auto* b = body.as<BoxV>(); b && b->x == y) return var_ref(u->x);
  // nl-deref
  if (auto* v = body.as<VarRef>(); v && v->x == y) return s;
  // nl-rename
  if (auto* x = s.as<VarRef>()) return subst(body, y, x->x, ns);
  return let_(y, s, body);
}

inline Term compact_abs(const Var& z, const Type& p, const Term& body) {
  // nl-beta; the head must not be the parameter itself
  if (auto* a = body.as<App>(); a && a->arg == z && a->f != z) return var_ref(a->f);
  return abs_(z, p, body);
}

inline Term compact_tabs(const TVar& x, const Shape& b, const Term& body) {
  // nl-tbeta
  if (auto* a = body.as<TApp>())
    if (auto* v = a->arg.as<TVarShape>(); v && v->var == x) return var_ref(a->f);
  return tabs(x, b, body);
}

inline Term normalize_in(const Term& t, NameSupply& ns) {
  return std::visit(overloaded{
                        [&](const Let& l) {
                          auto s = normalize_in(l.bound, ns);
                          auto b = normalize_in(l.body, ns);
                          return compact_let(l.x, s, b, ns);
                        },
                        [&](const Abs& a) { return compact_abs(a.x, a.param, normalize_in(a.body, ns)); },
                        [&](const TAbs& a) { return compact_tabs(a.x, a.bound, normalize_in(a.body, ns)); },
                        [&](const auto&) { return t; },
                    },
                    t.node().v);
}

}  // namespace detail

inline Term normalize(const Term& t, NameSupply& ns) { return detail::normalize_in(t, ns); }
inline Term normalize(const Term& t) {
  auto ns = supply_for(t);
  return normalize(t, ns);
}

}  // namespace capcalc
