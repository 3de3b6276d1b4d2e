#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "syntax.hpp"

namespace capcalc {

// ---- freshness seeding -----------------------------------------------------

inline void observe(NameSupply& ns, const CaptureSet& c) {
  for (auto& v : c.vars()) ns.bump_past(v.id);
}
inline void observe(NameSupply& ns, const Type& t);
inline void observe(NameSupply& ns, const Shape& s) {
  std::visit(overloaded{
                 [&](const TVarShape& x) { ns.bump_past(x.var.id); },
                 [&](const TopShape&) {},
                 [&](const FunShape& f) {
                   ns.bump_past(f.binder.id);
                   observe(ns, f.param);
                   observe(ns, f.result);
                 },
                 [&](const TFunShape& f) {
                   ns.bump_past(f.binder.id);
                   observe(ns, f.bound);
                   observe(ns, f.result);
                 },
                 [&](const BoxedShape& b) { observe(ns, b.inner); },
             },
             s.node().v);
}
inline void observe(NameSupply& ns, const Type& t) {
  observe(ns, t.captures);
  observe(ns, t.shape);
}
inline void observe(NameSupply& ns, const Term& t) {
  std::visit(overloaded{
                 [&](const VarRef& v) { ns.bump_past(v.x.id); },
                 [&](const Abs& a) {
                   ns.bump_past(a.x.id);
                   observe(ns, a.param);
                   observe(ns, a.body);
                 },
                 [&](const TAbs& a) {
                   ns.bump_past(a.x.id);
                   observe(ns, a.bound);
                   observe(ns, a.body);
                 },
                 [&](const App& a) {
                   ns.bump_past(a.f.id);
                   ns.bump_past(a.arg.id);
                 },
                 [&](const TApp& a) {
                   ns.bump_past(a.f.id);
                   observe(ns, a.arg);
                 },
                 [&](const BoxV& b) { ns.bump_past(b.x.id); },
                 [&](const Unbox& u) {
                   observe(ns, u.captures);
                   ns.bump_past(u.x.id);
                 },
                 [&](const Let& l) {
                   ns.bump_past(l.x.id);
                   observe(ns, l.bound);
                   observe(ns, l.body);
                 },
             },
             t.node().v);
}
inline void observe(NameSupply& ns, const Env& g) {
  for (auto& b : g.bindings())
    std::visit(overloaded{
                   [&](const TermBind& tb) { ns.bump_past(tb.x.id); observe(ns, tb.type); },
                   [&](const TypeBind& tb) { ns.bump_past(tb.x.id); observe(ns, tb.bound); },
               },
               b);
}
inline void observe(NameSupply& ns, const Var& x) { ns.bump_past(x.id); }

template <class... Ts>
NameSupply supply_for(const Ts&... xs) {
  NameSupply ns;
  (observe(ns, xs), ...);
  return ns;
}

// ---- free variables --------------------------------------------------------

struct FreeVars {
  std::set<Var> vars;
  std::set<TVar> tvars;
};

namespace detail {

inline void fv_into(const Type& t, FreeVars& out, std::set<Var>& bv, std::set<TVar>& btv);

inline void fv_into(const CaptureSet& c, FreeVars& out, const std::set<Var>& bv) {
  for (auto& v : c.vars())
    if (!bv.count(v)) out.vars.insert(v);
}

inline void fv_into(const Shape& s, FreeVars& out, std::set<Var>& bv, std::set<TVar>& btv) {
  std::visit(overloaded{
                 [&](const TVarShape& x) {
                   if (!btv.count(x.var)) out.tvars.insert(x.var);
                 },
                 [&](const TopShape&) {},
                 [&](const FunShape& f) {
                   fv_into(f.param, out, bv, btv);
                   bool added = bv.insert(f.binder).second;
                   fv_into(f.result, out, bv, btv);
                   if (added) bv.erase(f.binder);
                 },
                 [&](const TFunShape& f) {
                   fv_into(f.bound, out, bv, btv);
                   bool added = btv.insert(f.binder).second;
                   fv_into(f.result, out, bv, btv);
                   if (added) btv.erase(f.binder);
                 },
                 [&](const BoxedShape& b) { fv_into(b.inner, out, bv, btv); },
             },
             s.node().v);
}

inline void fv_into(const Type& t, FreeVars& out, std::set<Var>& bv, std::set<TVar>& btv) {
  fv_into(t.captures, out, bv);
  fv_into(t.shape, out, bv, btv);
}

inline void fv_into(const Term& t, FreeVars& out, std::set<Var>& bv, std::set<TVar>& btv) {
  auto use = [&](const Var& x) {
    if (!bv.count(x)) out.vars.insert(x);
  };
  std::visit(overloaded{
                 [&](const VarRef& v) { use(v.x); },
                 [&](const Abs& a) {
                   fv_into(a.param, out, bv, btv);
                   bool added = bv.insert(a.x).second;
                   fv_into(a.body, out, bv, btv);
                   if (added) bv.erase(a.x);
                 },
                 [&](const TAbs& a) {
                   fv_into(a.bound, out, bv, btv);
                   bool added = btv.insert(a.x).second;
                   fv_into(a.body, out, bv, btv);
                   if (added) btv.erase(a.x);
                 },
                 [&](const App& a) { use(a.f); use(a.arg); },
                 [&](const TApp& a) { use(a.f); fv_into(a.arg, out, bv, btv); },
                 [&](const BoxV& b) { use(b.x); },
                 [&](const Unbox& u) { fv_into(u.captures, out, bv); use(u.x); },
                 [&](const Let& l) {
                   fv_into(l.bound, out, bv, btv);
                   bool added = bv.insert(l.x).second;
                   fv_into(l.body, out, bv, btv);
                   if (added) bv.erase(l.x);
                 },
             },
             t.node().v);
}

}  // namespace detail

inline FreeVars fv_type(const Type& t) {
  FreeVars out; std::set<Var> bv; std::set<TVar> btv;
  detail::fv_into(t, out, bv, btv);
  return out;
}
inline FreeVars fv_shape(const Shape& s) {
  FreeVars out; std::set<Var> bv; std::set<TVar> btv;
  detail::fv_into(s, out, bv, btv);
  return out;
}
inline FreeVars free_vars(const Term& t) {
  FreeVars out; std::set<Var> bv; std::set<TVar> btv;
  detail::fv_into(t, out, bv, btv);
  return out;
}
// term variables only (annotations included: {io} unbox x mentions io)
inline std::set<Var> fv(const Term& t) { return free_vars(t).vars; }

// ---- captured variables ----------------------------------------------------

inline CaptureSet cv(const Term& t) {
  return std::visit(
      overloaded{
          [](const VarRef& v) { return CaptureSet{v.x}; },
          [](const Abs& a) { return cv(a.body).without(a.x); },
          [](const TAbs& a) { return cv(a.body); },
          [](const App& a) { return CaptureSet{a.f, a.arg}; },
          [](const TApp& a) { return CaptureSet{a.f}; },
          [](const BoxV&) { return CaptureSet{}; },
          [](const Unbox& u) { return u.captures.with(u.x); },
          [](const Let& l) {
            auto body = cv(l.body);
            // answers that the body does not capture are hidden
            if (is_answer(l.bound) && !body.contains(l.x)) return body;
            return cv(l.bound).united(body.without(l.x));
          },
      },
      t.node().v);
}

// ---- substitution ----------------------------------------------------------

// One substitution at a time: x ↦ y, x ↦ C (capture sets only), or X ↦ S.
class Substitution {
 public:
  static Substitution var(Var from, Var to) {
    Substitution s;
    s.from_ = from;
    s.to_var_ = to;
    s.to_set_ = CaptureSet{to};
    s.repl_.vars.insert(to);
    return s;
  }
  static Substitution set(Var from, CaptureSet to) {
    Substitution s;
    s.from_ = from;
    s.to_set_ = to;
    s.repl_.vars = to.vars();
    return s;
  }
  static Substitution tvar(TVar from, Shape to) {
    Substitution s;
    s.from_t_ = from;
    s.to_shape_ = to;
    s.repl_ = fv_shape(to);
    return s;
  }

  CaptureSet apply(const CaptureSet& c) const {
    if (!from_ || !c.contains(*from_)) return c;
    return c.without(*from_).united(to_set_);
  }

  Type apply(const Type& t, NameSupply& ns) const {
    return Type{apply(t.captures), apply(t.shape, ns)};
  }

  Shape apply(const Shape& s, NameSupply& ns) const {
    return std::visit(
        overloaded{
            [&](const TVarShape& x) -> Shape {
              if (from_t_ && x.var == *from_t_) return *to_shape_;
              return s;
            },
            [&](const TopShape&) -> Shape { return s; },
            [&](const FunShape& f) -> Shape {
              auto p = apply(f.param, ns);
              if (from_ && f.binder == *from_) return fun_shape(f.binder, p, f.result);
              auto [b, r] = under(f.binder, f.result, ns);
              return fun_shape(b, p, apply(r, ns));
            },
            [&](const TFunShape& f) -> Shape {
              auto bnd = apply(f.bound, ns);
              if (from_t_ && f.binder == *from_t_) return tfun_shape(f.binder, bnd, f.result);
              auto [b, r] = under_t(f.binder, f.result, ns);
              return tfun_shape(b, bnd, apply(r, ns));
            },
            [&](const BoxedShape& b) -> Shape { return boxed_shape(apply(b.inner, ns)); },
        },
        s.node().v);
  }

  // Term positions need a variable replacement; set substitutions touch
  // only the capture sets found in annotations.
  Term apply(const Term& t, NameSupply& ns) const {
    auto rv = [&](const Var& x) -> Var {
      if (from_ && x == *from_ && to_var_) return *to_var_;
      return x;
    };
    return std::visit(
        overloaded{
            [&](const VarRef& v) { return var_ref(rv(v.x)); },
            [&](const Abs& a) {
              auto p = apply(a.param, ns);
              if (from_ && a.x == *from_) return abs_(a.x, p, a.body);
              auto [b, body] = under(a.x, a.body, ns);
              return abs_(b, p, apply(body, ns));
            },
            [&](const TAbs& a) {
              auto bnd = apply(a.bound, ns);
              if (from_t_ && a.x == *from_t_) return tabs(a.x, bnd, a.body);
              auto [b, body] = under_t(a.x, a.body, ns);
              return tabs(b, bnd, apply(body, ns));
            },
            [&](const App& a) { return app(rv(a.f), rv(a.arg)); },
            [&](const TApp& a) { return tapp(rv(a.f), apply(a.arg, ns)); },
            [&](const BoxV& b) { return box_(rv(b.x)); },
            [&](const Unbox& u) { return unbox_(apply(u.captures), rv(u.x)); },
            [&](const Let& l) {
              auto bound = apply(l.bound, ns);
              if (from_ && l.x == *from_) return let_(l.x, bound, l.body);
              auto [b, body] = under(l.x, l.body, ns);
              return let_(b, bound, apply(body, ns));
            },
        },
        t.node().v);
  }

 private:
  // rename a binder that would capture a free variable of the replacement
  template <class Body>
  std::pair<Var, Body> under(const Var& b, const Body& body, NameSupply& ns) const {
    if (!repl_.vars.count(b)) return {b, body};
    auto nb = ns.fresh(b.name);
    return {nb, Substitution::var(b, nb).apply(body, ns)};
  }
  template <class Body>
  std::pair<TVar, Body> under_t(const TVar& b, const Body& body, NameSupply& ns) const {
    if (!repl_.tvars.count(b)) return {b, body};
    auto nb = ns.fresh_tvar(b.name);
    return {nb, Substitution::tvar(b, tvar_shape(nb)).apply(body, ns)};
  }

  std::optional<Var> from_;
  std::optional<Var> to_var_;
  CaptureSet to_set_;
  std::optional<TVar> from_t_;
  std::optional<Shape> to_shape_;
  FreeVars repl_;
};

inline Term subst(const Term& t, const Var& x, const Var& y, NameSupply& ns) {
  return Substitution::var(x, y).apply(t, ns);
}
inline Type subst(const Type& t, const Var& x, const Var& y, NameSupply& ns) {
  return Substitution::var(x, y).apply(t, ns);
}
inline Type subst(const Type& t, const Var& x, const CaptureSet& c, NameSupply& ns) {
  return Substitution::set(x, c).apply(t, ns);
}
inline Type subst(const Type& t, const TVar& x, const Shape& s, NameSupply& ns) {
  return Substitution::tvar(x, s).apply(t, ns);
}
inline CaptureSet subst(const CaptureSet& c, const Var& x, const CaptureSet& to) {
  return Substitution::set(x, to).apply(c);
}

// ---- alpha equivalence -----------------------------------------------------

namespace detail {

struct AlphaScope {
  std::vector<std::pair<Var, Var>> vars;
  std::vector<std::pair<TVar, TVar>> tvars;

  template <class V>
  static bool same(const std::vector<std::pair<V, V>>& scope, const V& a, const V& b) {
    for (auto i = scope.size(); i-- > 0;) {
      bool la = scope[i].first == a, lb = scope[i].second == b;
      if (la || lb) return la && lb;
    }
    return a == b;
  }
  bool same(const Var& a, const Var& b) const { return same(vars, a, b); }
  bool same(const TVar& a, const TVar& b) const { return same(tvars, a, b); }

  bool same(const CaptureSet& a, const CaptureSet& b) const {
    if (a.has_root() != b.has_root() || a.vars().size() != b.vars().size()) return false;
    for (auto& x : a.vars()) {
      bool found = false;
      for (auto& y : b.vars())
        if (same(x, y)) { found = true; break; }
      if (!found) return false;
    }
    return true;
  }
};

inline bool alpha(const Type& a, const Type& b, AlphaScope& sc);

inline bool alpha(const Shape& a, const Shape& b, AlphaScope& sc) {
  if (a.node().v.index() != b.node().v.index()) return false;
  return std::visit(
      overloaded{
          [&](const TVarShape& x) { return sc.same(x.var, b.as<TVarShape>()->var); },
          [&](const TopShape&) { return true; },
          [&](const FunShape& f) {
            auto& g = *b.as<FunShape>();
            if (!alpha(f.param, g.param, sc)) return false;
            sc.vars.emplace_back(f.binder, g.binder);
            bool ok = alpha(f.result, g.result, sc);
            sc.vars.pop_back();
            return ok;
          },
          [&](const TFunShape& f) {
            auto& g = *b.as<TFunShape>();
            if (!alpha(f.bound, g.bound, sc)) return false;
            sc.tvars.emplace_back(f.binder, g.binder);
            bool ok = alpha(f.result, g.result, sc);
            sc.tvars.pop_back();
            return ok;
          },
          [&](const BoxedShape& x) { return alpha(x.inner, b.as<BoxedShape>()->inner, sc); },
      },
      a.node().v);
}

inline bool alpha(const Type& a, const Type& b, AlphaScope& sc) {
  return sc.same(a.captures, b.captures) && alpha(a.shape, b.shape, sc);
}

inline bool alpha(const Term& a, const Term& b, AlphaScope& sc) {
  if (a.node().v.index() != b.node().v.index()) return false;
  return std::visit(
      overloaded{
          [&](const VarRef& x) { return sc.same(x.x, b.as<VarRef>()->x); },
          [&](const Abs& x) {
            auto& y = *b.as<Abs>();
            if (!alpha(x.param, y.param, sc)) return false;
            sc.vars.emplace_back(x.x, y.x);
            bool ok = alpha(x.body, y.body, sc);
            sc.vars.pop_back();
            return ok;
          },
          [&](const TAbs& x) {
            auto& y = *b.as<TAbs>();
            if (!alpha(x.bound, y.bound, sc)) return false;
            sc.tvars.emplace_back(x.x, y.x);
            bool ok = alpha(x.body, y.body, sc);
            sc.tvars.pop_back();
            return ok;
          },
          [&](const App& x) {
            auto& y = *b.as<App>();
            return sc.same(x.f, y.f) && sc.same(x.arg, y.arg);
          },
          [&](const TApp& x) {
            auto& y = *b.as<TApp>();
            return sc.same(x.f, y.f) && alpha(x.arg, y.arg, sc);
          },
          [&](const BoxV& x) { return sc.same(x.x, b.as<BoxV>()->x); },
          [&](const Unbox& x) {
            auto& y = *b.as<Unbox>();
            return sc.same(x.x, y.x) && sc.same(x.captures, y.captures);
          },
          [&](const Let& x) {
            auto& y = *b.as<Let>();
            if (!alpha(x.bound, y.bound, sc)) return false;
            sc.vars.emplace_back(x.x, y.x);
            bool ok = alpha(x.body, y.body, sc);
            sc.vars.pop_back();
            return ok;
          },
      },
      a.node().v);
}

}  // namespace detail

inline bool alpha_eq(const Type& a, const Type& b) {
  detail::AlphaScope sc;
  return detail::alpha(a, b, sc);
}
inline bool alpha_eq(const Shape& a, const Shape& b) {
  detail::AlphaScope sc;
  return detail::alpha(a, b, sc);
}
inline bool alpha_eq(const Term& a, const Term& b) {
  detail::AlphaScope sc;
  return detail::alpha(a, b, sc);
}

// ---- well-formedness -------------------------------------------------------

inline void wf_captures(const Env& g, const CaptureSet& c) {
  for (auto& v : c.vars())
    if (!g.binds(v)) fail(ErrorKind::IllFormedType, "wf", "unbound variable " + v.name + " in capture set");
}

inline void wf_type(const Env& g, const Type& t);

inline void wf_shape(const Env& g, const Shape& s) {
  std::visit(overloaded{
                 [&](const TVarShape& x) {
                   if (!g.binds(x.var)) fail(ErrorKind::IllFormedType, "wf", "unbound type variable " + x.var.name);
                 },
                 [&](const TopShape&) {},
                 [&](const FunShape& f) {
                   wf_type(g, f.param);
                   wf_type(g.extended(f.binder, f.param), f.result);
                 },
                 [&](const TFunShape& f) {
                   wf_shape(g, f.bound);
                   wf_type(g.extended(f.binder, f.bound), f.result);
                 },
                 [&](const BoxedShape& b) { wf_type(g, b.inner); },
             },
             s.node().v);
}

inline void wf_type(const Env& g, const Type& t) {
  wf_captures(g, t.captures);
  wf_shape(g, t.shape);
}

inline bool is_wf(const Env& g, const Type& t) {
  try {
    wf_type(g, t);
    return true;
  } catch (const Error&) {
    return false;
  }
}

inline void wf_env(const Env& g) {
  Env prefix;
  for (auto& b : g.bindings()) {
    std::visit(overloaded{
                   [&](const TermBind& tb) {
                     if (prefix.binds(tb.x)) fail(ErrorKind::IllFormedType, "wf-env", "shadowed binding " + tb.x.name);
                     wf_type(prefix, tb.type);
                   },
                   [&](const TypeBind& tb) {
                     if (prefix.binds(tb.x)) fail(ErrorKind::IllFormedType, "wf-env", "shadowed binding " + tb.x.name);
                     wf_shape(prefix, tb.bound);
                   },
               },
               b);
    prefix = prefix.extended(b);
  }
}

// ---- simple-formedness -----------------------------------------------------

inline bool is_simple_formed(const Type& t);

inline bool is_simple_formed(const Shape& s) {
  return std::visit(overloaded{
                        [](const TVarShape&) { return true; },
                        [](const TopShape&) { return true; },
                        [](const FunShape& f) {
                          return is_simple_formed(f.param) && is_simple_formed(f.result);
                        },
                        [](const TFunShape& f) {
                          return is_simple_formed(f.bound) && is_simple_formed(f.result);
                        },
                        [](const BoxedShape& b) { return is_simple_formed(b.inner); },
                    },
                    s.node().v);
}

inline bool is_simple_formed(const Type& t) {
  if (!t.captures.empty() && t.shape.is<BoxedShape>()) return false;
  return is_simple_formed(t.shape);
}

// ---- small queries ---------------------------------------------------------

inline bool has_box_nodes(const Term& t) {
  return std::visit(overloaded{
                        [](const BoxV&) { return true; },
                        [](const Unbox&) { return true; },
                        [](const Abs& a) { return has_box_nodes(a.body); },
                        [](const TAbs& a) { return has_box_nodes(a.body); },
                        [](const Let& l) { return has_box_nodes(l.bound) || has_box_nodes(l.body); },
                        [](const auto&) { return false; },
                    },
                    t.node().v);
}

inline std::size_t term_size(const Term& t) {
  return std::visit(overloaded{
                        [](const Abs& a) { return 1 + term_size(a.body); },
                        [](const TAbs& a) { return 1 + term_size(a.body); },
                        [](const Let& l) { return 1 + term_size(l.bound) + term_size(l.body); },
                        [](const auto&) -> std::size_t { return 1; },
                    },
                    t.node().v);
}

}  // namespace capcalc
