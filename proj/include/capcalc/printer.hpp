#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>

#include "syntax_ops.hpp"

namespace capcalc {

namespace detail {

// Chooses display names: binders get their base name plus primes until
// nothing in scope or free could be confused with them.
class Printer {
 public:
  explicit Printer(const FreeVars& free) {
    for (auto& v : free.vars)
      if (v.id == 0) claim(v, v.name);
    for (auto& v : free.tvars)
      if (v.id == 0) claim(v, v.name);
    for (auto& v : free.vars)
      if (v.id != 0) claim(v, pick(v.name));
    for (auto& v : free.tvars)
      if (v.id != 0) claim(v, pick(v.name));
  }

  std::string captures(const CaptureSet& c) const {
    std::string out = "{";
    bool first = true;
    std::set<std::string> names;
    for (auto& v : c.vars()) names.insert(name(v));
    for (auto& n : names) {
      out += (first ? "" : ", ") + n;
      first = false;
    }
    if (c.has_root()) out += first ? "cap" : ", cap";
    return out + "}";
  }

  std::string type(const Type& t) {
    if (t.captures.empty()) return shape(t.shape);
    return captures(t.captures) + " " + shape(t.shape);
  }

  std::string shape(const Shape& s) {
    return std::visit(
        overloaded{
            [&](const TVarShape& x) { return name(x.var); },
            [&](const TopShape&) { return std::string("Top"); },
            [&](const FunShape& f) {
              auto p = type(f.param);
              auto b = bind(f.binder);
              auto r = type(f.result);
              unbind(f.binder);
              return "all (" + b + ": " + p + ") -> " + r;
            },
            [&](const TFunShape& f) {
              auto p = shape(f.bound);
              auto b = bind(f.binder);
              auto r = type(f.result);
              unbind(f.binder);
              return "all [" + b + " <: " + p + "] -> " + r;
            },
            [&](const BoxedShape& b) {
              if (b.inner.captures.empty()) return "Box " + shape(b.inner.shape);
              return "Box " + type(b.inner);
            },
        },
        s.node().v);
  }

  std::string term(const Term& t) {
    return std::visit(
        overloaded{
            [&](const VarRef& v) { return name(v.x); },
            [&](const Abs& a) {
              auto p = type(a.param);
              auto b = bind(a.x);
              auto body = term(a.body);
              unbind(a.x);
              return "fun (" + b + ": " + p + ") " + body;
            },
            [&](const TAbs& a) {
              auto p = shape(a.bound);
              auto b = bind(a.x);
              auto body = term(a.body);
              unbind(a.x);
              return "tfun [" + b + " <: " + p + "] " + body;
            },
            [&](const App& a) { return name(a.f) + " " + name(a.arg); },
            [&](const TApp& a) { return name(a.f) + " [" + shape(a.arg) + "]"; },
            [&](const BoxV& b) { return "box " + name(b.x); },
            [&](const Unbox& u) { return captures(u.captures) + " unbox " + name(u.x); },
            [&](const Let& l) {
              auto bound = term(l.bound);
              if (l.bound.is<Let>() || l.bound.is<Abs>() || l.bound.is<TAbs>() || l.bound.is<Unbox>())
                bound = "(" + bound + ")";
              auto b = bind(l.x);
              auto body = term(l.body);
              unbind(l.x);
              return "let " + b + " = " + bound + " in " + body;
            },
        },
        t.node().v);
  }

 private:
  template <class V>
  std::string name(const V& v) const {
    auto& m = names_of<V>();
    auto it = m.find(v);
    if (it != m.end() && !it->second.empty()) return it->second.back();
    return v.name;
  }

  template <class V>
  std::string bind(const V& v) {
    auto n = pick(v.name);
    names_of<V>()[v].push_back(n);
    used_.insert(n);
    return n;
  }
  template <class V>
  void unbind(const V& v) {
    auto& stack = names_of<V>()[v];
    used_.erase(used_.find(stack.back()));
    stack.pop_back();
  }
  template <class V>
  void claim(const V& v, const std::string& n) {
    names_of<V>()[v].push_back(n);
    used_.insert(n);
  }

  std::string pick(std::string base) const {
    while (used_.count(base)) base += "'";
    return base;
  }

  template <class V>
  std::map<V, std::vector<std::string>>& names_of() {
    if constexpr (std::is_same_v<V, Var>) return vnames_;
    else return tnames_;
  }
  template <class V>
  const std::map<V, std::vector<std::string>>& names_of() const {
    if constexpr (std::is_same_v<V, Var>) return vnames_;
    else return tnames_;
  }

  std::map<Var, std::vector<std::string>> vnames_;
  std::map<TVar, std::vector<std::string>> tnames_;
  std::multiset<std::string> used_;
};

}  // namespace detail

inline std::string print(const CaptureSet& c) {
  FreeVars fv;
  fv.vars = c.vars();
  return detail::Printer(fv).captures(c);
}
inline std::string print(const HoledCaptureSet& c) {
  auto s = print(c.base);
  if (!c.hole) return s;
  s.pop_back();
  return s + (c.base.empty() ? "" : ", ") + "◊}";
}
inline std::string print(const Type& t) { return detail::Printer(fv_type(t)).type(t); }
inline std::string print(const Shape& s) { return detail::Printer(fv_shape(s)).shape(s); }
inline std::string print(const Term& t) { return detail::Printer(free_vars(t)).term(t); }
inline std::string print(Kind k) { return to_string(k); }

inline std::string print(const Env& g) {
  std::string out;
  FreeVars all;
  for (auto& v : g.term_vars()) all.vars.insert(v);
  for (auto& v : g.type_vars()) all.tvars.insert(v);
  detail::Printer p(all);
  for (auto& b : g.bindings()) {
    std::visit(overloaded{
                   [&](const TermBind& tb) {
                     out += p.term(var_ref(tb.x)) + " : " + p.type(tb.type) + "\n";
                   },
                   [&](const TypeBind& tb) {
                     out += p.shape(tvar_shape(tb.x)) + " <: " + p.shape(tb.bound) + "\n";
                   },
               },
               b);
  }
  return out;
}

}  // namespace capcalc
