#pragma once

#include "../capcalc.hpp"
#include "rng.hpp"

namespace capcalc::harness {

namespace detail {

template <class Pick>
Term drop_with(const Term& t, Pick& pick, NameSupply& ns) {
  return std::visit(
      overloaded{
          [&](const Abs& a) { return abs_(a.x, a.param, drop_with(a.body, pick, ns)); },
          [&](const TAbs& a) { return tabs(a.x, a.bound, drop_with(a.body, pick, ns)); },
          [&](const Let& l) -> Term {
            auto body = drop_with(l.body, pick, ns);
            if (auto x = pick(l.bound)) return Substitution::var(l.x, *x).apply(body, ns);
            return let_(l.x, drop_with(l.bound, pick, ns), body);
          },
          [&](const auto&) { return t; },
      },
      t.node().v);
}

}  // namespace detail

// let y = box x in u  ~>  [y:=x]u, and likewise for C unbox x
inline Term drop_boxes(const Term& t, Rng& rng, double rate) {
  auto ns = supply_for(t);
  auto pick = [&](const Term& s) -> std::optional<Var> {
    if (rate <= 0) return std::nullopt;
    if (auto* b = s.as<BoxV>(); b && rng.chance(rate)) return b->x;
    if (auto* u = s.as<Unbox>(); u && rng.chance(rate)) return u->x;
    return std::nullopt;
  };
  return detail::drop_with(t, pick, ns);
}

// let w = (fun (z: P) let o = C unbox z in a o) in u  ~>  [w:=a]u
// i.e. throws away a hand-written eta wrapper, so inference has to rebuild it.
inline Term drop_eta(const Term& t, Rng& rng, double rate) {
  auto ns = supply_for(t);
  auto pick = [&](const Term& s) -> std::optional<Var> {
    auto* f = s.as<Abs>();
    if (!f || rate <= 0) return std::nullopt;
    auto* l = f->body.as<Let>();
    if (!l) return std::nullopt;
    auto* u = l->bound.as<Unbox>();
    auto* ap = l->body.as<App>();
    if (!u || !ap || u->x != f->x || ap->arg != l->x || ap->f == f->x || ap->f == l->x) return std::nullopt;
    if (!rng.chance(rate)) return std::nullopt;
    return ap->f;
  };
  return detail::drop_with(t, pick, ns);
}

}  // namespace capcalc::harness
