#pragma once

#include <cassert>
#include <cstddef>

#include "syntax.hpp"

namespace capcalc {

namespace detail {

// Measure: depth of the deepest binding mentioned. sc-var only ever moves to
// a binding's declared set, which mentions strictly shallower bindings.
inline std::size_t max_depth(const Env& g, const CaptureSet& c) {
  std::size_t d = 0;
  for (auto& v : c.vars()) d = std::max(d, g.depth(v));
  return d;
}

inline bool subcapture_elem(const Env& g, const Var& x, const CaptureSet& c2, std::size_t bound);

inline bool subcapture_set(const Env& g, const CaptureSet& c1, const CaptureSet& c2,
                           std::size_t bound) {
  // cap has no binding: only sc-elem can account for it
  if (c1.has_root() && !c2.has_root()) return false;
  for (auto& x : c1.vars())
    if (!subcapture_elem(g, x, c2, bound)) return false;
  return true;
}

inline bool subcapture_elem(const Env& g, const Var& x, const CaptureSet& c2, std::size_t bound) {
  if (c2.contains(x)) return true;  // sc-elem
  auto t = g.lookup(x);
  if (!t) return false;
  // sc-var
  [[maybe_unused]] auto d = g.depth(x);
  assert(d <= bound);
  assert(max_depth(g, t->captures) < d && "subcapture measure must decrease");
  return subcapture_set(g, t->captures, c2, d);
}

}  // namespace detail

inline bool subcapture(const Env& g, const CaptureSet& c1, const CaptureSet& c2) {
  return detail::subcapture_set(g, c1, c2, g.size() + 1);
}

}  // namespace capcalc
