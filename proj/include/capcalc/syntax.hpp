#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace capcalc {

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

// Names carry a disambiguator; parsed names have id 0, fresh ones id > 0.
struct Var {
  std::string name;
  std::uint32_t id = 0;
  friend auto operator<=>(const Var&, const Var&) = default;
  friend bool operator==(const Var&, const Var&) = default;
};

struct TVar {
  std::string name;
  std::uint32_t id = 0;
  friend auto operator<=>(const TVar&, const TVar&) = default;
  friend bool operator==(const TVar&, const TVar&) = default;
};

inline Var var(std::string n) { return Var{std::move(n), 0}; }
inline TVar tvar_name(std::string n) { return TVar{std::move(n), 0}; }

class CaptureSet {
 public:
  CaptureSet() = default;
  CaptureSet(std::initializer_list<Var> vs, bool root = false)
      : vars_(vs), root_(root) {}
  explicit CaptureSet(std::set<Var> vs, bool root = false)
      : vars_(std::move(vs)), root_(root) {}

  static CaptureSet root() { return CaptureSet({}, true); }

  bool has_root() const { return root_; }
  const std::set<Var>& vars() const { return vars_; }
  bool contains(const Var& v) const { return vars_.count(v) != 0; }
  bool empty() const { return vars_.empty() && !root_; }
  std::size_t size() const { return vars_.size() + (root_ ? 1 : 0); }

  CaptureSet& add(const Var& v) { vars_.insert(v); return *this; }
  CaptureSet& add_root() { root_ = true; return *this; }
  CaptureSet& remove(const Var& v) { vars_.erase(v); return *this; }
  CaptureSet& merge(const CaptureSet& o) {
    vars_.insert(o.vars_.begin(), o.vars_.end());
    root_ = root_ || o.root_;
    return *this;
  }

  CaptureSet with(const Var& v) const { auto c = *this; return c.add(v); }
  CaptureSet without(const Var& v) const { auto c = *this; return c.remove(v); }
  CaptureSet united(const CaptureSet& o) const { auto c = *this; return c.merge(o); }

  // plain inclusion, no environment involved
  bool included_in(const CaptureSet& o) const {
    if (root_ && !o.root_) return false;
    for (auto& v : vars_)
      if (!o.contains(v)) return false;
    return true;
  }

  friend bool operator==(const CaptureSet&, const CaptureSet&) = default;

 private:
  std::set<Var> vars_;
  bool root_ = false;
};

// A capture set that may also contain the placeholder ◊ for the input variable.
struct HoledCaptureSet {
  CaptureSet base;
  bool hole = false;

  static HoledCaptureSet just_hole() { return {CaptureSet{}, true}; }

  HoledCaptureSet without_hole() const { return {base, false}; }
  HoledCaptureSet with_hole() const { return {base, true}; }

  friend bool operator==(const HoledCaptureSet&, const HoledCaptureSet&) = default;
};

inline CaptureSet fill_hole(const HoledCaptureSet& c, const CaptureSet& filler) {
  if (!c.hole) return c.base;
  return c.base.united(filler);
}
inline CaptureSet fill_hole(const HoledCaptureSet& c, const Var& x) {
  return fill_hole(c, CaptureSet{x});
}

// ---- types -----------------------------------------------------------------

struct ShapeNode;

class Shape {
 public:
  explicit Shape(ShapeNode n);
  const ShapeNode& node() const { return *p_; }
  template <class T>
  const T* as() const;
  template <class T>
  bool is() const { return as<T>() != nullptr; }

 private:
  std::shared_ptr<const ShapeNode> p_;
};

// S and {} S are the same value: an empty set means "bare shape".
struct Type {
  CaptureSet captures;
  Shape shape;
};

struct TVarShape { TVar var; };
struct TopShape {};
struct FunShape { Var binder; Type param; Type result; };
struct TFunShape { TVar binder; Shape bound; Type result; };
struct BoxedShape { Type inner; };

struct ShapeNode {
  std::variant<TVarShape, TopShape, FunShape, TFunShape, BoxedShape> v;
};

inline Shape::Shape(ShapeNode n) : p_(std::make_shared<const ShapeNode>(std::move(n))) {}
template <class T>
const T* Shape::as() const { return std::get_if<T>(&p_->v); }

inline Shape tvar_shape(TVar x) { return Shape(ShapeNode{TVarShape{std::move(x)}}); }
inline Shape top_shape() { return Shape(ShapeNode{TopShape{}}); }
inline Shape fun_shape(Var x, Type p, Type r) {
  return Shape(ShapeNode{FunShape{std::move(x), std::move(p), std::move(r)}});
}
inline Shape tfun_shape(TVar x, Shape b, Type r) {
  return Shape(ShapeNode{TFunShape{std::move(x), std::move(b), std::move(r)}});
}
inline Shape boxed_shape(Type t) { return Shape(ShapeNode{BoxedShape{std::move(t)}}); }

inline Type shape_type(Shape s) { return Type{CaptureSet{}, std::move(s)}; }
inline Type capturing(CaptureSet c, Shape s) { return Type{std::move(c), std::move(s)}; }
inline Type top_type() { return shape_type(top_shape()); }
inline const CaptureSet& cs(const Type& t) { return t.captures; }

// ---- terms -----------------------------------------------------------------

struct TermNode;

class Term {
 public:
  explicit Term(TermNode n);
  const TermNode& node() const { return *p_; }
  template <class T>
  const T* as() const;
  template <class T>
  bool is() const { return as<T>() != nullptr; }
  const void* identity() const { return p_.get(); }

 private:
  std::shared_ptr<const TermNode> p_;
};

struct VarRef { Var x; };
struct Abs { Var x; Type param; Term body; };
struct TAbs { TVar x; Shape bound; Term body; };
struct App { Var f; Var arg; };
struct TApp { Var f; Shape arg; };
struct BoxV { Var x; };
struct Unbox { CaptureSet captures; Var x; };
struct Let { Var x; Term bound; Term body; };

struct TermNode {
  std::variant<VarRef, Abs, TAbs, App, TApp, BoxV, Unbox, Let> v;
};

inline Term::Term(TermNode n) : p_(std::make_shared<const TermNode>(std::move(n))) {}
template <class T>
const T* Term::as() const { return std::get_if<T>(&p_->v); }

inline Term var_ref(Var x) { return Term(TermNode{VarRef{std::move(x)}}); }
inline Term abs_(Var x, Type p, Term b) {
  return Term(TermNode{Abs{std::move(x), std::move(p), std::move(b)}});
}
inline Term tabs(TVar x, Shape b, Term body) {
  return Term(TermNode{TAbs{std::move(x), std::move(b), std::move(body)}});
}
inline Term app(Var f, Var a) { return Term(TermNode{App{std::move(f), std::move(a)}}); }
inline Term tapp(Var f, Shape s) { return Term(TermNode{TApp{std::move(f), std::move(s)}}); }
inline Term box_(Var x) { return Term(TermNode{BoxV{std::move(x)}}); }
inline Term unbox_(CaptureSet c, Var x) {
  return Term(TermNode{Unbox{std::move(c), std::move(x)}});
}
inline Term let_(Var x, Term b, Term body) {
  return Term(TermNode{Let{std::move(x), std::move(b), std::move(body)}});
}

enum class Kind { Var, Val, Trm };

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::Var: return "Var";
    case Kind::Val: return "Val";
    case Kind::Trm: return "Trm";
  }
  return "?";
}

inline Kind kind_of(const Term& t) {
  return std::visit(overloaded{
                        [](const VarRef&) { return Kind::Var; },
                        [](const Abs&) { return Kind::Val; },
                        [](const TAbs&) { return Kind::Val; },
                        [](const BoxV&) { return Kind::Val; },
                        [](const auto&) { return Kind::Trm; },
                    },
                    t.node().v);
}

inline bool is_answer(const Term& t) { return kind_of(t) != Kind::Trm; }

// ---- environments ----------------------------------------------------------

struct TermBind { Var x; Type type; };
struct TypeBind { TVar x; Shape bound; };
using Binding = std::variant<TermBind, TypeBind>;

// Persistent cons list; extension is O(1) and shares the prefix.
class Env {
  struct Node {
    Binding b;
    std::shared_ptr<const Node> prev;
    std::size_t size;
  };

 public:
  Env() = default;

  Env extended(Var x, Type t) const { return push(TermBind{std::move(x), std::move(t)}); }
  Env extended(TVar x, Shape s) const { return push(TypeBind{std::move(x), std::move(s)}); }
  Env extended(Binding b) const { return push(std::move(b)); }

  std::size_t size() const { return head_ ? head_->size : 0; }
  bool empty() const { return !head_; }

  std::optional<Type> lookup(const Var& x) const {
    for (auto* n = head_.get(); n; n = n->prev.get())
      if (auto* tb = std::get_if<TermBind>(&n->b); tb && tb->x == x) return tb->type;
    return std::nullopt;
  }
  std::optional<Shape> lookup(const TVar& x) const {
    for (auto* n = head_.get(); n; n = n->prev.get())
      if (auto* tb = std::get_if<TypeBind>(&n->b); tb && tb->x == x) return tb->bound;
    return std::nullopt;
  }
  bool binds(const Var& x) const { return lookup(x).has_value(); }
  bool binds(const TVar& x) const { return lookup(x).has_value(); }

  // 1-based position from the bottom; used as the subcapture measure
  std::size_t depth(const Var& x) const {
    for (auto* n = head_.get(); n; n = n->prev.get())
      if (auto* tb = std::get_if<TermBind>(&n->b); tb && tb->x == x) return n->size;
    return 0;
  }

  bool dom_contains(const CaptureSet& c) const {
    if (c.has_root()) return false;
    for (auto& v : c.vars())
      if (!binds(v)) return false;
    return true;
  }

  std::vector<Binding> bindings() const {
    std::vector<Binding> out;
    for (auto* n = head_.get(); n; n = n->prev.get()) out.push_back(n->b);
    return {out.rbegin(), out.rend()};
  }

  std::vector<Var> term_vars() const {
    std::vector<Var> out;
    for (auto& b : bindings())
      if (auto* tb = std::get_if<TermBind>(&b)) out.push_back(tb->x);
    return out;
  }
  std::vector<TVar> type_vars() const {
    std::vector<TVar> out;
    for (auto& b : bindings())
      if (auto* tb = std::get_if<TypeBind>(&b)) out.push_back(tb->x);
    return out;
  }

 private:
  Env push(Binding b) const {
    Env e;
    e.head_ = std::make_shared<const Node>(Node{std::move(b), head_, size() + 1});
    return e;
  }
  std::shared_ptr<const Node> head_;
};

inline Env make_env(std::vector<Binding> bs) {
  Env e;
  for (auto& b : bs) e = e.extended(std::move(b));
  return e;
}

// Fresh names. Threaded explicitly; seed it above every id already in play.
class NameSupply {
 public:
  explicit NameSupply(std::uint32_t next = 1) : next_(next) {}
  Var fresh(const std::string& base) { return Var{base, next_++}; }
  TVar fresh_tvar(const std::string& base) { return TVar{base, next_++}; }
  void bump_past(std::uint32_t id) {
    if (id >= next_) next_ = id + 1;
  }
  std::uint32_t peek() const { return next_; }

 private:
  std::uint32_t next_;
};

}  // namespace capcalc
