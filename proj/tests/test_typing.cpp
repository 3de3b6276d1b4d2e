#include "helpers.hpp"

using namespace capcalc;
using namespace capcalc::test;

TEST(Avoid, Polarity) {
  auto io = C("{io}");
  EXPECT_TRUE(AlphaEq(avoid(var("x"), io, T("{x} Top")), T("{io} Top")));
  EXPECT_TRUE(AlphaEq(avoid(var("x"), io, T("all (z: {x} Top) -> Top")), T("all (z: Top) -> Top")));
  EXPECT_TRUE(AlphaEq(avoid(var("x"), io, T("{a} Top")), T("{a} Top")));
  // boxes keep polarity; bounds flip it
  EXPECT_TRUE(AlphaEq(avoid(var("x"), io, T("Box {x, a} Top")), T("Box {io, a} Top")));
  EXPECT_TRUE(AlphaEq(avoid(var("x"), io, T("all [X <: all (q: {x} Top) -> {x} Top] -> {x} Top")),
                      T("all [X <: all (q: {io} Top) -> Top] -> {io} Top")));
  EXPECT_TRUE(AlphaEq(avoid(var("x"), io, T("all (f: all (q: {x} Top) -> Top) -> Top")),
                      T("all (f: all (q: {io} Top) -> Top) -> Top")));
}

TEST(Typecheck, Examples) {
  auto g = E("io : {cap} Top");
  EXPECT_TRUE(AlphaEq(typecheck(g, t("fun (z: {io} Top) z")), T("all (z: {io} Top) -> {z} Top")));
  EXPECT_TRUE(AlphaEq(typecheck(g, t("box io")), T("Box {io} Top")));
  EXPECT_TRUE(AlphaEq(typecheck(g, t("let y = box io in y")), T("Box {io} Top")));
  EXPECT_TRUE(AlphaEq(typecheck(g, t("fun (z: Top) io")), T("{io} all (z: Top) -> {io} Top")));
}

TEST(Typecheck, EscapeViolation) {
  auto g = E("io : {cap} Top\nx : Box {cap} Top");
  EXPECT_EQ(error_of([&] { typecheck(g, t("{io} unbox x")); }), ErrorKind::EscapeViolation);
  EXPECT_EQ(error_of([&] { typecheck(g, t("{cap} unbox x")); }), ErrorKind::EscapeViolation);
}

TEST(Typecheck, Errors) {
  auto g = E("io : {cap} Top\nf : all (z: Box {io} Top) -> Top\nb : Box {io} Top\nP <: Top");
  EXPECT_EQ(error_of([&] { typecheck(g, t("nope")); }), ErrorKind::UnboundVariable);
  EXPECT_EQ(error_of([&] { typecheck(g, t("io io")); }), ErrorKind::NotAFunction);
  EXPECT_EQ(error_of([&] { typecheck(g, t("io [Top]")); }), ErrorKind::NotATypeFunction);
  EXPECT_EQ(error_of([&] { typecheck(g, t("{io} unbox io")); }), ErrorKind::NotABoxed);
  EXPECT_EQ(error_of([&] { typecheck(g, t("f io")); }), ErrorKind::SubtypeFailure);
  EXPECT_EQ(error_of([&] { typecheck(g, t("fun (z: {q} Top) z")); }), ErrorKind::IllFormedType);
  EXPECT_TRUE(AlphaEq(typecheck(g, t("{io} unbox b")), T("{io} Top")));
  EXPECT_TRUE(AlphaEq(typecheck(g, t("let y = box io in f y")), T("Top")));
}

TEST(Typecheck, DependentApplicationAndLetAvoidance) {
  auto g = E("io : {cap} Top\nid : all (z: {cap} Top) -> {z} Top");
  EXPECT_TRUE(AlphaEq(typecheck(g, t("id io")), T("{io} Top")));
  // the let-bound closure is approximated by its capture set
  EXPECT_TRUE(AlphaEq(typecheck(g, t("let k = (fun (u: Top) io) in k")),
                      T("{io} all (u: Top) -> {io} Top")));
  EXPECT_TRUE(AlphaEq(typecheck(g, t("let k = (fun (u: Top) io) in id k")), T("{io} Top")));
}

TEST(Typecheck, Polymorphism) {
  auto g = E("io : {cap} Top\npid : all [X <: Top] -> all (a: X) -> {a} X\nb : Box {io} Top");
  EXPECT_TRUE(AlphaEq(typecheck(g, t("let p = pid [Box {io} Top] in p b")), T("{b} Box {io} Top")));
  EXPECT_TRUE(AlphaEq(typecheck(g, t("tfun [Y <: Top] pid [Y]")),
                      T("{pid} all [Y <: Top] -> all (a: Y) -> {a} Y")));
}

TEST(Typecheck, ShadowingIsRenamed) {
  auto g = E("x : Top");
  EXPECT_TRUE(AlphaEq(typecheck(g, t("fun (x: all (q: Top) -> Top) x")),
                      T("all (x: all (q: Top) -> Top) -> {x} all (q: Top) -> Top")));
  EXPECT_TRUE(AlphaEq(typecheck(g, t("let x = box x in x")), T("Box {x} Top")));
}

TEST(Typecheck, Deterministic) {
  auto g = E("io : {cap} Top\nid : all (z: {cap} Top) -> {z} Top");
  auto a = typecheck(g, t("let k = (fun (u: Top) id io) in k"));
  auto b = typecheck(g, t("let k = (fun (u: Top) id io) in k"));
  EXPECT_EQ(print(a), print(b));
}

TEST(Normalize, Clauses) {
  EXPECT_TRUE(AlphaEq(normalize(t("let y = {io} unbox x in box y")), t("x")));
  EXPECT_TRUE(AlphaEq(normalize(t("fun (z: Top) x z")), t("x")));
  EXPECT_TRUE(AlphaEq(normalize(t("fun (z: Top) z z")), t("fun (z: Top) z z")));
  EXPECT_TRUE(AlphaEq(normalize(t("let y = x in f y")), t("f x")));
  EXPECT_TRUE(AlphaEq(normalize(t("x y")), t("x y")));
  EXPECT_TRUE(AlphaEq(normalize(t("let y = f a in y")), t("f a")));
  EXPECT_TRUE(AlphaEq(normalize(t("tfun [X <: Top] x [X]")), t("x")));
  // bottom-up: inner rename exposes the outer box pattern
  EXPECT_TRUE(AlphaEq(normalize(t("let y = {io} unbox x in let z = y in box z")), t("x")));
}

TEST(Normalize, PreservesTypesUpToSubtyping) {
  auto g = E("io : {cap} Top\nf : all (z: {io} Top) -> Top\nb : Box {io} Top");
  auto term = t("let w = (fun (q: {io} Top) f q) in let y = {io} unbox b in let u = y in box u");
  auto before = typecheck(g, term);
  auto n = normalize(term);
  auto after = typecheck(g, n);
  EXPECT_TRUE(subtype(g, after, before)) << print(after) << " vs " << print(before);
}
