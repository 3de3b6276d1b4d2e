#include "helpers.hpp"

using namespace capcalc;
using namespace capcalc::test;

TEST(Subcapture, Background) {
  auto g = background();
  EXPECT_TRUE(subcapture(g, C("{op}"), C("{file, console}")));
  EXPECT_TRUE(subcapture(g, C("{file}"), C("{file, console}")));
  EXPECT_TRUE(subcapture(g, C("{}"), C("{file}")));
  EXPECT_TRUE(subcapture(g, C("{}"), C("{}")));
  EXPECT_FALSE(subcapture(g, C("{file}"), C("{console}")));
  EXPECT_TRUE(subcapture(g, C("{l}"), C("{console}")));
  EXPECT_FALSE(subcapture(g, C("{l}"), C("{file}")));
}

TEST(Subcapture, Root) {
  auto g = background();
  EXPECT_FALSE(subcapture(g, C("{cap}"), C("{file, console}")));
  EXPECT_TRUE(subcapture(g, C("{cap}"), C("{cap}")));
  EXPECT_TRUE(subcapture(g, C("{file}"), C("{cap}")));
  EXPECT_TRUE(subcapture(g, C("{op, l}"), C("{cap}")));
}

TEST(Widen, TypeVariables) {
  auto g = E("X <: all (z: Top) -> Top\nY <: X\nZ <: Top");
  EXPECT_TRUE(AlphaEq(shape_type(widen_tvar(g, tvar_name("X"))), T("all (z: Top) -> Top")));
  EXPECT_TRUE(AlphaEq(shape_type(widen_tvar(g, tvar_name("Y"))), T("all (z: Top) -> Top")));
  EXPECT_TRUE(AlphaEq(shape_type(widen_tvar(g, tvar_name("Z"))), T("Top")));
  EXPECT_EQ(error_of([&] { widen_tvar(g, tvar_name("W")); }), ErrorKind::UnboundVariable);
}

TEST(Widen, Variables) {
  auto g = E("io : {cap} Top\nx : all (z: Top) -> Top\nX <: all (z: Top) -> Top\nf : {cap} X\nb : Box {io} Top");
  EXPECT_TRUE(AlphaEq(var_type(g, var("io")), T("{io} Top")));
  EXPECT_TRUE(AlphaEq(var_type(g, var("x")), T("{x} all (z: Top) -> Top")));
  EXPECT_EQ(error_of([&] { var_type(g, var("nope")); }), ErrorKind::UnboundVariable);
  EXPECT_TRUE(AlphaEq(widen_var(g, var("f")), T("{f} all (z: Top) -> Top")));
  EXPECT_TRUE(AlphaEq(widen_var(g, var("io")), T("{io} Top")));
  EXPECT_TRUE(AlphaEq(widen_var(g, var("b")), T("{b} Box {io} Top")));
}

TEST(Subtype, Examples) {
  auto g = E("io : {cap} Top\nX <: Top");
  EXPECT_TRUE(subtype(g, T("Box {io} Top"), T("Box {cap} Top")));
  EXPECT_TRUE(subtype(g, T("{io} Top"), T("{cap} Top")));
  EXPECT_FALSE(subtype(g, T("{cap} Top"), T("{io} Top")));
  EXPECT_TRUE(subtype(g, T("X"), T("X")));
  EXPECT_TRUE(subtype(g, T("X"), T("Top")));
  EXPECT_FALSE(subtype(g, T("Top"), T("X")));
  EXPECT_TRUE(subtype(g, T("all (z: {cap} Top) -> {z} Top"), T("all (w: {io} Top) -> {w, io} Top")));
  EXPECT_FALSE(subtype(g, T("all (z: Top) -> Top"), T("all (w: {io} Top) -> Top")));
  EXPECT_TRUE(subtype(g, T("all [A <: Top] -> A"), T("all [B <: X] -> Top")));
  EXPECT_FALSE(subtype(g, T("{io} Top"), T("Box {io} Top")));
}

TEST(Subtype, CaptInlinedAgrees) {
  auto g = background();
  EXPECT_TRUE(subtype_capt(g, T("{file} Top"), T("{file} Top")));
  EXPECT_TRUE(subtype_capt(g, T("{file} Box {console} Top"), T("{file} Box {cap} Top")));
  EXPECT_EQ(subtype(g, T("{file} Box {console} Top"), T("{file} Box {cap} Top")), true);
  EXPECT_FALSE(subtype_capt(g, T("{l} Top"), T("{file} Top")));
}

TEST(Subtype, FuelExhaustionIsDistinct) {
  // the classic F<: divergence: contravariant self-referential bound
  auto g = E("X0 <: all [A <: Top] -> all [Y <: all [B <: A] -> all [Z <: B] -> Z] -> Y");
  Fuel fuel(5000);
  EXPECT_THROW(subtype(g, T("X0"), T("all [B <: X0] -> all [Z <: B] -> Z"), fuel), FuelExhausted);
  Fuel fuel2(5000);
  EXPECT_THROW(subtype_capt(g, T("X0"), T("all [B <: X0] -> all [Z <: B] -> Z"), fuel2), FuelExhausted);
  Fuel tiny(1);
  EXPECT_THROW(subtype(g, T("all (a: Top) -> Top"), T("all (b: Top) -> Top"), tiny), FuelExhausted);
}
