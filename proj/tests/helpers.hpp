#pragma once

#include <gtest/gtest.h>

#include <capcalc/capcalc.hpp>

namespace capcalc::test {

inline Type T(const char* s) { return parse_type(s); }
inline Shape S(const char* s) { return parse_shape(s); }
inline Term t(const char* s) { return parse_term(s); }
inline CaptureSet C(const char* s) { return parse_captures(s); }
inline Env E(const char* s) { return parse_env(s); }

inline ::testing::AssertionResult AlphaEq(const Type& a, const Type& b) {
  if (alpha_eq(a, b)) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << print(a) << "  vs  " << print(b);
}
inline ::testing::AssertionResult AlphaEq(const Term& a, const Term& b) {
  if (alpha_eq(a, b)) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << print(a) << "  vs  " << print(b);
}

template <class F>
ErrorKind error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::GenerationExhausted;
}

// Γ_B from the running file/console example
inline Env background() {
  return E(
      "file : {cap} Top\n"
      "console : {cap} Top\n"
      "op : {file, console} all (z: Top) -> Top\n"
      "l : {console} Top\n");
}

}  // namespace capcalc::test
