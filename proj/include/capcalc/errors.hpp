#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace capcalc {

enum class ErrorKind {
  UnboundVariable,
  NotAFunction,
  NotATypeFunction,
  NotABoxed,
  SubtypeFailure,
  SubcaptureFailure,
  EscapeViolation,
  IllFormedType,
  AdaptFailure,
  ParseError,
  MNFViolation,
  GenerationExhausted,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::NotAFunction: return "NotAFunction";
    case ErrorKind::NotATypeFunction: return "NotATypeFunction";
    case ErrorKind::NotABoxed: return "NotABoxed";
    case ErrorKind::SubtypeFailure: return "SubtypeFailure";
    case ErrorKind::SubcaptureFailure: return "SubcaptureFailure";
    case ErrorKind::EscapeViolation: return "EscapeViolation";
    case ErrorKind::IllFormedType: return "IllFormedType";
    case ErrorKind::AdaptFailure: return "AdaptFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MNFViolation: return "MNFViolation";
    case ErrorKind::GenerationExhausted: return "GenerationExhausted";
  }
  return "?";
}

// Judgment failure. `rule` names the rule whose premise failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string rule, const std::string& msg)
      : std::runtime_error(msg), kind_(kind), rule_(std::move(rule)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& rule() const { return rule_; }

  // parse/ill-formed input, as opposed to a typing failure
  bool is_input_error() const {
    return kind_ == ErrorKind::ParseError || kind_ == ErrorKind::MNFViolation ||
           kind_ == ErrorKind::IllFormedType;
  }

 private:
  ErrorKind kind_;
  std::string rule_;
};

class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, int line, int col, const std::string& msg)
      : Error(kind, "parse",
              std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line_(line), col_(col) {}
  int line() const { return line_; }
  int column() const { return col_; }

 private:
  int line_, col_;
};

// Deliberately not derived from Error: running out of fuel is not a "no".
class FuelExhausted : public std::runtime_error {
 public:
  explicit FuelExhausted(std::string_view rule)
      : std::runtime_error("fuel exhausted in " + std::string(rule)) {}
};

inline constexpr std::uint64_t kDefaultFuel = 10'000;

class Fuel {
 public:
  explicit Fuel(std::uint64_t budget = kDefaultFuel) : remaining_(budget) {}

  void spend(std::string_view rule) {
    if (remaining_ == 0) throw FuelExhausted(rule);
    --remaining_;
    ++used_;
  }
  std::uint64_t remaining() const { return remaining_; }
  std::uint64_t used() const { return used_; }

 private:
  std::uint64_t remaining_;
  std::uint64_t used_ = 0;
};

[[noreturn]] inline void fail(ErrorKind k, std::string rule, const std::string& msg) {
  throw Error(k, std::move(rule), msg);
}

}  // namespace capcalc
