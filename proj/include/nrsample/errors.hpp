#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nrsample {

enum class GrammarErrorKind {
  Syntax,
  UndeclaredSymbol,
  NonPositiveWeight,
  UnproductiveNonTerminal,
  UnreachableNonTerminal,
  CyclicUnitRules,
  EpsilonOnlyLanguage,
};

std::string_view to_string(GrammarErrorKind kind);

/// Raised while reading or normalizing a grammar. Line and column are
/// 1-based and zero when the error has no single source position.
class GrammarError : public std::runtime_error {
 public:
  GrammarError(GrammarErrorKind kind, const std::string& message, std::size_t line = 0,
               std::size_t column = 0);

  GrammarErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  GrammarErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
};

enum class WalkErrorKind {
  IllegalStep,
  TruncatedWalk,
  OverlongWalk,
  NotInLanguage,
  AmbiguityDetected,
  UnknownTerminal,
};

std::string_view to_string(WalkErrorKind kind);

class WalkError : public std::runtime_error {
 public:
  WalkError(WalkErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  WalkErrorKind kind() const noexcept { return kind_; }

 private:
  WalkErrorKind kind_;
};

/// The remaining language at the requested length carries no weight.
/// `produced` counts the words emitted by the call before it ran dry.
class ExhaustionError : public std::runtime_error {
 public:
  ExhaustionError(const std::string& message, std::size_t produced = 0)
      : std::runtime_error(message), produced_(produced) {}
  std::size_t produced() const noexcept { return produced_; }

 private:
  std::size_t produced_;
};

class DuplicateWalkError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A broken internal invariant (a forbidden word reached, a conservation
/// mismatch, a cached weight drifting from its recomputation).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nrsample
