#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nrsample/cnf.hpp"
#include "nrsample/counting.hpp"

namespace nrsample::cli {

enum ExitCode : int {
  kSuccess = 0,
  kAmbiguityFound = 1,
  kUsageError = 2,
  kExhausted = 3,
  kForbiddenParseError = 4,
};

inline constexpr std::uint64_t kDefaultSeed = 20090311;

enum class Method { Recursive, Rejection };
enum class OutputFormat { Words, Walks, JsonLines };

struct RunConfig {
  std::string grammar_path;
  std::string subcommand;
  std::size_t n = 0;
  std::size_t k = 1;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::string> forbidden_path;
  Method method = Method::Recursive;
  std::optional<std::uint64_t> max_trials;
  OutputFormat format = OutputFormat::Words;
  bool skip_unparseable = false;
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchCell {
  Method method;
  std::size_t n;
  std::size_t k;
  std::size_t reps;
  double trials_mean = 0;
  double arith_ops_mean = 0;
  double wall_ms_mean = 0;
  std::size_t incomplete = 0;  // rejection runs that hit max_trials, or exhausted recursive runs
};

/// Runs `reps` repetitions of collecting k distinct words of length n with
/// one method; repetition r uses seed + r. Repetitions are spread over
/// `threads` workers; the counts do not depend on the thread count.
BenchCell bench_cell(const CnfGrammar& cnf, const CountTable& table, Method method, std::size_t n, std::size_t k,
                     std::size_t reps, std::uint64_t seed, std::optional<std::uint64_t> max_trials,
                     unsigned threads = 1);

inline constexpr const char* kBenchHeader =
    "method,n,k,alpha_tag,reps,trials_mean,arith_ops_mean,wall_ms_mean,incomplete";

std::string bench_csv_row(const BenchCell& cell, const std::string& alpha_tag);

/// "1,2,5" and "1..8" (inclusive) items, comma separated.
std::vector<std::size_t> parse_size_list(const std::string& text);

}  // namespace nrsample::cli
