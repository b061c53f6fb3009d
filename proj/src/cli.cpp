#include "nrsample/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "nrsample/errors.hpp"
#include "nrsample/grammar.hpp"
#include "nrsample/oracle.hpp"
#include "nrsample/sampler.hpp"
#include "nrsample/walk.hpp"

namespace nrsample::cli {

namespace {

// Carries an exit code out of a subcommand after the diagnostic is printed.
struct Exit {
  int code;
};

std::string read_file(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot open '" << path << "'\n";
    throw Exit{kUsageError};
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CnfGrammar load_grammar(const std::string& path, std::ostream& err) {
  const std::string text = read_file(path, err);
  try {
    return normalize_to_cnf(parse_grammar(text));
  } catch (const GrammarError& e) {
    err << path << ":" << e.what() << "\n";
    throw Exit{kUsageError};
  }
}

std::string method_name(Method m) { return m == Method::Recursive ? "recursive" : "rejection"; }

// Distinct forbidden words of length n, in file order. Words of another
// length cannot collide with the output and are skipped with a warning.
std::vector<Word> load_forbidden(const CnfGrammar& cnf, const std::string& path, std::size_t n, bool skip_unparseable,
                                 std::ostream& err) {
  const std::string text = read_file(path, err);
  std::vector<Word> out;
  std::set<Word> seen;
  for (const auto& entry : read_forbidden_lines(text)) {
    const std::string where = path + ":" + std::to_string(entry.line) + ": ";
    try {
      Word w = read_word(cnf, entry.text);
      if (w.size() != n) {
        err << "warning: " << where << "'" << entry.text << "' has length " << w.size() << ", ignored\n";
        continue;
      }
      parse_word(cnf, w);
      if (seen.insert(w).second) out.push_back(std::move(w));
    } catch (const WalkError& e) {
      if (!skip_unparseable) {
        err << "error: " << where << "'" << entry.text << "': " << e.what() << "\n";
        throw Exit{kForbiddenParseError};
      }
      err << "warning: " << where << "'" << entry.text << "': " << e.what() << ", skipped\n";
    }
  }
  return out;
}

nlohmann::json walk_json(const CnfGrammar& cnf, const ParseWalk& walk) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : walk.steps) steps.push_back(render_step(cnf, s));
  return steps;
}

void emit_sample(const CnfGrammar& cnf, OutputFormat format, const Word& word, const ParseWalk& walk,
                 const mpz_class& weight, const mpz_class& remaining, std::ostream& out) {
  switch (format) {
    case OutputFormat::Words:
      out << render_word(cnf, word) << "\n";
      break;
    case OutputFormat::Walks:
      out << render_word(cnf, word) << "\t" << render_walk(cnf, walk) << "\n";
      break;
    case OutputFormat::JsonLines: {
      mpq_class p(weight, remaining);
      p.canonicalize();
      nlohmann::json line;
      line["word"] = render_word(cnf, word);
      line["walk"] = walk_json(cnf, walk);
      line["weight"] = weight.get_str();
      line["probability"] = {{"num", p.get_num().get_str()}, {"den", p.get_den().get_str()}};
      out << line.dump() << "\n";
      break;
    }
  }
}

int cmd_count(const RunConfig& config, bool unit, std::ostream& out, std::ostream& err) {
  const CnfGrammar cnf = load_grammar(config.grammar_path, err);
  const CountTable table = unit ? build_count_table(cnf, config.n, unit_weights(cnf)) : build_count_table(cnf, config.n);
  for (std::size_t m = 0; m <= config.n; ++m) out << m << " " << table.at(cnf.axiom, m).get_str() << "\n";
  return kSuccess;
}

int cmd_enumerate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const CnfGrammar cnf = load_grammar(config.grammar_path, err);
  LanguageSlice slice;
  try {
    slice = enumerate_language(cnf, config.n);
  } catch (const OracleError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  for (std::size_t i = 0; i < slice.words.size(); ++i) {
    if (config.format == OutputFormat::Words) {
      out << render_word(cnf, slice.words[i]) << "\n";
    } else {
      emit_sample(cnf, config.format, slice.words[i], parse_word(cnf, slice.words[i]), slice.weights[i],
                  slice.total_weight(), out);
    }
  }
  return kSuccess;
}

int cmd_check_ambiguity(const RunConfig& config, std::size_t max_n, std::ostream& out, std::ostream& err) {
  const CnfGrammar cnf = load_grammar(config.grammar_path, err);
  if (max_n > kEnumerationLimit) {
    err << "error: --max-n is limited to " << kEnumerationLimit << "\n";
    return kUsageError;
  }
  bool all_equal = true;
  out << "n derivations distinct\n";
  for (const auto& row : check_unambiguous_up_to(cnf, max_n)) {
    out << row.n << " " << row.derivations.get_str() << " " << row.distinct << (row.equal() ? "" : " AMBIGUOUS")
        << "\n";
    all_equal = all_equal && row.equal();
  }
  if (!all_equal) {
    err << "grammar is ambiguous\n";
    return kAmbiguityFound;
  }
  return kSuccess;
}

int cmd_sample(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const CnfGrammar cnf = load_grammar(config.grammar_path, err);
  const CountTable table = build_count_table(cnf, config.n);
  std::vector<Word> forbidden;
  if (config.forbidden_path) {
    forbidden = load_forbidden(cnf, *config.forbidden_path, config.n, config.skip_unparseable, err);
  }

  if (config.method == Method::Recursive) {
    SamplerSession session(cnf, table, config.n, config.seed);
    for (const auto& w : forbidden) session.forbid(w);
    try {
      sample_distinct(session, config.k, [&](const Sample& s) {
        emit_sample(cnf, config.format, s.word, s.walk, s.weight, s.remaining, out);
      });
    } catch (const ExhaustionError& e) {
      out.flush();
      err << "exhausted after " << e.produced() << "\n";
      return kExhausted;
    }
    return kSuccess;
  }

  RandomSource rng(config.seed);
  const std::uint64_t max_trials = config.max_trials.value_or(default_max_trials(config.k));
  RejectionResult result;
  try {
    result = rejection_sample_distinct(cnf, table, config.n, config.k, forbidden, rng, max_trials);
  } catch (const ExhaustionError&) {
    err << "exhausted after 0\n";
    return kExhausted;
  }
  mpz_class remaining = table.at(cnf.axiom, config.n);
  for (const auto& w : forbidden) remaining -= word_weight(cnf, w);
  for (const auto& w : result.words) {
    const mpz_class weight = word_weight(cnf, w);
    const ParseWalk walk = config.format == OutputFormat::Words ? ParseWalk{{}, config.n} : parse_word(cnf, w);
    emit_sample(cnf, config.format, w, walk, weight, remaining, out);
    remaining -= weight;
  }
  if (!result.complete) {
    out.flush();
    err << "exhausted after " << result.words.size() << " (max trials " << max_trials << " reached)\n";
    return kExhausted;
  }
  return kSuccess;
}

struct BenchArgs {
  std::string n_values = "12";
  std::string k_values = "1..8";
  std::string methods = "recursive,rejection";
  std::size_t reps = 100;
  std::string alpha_tag = "-";
  unsigned threads = 1;
};

int cmd_bench(const RunConfig& config, const BenchArgs& bench, std::ostream& out, std::ostream& err) {
  const CnfGrammar cnf = load_grammar(config.grammar_path, err);
  std::vector<std::size_t> ns, ks;
  std::vector<Method> methods;
  try {
    ns = parse_size_list(bench.n_values);
    ks = parse_size_list(bench.k_values);
    std::stringstream list(bench.methods);
    for (std::string item; std::getline(list, item, ',');) {
      if (item == "recursive") {
        methods.push_back(Method::Recursive);
      } else if (item == "rejection") {
        methods.push_back(Method::Rejection);
      } else {
        throw std::invalid_argument("unknown method '" + item + "'");
      }
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  if (ns.empty() || ks.empty() || methods.empty() || bench.reps == 0) {
    err << "error: empty benchmark grid\n";
    return kUsageError;
  }
  const CountTable table = build_count_table(cnf, *std::max_element(ns.begin(), ns.end()));
  out << kBenchHeader << "\n";
  for (Method method : methods) {
    for (std::size_t n : ns) {
      for (std::size_t k : ks) {
        const BenchCell cell =
            bench_cell(cnf, table, method, n, k, bench.reps, config.seed, config.max_trials, bench.threads);
        out << bench_csv_row(cell, bench.alpha_tag) << "\n";
      }
    }
  }
  return kSuccess;
}

struct RepResult {
  double trials = 0;
  double arith = 0;
  double wall_ms = 0;
  bool incomplete = false;
};

RepResult bench_rep(const CnfGrammar& cnf, const CountTable& table, Method method, std::size_t n, std::size_t k,
                    std::uint64_t seed, std::optional<std::uint64_t> max_trials) {
  RepResult r;
  const auto start = std::chrono::steady_clock::now();
  if (method == Method::Recursive) {
    SamplerSession session(cnf, table, n, seed);
    try {
      sample_distinct(session, k, nullptr);
      r.trials = static_cast<double>(k);
    } catch (const ExhaustionError& e) {
      r.trials = static_cast<double>(e.produced());
      r.incomplete = true;
    }
    r.arith = static_cast<double>(session.ops().arithmetic());
  } else {
    RandomSource rng(seed);
    ArithmeticCounter ops;
    try {
      const auto result =
          rejection_sample_distinct(cnf, table, n, k, {}, rng, max_trials.value_or(default_max_trials(k)), &ops);
      r.trials = static_cast<double>(result.trials);
      r.incomplete = !result.complete;
    } catch (const ExhaustionError&) {
      r.incomplete = true;
    }
    r.arith = static_cast<double>(ops.arithmetic());
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string format_double(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << v;
  return s.str();
}

}  // namespace

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  auto number = [&](const std::string& s) -> std::size_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("not a non-negative integer: '" + s + "'");
    }
    return static_cast<std::size_t>(std::stoull(s));
  };
  std::stringstream list(text);
  for (std::string item; std::getline(list, item, ',');) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(number(item));
      continue;
    }
    const std::size_t lo = number(item.substr(0, dots));
    const std::size_t hi = number(item.substr(dots + 2));
    if (lo > hi) throw std::invalid_argument("empty range '" + item + "'");
    for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

BenchCell bench_cell(const CnfGrammar& cnf, const CountTable& table, Method method, std::size_t n, std::size_t k,
                     std::size_t reps, std::uint64_t seed, std::optional<std::uint64_t> max_trials, unsigned threads) {
  std::vector<RepResult> results(reps);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
  auto run_share = [&](unsigned w) {
    for (std::size_t r = w; r < reps; r += workers) {
      results[r] = bench_rep(cnf, table, method, n, k, seed + r, max_trials);
    }
  };
  if (workers == 1) {
    run_share(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_share, w);
  }

  BenchCell cell{method, n, k, reps};
  for (const auto& r : results) {
    cell.trials_mean += r.trials;
    cell.arith_ops_mean += r.arith;
    cell.wall_ms_mean += r.wall_ms;
    cell.incomplete += r.incomplete ? 1 : 0;
  }
  const double count = static_cast<double>(reps);
  cell.trials_mean /= count;
  cell.arith_ops_mean /= count;
  cell.wall_ms_mean /= count;
  return cell;
}

std::string bench_csv_row(const BenchCell& cell, const std::string& alpha_tag) {
  std::ostringstream row;
  row << method_name(cell.method) << "," << cell.n << "," << cell.k << "," << alpha_tag << "," << cell.reps << ","
      << format_double(cell.trials_mean) << "," << format_double(cell.arith_ops_mean) << ","
      << format_double(cell.wall_ms_mean) << "," << cell.incomplete;
  return row.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-redundant random generation of words from weighted context-free grammars", "nrsample"};
  app.require_subcommand(1);

  RunConfig config;
  bool unit = false;
  std::size_t max_n = 8;
  BenchArgs bench;
  std::string method = "recursive";
  std::string format = "words";

  const std::map<std::string, Method> methods{{"recursive", Method::Recursive}, {"rejection", Method::Rejection}};
  const std::map<std::string, OutputFormat> formats{
      {"words", OutputFormat::Words}, {"walks", OutputFormat::Walks}, {"json-lines", OutputFormat::JsonLines}};

  auto add_grammar = [&](CLI::App* sub) {
    sub->add_option("grammar,-g,--grammar", config.grammar_path, "grammar file")->required();
  };

  auto* count = app.add_subcommand("count", "print the axiom weight for every length 0..n");
  add_grammar(count);
  count->add_option("-n,--length", config.n, "largest length")->required();
  count->add_flag("--unit-weights", unit, "count derivations instead of weights");

  auto* sample = app.add_subcommand("sample", "draw k distinct words of length n");
  add_grammar(sample);
  sample->add_option("-n,--length", config.n, "word length")->required();
  sample->add_option("-k,--count", config.k, "number of distinct words");
  sample->add_option("--seed", config.seed, "64-bit seed");
  sample->add_option("--forbid", config.forbidden_path, "file of words to exclude, one per line");
  sample->add_flag("--skip-unparseable", config.skip_unparseable, "warn about foreign forbidden words instead of failing");
  sample->add_option("--method", method, "recursive or rejection")->check(CLI::IsMember({"recursive", "rejection"}));
  sample->add_option("--max-trials", config.max_trials, "draw budget of the rejection method (default 1000k)");
  sample->add_option("--format", format, "words, walks or json-lines")
      ->check(CLI::IsMember({"words", "walks", "json-lines"}));

  auto* enumerate = app.add_subcommand("enumerate", "list every word of length n");
  add_grammar(enumerate);
  enumerate->add_option("-n,--length", config.n, "word length")->required();
  enumerate->add_option("--format", format, "words, walks or json-lines")
      ->check(CLI::IsMember({"words", "walks", "json-lines"}));

  auto* bench_cmd = app.add_subcommand("bench", "compare the recursive and rejection methods over a grid, as CSV");
  add_grammar(bench_cmd);
  bench_cmd->add_option("-n,--n-values", bench.n_values, "lengths, e.g. 12 or 8,10,12");
  bench_cmd->add_option("-k,--k-values", bench.k_values, "sample sizes, e.g. 1..8");
  bench_cmd->add_option("--methods", bench.methods, "comma separated subset of recursive,rejection");
  bench_cmd->add_option("--reps", bench.reps, "repetitions per cell");
  bench_cmd->add_option("--seed", config.seed, "seed of the first repetition");
  bench_cmd->add_option("--alpha-tag", bench.alpha_tag, "label copied into the alpha_tag column");
  bench_cmd->add_option("--max-trials", config.max_trials, "draw budget of the rejection method (default 1000k)");
  bench_cmd->add_option("--threads", bench.threads, "worker threads");

  auto* ambiguity = app.add_subcommand("check-ambiguity", "compare derivation and distinct-word counts up to --max-n");
  add_grammar(ambiguity);
  ambiguity->add_option("--max-n", max_n, "largest length checked");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }
  config.method = methods.at(method);
  config.format = formats.at(format);

  try {
    if (count->parsed()) {
      config.subcommand = "count";
      return cmd_count(config, unit, out, err);
    }
    if (sample->parsed()) {
      config.subcommand = "sample";
      return cmd_sample(config, out, err);
    }
    if (enumerate->parsed()) {
      config.subcommand = "enumerate";
      return cmd_enumerate(config, out, err);
    }
    if (bench_cmd->parsed()) {
      config.subcommand = "bench";
      return cmd_bench(config, bench, out, err);
    }
    config.subcommand = "check-ambiguity";
    return cmd_check_ambiguity(config, max_n, out, err);
  } catch (const Exit& e) {
    return e.code;
  } catch (const WalkError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace nrsample::cli
