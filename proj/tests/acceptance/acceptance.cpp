// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nrsample/cli.hpp"
#include "nrsample/errors.hpp"
#include "nrsample/oracle.hpp"
#include "nrsample/sampler.hpp"
#include "nrsample/walk.hpp"
#include "test_grammars.hpp"

using namespace nrsample;
using namespace nrsample::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      pass = false;
      detail << "[violated: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<mpz_class> axiom_row(const CnfGrammar& cnf, const CountTable& table, std::size_t n) {
  std::vector<mpz_class> out;
  for (std::size_t m = 0; m <= n; ++m) out.push_back(table.at(cnf.axiom, m));
  return out;
}

std::vector<mpz_class> mpz_list(std::initializer_list<long> values) {
  return std::vector<mpz_class>(values.begin(), values.end());
}

ForbiddenTree tree_of(const CnfGrammar& cnf, std::size_t n, const std::vector<Word>& words) {
  ForbiddenTree tree(n);
  for (const Word& w : words) tree.insert(parse_word(cnf, w), word_weight(cnf, w));
  return tree;
}

NonTerminalId source_node(const CnfGrammar& cnf, NonTerminalId source) {
  for (NonTerminalId a = 0; a < cnf.size(); ++a) {
    if (cnf.origin_map[a].kind == Origin::Kind::SourceNonTerminal && cnf.origin_map[a].source == source) return a;
  }
  throw std::logic_error("source non-terminal missing from the normal form");
}

mpq_class ratio(const mpz_class& num, const mpz_class& den) {
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

// 1. Unit counts and enumeration agreement.
void counting_correctness(Outcome& o) {
  const auto start = Clock::now();
  const CnfGrammar motzkin = cnf_of(kMotzkin);
  const auto row = axiom_row(motzkin, build_count_table(motzkin, 6, unit_weights(motzkin)), 6);
  o.require(row == mpz_list({1, 1, 2, 4, 9, 21, 51}), "Motzkin row 1,1,2,4,9,21,51");
  for (auto text : {kMotzkin, kAStarBStar, kDyck}) {
    const CnfGrammar cnf = cnf_of(text);
    const CountTable counts = build_count_table(cnf, 8, unit_weights(cnf));
    for (std::size_t n = 0; n <= 8; ++n) {
      o.require(counts.at(cnf.axiom, n) == enumerate_language(cnf, n).words.size(),
                "count equals distinct words at n=" + std::to_string(n));
    }
  }
  const double elapsed = seconds_since(start);
  o.require(elapsed < 1.0, "under 1 s");
  o.detail << "Motzkin row 1,1,2,4,9,21,51; 3 grammars x n<=8 agree; " << elapsed << " s";
}

// 2. Weighted counts against brute force over {a,b,c}^n.
void weighted_counting(Outcome& o) {
  const WeightedGrammar source = parse_grammar(kMotzkinWeighted);
  const CnfGrammar cnf = normalize_to_cnf(source);
  const auto row = axiom_row(cnf, build_count_table(cnf, 6), 6);
  o.require(row == mpz_list({1, 2, 5, 14, 42, 132, 429}), "row 1,2,5,14,42,132,429");
  TerminalId c = 0;
  find_terminal(cnf, "c", c);
  for (std::size_t n = 0; n <= 6; ++n) {
    mpz_class total = 0;
    for (const Word& w : enumerate_source_language(source, n)) {
      std::size_t cs = 0;
      for (TerminalId t : w) cs += t == c ? 1 : 0;
      total += mpz_class(1) << cs;
    }
    o.require(total == row[n], "brute-force sum of 2^#c at n=" + std::to_string(n));
  }
  o.detail << "row 1,2,5,14,42,132,429 matches brute-force sums";
}

// 3. Exact distribution with the three-word forbidden set.
void distribution_exactness(Outcome& o) {
  const auto start = Clock::now();
  const CnfGrammar cnf = cnf_of(kMotzkinWeighted);
  const CountTable table = build_count_table(cnf, 6);
  const std::vector<Word> forbidden = words_of(cnf, {"caccbc", "abaccb", "abcccc"});
  const ForbiddenTree tree = tree_of(cnf, 6, forbidden);
  const LanguageSlice slice = enumerate_language(cnf, 6);
  mpq_class sum = 0;
  std::size_t words = 0;
  for (std::size_t i = 0; i < slice.words.size(); ++i) {
    if (std::find(forbidden.begin(), forbidden.end(), slice.words[i]) != forbidden.end()) continue;
    const mpq_class p = exact_word_probability(cnf, table, 6, tree, slice.words[i]);
    o.require(p == ratio(slice.weights[i], 393), "p(" + render_word(cnf, slice.words[i]) + ") = pi/393");
    sum += p;
    ++words;
  }
  o.require(words == 48, "48 remaining words");
  o.require(sum == 1, "probabilities sum to 1");
  const double elapsed = seconds_since(start);
  o.require(elapsed < 1.0, "under 1 s");
  o.detail << words << " words, sum = " << sum.get_str() << ", each pi(w)/393; " << elapsed << " s";
}

// 4. Branch probabilities below the state "a b S_4" with four forbidden words.
void branch_probabilities(Outcome& o) {
  const WeightedGrammar source = parse_grammar(kMotzkinWeighted);
  const CnfGrammar cnf = normalize_to_cnf(source);
  const CountTable table = build_count_table(cnf, 6);
  const std::vector<Word> forbidden = words_of(cnf, {"abcacb", "abcccc", "ababab", "abaccb"});
  const ForbiddenTree tree = tree_of(cnf, 6, forbidden);
  const NonTerminalId s = source_node(cnf, source.axiom);
  TerminalId a = 0, b = 0;
  find_terminal(cnf, "a", a);
  find_terminal(cnf, "b", b);

  // Follow the walk of a word with prefix "ab" up to the state a b S_4.
  const std::vector<SizedSymbol> target{{Symbol::terminal(a), 1}, {Symbol::terminal(b), 1}, {Symbol::non_terminal(s), 4}};
  SizedWord state = initial_word_unchecked(cnf, table, 6);
  ForbiddenTree::Cursor at = tree.root();
  for (const WalkStep& step : parse_word(cnf, read_word(cnf, "abcccc")).steps) {
    if (state.symbols() == target) break;
    apply_derivation_in_place(cnf, table, state, step);
    at = tree.child(at, step);
  }
  o.require(state.symbols() == target, "reached a b S_4");
  const mpz_class kappa = state.weight() - tree.weight_at(at);
  o.require(state.weight() == 42 && kappa == 17, "pi(abS4) = 42 and kappa = 17");

  // Explore CNF steps with the sampler's candidate weights until the cursor is
  // the source S again (or the word is mature).
  std::map<std::string, mpq_class> sampler;
  std::function<void(const SizedWord&, ForbiddenTree::Cursor, const mpq_class&)> explore =
      [&](const SizedWord& w, ForbiddenTree::Cursor c, const mpq_class& p) {
        const bool at_source = !w.mature() && w.cursor_symbol().symbol.id == s && w.prefix().size() > 2;
        if (w.mature() || at_source) {
          std::string key = render_word(cnf, Word(w.prefix().begin(), w.prefix().end()));
          key += w.mature() ? "" : " S" + std::to_string(w.cursor_symbol().length);
          sampler[key] += p;
          return;
        }
        const mpz_class budget = w.weight() - tree.weight_at(c);
        for (const Candidate& cand : step_candidates(cnf, table, w, tree, c)) {
          if (cand.adjusted == 0) continue;
          explore(apply_derivation(cnf, table, w, cand.step), tree.child(c, cand.step), p * ratio(cand.adjusted, budget));
        }
      };
  explore(state, at, mpq_class(1));

  // Oracle: group the words "ab" + u by the source-level expansion of S_4 and
  // weigh each group by brute force.
  auto in_m = [&](const std::string& u) { return source_derives(source, read_word(cnf, u.empty() ? "_" : u)); };
  std::map<std::string, mpz_class> groups;
  mpz_class oracle_total = 0;
  for (const Word& w : enumerate_source_language(source, 6)) {
    const std::string text = render_word(cnf, w);
    if (text.rfind("ab", 0) != 0) continue;
    if (std::find(forbidden.begin(), forbidden.end(), w) != forbidden.end()) continue;
    const std::string u = text.substr(2);
    std::string key;
    if (u[0] == 'c' && in_m(u.substr(1))) key = "abc S3";
    else if (u.substr(0, 2) == "ab" && in_m(u.substr(2))) key = "abab S2";
    else if (u[0] == 'a' && u[2] == 'b' && in_m(u.substr(1, 1)) && in_m(u.substr(3))) key = "aba S1";
    else if (u[0] == 'a' && u[3] == 'b' && in_m(u.substr(1, 2))) key = "aba S2";
    else continue;
    groups[key] += word_weight(cnf, w);
    oracle_total += word_weight(cnf, w);
  }
  o.require(oracle_total == 17, "oracle total 17");

  const std::map<std::string, mpq_class> expected{
      {"abc S3", mpq_class(8, 17)}, {"abab S2", mpq_class(4, 17)}, {"aba S1", mpq_class(4, 17)}, {"aba S2", mpq_class(1, 17)}};
  o.require(sampler.size() == 4, "four branches");
  mpq_class sum = 0;
  for (const auto& [key, p] : expected) {
    o.require(sampler.count(key) && sampler[key] == p, "sampler " + key + " = " + p.get_str());
    o.require(groups.count(key) && ratio(groups[key], oracle_total) == p, "oracle " + key + " = " + p.get_str());
    sum += sampler[key];
  }
  o.require(sum == 1, "branches sum to 1");
  for (const auto& [key, p] : sampler) o.detail << key << ": " << p.get_str() << "  ";
  o.detail << "sum " << sum.get_str();
}

// 5. Conservation at every step of fuzzed sampling runs.
void conservation(Outcome& o) {
  std::mt19937_64 gen(31337);
  const auto grammars = unambiguous_grammars();
  std::uint64_t steps = 0, violations = 0, instances = 0;
  while (steps < 100000) {
    const CnfGrammar cnf = cnf_of(grammars[gen() % grammars.size()]);
    const std::size_t n = 1 + gen() % 14;
    const CountTable table = build_count_table(cnf, n);
    if (table.at(cnf.axiom, n) == 0) continue;
    ++instances;
    SamplerSession session(cnf, table, n, gen());
    // Random forbidden set drawn from the language itself.
    try {
      sample_distinct(session, gen() % 12, nullptr);
    } catch (const ExhaustionError&) {
    }
    RandomSource& rng = session.rng();
    const ForbiddenTree& tree = session.tree();
    for (int draw = 0; draw < 8 && session.remaining_weight() > 0; ++draw) {
      SizedWord w = sized_word_initial(cnf, table, n);
      ForbiddenTree::Cursor at = tree.root();
      Sample sample;
      sample.walk.n = n;
      while (!w.mature()) {
        const auto candidates = step_candidates(cnf, table, w, tree, at);
        const mpz_class budget = w.weight() - tree.weight_at(at);
        mpz_class total = 0;
        for (const auto& c : candidates) total += c.adjusted;
        ++steps;
        if (total != budget) ++violations;
        mpz_class r = rng.uniform_below(budget);
        std::size_t j = 0;
        while (r >= candidates[j].adjusted) r -= candidates[j++].adjusted;
        apply_derivation_in_place(cnf, table, w, candidates[j].step);
        at = tree.child(at, candidates[j].step);
        sample.walk.steps.push_back(candidates[j].step);
      }
      session.tree().insert(sample.walk, w.weight());
    }
  }
  o.require(violations == 0, "no violated step");
  o.require(steps >= 100000, "at least 1e5 steps");
  o.detail << steps << " steps over " << instances << " instances, " << violations << " violations";
}

// 6. Permutation of the remaining language, then exhaustion.
void non_redundancy(Outcome& o) {
  std::mt19937_64 gen(4242);
  const auto grammars = unambiguous_grammars();
  std::size_t checked = 0, words_total = 0;
  for (int instance = 0; instance < 100; ++instance) {
    const CnfGrammar cnf = cnf_of(grammars[instance % grammars.size()]);
    const std::size_t n = gen() % 8;
    const CountTable table = build_count_table(cnf, n);
    const LanguageSlice slice = enumerate_language(cnf, n);
    std::vector<Word> forbidden, remaining;
    for (const Word& w : slice.words) (gen() % 3 == 0 ? forbidden : remaining).push_back(w);
    const std::uint64_t seed = gen();

    SamplerSession session(cnf, table, n, seed);
    for (const Word& w : forbidden) session.forbid(w);
    std::vector<Word> out;
    for (const auto& s : sample_distinct(session, remaining.size())) out.push_back(s.word);
    std::sort(out.begin(), out.end());
    std::sort(remaining.begin(), remaining.end());
    o.require(out == remaining, "permutation of L_n \\ F (instance " + std::to_string(instance) + ")");

    SamplerSession again(cnf, table, n, seed);
    for (const Word& w : forbidden) again.forbid(w);
    bool exhausted = false;
    try {
      sample_distinct(again, remaining.size() + 1, nullptr);
    } catch (const ExhaustionError& e) {
      exhausted = e.produced() == remaining.size();
    }
    o.require(exhausted, "k+1 exhausts (instance " + std::to_string(instance) + ")");
    ++checked;
    words_total += remaining.size();
  }
  o.detail << checked << " instances, " << words_total << " words drawn, every k+1 run exhausted";
}

// 7. Chi-square of 1e5 draws against the exact conditional distribution.
void statistical_agreement(Outcome& o) {
  const CnfGrammar cnf = cnf_of(kMotzkinWeighted);
  const CountTable table = build_count_table(cnf, 6);
  const std::uint64_t seed = 20090311;
  SamplerSession session(cnf, table, 6, seed);
  for (const Word& w : words_of(cnf, {"caccbc", "abaccb", "abcccc"})) session.forbid(w);
  std::map<std::string, std::uint64_t> counts;
  for (int i = 0; i < 100000; ++i) ++counts[render_word(cnf, sample_one(session).word)];

  std::map<std::string, mpq_class> exact;
  const LanguageSlice slice = enumerate_language(cnf, 6);
  for (std::size_t i = 0; i < slice.words.size(); ++i) {
    const std::string w = render_word(cnf, slice.words[i]);
    exact[w] = (w == "caccbc" || w == "abaccb" || w == "abcccc") ? mpq_class(0) : ratio(slice.weights[i], 393);
  }
  const ChiSquareResult r = empirical_distribution_test(counts, exact);
  o.require(r.p_value > 0.001, "p-value > 0.001");
  o.detail << "seed " << seed << ", chi2 = " << r.statistic << " on " << r.degrees_of_freedom
           << " dof, p = " << r.p_value;
}

// 8. Mean rejection trials to collect all 51 uniform Motzkin words.
void coupon_formula(Outcome& o) {
  const auto start = Clock::now();
  const CnfGrammar cnf = cnf_of(kMotzkin);
  const CountTable table = build_count_table(cnf, 6);
  const cli::BenchCell cell = cli::bench_cell(cnf, table, cli::Method::Rejection, 6, 51, 1000, 1, std::nullopt, 4);
  double harmonic = 0;
  for (int i = 1; i <= 51; ++i) harmonic += 1.0 / i;
  const double expected = 51 * harmonic;
  const double rel = std::abs(cell.trials_mean - expected) / expected;
  const double elapsed = seconds_since(start);
  o.require(cell.incomplete == 0, "every run completes");
  o.require(rel < 0.05, "within 5% of 51 H_51");
  o.require(elapsed < 30.0, "under 30 s");
  o.detail << "mean " << cell.trials_mean << " vs 51*H51 = " << expected << " (" << 100 * rel << "%), " << elapsed
           << " s";
}

// 9. Rejection blowup on a*b* with alpha = 2 against the recursive cost.
void rejection_blowup(Outcome& o) {
  const auto start = Clock::now();
  const CnfGrammar cnf = cnf_of(kAStarBStarAlpha2);
  const std::size_t n = 12;
  const CountTable table = build_count_table(cnf, n);
  const double nlogn = n * std::log2(static_cast<double>(n));

  // C from k = 1: the largest per-run ratio of operations to n log2 n.
  double c = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    SamplerSession session(cnf, table, n, 1 + rep);
    sample_distinct(session, 1, nullptr);
    c = std::max(c, static_cast<double>(session.ops().arithmetic()) / nlogn);
  }
  o.detail << "C = " << c << "; ";

  double previous_per_k = 0;
  for (std::size_t k = 4; k <= 8; ++k) {
    const auto rejection = cli::bench_cell(cnf, table, cli::Method::Rejection, n, k, 100, 1, std::nullopt, 4);
    const auto recursive = cli::bench_cell(cnf, table, cli::Method::Recursive, n, k, 100, 1, std::nullopt, 4);
    const double floor = std::pow(2.0, static_cast<double>(k)) / 4;
    const double bound = c * k * nlogn;
    o.require(rejection.incomplete == 0, "rejection completes at k=" + std::to_string(k));
    o.require(rejection.trials_mean > floor, "trials > 2^k/4 at k=" + std::to_string(k));
    o.require(rejection.trials_mean / k > previous_per_k, "trials/k increasing at k=" + std::to_string(k));
    o.require(recursive.arith_ops_mean <= bound, "recursive ops <= C k n log n at k=" + std::to_string(k));
    previous_per_k = rejection.trials_mean / k;
    o.detail << "k=" << k << ": trials " << rejection.trials_mean << " (>" << floor << "), ops "
             << recursive.arith_ops_mean << " (<=" << bound << "); ";
  }
  const double elapsed = seconds_since(start);
  o.require(elapsed < 60.0, "under 60 s");
  o.detail << elapsed << " s";
}

// 10. Operation-count trends for generation and precomputation.
void complexity_trend(Outcome& o) {
  const CnfGrammar cnf = cnf_of(kMotzkin);
  const std::vector<std::size_t> lengths{128, 256, 512, 1024, 2048};
  const CountTable table = build_count_table(cnf, lengths.back());
  const int reps = 10;
  std::vector<double> gen_ops, pre_ops;
  for (std::size_t n : lengths) {
    double total = 0, visits = 0;
    for (int rep = 0; rep < reps; ++rep) {
      SamplerSession session(cnf, table, n, 1000 + rep);
      sample_one(session);
      total += static_cast<double>(session.ops().arithmetic());
      visits += static_cast<double>(session.ops().candidate_visits);
    }
    gen_ops.push_back(total / reps);
    ArithmeticCounter pre;
    build_count_table(cnf, n, &pre);
    pre_ops.push_back(static_cast<double>(pre.arithmetic()));
    o.detail << "n=" << n << ": gen " << total / reps << ", visits/(n log2(n+1)) "
             << visits / reps / (n * std::log2(n + 1.0)) << ", pre " << pre.arithmetic() << "; ";
  }
  for (std::size_t i = 1; i < lengths.size(); ++i) {
    const double g = gen_ops[i] / gen_ops[i - 1];
    const double p = pre_ops[i] / pre_ops[i - 1];
    o.require(g <= 2.4, "generation ratio <= 2.4 at n=" + std::to_string(lengths[i]));
    o.require(p >= 3.6 && p <= 4.4, "precomputation ratio near 4 at n=" + std::to_string(lengths[i]));
    o.detail << "x2 -> gen " << g << ", pre " << p << "; ";
  }
}

// 11. Prefix-tree insert cost and size.
void prefix_tree_costs(Outcome& o) {
  const CnfGrammar cnf = cnf_of(kMotzkinWeighted);
  const std::size_t n = 64, k = 1000;
  const CountTable table = build_count_table(cnf, n);
  SamplerSession session(cnf, table, n, 64);
  std::size_t max_len = 0, mismatches = 0, touched = 0;
  sample_distinct(session, k, [&](const Sample& s) {
    max_len = std::max(max_len, s.walk.steps.size());
    touched += s.walk.steps.size() + 1;
    if (session.tree().last_insert_touched() != s.walk.steps.size() + 1) ++mismatches;
  });
  o.require(mismatches == 0, "every insert touches walk length + 1 nodes");
  o.require(session.ops().tree_nodes_touched == touched, "node-touch counter equals the sum of path lengths");
  o.require(session.tree().node_count() <= k * max_len + 1, "node count <= k maxWalkLen + 1");
  o.require(session.tree().check_invariants(), "child-sum invariant");
  o.detail << "nodes " << session.tree().node_count() << " <= " << k * max_len + 1 << ", max walk " << max_len
           << ", touched " << touched;
}

std::string run_binary(const std::string& args) {
  const std::string command = std::string(NRSAMPLE_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return {};
  std::string out;
  char buffer[4096];
  for (std::size_t got; (got = fread(buffer, 1, sizeof buffer, pipe)) > 0;) out.append(buffer, got);
  pclose(pipe);
  return out;
}

// 12. Two runs of the built executable give identical bytes.
void determinism(Outcome& o) {
  const std::string grammar = "/tmp/nrsample_acceptance_motzkin.g";
  const std::string forbid = "/tmp/nrsample_acceptance_forbid.txt";
  { std::ofstream(grammar) << kMotzkinWeighted; }
  { std::ofstream(forbid) << "caccbc\nabaccb\nabcccc\n"; }
  const std::vector<std::string> configs{
      "sample " + grammar + " -n 6 -k 48 --forbid " + forbid + " --seed 1",
      "sample " + grammar + " -n 200 -k 50 --seed 7 --format json-lines",
      "sample " + grammar + " -n 8 -k 30 --seed 3 --method rejection --format walks",
  };
  for (const auto& args : configs) {
    const std::string first = run_binary(args);
    const std::string second = run_binary(args);
    o.require(!first.empty() && first == second, "identical output for: " + args);
    o.detail << first.size() << " bytes; ";
  }
  o.detail << "three configurations identical";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"counting correctness", counting_correctness},
      {"weighted counting", weighted_counting},
      {"distribution exactness", distribution_exactness},
      {"branch probabilities", branch_probabilities},
      {"conservation invariant", conservation},
      {"non-redundancy and completeness", non_redundancy},
      {"statistical agreement", statistical_agreement},
      {"rejection trial formula", coupon_formula},
      {"rejection blowup", rejection_blowup},
      {"complexity trend", complexity_trend},
      {"prefix-tree costs", prefix_tree_costs},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = Clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << " ("
              << seconds_since(start) << " s): " << o.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
