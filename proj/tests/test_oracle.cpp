#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nrsample/counting.hpp"
#include "nrsample/errors.hpp"
#include "nrsample/oracle.hpp"
#include "test_grammars.hpp"

using namespace nrsample;
using namespace nrsample::testing;

namespace {

std::vector<std::string> rendered(const CnfGrammar& cnf, const LanguageSlice& slice) {
  std::vector<std::string> out;
  for (const Word& w : slice.words) out.push_back(render_word(cnf, w));
  return out;
}

}  // namespace

TEST_CASE("small slices") {
  const CnfGrammar motzkin = cnf_of(kMotzkin);
  CHECK(rendered(motzkin, enumerate_language(motzkin, 3)) == std::vector<std::string>{"abc", "acb", "cab", "ccc"});
  const LanguageSlice empty = enumerate_language(motzkin, 0);
  REQUIRE(empty.words.size() == 1);
  CHECK(empty.words[0].empty());
  CHECK(empty.weights[0] == 1);

  const CnfGrammar ab = cnf_of(kAStarBStar);
  CHECK(rendered(ab, enumerate_language(ab, 2)) == std::vector<std::string>{"aa", "ab", "bb"});
}

TEST_CASE("slice weights are word weights") {
  const CnfGrammar cnf = cnf_of(kMotzkinWeighted);
  const LanguageSlice slice = enumerate_language(cnf, 5);
  for (std::size_t i = 0; i < slice.words.size(); ++i) {
    std::size_t cs = 0;
    for (TerminalId t : slice.words[i]) cs += cnf.terminals[t] == "c" ? 1 : 0;
    CHECK(slice.weights[i] == mpz_class(1) << cs);
  }
  CHECK(slice.total_weight() == 132);
}

TEST_CASE("enumeration guard") {
  const CnfGrammar cnf = cnf_of(kMotzkin);
  CHECK_THROWS_AS(enumerate_language(cnf, kEnumerationLimit + 1), OracleError);
  CHECK_THROWS_AS(enumerate_source_language(parse_grammar(kMotzkin), 20), OracleError);
}

TEST_CASE("source enumeration sees epsilon rules directly") {
  const WeightedGrammar g = parse_grammar(kDyck);
  CHECK(source_derives(g, {}));
  const auto four = enumerate_source_language(g, 4);
  CHECK(four.size() == 2);
  CHECK(enumerate_source_language(g, 3).empty());
}

TEST_CASE("slice sums agree with the count table") {
  for (auto text : unambiguous_grammars()) {
    CAPTURE(text);
    const CnfGrammar cnf = cnf_of(text);
    const CountTable table = build_count_table(cnf, 8);
    for (std::size_t n = 0; n <= 8; ++n) CHECK(enumerate_language(cnf, n).total_weight() == table.at(cnf.axiom, n));
  }
}

TEST_CASE("chi-square harness") {
  std::map<std::string, mpq_class> exact;
  std::map<std::string, std::uint64_t> counts;
  for (int i = 0; i < 51; ++i) exact["w" + std::to_string(i)] = mpq_class(1, 51);

  SUBCASE("proportional counts") {
    for (const auto& [w, p] : exact) counts[w] = 100;
    const auto r = empirical_distribution_test(counts, exact);
    CHECK(r.statistic == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
    CHECK(r.degrees_of_freedom == 50);
  }
  SUBCASE("everything on one word") {
    counts["w0"] = 5100;
    CHECK(empirical_distribution_test(counts, exact).p_value < 1e-10);
  }
  SUBCASE("too few samples") {
    counts["w0"] = 100;
    CHECK_THROWS_AS(empirical_distribution_test(counts, exact), OracleError);
  }
  SUBCASE("impossible observation") {
    for (const auto& [w, p] : exact) counts[w] = 100;
    counts["other"] = 1;
    CHECK_THROWS_AS(empirical_distribution_test(counts, exact), OracleError);
  }
}

TEST_CASE("chi-square survival reference values") {
  // Closed forms: dof 2 gives exp(-x/2); dof 1 gives erfc(sqrt(x/2)).
  for (double x : {0.5, 1.0, 3.0, 10.0, 40.0}) {
    CHECK(chi_square_survival(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-10));
    CHECK(chi_square_survival(x, 1) == doctest::Approx(std::erfc(std::sqrt(x / 2))).epsilon(1e-10));
  }
  CHECK(chi_square_survival(0, 5) == 1.0);
}
