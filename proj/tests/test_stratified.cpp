#include <doctest.h>

#include "helpers.hpp"
#include "nullcore/error.hpp"
#include "nullcore/hom.hpp"
#include "nullcore/stratified.hpp"

using namespace nullcore;
using namespace nullcore::testing;

namespace {

Stratification strata(std::vector<std::set<std::size_t>> s, StratificationKind k = StratificationKind::CoreSafe) {
  return Stratification{std::move(s), k};
}

}  // namespace

TEST_CASE("core-safe rules") {
  Program three = data_program("ex3.rls");
  CHECK(rule_core_safe(2, three.rules));
  Program five = data_program("ex5.rls");
  CHECK_FALSE(rule_core_safe(5, five.rules));
  CHECK(rule_core_safe(4, five.rules));
  CHECK(check_prop6(three.rules));
  CHECK_FALSE(check_prop6(five.rules));
}

TEST_CASE("stratification of the extended father program") {
  Program p = data_program("ex5.rls");
  auto s = find_core_safe_stratification(p.rules);
  REQUIRE(s.has_value());
  CHECK(s->strata == std::vector<std::set<std::size_t>>{{0, 1, 2, 3}, {4}, {5}});
  CHECK(is_stratification(p.rules, *s, StratificationKind::CoreSafe));
  auto ids = stratum_ids(p.rules, *s);
  CHECK(ids[0] == std::vector<std::string>{"r1", "r2", "r3", "r4"});
}

TEST_CASE("a program with a single safe stratum") {
  Program p = data_program("ex3.rls");
  auto s = find_core_safe_stratification(p.rules);
  REQUIRE(s.has_value());
  CHECK(s->strata.size() == 1);
}

TEST_CASE("self-defeating negation has no stratification") {
  Program p = program("p(X) :- b(X), ~p(X).");
  CHECK_FALSE(find_core_safe_stratification(p.rules).has_value());
  CHECK_FALSE(find_full_stratification(p.rules).has_value());
}

TEST_CASE("invalid strata are reported") {
  Program p = data_program("ex5.rls");
  CHECK_FALSE(is_stratification(p.rules, strata({{0, 1, 2, 3, 4, 5}}), StratificationKind::CoreSafe));
  CHECK_FALSE(is_stratification(p.rules, strata({{5}, {0, 1, 2, 3}, {4}}), StratificationKind::CoreSafe));
  CHECK_FALSE(is_stratification(p.rules, strata({{0, 1, 2, 3}, {4}}), StratificationKind::CoreSafe));
}

TEST_CASE("merge and split") {
  Program p = data_program("ex5.rls");
  auto s = *find_core_safe_stratification(p.rules);
  CHECK(thrown([&] { merge_strata(p.rules, s, 1); }) == ErrorCode::InvalidTransformation);
  CHECK(thrown([&] { merge_strata(p.rules, s, 2); }) == ErrorCode::InvalidTransformation);
  CHECK(thrown([&] { split_stratum(p.rules, s, 0, {0, 1}, {3}); }) == ErrorCode::InvalidTransformation);

  auto halves = split_stratum(p.rules, s, 0, {0, 1}, {2, 3});
  CHECK(halves.strata.size() == 4);
  CHECK(merge_strata(p.rules, halves, 0) == s);
  CHECK(thrown([&] { split_stratum(p.rules, s, 0, {2, 3}, {0, 1}); }) == ErrorCode::InvalidTransformation);
  Program plain = program("q(X) :- p(X).\nr(X) :- q(X).");
  auto ps = *find_core_safe_stratification(plain.rules);
  REQUIRE(ps.strata.size() == 1);
  auto split = split_stratum(plain.rules, ps, 0, {0}, {1});
  CHECK(split.strata.size() == 2);
  CHECK(merge_strata(plain.rules, split, 0) == ps);
  CHECK(thrown([&] { split_stratum(plain.rules, ps, 0, {1}, {0}); }) == ErrorCode::InvalidTransformation);
}

TEST_CASE("core-safe chase of the extended father program") {
  Program p = data_program("ex5.rls");
  auto s = *find_core_safe_stratification(p.rules);
  auto r = core_safe_chase(p.rules, s, p.facts, {});
  REQUIRE(r.cores.size() == 4);
  CHECK(r.cores[0] == p.facts);
  Interpretation c1 = facts(R"(p("A"). f("A","B"). m("B"). c("B","A"). t("B").)");
  CHECK(is_isomorphic(r.cores[1], c1));
  Interpretation c2 = c1;
  c2.insert(atom(R"(e("B","B"))"));
  CHECK(is_isomorphic(r.cores[2], c2));
  CHECK(r.cores[3] == r.cores[2]);
  CHECK(r.final_model == r.cores[3]);
  REQUIRE(r.summary.size() == 3);
  CHECK(r.summary[1].rules == std::vector<std::string>{"r5"});
  CHECK(r.summary[2].added == 0);

  auto perfect = perfect_core_model(p.rules, s, p.facts, {});
  CHECK(is_isomorphic(perfect, r.final_model));
}

TEST_CASE("core-safe chase with no rules") {
  Interpretation d = facts(R"(a("1","2"). a("1",_:n0).)");
  auto r = core_safe_chase({}, Stratification{}, d, {});
  REQUIRE(r.cores.size() == 1);
  CHECK(r.final_model == d);
}

TEST_CASE("full stratification") {
  // r2 restrains r1 while r1 enables r2.
  Program five = data_program("ex5.rls");
  CHECK_FALSE(find_full_stratification(five.rules).has_value());

  Program two = data_program("ex2.rls");
  auto f = find_full_stratification(two.rules);
  REQUIRE(f.has_value());
  CHECK(f->kind == StratificationKind::Full);
  CHECK(f->strata == std::vector<std::set<std::size_t>>{{0}, {1}});
  CHECK(is_stratification(two.rules, *f, StratificationKind::Full));
  CHECK_FALSE(is_stratification(two.rules, Stratification{{{1}, {0}}, StratificationKind::Full},
                                StratificationKind::Full));

  Program neg = program("q(X) :- p(X).\nr(X) :- q(X), ~s(X).\ns(X) :- p(X).");
  auto g = find_full_stratification(neg.rules);
  REQUIRE(g.has_value());
  CHECK(g->strata == std::vector<std::set<std::size_t>>{{0}, {2}, {1}});
}
