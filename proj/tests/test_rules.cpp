#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"

using namespace votelab;

namespace {

Rule R(const char* id) { return Rule::parse(id); }

ChoiceSet named(const Profile& p, std::initializer_list<const char*> names) {
  ChoiceSet s;
  for (const char* n : names) s.insert(*p.find(n));
  return s;
}

/// Instant runoff simulated voter by voter; on a tie for last place every
/// choice of a single candidate to drop is explored and the winners united.
ChoiceSet irv_oracle(const std::vector<Ranking>& vs, std::vector<bool> alive) {
  std::vector<std::int64_t> tops(alive.size(), 0);
  for (const Ranking& r : vs) {
    for (Candidate c : r) {
      if (alive[static_cast<std::size_t>(c)]) {
        ++tops[static_cast<std::size_t>(c)];
        break;
      }
    }
  }
  std::int64_t low = INT64_MAX;
  int left = 0;
  for (std::size_t c = 0; c < alive.size(); ++c) {
    if (alive[c]) {
      low = std::min(low, tops[c]);
      ++left;
    }
  }
  ChoiceSet out;
  for (std::size_t c = 0; c < alive.size(); ++c) {
    if (!alive[c]) continue;
    if (left == 1) return ChoiceSet::single(static_cast<Candidate>(c));
    if (tops[c] != low) continue;
    std::vector<bool> next = alive;
    next[c] = false;
    out = out | irv_oracle(vs, next);
  }
  return out;
}

ChoiceSet irv_oracle(const Profile& p) {
  return irv_oracle(oracle::voters(p), std::vector<bool>(static_cast<std::size_t>(p.num_candidates()), true));
}

std::vector<std::int64_t> simpson_oracle(const Profile& p) {
  std::vector<std::int64_t> out;
  for (Candidate a = 0; a < p.num_candidates(); ++a) {
    std::int64_t best = p.num_voters();
    for (Candidate b = 0; b < p.num_candidates(); ++b) {
      if (a != b) best = std::min(best, oracle::prefer(p, a, b));
    }
    out.push_back(best);
  }
  return out;
}

template <class T>
ChoiceSet argmax(const std::vector<T>& v) {
  ChoiceSet out;
  const T best = *std::max_element(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == best) out.insert(static_cast<Candidate>(i));
  }
  return out;
}

std::vector<Exact> as_exact(std::initializer_list<std::int64_t> xs) {
  std::vector<Exact> out;
  for (auto x : xs) out.emplace_back(x);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- rule ids

TEST(RuleId, ParseAndRoundTrip) {
  for (const Rule& r : named_rules()) EXPECT_EQ(Rule::parse(r.id()), r);
  const Rule s = R("scoring:3,2,1,0");
  ASSERT_TRUE(s.weights.has_value());
  EXPECT_EQ(*s.weights, ScoreVector::borda(4));
  EXPECT_EQ(R("scoring:<3,2,1,0>"), s);
  EXPECT_EQ(s.id(), "scoring:3,2,1,0");
  EXPECT_THROW(R("copeland"), std::invalid_argument);
  EXPECT_THROW(R("scoring:1,2"), std::invalid_argument);
  EXPECT_THROW(R("scoring:1,1,1"), std::invalid_argument);
}

TEST(ScoreVector, Convexity) {
  EXPECT_TRUE(ScoreVector::borda(5).is_convex());
  EXPECT_TRUE(ScoreVector::plurality(2).is_convex());
  // the bottom gap must be positive
  EXPECT_FALSE(ScoreVector::plurality(4).is_convex());
  EXPECT_FALSE(ScoreVector::antiplurality(4).is_convex());
  EXPECT_FALSE(ScoreVector({Rational(3), Rational(1), Rational(0), Rational(0)}).is_convex());
  EXPECT_FALSE(ScoreVector({Rational(2), Rational(2), Rational(1)}).is_convex());
}

// ---------------------------------------------------------------- Table 1

TEST(Table1, RunoffFamily) {
  const Profile p = oracle::table1();
  EXPECT_EQ(winners(R("plurality"), p), named(p, {"Hillary"}));
  EXPECT_EQ(plurality_runoff_winners(p), named(p, {"Donald"}));
  const Candidate donald = *p.find("Donald");
  const Candidate hillary = *p.find("Hillary");
  EXPECT_EQ(TournamentMatrix(p)(donald, hillary), oracle::prefer(p, donald, hillary));
  EXPECT_GT(2 * oracle::prefer(p, donald, hillary), p.num_voters());
  const InstantRunoffResult irv = instant_runoff(p);
  EXPECT_EQ(irv.winners, named(p, {"Ted"}));
  ASSERT_EQ(irv.eliminated.size(), 4u);
  const char* order[] = {"John", "Bernie", "Donald", "Hillary"};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(irv.eliminated[i], named(p, {order[i]}));
  EXPECT_EQ(parallel_universe_irv(p), named(p, {"Ted"}));
}

TEST(Table1, CondorcetFamilyPicksJohn) {
  const Profile p = oracle::table1();
  for (const char* id : {"borda", "simpson", "young", "dodgson", "clr", "black", "convexmedian", "t12rule"}) {
    EXPECT_EQ(winners(R(id), p), named(p, {"John"})) << id;
  }
}

// ---------------------------------------------------------------- Table 2

TEST(Table2, Winners) {
  const Profile p = oracle::table2();
  for (const char* id : {"simpson", "young", "dodgson", "clr", "black"}) {
    EXPECT_EQ(winners(R(id), p), ChoiceSet({0})) << id;
  }
  for (const char* id : {"plurality", "borda", "antiplurality", "convexmedian", "t12rule"}) {
    EXPECT_EQ(winners(R(id), p), ChoiceSet({2})) << id;
  }
  EXPECT_EQ(winners(R("vetocore"), p), ChoiceSet({0, 1}));
  EXPECT_EQ(winners(R("vetocore"), p), oracle::veto_core(p));
}

TEST(Table2, Scores) {
  const Profile p = oracle::table2();
  EXPECT_EQ(evaluate(R("borda"), p).report.scores, as_exact({165, 163, 186, 86}));
  EXPECT_EQ(evaluate(R("antiplurality"), p).report.scores, as_exact({79, 78, 100, 43}));
  EXPECT_EQ(evaluate(R("simpson"), p).report.scores, as_exact({51, 49, 43, 0}));
  const PositionalMatrix pm(p);
  EXPECT_EQ(convex_median_score(pm, 0), Rational(72, 29));
  EXPECT_EQ(convex_median_score(pm, 1), Rational(71, 28));
  EXPECT_EQ(convex_median_score(pm, 2), Rational(57, 25));
  EXPECT_EQ(convex_median_score(pm, 3), Rational(107, 25));
  EXPECT_EQ(young_score(p, 0), 0);
  EXPECT_EQ(dodgson_score(p, 0), 0);
  EXPECT_EQ(clr_scores(TournamentMatrix(p))[0], Rational(0));
}

TEST(Table2, BordaDualForms) {
  const Profile p = oracle::table2();
  const auto via_h = borda_from_tournament(TournamentMatrix(p));
  EXPECT_EQ(via_h, (std::vector<std::int64_t>{165, 163, 186, 86}));
  EXPECT_EQ(via_h, oracle::borda_positional(p));
}

// ---------------------------------------------------------------- small examples

TEST(SmallProfiles, RunoffAndIrv) {
  const Profile p(3, {{2, {0, 1, 2}}, {2, {1, 0, 2}}, {1, {2, 0, 1}}});
  EXPECT_EQ(plurality_runoff_winners(p), ChoiceSet({0}));
  EXPECT_EQ(instant_runoff_winners(p), ChoiceSet({0}));
}

TEST(SmallProfiles, Cycle) {
  const Profile p = oracle::cycle3();
  const ChoiceSet all({0, 1, 2});
  for (const Rule& r : named_rules()) EXPECT_EQ(winners(r, p), all) << r.id();
  for (Candidate a = 0; a < 3; ++a) {
    EXPECT_EQ(young_score(p, a), 1);
    EXPECT_EQ(dodgson_score(p, a), 1);
    EXPECT_EQ(clr_scores(TournamentMatrix(p))[static_cast<std::size_t>(a)], Rational(1, 2));
  }
  EXPECT_EQ(simpson_scores(TournamentMatrix(p)), (std::vector<std::int64_t>{1, 1, 1}));
}

TEST(SmallProfiles, TradeoffScores) {
  const Profile p(3, {{2, {0, 1, 2}}, {2, {1, 2, 0}}});
  const PositionalMatrix pm(p);
  EXPECT_EQ(tradeoff_score(pm, 0), Exact(1));
  EXPECT_EQ(tradeoff_score(pm, 1), Exact(1));
  EXPECT_EQ(tradeoff_score(pm, 2), Exact(Rational(9, 8), Rational(1, 8), 129));
  // a and b tie at 1 but b dominates a: B_1 equal, B_2 6 > 4
  EXPECT_EQ(second_order_dominance(p), (std::vector<std::pair<Candidate, Candidate>>{{0, 2}, {1, 0}, {1, 2}}));
  EXPECT_EQ(tradeoff_rule_winners(p), ChoiceSet({1}));
}

TEST(SmallProfiles, VetoCoreSingleVoter) {
  const Profile p(4, {{1, {2, 0, 3, 1}}});
  EXPECT_EQ(proportional_veto_core(p), ChoiceSet({2}));
}

TEST(SmallProfiles, SingleCandidate) {
  const Profile p(1, {{4, {0}}});
  for (const Rule& r : named_rules()) EXPECT_EQ(winners(r, p), ChoiceSet({0})) << r.id();
}

TEST(SmallProfiles, ScoringLengthMismatch) {
  EXPECT_THROW(winners(R("scoring:2,1,0"), oracle::table2()), std::invalid_argument);
}

// ---------------------------------------------------------------- properties

TEST(Properties, EveryRuleReturnsNonemptySubset) {
  for (const Profile& p : oracle::random_profiles(150, 2, 5, 1, 15, 21)) {
    for (const Rule& r : named_rules()) {
      const ChoiceSet w = winners(r, p);
      EXPECT_FALSE(w.empty()) << r.id();
      EXPECT_TRUE(w.is_subset_of(p.candidates())) << r.id();
    }
  }
}

TEST(Properties, Neutrality) {
  std::mt19937_64 rng(22);
  for (const Profile& p : oracle::random_profiles(80, 2, 5, 1, 12, 23)) {
    std::vector<Candidate> perm(static_cast<std::size_t>(p.num_candidates()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const Profile q = p.relabeled(perm);
    for (const Rule& r : named_rules()) {
      ChoiceSet mapped;
      for (Candidate c : winners(r, p).members()) mapped.insert(perm[static_cast<std::size_t>(c)]);
      EXPECT_EQ(winners(r, q), mapped) << r.id();
    }
  }
}

TEST(Properties, Anonymity) {
  std::mt19937_64 rng(24);
  for (const Profile& p : oracle::random_profiles(60, 2, 5, 1, 12, 25)) {
    // one ballot per voter, in shuffled order
    std::vector<Ballot> single;
    for (const Ranking& r : oracle::voters(p)) single.push_back({1, r});
    std::shuffle(single.begin(), single.end(), rng);
    const Profile q(p.names(), single);
    for (const Rule& r : named_rules()) EXPECT_EQ(winners(r, q), winners(r, p)) << r.id();
  }
}

TEST(Properties, TwoCandidatesAllRulesAgree) {
  for (int n = 1; n <= 9; ++n) {
    for (int x = 0; x <= n; ++x) {
      std::vector<Ballot> bs;
      if (x > 0) bs.push_back({x, {0, 1}});
      if (n - x > 0) bs.push_back({n - x, {1, 0}});
      const Profile p(2, bs);
      const ChoiceSet expect = 2 * x > n ? ChoiceSet({0}) : 2 * x < n ? ChoiceSet({1}) : ChoiceSet({0, 1});
      for (const Rule& r : named_rules()) EXPECT_EQ(winners(r, p), expect) << r.id() << " n=" << n << " x=" << x;
    }
  }
}

TEST(Properties, CondorcetWinnerConsistency) {
  int seen = 0;
  for (const Profile& p : oracle::random_profiles(300, 3, 5, 1, 15, 26)) {
    const auto cw = condorcet_winner(p);
    if (!cw) continue;
    ++seen;
    const ChoiceSet only = ChoiceSet::single(*cw);
    for (const char* id : {"simpson", "young", "dodgson", "clr", "black"}) EXPECT_EQ(winners(R(id), p), only) << id;
    EXPECT_EQ(young_score(p, *cw), 0);
    EXPECT_EQ(dodgson_score(p, *cw), 0);
  }
  EXPECT_GT(seen, 50);
}

TEST(Properties, MajorityWinnerWinsEverywhere) {
  int seen = 0;
  for (const Profile& p : oracle::random_profiles(400, 3, 5, 1, 9, 27)) {
    const auto mw = majority_winner(p);
    if (!mw) continue;
    ++seen;
    const ChoiceSet only = ChoiceSet::single(*mw);
    for (const char* id : {"plurality", "runoff", "irv", "simpson", "young", "dodgson", "clr", "black",
                           "convexmedian", "t12rule"}) {
      EXPECT_EQ(winners(R(id), p), only) << id;
    }
  }
  EXPECT_GT(seen, 30);
}

TEST(Properties, IrvMatchesVoterSimulation) {
  for (const Profile& p : oracle::random_profiles(300, 2, 6, 1, 20, 28)) {
    EXPECT_EQ(instant_runoff_winners(p), irv_oracle(p));
    EXPECT_EQ(parallel_universe_irv(p), instant_runoff_winners(p));
  }
}

TEST(Properties, ParallelUniverseOnSymmetricCycle) {
  const Profile p(3, {{2, {0, 1, 2}}, {2, {1, 2, 0}}, {2, {2, 0, 1}}});
  EXPECT_EQ(parallel_universe_irv(p), ChoiceSet({0, 1, 2}));
}

TEST(Properties, IrvSatisfiesMutualMajority) {
  for (const Profile& p : oracle::random_profiles(300, 3, 5, 1, 15, 29)) {
    const ChoiceSet w = instant_runoff_winners(p);
    for (int k = 1; k < p.num_candidates(); ++k) {
      for (const MutualGroup& g : mutual_majority_groups(p, k)) {
        if (2 * g.support > p.num_voters()) { EXPECT_TRUE(w.is_subset_of(g.B)); }
      }
    }
  }
}

TEST(Properties, ScoresMatchVoterTallies) {
  for (const Profile& p : oracle::random_profiles(200, 2, 6, 1, 20, 30)) {
    const int m = p.num_candidates();
    const auto bo = oracle::borda_positional(p);
    EXPECT_EQ(borda_from_tournament(TournamentMatrix(p)), bo);
    EXPECT_EQ(winners(R("borda"), p), argmax(bo));
    std::vector<std::int64_t> top(static_cast<std::size_t>(m), 0);
    std::vector<std::int64_t> not_last(static_cast<std::size_t>(m), 0);
    for (const Ranking& r : oracle::voters(p)) {
      ++top[static_cast<std::size_t>(r.front())];
      for (int i = 0; i + 1 < m; ++i) ++not_last[static_cast<std::size_t>(r[static_cast<std::size_t>(i)])];
    }
    EXPECT_EQ(winners(R("plurality"), p), argmax(top));
    EXPECT_EQ(winners(R("antiplurality"), p), argmax(not_last));
    EXPECT_EQ(simpson_scores(TournamentMatrix(p)), simpson_oracle(p));
    EXPECT_EQ(winners(R("simpson"), p), argmax(simpson_oracle(p)));
  }
}

TEST(Properties, ClrMatchesDefinition) {
  for (const Profile& p : oracle::random_profiles(200, 2, 6, 1, 20, 31)) {
    const auto got = clr_scores(TournamentMatrix(p));
    for (Candidate a = 0; a < p.num_candidates(); ++a) {
      Rational s(0);
      for (Candidate c = 0; c < p.num_candidates(); ++c) {
        if (c == a) continue;
        const Rational gap = Rational(p.num_voters(), 2) - Rational(oracle::prefer(p, a, c));
        if (gap.sign() > 0) s += gap;
      }
      EXPECT_EQ(got[static_cast<std::size_t>(a)], s);
    }
  }
}

TEST(Properties, YoungAndDodgsonMatchOracles) {
  for (const Profile& p : oracle::random_profiles(120, 3, 4, 1, 8, 32)) {
    for (Candidate a = 0; a < p.num_candidates(); ++a) {
      EXPECT_EQ(young_score(p, a), oracle_young_score(p, a));
      EXPECT_EQ(dodgson_score(p, a), oracle_dodgson_score(p, a));
    }
  }
}

TEST(Properties, VetoCoreMatchesCoalitionEnumeration) {
  for (const Profile& p : oracle::random_profiles(150, 2, 5, 1, 10, 33)) {
    EXPECT_EQ(proportional_veto_core(p), oracle::veto_core(p));
  }
}

TEST(Properties, ConvexMedianMatchesNumericScan) {
  for (const Profile& p : oracle::random_profiles(120, 2, 5, 1, 15, 34)) {
    const PositionalMatrix pm(p);
    for (Candidate a = 0; a < p.num_candidates(); ++a) {
      const auto s = convex_median_score(pm, a);
      if (2 * pm.top(a) > p.num_voters()) {
        EXPECT_FALSE(s.has_value());
        continue;
      }
      ASSERT_TRUE(s.has_value());
      EXPECT_NEAR(s->to_double(), oracle::convex_median(p, a), 1e-6);
    }
  }
}

TEST(Properties, TradeoffMatchesNumericScan) {
  for (const Profile& p : oracle::random_profiles(120, 2, 5, 1, 15, 35)) {
    const PositionalMatrix pm(p);
    for (Candidate a = 0; a < p.num_candidates(); ++a) {
      const auto s = tradeoff_score(pm, a);
      if (2 * pm.top(a) > p.num_voters()) {
        EXPECT_FALSE(s.has_value());
        continue;
      }
      ASSERT_TRUE(s.has_value());
      EXPECT_NEAR(s->to_double(), oracle::tradeoff_score(p, a), 1e-6);
    }
  }
}

TEST(Properties, BlackIsCondorcetElseBorda) {
  for (const Profile& p : oracle::random_profiles(200, 3, 5, 1, 15, 36)) {
    const auto cw = condorcet_winner(p);
    EXPECT_EQ(black_winners(p), cw ? ChoiceSet::single(*cw) : argmax(oracle::borda_positional(p)));
  }
}
