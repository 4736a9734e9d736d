#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "oracles.hpp"

using namespace votelab;

namespace {

Rule R(const char* id) { return Rule::parse(id); }
Exact Q(std::int64_t a, std::int64_t b) { return Exact(Rational(a, b)); }

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

SearchBudget budget(int max_voters, unsigned workers = 0) {
  SearchBudget b;
  b.max_voters = max_voters;
  b.workers = workers;
  return b;
}

/// Support of B inside the witness, recounted from the voters.
std::int64_t support_of(const Profile& p, CandidateSet B) {
  std::int64_t s = 0;
  for (const Ranking& r : oracle::voters(p)) {
    CandidateSet top;
    for (int i = 0; i < B.size(); ++i) top.insert(r[static_cast<std::size_t>(i)]);
    s += top == B ? 1 : 0;
  }
  return s;
}

void expect_genuine(const Rule& rule, const Violation& v, const Exact& q) {
  EXPECT_EQ(support_of(v.witness, v.B), v.support);
  EXPECT_TRUE(exceeds_quota(v.support, v.witness.num_voters(), q));
  EXPECT_EQ(winners(rule, v.witness), v.winners);
  EXPECT_FALSE(v.winners.is_subset_of(v.B));
}

class EnvGuard {
 public:
  explicit EnvGuard(const char* value) { ::setenv(kMaxVotersEnv, value, 1); }
  ~EnvGuard() { ::unsetenv(kMaxVotersEnv); }
};

}  // namespace

// ---------------------------------------------------------------- generators

TEST(Generators, CondorcetKTuple) {
  const Profile c3 = condorcet_k_tuple(3, 3);
  EXPECT_EQ(c3, Profile(std::vector<std::string>{"b1", "b2", "b3"}, oracle::cycle3().ballots()));
  const TournamentMatrix h(c3);
  EXPECT_EQ(h(0, 1), 2);
  EXPECT_EQ(h(0, 2), 1);
  const Profile c2 = condorcet_k_tuple(2, 2);
  EXPECT_EQ(TournamentMatrix(c2)(0, 1), 1);
  EXPECT_EQ(weak_condorcet_winners(c2), CandidateSet({0, 1}));
  const auto bo = oracle::borda_positional(condorcet_k_tuple(4, 4));
  EXPECT_EQ(bo, std::vector<std::int64_t>(4, 6));
  EXPECT_THROW(condorcet_k_tuple(3, 4), std::invalid_argument);
  EXPECT_THROW(condorcet_k_tuple(1, 4), std::invalid_argument);
}

TEST(Generators, KTupleMatrixEntries) {
  for (int k = 2; k <= 6; ++k) {
    const std::int64_t n = 2 * k;
    const TournamentMatrix h(condorcet_k_tuple(k, n));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        // b_i precedes b_j in every shift except those starting strictly between
        const int d = ((j - i) % k + k) % k;
        EXPECT_EQ(h(i, j), n * (k - d) / k);
      }
    }
  }
}

TEST(Generators, WorstCaseSimpsonTie) {
  const Profile p = worst_case_profile(3, 2, Rational(1, 2), 4);
  const Profile expect(std::vector<std::string>{"b1", "b2", "a1"},
                       {{1, {0, 1, 2}}, {1, {1, 0, 2}}, {1, {2, 0, 1}}, {1, {2, 1, 0}}});
  EXPECT_EQ(p, expect);
  EXPECT_EQ(simpson_scores(TournamentMatrix(p)), (std::vector<std::int64_t>{2, 2, 2}));
  EXPECT_FALSE(simpson_winners(p).is_subset_of(CandidateSet({0, 1})));
}

TEST(Generators, WorstCaseDegenerateAndPlurality) {
  const Profile k1 = worst_case_profile(3, 1, Rational(3, 5), 5);
  EXPECT_EQ(PositionalMatrix(k1).top(0), 3);
  EXPECT_EQ(PositionalMatrix(k1).top(1), 2);
  const Profile p = worst_case_profile(5, 3, Rational(2, 3), 9);
  EXPECT_EQ(p.num_voters(), 9);
  EXPECT_EQ(mutual_majority_groups(p, 3).front(), (MutualGroup{CandidateSet({0, 1, 2}), 6}));
  EXPECT_EQ(winners(R("plurality"), p), ChoiceSet({*p.find("a1")}));
}

TEST(Generators, WorstCaseReportsSmallestN) {
  try {
    worst_case_profile(4, 2, Rational(5, 8), 10);
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("smallest valid n is 16"), std::string::npos) << e.what();
  }
}

TEST(Generators, RandomProfileShape) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const Profile p = random_profile(4, 17, rng);
    EXPECT_EQ(p.num_candidates(), 4);
    EXPECT_EQ(p.num_voters(), 17);
  }
}

// ---------------------------------------------------------------- enumeration

TEST(Enumeration, Counts) {
  EXPECT_EQ(all_rankings(4).size(), 24u);
  for (std::int64_t n = 0; n <= 6; ++n) {
    for (std::size_t parts = 1; parts <= 6; ++parts) {
      std::int64_t count = 0;
      std::vector<std::int64_t> prev;
      for_each_composition(n, parts, [&](const std::vector<std::int64_t>& c) {
        std::int64_t sum = 0;
        for (auto x : c) sum += x;
        EXPECT_EQ(sum, n);
        if (!prev.empty()) { EXPECT_GT(prev, c); }
        prev = c;
        ++count;
        return true;
      });
      EXPECT_EQ(count, binomial(n + static_cast<std::int64_t>(parts) - 1, static_cast<std::int64_t>(parts) - 1));
    }
  }
  std::int64_t profiles = 0;
  for_each_profile(3, 4, [&](const Profile& p) {
    EXPECT_EQ(p.num_voters(), 4);
    ++profiles;
    return true;
  });
  EXPECT_EQ(profiles, binomial(4 + 5, 5));
}

// ---------------------------------------------------------------- oracles

TEST(Oracles, SampleProfiles) {
  const Profile c = oracle::cycle3();
  for (Candidate a = 0; a < 3; ++a) {
    EXPECT_EQ(oracle_young_score(c, a), 1);
    EXPECT_EQ(oracle_dodgson_score(c, a), 1);
  }
  const Profile t2 = oracle::table2();
  EXPECT_EQ(oracle_young_score(t2, 0), 0);
  EXPECT_EQ(oracle_dodgson_score(t2, 0), 0);
}

TEST(Oracles, AgreeOnAllSmallProfiles) {
  for (std::int64_t n = 1; n <= 4; ++n) {
    for_each_profile(3, n, [&](const Profile& p) {
      for (Candidate a = 0; a < 3; ++a) {
        EXPECT_EQ(young_score(p, a), oracle_young_score(p, a)) << serialize_profile(p);
        EXPECT_EQ(dodgson_score(p, a), oracle_dodgson_score(p, a)) << serialize_profile(p);
      }
      return true;
    });
  }
}

TEST(Oracles, BudgetExceeded) {
  EXPECT_THROW(oracle_dodgson_score(oracle::table2(), 3, 10), BudgetExceeded);
}

TEST(Oracles, ParallelUniverseIrv) {
  const Profile t1 = oracle::table1();
  EXPECT_EQ(parallel_universe_irv(t1), ChoiceSet({*t1.find("Ted")}));
  const Profile sym(3, {{2, {0, 1, 2}}, {2, {1, 2, 0}}, {2, {2, 0, 1}}});
  EXPECT_EQ(parallel_universe_irv(sym), ChoiceSet({0, 1, 2}));
}

// ---------------------------------------------------------------- searches

TEST(Search, PluralityTightAtTwoThirds) {
  const auto ok = exhaustive_criterion_search(R("plurality"), 3, 2, Q(2, 3), budget(12));
  EXPECT_FALSE(ok.violation.has_value());
  EXPECT_EQ(ok.voters_covered, 12);
  EXPECT_FALSE(ok.partial);
  const auto bad = exhaustive_criterion_search(R("plurality"), 3, 2, Q(3, 5), budget(12));
  ASSERT_TRUE(bad.violation.has_value());
  expect_genuine(R("plurality"), *bad.violation, Q(3, 5));
  EXPECT_EQ(bad.violation->witness.num_voters(), 3);
  EXPECT_EQ(bad.violation->support, 2);
}

TEST(Search, IrvMutualMajority) {
  EXPECT_FALSE(exhaustive_criterion_search(R("irv"), 3, 2, Q(1, 2), budget(12)).violation.has_value());
}

TEST(Search, DeterministicAcrossWorkers) {
  for (const char* id : {"simpson", "borda", "runoff"}) {
    const Exact q = quota_majority(R(id), 2, 3).value() - Exact(Rational(1, 20));
    const auto one = exhaustive_criterion_search(R(id), 3, 2, q, budget(10, 1));
    const auto many = exhaustive_criterion_search(R(id), 3, 2, q, budget(10, 6));
    ASSERT_TRUE(one.violation.has_value()) << id;
    ASSERT_TRUE(many.violation.has_value()) << id;
    EXPECT_EQ(one.violation->witness, many.violation->witness) << id;
    EXPECT_EQ(one.violation->B, many.violation->B) << id;
    expect_genuine(R(id), *one.violation, q);
  }
}

TEST(Search, EmpiricalQuota) {
  const auto plur = empirical_quota(R("plurality"), 3, 2, budget(12));
  EXPECT_EQ(plur.share, Rational(2, 3));
  ASSERT_TRUE(plur.witness.has_value());
  EXPECT_EQ(plur.witness->witness.num_voters(), 3);
  expect_genuine(R("plurality"), *plur.witness, Q(1, 2));
  const auto irv = empirical_quota(R("irv"), 3, 2, budget(12));
  EXPECT_LE(irv.share, Rational(1, 2));
  EXPECT_EQ(irv.voters_covered, 12);
}

TEST(Search, EmpiricalNeverExceedsQuota) {
  for (const char* id : {"plurality", "runoff", "borda", "antiplurality", "simpson", "black", "vetocore"}) {
    for (int k : {1, 2}) {
      const auto e = empirical_quota(R(id), 3, k, budget(8));
      EXPECT_LE(Exact(e.share), quota_majority(R(id), k, 3).hi) << id << " k=" << k;
    }
  }
}

TEST(Search, ProfileCapMarksPartial) {
  SearchBudget b = budget(12);
  b.max_profiles = 50;
  const auto r = exhaustive_criterion_search(R("plurality"), 3, 2, Q(2, 3), b);
  EXPECT_TRUE(r.partial);
  EXPECT_LT(r.voters_covered, 12);
}

TEST(Search, EnvironmentCapsVoters) {
  const EnvGuard guard("4");
  const auto r = exhaustive_criterion_search(R("plurality"), 3, 2, Q(2, 3), budget(12));
  EXPECT_TRUE(r.partial);
  EXPECT_EQ(r.voters_covered, 4);
  const auto e = empirical_quota(R("plurality"), 3, 2, budget(12));
  EXPECT_TRUE(e.partial);
  EXPECT_EQ(e.voters_covered, 4);
}

TEST(Search, SamplingFindsViolationsBeyondRange) {
  SearchBudget b = budget(2);
  b.samples = 2000;
  const Exact q = Q(1, 2);
  const auto r = exhaustive_criterion_search(R("plurality"), 3, 2, q, b);
  ASSERT_TRUE(r.violation.has_value());
  expect_genuine(R("plurality"), *r.violation, q);
  // the same seed gives the same sample regardless of workers
  b.workers = 1;
  const auto again = exhaustive_criterion_search(R("plurality"), 3, 2, q, b);
  ASSERT_TRUE(again.violation.has_value());
  EXPECT_EQ(again.violation->witness, r.violation->witness);
  EXPECT_EQ(again.from_sample, r.from_sample);
}

TEST(Search, RejectsBadArguments) {
  EXPECT_THROW(exhaustive_criterion_search(R("borda"), 3, 3, Q(1, 2), budget(4)), std::invalid_argument);
  EXPECT_THROW(empirical_quota(R("borda"), 3, 0, budget(4)), std::invalid_argument);
}
