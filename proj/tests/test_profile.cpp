#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"

using namespace votelab;

TEST(Profile, NormalizesDuplicateRankings) {
  const Profile p(3, {{1, {0, 1, 2}}, {2, {1, 0, 2}}, {4, {0, 1, 2}}});
  ASSERT_EQ(p.ballots().size(), 2u);
  EXPECT_EQ(p.num_voters(), 7);
  EXPECT_EQ(p, Profile(3, {{2, {1, 0, 2}}, {5, {0, 1, 2}}}));
}

TEST(Profile, RejectsInvalidInput) {
  EXPECT_THROW(Profile(3, {}), ProfileError);
  EXPECT_THROW(Profile(3, {{1, {0, 0, 1}}}), ProfileError);
  EXPECT_THROW(Profile(3, {{1, {0, 1}}}), ProfileError);
  EXPECT_THROW(Profile(3, {{0, {0, 1, 2}}}), ProfileError);
  EXPECT_THROW(Profile(std::vector<std::string>{"x", "x"}, {{1, {0, 1}}}), ProfileError);
}

TEST(Profile, SingleCandidateIsLegal) {
  const Profile p(1, {{3, {0}}});
  EXPECT_EQ(p.num_candidates(), 1);
  EXPECT_EQ(majority_winner(p), 0);
}

TEST(Tournament, Table2Entries) {
  const TournamentMatrix h(oracle::table2());
  const int rows[4][4] = {{0, 51, 57, 57}, {49, 0, 57, 57}, {43, 43, 0, 100}, {43, 43, 0, 0}};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (a != b) { EXPECT_EQ(h(a, b), rows[a][b]) << a << "," << b; }
    }
  }
}

TEST(Tournament, SingleVoter) {
  const TournamentMatrix h(Profile(2, {{1, {0, 1}}}));
  EXPECT_EQ(h(0, 1), 1);
  EXPECT_EQ(h(1, 0), 0);
}

TEST(Positional, Table2Entries) {
  const PositionalMatrix pm(oracle::table2());
  const int rows[4][4] = {{29, 28, 43, 0}, {28, 29, 0, 43}, {22, 21, 57, 0}, {21, 22, 0, 57}};
  for (int l = 0; l < 4; ++l) {
    for (int a = 0; a < 4; ++a) EXPECT_EQ(pm(l, a), rows[l][a]);
  }
}

TEST(Positional, Table1TopShares) {
  const Profile p = oracle::table1();
  const PositionalMatrix pm(p);
  EXPECT_EQ(pm.top(*p.find("Hillary")), 22);
  EXPECT_EQ(pm.top(*p.find("Donald")), 21);
  EXPECT_EQ(pm.top(*p.find("John")), 18);
  EXPECT_EQ(pm.top(*p.find("Ted")), 19);
  EXPECT_EQ(pm.top(*p.find("Bernie")), 20);
}

TEST(Positional, UnanimousColumnsHaveOneEntry) {
  const Profile p(4, {{7, {2, 0, 3, 1}}});
  const PositionalMatrix pm(p);
  for (Candidate a = 0; a < 4; ++a) {
    int nonzero = 0;
    for (int l = 0; l < 4; ++l) {
      if (pm(l, a) != 0) {
        ++nonzero;
        EXPECT_EQ(pm(l, a), 7);
      }
    }
    EXPECT_EQ(nonzero, 1);
  }
}

TEST(Condorcet, SampleProfiles) {
  EXPECT_EQ(condorcet_winner(oracle::table2()), 0);
  EXPECT_EQ(condorcet_winner(oracle::cycle3()), std::nullopt);
  const Profile t1 = oracle::table1();
  EXPECT_EQ(condorcet_winner(t1), t1.find("John"));
}

TEST(Condorcet, WeakWinners) {
  EXPECT_EQ(weak_condorcet_winners(oracle::table2()), CandidateSet({0}));
  EXPECT_TRUE(weak_condorcet_winners(oracle::cycle3()).empty());
  EXPECT_EQ(weak_condorcet_winners(Profile(2, {{1, {0, 1}}, {1, {1, 0}}})), CandidateSet({0, 1}));
}

TEST(Condorcet, SubsetWinner) {
  // on {b, c, d} of Table 2, b beats c and d
  EXPECT_EQ(condorcet_winner(oracle::table2(), CandidateSet({1, 2, 3})), 1);
  EXPECT_THROW(condorcet_winner(oracle::table2(), CandidateSet()), std::invalid_argument);
}

TEST(Majority, WinnerAndLoser) {
  EXPECT_EQ(majority_winner(oracle::table2()), std::nullopt);
  const Profile t1 = oracle::table1();
  EXPECT_EQ(majority_winner(t1), std::nullopt);
  EXPECT_EQ(majority_loser(t1), t1.find("Hillary"));
  const Profile u(3, {{5, {1, 2, 0}}});
  EXPECT_EQ(majority_winner(u), 1);
  EXPECT_EQ(majority_loser(u), 0);
}

TEST(Restrict, Table1ToThreeCandidates) {
  const Profile t1 = oracle::table1();
  CandidateSet s;
  for (const char* n : {"Bernie", "John", "Ted"}) s.insert(*t1.find(n));
  const Profile r = restrict_profile(t1, s);
  ASSERT_EQ(r.num_candidates(), 3);
  const PositionalMatrix pm(r);
  EXPECT_EQ(pm.top(*r.find("John")), 61);
  EXPECT_EQ(pm.top(*r.find("Ted")), 19);
  EXPECT_EQ(pm.top(*r.find("Bernie")), 20);
}

TEST(Restrict, IdentityAndSingleton) {
  const Profile t2 = oracle::table2();
  EXPECT_EQ(restrict_profile(t2, t2.candidates()), t2);
  const Profile one = restrict_profile(t2, CandidateSet({2}));
  EXPECT_EQ(one.num_candidates(), 1);
  EXPECT_EQ(one.num_voters(), 100);
  ASSERT_EQ(one.ballots().size(), 1u);
  EXPECT_THROW(restrict_profile(t2, CandidateSet()), std::invalid_argument);
}

TEST(TruncatedBorda, KnownValues) {
  const Profile t2 = oracle::table2();
  EXPECT_EQ(truncated_borda(t2, 0, Rational(2)), Rational(86));
  EXPECT_EQ(truncated_borda(t2, 0, Rational(3)), Rational(165));
  EXPECT_EQ(truncated_borda(t2, 2, Rational(1)), Rational(43));
  EXPECT_THROW(truncated_borda(t2, 0, Rational(0)), std::invalid_argument);
}

TEST(TruncatedBorda, LastStepEqualsBorda) {
  for (const Profile& p : oracle::random_profiles(50, 2, 6, 1, 20, 11)) {
    const auto bo = oracle::borda_positional(p);
    for (Candidate a = 0; a < p.num_candidates(); ++a) {
      EXPECT_EQ(truncated_borda(p, a, Rational(p.num_candidates() - 1)), Rational(bo[static_cast<std::size_t>(a)]));
    }
  }
}

TEST(Properties, ComplementAndSums) {
  for (const Profile& p : oracle::random_profiles(100, 1, 6, 1, 25, 12)) {
    const TournamentMatrix h(p);
    const PositionalMatrix pm(p);
    const int m = p.num_candidates();
    for (Candidate a = 0; a < m; ++a) {
      std::int64_t col = 0;
      std::int64_t row = 0;
      for (int l = 0; l < m; ++l) {
        col += pm(l, a);
        row += pm(a, l);
        EXPECT_EQ(pm(l, a), oracle::at_rank(p, l, a));
      }
      EXPECT_EQ(col, p.num_voters());
      EXPECT_EQ(row, p.num_voters());
      for (Candidate b = 0; b < m; ++b) {
        if (a == b) continue;
        EXPECT_EQ(h(a, b) + h(b, a), p.num_voters());
        EXPECT_EQ(h(a, b), oracle::prefer(p, a, b));
      }
    }
    if (auto cw = condorcet_winner(p)) { EXPECT_TRUE(weak_condorcet_winners(p).contains(*cw)); }
  }
}

TEST(Properties, RestrictionKeepsDuels) {
  std::mt19937_64 rng(13);
  for (const Profile& p : oracle::random_profiles(60, 2, 6, 1, 20, 14)) {
    const std::uint64_t bits = std::uniform_int_distribution<std::uint64_t>(1, (1u << p.num_candidates()) - 1)(rng);
    const CandidateSet s(bits);
    const Profile r = restrict_profile(p, s);
    EXPECT_EQ(r.num_voters(), p.num_voters());
    const auto members = s.members();
    const TournamentMatrix h(p);
    const TournamentMatrix hr(r);
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = 0; j < members.size(); ++j) {
        if (i != j) { EXPECT_EQ(hr(static_cast<int>(i), static_cast<int>(j)), h(members[i], members[j])); }
      }
    }
  }
}

TEST(Properties, TruncatedBordaMonotone) {
  for (const Profile& p : oracle::random_profiles(40, 2, 5, 1, 15, 15)) {
    for (Candidate a = 0; a < p.num_candidates(); ++a) {
      Rational prev_b(0);
      Rational prev_ratio(0);
      for (int num = 4; num <= 4 * (p.num_candidates() + 1); ++num) {
        const Rational t(num, 4);
        const Rational b = truncated_borda(p, a, t);
        EXPECT_GE(b, prev_b);
        const Rational ratio = b / t;
        EXPECT_GE(ratio, prev_ratio);
        prev_b = b;
        prev_ratio = ratio;
      }
    }
  }
}

TEST(Properties, NeutralityOfMatrices) {
  std::mt19937_64 rng(16);
  for (const Profile& p : oracle::random_profiles(40, 2, 6, 1, 20, 17)) {
    std::vector<Candidate> perm(static_cast<std::size_t>(p.num_candidates()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const Profile q = p.relabeled(perm);
    const TournamentMatrix h(p);
    const TournamentMatrix hq(q);
    for (Candidate a = 0; a < p.num_candidates(); ++a) {
      for (Candidate b = 0; b < p.num_candidates(); ++b) {
        if (a != b) { EXPECT_EQ(hq(perm[a], perm[b]), h(a, b)); }
      }
    }
    const auto cw = condorcet_winner(p);
    const auto cwq = condorcet_winner(q);
    ASSERT_EQ(cw.has_value(), cwq.has_value());
    if (cw) { EXPECT_EQ(perm[static_cast<std::size_t>(*cw)], *cwq); }
  }
}
