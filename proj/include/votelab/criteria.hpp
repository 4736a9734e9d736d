#pragma once

// Majority and veto criteria on concrete profiles, closed-form tight quotas,
// and second-order positional dominance.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "votelab/exact.hpp"
#include "votelab/profile.hpp"
#include "votelab/rules.hpp"

namespace votelab {

/// A minimal quota: an exact number, or an interval when only bounds are known.
struct Quota {
  Exact lo;
  Exact hi;
  bool attainable = true;  // false when the value is only a sufficient bound
  bool interval = false;

  static Quota exact(Exact v) { return Quota{v, v, true, false}; }
  static Quota bounds(Exact lo, Exact hi) { return Quota{lo, hi, false, true}; }

  const Exact& value() const {
    if (interval) throw std::logic_error("quota is an interval");
    return lo;
  }
  std::string str() const { return interval ? "[" + lo.str() + ", " + hi.str() + "]" : lo.str(); }
  std::string decimal(int places = 3) const {
    return interval ? "[" + lo.decimal(places) + ", " + hi.decimal(places) + "]" : lo.decimal(places);
  }

  friend bool operator==(const Quota&, const Quota&) = default;
};

/// A k-set B backed by more than q*n voters while the winners escape B.
struct Violation {
  CandidateSet B;
  std::int64_t support = 0;
  ChoiceSet winners;
  Profile witness;
};

// ---------------------------------------------------------------- profile checks

struct MutualGroup {
  CandidateSet B;
  std::int64_t support = 0;

  friend bool operator==(const MutualGroup&, const MutualGroup&) = default;
};

/// For every k-set, the number of voters whose top k candidates are exactly it.
/// Only sets with positive support are listed, ordered lexicographically.
inline std::vector<MutualGroup> mutual_majority_groups(const Profile& p, int k) {
  if (k < 1 || k >= p.num_candidates()) {
    throw std::invalid_argument("k must satisfy 1 <= k < m");
  }
  std::map<std::vector<Candidate>, std::int64_t> tally;
  for (const Ballot& b : p.ballots()) {
    CandidateSet top;
    for (int i = 0; i < k; ++i) top.insert(b.ranking[static_cast<std::size_t>(i)]);
    tally[top.members()] += b.count;
  }
  std::vector<MutualGroup> out;
  for (const auto& [members, support] : tally) {
    CandidateSet s;
    for (Candidate c : members) s.insert(c);
    out.push_back({s, support});
  }
  return out;
}

/// support > q*n, exactly.
inline bool exceeds_quota(std::int64_t support, std::int64_t n, const Exact& q) {
  return Exact(Rational(support, n)) > q;
}

namespace detail {
inline void require_quota(const Exact& q) {
  if (q.sign() <= 0 || q > Exact(1)) throw std::invalid_argument("quota must satisfy 0 < q <= 1");
}
}  // namespace detail

/// nullopt when every k-set backed by more than q*n voters contains all
/// winners; otherwise the first offending set in lexicographic order.
inline std::optional<Violation> check_qk_majority(const Rule& rule, const Profile& p, const Exact& q, int k) {
  detail::require_quota(q);
  const auto groups = mutual_majority_groups(p, k);
  std::optional<ChoiceSet> won;
  for (const MutualGroup& g : groups) {
    if (!exceeds_quota(g.support, p.num_voters(), q)) continue;
    if (!won) won = winners(rule, p);
    if (!won->is_subset_of(g.B)) return Violation{g.B, g.support, *won, p};
  }
  return std::nullopt;
}

/// Veto form: an l-set bottom-ranked by more than q*n voters must not meet the
/// winners. The reported B is the complementary (m-l)-set, so results line up
/// with check_qk_majority at k = m - l.
inline std::optional<Violation> check_ql_veto(const Rule& rule, const Profile& p, const Exact& q, int l) {
  detail::require_quota(q);
  const int m = p.num_candidates();
  if (l < 1 || l >= m) throw std::invalid_argument("l must satisfy 1 <= l < m");
  std::map<std::vector<Candidate>, std::int64_t> tally;
  for (const Ballot& b : p.ballots()) {
    CandidateSet bottom;
    for (int i = m - l; i < m; ++i) bottom.insert(b.ranking[static_cast<std::size_t>(i)]);
    tally[p.candidates().minus(bottom).members()] += b.count;
  }
  std::optional<ChoiceSet> won;
  for (const auto& [members, support] : tally) {
    if (!exceeds_quota(support, p.num_voters(), q)) continue;
    CandidateSet keep;
    for (Candidate c : members) keep.insert(c);
    const CandidateSet vetoed = p.candidates().minus(keep);
    if (!won) won = winners(rule, p);
    if (won->intersects(vetoed)) return Violation{keep, support, *won, p};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- closed forms

namespace detail {

inline Quota qr(std::int64_t num, std::int64_t den) { return Quota::exact(Exact(Rational(num, den))); }

inline Quota clr_quota(int k) {
  const std::int64_t kk = k;
  if (k % 2 == 0) return qr(5 * kk - 2, 8 * kk);
  return qr(5 * kk * kk - 2 * kk + 1, 8 * kk * kk);
}

/// Root in (1/2, (3k-1)/(4k)) of
/// 4k(m-k-1) q^2 + (5k^2+5k-2mk-m^2+m) q + m(m-1-2k) = 0.
inline Exact convex_median_root(std::int64_t k, std::int64_t m) {
  const std::int64_t A = 4 * k * (m - k - 1);
  const std::int64_t B = 5 * k * k + 5 * k - 2 * m * k - m * m + m;
  const std::int64_t C = m * (m - 1 - 2 * k);
  const std::int64_t disc = B * B - 4 * A * C;
  const Exact lo(Rational(1, 2));
  const Exact hi(Rational(3 * k - 1, 4 * k));
  for (int sgn : {1, -1}) {
    const Exact root(Rational(-B, 2 * A), Rational(sgn, 2 * A), disc);
    if (root > lo && root < hi) return root;
  }
  throw std::logic_error("convex median quota: no root in range");
}

inline Quota convex_median_quota(int k, int m) {
  if (k == 1 || m == k + 1) return qr(1, 2);
  if (m > 2 * k) return qr(3 * k - 1, 4 * k);
  return Quota::exact(convex_median_root(k, m));
}

inline void require_km(int k, int m) {
  if (k < 1 || m < 2 || k >= m) throw std::invalid_argument("need 1 <= k < m");
}

}  // namespace detail

/// Quota from the scoring-rule inequality; tight for every monotonic vector.
inline Quota scoring_quota(const ScoreVector& s, int k) {
  const int m = s.size();
  detail::require_km(k, m);
  Rational top_avg(0);
  Rational bottom_avg(0);
  for (int i = 0; i < k; ++i) {
    top_avg += s[i];
    bottom_avg += s[m - 1 - i];
  }
  top_avg /= Rational(k);
  bottom_avg /= Rational(k);
  const Rational num = s[0] - bottom_avg;
  const Rational den = num + top_avg - s[k];
  return Quota::exact(Exact(num / den));
}

/// Majority-loser condition for a scoring rule:
/// s_1 - (s_2+...+s_m)/(m-1) <= (s_1+...+s_{m-1})/(m-1) - s_m.
inline bool scoring_majority_loser_ok(const ScoreVector& s) {
  const int m = s.size();
  Rational tail(0);
  Rational head(0);
  for (int i = 1; i < m; ++i) tail += s[i];
  for (int i = 0; i < m - 1; ++i) head += s[i];
  const Rational mm(m - 1);
  return s[0] - tail / mm <= head / mm - s[m - 1];
}

/// 2k/(3k+1): below it no 2-PD rule meets the (q,k)-majority criterion.
inline Quota tradeoff_threshold(int k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  return detail::qr(2 * static_cast<std::int64_t>(k), 3 * static_cast<std::int64_t>(k) + 1);
}

/// Minimal q with the (q,k,m)-majority criterion satisfied by `rule`.
inline Quota quota_majority(const Rule& rule, int k, int m) {
  using detail::qr;
  detail::require_km(k, m);
  const std::int64_t K = k;
  const std::int64_t M = m;
  switch (rule.kind) {
    case RuleKind::irv: return qr(1, 2);
    case RuleKind::plurality: return qr(K, K + 1);
    case RuleKind::simpson:
    case RuleKind::young: return k == 1 ? qr(1, 2) : qr(K - 1, K);
    case RuleKind::clr: return detail::clr_quota(k);
    case RuleKind::runoff: return (k == 1 || k == m - 1) ? qr(1, 2) : qr(K, K + 2);
    case RuleKind::black: return k == 1 ? qr(1, 2) : qr(2 * M - K - 1, 2 * M);
    case RuleKind::borda: return qr(2 * M - K - 1, 2 * M);
    case RuleKind::antiplurality: return k == m - 1 ? qr(1, M) : qr(1, 1);
    case RuleKind::vetocore: return qr(M - K, M);
    case RuleKind::convexmedian: return detail::convex_median_quota(k, m);
    case RuleKind::dodgson: {
      const Quota lo = detail::clr_quota(k);
      return Quota::bounds(lo.lo, Exact(Rational(K, K + 1)));
    }
    case RuleKind::t12rule: {
      const Quota t = tradeoff_threshold(k);
      if (k == 1 || m > 2 * k) return t;
      return Quota::bounds(Exact(Rational(1, 2)), t.lo);
    }
    case RuleKind::scoring:
      if (rule.weights->size() != m) throw std::invalid_argument("score vector length differs from m");
      return scoring_quota(*rule.weights, k);
  }
  throw std::logic_error("unhandled rule kind");
}

/// Supremum of quota_majority(rule, k, m) over m > k.
inline Quota quota_majority_sup(const Rule& rule, int k) {
  using detail::qr;
  if (k < 1) throw std::invalid_argument("k must be positive");
  const std::int64_t K = k;
  switch (rule.kind) {
    case RuleKind::irv: return qr(1, 2);
    case RuleKind::plurality: return qr(K, K + 1);
    case RuleKind::simpson:
    case RuleKind::young: return k == 1 ? qr(1, 2) : qr(K - 1, K);
    case RuleKind::clr: return detail::clr_quota(k);
    case RuleKind::runoff: return k == 1 ? qr(1, 2) : qr(K, K + 2);
    case RuleKind::black: return k == 1 ? qr(1, 2) : qr(1, 1);
    case RuleKind::borda:
    case RuleKind::vetocore:
    case RuleKind::antiplurality: return qr(1, 1);
    case RuleKind::convexmedian: return qr(3 * K - 1, 4 * K);
    case RuleKind::dodgson: return quota_majority(rule, k, k + 1);
    case RuleKind::t12rule: return tradeoff_threshold(k);
    case RuleKind::scoring: throw std::invalid_argument("a scoring vector fixes m; use quota_majority");
  }
  throw std::logic_error("unhandled rule kind");
}

/// Minimal q with the (q, m-l, m)-majority criterion satisfied.
inline Quota quota_veto(const Rule& rule, int l, int m) { return quota_majority(rule, m - l, m); }

/// Supremum over m of quota_veto(rule, l, m), for m >= 3 (and m >= 2l when
/// half_restricted).
inline Quota quota_veto_sup(const Rule& rule, int l, bool half_restricted) {
  using detail::qr;
  if (l < 1) throw std::invalid_argument("l must be positive");
  const std::int64_t L = l;
  switch (rule.kind) {
    case RuleKind::irv: return qr(1, 2);
    case RuleKind::clr: return qr(5, 8);
    case RuleKind::convexmedian: {
      if (l == 1) return qr(1, 2);
      // m >= 2l: the quadratic root, largest at m = 2l
      const Exact root = detail::convex_median_root(L, 2 * L);
      if (half_restricted) return Quota::exact(root);
      // m < 2l: (3k-1)/(4k) with k = m - l, largest at m = 2l - 1
      const Exact below(Rational(3 * L - 4, 4 * L - 4));
      return Quota::exact(std::max(root, below));
    }
    case RuleKind::black:
      if (l == 1) return qr(1, 2);
      return half_restricted ? qr(3 * L - 1, 4 * L) : qr(2 * L + 1, 2 * L + 4);
    case RuleKind::borda:
      if (l == 1) return qr(1, 2);
      return half_restricted ? qr(3 * L - 1, 4 * L) : qr(L, L + 1);
    case RuleKind::vetocore:
      if (l == 1) return qr(1, 3);
      return half_restricted ? qr(1, 2) : qr(L, L + 1);
    case RuleKind::antiplurality: return l == 1 ? qr(1, 3) : qr(1, 1);
    case RuleKind::runoff: return l == 1 ? qr(1, 2) : qr(1, 1);
    case RuleKind::simpson:
    case RuleKind::young:
    case RuleKind::plurality: return qr(1, 1);
    case RuleKind::dodgson: return Quota::bounds(Exact(Rational(5, 8)), Exact(1));
    case RuleKind::t12rule: return qr(2, 3);
    case RuleKind::scoring: throw std::invalid_argument("a scoring vector fixes m; use quota_veto");
  }
  throw std::logic_error("unhandled rule kind");
}

/// Supremum over k of quota_majority_sup(rule, k).
inline Quota quota_majority_sup_all(const Rule& rule) {
  using detail::qr;
  switch (rule.kind) {
    case RuleKind::irv: return qr(1, 2);
    case RuleKind::clr: return qr(5, 8);
    case RuleKind::convexmedian: return qr(3, 4);
    case RuleKind::t12rule: return qr(2, 3);
    case RuleKind::dodgson: return Quota::bounds(Exact(Rational(5, 8)), Exact(1));
    case RuleKind::scoring: throw std::invalid_argument("a scoring vector fixes m");
    default: return qr(1, 1);
  }
}

/// Supremum over l of quota_veto_sup(rule, l, half_restricted).
inline Quota quota_veto_sup_all(const Rule& rule, bool half_restricted) {
  using detail::qr;
  switch (rule.kind) {
    case RuleKind::irv: return qr(1, 2);
    case RuleKind::clr: return qr(5, 8);
    case RuleKind::convexmedian: return qr(3, 4);
    case RuleKind::black:
    case RuleKind::borda: return half_restricted ? qr(3, 4) : qr(1, 1);
    case RuleKind::vetocore: return half_restricted ? qr(1, 2) : qr(1, 1);
    case RuleKind::t12rule: return qr(2, 3);
    case RuleKind::dodgson: return Quota::bounds(Exact(Rational(5, 8)), Exact(1));
    case RuleKind::scoring: throw std::invalid_argument("a scoring vector fixes m");
    default: return qr(1, 1);
  }
}

// ---------------------------------------------------------------- dominance

/// Pairs (a, b) where a outscores b under every convex scoring rule:
/// B_t(a) >= B_t(b) for t = 1..m-1, strictly at t = m-1.
inline std::vector<std::pair<Candidate, Candidate>> second_order_dominance(const Profile& p) {
  const int m = p.num_candidates();
  if (m < 2) throw std::invalid_argument("dominance needs at least two candidates");
  const PositionalMatrix pm(p);
  std::vector<std::vector<Rational>> bt(static_cast<std::size_t>(m));
  for (Candidate a = 0; a < m; ++a) {
    for (int t = 1; t < m; ++t) bt[static_cast<std::size_t>(a)].push_back(truncated_borda(pm, a, Rational(t)));
  }
  std::vector<std::pair<Candidate, Candidate>> out;
  for (Candidate a = 0; a < m; ++a) {
    for (Candidate b = 0; b < m; ++b) {
      if (a == b) continue;
      const auto& x = bt[static_cast<std::size_t>(a)];
      const auto& y = bt[static_cast<std::size_t>(b)];
      bool ok = x.back() > y.back();
      for (std::size_t t = 0; ok && t < x.size(); ++t) ok = x[t] >= y[t];
      if (ok) out.emplace_back(a, b);
    }
  }
  return out;
}

}  // namespace votelab
