#pragma once

// Voting rules as choice correspondences: every rule returns the full set of
// tied winners together with a per-candidate score report.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "votelab/exact.hpp"
#include "votelab/profile.hpp"

namespace votelab {

/// Positional weights s_1 >= ... >= s_m with s_1 > s_m.
class ScoreVector {
 public:
  explicit ScoreVector(std::vector<Rational> weights) : s_(std::move(weights)) {
    if (s_.size() < 2) throw std::invalid_argument("score vector needs at least two positions");
    for (std::size_t i = 1; i < s_.size(); ++i) {
      if (s_[i] > s_[i - 1]) throw std::invalid_argument("score vector must be nonincreasing");
    }
    if (!(s_.front() > s_.back())) throw std::invalid_argument("score vector needs s_1 > s_m");
  }

  static ScoreVector plurality(int m) {
    std::vector<Rational> s(static_cast<std::size_t>(m), Rational(0));
    s[0] = 1;
    return ScoreVector(std::move(s));
  }
  static ScoreVector borda(int m) {
    std::vector<Rational> s;
    for (int i = 0; i < m; ++i) s.emplace_back(m - 1 - i);
    return ScoreVector(std::move(s));
  }
  static ScoreVector antiplurality(int m) {
    std::vector<Rational> s(static_cast<std::size_t>(m), Rational(1));
    s.back() = 0;
    return ScoreVector(std::move(s));
  }
  /// k-approval: 1 for the top k positions, 0 below.
  static ScoreVector approval(int m, int k) {
    std::vector<Rational> s(static_cast<std::size_t>(m), Rational(0));
    for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = 1;
    return ScoreVector(std::move(s));
  }

  int size() const { return static_cast<int>(s_.size()); }
  const Rational& operator[](int position) const { return s_[static_cast<std::size_t>(position)]; }
  const std::vector<Rational>& weights() const { return s_; }

  /// 0 < s_{m-1} - s_m <= ... <= s_1 - s_2.
  bool is_convex() const {
    Rational prev_gap(0);
    for (std::size_t i = s_.size() - 1; i > 0; --i) {
      const Rational gap = s_[i - 1] - s_[i];
      if (i == s_.size() - 1 && gap.sign() <= 0) return false;
      if (gap < prev_gap) return false;
      prev_gap = gap;
    }
    return true;
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < s_.size(); ++i) {
      if (i) out += ",";
      out += s_[i].str();
    }
    return out;
  }

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;

 private:
  std::vector<Rational> s_;
};

enum class RuleKind {
  plurality,
  runoff,
  irv,
  borda,
  scoring,
  antiplurality,
  simpson,
  young,
  dodgson,
  clr,
  black,
  convexmedian,
  vetocore,
  t12rule,
};

/// A rule identifier, optionally carrying explicit scoring weights.
struct Rule {
  RuleKind kind = RuleKind::plurality;
  std::optional<ScoreVector> weights;  // only for RuleKind::scoring

  static Rule parse(std::string_view id);
  std::string id() const;
  std::string display_name() const;

  friend bool operator==(const Rule&, const Rule&) = default;
};

namespace detail {
struct RuleName {
  RuleKind kind;
  std::string_view id;
  std::string_view display;
};
inline constexpr std::array<RuleName, 13> kRuleNames{{
    {RuleKind::plurality, "plurality", "Plurality"},
    {RuleKind::runoff, "runoff", "Plurality with runoff"},
    {RuleKind::irv, "irv", "Instant-runoff"},
    {RuleKind::borda, "borda", "Borda"},
    {RuleKind::antiplurality, "antiplurality", "Inverse plurality"},
    {RuleKind::simpson, "simpson", "Simpson's"},
    {RuleKind::young, "young", "Young's"},
    {RuleKind::dodgson, "dodgson", "Dodgson's"},
    {RuleKind::clr, "clr", "Condorcet least-reversal"},
    {RuleKind::black, "black", "Black's"},
    {RuleKind::convexmedian, "convexmedian", "Convex median"},
    {RuleKind::vetocore, "vetocore", "Proportional veto"},
    {RuleKind::t12rule, "t12rule", "Tradeoff rule"},
}};
}  // namespace detail

/// All parameter-free rule ids.
inline std::vector<Rule> named_rules() {
  std::vector<Rule> out;
  for (const auto& r : detail::kRuleNames) out.push_back(Rule{r.kind, std::nullopt});
  return out;
}

inline Rule Rule::parse(std::string_view id) {
  constexpr std::string_view prefix = "scoring:";
  if (id.substr(0, prefix.size()) == prefix) {
    std::string body(id.substr(prefix.size()));
    if (!body.empty() && body.front() == '<' && body.back() == '>') body = body.substr(1, body.size() - 2);
    std::vector<Rational> weights;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const Exact v = parse_exact(item);
      if (!v.is_rational()) throw std::invalid_argument("scoring weights must be rational");
      weights.push_back(v.rational_part());
    }
    return Rule{RuleKind::scoring, ScoreVector(std::move(weights))};
  }
  for (const auto& r : detail::kRuleNames) {
    if (r.id == id) return Rule{r.kind, std::nullopt};
  }
  throw std::invalid_argument("unknown rule id '" + std::string(id) + "'");
}

inline std::string Rule::id() const {
  if (kind == RuleKind::scoring) return "scoring:" + weights->str();
  for (const auto& r : detail::kRuleNames) {
    if (r.kind == kind) return std::string(r.id);
  }
  return "?";
}

inline std::string Rule::display_name() const {
  if (kind == RuleKind::scoring) return "Scoring (" + weights->str() + ")";
  for (const auto& r : detail::kRuleNames) {
    if (r.kind == kind) return std::string(r.display);
  }
  return "?";
}

enum class Optimum { maximize, minimize, none };

/// Per-candidate scores plus a human-readable trace of how the rule decided.
struct ScoreReport {
  std::vector<Exact> scores;
  Optimum optimum = Optimum::none;
  std::vector<std::string> trace;
};

struct Outcome {
  ChoiceSet winners;
  ScoreReport report;
};

namespace detail {

inline ChoiceSet argbest(const std::vector<Exact>& scores, Optimum opt) {
  ChoiceSet out;
  const Exact* best = nullptr;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const Exact& s = scores[i];
    if (best == nullptr || (opt == Optimum::maximize ? s > *best : s < *best)) {
      best = &s;
      out = ChoiceSet::single(static_cast<Candidate>(i));
    } else if (s == *best) {
      out.insert(static_cast<Candidate>(i));
    }
  }
  return out;
}

inline std::string set_str(const Profile& p, CandidateSet s) {
  std::string out = "{";
  bool first = true;
  for (Candidate c : s.members()) {
    if (!first) out += ", ";
    out += p.name(c);
    first = false;
  }
  return out + "}";
}

}  // namespace detail

// ---------------------------------------------------------------- scoring

inline std::vector<Rational> scoring_scores(const Profile& p, const ScoreVector& s) {
  const int m = p.num_candidates();
  if (s.size() != m) {
    throw std::invalid_argument("score vector has " + std::to_string(s.size()) + " weights for " +
                                std::to_string(m) + " candidates");
  }
  std::vector<Rational> total(static_cast<std::size_t>(m), Rational(0));
  for (const Ballot& b : p.ballots()) {
    for (int l = 0; l < m; ++l) {
      total[static_cast<std::size_t>(b.ranking[static_cast<std::size_t>(l)])] += s[l] * Rational(b.count);
    }
  }
  return total;
}

inline Outcome scoring_outcome(const Profile& p, const ScoreVector& s) {
  Outcome out;
  out.report.optimum = Optimum::maximize;
  for (const Rational& r : scoring_scores(p, s)) out.report.scores.emplace_back(r);
  out.winners = detail::argbest(out.report.scores, Optimum::maximize);
  return out;
}

inline ChoiceSet scoring_winners(const Profile& p, const ScoreVector& s) {
  return scoring_outcome(p, s).winners;
}

/// Borda score through the tournament matrix: Bo(a) = sum_b h(a,b).
inline std::vector<std::int64_t> borda_from_tournament(const TournamentMatrix& h) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(h.num_candidates()), 0);
  for (Candidate a = 0; a < h.num_candidates(); ++a) {
    for (Candidate b = 0; b < h.num_candidates(); ++b) {
      if (a != b) out[static_cast<std::size_t>(a)] += h(a, b);
    }
  }
  return out;
}

// ---------------------------------------------------------------- runoffs

inline Outcome plurality_runoff_outcome(const Profile& p) {
  const int m = p.num_candidates();
  const PositionalMatrix pm(p);
  const TournamentMatrix h(p);
  Outcome out;
  for (Candidate a = 0; a < m; ++a) out.report.scores.emplace_back(pm.top(a));
  if (m == 1) {
    out.winners = ChoiceSet::single(0);
    return out;
  }
  std::int64_t first = -1;
  for (Candidate a = 0; a < m; ++a) first = std::max(first, pm.top(a));
  CandidateSet leaders;
  for (Candidate a = 0; a < m; ++a) {
    if (pm.top(a) == first) leaders.insert(a);
  }
  std::vector<std::pair<Candidate, Candidate>> finals;
  if (leaders.size() >= 2) {
    const auto ls = leaders.members();
    for (std::size_t i = 0; i < ls.size(); ++i) {
      for (std::size_t j = i + 1; j < ls.size(); ++j) finals.emplace_back(ls[i], ls[j]);
    }
  } else {
    const Candidate x = leaders.first();
    std::int64_t second = -1;
    for (Candidate a = 0; a < m; ++a) {
      if (a != x) second = std::max(second, pm.top(a));
    }
    for (Candidate a = 0; a < m; ++a) {
      if (a != x && pm.top(a) == second) finals.emplace_back(x, a);
    }
  }
  for (auto [x, y] : finals) {
    std::string line = "runoff " + p.name(x) + " vs " + p.name(y) + ": " + std::to_string(h(x, y)) + "-" +
                       std::to_string(h(y, x));
    out.report.trace.push_back(line);
    if (h(x, y) >= h(y, x)) out.winners.insert(x);
    if (h(y, x) >= h(x, y)) out.winners.insert(y);
  }
  return out;
}

inline ChoiceSet plurality_runoff_winners(const Profile& p) { return plurality_runoff_outcome(p).winners; }

struct InstantRunoffResult {
  ChoiceSet winners;
  std::vector<CandidateSet> eliminated;  // one entry per round
  bool tie_resolved = false;              // winners come from single-elimination orders
};

namespace detail {

inline std::vector<std::int64_t> top_counts(const Profile& p, CandidateSet remaining) {
  std::vector<std::int64_t> tops(static_cast<std::size_t>(p.num_candidates()), 0);
  for (const Ballot& b : p.ballots()) {
    for (Candidate c : b.ranking) {
      if (remaining.contains(c)) {
        tops[static_cast<std::size_t>(c)] += b.count;
        break;
      }
    }
  }
  return tops;
}

inline CandidateSet fewest_tops(const Profile& p, CandidateSet remaining) {
  const auto tops = top_counts(p, remaining);
  std::int64_t low = std::numeric_limits<std::int64_t>::max();
  for (Candidate c : remaining.members()) low = std::min(low, tops[static_cast<std::size_t>(c)]);
  CandidateSet losers;
  for (Candidate c : remaining.members()) {
    if (tops[static_cast<std::size_t>(c)] == low) losers.insert(c);
  }
  return losers;
}

}  // namespace detail

/// Rounds drop every candidate tied for the fewest top positions. Winners are
/// the union over all orders that drop one such candidate at a time, so a tie
/// never removes a whole majority-backed group at once.
inline InstantRunoffResult instant_runoff(const Profile& p) {
  InstantRunoffResult res;
  CandidateSet remaining = p.candidates();
  bool tied = false;
  while (remaining.size() > 1) {
    const CandidateSet losers = detail::fewest_tops(p, remaining);
    if (losers.size() > 1) tied = true;
    if (losers == remaining) break;
    res.eliminated.push_back(losers);
    remaining = remaining.minus(losers);
  }
  if (!tied) {
    res.winners = remaining;
    return res;
  }
  std::unordered_map<std::uint64_t, ChoiceSet> memo;
  std::function<ChoiceSet(CandidateSet)> go = [&](CandidateSet rem) -> ChoiceSet {
    if (rem.size() == 1) return rem;
    if (auto it = memo.find(rem.bits()); it != memo.end()) return it->second;
    ChoiceSet out;
    for (Candidate c : detail::fewest_tops(p, rem).members()) {
      CandidateSet next = rem;
      next.erase(c);
      out = out | go(next);
    }
    memo[rem.bits()] = out;
    return out;
  };
  res.winners = go(p.candidates());
  res.tie_resolved = true;
  return res;
}

inline Outcome instant_runoff_outcome(const Profile& p) {
  const InstantRunoffResult r = instant_runoff(p);
  Outcome out;
  out.winners = r.winners;
  out.report.optimum = Optimum::maximize;
  // score = number of rounds survived
  std::vector<std::int64_t> survived(static_cast<std::size_t>(p.num_candidates()),
                                     static_cast<std::int64_t>(r.eliminated.size()));
  for (std::size_t round = 0; round < r.eliminated.size(); ++round) {
    for (Candidate c : r.eliminated[round].members()) survived[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(round);
    out.report.trace.push_back("round " + std::to_string(round + 1) + ": eliminate " +
                               detail::set_str(p, r.eliminated[round]));
  }
  if (r.tie_resolved) out.report.trace.push_back("tied elimination: winners united over single-elimination orders");
  for (std::int64_t s : survived) out.report.scores.emplace_back(s);
  return out;
}

inline ChoiceSet instant_runoff_winners(const Profile& p) { return instant_runoff(p).winners; }

// ---------------------------------------------------------------- Condorcet extensions

/// Si(a) = min over b != a of h(a,b).
inline std::vector<std::int64_t> simpson_scores(const TournamentMatrix& h) {
  const int m = h.num_candidates();
  std::vector<std::int64_t> out(static_cast<std::size_t>(m), h.num_voters());
  for (Candidate a = 0; a < m; ++a) {
    for (Candidate b = 0; b < m; ++b) {
      if (a != b) out[static_cast<std::size_t>(a)] = std::min(out[static_cast<std::size_t>(a)], h(a, b));
    }
  }
  return out;
}

inline Outcome simpson_outcome(const Profile& p) {
  Outcome out;
  out.report.optimum = Optimum::maximize;
  for (std::int64_t s : simpson_scores(TournamentMatrix(p))) out.report.scores.emplace_back(s);
  out.winners = detail::argbest(out.report.scores, Optimum::maximize);
  return out;
}

inline ChoiceSet simpson_winners(const Profile& p) { return simpson_outcome(p).winners; }

namespace detail {

struct YoungSearch {
  std::vector<std::int64_t> counts;
  std::vector<std::vector<int>> delta;  // change of margin vs each rival per removed voter
  std::int64_t best = 0;

  void run(std::size_t idx, std::int64_t removed, std::vector<std::int64_t>& margin) {
    std::int64_t deficit = 0;
    for (std::int64_t d : margin) deficit = std::max(deficit, -d);
    if (deficit == 0) {
      best = std::min(best, removed);
      return;
    }
    if (removed + deficit >= best || idx == counts.size()) return;
    const std::int64_t cap = std::min(counts[idx], best - removed - 1);
    const auto& dl = delta[idx];
    for (std::int64_t r = cap; r >= 0; --r) {
      for (std::size_t b = 0; b < margin.size(); ++b) margin[b] += r * dl[b];
      run(idx + 1, removed + r, margin);
      for (std::size_t b = 0; b < margin.size(); ++b) margin[b] -= r * dl[b];
    }
  }
};

}  // namespace detail

/// Fewest voters whose removal makes `a` a weak Condorcet winner.
/// Searches removal counts per ballot type with branch and bound.
inline std::int64_t young_score(const Profile& p, Candidate a) {
  const int m = p.num_candidates();
  if (m == 1) return 0;
  // margin_b = 2h(a,b) - n over the kept voters; a wins weakly iff all >= 0
  std::vector<std::int64_t> margin(static_cast<std::size_t>(m - 1), 0);
  auto slot = [a](Candidate b) { return static_cast<std::size_t>(b < a ? b : b - 1); };
  detail::YoungSearch search;
  std::vector<std::pair<int, std::size_t>> order;
  std::int64_t tops = 0;
  for (const Ballot& bal : p.ballots()) {
    const auto pos = positions_of(bal.ranking);
    const int pa = pos[static_cast<std::size_t>(a)];
    std::vector<int> dl(static_cast<std::size_t>(m - 1), 0);
    for (Candidate b = 0; b < m; ++b) {
      if (b == a) continue;
      const int sigma = pa < pos[static_cast<std::size_t>(b)] ? 1 : -1;
      margin[slot(b)] += sigma * bal.count;
      dl[slot(b)] = -sigma;
    }
    if (pa == 0) {
      tops += bal.count;
      continue;  // removing a voter who tops `a` never helps
    }
    order.emplace_back(pa, search.counts.size());
    search.counts.push_back(bal.count);
    search.delta.push_back(std::move(dl));
  }
  // most helpful ballot types first
  std::stable_sort(order.begin(), order.end(), [](auto x, auto y) { return x.first > y.first; });
  detail::YoungSearch sorted;
  for (auto [_, i] : order) {
    sorted.counts.push_back(search.counts[i]);
    sorted.delta.push_back(search.delta[i]);
  }
  // removing everyone who does not rank `a` first always works
  sorted.best = p.num_voters() - tops + 1;
  sorted.run(0, 0, margin);
  return std::min(sorted.best, p.num_voters() - tops);
}

inline Outcome young_outcome(const Profile& p) {
  Outcome out;
  out.report.optimum = Optimum::minimize;
  for (Candidate a = 0; a < p.num_candidates(); ++a) out.report.scores.emplace_back(young_score(p, a));
  out.winners = detail::argbest(out.report.scores, Optimum::minimize);
  return out;
}

inline ChoiceSet young_winners(const Profile& p) { return young_outcome(p).winners; }

namespace detail {

struct DodgsonType {
  std::int64_t count;
  std::vector<std::size_t> above;  // rival slots at distance 1, 2, ... above a
};

struct DodgsonSearch {
  std::vector<DodgsonType> types;
  std::int64_t best = 0;

  static std::int64_t lower_bound(const std::vector<std::int64_t>& need) {
    std::int64_t s = 0;
    for (std::int64_t v : need) s += v;
    return s;
  }

  void run(std::size_t idx, std::int64_t cost, std::vector<std::int64_t>& need) {
    const std::int64_t lb = lower_bound(need);
    if (lb == 0) {
      best = std::min(best, cost);
      return;
    }
    if (cost + lb >= best || idx == types.size()) return;
    std::vector<std::int64_t> lifts(types[idx].above.size(), 0);
    choose(idx, 0, types[idx].count, cost, need, lifts);
  }

  // lifts[x] = voters of this type lifted by at least x+1 positions (nonincreasing in x)
  void choose(std::size_t idx, std::size_t x, std::int64_t cap, std::int64_t cost,
              std::vector<std::int64_t>& need, std::vector<std::int64_t>& lifts) {
    const DodgsonType& t = types[idx];
    if (x == t.above.size()) {
      std::vector<std::int64_t> saved = need;
      for (std::size_t y = 0; y < lifts.size(); ++y) {
        std::int64_t& nd = need[t.above[y]];
        nd = std::max<std::int64_t>(0, nd - lifts[y]);
      }
      run(idx + 1, cost, need);
      need = std::move(saved);
      return;
    }
    // lifting further than any remaining need at this depth or deeper is waste
    std::int64_t useful = 0;
    for (std::size_t y = x; y < t.above.size(); ++y) useful = std::max(useful, need[t.above[y]]);
    const std::int64_t hi = std::min(cap, useful);
    for (std::int64_t u = hi; u >= 0; --u) {
      if (cost + u >= best) continue;
      lifts[x] = u;
      choose(idx, x + 1, u, cost + u, need, lifts);
    }
    lifts[x] = 0;
  }
};

}  // namespace detail

/// Fewest adjacent swaps making `a` a strict Condorcet winner. Only swaps that
/// lift `a` are considered; every other swap leaves all of a's duels unchanged
/// or worse.
inline std::int64_t dodgson_score(const Profile& p, Candidate a) {
  const int m = p.num_candidates();
  if (m == 1) return 0;
  const TournamentMatrix h(p);
  const std::int64_t n = p.num_voters();
  auto slot = [a](Candidate b) { return static_cast<std::size_t>(b < a ? b : b - 1); };
  std::vector<std::int64_t> need(static_cast<std::size_t>(m - 1), 0);
  for (Candidate b = 0; b < m; ++b) {
    if (b != a) need[slot(b)] = std::max<std::int64_t>(0, n / 2 + 1 - h(a, b));
  }
  detail::DodgsonSearch search;
  std::int64_t everyone_to_top = 0;
  for (const Ballot& bal : p.ballots()) {
    const auto pos = positions_of(bal.ranking);
    const int pa = pos[static_cast<std::size_t>(a)];
    if (pa == 0) continue;
    detail::DodgsonType t{bal.count, {}};
    for (int d = 1; d <= pa; ++d) t.above.push_back(slot(bal.ranking[static_cast<std::size_t>(pa - d)]));
    everyone_to_top += bal.count * pa;
    search.types.push_back(std::move(t));
  }
  std::stable_sort(search.types.begin(), search.types.end(),
                   [](const auto& x, const auto& y) { return x.above.size() < y.above.size(); });
  search.best = everyone_to_top + 1;
  search.run(0, 0, need);
  return std::min(search.best, everyone_to_top);
}

inline Outcome dodgson_outcome(const Profile& p) {
  Outcome out;
  out.report.optimum = Optimum::minimize;
  for (Candidate a = 0; a < p.num_candidates(); ++a) out.report.scores.emplace_back(dodgson_score(p, a));
  out.winners = detail::argbest(out.report.scores, Optimum::minimize);
  return out;
}

inline ChoiceSet dodgson_winners(const Profile& p) { return dodgson_outcome(p).winners; }

/// p(a) = sum over rivals c of max(n/2 - h(a,c), 0).
inline std::vector<Rational> clr_scores(const TournamentMatrix& h) {
  const int m = h.num_candidates();
  std::vector<Rational> out;
  for (Candidate a = 0; a < m; ++a) {
    std::int64_t twice = 0;
    for (Candidate c = 0; c < m; ++c) {
      if (c != a) twice += std::max<std::int64_t>(h.num_voters() - 2 * h(a, c), 0);
    }
    out.emplace_back(twice, 2);
  }
  return out;
}

inline Outcome clr_outcome(const Profile& p) {
  const TournamentMatrix h(p);
  Outcome out;
  out.report.optimum = Optimum::minimize;
  for (const Rational& r : clr_scores(h)) out.report.scores.emplace_back(r);
  for (Candidate a = 0; a < p.num_candidates(); ++a) {
    for (Candidate c = 0; c < p.num_candidates(); ++c) {
      if (a != c && 2 * h(a, c) < h.num_voters()) {
        out.report.trace.push_back(p.name(a) + " trails " + p.name(c) + " by " +
                                   Rational(h.num_voters() - 2 * h(a, c), 2).str());
      }
    }
  }
  out.winners = detail::argbest(out.report.scores, Optimum::minimize);
  return out;
}

inline ChoiceSet clr_winners(const Profile& p) { return clr_outcome(p).winners; }

/// The Condorcet winner if one exists, otherwise the Borda winners.
inline Outcome black_outcome(const Profile& p) {
  const TournamentMatrix h(p);
  Outcome out;
  out.report.optimum = Optimum::maximize;
  for (std::int64_t s : borda_from_tournament(h)) out.report.scores.emplace_back(s);
  if (auto cw = condorcet_winner(h, p.candidates())) {
    out.winners = ChoiceSet::single(*cw);
    out.report.optimum = Optimum::none;
    out.report.trace.push_back("Condorcet winner " + p.name(*cw));
  } else {
    out.winners = detail::argbest(out.report.scores, Optimum::maximize);
    out.report.trace.push_back("no Condorcet winner; Borda fallback");
  }
  return out;
}

inline ChoiceSet black_winners(const Profile& p) { return black_outcome(p).winners; }

// ---------------------------------------------------------------- truncated-Borda rules

namespace detail {

/// Truncated Borda on the piece t in [j, j+1] is t*S - W.
struct BordaPiece {
  std::int64_t S = 0;
  std::int64_t W = 0;
};

inline BordaPiece borda_piece(const PositionalMatrix& pm, Candidate a, std::int64_t j) {
  BordaPiece piece;
  const std::int64_t last = std::min<std::int64_t>(j, pm.num_candidates() - 1);
  for (std::int64_t l = 0; l <= last; ++l) {
    const std::int64_t c = pm(static_cast<int>(l), a);
    piece.S += c;
    piece.W += l * c;
  }
  return piece;
}

}  // namespace detail

/// CM(a) = max{ t >= 1 : B_t(a)/t <= n/2 }; nullopt for a majority winner,
/// for whom the set is empty.
inline std::optional<Rational> convex_median_score(const PositionalMatrix& pm, Candidate a) {
  const std::int64_t n = pm.num_voters();
  if (2 * pm.top(a) > n) return std::nullopt;
  for (std::int64_t j = 1;; ++j) {
    // feasible iff t * (2S - n) <= 2W
    const detail::BordaPiece piece = detail::borda_piece(pm, a, j);
    const std::int64_t slope = 2 * piece.S - n;
    if (slope <= 0) continue;
    const Rational bound(2 * piece.W, slope);
    if (bound < Rational(j + 1)) return bound;
  }
}

inline Outcome convex_median_outcome(const Profile& p) {
  const PositionalMatrix pm(p);
  Outcome out;
  out.report.optimum = Optimum::minimize;
  if (auto mw = majority_winner(pm)) {
    out.winners = ChoiceSet::single(*mw);
    out.report.trace.push_back("majority winner " + p.name(*mw) + " (score 0)");
  }
  for (Candidate a = 0; a < p.num_candidates(); ++a) {
    auto s = convex_median_score(pm, a);
    out.report.scores.emplace_back(s ? *s : Rational(0));
  }
  if (out.winners.empty()) out.winners = detail::argbest(out.report.scores, Optimum::minimize);
  return out;
}

inline ChoiceSet convex_median_winners(const Profile& p) { return convex_median_outcome(p).winners; }

namespace detail {

/// Members of s that no other member beats under every convex scoring rule,
/// i.e. B_t(b) >= B_t(a) for t = 1..m-1 with strict inequality at m-1.
inline CandidateSet undominated(const PositionalMatrix& pm, CandidateSet s) {
  const int m = pm.num_candidates();
  auto bt = [&](Candidate a, std::int64_t t) {
    std::int64_t sum = 0;
    for (std::int64_t l = 0; l < t; ++l) sum += (t - l) * pm(static_cast<int>(l), a);
    return sum;
  };
  CandidateSet out;
  for (Candidate a : s.members()) {
    bool dominated = false;
    for (Candidate b : s.members()) {
      if (b == a || bt(b, m - 1) <= bt(a, m - 1)) continue;
      bool all = true;
      for (std::int64_t t = 1; all && t < m - 1; ++t) all = bt(b, t) >= bt(a, t);
      if (all) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.insert(a);
  }
  return out;
}

}  // namespace detail

/// max{ t >= 1 : (3t+1)/(2(t+1)) * B_t(a)/t <= n/2 }; nullopt for a majority
/// winner. On each unit piece the condition is the quadratic
/// (3S-n) t^2 + (S-3W-n) t - W <= 0, so the score is rational or a
/// quadratic irrational.
inline std::optional<Exact> tradeoff_score(const PositionalMatrix& pm, Candidate a) {
  const std::int64_t n = pm.num_voters();
  if (2 * pm.top(a) > n) return std::nullopt;
  for (std::int64_t j = 1;; ++j) {
    const detail::BordaPiece piece = detail::borda_piece(pm, a, j);
    const std::int64_t A = 3 * piece.S - n;
    const std::int64_t B = piece.S - 3 * piece.W - n;
    const std::int64_t C = -piece.W;
    const std::int64_t t1 = j + 1;
    if (A * t1 * t1 + B * t1 + C <= 0) continue;
    const Exact lo(j);
    const Exact hi(t1);
    if (A == 0) return Exact(Rational(-C, B));
    const std::int64_t disc = B * B - 4 * A * C;
    if (disc < 0) throw std::logic_error("tradeoff_score: no crossing on a sign-changing piece");
    std::optional<Exact> best;
    for (int sgn : {1, -1}) {
      const Exact root(Rational(-B, 2 * A), Rational(sgn, 2 * A), disc);
      if (root >= lo && root <= hi && (!best || root > *best)) best = root;
    }
    if (!best) throw std::logic_error("tradeoff_score: root outside its piece");
    return best;
  }
}

inline Outcome tradeoff_rule_outcome(const Profile& p) {
  const PositionalMatrix pm(p);
  Outcome out;
  out.report.optimum = Optimum::minimize;
  if (auto mw = majority_winner(pm)) {
    out.winners = ChoiceSet::single(*mw);
    out.report.trace.push_back("majority winner " + p.name(*mw) + " (score 0)");
  }
  for (Candidate a = 0; a < p.num_candidates(); ++a) {
    auto s = tradeoff_score(pm, a);
    out.report.scores.push_back(s ? *s : Exact(0));
  }
  if (out.winners.empty()) {
    const ChoiceSet tied = detail::argbest(out.report.scores, Optimum::minimize);
    out.winners = detail::undominated(pm, tied);
    if (out.winners != tied) out.report.trace.push_back("tie refined: dropped " + detail::set_str(p, tied.minus(out.winners)) + " as dominated");
  }
  return out;
}

inline ChoiceSet tradeoff_rule_winners(const Profile& p) { return tradeoff_rule_outcome(p).winners; }

// ---------------------------------------------------------------- proportional veto core

inline constexpr int kVetoCoreMaxCandidates = 20;

/// Candidates not blocked by any coalition. A coalition of t voters blocks a
/// when all of them rank every member of some B above a and
/// |A \ B| * n < m * t.
inline Outcome proportional_veto_core_outcome(const Profile& p) {
  const int m = p.num_candidates();
  if (m > kVetoCoreMaxCandidates) {
    throw std::length_error("proportional veto core: more than 20 candidates");
  }
  const std::int64_t n = p.num_voters();
  std::vector<std::vector<std::uint64_t>> above;  // per candidate, per ballot
  above.resize(static_cast<std::size_t>(m));
  for (const Ballot& b : p.ballots()) {
    std::uint64_t mask = 0;
    for (Candidate c : b.ranking) {
      above[static_cast<std::size_t>(c)].push_back(mask);
      mask |= std::uint64_t{1} << c;
    }
  }
  Outcome out;
  out.report.optimum = Optimum::maximize;
  for (Candidate a = 0; a < m; ++a) {
    const std::uint64_t others = CandidateSet::all(m).bits() & ~(std::uint64_t{1} << a);
    bool blocked = false;
    // all nonempty subsets B of the other candidates
    for (std::uint64_t B = others; B != 0 && !blocked; B = (B - 1) & others) {
      std::int64_t t = 0;
      for (std::size_t i = 0; i < p.ballots().size(); ++i) {
        if ((B & ~above[static_cast<std::size_t>(a)][i]) == 0) t += p.ballots()[i].count;
      }
      const std::int64_t outside = m - std::popcount(B);
      if (outside * n < m * t) {
        blocked = true;
        out.report.trace.push_back(p.name(a) + " blocked by " + std::to_string(t) + " voters via " +
                                   detail::set_str(p, CandidateSet(B)));
      }
    }
    out.report.scores.emplace_back(blocked ? 0 : 1);
    if (!blocked) out.winners.insert(a);
  }
  return out;
}

inline ChoiceSet proportional_veto_core(const Profile& p) { return proportional_veto_core_outcome(p).winners; }

// ---------------------------------------------------------------- dispatch

inline Outcome evaluate(const Rule& rule, const Profile& p) {
  const int m = p.num_candidates();
  if (rule.kind == RuleKind::scoring && rule.weights->size() != m) {
    throw std::invalid_argument("rule " + rule.id() + " needs exactly " + std::to_string(rule.weights->size()) +
                                " candidates");
  }
  if (m == 1) {
    Outcome out;
    out.winners = ChoiceSet::single(0);
    out.report.scores.emplace_back(0);
    return out;
  }
  switch (rule.kind) {
    case RuleKind::plurality: return scoring_outcome(p, ScoreVector::plurality(m));
    case RuleKind::borda: return scoring_outcome(p, ScoreVector::borda(m));
    case RuleKind::antiplurality: return scoring_outcome(p, ScoreVector::antiplurality(m));
    case RuleKind::scoring: return scoring_outcome(p, *rule.weights);
    case RuleKind::runoff: return plurality_runoff_outcome(p);
    case RuleKind::irv: return instant_runoff_outcome(p);
    case RuleKind::simpson: return simpson_outcome(p);
    case RuleKind::young: return young_outcome(p);
    case RuleKind::dodgson: return dodgson_outcome(p);
    case RuleKind::clr: return clr_outcome(p);
    case RuleKind::black: return black_outcome(p);
    case RuleKind::convexmedian: return convex_median_outcome(p);
    case RuleKind::vetocore: return proportional_veto_core_outcome(p);
    case RuleKind::t12rule: return tradeoff_rule_outcome(p);
  }
  throw std::logic_error("unhandled rule kind");
}

inline ChoiceSet winners(const Rule& rule, const Profile& p) { return evaluate(rule, p).winners; }

}  // namespace votelab
