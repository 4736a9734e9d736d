#pragma once

// Worst-case profile generators, brute-force score oracles, and bounded
// searches over anonymous profiles for criterion violations.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "votelab/criteria.hpp"
#include "votelab/exact.hpp"
#include "votelab/profile.hpp"
#include "votelab/rules.hpp"

namespace votelab {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchBudget {
  int max_voters = 12;
  int max_candidates = 5;
  std::uint64_t samples = 0;  // random profiles drawn after the exhaustive range
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: one per hardware thread
  std::uint64_t max_profiles = 0;  // 0: unlimited
};

inline constexpr const char* kMaxVotersEnv = "VOTELAB_MAX_VOTERS";

/// Lowers max_voters to $VOTELAB_MAX_VOTERS when that is smaller.
/// Returns true if the budget was cut.
inline bool apply_env_cap(SearchBudget& budget) {
  const char* raw = std::getenv(kMaxVotersEnv);
  if (raw == nullptr || *raw == '\0') return false;
  char* end = nullptr;
  const long cap = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || cap < 1) {
    throw std::invalid_argument(std::string(kMaxVotersEnv) + " must be a positive integer");
  }
  if (cap >= budget.max_voters) return false;
  budget.max_voters = static_cast<int>(cap);
  return true;
}

// ---------------------------------------------------------------- generators

/// n/k voters on each cyclic shift of b_1 > ... > b_k.
inline Profile condorcet_k_tuple(int k, std::int64_t n) {
  if (k < 2) throw std::invalid_argument("k-tuple needs k >= 2");
  if (n < 1 || n % k != 0) throw std::invalid_argument("k must divide the number of voters");
  std::vector<std::string> names;
  for (int i = 1; i <= k; ++i) names.push_back("b" + std::to_string(i));
  std::vector<Ballot> ballots;
  for (int shift = 0; shift < k; ++shift) {
    Ranking r;
    for (int i = 0; i < k; ++i) r.push_back((shift + i) % k);
    ballots.push_back({n / k, r});
  }
  return Profile(std::move(names), std::move(ballots));
}

/// The worst-case profile: q*n/k voters on each cyclic order of B followed by
/// a_1 > ... > a_{m-k}, and (1-q)*n/k voters on a_1 > ... > a_{m-k} followed by
/// the same cyclic orders. Candidates 0..k-1 are b_1..b_k.
inline Profile worst_case_profile(int m, int k, const Rational& q, std::int64_t n) {
  if (k < 1 || k >= m) throw std::invalid_argument("need 1 <= k < m");
  if (q.sign() < 0 || q > Rational(1)) throw std::invalid_argument("q must lie in [0, 1]");
  const Rational major = q * Rational(n);
  const Rational minor = (Rational(1) - q) * Rational(n);
  const Rational kk(k);
  if (!(major / kk).is_integer() || !(minor / kk).is_integer()) {
    std::int64_t smallest = 1;
    while (!(q * Rational(smallest) / kk).is_integer() || !((Rational(1) - q) * Rational(smallest) / kk).is_integer()) {
      ++smallest;
    }
    throw std::invalid_argument("q*n and (1-q)*n must be divisible by k; smallest valid n is " +
                                std::to_string(smallest));
  }
  std::vector<std::string> names;
  for (int i = 1; i <= k; ++i) names.push_back("b" + std::to_string(i));
  for (int i = 1; i <= m - k; ++i) names.push_back("a" + std::to_string(i));
  std::vector<Ballot> ballots;
  for (int shift = 0; shift < k; ++shift) {
    Ranking cyc;
    for (int i = 0; i < k; ++i) cyc.push_back((shift + i) % k);
    Ranking rest;
    for (int i = k; i < m; ++i) rest.push_back(i);
    const std::int64_t hi = (major / kk).num();
    const std::int64_t lo = (minor / kk).num();
    if (hi > 0) {
      Ranking r = cyc;
      r.insert(r.end(), rest.begin(), rest.end());
      ballots.push_back({hi, r});
    }
    if (lo > 0) {
      Ranking r = rest;
      r.insert(r.end(), cyc.begin(), cyc.end());
      ballots.push_back({lo, r});
    }
  }
  return Profile(std::move(names), std::move(ballots));
}

// ---------------------------------------------------------------- oracles

/// Young score by trying every removal sub-multiset, smallest first.
inline std::int64_t oracle_young_score(const Profile& p, Candidate a, std::uint64_t max_steps = 50'000'000) {
  const auto& ballots = p.ballots();
  const std::size_t T = ballots.size();
  std::uint64_t steps = 0;
  std::vector<std::int64_t> removed(T, 0);
  auto weak_winner = [&] {
    const std::int64_t m = p.num_candidates();
    std::int64_t kept = 0;
    std::vector<std::int64_t> wins(static_cast<std::size_t>(m), 0);
    for (std::size_t i = 0; i < T; ++i) {
      const std::int64_t c = ballots[i].count - removed[i];
      kept += c;
      for (Candidate x : ballots[i].ranking) {
        if (x == a) break;
        wins[static_cast<std::size_t>(x)] += c;
      }
    }
    for (Candidate b = 0; b < m; ++b) {
      if (b != a && 2 * wins[static_cast<std::size_t>(b)] > kept) return false;
    }
    return true;
  };
  std::function<bool(std::size_t, std::int64_t)> place = [&](std::size_t i, std::int64_t left) -> bool {
    if (++steps > max_steps) throw BudgetExceeded("young oracle: step budget exceeded");
    if (i == T) return left == 0 && weak_winner();
    for (std::int64_t r = std::min(left, ballots[i].count); r >= 0; --r) {
      removed[i] = r;
      if (place(i + 1, left - r)) return true;
    }
    removed[i] = 0;
    return false;
  };
  for (std::int64_t size = 0; size <= p.num_voters(); ++size) {
    if (place(0, size)) return size;
  }
  throw std::logic_error("young oracle: removing every voter must succeed");
}

/// Dodgson score by shortest-path search over all adjacent swaps of all voters.
/// States are voter multisets; the summed duel deficit is an admissible and
/// consistent heuristic, so the first goal popped is optimal.
inline std::int64_t oracle_dodgson_score(const Profile& p, Candidate a, std::uint64_t max_states = 5'000'000) {
  const int m = p.num_candidates();
  const std::int64_t n = p.num_voters();
  if (m > 16) throw BudgetExceeded("dodgson oracle: too many candidates");
  using State = std::vector<std::uint64_t>;  // one packed ranking per voter, sorted
  auto pack = [m](const Ranking& r) {
    std::uint64_t x = 0;
    for (int i = 0; i < m; ++i) x |= static_cast<std::uint64_t>(r[static_cast<std::size_t>(i)]) << (4 * i);
    return x;
  };
  auto at = [](std::uint64_t x, int i) { return static_cast<int>((x >> (4 * i)) & 0xF); };
  auto deficit = [&](const State& s) {
    std::vector<std::int64_t> wins(static_cast<std::size_t>(m), 0);
    for (std::uint64_t x : s) {
      for (int i = m - 1; i >= 0; --i) {
        if (at(x, i) == a) break;
        ++wins[static_cast<std::size_t>(at(x, i))];
      }
    }
    std::int64_t total = 0;
    for (Candidate b = 0; b < m; ++b) {
      if (b != a) total += std::max<std::int64_t>(0, n / 2 + 1 - wins[static_cast<std::size_t>(b)]);
    }
    return total;
  };
  struct KeyHash {
    std::size_t operator()(const State& s) const {
      std::size_t h = 1469598103934665603ULL;
      for (std::uint64_t x : s) h = (h ^ x) * 1099511628211ULL;
      return h;
    }
  };
  State start;
  for (const Ballot& b : p.ballots()) {
    for (std::int64_t i = 0; i < b.count; ++i) start.push_back(pack(b.ranking));
  }
  std::sort(start.begin(), start.end());
  std::unordered_map<State, std::int64_t, KeyHash> dist;
  using Item = std::tuple<std::int64_t, std::int64_t, State>;  // f, g, state
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[start] = 0;
  open.emplace(deficit(start), 0, start);
  while (!open.empty()) {
    auto [f, g, s] = open.top();
    open.pop();
    if (dist[s] < g) continue;
    const std::int64_t h = f - g;
    if (h == 0) return g;
    if (dist.size() > max_states) throw BudgetExceeded("dodgson oracle: state budget exceeded");
    for (std::size_t v = 0; v < s.size(); ++v) {
      if (v > 0 && s[v] == s[v - 1]) continue;  // same ranking, same successors
      for (int i = 0; i + 1 < m; ++i) {
        const std::uint64_t x = s[v];
        const std::uint64_t lo = (x >> (4 * i)) & 0xF;
        const std::uint64_t hi = (x >> (4 * (i + 1))) & 0xF;
        std::uint64_t y = x & ~(std::uint64_t{0xFF} << (4 * i));
        y |= (hi << (4 * i)) | (lo << (4 * (i + 1)));
        State t = s;
        t[v] = y;
        std::sort(t.begin(), t.end());
        auto it = dist.find(t);
        if (it != dist.end() && it->second <= g + 1) continue;
        dist[t] = g + 1;
        const std::int64_t ht = deficit(t);
        open.emplace(g + 1 + ht, g + 1, std::move(t));
      }
    }
  }
  throw std::logic_error("dodgson oracle: goal unreachable");
}

/// Union of instant-runoff winners over every order that removes one
/// minimum-score candidate at a time.
inline ChoiceSet parallel_universe_irv(const Profile& p) {
  const int m = p.num_candidates();
  if (m > 20) throw BudgetExceeded("parallel-universe IRV: too many candidates");
  std::unordered_map<std::uint64_t, ChoiceSet> memo;
  std::function<ChoiceSet(CandidateSet)> go = [&](CandidateSet remaining) -> ChoiceSet {
    if (remaining.size() == 1) return remaining;
    if (auto it = memo.find(remaining.bits()); it != memo.end()) return it->second;
    std::vector<std::int64_t> tops(static_cast<std::size_t>(m), 0);
    for (const Ballot& b : p.ballots()) {
      for (Candidate c : b.ranking) {
        if (remaining.contains(c)) {
          tops[static_cast<std::size_t>(c)] += b.count;
          break;
        }
      }
    }
    std::int64_t low = std::numeric_limits<std::int64_t>::max();
    for (Candidate c : remaining.members()) low = std::min(low, tops[static_cast<std::size_t>(c)]);
    ChoiceSet out;
    for (Candidate c : remaining.members()) {
      if (tops[static_cast<std::size_t>(c)] == low) {
        CandidateSet next = remaining;
        next.erase(c);
        out = out | go(next);
      }
    }
    memo[remaining.bits()] = out;
    return out;
  };
  return go(p.candidates());
}

// ---------------------------------------------------------------- enumeration

/// All rankings of m candidates in lexicographic order.
inline std::vector<Ranking> all_rankings(int m) {
  Ranking r(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) r[static_cast<std::size_t>(i)] = i;
  std::vector<Ranking> out;
  do {
    out.push_back(r);
  } while (std::next_permutation(r.begin(), r.end()));
  return out;
}

/// Calls f on every vector of `parts` nonnegative integers summing to `total`,
/// in lexicographically decreasing order. Stops early when f returns false.
template <class F>
bool for_each_composition(std::int64_t total, std::size_t parts, F&& f) {
  std::vector<std::int64_t> c(parts, 0);
  if (parts == 0) return total == 0 ? f(c) : true;
  std::function<bool(std::size_t, std::int64_t)> rec = [&](std::size_t i, std::int64_t left) -> bool {
    if (i + 1 == parts) {
      c[i] = left;
      return f(c);
    }
    for (std::int64_t v = left; v >= 0; --v) {
      c[i] = v;
      if (!rec(i + 1, left - v)) return false;
    }
    c[i] = 0;
    return true;
  };
  return rec(0, total);
}

/// Calls f on every anonymous profile with m candidates and exactly n voters,
/// in lexicographically decreasing order of the ranking-count vector.
template <class F>
void for_each_profile(int m, std::int64_t n, F&& f) {
  const auto types = all_rankings(m);
  for_each_composition(n, types.size(), [&](const std::vector<std::int64_t>& counts) {
    std::vector<Ballot> ballots;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] > 0) ballots.push_back({counts[i], types[i]});
    }
    return f(Profile(m, std::move(ballots)));
  });
}

struct SearchReport {
  std::optional<Violation> violation;
  bool from_sample = false;  // violation came from random sampling
  std::uint64_t profiles_checked = 0;
  int voters_covered = 0;  // every n up to this was searched exhaustively
  bool partial = false;    // budget was cut or the profile cap was hit
};

namespace detail {

/// Rankings split by whether their top k set is exactly {0, ..., k-1}.
struct TypeSplit {
  std::vector<Ranking> supporting;
  std::vector<Ranking> other;
};

inline TypeSplit split_types(int m, int k) {
  TypeSplit split;
  const CandidateSet B = CandidateSet::all(k);
  for (Ranking& r : all_rankings(m)) {
    CandidateSet top;
    for (int i = 0; i < k; ++i) top.insert(r[static_cast<std::size_t>(i)]);
    (top == B ? split.supporting : split.other).push_back(std::move(r));
  }
  return split;
}

inline unsigned worker_count(const SearchBudget& b) {
  if (b.workers > 0) return b.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs job(i) for i in [0, count) on a pool. A job returning true marks a hit;
/// jobs after the earliest hit are skipped. Returns the earliest hit index.
inline std::optional<std::size_t> first_hit(std::size_t count, unsigned workers,
                                            const std::function<bool(std::size_t)>& job) {
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best{std::numeric_limits<std::size_t>::max()};
  std::mutex err_mu;
  std::exception_ptr err;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || i > best.load()) return;
      try {
        if (job(i)) {
          std::size_t cur = best.load();
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
        }
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!err) err = std::current_exception();
        best.store(0);
      }
    }
  };
  const unsigned w = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < w; ++t) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  const std::size_t b = best.load();
  if (b == std::numeric_limits<std::size_t>::max()) return std::nullopt;
  return b;
}

struct Chunk {
  std::int64_t support;
  std::vector<std::int64_t> supporting_counts;
};

/// Scans profiles with n voters and B-support s for chunks in `chunks`,
/// stopping at the earliest chunk that holds a violating profile.
class ProfileScanner {
 public:
  ProfileScanner(const Rule& rule, int m, int k, const SearchBudget& budget)
      : rule_(rule), m_(m), k_(k), split_(split_types(m, k)), budget_(budget) {}

  std::optional<Violation> scan(std::int64_t n, const std::vector<Chunk>& chunks) {
    std::vector<std::optional<Violation>> found(chunks.size());
    auto hit = first_hit(chunks.size(), worker_count(budget_), [&](std::size_t i) {
      const Chunk& ch = chunks[i];
      std::vector<Ballot> base;
      for (std::size_t j = 0; j < ch.supporting_counts.size(); ++j) {
        if (ch.supporting_counts[j] > 0) base.push_back({ch.supporting_counts[j], split_.supporting[j]});
      }
      std::uint64_t local = 0;
      for_each_composition(n - ch.support, split_.other.size(), [&](const std::vector<std::int64_t>& oc) {
        std::vector<Ballot> ballots = base;
        for (std::size_t j = 0; j < oc.size(); ++j) {
          if (oc[j] > 0) ballots.push_back({oc[j], split_.other[j]});
        }
        Profile p(m_, std::move(ballots));
        ++local;
        const ChoiceSet w = winners(rule_, p);
        if (!w.is_subset_of(CandidateSet::all(k_))) {
          found[i] = Violation{CandidateSet::all(k_), ch.support, w, std::move(p)};
          return false;
        }
        return true;
      });
      checked_ += local;
      if (budget_.max_profiles > 0 && checked_.load() > budget_.max_profiles) capped_ = true;
      return found[i].has_value();
    });
    if (hit) return found[*hit];
    return std::nullopt;
  }

  /// Chunks for one (n, s) pair: one per composition of the supporters.
  std::vector<Chunk> chunks_for(std::int64_t s) const {
    std::vector<Chunk> out;
    for_each_composition(s, split_.supporting.size(), [&](const std::vector<std::int64_t>& c) {
      out.push_back({s, c});
      return true;
    });
    return out;
  }

  std::uint64_t checked() const { return checked_.load(); }
  bool capped() const { return capped_.load(); }

 private:
  Rule rule_;
  int m_;
  int k_;
  TypeSplit split_;
  SearchBudget budget_;
  std::atomic<std::uint64_t> checked_{0};
  std::atomic<bool> capped_{false};
};

inline void check_search_args(int m, int k, const SearchBudget& budget) {
  if (m < 2 || m > budget.max_candidates) throw std::invalid_argument("m outside the search budget");
  if (k < 1 || k >= m) throw std::invalid_argument("need 1 <= k < m");
  if (budget.max_voters < 1) throw std::invalid_argument("max_voters must be positive");
}

/// A random profile with n voters of which exactly s support B = {0..k-1}.
inline Profile sample_profile(const TypeSplit& split, int m, std::int64_t n, std::int64_t s, std::mt19937_64& rng) {
  std::map<std::size_t, std::int64_t> sup;
  std::map<std::size_t, std::int64_t> oth;
  std::uniform_int_distribution<std::size_t> ps(0, split.supporting.size() - 1);
  for (std::int64_t i = 0; i < s; ++i) ++sup[ps(rng)];
  if (n > s) {
    std::uniform_int_distribution<std::size_t> po(0, split.other.size() - 1);
    for (std::int64_t i = s; i < n; ++i) ++oth[po(rng)];
  }
  std::vector<Ballot> ballots;
  for (auto [i, c] : sup) ballots.push_back({c, split.supporting[i]});
  for (auto [i, c] : oth) ballots.push_back({c, split.other[i]});
  return Profile(m, std::move(ballots));
}

}  // namespace detail

/// Searches all anonymous profiles with up to budget.max_voters voters for a
/// violation of the (q,k,m)-majority criterion. By neutrality B is fixed to
/// the first k candidates. Profiles are visited by increasing n, then by
/// decreasing B-support, then by decreasing supporter and non-supporter
/// count vectors, so the reported witness has minimal n. Random samples with
/// more voters follow when budget.samples > 0.
inline SearchReport exhaustive_criterion_search(const Rule& rule, int m, int k, const Exact& q,
                                                SearchBudget budget) {
  detail::check_search_args(m, k, budget);
  if (q.sign() < 0 || q > Exact(1)) throw std::invalid_argument("q must lie in [0, 1]");
  SearchReport report;
  report.partial = apply_env_cap(budget);
  detail::ProfileScanner scanner(rule, m, k, budget);
  for (std::int64_t n = 1; n <= budget.max_voters; ++n) {
    std::vector<detail::Chunk> chunks;
    for (std::int64_t s = n; s >= 0 && exceeds_quota(s, n, q); --s) {
      auto c = scanner.chunks_for(s);
      chunks.insert(chunks.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
    }
    auto v = scanner.scan(n, chunks);
    report.profiles_checked = scanner.checked();
    if (v) {
      report.violation = std::move(v);
      report.voters_covered = static_cast<int>(n - 1);
      return report;
    }
    if (scanner.capped()) {
      report.partial = true;
      report.voters_covered = static_cast<int>(n);
      return report;
    }
    report.voters_covered = static_cast<int>(n);
  }
  if (budget.samples > 0) {
    const auto split = detail::split_types(m, k);
    std::vector<std::optional<Violation>> found(budget.samples);
    auto hit = detail::first_hit(budget.samples, detail::worker_count(budget), [&](std::size_t i) {
      std::mt19937_64 rng(budget.seed * 0x9E3779B97F4A7C15ULL + i);
      std::uniform_int_distribution<std::int64_t> pick_n(budget.max_voters + 1, 2 * budget.max_voters);
      const std::int64_t n = pick_n(rng);
      std::int64_t s_min = n + 1;
      for (std::int64_t s = n; s >= 0 && exceeds_quota(s, n, q); --s) s_min = s;
      if (s_min > n) return false;
      std::uniform_int_distribution<std::int64_t> pick_s(s_min, n);
      const std::int64_t s = pick_s(rng);
      Profile p = detail::sample_profile(split, m, n, s, rng);
      const ChoiceSet w = winners(rule, p);
      if (w.is_subset_of(CandidateSet::all(k))) return false;
      found[i] = Violation{CandidateSet::all(k), s, w, std::move(p)};
      return true;
    });
    report.profiles_checked += budget.samples;
    if (hit) {
      report.violation = found[*hit];
      report.from_sample = true;
    }
  }
  return report;
}

struct EmpiricalQuota {
  Rational share{0};  // largest B-support share among violating profiles
  std::optional<Violation> witness;
  int voters_covered = 0;
  bool partial = false;
};

/// Largest s/n over profiles with up to budget.max_voters voters in which s
/// voters support B = {0..k-1} and the winners still escape B. The witness is
/// the first such profile at the smallest n reaching that share.
inline EmpiricalQuota empirical_quota(const Rule& rule, int m, int k, SearchBudget budget) {
  detail::check_search_args(m, k, budget);
  EmpiricalQuota out;
  out.partial = apply_env_cap(budget);
  detail::ProfileScanner scanner(rule, m, k, budget);
  for (std::int64_t n = 1; n <= budget.max_voters; ++n) {
    for (std::int64_t s = n; s >= 0; --s) {
      if (out.witness && Rational(s, n) <= out.share) break;
      auto v = scanner.scan(n, scanner.chunks_for(s));
      if (v) {
        out.share = Rational(s, n);
        out.witness = std::move(v);
        break;
      }
      if (scanner.capped()) {
        out.partial = true;
        return out;
      }
    }
    out.voters_covered = static_cast<int>(n);
  }
  return out;
}

/// A uniformly random profile: n voters, each on a uniform random ranking.
inline Profile random_profile(int m, std::int64_t n, std::mt19937_64& rng) {
  const auto types = all_rankings(m);
  std::uniform_int_distribution<std::size_t> pick(0, types.size() - 1);
  std::map<std::size_t, std::int64_t> counts;
  for (std::int64_t i = 0; i < n; ++i) ++counts[pick(rng)];
  std::vector<Ballot> ballots;
  for (auto [i, c] : counts) ballots.push_back({c, types[i]});
  return Profile(m, std::move(ballots));
}

}  // namespace votelab
