#pragma once

// Election data model: anonymous preference profiles over strict rankings,
// the tournament and positional matrices derived from them, and the
// Condorcet / majority concepts defined on top of those matrices.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "votelab/exact.hpp"

namespace votelab {

using Candidate = int;
using Ranking = std::vector<Candidate>;  // most preferred first

/// Largest number of candidates a CandidateSet can hold.
inline constexpr int kMaxCandidates = 64;

/// A set of candidate indices stored as a bitmask.
class CandidateSet {
 public:
  constexpr CandidateSet() = default;
  constexpr explicit CandidateSet(std::uint64_t bits) : bits_(bits) {}
  CandidateSet(std::initializer_list<Candidate> cs) {
    for (Candidate c : cs) insert(c);
  }

  static CandidateSet all(int m) {
    return CandidateSet(m >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << m) - 1));
  }
  static CandidateSet single(Candidate c) { return CandidateSet(std::uint64_t{1} << c); }

  void insert(Candidate c) { bits_ |= std::uint64_t{1} << c; }
  void erase(Candidate c) { bits_ &= ~(std::uint64_t{1} << c); }
  bool contains(Candidate c) const { return (bits_ >> c) & 1U; }
  bool empty() const { return bits_ == 0; }
  int size() const { return std::popcount(bits_); }
  std::uint64_t bits() const { return bits_; }

  bool is_subset_of(CandidateSet o) const { return (bits_ & ~o.bits_) == 0; }
  bool intersects(CandidateSet o) const { return (bits_ & o.bits_) != 0; }
  CandidateSet operator|(CandidateSet o) const { return CandidateSet(bits_ | o.bits_); }
  CandidateSet operator&(CandidateSet o) const { return CandidateSet(bits_ & o.bits_); }
  CandidateSet minus(CandidateSet o) const { return CandidateSet(bits_ & ~o.bits_); }

  /// Members in increasing order.
  std::vector<Candidate> members() const {
    std::vector<Candidate> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }
  Candidate first() const { return std::countr_zero(bits_); }

  friend bool operator==(CandidateSet, CandidateSet) = default;
  /// Lexicographic order on the sorted member lists.
  friend bool lex_less(CandidateSet a, CandidateSet b) { return a.members() < b.members(); }

 private:
  std::uint64_t bits_ = 0;
};

/// A choice set returned by a voting rule; never empty for the rules here.
using ChoiceSet = CandidateSet;

struct Ballot {
  std::int64_t count = 0;
  Ranking ranking;

  friend bool operator==(const Ballot&, const Ballot&) = default;
};

class ProfileError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Names "a", "b", ... for up to 26 candidates, then "c1", "c2", ...
inline std::vector<std::string> default_names(int m) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    names.push_back(m <= 26 ? std::string(1, static_cast<char>('a' + i)) : "c" + std::to_string(i + 1));
  }
  return names;
}

/// An anonymous profile: a normalized multiset of strict rankings.
///
/// Ballots are sorted by ranking and duplicates are merged on construction,
/// so two profiles describing the same election compare equal.
class Profile {
 public:
  Profile(std::vector<std::string> names, std::vector<Ballot> ballots)
      : names_(std::move(names)), ballots_(std::move(ballots)) {
    validate_and_normalize();
  }

  /// Profile with default candidate names.
  Profile(int m, std::vector<Ballot> ballots) : Profile(default_names(m), std::move(ballots)) {}

  int num_candidates() const { return static_cast<int>(names_.size()); }
  std::int64_t num_voters() const { return n_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(Candidate c) const { return names_.at(static_cast<std::size_t>(c)); }
  const std::vector<Ballot>& ballots() const { return ballots_; }
  CandidateSet candidates() const { return CandidateSet::all(num_candidates()); }

  std::optional<Candidate> find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return static_cast<Candidate>(i);
    }
    return std::nullopt;
  }

  /// Same ballots under a different labelling of the candidates.
  Profile relabeled(const std::vector<Candidate>& new_index_of) const {
    std::vector<std::string> names(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
      names[static_cast<std::size_t>(new_index_of.at(i))] = names_[i];
    }
    std::vector<Ballot> ballots = ballots_;
    for (Ballot& b : ballots) {
      for (Candidate& c : b.ranking) c = new_index_of[static_cast<std::size_t>(c)];
    }
    return Profile(std::move(names), std::move(ballots));
  }

  friend bool operator==(const Profile&, const Profile&) = default;

 private:
  void validate_and_normalize() {
    const int m = num_candidates();
    if (m < 1) throw ProfileError("profile needs at least one candidate");
    if (m > kMaxCandidates) throw ProfileError("profile supports at most 64 candidates");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (names_[i] == names_[j]) throw ProfileError("duplicate candidate name '" + names_[i] + "'");
      }
    }
    std::map<Ranking, std::int64_t> merged;
    for (const Ballot& b : ballots_) {
      if (b.count < 1) throw ProfileError("ballot count must be positive");
      if (static_cast<int>(b.ranking.size()) != m) {
        throw ProfileError("ranking must list all " + std::to_string(m) + " candidates");
      }
      std::uint64_t seen = 0;
      for (Candidate c : b.ranking) {
        if (c < 0 || c >= m) throw ProfileError("candidate index out of range");
        if ((seen >> c) & 1U) throw ProfileError("candidate ranked twice");
        seen |= std::uint64_t{1} << c;
      }
      merged[b.ranking] += b.count;
    }
    ballots_.clear();
    n_ = 0;
    for (auto& [ranking, count] : merged) {
      ballots_.push_back({count, ranking});
      n_ += count;
    }
    if (n_ < 1) throw ProfileError("profile needs at least one voter");
  }

  std::vector<std::string> names_;
  std::vector<Ballot> ballots_;
  std::int64_t n_ = 0;
};

/// Position of every candidate within a ranking (0 = top).
inline std::vector<int> positions_of(const Ranking& r) {
  std::vector<int> pos(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) pos[static_cast<std::size_t>(r[i])] = static_cast<int>(i);
  return pos;
}

/// h(a, b): number of voters ranking a above b.
class TournamentMatrix {
 public:
  explicit TournamentMatrix(const Profile& p)
      : m_(p.num_candidates()), n_(p.num_voters()), h_(static_cast<std::size_t>(m_ * m_), 0) {
    for (const Ballot& b : p.ballots()) {
      for (int i = 0; i < m_; ++i) {
        for (int j = i + 1; j < m_; ++j) {
          h_[idx(b.ranking[static_cast<std::size_t>(i)], b.ranking[static_cast<std::size_t>(j)])] += b.count;
        }
      }
    }
  }

  int num_candidates() const { return m_; }
  std::int64_t num_voters() const { return n_; }
  std::int64_t operator()(Candidate a, Candidate b) const { return h_[idx(a, b)]; }

  /// a beats b in a pairwise comparison: h(a,b) > n/2.
  bool beats(Candidate a, Candidate b) const { return 2 * (*this)(a, b) > n_; }
  /// a weakly beats b: h(a,b) >= n/2.
  bool weakly_beats(Candidate a, Candidate b) const { return 2 * (*this)(a, b) >= n_; }

  friend bool operator==(const TournamentMatrix&, const TournamentMatrix&) = default;

 private:
  std::size_t idx(Candidate a, Candidate b) const { return static_cast<std::size_t>(a * m_ + b); }

  int m_;
  std::int64_t n_;
  std::vector<std::int64_t> h_;
};

/// n_l(a): number of voters placing candidate a at position l (0 = top).
class PositionalMatrix {
 public:
  explicit PositionalMatrix(const Profile& p)
      : m_(p.num_candidates()), n_(p.num_voters()), counts_(static_cast<std::size_t>(m_ * m_), 0) {
    for (const Ballot& b : p.ballots()) {
      for (int l = 0; l < m_; ++l) counts_[idx(l, b.ranking[static_cast<std::size_t>(l)])] += b.count;
    }
  }

  int num_candidates() const { return m_; }
  std::int64_t num_voters() const { return n_; }
  std::int64_t operator()(int position, Candidate a) const { return counts_[idx(position, a)]; }
  std::int64_t top(Candidate a) const { return (*this)(0, a); }
  std::int64_t bottom(Candidate a) const { return (*this)(m_ - 1, a); }

  friend bool operator==(const PositionalMatrix&, const PositionalMatrix&) = default;

 private:
  std::size_t idx(int l, Candidate a) const { return static_cast<std::size_t>(l * m_ + a); }

  int m_;
  std::int64_t n_;
  std::vector<std::int64_t> counts_;
};

inline TournamentMatrix tournament_matrix(const Profile& p) { return TournamentMatrix(p); }
inline PositionalMatrix positional_matrix(const Profile& p) { return PositionalMatrix(p); }

/// The candidate of `subset` beating every other member strictly, if any.
inline std::optional<Candidate> condorcet_winner(const TournamentMatrix& h, CandidateSet subset) {
  if (subset.empty()) throw std::invalid_argument("condorcet_winner: empty subset");
  for (Candidate b : subset.members()) {
    bool wins = true;
    for (Candidate a : subset.members()) {
      if (a != b && !h.beats(b, a)) {
        wins = false;
        break;
      }
    }
    if (wins) return b;
  }
  return std::nullopt;
}

inline std::optional<Candidate> condorcet_winner(const Profile& p, CandidateSet subset) {
  return condorcet_winner(TournamentMatrix(p), subset);
}
inline std::optional<Candidate> condorcet_winner(const Profile& p) {
  return condorcet_winner(p, p.candidates());
}

inline CandidateSet weak_condorcet_winners(const TournamentMatrix& h, CandidateSet subset) {
  if (subset.empty()) throw std::invalid_argument("weak_condorcet_winners: empty subset");
  CandidateSet out;
  for (Candidate b : subset.members()) {
    bool wins = true;
    for (Candidate a : subset.members()) {
      if (a != b && !h.weakly_beats(b, a)) {
        wins = false;
        break;
      }
    }
    if (wins) out.insert(b);
  }
  return out;
}

inline CandidateSet weak_condorcet_winners(const Profile& p, CandidateSet subset) {
  return weak_condorcet_winners(TournamentMatrix(p), subset);
}
inline CandidateSet weak_condorcet_winners(const Profile& p) {
  return weak_condorcet_winners(p, p.candidates());
}

/// Candidate top-ranked by more than half the voters.
inline std::optional<Candidate> majority_winner(const PositionalMatrix& pm) {
  for (Candidate a = 0; a < pm.num_candidates(); ++a) {
    if (2 * pm.top(a) > pm.num_voters()) return a;
  }
  return std::nullopt;
}
inline std::optional<Candidate> majority_winner(const Profile& p) {
  return majority_winner(PositionalMatrix(p));
}

/// Candidate bottom-ranked by more than half the voters.
inline std::optional<Candidate> majority_loser(const PositionalMatrix& pm) {
  for (Candidate a = 0; a < pm.num_candidates(); ++a) {
    if (2 * pm.bottom(a) > pm.num_voters()) return a;
  }
  return std::nullopt;
}
inline std::optional<Candidate> majority_loser(const Profile& p) {
  return majority_loser(PositionalMatrix(p));
}

/// Projection of every ballot onto `subset`. Surviving candidates keep their
/// relative order and are renumbered in increasing original index.
inline Profile restrict_profile(const Profile& p, CandidateSet subset) {
  if (subset.empty()) throw std::invalid_argument("restrict_profile: empty subset");
  if (!subset.is_subset_of(p.candidates())) {
    throw std::invalid_argument("restrict_profile: subset has unknown candidates");
  }
  std::vector<Candidate> new_index(static_cast<std::size_t>(p.num_candidates()), -1);
  std::vector<std::string> names;
  for (Candidate c : subset.members()) {
    new_index[static_cast<std::size_t>(c)] = static_cast<Candidate>(names.size());
    names.push_back(p.name(c));
  }
  std::vector<Ballot> ballots;
  ballots.reserve(p.ballots().size());
  for (const Ballot& b : p.ballots()) {
    Ballot nb{b.count, {}};
    for (Candidate c : b.ranking) {
      if (subset.contains(c)) nb.ranking.push_back(new_index[static_cast<std::size_t>(c)]);
    }
    ballots.push_back(std::move(nb));
  }
  return Profile(std::move(names), std::move(ballots));
}

/// Truncated Borda score B_t(a) = sum over positions l < t of (t - l) * n_l(a),
/// with l counted from 0. B_1 is the plurality count and B_{m-1} the Borda score.
inline Rational truncated_borda(const PositionalMatrix& pm, Candidate a, const Rational& t) {
  if (t.sign() <= 0) throw std::invalid_argument("truncated_borda: t must be positive");
  const std::int64_t whole = t.floor();
  Rational total(0);
  const std::int64_t last = std::min<std::int64_t>(whole, pm.num_candidates() - 1);
  for (std::int64_t l = 0; l <= last; ++l) {
    total += (t - Rational(l)) * Rational(pm(static_cast<int>(l), a));
  }
  return total;
}

inline Rational truncated_borda(const Profile& p, Candidate a, const Rational& t) {
  return truncated_borda(PositionalMatrix(p), a, t);
}

}  // namespace votelab
