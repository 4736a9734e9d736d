#pragma once

// Profile text formats, result documents and the quota tables.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "votelab/criteria.hpp"
#include "votelab/exact.hpp"
#include "votelab/profile.hpp"
#include "votelab/rules.hpp"

namespace votelab {

class ParseError : public ProfileError {
 public:
  ParseError(int line, const std::string& what)
      : ProfileError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class ProfileFormat { native, soc };

struct ParseOptions {
  ProfileFormat format = ProfileFormat::native;
  std::int64_t percent_total = 100;  // voters represented by 100%
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
  if (s.empty() || s.size() > 18) return std::nullopt;
  std::int64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

/// "22", "22.5" -> rational.
inline std::optional<Rational> to_decimal(std::string_view s) {
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) {
    auto v = to_int(s);
    if (!v) return std::nullopt;
    return Rational(*v);
  }
  auto whole = dot == 0 ? std::optional<std::int64_t>(0) : to_int(s.substr(0, dot));
  auto frac = to_int(s.substr(dot + 1));
  if (!whole || !frac) return std::nullopt;
  std::int64_t scale = 1;
  for (std::size_t i = dot + 1; i < s.size(); ++i) scale *= 10;
  return Rational(*whole) + Rational(*frac, scale);
}

struct RawBallot {
  int line;
  Rational count;
  bool percent;
  std::vector<std::string> tokens;
};

inline Profile build_profile(std::optional<int> m, std::vector<std::string> names, std::vector<RawBallot> raw,
                             const ParseOptions& opt) {
  if (raw.empty()) throw ParseError(0, "profile has no ballots");
  if (!m) m = names.empty() ? static_cast<int>(raw.front().tokens.size()) : static_cast<int>(names.size());
  if (*m < 1 || *m > kMaxCandidates) throw ParseError(0, "m must lie between 1 and 64");
  if (names.empty()) names = default_names(*m);
  if (static_cast<int>(names.size()) != *m) {
    throw ParseError(0, "m is " + std::to_string(*m) + " but " + std::to_string(names.size()) + " names given");
  }
  const bool pct = raw.front().percent;
  std::int64_t total = opt.percent_total;
  for (const RawBallot& r : raw) {
    if (r.percent != pct) throw ParseError(r.line, "cannot mix percentages and counts");
    if (r.count.sign() <= 0) throw ParseError(r.line, "count must be positive");
    if (!pct && !r.count.is_integer()) throw ParseError(r.line, "count must be an integer");
    if (pct) {
      const Rational scaled = r.count * Rational(total, 100);
      total *= scaled.den();
    }
  }
  std::vector<Ballot> ballots;
  for (const RawBallot& r : raw) {
    Ballot b;
    b.count = pct ? (r.count * Rational(total, 100)).num() : r.count.num();
    if (static_cast<int>(r.tokens.size()) != *m) {
      throw ParseError(r.line, "ranking lists " + std::to_string(r.tokens.size()) + " candidates, expected " +
                                   std::to_string(*m));
    }
    std::uint64_t seen = 0;
    for (const std::string& tok : r.tokens) {
      std::optional<Candidate> c;
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == tok) c = static_cast<Candidate>(i);
      }
      if (!c) {
        if (auto idx = to_int(tok); idx && *idx >= 1 && *idx <= *m) c = static_cast<Candidate>(*idx - 1);
      }
      if (!c) throw ParseError(r.line, "unknown candidate '" + tok + "'");
      if ((seen >> *c) & 1U) throw ParseError(r.line, "candidate '" + tok + "' ranked twice");
      seen |= std::uint64_t{1} << *c;
      b.ranking.push_back(*c);
    }
    ballots.push_back(std::move(b));
  }
  return Profile(std::move(names), std::move(ballots));
}

inline std::pair<std::string, std::string> split_count(const std::string& line, int lineno) {
  const auto colon = line.find(':');
  if (colon == std::string::npos) throw ParseError(lineno, "expected '<count>: <ranking>'");
  return {trim(std::string_view(line).substr(0, colon)), trim(std::string_view(line).substr(colon + 1))};
}

inline RawBallot raw_ballot(const std::string& line, int lineno, char sep) {
  auto [count_text, ranking] = split_count(line, lineno);
  RawBallot rb{lineno, Rational(0), false, {}};
  if (!count_text.empty() && count_text.back() == '%') {
    rb.percent = true;
    count_text = trim(std::string_view(count_text).substr(0, count_text.size() - 1));
  }
  auto c = to_decimal(count_text);
  if (!c) throw ParseError(lineno, "bad count '" + count_text + "'");
  rb.count = *c;
  if (ranking.find('{') != std::string::npos || ranking.find('=') != std::string::npos) {
    throw ParseError(lineno, "ties are not supported; rankings must be strict");
  }
  rb.tokens = split(ranking, sep);
  for (const std::string& t : rb.tokens) {
    if (t.empty()) throw ParseError(lineno, "empty candidate in ranking");
  }
  return rb;
}

}  // namespace detail

/// Native format:
///   # comment
///   m 4
///   candidates a b c d
///   29: a > b > c > d
/// Candidates may be written by name or by 1-based index. A count ending in
/// '%' is a share; shares are scaled to ParseOptions::percent_total voters,
/// enlarged when needed to keep counts integral.
///
/// SOC format (PrefLib strict complete orders):
///   # ALTERNATIVE NAME 1: a
///   29: 1,2,3,4
inline Profile parse_profile(std::string_view text, const ParseOptions& opt = {}) {
  std::optional<int> m;
  std::vector<std::string> names;
  std::map<int, std::string> soc_names;
  std::vector<detail::RawBallot> raw;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (opt.format == ProfileFormat::soc) {
      if (t.front() == '#') {
        constexpr std::string_view alt = "# ALTERNATIVE NAME ";
        constexpr std::string_view num = "# NUMBER ALTERNATIVES:";
        if (t.rfind(alt, 0) == 0) {
          auto [idx, name] = detail::split_count(t.substr(alt.size()), lineno);
          auto i = detail::to_int(idx);
          if (!i || *i < 1) throw ParseError(lineno, "bad alternative index '" + idx + "'");
          soc_names[static_cast<int>(*i)] = name;
        } else if (t.rfind(num, 0) == 0) {
          auto v = detail::to_int(detail::trim(std::string_view(t).substr(num.size())));
          if (!v) throw ParseError(lineno, "bad alternative count");
          m = static_cast<int>(*v);
        }
        continue;
      }
      raw.push_back(detail::raw_ballot(t, lineno, ','));
      continue;
    }
    if (t.front() == '#') continue;
    if (t.rfind("m ", 0) == 0 || t == "m") {
      auto v = detail::to_int(detail::trim(std::string_view(t).substr(1)));
      if (!v || *v < 1) throw ParseError(lineno, "bad candidate count");
      if (*v > kMaxCandidates) throw ParseError(lineno, "at most 64 candidates are supported");
      m = static_cast<int>(*v);
      continue;
    }
    if (t.rfind("candidates", 0) == 0) {
      std::istringstream ns(t.substr(10));
      std::string name;
      names.clear();
      while (ns >> name) {
        if (std::find(names.begin(), names.end(), name) != names.end()) {
          throw ParseError(lineno, "duplicate candidate name '" + name + "'");
        }
        names.push_back(name);
      }
      if (m && static_cast<int>(names.size()) != *m) {
        throw ParseError(lineno, "m is " + std::to_string(*m) + " but " + std::to_string(names.size()) +
                                     " names given");
      }
      continue;
    }
    raw.push_back(detail::raw_ballot(t, lineno, '>'));
  }
  if (opt.format == ProfileFormat::soc && !soc_names.empty()) {
    const int count = m ? *m : static_cast<int>(soc_names.size());
    names.clear();
    for (int i = 1; i <= count; ++i) {
      auto it = soc_names.find(i);
      names.push_back(it == soc_names.end() ? std::to_string(i) : it->second);
    }
  }
  return detail::build_profile(m, std::move(names), std::move(raw), opt);
}

/// Writes the native format; parse_profile reads it back unchanged.
inline std::string serialize_profile(const Profile& p) {
  std::string out = "m " + std::to_string(p.num_candidates()) + "\ncandidates";
  for (const std::string& n : p.names()) out += " " + n;
  out += "\n";
  for (const Ballot& b : p.ballots()) {
    out += std::to_string(b.count) + ":";
    for (std::size_t i = 0; i < b.ranking.size(); ++i) {
      out += (i ? " > " : " ") + p.name(b.ranking[i]);
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------- documents

enum class OutputFormat { plain, json, csv };

inline OutputFormat parse_output_format(std::string_view s) {
  if (s == "plain") return OutputFormat::plain;
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  throw std::invalid_argument("unknown format '" + std::string(s) + "'");
}

struct TextTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// What every command prints: scalar fields, an optional table and an
/// optional witness profile.
struct ResultDocument {
  std::string command;
  std::vector<std::pair<std::string, std::string>> fields;
  std::optional<TextTable> table;
  std::optional<std::string> profile;  // profile text, e.g. a witness
  int status = 0;                      // process exit code

  void set(std::string key, std::string value) { fields.emplace_back(std::move(key), std::move(value)); }
};

namespace detail {

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_cell(cells[i]);
  return out + "\n";
}

}  // namespace detail

inline std::string render_markdown(const TextTable& t) {
  auto row = [](const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const std::string& c : cells) out += " " + c + " |";
    return out + "\n";
  };
  std::string out = row(t.columns);
  out += "|";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += "---|";
  out += "\n";
  for (const auto& r : t.rows) out += row(r);
  return out;
}

inline nlohmann::ordered_json to_json(const ResultDocument& doc) {
  nlohmann::ordered_json j;
  j["command"] = doc.command;
  j["status"] = doc.status;
  for (const auto& [k, v] : doc.fields) j[k] = v;
  if (doc.table) {
    j["columns"] = doc.table->columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : doc.table->rows) {
      nlohmann::ordered_json o;
      for (std::size_t i = 0; i < r.size() && i < doc.table->columns.size(); ++i) o[doc.table->columns[i]] = r[i];
      rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
  }
  if (doc.profile) j["profile"] = *doc.profile;
  return j;
}

inline std::string render(const ResultDocument& doc, OutputFormat fmt) {
  switch (fmt) {
    case OutputFormat::json: return to_json(doc).dump(2) + "\n";
    case OutputFormat::csv: {
      std::string out;
      if (doc.table) {
        out += detail::csv_row(doc.table->columns);
        for (const auto& r : doc.table->rows) out += detail::csv_row(r);
      } else {
        out += detail::csv_row({"key", "value"});
        for (const auto& [k, v] : doc.fields) out += detail::csv_row({k, v});
        if (doc.profile) out += detail::csv_row({"profile", *doc.profile});
      }
      return out;
    }
    case OutputFormat::plain: {
      std::string out;
      for (const auto& [k, v] : doc.fields) out += k + ": " + v + "\n";
      if (doc.table) {
        if (!doc.fields.empty()) out += "\n";
        out += render_markdown(*doc.table);
      }
      if (doc.profile) {
        if (!out.empty()) out += "\n";
        out += *doc.profile;
      }
      return out;
    }
  }
  return {};
}

// ---------------------------------------------------------------- quota tables

/// Value of a closed-form table cell at parameter x (k or l).
inline Exact formula_value(std::string_view formula, std::int64_t x) {
  using F = std::function<Exact(std::int64_t)>;
  static const std::map<std::string, F, std::less<>> table{
      {"k/(k+1)", [](std::int64_t k) { return Exact(Rational(k, k + 1)); }},
      {"(k-1)/k", [](std::int64_t k) { return Exact(Rational(k - 1, k)); }},
      {"(5k-2)/(8k)", [](std::int64_t k) { return Exact(Rational(5 * k - 2, 8 * k)); }},
      {"(5k^2-2k+1)/(8k^2)", [](std::int64_t k) { return Exact(Rational(5 * k * k - 2 * k + 1, 8 * k * k)); }},
      {"(3k-1)/(4k)", [](std::int64_t k) { return Exact(Rational(3 * k - 1, 4 * k)); }},
      {"k/(k+2)", [](std::int64_t k) { return Exact(Rational(k, k + 2)); }},
      {"(3l-4)/(4l-4)", [](std::int64_t l) { return Exact(Rational(3 * l - 4, 4 * l - 4)); }},
      {"(2l+1)/(2l+4)", [](std::int64_t l) { return Exact(Rational(2 * l + 1, 2 * l + 4)); }},
      {"l/(l+1)", [](std::int64_t l) { return Exact(Rational(l, l + 1)); }},
      {"(3l-1)/(4l)", [](std::int64_t l) { return Exact(Rational(3 * l - 1, 4 * l)); }},
      {"(-7+3l+sqrt(17-10l+9l^2))/(8l-8)",
       [](std::int64_t l) {
         return Exact(Rational(-7 + 3 * l, 8 * l - 8), Rational(1, 8 * l - 8), 17 - 10 * l + 9 * l * l);
       }},
  };
  auto it = table.find(formula);
  if (it == table.end()) throw std::invalid_argument("unknown formula '" + std::string(formula) + "'");
  return it->second(x);
}

struct TableRow {
  std::string label;
  Rule rule;
  int parity = 0;       // 1: odd k only, 2: even k only
  std::string formula;  // closed form for the general column, if any
};

namespace detail {

inline Rule R(std::string_view id) { return Rule::parse(id); }

inline std::vector<TableRow> majority_rows(bool long_names) {
  return {
      {"Instant-runoff", R("irv"), 0, ""},
      {"CLR (even k)", R("clr"), 2, "(5k-2)/(8k)"},
      {"CLR (odd k)", R("clr"), 1, "(5k^2-2k+1)/(8k^2)"},
      {"Convex median", R("convexmedian"), 0, "(3k-1)/(4k)"},
      {long_names ? "Plurality with runoff" : "RV", R("runoff"), 0, "k/(k+2)"},
      {"Simpson's", R("simpson"), 0, "(k-1)/k"},
      {"Young's", R("young"), 0, "(k-1)/k"},
      {"Plurality", R("plurality"), 0, "k/(k+1)"},
      {"Black's", R("black"), 0, ""},
      {"Proportional veto", R("vetocore"), 0, ""},
      {"Borda", R("borda"), 0, ""},
      {"Inverse plurality", R("antiplurality"), 0, ""},
  };
}

inline std::vector<TableRow> veto_rows(bool half) {
  std::vector<TableRow> rows{
      {"Instant-runoff", R("irv"), 0, ""},
      {half ? "Condorcet least-reversal" : "Condorcet least reversal", R("clr"), 0, ""},
      {"Convex median", R("convexmedian"), 0, half ? "(-7+3l+sqrt(17-10l+9l^2))/(8l-8)" : "(3l-4)/(4l-4)"},
      {"Black's", R("black"), 0, half ? "(3l-1)/(4l)" : "(2l+1)/(2l+4)"},
      {"Proportional veto", R("vetocore"), 0, half ? "" : "l/(l+1)"},
      {"Borda", R("borda"), 0, half ? "(3l-1)/(4l)" : "l/(l+1)"},
      {"Inverse plurality", R("antiplurality"), 0, ""},
      {"Plurality with runoff", R("runoff"), 0, ""},
      {"Simpson's", R("simpson"), 0, ""},
      {"Young's", R("young"), 0, ""},
      {"Plurality", R("plurality"), 0, ""},
  };
  if (half) std::rotate(rows.begin(), rows.begin() + 4, rows.begin() + 5);
  return rows;
}

}  // namespace detail

/// Rows of quota table 3, 4, 5 or 6, in print order.
inline std::vector<TableRow> table_rows(int which) {
  switch (which) {
    case 3: return detail::majority_rows(false);
    case 4: {
      auto rows = detail::majority_rows(true);
      rows.erase(rows.begin() + 2);  // one CLR row
      rows[1] = {"Condorcet least-reversal", detail::R("clr"), 0, ""};
      for (auto& r : rows) r.formula.clear();
      return rows;
    }
    case 5: return detail::veto_rows(false);
    case 6: return detail::veto_rows(true);
    default: throw std::invalid_argument("tables are 3, 4, 5 or 6");
  }
}

/// Regenerates a quota table from the closed-form calculators.
inline ResultDocument emit_table(int which) {
  ResultDocument doc;
  doc.command = "tables";
  TextTable t;
  const auto rows = table_rows(which);
  if (which == 4) {
    t.columns = {"Voting rule", "m=3, k=1", "m=3, k=2", "m=4, k=1", "m=4, k=2", "m=4, k=3"};
    const std::pair<int, int> mk[] = {{3, 1}, {3, 2}, {4, 1}, {4, 2}, {4, 3}};
    for (const TableRow& r : rows) {
      std::vector<std::string> cells{r.label};
      for (auto [m, k] : mk) cells.push_back(quota_majority(r.rule, k, m).decimal());
      t.rows.push_back(std::move(cells));
    }
  } else {
    const bool veto = which != 3;
    const bool half = which == 6;
    const std::string x = veto ? "l" : "k";
    t.columns = {"Voting rule", x + "=1", x + "=2", x + "=3", x + "=4", veto ? "l>3" : "k>1", "sup_" + x + " q"};
    for (const TableRow& r : rows) {
      std::vector<std::string> cells{r.label};
      for (int v = 1; v <= 4; ++v) {
        if (r.parity != 0 && (v % 2 == 1) != (r.parity == 1)) {
          cells.emplace_back();
          continue;
        }
        cells.push_back((veto ? quota_veto_sup(r.rule, v, half) : quota_majority_sup(r.rule, v)).decimal());
      }
      if (!r.formula.empty()) {
        cells.push_back(r.formula);
      } else {
        cells.push_back((veto ? quota_veto_sup(r.rule, 5, half) : quota_majority_sup(r.rule, 5)).decimal());
      }
      cells.push_back((veto ? quota_veto_sup_all(r.rule, half) : quota_majority_sup_all(r.rule)).decimal());
      t.rows.push_back(std::move(cells));
    }
  }
  doc.table = std::move(t);
  return doc;
}

// ---------------------------------------------------------------- helpers for commands

inline std::string names_of(const Profile& p, CandidateSet s) {
  std::string out;
  for (Candidate c : s.members()) out += (out.empty() ? "" : " ") + p.name(c);
  return out;
}

inline ResultDocument outcome_document(const Rule& rule, const Profile& p, const Outcome& o, bool with_scores) {
  ResultDocument doc;
  doc.command = "winners";
  doc.set("rule", rule.id());
  doc.set("winners", names_of(p, o.winners));
  for (std::size_t i = 0; i < o.report.trace.size(); ++i) doc.set("trace." + std::to_string(i + 1), o.report.trace[i]);
  if (with_scores) {
    TextTable t;
    t.columns = {"candidate", "score", "decimal", "winner"};
    for (Candidate a = 0; a < p.num_candidates(); ++a) {
      const Exact& s = o.report.scores[static_cast<std::size_t>(a)];
      t.rows.push_back({p.name(a), s.str(), s.decimal(), o.winners.contains(a) ? "yes" : "no"});
    }
    doc.table = std::move(t);
  }
  return doc;
}

inline void add_violation(ResultDocument& doc, const Violation& v) {
  const Profile& p = v.witness;
  doc.set("violation.B", names_of(p, v.B));
  doc.set("violation.support", std::to_string(v.support));
  doc.set("violation.voters", std::to_string(p.num_voters()));
  doc.set("violation.winners", names_of(p, v.winners));
  doc.profile = serialize_profile(p);
  doc.status = 1;
}

}  // namespace votelab
