// votelab: command-line front end.
//
// Exit codes: 0 success, 1 criterion violation found, 2 usage or input error.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "votelab/votelab.hpp"

namespace {

using namespace votelab;

struct FileArgs {
  std::string path;
  bool soc = false;
  std::int64_t percent_total = 100;
};

void add_file(CLI::App* cmd, FileArgs& f) {
  cmd->add_option("file", f.path, "profile file, '-' for stdin")->required();
  cmd->add_flag("--soc", f.soc, "read PrefLib SOC syntax");
  cmd->add_option("--percent-total", f.percent_total, "voters standing for 100%")->check(CLI::PositiveNumber);
}

Profile load(const FileArgs& f) {
  std::string text;
  if (f.path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(f.path);
    if (!in) throw std::invalid_argument("cannot open '" + f.path + "'");
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  ParseOptions opt;
  opt.format = f.soc ? ProfileFormat::soc : ProfileFormat::native;
  opt.percent_total = f.percent_total;
  try {
    return parse_profile(text, opt);
  } catch (const ParseError& e) {
    throw std::invalid_argument(f.path + ": " + e.what());
  }
}

Rational parse_q(const std::string& s) {
  const Exact v = parse_exact(s);
  if (!v.is_rational()) throw std::invalid_argument("--q must be rational");
  return v.rational_part();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voting rules, majority and veto quotas, and criterion search"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "plain";
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"plain", "json", "csv"}));

  std::string rule_id;
  FileArgs file;
  bool scores = false;
  int k = 0;
  int l = 0;
  int m = 0;
  bool half = false;
  bool sup = false;
  int which = 0;
  std::string q_text;
  int max_voters = 0;
  unsigned workers = 0;
  std::uint64_t seed = 1;
  std::uint64_t samples = 0;
  bool empirical = false;
  std::int64_t voters = 0;

  auto* winners_cmd = app.add_subcommand("winners", "winning set of a rule");
  winners_cmd->add_option("--rule", rule_id, "rule id")->required();
  winners_cmd->add_flag("--scores", scores, "print the per-candidate score report");
  add_file(winners_cmd, file);

  auto* matrix_cmd = app.add_subcommand("matrix", "tournament and positional matrices");
  add_file(matrix_cmd, file);

  auto* quota_cmd = app.add_subcommand("quota", "closed-form minimal quota");
  quota_cmd->add_option("--rule", rule_id, "rule id")->required();
  auto* qk = quota_cmd->add_option("--k", k, "size of the preferred set")->check(CLI::PositiveNumber);
  auto* ql = quota_cmd->add_option("--l", l, "size of the vetoed set")->check(CLI::PositiveNumber);
  qk->excludes(ql);
  quota_cmd->add_flag("--half", half, "only l <= m/2 (veto supremum)")->needs(ql);
  auto* qm = quota_cmd->add_option("--m", m, "number of candidates")->check(CLI::PositiveNumber);
  auto* qs = quota_cmd->add_flag("--sup", sup, "supremum over m");
  qm->excludes(qs);

  auto* tables_cmd = app.add_subcommand("tables", "regenerate a quota table");
  tables_cmd->add_option("--which", which, "table number")->required()->check(CLI::IsMember({3, 4, 5, 6}));

  auto* check_cmd = app.add_subcommand("check", "check a criterion on a profile");
  check_cmd->add_option("--rule", rule_id, "rule id")->required();
  check_cmd->add_option("--q", q_text, "quota P/S")->required();
  auto* ck = check_cmd->add_option("--k", k, "size of the preferred set")->check(CLI::PositiveNumber);
  auto* cl = check_cmd->add_option("--l", l, "size of the vetoed set")->check(CLI::PositiveNumber);
  ck->excludes(cl);
  add_file(check_cmd, file);

  auto* verify_cmd = app.add_subcommand("verify", "search small profiles for a violation");
  verify_cmd->add_option("--rule", rule_id, "rule id")->required();
  verify_cmd->add_option("--m", m, "number of candidates")->required()->check(CLI::Range(2, 6));
  verify_cmd->add_option("--k", k, "size of the preferred set")->required()->check(CLI::PositiveNumber);
  verify_cmd->add_option("--q", q_text, "quota P/S or (p+r*sqrt(d))/s")->required();
  verify_cmd->add_option("--max-voters", max_voters, "largest electorate")->required()->check(CLI::PositiveNumber);
  verify_cmd->add_option("--workers", workers, "threads (0: all cores)");
  verify_cmd->add_option("--seed", seed, "seed for random samples");
  verify_cmd->add_option("--samples", samples, "random profiles beyond the exhaustive range");
  verify_cmd->add_flag("--empirical", empirical, "also report the largest violating support share");

  auto* worst_cmd = app.add_subcommand("worstcase", "worst-case profile for a mutual majority");
  worst_cmd->add_option("--m", m, "number of candidates")->required()->check(CLI::PositiveNumber);
  worst_cmd->add_option("--k", k, "size of the preferred set")->required()->check(CLI::PositiveNumber);
  worst_cmd->add_option("--q", q_text, "share P/S")->required();
  worst_cmd->add_option("--voters", voters, "number of voters")->required()->check(CLI::PositiveNumber);

  auto* ktuple_cmd = app.add_subcommand("ktuple", "Condorcet k-tuple profile");
  ktuple_cmd->add_option("--k", k, "cycle length")->required()->check(CLI::PositiveNumber);
  ktuple_cmd->add_option("--voters", voters, "number of voters")->required()->check(CLI::PositiveNumber);

  auto* dom_cmd = app.add_subcommand("dominance", "second-order positional dominance pairs");
  add_file(dom_cmd, file);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const OutputFormat fmt = parse_output_format(format);
    ResultDocument doc;

    if (winners_cmd->parsed()) {
      const Rule rule = Rule::parse(rule_id);
      const Profile p = load(file);
      doc = outcome_document(rule, p, evaluate(rule, p), scores);
    } else if (matrix_cmd->parsed()) {
      const Profile p = load(file);
      const TournamentMatrix h(p);
      const PositionalMatrix pm(p);
      doc.command = "matrix";
      doc.set("voters", std::to_string(p.num_voters()));
      TextTable t;
      t.columns = {"matrix", "row"};
      for (const auto& n : p.names()) t.columns.push_back(n);
      for (Candidate a = 0; a < p.num_candidates(); ++a) {
        std::vector<std::string> row{"tournament", p.name(a)};
        for (Candidate b = 0; b < p.num_candidates(); ++b) row.push_back(a == b ? "-" : std::to_string(h(a, b)));
        t.rows.push_back(std::move(row));
      }
      for (int pos = 0; pos < p.num_candidates(); ++pos) {
        std::vector<std::string> row{"positional", std::to_string(pos + 1)};
        for (Candidate a = 0; a < p.num_candidates(); ++a) row.push_back(std::to_string(pm(pos, a)));
        t.rows.push_back(std::move(row));
      }
      doc.table = std::move(t);
    } else if (quota_cmd->parsed()) {
      const Rule rule = Rule::parse(rule_id);
      if ((k == 0) == (l == 0)) throw std::invalid_argument("give exactly one of --k and --l");
      if ((m == 0) == !sup) throw std::invalid_argument("give exactly one of --m and --sup");
      if (half && !sup) throw std::invalid_argument("--half applies to --sup");
      Quota quota;
      if (k > 0) {
        quota = sup ? quota_majority_sup(rule, k) : quota_majority(rule, k, m);
      } else if (sup) {
        quota = quota_veto_sup(rule, l, half);
      } else {
        if (l >= m) throw std::invalid_argument("need l < m");
        quota = quota_veto(rule, l, m);
      }
      doc.command = "quota";
      doc.set("rule", rule.id());
      doc.set(k > 0 ? "k" : "l", std::to_string(k > 0 ? k : l));
      doc.set("m", sup ? (half ? "sup, l <= m/2" : "sup") : std::to_string(m));
      doc.set("exact", quota.str());
      doc.set("decimal", quota.decimal());
      doc.set("tight", quota.attainable ? "yes" : "no");
    } else if (tables_cmd->parsed()) {
      doc = emit_table(which);
    } else if (check_cmd->parsed()) {
      const Rule rule = Rule::parse(rule_id);
      if ((k == 0) == (l == 0)) throw std::invalid_argument("give exactly one of --k and --l");
      const Profile p = load(file);
      const Exact q(parse_q(q_text));
      const auto v = k > 0 ? check_qk_majority(rule, p, q, k) : check_ql_veto(rule, p, q, l);
      doc.command = "check";
      doc.set("rule", rule.id());
      doc.set("q", q.str());
      doc.set(k > 0 ? "k" : "l", std::to_string(k > 0 ? k : l));
      doc.set("result", v ? "violation" : "pass");
      if (v) {
        doc.set("violation.B", names_of(p, v->B));
        doc.set("violation.support", std::to_string(v->support));
        doc.set("violation.winners", names_of(p, v->winners));
        doc.status = 1;
      }
    } else if (verify_cmd->parsed()) {
      const Rule rule = Rule::parse(rule_id);
      SearchBudget budget;
      budget.max_voters = max_voters;
      budget.max_candidates = 6;
      budget.workers = workers;
      budget.seed = seed;
      budget.samples = samples;
      const Exact q = parse_exact(q_text);
      const SearchReport r = exhaustive_criterion_search(rule, m, k, q, budget);
      doc.command = "verify";
      doc.set("rule", rule.id());
      doc.set("m", std::to_string(m));
      doc.set("k", std::to_string(k));
      doc.set("q", q.str());
      doc.set("voters_covered", std::to_string(r.voters_covered));
      doc.set("profiles_checked", std::to_string(r.profiles_checked));
      doc.set("partial", r.partial ? "yes" : "no");
      doc.set("result", r.violation ? "violation" : "pass");
      if (r.violation) {
        doc.set("from_sample", r.from_sample ? "yes" : "no");
        add_violation(doc, *r.violation);
      }
      if (empirical) {
        const EmpiricalQuota e = empirical_quota(rule, m, k, budget);
        doc.set("empirical", e.share.str());
        doc.set("empirical_decimal", Exact(e.share).decimal());
        if (e.witness) doc.set("empirical_voters", std::to_string(e.witness->witness.num_voters()));
      }
    } else if (worst_cmd->parsed()) {
      doc.command = "worstcase";
      doc.profile = serialize_profile(worst_case_profile(m, k, parse_q(q_text), voters));
    } else if (ktuple_cmd->parsed()) {
      doc.command = "ktuple";
      doc.profile = serialize_profile(condorcet_k_tuple(k, voters));
    } else if (dom_cmd->parsed()) {
      const Profile p = load(file);
      doc.command = "dominance";
      TextTable t;
      t.columns = {"dominant", "dominated"};
      for (auto [a, b] : second_order_dominance(p)) t.rows.push_back({p.name(a), p.name(b)});
      doc.table = std::move(t);
    }

    std::cout << render(doc, fmt);
    return doc.status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
