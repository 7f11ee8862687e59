// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any of them fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "qmine/cache.hpp"
#include "qmine/errors.hpp"
#include "qmine/miner.hpp"
#include "qmine/oracle.hpp"
#include "qmine/session.hpp"
#include "qmine/workload.hpp"
#include "testing.hpp"

namespace {

using namespace qmine;
using Clock = std::chrono::steady_clock;

constexpr double kTableMaxSeconds = 1.0;
constexpr int kLemmaPairs = 200;
constexpr int kOracleInstances = 300;
constexpr double kOracleMaxSeconds = 60.0;
constexpr int kDnfQueries = 300;
constexpr int kSessions = 50;
constexpr int kQueriesPerSession = 10;
constexpr std::size_t kCutoffMinSets = 1'000;
constexpr std::size_t kCutoffMaxSets = 10'000;
constexpr int kCutoffQueries = 20;
constexpr double kPostGrowthFraction = 0.10;
constexpr double kCutoffMaxSeconds = 300.0;
constexpr int kTrendQueries = 100;
constexpr double kMinSpearman = 0.5;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<AssociationRule> answer_or_empty(const std::function<std::vector<AssociationRule>()>& f) {
  try {
    return f();
  } catch (const EmptyQuery&) {
    return {};
  }
}

// ---------------------------------------------------------------------------

void golden_table() {
  const auto start = Clock::now();
  const TransactionDB db = testing::example_db();
  const DisjointPlan plan = to_disjoint_dnf(parse_query(testing::kExampleQuery));
  const RuleConjunct& rc = plan.disjuncts.at(0).rule;
  const SetConjunct& sc = plan.disjuncts.at(0).set;
  const MineResult mined = mine_set_conjunct(db, sc);

  std::vector<MinedSet> s0;
  for (const auto& m : mined.sets)
    if (m.frequent) s0.push_back(m);
  std::sort(s0.begin(), s0.end(), [](const MinedSet& a, const MinedSet& b) {
    return a.kernel.size() != b.kernel.size() ? a.kernel.size() < b.kernel.size() : a.kernel < b.kernel;
  });

  std::vector<std::string> rows;
  bool supports_ok = true;
  for (const auto& m : s0) {
    const Itemset s = m.kernel | sc.pos;
    const PersonalitySets fam = personality_families(rc, {{s, m.support}});
    const Itemset b = rc.pos_body | m.kernel;
    const Itemset h = rc.pos_head | m.kernel;
    rows.push_back(m.kernel.to_string() + " " + s.to_string() + " " +
                   (fam.body_sets.contains(b) ? b.to_string() : "-") + " " +
                   (fam.head_sets.contains(h) ? h.to_string() : "-"));
    supports_ok = supports_ok && m.support == (m.kernel.empty() ? 2u : 1u);
  }
  const std::vector<std::string> want{
      "{} {1,3} {1} {3}",         "{2} {1,2,3} - {2,3}",    "{4} {1,3,4} {1,4} -",
      "{6} {1,3,6} {1,6} {3,6}",  "{8} {1,3,8} {1,8} {3,8}", "{2,6} {1,2,3,6} - {2,3,6}",
      "{4,8} {1,3,4,8} {1,4,8} -"};

  // Derived body and head supports must be the exact ones of the database.
  const PersonalitySets ps = derive_body_head_sets(mined.sets, rc, db);
  bool family_supports_ok = true;
  for (const auto* fam : {&ps.body_sets, &ps.head_sets})
    for (const auto& [s, n] : *fam) family_supports_ok = family_supports_ok && n == support_of(db, s);

  const double secs = seconds_since(start);
  const bool ok = rows == want && supports_ok && family_supports_ok && secs < kTableMaxSeconds;
  std::string detail = std::to_string(rows.size()) + " rows";
  if (rows != want) {
    detail += ", got:";
    for (const auto& r : rows) detail += " [" + r + "]";
  }
  detail += supports_ok ? ", S0 supports exact" : ", S0 supports WRONG";
  detail += family_supports_ok ? "" : ", body/head supports WRONG";
  detail += ", " + fmt(secs * 1000) + " ms (limit " + fmt(kTableMaxSeconds * 1000, 0) + " ms)";
  report(ok, "golden-table", detail);
}

// ---------------------------------------------------------------------------

void lemma_cardinality() {
  std::mt19937_64 rng(101);
  int bad = 0;
  for (int i = 0; i < kLemmaPairs; ++i) {
    const std::size_t items = 1 + i % 10;
    const TransactionDB db = testing::random_db(rng, items, 50);
    std::uniform_int_distribution<int> role(0, 3);
    SetConjunct sc;
    std::vector<Item> pos;
    std::vector<Item> neg;
    for (Item it = 0; it < items; ++it) {
      const int r = role(rng);
      if (r == 0) pos.push_back(it);
      if (r == 1) neg.push_back(it);
    }
    sc.pos = Itemset::from_sorted(pos);
    sc.neg = Itemset::from_sorted(neg);
    const ProjectedDB d0 = project_d0(db, sc);
    bad += d0.transactions.size() != support_of(db, sc.pos);
  }
  report(bad == 0, "projection-cardinality",
         std::to_string(kLemmaPairs - bad) + "/" + std::to_string(kLemmaPairs) + " pairs with |D0| == support(Pos)");
}

// ---------------------------------------------------------------------------

void oracle_and_optimality() {
  std::mt19937_64 rng(202);
  const auto start = Clock::now();
  int mismatches = 0;
  Count region_counted = 0;
  Count region_outside = 0;
  Count aux_counted = 0;
  Count aux_unneeded = 0;
  for (int i = 0; i < kOracleInstances; ++i) {
    const std::size_t items = 1 + i % 8;
    const TransactionDB db = testing::random_db(rng, items, 30);
    const std::string text = testing::random_query(rng, items, 1 + i % 3, 6);
    const QueryExpr q = parse_query(text);
    std::vector<CountedSet> trace;
    const auto got = answer_or_empty([&] {
      MineOptions options;
      options.trace = &trace;
      return mine_query(db, to_disjoint_dnf(q), options).rules;
    });
    const auto want = oracle::brute_force_rules(db, q, 1);
    if (testing::rule_keys(got) != testing::rule_keys(want)) {
      if (mismatches == 0) std::cerr << "oracle mismatch on query: " << text << '\n';
      ++mismatches;
    }
    for (const auto& c : trace) {
      if (c.region) {
        ++region_counted;
        region_outside += !c.region->admits_items(c.items);
        continue;
      }
      // Auxiliary counts must be proper parts of a set counted in a region.
      ++aux_counted;
      bool needed = false;
      for (const auto& o : trace) needed = needed || (o.region && c.items.is_subset_of(o.items) && c.items != o.items);
      aux_unneeded += !needed;
    }
  }
  const double secs = seconds_since(start);
  report(mismatches == 0 && secs < kOracleMaxSeconds, "oracle-equivalence",
         std::to_string(kOracleInstances - mismatches) + "/" + std::to_string(kOracleInstances) +
             " instances equal to brute force, " + fmt(secs) + " s (limit " + fmt(kOracleMaxSeconds, 0) + " s)");
  const double pct = region_counted == 0 ? 100.0 : 100.0 * double(region_counted - region_outside) / double(region_counted);
  report(region_outside == 0 && aux_unneeded == 0, "optimality",
         fmt(pct, 2) + "% of " + std::to_string(region_counted) +
             " region candidates satisfy their item literals; " + std::to_string(aux_counted - aux_unneeded) + "/" +
             std::to_string(aux_counted) + " auxiliary counts are parts of region sets");
}

// ---------------------------------------------------------------------------

bool dnf_has_support_below(const QueryExpr& q) {
  for (const auto& lits : to_dnf(q))
    for (const auto& l : lits)
      if (l.atom.kind == AtomKind::support_lt) return true;
  return false;
}

void disjoint_dnf() {
  std::mt19937_64 rng(303);
  const auto sets = testing::all_itemsets(4);
  const Ratio confs[] = {Ratio(0, 1), Ratio(1, 4), Ratio(1, 3), Ratio(1, 2), Ratio(2, 3), Ratio(3, 4), Ratio(1, 1)};
  int inequivalent = 0;
  int overlapping = 0;
  int without_lt = 0;
  int lt_introduced = 0;
  for (int i = 0; i < kDnfQueries; ++i) {
    const std::string text = testing::random_query(rng, 4, 1 + i % 5, 5);
    const QueryExpr q = parse_query(text);
    std::vector<PlannedDisjunct> disjuncts;
    try {
      disjuncts = to_disjoint_dnf(q).disjuncts;
    } catch (const EmptyQuery&) {
    }
    if (!dnf_has_support_below(q)) {
      ++without_lt;
      bool has = false;
      for (const auto& d : disjuncts) has = has || d.rule.max_support.has_value();
      lt_introduced += has;
    }
    bool equal = true;
    bool disjoint = true;
    for (const auto& body : sets) {
      for (const auto& head : sets) {
        if (body.empty() || head.empty() || body.intersects(head)) continue;
        for (Count s = 0; s <= 6; ++s) {
          for (const Ratio& c : confs) {
            int hits = 0;
            for (const auto& d : disjuncts) hits += eval_rule(d.rule, body, head, s, c);
            const bool want = s >= 1 && evaluate(q, RuleFacts{body, head, s, c});
            equal = equal && (hits > 0) == want;
            disjoint = disjoint && hits <= 1;
          }
        }
      }
    }
    inequivalent += !equal;
    overlapping += !disjoint;
  }
  report(inequivalent == 0 && overlapping == 0 && lt_introduced == 0, "disjoint-dnf",
         std::to_string(kDnfQueries - inequivalent) + "/" + std::to_string(kDnfQueries) + " equivalent, " +
             std::to_string(kDnfQueries - overlapping) + "/" + std::to_string(kDnfQueries) + " pairwise disjoint, " +
             std::to_string(lt_introduced) + "/" + std::to_string(without_lt) +
             " plans without `support <` input gained one");
}

// ---------------------------------------------------------------------------

void sessions() {
  std::mt19937_64 rng(404);
  Count duplicates = 0;
  Count counted = 0;
  int more_candidates = 0;
  int disagreements = 0;
  int answered = 0;
  for (int s = 0; s < kSessions; ++s) {
    auto db = std::make_shared<const TransactionDB>(testing::random_db(rng, 10, 80));
    SessionConfig cfg;
    cfg.strategy = Strategy::integrated;
    Session integrated(db, cfg);
    cfg.strategy = Strategy::postprocess;
    Session post(db, cfg);
    cfg.strategy = Strategy::incremental;
    Session incremental(db, cfg);
    std::vector<CountedSet> trace;
    incremental.set_trace(&trace);

    QueryGenerator gen(*db, 1, rng());
    Count cum_integrated = 0;
    Count cum_incremental = 0;
    for (int k = 0; k < kQueriesPerSession; ++k) {
      const std::string text = gen.next();
      std::vector<AssociationRule> answers[3];
      Session* all[3] = {&integrated, &post, &incremental};
      int empty = 0;
      for (int j = 0; j < 3; ++j) {
        try {
          answers[j] = all[j]->run(text).rules;
        } catch (const EmptyQuery&) {
          ++empty;
        }
      }
      if (empty == 0) {
        ++answered;
        cum_integrated += integrated.history().back().candidates;
        cum_incremental += incremental.history().back().candidates;
      }
      const bool agree = (empty == 0 || empty == 3) && testing::rule_keys(answers[0]) == testing::rule_keys(answers[1]) &&
                         testing::rule_keys(answers[0]) == testing::rule_keys(answers[2]);
      if (!agree && disagreements == 0) std::cerr << "strategies disagree on: " << text << '\n';
      disagreements += !agree;
    }
    std::set<Itemset> seen;
    for (const auto& c : trace) duplicates += !seen.insert(c.items).second;
    counted += trace.size();
    if (cum_incremental > cum_integrated) {
      if (more_candidates == 0)
        std::cerr << "session " << s << ": incremental counted " << cum_incremental << " vs integrated "
                  << cum_integrated << '\n';
      ++more_candidates;
    }
  }
  report(duplicates == 0 && more_candidates == 0, "never-regenerate",
         std::to_string(duplicates) + " duplicates among " + std::to_string(counted) + " counted itemsets; " +
             std::to_string(kSessions - more_candidates) + "/" + std::to_string(kSessions) +
             " sessions with cumulative candidates(incremental) <= integrated");
  const int total = kSessions * kQueriesPerSession;
  report(disagreements == 0, "strategy-agreement",
         std::to_string(total - disagreements) + "/" + std::to_string(total) + " queries identical across strategies (" +
             std::to_string(answered) + " satisfiable)");
}

// ---------------------------------------------------------------------------

struct Generated {
  std::shared_ptr<const TransactionDB> db;
  Count floor = 0;
  std::size_t frequent = 0;
};

std::optional<std::size_t> frequent_count(const TransactionDB& db, Count floor) {
  SetConjunct all;
  all.min_support = floor;
  MineOptions options;
  options.max_frequent = kCutoffMaxSets;
  try {
    std::size_t n = 0;
    for (const auto& m : mine_set_conjunct(db, all, options).sets) n += m.frequent;
    return n;
  } catch (const InfeasibleError&) {
    return std::nullopt;
  }
}

// Lowest floor whose frequent sets (empty set included) fit the upper bound.
Generated generated_db() {
  GeneratorParams p;
  p.items = 50;
  p.transactions = 5000;
  p.seed = 2024;
  Generated g;
  g.db = std::make_shared<const TransactionDB>(generate_db(p));
  Count lo = 1;
  Count hi = g.db->size();
  while (lo < hi) {
    const Count mid = lo + (hi - lo) / 2;
    if (frequent_count(*g.db, mid)) hi = mid;
    else lo = mid + 1;
  }
  g.floor = lo;
  g.frequent = frequent_count(*g.db, lo).value_or(0);
  return g;
}

std::vector<std::string> workload(const Generated& g, std::size_t n, std::uint64_t seed, Session& probe,
                                  bool support_atoms) {
  QueryGenerator gen(*g.db, g.floor, seed, 3, support_atoms);
  return generate_queries(gen, n, [&](const std::string& q) {
    try {
      return !probe.run(q).rules.empty();
    } catch (const Error&) {
      return false;
    }
  });
}

// Times are those of producing the itemsets a query needs: rule generation
// costs the same under both strategies and is left out, and every query runs
// at the materialization floor.
void cutoff_shape(const Generated& g, Session& post_probe) {
  const auto start = Clock::now();
  const bool sized = g.frequent >= kCutoffMinSets && g.frequent <= kCutoffMaxSets;
  const auto queries = workload(g, kCutoffQueries, 505, post_probe, false);

  SessionConfig cfg;
  cfg.floor_support = g.floor;
  cfg.strategy = Strategy::integrated;
  Session integrated(g.db, cfg);
  cfg.strategy = Strategy::postprocess;
  Session post(g.db, cfg);
  const double materialize = post.open_stats().sets_ms;

  double cum_int = 0;
  double cum_post = materialize;
  bool increasing = true;
  bool flat = true;
  double worst_growth = 0;
  std::optional<int> crossing;
  for (int i = 0; i < kCutoffQueries; ++i) {
    const double ti = integrated.run(queries[i]).stats.sets_ms;
    const double tp = post.run(queries[i]).stats.sets_ms;
    increasing = increasing && ti > 0;
    cum_int += ti;
    cum_post += tp;
    if (i > 0) {
      worst_growth = std::max(worst_growth, tp);
      flat = flat && tp < kPostGrowthFraction * materialize;
    }
    if (!crossing && cum_int > cum_post) crossing = i + 1;
  }
  const double secs = seconds_since(start);
  const bool ok = sized && increasing && flat && crossing.has_value() && secs < kCutoffMaxSeconds;
  report(ok, "cutoff-shape",
         "floor " + std::to_string(g.floor) + " gives " + std::to_string(g.frequent) + " frequent sets; materialize " +
             fmt(materialize) + " ms, worst later post query " + fmt(worst_growth) + " ms (limit " +
             fmt(kPostGrowthFraction * materialize) + " ms); integrated cumulative " + fmt(cum_int) + " ms vs post " +
             fmt(cum_post) + " ms; crossing at query " + (crossing ? std::to_string(*crossing) : "none") + ", " +
             fmt(secs, 1) + " s");
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx == 0 || syy == 0 ? 0 : sxy / std::sqrt(sxx * syy);
}

void proportionality(const Generated& g, Session& post_probe) {
  const auto queries = workload(g, kTrendQueries, 606, post_probe, true);
  const SupportMap& frequent = post_probe.materialized();

  SessionConfig cfg;
  cfg.floor_support = g.floor;
  Session integrated(g.db, cfg);
  std::vector<double> fraction;
  std::vector<double> millis;
  for (const auto& q : queries) {
    DisjointPlan plan;
    try {
      plan = to_disjoint_dnf(parse_query(q), integrated.plan_defaults());
    } catch (const Error&) {
      continue;
    }
    std::size_t hits = 0;
    for (const auto& [s, n] : frequent)
      for (const auto& t : plan.set_disjuncts)
        if (eval_set(t, s, n)) {
          ++hits;
          break;
        }
    double runs[3];
    for (double& r : runs) r = integrated.run(q).stats.wall_ms;
    std::sort(std::begin(runs), std::end(runs));
    fraction.push_back(static_cast<double>(hits) / static_cast<double>(frequent.size()));
    millis.push_back(runs[1]);
  }
  const double rho = spearman(fraction, millis);
  report(static_cast<int>(fraction.size()) == kTrendQueries && rho >= kMinSpearman, "proportionality",
         "Spearman " + fmt(rho) + " over " + std::to_string(fraction.size()) + " queries (minimum " +
             fmt(kMinSpearman, 2) + ")");
}

}  // namespace

int main() {
#if defined(__GLIBC__)
  // Keep released memory in the process. Otherwise the rule output of one
  // query is handed back to the kernel and the next query's timing includes
  // faulting those pages in again.
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
#endif
  golden_table();
  lemma_cardinality();
  oracle_and_optimality();
  disjoint_dnf();
  sessions();

  const Generated g = generated_db();
  SessionConfig probe_cfg;
  probe_cfg.strategy = Strategy::postprocess;
  probe_cfg.floor_support = g.floor;
  Session probe(g.db, probe_cfg);
  cutoff_shape(g, probe);
  proportionality(g, probe);

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
