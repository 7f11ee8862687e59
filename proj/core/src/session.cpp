#include "qmine/session.hpp"

#include <algorithm>

#include "qmine/errors.hpp"

namespace qmine {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::integrated: return "integrated";
    case Strategy::postprocess: return "postprocess";
    case Strategy::incremental: return "incremental";
  }
  return "";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  if (text == "integrated") return Strategy::integrated;
  if (text == "post" || text == "postprocess") return Strategy::postprocess;
  if (text == "incremental") return Strategy::incremental;
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

Session::Session(std::shared_ptr<const TransactionDB> db, SessionConfig config)
    : db_(std::move(db)), config_(std::move(config)) {
  if (!db_) throw ParamError("session needs a database");
  if (config_.floor_support < 1) throw ParamError("floor support must be at least 1");
  if (config_.strategy != Strategy::postprocess) return;

  const auto start = Clock::now();
  SetConjunct everything;
  everything.min_support = config_.floor_support;
  MineOptions options;
  options.threads = config_.threads;
  options.max_frequent = config_.materialize_budget;
  options.trace = trace_;
  const MineResult mined = mine_set_conjunct(*db_, everything, options);
  for (const auto& m : mined.sets) {
    if (!m.frequent) continue;
    materialized_.emplace(m.kernel, m.support);
    materialized_sorted_.emplace_back(m.kernel, m.support);
  }
  open_stats_.query_text = "(materialize)";
  open_stats_.wall_ms = elapsed_ms(start);
  open_stats_.sets_ms = open_stats_.wall_ms;
  open_stats_.candidates = mined.stats.candidates_counted;
  open_stats_.db_passes = mined.stats.db_passes;
}

PlanDefaults Session::plan_defaults() const {
  PlanDefaults d;
  d.floor_support = config_.floor_support;
  d.default_confidence = config_.default_confidence;
  d.sort_by_support = config_.sort_by_support;
  return d;
}

QueryResult Session::answer_postprocess(const DisjointPlan& plan) const {
  QueryResult result;
  std::vector<PersonalitySets> families;
  families.reserve(plan.disjuncts.size());
  for (const auto& d : plan.disjuncts) {
    std::map<Itemset, Count> rule_sets;
    for (const auto& [s, support] : materialized_sorted_)
      if (eval_set(d.set, s, support)) rule_sets.emplace_hint(rule_sets.end(), s, support);
    families.push_back(personality_families(d.rule, std::move(rule_sets)));
  }
  std::vector<PersonalitySets*> refs;
  for (auto& f : families) refs.push_back(&f);
  MineOptions options;
  options.trace = trace_;
  resolve_supports(refs, map_lookup(materialized_), *db_, result.stats, options);
  append_rules(families, plan, result);
  return result;
}

QueryAnswer Session::run(std::string_view text) {
  const auto start = Clock::now();
  const QueryExpr expr = parse_query(text);
  const DisjointPlan plan = to_disjoint_dnf(expr, plan_defaults());

  MineOptions options;
  options.threads = config_.threads;
  options.trace = trace_;
  if (config_.timeout) options.deadline = start + *config_.timeout;

  QueryResult result;
  switch (config_.strategy) {
    case Strategy::integrated:
      result = mine_query(*db_, plan, options);
      break;
    case Strategy::postprocess:
      if (plan.lowest_explicit_support && *plan.lowest_explicit_support < config_.floor_support)
        throw FloorViolation("support >= " + std::to_string(*plan.lowest_explicit_support) +
                             " lies below the materialization floor " + std::to_string(config_.floor_support));
      result = answer_postprocess(plan);
      break;
    case Strategy::incremental: {
      IncrementalOptions inc;
      inc.mine = options;
      inc.phi_keep = config_.phi_keep;
      result = incremental_mine(*db_, plan, cache_, inc);
      break;
    }
  }

  QueryAnswer answer;
  answer.rules = std::move(result.rules);
  const auto sorting = Clock::now();
  sort_rules(answer.rules);
  answer.stats.query_text = std::string(text);
  answer.stats.wall_ms = elapsed_ms(start);
  answer.stats.sets_ms = std::max(0.0, answer.stats.wall_ms - result.rules_ms - elapsed_ms(sorting));
  answer.stats.candidates = result.stats.candidates_counted + result.stats.aux_counted;
  answer.stats.db_passes = result.stats.db_passes;
  answer.stats.rules = answer.rules.size();
  answer.stats.cache_hits = result.stats.cache_hits;
  history_.push_back(answer.stats);
  return answer;
}

std::string format_rule(const AssociationRule& rule) {
  return rule.body.to_string() + " => " + rule.head.to_string() + " (support=" + std::to_string(rule.support) +
         ", confidence=" + rule.confidence.to_fixed(6) + ")";
}

}  // namespace qmine
