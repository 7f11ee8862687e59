#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmine/cache.hpp"
#include "qmine/dataset.hpp"
#include "qmine/miner.hpp"
#include "qmine/plan.hpp"

namespace qmine {

enum class Strategy { integrated, postprocess, incremental };

std::string_view to_string(Strategy s);
/// Accepts "integrated", "post", "postprocess" and "incremental".
std::optional<Strategy> parse_strategy(std::string_view text);

struct SessionConfig {
  Strategy strategy = Strategy::integrated;
  Count floor_support = 1;
  Ratio default_confidence{};
  /// Frequent-set budget of the post-processing materialization.
  std::size_t materialize_budget = 2'000'000;
  /// φ_sets disjuncts kept when computing φ_mine.
  std::size_t phi_keep = 8;
  unsigned threads = 1;
  std::optional<std::chrono::milliseconds> timeout;
  bool sort_by_support = true;
};

struct QueryStats {
  std::string query_text;
  double wall_ms = 0;
  /// wall_ms minus rule generation and sorting: the cost of producing the
  /// itemsets and supports the rules are built from.
  double sets_ms = 0;
  Count candidates = 0;  // itemsets counted against the data, auxiliary ones included
  Count db_passes = 0;
  Count rules = 0;
  Count cache_hits = 0;
};

struct QueryAnswer {
  std::vector<AssociationRule> rules;  // sort_rules order
  QueryStats stats;
};

/// One interactive mining session over a fixed database. Not thread-safe;
/// callers serialize access.
class Session {
 public:
  /// Post-processing sessions materialize all frequent sets here. Throws
  /// ParamError on a zero floor and InfeasibleError over budget.
  Session(std::shared_ptr<const TransactionDB> db, SessionConfig config);

  /// Parses, plans and answers one query; the stats are appended to history.
  QueryAnswer run(std::string_view text);

  [[nodiscard]] const TransactionDB& db() const { return *db_; }
  [[nodiscard]] const SessionConfig& config() const { return config_; }
  [[nodiscard]] const std::vector<QueryStats>& history() const { return history_; }
  [[nodiscard]] const KnowledgeCache& cache() const { return cache_; }
  [[nodiscard]] KnowledgeCache& cache() { return cache_; }
  /// Frequent sets at the floor; empty unless post-processing.
  [[nodiscard]] const SupportMap& materialized() const { return materialized_; }
  /// Cost of the opening materialization (zero for other strategies).
  [[nodiscard]] const QueryStats& open_stats() const { return open_stats_; }

  /// Receives every itemset counted against the data from now on.
  void set_trace(std::vector<CountedSet>* trace) { trace_ = trace; }

  [[nodiscard]] PlanDefaults plan_defaults() const;

 private:
  std::shared_ptr<const TransactionDB> db_;
  SessionConfig config_;
  KnowledgeCache cache_;
  SupportMap materialized_;
  std::vector<std::pair<Itemset, Count>> materialized_sorted_;
  QueryStats open_stats_;
  std::vector<QueryStats> history_;
  std::vector<CountedSet>* trace_ = nullptr;

  QueryResult answer_postprocess(const DisjointPlan& plan) const;
};

/// Formats a rule as `{1,4} => {3,8} (support=1, confidence=1.000000)`.
std::string format_rule(const AssociationRule& rule);

}  // namespace qmine
