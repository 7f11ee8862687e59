#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qmine/dataset.hpp"
#include "qmine/plan.hpp"
#include "qmine/types.hpp"

namespace qmine {

/// A set over D₀. It stands for kernel ∪ Pos over the original database.
struct MinedSet {
  Itemset kernel;
  Count support = 0;
  bool frequent = false;
  /// True when the support was counted in this run rather than looked up.
  bool counted = false;

  friend bool operator==(const MinedSet&, const MinedSet&) = default;
};

struct MinerStats {
  Count candidates_counted = 0;
  Count aux_counted = 0;  // body/head sets counted in the auxiliary scan
  Count db_passes = 0;
  Count cache_hits = 0;

  MinerStats& operator+=(const MinerStats& o) {
    candidates_counted += o.candidates_counted;
    aux_counted += o.aux_counted;
    db_passes += o.db_passes;
    cache_hits += o.cache_hits;
    return *this;
  }
};

using SupportMap = std::unordered_map<Itemset, Count, ItemsetHash>;

/// Exact support of a lifted itemset when already known (e.g. from a cache).
using SupportHook = std::function<std::optional<Count>(const Itemset& lifted)>;

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

/// One itemset counted against the data. region is the set conjunct it was
/// counted for, or empty for auxiliary body/head counts.
struct CountedSet {
  Itemset items;
  std::optional<SetConjunct> region;
};

struct MineOptions {
  SupportHook hook;
  unsigned threads = 1;
  Deadline deadline;
  /// Subsets obtained by dropping Pos items are checked against the hook
  /// only while |Pos| stays at or below this bound.
  std::size_t subset_prune_limit = 10;
  /// When set, receives every lifted itemset counted against the data.
  std::vector<CountedSet>* trace = nullptr;
  /// Throw InfeasibleError once more frequent sets than this are found (0: no limit).
  std::size_t max_frequent = 0;
};

struct MineResult {
  /// Frequent kernels plus every counted infrequent one, sorted by kernel.
  std::vector<MinedSet> sets;
  MinerStats stats;
};

/// Levelwise mining of the region described by sc. The projection D₀ is
/// built lazily, only once some support is not known through the hook.
MineResult mine_set_conjunct(const TransactionDB& db, const SetConjunct& sc, const MineOptions& options = {});

/// Apriori over an existing projection (kernels only, no Pos).
std::vector<MinedSet> apriori_s0(const ProjectedDB& d0, Count min_support, const SupportHook& hook = {});

/// {kernel ∪ Pos → support} for the frequent kernels.
std::map<Itemset, Count> lift_rule_sets(const std::vector<MinedSet>& s0, const SetConjunct& sc);

struct PersonalitySets {
  std::map<Itemset, Count> rule_sets;
  SupportMap body_sets;
  SupportMap head_sets;
};

/// Body and head families of one rule conjunct, supports still unset.
/// Without max_support, rule_sets must be closed under taking subsets that
/// contain Pos, as the sets of one region are.
PersonalitySets personality_families(const RuleConjunct& rc, std::map<Itemset, Count> rule_sets);

/// Fills the body/head supports of every family through `lookup`, counting
/// the remaining ones in a single scan of db. Newly counted supports are
/// appended to `fresh` when given.
void resolve_supports(const std::vector<PersonalitySets*>& families, const SupportHook& lookup, const TransactionDB& db,
                      MinerStats& stats, const MineOptions& options = {},
                      std::vector<std::pair<Itemset, Count>>* fresh = nullptr);

/// Hook view of a support map; the map must outlive the hook.
SupportHook map_lookup(const SupportMap& known);

PersonalitySets derive_body_head_sets(const std::vector<MinedSet>& s0, const RuleConjunct& rc, const TransactionDB& db);

struct AssociationRule {
  Itemset body;
  Itemset head;
  Count support = 0;
  Ratio confidence;
  std::size_t disjunct = 0;

  friend bool operator==(const AssociationRule& a, const AssociationRule& b) {
    return a.body == b.body && a.head == b.head && a.support == b.support && a.confidence == b.confidence;
  }
};

/// Phase 2. Reads supports from ps only; throws MissingSupport otherwise.
std::vector<AssociationRule> generate_rules(const PersonalitySets& ps, const RuleConjunct& rc);

struct QueryResult {
  std::vector<AssociationRule> rules;
  MinerStats stats;
  /// Wall time of the final rule generation step.
  double rules_ms = 0;
};

/// Runs generate_rules for every disjunct of plan and appends to result.
void append_rules(const std::vector<PersonalitySets>& families, const DisjointPlan& plan, QueryResult& result);

/// Integrated constrained mining of a whole plan, results in plan order.
QueryResult mine_query(const TransactionDB& db, const DisjointPlan& plan, const MineOptions& options = {});

/// Counts all sets in one scan over transactions with a prefix tree.
std::vector<Count> count_supports(const std::vector<Itemset>& transactions, const std::vector<Itemset>& sets,
                                  unsigned threads = 1);

/// Confidence, descending support, then body and head.
void sort_rules(std::vector<AssociationRule>& rules);

}  // namespace qmine
