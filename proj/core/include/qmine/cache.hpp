#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qmine/dataset.hpp"
#include "qmine/miner.hpp"
#include "qmine/plan.hpp"
#include "qmine/types.hpp"

namespace qmine {

struct CacheEntry {
  Itemset itemset;  // over the original database
  Count support = 0;
  /// Threshold the set was counted against (0 for auxiliary counts).
  Count frequent_at = 0;

  friend bool operator==(const CacheEntry&, const CacheEntry&) = default;
};

/// A region known to be fully mined, with the number of cached sets in it.
struct PhiDisjunct {
  SetConjunct region;
  Count cached_count = 0;

  friend bool operator==(const PhiDisjunct&, const PhiDisjunct&) = default;
};

/// Exactly counted itemsets of a session plus φ_sets, the description of
/// what has been mined so far. Every set satisfying a φ_sets disjunct at or
/// above its min_support is present in the cache.
class KnowledgeCache {
 public:
  /// Upserts; throws ConflictError on a support disagreement.
  void insert(const std::vector<CacheEntry>& entries);
  [[nodiscard]] std::optional<Count> lookup(const Itemset& s) const;
  /// Entries satisfying sc, sorted by itemset.
  [[nodiscard]] std::vector<CacheEntry> retrieve(const SetConjunct& sc) const;
  [[nodiscard]] std::vector<CacheEntry> entries() const;
  [[nodiscard]] std::size_t size() const { return map_.size(); }

  [[nodiscard]] const std::vector<PhiDisjunct>& phi_sets() const { return phi_sets_; }
  /// φ_sets := φ_sets ∨ regions. Upper support bounds are dropped and
  /// regions already listed are skipped.
  void add_phi(const std::vector<SetConjunct>& regions);
  [[nodiscard]] Count recount(const SetConjunct& region) const;

  /// Line format, see README. load(save(c)) saves to the same bytes.
  void save(std::ostream& out) const;
  static KnowledgeCache load(std::istream& in);

  friend bool operator==(const KnowledgeCache& a, const KnowledgeCache& b) {
    return a.entries() == b.entries() && a.phi_sets_ == b.phi_sets_;
  }

 private:
  struct Value {
    Count support;
    Count frequent_at;
  };
  std::unordered_map<Itemset, Value, ItemsetHash> map_;
  std::vector<PhiDisjunct> phi_sets_;
};

/// φ ∧ ¬φ'_sets in disjoint form, where φ'_sets keeps the k disjuncts of
/// φ_sets with the most cached sets.
std::vector<SetConjunct> compute_phi_mine(const std::vector<SetConjunct>& phi, const std::vector<PhiDisjunct>& phi_sets,
                                          std::size_t k);

/// The set-level regions a plan needs, without upper support bounds and made
/// disjoint again.
std::vector<SetConjunct> mining_regions(const DisjointPlan& plan);

struct IncrementalOptions {
  MineOptions mine;
  std::size_t phi_keep = 8;
};

/// Answers a plan from the cache, mining only φ_mine and counting missing
/// body/head sets; records everything counted and extends φ_sets.
QueryResult incremental_mine(const TransactionDB& db, const DisjointPlan& plan, KnowledgeCache& cache,
                             const IncrementalOptions& options = {});

}  // namespace qmine
