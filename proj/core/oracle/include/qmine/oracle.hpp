#pragma once

#include <map>
#include <vector>

#include "qmine/dataset.hpp"
#include "qmine/miner.hpp"
#include "qmine/query.hpp"

namespace qmine::oracle {

/// Largest number of distinct items the enumerations accept.
inline constexpr std::size_t kMaxItems = 20;

/// Every subset of the present items with support >= min_support.
/// Throws TooLarge beyond kMaxItems distinct items.
std::map<Itemset, Count> brute_force_frequent(const TransactionDB& db, Count min_support);

/// Every rule X => Y (disjoint, nonempty) with support(X ∪ Y) >= floor that
/// satisfies q, in sort_rules order.
std::vector<AssociationRule> brute_force_rules(const TransactionDB& db, const QueryExpr& q, Count floor);

}  // namespace qmine::oracle
