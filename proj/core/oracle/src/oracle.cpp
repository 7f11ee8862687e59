#include "qmine/oracle.hpp"

#include "qmine/errors.hpp"

namespace qmine::oracle {

namespace {

/// Supports of all subsets of the present items, indexed by bit mask.
struct SubsetSupports {
  std::vector<Item> items;
  std::vector<Count> support;

  explicit SubsetSupports(const TransactionDB& db) {
    const Itemset& present = db.present_items();
    if (present.size() > kMaxItems)
      throw TooLarge(std::to_string(present.size()) + " distinct items exceed the limit of " +
                     std::to_string(kMaxItems));
    items.assign(present.begin(), present.end());
    const std::size_t n = items.size();
    support.assign(std::size_t{1} << n, 0);
    for (const auto& t : db.transactions()) ++support[mask_of(t)];
    // Superset sums: support[m] = number of transactions whose mask ⊇ m.
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t m = 0; m < support.size(); ++m)
        if (!(m & (std::size_t{1} << b))) support[m] += support[m | (std::size_t{1} << b)];
  }

  [[nodiscard]] std::size_t mask_of(const Itemset& s) const {
    std::size_t m = 0;
    for (std::size_t b = 0; b < items.size(); ++b)
      if (s.contains(items[b])) m |= std::size_t{1} << b;
    return m;
  }

  [[nodiscard]] Itemset set_of(std::size_t m) const {
    std::vector<Item> out;
    for (std::size_t b = 0; b < items.size(); ++b)
      if (m & (std::size_t{1} << b)) out.push_back(items[b]);
    return Itemset::from_sorted(std::move(out));
  }
};

}  // namespace

std::map<Itemset, Count> brute_force_frequent(const TransactionDB& db, Count min_support) {
  const SubsetSupports all(db);
  std::map<Itemset, Count> out;
  for (std::size_t m = 0; m < all.support.size(); ++m)
    if (all.support[m] >= min_support) out.emplace(all.set_of(m), all.support[m]);
  return out;
}

std::vector<AssociationRule> brute_force_rules(const TransactionDB& db, const QueryExpr& q, Count floor) {
  const SubsetSupports all(db);
  std::vector<AssociationRule> out;
  for (std::size_t z = 1; z < all.support.size(); ++z) {
    const Count sz = all.support[z];
    if (sz < floor || sz == 0) continue;
    const Itemset zset = all.set_of(z);
    // Proper nonempty sub-masks of z are the bodies.
    for (std::size_t x = (z - 1) & z; x != 0; x = (x - 1) & z) {
      const Itemset body = all.set_of(x);
      const Itemset head = zset - body;
      const Ratio conf(sz, all.support[x]);
      if (evaluate(q, RuleFacts{body, head, sz, conf})) out.push_back({body, head, sz, conf, 0});
    }
  }
  sort_rules(out);
  return out;
}

}  // namespace qmine::oracle
