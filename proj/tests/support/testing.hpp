#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "qmine/dataset.hpp"
#include "qmine/miner.hpp"

namespace qmine::testing {

/// Three baskets: {2,3,5,6,9}, {1,2,3,5,6}, {1,3,4,8}.
inline TransactionDB example_db() {
  return TransactionDB({Itemset{2, 3, 5, 6, 9}, Itemset{1, 2, 3, 5, 6}, Itemset{1, 3, 4, 8}}, "example");
}

inline const std::string kExampleQuery =
    "body(1) & !body(2) & head(3) & !head(4) & !body(5) & !head(5) & support >= 1 & confidence >= 50%";

inline TransactionDB random_db(std::mt19937_64& rng, std::size_t items, std::size_t max_transactions,
                               double density = 0.4) {
  std::uniform_int_distribution<std::size_t> count(0, max_transactions);
  std::bernoulli_distribution take(density);
  std::vector<Itemset> txs;
  const std::size_t n = count(rng);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<Item> basket;
    for (Item i = 0; i < items; ++i)
      if (take(rng)) basket.push_back(i);
    txs.emplace_back(std::move(basket));
  }
  return TransactionDB(std::move(txs), "random");
}

/// Random rule-query text with exactly `atoms` atomic conditions.
inline std::string random_query(std::mt19937_64& rng, std::size_t items, std::size_t atoms, Count max_support) {
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<Item> item(0, static_cast<Item>(items - 1));
  std::uniform_int_distribution<Count> supp(1, std::max<Count>(1, max_support));
  std::uniform_int_distribution<int> quarter(0, 4);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution rare(0.2);
  const char* confs[] = {"0", "0.25", "0.5", "75%", "1"};

  auto atom = [&]() -> std::string {
    const int k = kind(rng);
    std::string a;
    if (k < 3) a = "body(" + std::to_string(item(rng)) + ")";
    else if (k < 6) a = "head(" + std::to_string(item(rng)) + ")";
    else if (k < 8) a = std::string(coin(rng) ? "support >= " : "support < ") + std::to_string(supp(rng));
    else a = std::string(coin(rng) ? "confidence >= " : "confidence < ") + confs[quarter(rng)];
    return (k < 6 && coin(rng)) ? "!" + a : a;
  };
  std::function<std::string(std::size_t)> build = [&](std::size_t n) -> std::string {
    if (n == 1) return atom();
    std::uniform_int_distribution<std::size_t> split(1, n - 1);
    const std::size_t k = split(rng);
    std::string e = "(" + build(k) + (coin(rng) ? " & " : " | ") + build(n - k) + ")";
    return rare(rng) ? "!" + e : e;
  };
  return build(atoms);
}

using RuleKey = std::tuple<Itemset, Itemset, Count, Ratio>;

inline std::vector<RuleKey> rule_keys(const std::vector<AssociationRule>& rules) {
  std::vector<RuleKey> out;
  for (const auto& r : rules) out.emplace_back(r.body, r.head, r.support, r.confidence);
  std::sort(out.begin(), out.end());
  return out;
}

/// All itemsets over items {0..n-1}.
inline std::vector<Itemset> all_itemsets(std::size_t n) {
  std::vector<Itemset> out;
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
    std::vector<Item> items;
    for (Item i = 0; i < n; ++i)
      if (m & (std::size_t{1} << i)) items.push_back(i);
    out.push_back(Itemset::from_sorted(std::move(items)));
  }
  return out;
}

}  // namespace qmine::testing
