#include <gtest/gtest.h>

#include <random>

#include "qmine/errors.hpp"
#include "qmine/oracle.hpp"
#include "testing.hpp"

namespace qmine {
namespace {

TEST(Oracle, ExampleFrequentSets) {
  const auto sets = oracle::brute_force_frequent(testing::example_db(), 1);
  EXPECT_EQ(sets.size(), 60u);
  EXPECT_EQ(sets.at(Itemset{}), 3u);
  EXPECT_EQ(sets.at(Itemset{3}), 3u);
  EXPECT_EQ(sets.at(Itemset{2, 3, 5, 6}), 2u);
  EXPECT_FALSE(sets.contains(Itemset{4, 9}));
  EXPECT_EQ(oracle::brute_force_frequent(testing::example_db(), 3).size(), 2u);
}

TEST(Oracle, FrequentSetsMatchDirectCounting) {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 20; ++round) {
    const TransactionDB db = testing::random_db(rng, 6, 20);
    const Count min = 1 + round % 3;
    std::map<Itemset, Count> want;
    for (const auto& s : testing::all_itemsets(6)) {
      if (!s.is_subset_of(db.present_items())) continue;
      Count n = 0;
      for (const auto& t : db.transactions()) n += s.is_subset_of(t);
      if (n >= min) want.emplace(s, n);
    }
    EXPECT_EQ(oracle::brute_force_frequent(db, min), want);
  }
}

TEST(Oracle, ExampleRules) {
  const auto rules = oracle::brute_force_rules(testing::example_db(), parse_query(testing::kExampleQuery), 1);
  ASSERT_EQ(rules.size(), 11u);
  EXPECT_EQ(rules.front().body, (Itemset{1}));
  EXPECT_EQ(rules.front().head, (Itemset{3}));
  EXPECT_EQ(rules.front().support, 2u);
}

TEST(Oracle, RefusesWideUniverses) {
  std::vector<Item> wide;
  for (Item i = 0; i <= oracle::kMaxItems; ++i) wide.push_back(i);
  const TransactionDB db({Itemset(wide)});
  EXPECT_THROW(oracle::brute_force_frequent(db, 1), TooLarge);
  EXPECT_THROW(oracle::brute_force_rules(db, parse_query("body(1)"), 1), TooLarge);
}

}  // namespace
}  // namespace qmine
