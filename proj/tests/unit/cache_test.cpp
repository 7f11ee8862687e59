#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "qmine/cache.hpp"
#include "qmine/errors.hpp"
#include "qmine/oracle.hpp"
#include "testing.hpp"

namespace qmine {
namespace {

using testing::rule_keys;

TEST(Cache, InsertLookupConflict) {
  KnowledgeCache c;
  c.insert({{Itemset{1, 3}, 2, 1}, {Itemset{4}, 1, 0}});
  EXPECT_EQ(c.lookup(Itemset{1, 3}), Count{2});
  EXPECT_FALSE(c.lookup(Itemset{1}));
  EXPECT_EQ(c.size(), 2u);
  c.insert({{Itemset{1, 3}, 2, 1}});
  EXPECT_EQ(c.size(), 2u);
  EXPECT_THROW(c.insert({{Itemset{1, 3}, 3, 1}}), ConflictError);
}

TEST(Cache, RetrieveFiltersAndSorts) {
  KnowledgeCache c;
  c.insert({{Itemset{3, 5}, 1, 1}, {Itemset{1, 3}, 2, 1}, {Itemset{1, 3, 4}, 1, 1}, {Itemset{3}, 3, 1}});
  SetConjunct sc;
  sc.pos = Itemset{3};
  sc.neg = Itemset{5};
  sc.min_support = 1;
  const auto got = c.retrieve(sc);
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].itemset, (Itemset{1, 3}));
  EXPECT_EQ(got[1].itemset, (Itemset{1, 3, 4}));
  EXPECT_EQ(got[2].itemset, (Itemset{3}));
  sc.min_support = 2;
  EXPECT_EQ(c.retrieve(sc).size(), 2u);
}

TEST(Cache, AddPhiDropsUpperBoundAndDuplicates) {
  KnowledgeCache c;
  c.insert({{Itemset{1}, 4, 2}, {Itemset{1, 2}, 2, 2}});
  SetConjunct r;
  r.pos = Itemset{1};
  r.min_support = 2;
  r.max_support = 5;
  c.add_phi({r, r});
  ASSERT_EQ(c.phi_sets().size(), 1u);
  EXPECT_FALSE(c.phi_sets()[0].region.max_support);
  EXPECT_EQ(c.phi_sets()[0].cached_count, 2u);
  r.max_support.reset();
  c.add_phi({r});
  EXPECT_EQ(c.phi_sets().size(), 1u);
}

TEST(Cache, SnapshotRoundTrip) {
  KnowledgeCache c;
  c.insert({{Itemset{1, 3}, 2, 1}, {Itemset{}, 3, 0}, {Itemset{7, 9, 12}, 1, 1}});
  SetConjunct r;
  r.pos = Itemset{1};
  r.neg = Itemset{5, 6};
  r.min_support = 1;
  c.add_phi({r});
  std::ostringstream first;
  c.save(first);
  std::istringstream in(first.str());
  const KnowledgeCache loaded = KnowledgeCache::load(in);
  EXPECT_EQ(loaded, c);
  std::ostringstream second;
  loaded.save(second);
  EXPECT_EQ(second.str(), first.str());
}

TEST(Cache, SnapshotRejectsGarbage) {
  std::istringstream no_header("[cache]\n");
  EXPECT_THROW(KnowledgeCache::load(no_header), FormatError);
  std::istringstream bad("qmine-snapshot 1\n[cache]\n1 x\t2\t1\n");
  EXPECT_THROW(KnowledgeCache::load(bad), FormatError);
}

TEST(Cache, PhiMineIsDisjointComplement) {
  std::mt19937_64 rng(21);
  const auto sets = testing::all_itemsets(4);
  for (int round = 0; round < 100; ++round) {
    auto regions_of = [&](const std::string& text) {
      try {
        return mining_regions(to_disjoint_dnf(parse_query(text)));
      } catch (const EmptyQuery&) {
        return std::vector<SetConjunct>{};
      }
    };
    const auto phi = regions_of(testing::random_query(rng, 4, 2, 4));
    std::vector<PhiDisjunct> known;
    for (const auto& r : regions_of(testing::random_query(rng, 4, 2, 4))) known.push_back({r, 1});
    const std::size_t keep = round % 3;
    const auto mine = compute_phi_mine(phi, known, keep);
    for (const auto& z : sets) {
      for (Count s = 0; s <= 5; ++s) {
        bool in_phi = false;
        for (const auto& p : phi) in_phi = in_phi || eval_set(p, z, s);
        bool in_known = false;
        for (std::size_t k = 0; k < std::min(keep, known.size()); ++k)
          in_known = in_known || eval_set(known[k].region, z, s);
        int hits = 0;
        for (const auto& m : mine) hits += eval_set(m, z, s);
        ASSERT_LE(hits, 1);
        ASSERT_EQ(hits == 1, in_phi && !in_known);
      }
    }
  }
}

struct Session3 {
  TransactionDB db;
  KnowledgeCache cache;
  std::vector<CountedSet> trace;
};

TEST(Incremental, MatchesOracleAndNeverRecounts) {
  std::mt19937_64 rng(22);
  for (int s = 0; s < 20; ++s) {
    Session3 sess{testing::random_db(rng, 7, 25), {}, {}};
    std::set<Itemset> seen;
    for (int qi = 0; qi < 8; ++qi) {
      const std::string text = testing::random_query(rng, 7, 1 + qi % 4, 5);
      const QueryExpr q = parse_query(text);
      IncrementalOptions options;
      options.mine.trace = &sess.trace;
      sess.trace.clear();
      std::vector<AssociationRule> got;
      try {
        got = incremental_mine(sess.db, to_disjoint_dnf(q), sess.cache, options).rules;
      } catch (const EmptyQuery&) {
      }
      ASSERT_EQ(rule_keys(got), rule_keys(oracle::brute_force_rules(sess.db, q, 1))) << text;
      for (const auto& c : sess.trace) ASSERT_TRUE(seen.insert(c.items).second) << "recounted " << c.items;
      for (const auto& e : sess.cache.entries()) {
        Count n = 0;
        for (const auto& t : sess.db.transactions()) n += e.itemset.is_subset_of(t);
        ASSERT_EQ(e.support, n);
      }
      for (const auto& phi : sess.cache.phi_sets()) {
        for (const auto& [z, n] : oracle::brute_force_frequent(sess.db, std::max<Count>(1, phi.region.min_support)))
          if (eval_set(phi.region, z, n)) ASSERT_TRUE(sess.cache.lookup(z)) << phi.region.to_string() << " " << z;
      }
    }
  }
}

TEST(Incremental, RepeatedQueryCountsNothing) {
  const TransactionDB db = testing::example_db();
  KnowledgeCache cache;
  const auto plan = to_disjoint_dnf(parse_query(testing::kExampleQuery));
  const QueryResult first = incremental_mine(db, plan, cache);
  EXPECT_GT(first.stats.candidates_counted, 0u);
  const QueryResult second = incremental_mine(db, plan, cache);
  EXPECT_EQ(second.stats.candidates_counted + second.stats.aux_counted, 0u);
  EXPECT_EQ(second.stats.db_passes, 0u);
  EXPECT_EQ(rule_keys(second.rules), rule_keys(first.rules));
}

}  // namespace
}  // namespace qmine
