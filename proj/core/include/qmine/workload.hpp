#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "qmine/dataset.hpp"
#include "qmine/session.hpp"

namespace qmine {

/// Random rule-queries with at most `max_atoms` atomic conditions over the
/// items that are frequent at the floor. Deterministic for a fixed seed.
/// Without support atoms every query runs at the floor itself.
class QueryGenerator {
 public:
  QueryGenerator(const TransactionDB& db, Count floor_support, std::uint64_t seed, std::size_t max_atoms = 3,
                 bool support_atoms = true);

  std::string next();
  [[nodiscard]] const std::vector<Item>& items() const { return items_; }

 private:
  std::mt19937_64 rng_;
  std::vector<Item> items_;
  Count floor_;
  Count max_support_;
  std::size_t max_atoms_;
  bool support_atoms_;

  std::string atom();
};

/// Draws n queries; a query rejected by `accept` is replaced by a fresh
/// draw, up to `retries` times.
std::vector<std::string> generate_queries(QueryGenerator& gen, std::size_t n,
                                          const std::function<bool(const std::string&)>& accept = {},
                                          std::size_t retries = 50);

struct BenchRow {
  std::size_t query_index = 0;  // 1-based
  Strategy strategy = Strategy::integrated;
  double wall_ms = 0;
  double cum_wall_ms = 0;
  Count candidates = 0;
  Count db_passes = 0;
  Count rules = 0;
};

/// Runs the queries in one fresh session per strategy. The post-processing
/// materialization is charged to its first query.
std::vector<BenchRow> run_benchmark(std::shared_ptr<const TransactionDB> db, const std::vector<std::string>& queries,
                                    const std::vector<Strategy>& strategies, const SessionConfig& base);

/// Header `query_index,strategy,wall_ms,cum_wall_ms,candidates,db_passes,rules`.
void write_csv(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace qmine
