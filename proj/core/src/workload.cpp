#include "qmine/workload.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace qmine {

QueryGenerator::QueryGenerator(const TransactionDB& db, Count floor_support, std::uint64_t seed,
                               std::size_t max_atoms, bool support_atoms)
    : rng_(seed),
      floor_(floor_support),
      max_support_(floor_support),
      max_atoms_(std::max<std::size_t>(1, max_atoms)),
      support_atoms_(support_atoms) {
  std::vector<Itemset> singles;
  for (Item i : db.present_items()) singles.push_back(Itemset{i});
  const auto counts = count_supports(db.transactions(), singles);
  for (std::size_t i = 0; i < singles.size(); ++i) {
    if (counts[i] < floor_support) continue;
    items_.push_back(singles[i][0]);
    max_support_ = std::max(max_support_, counts[i]);
  }
}

std::string QueryGenerator::atom() {
  std::uniform_int_distribution<int> kind(0, 9);
  std::bernoulli_distribution negate(0.25);
  int k = items_.empty() ? 8 : kind(rng_);
  if (!support_atoms_ && (k == 6 || k == 7)) k = items_.empty() ? 8 : k - 6;
  if (k <= 5) {
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    const Item item = items_[pick(rng_)];
    std::string text = (k % 2 == 0 ? "body(" : "head(") + std::to_string(item) + ")";
    return negate(rng_) ? "!" + text : text;
  }
  if (k <= 7) {
    // Thresholds between the floor and the support of the most frequent item.
    const Count span = max_support_ > floor_ ? (max_support_ - floor_) / 2 : 0;
    std::uniform_int_distribution<Count> pick(0, span);
    return "support >= " + std::to_string(floor_ + pick(rng_));
  }
  std::uniform_int_distribution<int> tenth(1, 9);
  const int c = tenth(rng_);
  return (k == 8 ? "confidence >= 0." : "confidence < 0.") + std::to_string(c);
}

std::string QueryGenerator::next() {
  std::uniform_int_distribution<std::size_t> count(1, max_atoms_);
  std::bernoulli_distribution conj(0.7);
  const std::size_t n = count(rng_);
  std::string text = atom();
  for (std::size_t i = 1; i < n; ++i) text += (conj(rng_) ? " & " : " | ") + atom();
  return text;
}

std::vector<std::string> generate_queries(QueryGenerator& gen, std::size_t n,
                                          const std::function<bool(const std::string&)>& accept,
                                          std::size_t retries) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string q = gen.next();
    for (std::size_t r = 0; accept && r < retries && !accept(q); ++r) q = gen.next();
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<BenchRow> run_benchmark(std::shared_ptr<const TransactionDB> db, const std::vector<std::string>& queries,
                                    const std::vector<Strategy>& strategies, const SessionConfig& base) {
  std::vector<BenchRow> rows;
  if (queries.empty()) return rows;
  for (Strategy strategy : strategies) {
    SessionConfig config = base;
    config.strategy = strategy;
    Session session(db, config);
    double cum = 0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const QueryAnswer answer = session.run(queries[i]);
      BenchRow row;
      row.query_index = i + 1;
      row.strategy = strategy;
      row.wall_ms = answer.stats.wall_ms;
      row.candidates = answer.stats.candidates;
      row.db_passes = answer.stats.db_passes;
      row.rules = answer.stats.rules;
      if (i == 0) {
        row.wall_ms += session.open_stats().wall_ms;
        row.candidates += session.open_stats().candidates;
        row.db_passes += session.open_stats().db_passes;
      }
      cum += row.wall_ms;
      row.cum_wall_ms = cum;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "query_index,strategy,wall_ms,cum_wall_ms,candidates,db_passes,rules\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.query_index << ',' << to_string(r.strategy) << ',';
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.3f", r.cum_wall_ms);
    out << buf << ',' << r.candidates << ',' << r.db_passes << ',' << r.rules << '\n';
  }
}

}  // namespace qmine
