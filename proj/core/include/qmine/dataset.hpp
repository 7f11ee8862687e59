#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qmine/plan.hpp"
#include "qmine/types.hpp"

namespace qmine {

/// In-memory transaction database. Immutable after construction apart from
/// the scan counter, which records every full pass over the transactions.
class TransactionDB {
 public:
  TransactionDB() = default;
  TransactionDB(std::vector<Itemset> transactions, std::string name = {});
  TransactionDB(const TransactionDB& other);
  TransactionDB& operator=(const TransactionDB& other);
  TransactionDB(TransactionDB&& other) noexcept;
  TransactionDB& operator=(TransactionDB&& other) noexcept;

  [[nodiscard]] const std::vector<Itemset>& transactions() const { return transactions_; }
  [[nodiscard]] std::size_t size() const { return transactions_.size(); }
  /// Max item id + 1 (0 for an empty database).
  [[nodiscard]] std::size_t item_universe() const { return item_universe_; }
  /// Items that occur in at least one transaction.
  [[nodiscard]] const Itemset& present_items() const { return present_; }
  [[nodiscard]] const std::string& name() const { return name_; }

  [[nodiscard]] std::uint64_t scan_count() const { return scans_.load(std::memory_order_relaxed); }
  void note_scan() const { scans_.fetch_add(1, std::memory_order_relaxed); }

  friend bool operator==(const TransactionDB& a, const TransactionDB& b) { return a.transactions_ == b.transactions_; }

 private:
  std::vector<Itemset> transactions_;
  std::size_t item_universe_ = 0;
  Itemset present_;
  std::string name_;
  mutable std::atomic<std::uint64_t> scans_{0};
};

/// D₀ for a set conjunct: the transactions containing Pos, with Pos ∪ Neg removed.
struct ProjectedDB {
  const TransactionDB* base = nullptr;
  Itemset pos;
  Itemset neg;
  std::vector<Itemset> transactions;
  Itemset present;  // items occurring in the projected transactions
};

/// One transaction per line, whitespace-separated non-negative integers.
/// Duplicates are merged; blank lines are empty transactions.
TransactionDB load_db(const std::filesystem::path& path);
TransactionDB parse_db(std::istream& in, std::string name = {});
TransactionDB parse_db_text(const std::string& text, std::string name = {});
void write_db(const TransactionDB& db, std::ostream& out);

struct GeneratorParams {
  std::size_t items = 50;
  std::size_t transactions = 1000;
  std::size_t avg_len = 10;
  std::uint64_t seed = 1;
  /// Exponent of the Zipf-like item popularity.
  double skew = 1.0;
};

/// Deterministic synthetic basket data: Poisson transaction lengths and
/// Zipf-skewed item popularity. Throws ParamError on avg_len > items.
TransactionDB generate_db(const GeneratorParams& params);

ProjectedDB project_d0(const TransactionDB& db, const SetConjunct& sc);

Count support_of(const TransactionDB& db, const Itemset& s);
Count support_of(const ProjectedDB& d0, const Itemset& s);

}  // namespace qmine
