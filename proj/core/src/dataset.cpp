#include "qmine/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "qmine/errors.hpp"

namespace qmine {

namespace {

Itemset collect_present(const std::vector<Itemset>& transactions) {
  std::vector<Item> all;
  for (const auto& t : transactions) all.insert(all.end(), t.begin(), t.end());
  return Itemset(std::move(all));
}

}  // namespace

TransactionDB::TransactionDB(std::vector<Itemset> transactions, std::string name)
    : transactions_(std::move(transactions)), name_(std::move(name)) {
  present_ = collect_present(transactions_);
  item_universe_ = present_.empty() ? 0 : static_cast<std::size_t>(present_.back()) + 1;
}

TransactionDB::TransactionDB(const TransactionDB& other)
    : transactions_(other.transactions_),
      item_universe_(other.item_universe_),
      present_(other.present_),
      name_(other.name_) {}

TransactionDB& TransactionDB::operator=(const TransactionDB& other) {
  if (this != &other) {
    transactions_ = other.transactions_;
    item_universe_ = other.item_universe_;
    present_ = other.present_;
    name_ = other.name_;
    scans_.store(0);
  }
  return *this;
}

TransactionDB::TransactionDB(TransactionDB&& other) noexcept
    : transactions_(std::move(other.transactions_)),
      item_universe_(other.item_universe_),
      present_(std::move(other.present_)),
      name_(std::move(other.name_)),
      scans_(other.scans_.load()) {}

TransactionDB& TransactionDB::operator=(TransactionDB&& other) noexcept {
  transactions_ = std::move(other.transactions_);
  item_universe_ = other.item_universe_;
  present_ = std::move(other.present_);
  name_ = std::move(other.name_);
  scans_.store(other.scans_.load());
  return *this;
}

TransactionDB parse_db(std::istream& in, std::string name) {
  std::vector<Itemset> transactions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<Item> items;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      if (std::isspace(static_cast<unsigned char>(*p))) {
        ++p;
        continue;
      }
      const char* tok = p;
      while (p < end && !std::isspace(static_cast<unsigned char>(*p))) ++p;
      Item value = 0;
      auto [ptr, ec] = std::from_chars(tok, p, value);
      if (ec != std::errc{} || ptr != p)
        throw FormatError(line_no, "invalid item token '" + std::string(tok, p) + "'");
      items.push_back(value);
    }
    transactions.emplace_back(std::move(items));
  }
  return TransactionDB(std::move(transactions), std::move(name));
}

TransactionDB parse_db_text(const std::string& text, std::string name) {
  std::istringstream in(text);
  return parse_db(in, std::move(name));
}

TransactionDB load_db(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  auto db = parse_db(in, path.filename().string());
  if (in.bad()) throw IoError("read failure on " + path.string());
  return db;
}

void write_db(const TransactionDB& db, std::ostream& out) {
  for (const auto& t : db.transactions()) {
    bool first = true;
    for (Item i : t) {
      if (!first) out << ' ';
      out << i;
      first = false;
    }
    out << '\n';
  }
}

TransactionDB generate_db(const GeneratorParams& params) {
  if (params.avg_len > params.items) throw ParamError("avg_len exceeds the number of items");
  if (params.skew < 0) throw ParamError("skew must be non-negative");
  std::vector<Itemset> transactions;
  transactions.reserve(params.transactions);
  if (params.items == 0) {
    transactions.resize(params.transactions);
    return TransactionDB(std::move(transactions), "generated");
  }

  std::vector<double> weight(params.items);
  for (std::size_t i = 0; i < params.items; ++i) weight[i] = 1.0 / std::pow(static_cast<double>(i + 1), params.skew);

  std::mt19937_64 rng(params.seed);
  std::poisson_distribution<std::size_t> length(static_cast<double>(params.avg_len));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, Item>> keys(params.items);

  for (std::size_t t = 0; t < params.transactions; ++t) {
    const std::size_t len = std::min(length(rng), params.items);
    // Weighted sampling without replacement: keep the len largest u^(1/w).
    for (std::size_t i = 0; i < params.items; ++i) {
      const double u = std::max(unit(rng), std::numeric_limits<double>::min());
      keys[i] = {std::log(u) / weight[i], static_cast<Item>(i)};
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(len), keys.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Item> items;
    items.reserve(len);
    for (std::size_t i = 0; i < len; ++i) items.push_back(keys[i].second);
    transactions.emplace_back(std::move(items));
  }
  return TransactionDB(std::move(transactions), "generated");
}

ProjectedDB project_d0(const TransactionDB& db, const SetConjunct& sc) {
  ProjectedDB d0;
  d0.base = &db;
  d0.pos = sc.pos;
  d0.neg = sc.neg;
  const Itemset removed = sc.pos | sc.neg;
  db.note_scan();
  std::vector<Item> present;
  for (const auto& t : db.transactions()) {
    if (!sc.pos.is_subset_of(t)) continue;
    Itemset rest = t - removed;
    present.insert(present.end(), rest.begin(), rest.end());
    d0.transactions.push_back(std::move(rest));
  }
  d0.present = Itemset(std::move(present));
  return d0;
}

Count support_of(const TransactionDB& db, const Itemset& s) {
  db.note_scan();
  Count n = 0;
  for (const auto& t : db.transactions())
    if (s.is_subset_of(t)) ++n;
  return n;
}

Count support_of(const ProjectedDB& d0, const Itemset& s) {
  Count n = 0;
  for (const auto& t : d0.transactions)
    if (s.is_subset_of(t)) ++n;
  return n;
}

}  // namespace qmine
