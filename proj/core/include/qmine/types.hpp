#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qmine {

__extension__ using UInt128 = unsigned __int128;

using Item = std::uint32_t;
/// Absolute transaction count.
using Count = std::uint64_t;

/// Sorted, duplicate-free set of item identifiers.
class Itemset {
 public:
  Itemset() = default;
  Itemset(std::initializer_list<Item> items);
  explicit Itemset(std::vector<Item> items);

  /// Adopts a vector the caller guarantees to be strictly increasing.
  static Itemset from_sorted(std::vector<Item> items);

  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] bool empty() const { return items_.empty(); }
  [[nodiscard]] auto begin() const { return items_.begin(); }
  [[nodiscard]] auto end() const { return items_.end(); }
  [[nodiscard]] Item operator[](std::size_t i) const { return items_[i]; }
  [[nodiscard]] Item back() const { return items_.back(); }
  [[nodiscard]] std::span<const Item> items() const { return items_; }

  [[nodiscard]] bool contains(Item item) const {
    return std::binary_search(items_.begin(), items_.end(), item);
  }
  [[nodiscard]] bool is_subset_of(const Itemset& other) const {
    return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
  }
  [[nodiscard]] bool intersects(const Itemset& other) const;

  [[nodiscard]] Itemset with(Item item) const;
  [[nodiscard]] Itemset without(Item item) const;

  friend Itemset operator|(const Itemset& a, const Itemset& b);  // union
  friend Itemset operator&(const Itemset& a, const Itemset& b);  // intersection
  friend Itemset operator-(const Itemset& a, const Itemset& b);  // difference

  friend bool operator==(const Itemset&, const Itemset&) = default;
  friend std::strong_ordering operator<=>(const Itemset& a, const Itemset& b) {
    return a.items_ <=> b.items_;
  }

  [[nodiscard]] std::string to_string() const;  // "{1,3}"

 private:
  std::vector<Item> items_;
};

std::ostream& operator<<(std::ostream& os, const Itemset& s);

struct ItemsetHash {
  std::size_t operator()(const Itemset& s) const noexcept;
};

/// Exact non-negative rational. Always stored reduced, den > 0.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(std::uint64_t num, std::uint64_t den);

  [[nodiscard]] std::uint64_t num() const { return num_; }
  [[nodiscard]] std::uint64_t den() const { return den_; }
  [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Fixed-point rendering rounded half-up, e.g. "0.500000".
  [[nodiscard]] std::string to_fixed(int digits = 6) const;
  /// Exact decimal when den has only 2 and 5 as prime factors, else 12 digits.
  [[nodiscard]] std::string to_decimal() const;

  friend bool operator==(const Ratio&, const Ratio&) = default;
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    const auto lhs = static_cast<UInt128>(a.num_) * b.den_;
    const auto rhs = static_cast<UInt128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Ratio& r);

}  // namespace qmine
