#include "qmine/types.hpp"

#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qmine {

Itemset::Itemset(std::initializer_list<Item> items) : Itemset(std::vector<Item>(items)) {}

Itemset::Itemset(std::vector<Item> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

Itemset Itemset::from_sorted(std::vector<Item> items) {
  Itemset s;
  s.items_ = std::move(items);
  return s;
}

bool Itemset::intersects(const Itemset& other) const {
  auto a = items_.begin();
  auto b = other.items_.begin();
  while (a != items_.end() && b != other.items_.end()) {
    if (*a == *b) return true;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

Itemset Itemset::with(Item item) const {
  auto pos = std::lower_bound(items_.begin(), items_.end(), item);
  if (pos != items_.end() && *pos == item) return *this;
  std::vector<Item> out;
  out.reserve(items_.size() + 1);
  out.insert(out.end(), items_.begin(), pos);
  out.push_back(item);
  out.insert(out.end(), pos, items_.end());
  return from_sorted(std::move(out));
}

Itemset Itemset::without(Item item) const {
  std::vector<Item> out;
  out.reserve(items_.size());
  for (Item i : items_)
    if (i != item) out.push_back(i);
  return from_sorted(std::move(out));
}

Itemset operator|(const Itemset& a, const Itemset& b) {
  std::vector<Item> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Itemset::from_sorted(std::move(out));
}

Itemset operator&(const Itemset& a, const Itemset& b) {
  std::vector<Item> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Itemset::from_sorted(std::move(out));
}

Itemset operator-(const Itemset& a, const Itemset& b) {
  std::vector<Item> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Itemset::from_sorted(std::move(out));
}

std::string Itemset::to_string() const {
  std::string out = "{";
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(items_[i]);
  }
  out += '}';
  return out;
}

std::ostream& operator<<(std::ostream& os, const Itemset& s) { return os << s.to_string(); }

std::size_t ItemsetHash::operator()(const Itemset& s) const noexcept {
  // FNV-1a over the item words.
  std::uint64_t h = 1469598103934665603ULL;
  for (Item i : s) {
    h ^= i;
    h *= 1099511628211ULL;
  }
  h ^= s.size();
  return static_cast<std::size_t>(h);
}

Ratio::Ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw std::invalid_argument("ratio with zero denominator");
  const auto g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

std::string Ratio::to_fixed(int digits) const {
  UInt128 scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const UInt128 scaled = (static_cast<UInt128>(num_) * scale * 2 + den_) / (2 * static_cast<UInt128>(den_));
  const auto whole = static_cast<std::uint64_t>(scaled / scale);
  auto frac = static_cast<std::uint64_t>(scaled % scale);
  std::string out = std::to_string(whole);
  if (digits > 0) {
    std::string f = std::to_string(frac);
    out += '.';
    out.append(static_cast<std::size_t>(digits) - f.size(), '0');
    out += f;
  }
  return out;
}

std::string Ratio::to_decimal() const {
  std::uint64_t d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  const int digits = d == 1 ? std::max(twos, fives) : 12;
  std::string out = to_fixed(digits);
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Ratio& r) { return os << r.to_decimal(); }

}  // namespace qmine
