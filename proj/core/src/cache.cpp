#include "qmine/cache.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "qmine/errors.hpp"

namespace qmine {

void KnowledgeCache::insert(const std::vector<CacheEntry>& entries) {
  for (const auto& e : entries) {
    auto it = map_.find(e.itemset);
    if (it != map_.end()) {
      if (it->second.support != e.support)
        throw ConflictError("conflicting supports for " + e.itemset.to_string() + ": " +
                            std::to_string(it->second.support) + " vs " + std::to_string(e.support));
      it->second.frequent_at = e.frequent_at;
      continue;
    }
    map_.emplace(e.itemset, Value{e.support, e.frequent_at});
    for (auto& d : phi_sets_)
      if (eval_set(d.region, e.itemset, e.support)) ++d.cached_count;
  }
}

std::optional<Count> KnowledgeCache::lookup(const Itemset& s) const {
  auto it = map_.find(s);
  if (it == map_.end()) return std::nullopt;
  return it->second.support;
}

std::vector<CacheEntry> KnowledgeCache::retrieve(const SetConjunct& sc) const {
  std::vector<CacheEntry> out;
  for (const auto& [s, v] : map_)
    if (eval_set(sc, s, v.support)) out.push_back({s, v.support, v.frequent_at});
  std::sort(out.begin(), out.end(), [](const CacheEntry& a, const CacheEntry& b) { return a.itemset < b.itemset; });
  return out;
}

std::vector<CacheEntry> KnowledgeCache::entries() const { return retrieve(SetConjunct{}); }

Count KnowledgeCache::recount(const SetConjunct& region) const {
  Count n = 0;
  for (const auto& [s, v] : map_)
    if (eval_set(region, s, v.support)) ++n;
  return n;
}

void KnowledgeCache::add_phi(const std::vector<SetConjunct>& regions) {
  for (SetConjunct r : regions) {
    r.max_support.reset();
    const bool known = std::any_of(phi_sets_.begin(), phi_sets_.end(), [&](const PhiDisjunct& d) { return d.region == r; });
    if (known) continue;
    const Count n = recount(r);
    phi_sets_.push_back({std::move(r), n});
  }
}

namespace {

void write_items(std::ostream& out, const Itemset& s) {
  bool first = true;
  for (Item i : s) {
    if (!first) out << ' ';
    out << i;
    first = false;
  }
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

Count read_count(const std::string& field, std::size_t line) {
  Count value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
    throw FormatError(line, "invalid count '" + field + "'");
  return value;
}

Itemset read_items(const std::string& field, std::size_t line) {
  std::vector<Item> items;
  std::istringstream in(field);
  std::string tok;
  while (in >> tok) {
    Item value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) throw FormatError(line, "invalid item '" + tok + "'");
    items.push_back(value);
  }
  return Itemset(std::move(items));
}

constexpr const char* kHeader = "qmine-snapshot 1";

}  // namespace

void KnowledgeCache::save(std::ostream& out) const {
  out << kHeader << '\n' << "[cache]\n";
  for (const auto& e : entries()) {
    write_items(out, e.itemset);
    out << '\t' << e.support << '\t' << e.frequent_at << '\n';
  }
  out << "[phi_sets]\n";
  for (const auto& d : phi_sets_) {
    write_items(out, d.region.pos);
    out << '\t';
    write_items(out, d.region.neg);
    out << '\t' << d.region.min_support << '\t';
    if (d.region.max_support) {
      out << *d.region.max_support;
    } else {
      out << '-';
    }
    out << '\t' << d.cached_count << '\n';
  }
}

KnowledgeCache KnowledgeCache::load(std::istream& in) {
  KnowledgeCache cache;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != kHeader) throw FormatError(1, "missing snapshot header");
  ++line_no;
  enum class Section { none, cache, phi } section = Section::none;
  while (std::getline(in, line)) {
    ++line_no;
    if (line == "[cache]") {
      section = Section::cache;
      continue;
    }
    if (line == "[phi_sets]") {
      section = Section::phi;
      continue;
    }
    const auto fields = split_tabs(line);
    if (section == Section::cache && fields.size() == 3) {
      const Itemset s = read_items(fields[0], line_no);
      if (cache.map_.contains(s)) throw FormatError(line_no, "duplicate itemset");
      cache.map_.emplace(s, Value{read_count(fields[1], line_no), read_count(fields[2], line_no)});
    } else if (section == Section::phi && fields.size() == 5) {
      PhiDisjunct d;
      d.region.pos = read_items(fields[0], line_no);
      d.region.neg = read_items(fields[1], line_no);
      d.region.min_support = read_count(fields[2], line_no);
      if (fields[3] != "-") d.region.max_support = read_count(fields[3], line_no);
      d.cached_count = read_count(fields[4], line_no);
      cache.phi_sets_.push_back(std::move(d));
    } else {
      throw FormatError(line_no, "unexpected snapshot line");
    }
  }
  return cache;
}

std::vector<SetConjunct> compute_phi_mine(const std::vector<SetConjunct>& phi, const std::vector<PhiDisjunct>& phi_sets,
                                          std::size_t k) {
  std::vector<std::size_t> order(phi_sets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return phi_sets[a].cached_count > phi_sets[b].cached_count; });
  order.resize(std::min(order.size(), k));

  std::vector<SetConjunct> out = phi;
  for (std::size_t idx : order) {
    std::vector<SetConjunct> next;
    for (const auto& piece : out) {
      auto split = subtract(piece, phi_sets[idx].region);
      next.insert(next.end(), std::make_move_iterator(split.begin()), std::make_move_iterator(split.end()));
    }
    out = std::move(next);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SetConjunct& a, const SetConjunct& b) { return a.min_support < b.min_support; });
  return out;
}

std::vector<SetConjunct> mining_regions(const DisjointPlan& plan) {
  std::vector<SetConjunct> regions;
  for (SetConjunct sc : plan.set_disjuncts) {
    sc.max_support.reset();
    if (std::find(regions.begin(), regions.end(), sc) == regions.end()) regions.push_back(std::move(sc));
  }
  std::stable_sort(regions.begin(), regions.end(),
                   [](const SetConjunct& a, const SetConjunct& b) { return a.min_support < b.min_support; });
  auto out = disjointify(regions);
  std::stable_sort(out.begin(), out.end(),
                   [](const SetConjunct& a, const SetConjunct& b) { return a.min_support < b.min_support; });
  return out;
}

QueryResult incremental_mine(const TransactionDB& db, const DisjointPlan& plan, KnowledgeCache& cache,
                             const IncrementalOptions& options) {
  QueryResult result;
  const auto phi = mining_regions(plan);
  const auto phi_mine = compute_phi_mine(phi, cache.phi_sets(), options.phi_keep);

  MineOptions mine = options.mine;
  mine.hook = [&cache](const Itemset& s) { return cache.lookup(s); };

  // Regions are mined one after another so later ones see earlier counts.
  for (const auto& region : phi_mine) {
    const MineResult mined = mine_set_conjunct(db, region, mine);
    result.stats += mined.stats;
    std::vector<CacheEntry> fresh;
    for (const auto& m : mined.sets)
      if (m.counted) fresh.push_back({m.kernel | region.pos, m.support, region.min_support});
    cache.insert(fresh);
  }

  std::vector<PersonalitySets> families;
  families.reserve(plan.disjuncts.size());
  for (const auto& d : plan.disjuncts) {
    std::map<Itemset, Count> rule_sets;
    for (const auto& e : cache.retrieve(d.set)) rule_sets.emplace(e.itemset, e.support);
    families.push_back(personality_families(d.rule, std::move(rule_sets)));
  }
  std::vector<PersonalitySets*> refs;
  for (auto& f : families) refs.push_back(&f);
  std::vector<std::pair<Itemset, Count>> counted;
  MinerStats aux;
  resolve_supports(refs, mine.hook, db, aux, mine, &counted);
  result.stats += aux;
  std::vector<CacheEntry> fresh;
  for (auto& [s, support] : counted) fresh.push_back({s, support, 0});
  cache.insert(fresh);
  cache.add_phi(phi);

  append_rules(families, plan, result);
  return result;
}

}  // namespace qmine
