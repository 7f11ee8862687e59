#include "qmine/miner.hpp"

#include <algorithm>
#include <future>
#include <set>
#include <thread>
#include <unordered_set>

#include "qmine/errors.hpp"

namespace qmine {

namespace {

void check_deadline(const Deadline& deadline) {
  if (deadline && std::chrono::steady_clock::now() > *deadline) throw Timeout();
}

/// Prefix tree over sorted itemsets; terminal nodes carry the index of the
/// set they end.
class CandidateTrie {
 public:
  explicit CandidateTrie(const std::vector<Itemset>& sets) : nodes_(1) {
    for (std::size_t i = 0; i < sets.size(); ++i) insert(sets[i], i);
  }

  void count(const Itemset& t, std::vector<Count>& counts) const {
    const auto items = t.items();
    walk(0, items.data(), items.data() + items.size(), counts);
  }

 private:
  struct Node {
    std::vector<Item> keys;
    std::vector<std::uint32_t> kids;
    std::int64_t terminal = -1;
  };
  std::vector<Node> nodes_;

  void insert(const Itemset& s, std::size_t index) {
    std::uint32_t n = 0;
    for (Item item : s) {
      auto& keys = nodes_[n].keys;
      auto it = std::lower_bound(keys.begin(), keys.end(), item);
      const auto pos = static_cast<std::size_t>(it - keys.begin());
      if (it != keys.end() && *it == item) {
        n = nodes_[n].kids[pos];
        continue;
      }
      const auto child = static_cast<std::uint32_t>(nodes_.size());
      keys.insert(it, item);
      nodes_[n].kids.insert(nodes_[n].kids.begin() + static_cast<std::ptrdiff_t>(pos), child);
      nodes_.emplace_back();
      n = child;
    }
    nodes_[n].terminal = static_cast<std::int64_t>(index);
  }

  void walk(std::uint32_t n, const Item* t, const Item* end, std::vector<Count>& counts) const {
    const Node& node = nodes_[n];
    if (node.terminal >= 0) ++counts[static_cast<std::size_t>(node.terminal)];
    std::size_t i = 0;
    const Item* p = t;
    while (i < node.keys.size() && p < end) {
      if (node.keys[i] < *p) {
        ++i;
      } else if (*p < node.keys[i]) {
        ++p;
      } else {
        walk(node.kids[i], p + 1, end, counts);
        ++i;
        ++p;
      }
    }
  }
};

/// Immediate subsets of c, i.e. c minus one item each.
std::vector<Itemset> immediate_subsets(const Itemset& c) {
  std::vector<Itemset> out;
  out.reserve(c.size());
  for (Item i : c) out.push_back(c.without(i));
  return out;
}

class Levelwise {
 public:
  Levelwise(const TransactionDB* db, const ProjectedDB* d0, SetConjunct sc, const MineOptions& options)
      : db_(db), d0_(d0), sc_(std::move(sc)), options_(options) {
    universe_ = d0_ ? d0_->present : db_->present_items() - (sc_.pos | sc_.neg);
  }

  MineResult run() {
    const Itemset empty;
    seen_.insert(empty);
    if (!lookup(empty)) {
      if (d0_) {
        record_counted(empty);
        resolve(empty, d0_->transactions.size(), true);
      } else {
        ensure_projected();
      }
    }
    while (true) {
      while (!queue_.empty()) {
        Itemset g = std::move(queue_.back());
        queue_.pop_back();
        extend(g);
      }
      if (pending_.empty()) break;
      count_pending();
    }
    return finish();
  }

 private:
  struct State {
    Count support = 0;
    bool frequent = false;
    bool counted = false;
  };

  const TransactionDB* db_;
  const ProjectedDB* d0_;
  std::optional<ProjectedDB> own_d0_;
  SetConjunct sc_;
  const MineOptions& options_;
  Itemset universe_;
  std::unordered_map<Itemset, State, ItemsetHash> resolved_;
  std::unordered_set<Itemset, ItemsetHash> seen_;
  std::vector<Item> frequent_singletons_;
  std::vector<Itemset> queue_;
  std::vector<Itemset> pending_;
  MinerStats stats_;
  std::size_t frequent_count_ = 0;

  void record_counted(const Itemset& kernel) {
    ++stats_.candidates_counted;
    if (options_.trace) options_.trace->push_back({kernel | sc_.pos, sc_});
  }

  void ensure_projected() {
    if (d0_) return;
    check_deadline(options_.deadline);
    own_d0_ = project_d0(*db_, sc_);
    d0_ = &*own_d0_;
    ++stats_.db_passes;
    universe_ = universe_ & d0_->present;
    const Itemset empty;
    if (!resolved_.contains(empty)) {
      record_counted(empty);
      resolve(empty, d0_->transactions.size(), true);
    }
  }

  bool lookup(const Itemset& kernel) {
    if (!options_.hook) return false;
    const Itemset lifted = kernel | sc_.pos;
    if (auto s = options_.hook(lifted)) {
      ++stats_.cache_hits;
      resolve(kernel, *s, false);
      return true;
    }
    return false;
  }

  /// A superset of a known infrequent set is infrequent, even when the
  /// subset lies outside this region because it lacks some Pos items.
  bool pruned_by_hook(const Itemset& kernel) {
    if (!options_.hook || sc_.pos.empty() || sc_.pos.size() > options_.subset_prune_limit) return false;
    const Itemset lifted = kernel | sc_.pos;
    const auto pos = sc_.pos.items();
    const std::uint64_t masks = std::uint64_t{1} << pos.size();
    for (std::uint64_t mask = 1; mask < masks; ++mask) {
      std::vector<Item> drop;
      for (std::size_t b = 0; b < pos.size(); ++b)
        if (mask & (std::uint64_t{1} << b)) drop.push_back(pos[b]);
      if (auto s = options_.hook(lifted - Itemset::from_sorted(std::move(drop))); s && *s < sc_.min_support) return true;
    }
    return false;
  }

  void resolve(const Itemset& kernel, Count support, bool counted) {
    const bool frequent = support >= sc_.min_support;
    resolved_[kernel] = {support, frequent, counted};
    if (!frequent) return;
    if (options_.max_frequent && ++frequent_count_ > options_.max_frequent)
      throw InfeasibleError("more than " + std::to_string(options_.max_frequent) + " frequent itemsets");
    if (kernel.size() == 1) {
      auto it = std::lower_bound(frequent_singletons_.begin(), frequent_singletons_.end(), kernel[0]);
      frequent_singletons_.insert(it, kernel[0]);
    }
    queue_.push_back(kernel);
  }

  bool is_frequent(const Itemset& kernel) const {
    auto it = resolved_.find(kernel);
    return it != resolved_.end() && it->second.frequent;
  }

  void consider(Itemset c) {
    if (!seen_.insert(c).second) return;
    if (lookup(c)) return;
    if (pruned_by_hook(c)) return;
    pending_.push_back(std::move(c));
  }

  void extend(const Itemset& g) {
    if (g.empty()) {
      for (Item x : universe_) consider(Itemset{x});
      return;
    }
    for (Item y : frequent_singletons_) {
      if (g.contains(y)) continue;
      Itemset c = g.with(y);
      if (seen_.contains(c)) continue;
      const auto subs = immediate_subsets(c);
      if (std::all_of(subs.begin(), subs.end(), [&](const Itemset& s) { return is_frequent(s); })) consider(std::move(c));
    }
  }

  void count_pending() {
    ensure_projected();
    check_deadline(options_.deadline);
    std::vector<Itemset> batch;
    batch.reserve(pending_.size());
    for (auto& c : pending_)
      if (c.is_subset_of(d0_->present)) batch.push_back(std::move(c));
    pending_.clear();
    if (batch.empty()) return;
    std::sort(batch.begin(), batch.end());
    const auto counts = count_supports(d0_->transactions, batch, options_.threads);
    ++stats_.db_passes;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      record_counted(batch[i]);
      resolve(batch[i], counts[i], true);
    }
  }

  MineResult finish() {
    MineResult out;
    out.stats = stats_;
    for (const auto& [kernel, st] : resolved_)
      if (st.frequent || st.counted) out.sets.push_back({kernel, st.support, st.frequent, st.counted});
    std::sort(out.sets.begin(), out.sets.end(),
              [](const MinedSet& a, const MinedSet& b) { return a.kernel < b.kernel; });
    return out;
  }
};

void downward_closure(const Itemset& top, std::unordered_set<Itemset, ItemsetHash>& out) {
  if (!out.insert(top).second) return;
  for (Item i : top) downward_closure(top.without(i), out);
}

SupportMap unset_supports(std::vector<Itemset> sets) {
  SupportMap out;
  out.reserve(sets.size());
  for (auto& s : sets) out.emplace(std::move(s), 0);
  return out;
}

}  // namespace

std::vector<Count> count_supports(const std::vector<Itemset>& transactions, const std::vector<Itemset>& sets,
                                  unsigned threads) {
  std::vector<Count> counts(sets.size(), 0);
  if (sets.empty()) return counts;
  const CandidateTrie trie(sets);
  const std::size_t n = transactions.size();
  const std::size_t workers = std::min<std::size_t>(std::max(1U, threads), std::max<std::size_t>(1, n / 256));
  if (workers <= 1) {
    for (const auto& t : transactions) trie.count(t, counts);
    return counts;
  }
  std::vector<std::vector<Count>> partial(workers, std::vector<Count>(sets.size(), 0));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = n * w / workers;
      const std::size_t hi = n * (w + 1) / workers;
      for (std::size_t i = lo; i < hi; ++i) trie.count(transactions[i], partial[w]);
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& p : partial)
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += p[i];
  return counts;
}

MineResult mine_set_conjunct(const TransactionDB& db, const SetConjunct& sc, const MineOptions& options) {
  return Levelwise(&db, nullptr, sc, options).run();
}

std::vector<MinedSet> apriori_s0(const ProjectedDB& d0, Count min_support, const SupportHook& hook) {
  SetConjunct sc;
  sc.pos = d0.pos;
  sc.neg = d0.neg;
  sc.min_support = min_support;
  MineOptions options;
  options.hook = hook;
  return Levelwise(nullptr, &d0, sc, options).run().sets;
}

std::map<Itemset, Count> lift_rule_sets(const std::vector<MinedSet>& s0, const SetConjunct& sc) {
  std::map<Itemset, Count> out;
  for (const auto& m : s0)
    if (m.frequent) out.emplace(m.kernel | sc.pos, m.support);
  return out;
}

PersonalitySets personality_families(const RuleConjunct& rc, std::map<Itemset, Count> rule_sets) {
  PersonalitySets ps;
  ps.rule_sets = std::move(rule_sets);
  const Itemset pos = rc.pos_body | rc.pos_head;
  // Without an upper support bound the kernels are already closed under
  // subsets, since a subset of a rule set is at least as frequent.
  std::vector<Itemset> kernels;
  if (rc.max_support) {
    std::unordered_set<Itemset, ItemsetHash> closed;
    for (const auto& [z, s] : ps.rule_sets) downward_closure(z - pos, closed);
    kernels.assign(closed.begin(), closed.end());
  } else {
    kernels.reserve(ps.rule_sets.size());
    for (const auto& [z, s] : ps.rule_sets) kernels.push_back(z - pos);
  }
  std::vector<Itemset> bodies;
  std::vector<Itemset> heads;
  bodies.reserve(kernels.size());
  heads.reserve(kernels.size());
  for (const auto& a : kernels) {
    if (!a.intersects(rc.neg_body)) {
      Itemset body = rc.pos_body | a;
      if (!body.empty()) bodies.push_back(std::move(body));
    }
    if (!a.intersects(rc.neg_head)) {
      Itemset head = rc.pos_head | a;
      if (!head.empty()) heads.push_back(std::move(head));
    }
  }
  ps.body_sets = unset_supports(std::move(bodies));
  ps.head_sets = unset_supports(std::move(heads));
  return ps;
}

void resolve_supports(const std::vector<PersonalitySets*>& families, const SupportHook& lookup, const TransactionDB& db,
                      MinerStats& stats, const MineOptions& options,
                      std::vector<std::pair<Itemset, Count>>* fresh) {
  // Slots still waiting for a count, grouped by itemset.
  std::map<Itemset, std::vector<Count*>> missing;
  auto visit = [&](const Itemset& s, Count& slot) {
    if (auto v = lookup ? lookup(s) : std::nullopt) {
      slot = *v;
    } else {
      missing[s].push_back(&slot);
    }
  };
  for (auto* ps : families) {
    for (auto& [s, support] : ps->body_sets) visit(s, support);
    for (auto& [s, support] : ps->head_sets) visit(s, support);
  }
  if (missing.empty()) return;

  check_deadline(options.deadline);
  std::vector<Itemset> sets;
  sets.reserve(missing.size());
  for (const auto& [s, _] : missing) sets.push_back(s);
  db.note_scan();
  const auto counts = count_supports(db.transactions(), sets, options.threads);
  ++stats.db_passes;
  stats.aux_counted += sets.size();
  std::size_t i = 0;
  for (const auto& [s, slots] : missing) {
    for (Count* slot : slots) *slot = counts[i];
    if (fresh) fresh->emplace_back(s, counts[i]);
    if (options.trace) options.trace->push_back({s, std::nullopt});
    ++i;
  }
}

SupportHook map_lookup(const SupportMap& known) {
  return [&known](const Itemset& s) -> std::optional<Count> {
    auto it = known.find(s);
    if (it == known.end()) return std::nullopt;
    return it->second;
  };
}

PersonalitySets derive_body_head_sets(const std::vector<MinedSet>& s0, const RuleConjunct& rc, const TransactionDB& db) {
  const SetConjunct sc = rule_to_set_conjunct(rc);
  SupportMap known;
  std::map<Itemset, Count> rule_sets;
  for (const auto& m : s0) {
    Itemset lifted = m.kernel | sc.pos;
    known.emplace(lifted, m.support);
    if (m.frequent && eval_set(sc, lifted, m.support)) rule_sets.emplace(std::move(lifted), m.support);
  }
  PersonalitySets ps = personality_families(rc, rule_sets);
  MinerStats stats;
  resolve_supports({&ps}, map_lookup(known), db, stats);
  return ps;
}

std::vector<AssociationRule> generate_rules(const PersonalitySets& ps, const RuleConjunct& rc) {
  std::vector<AssociationRule> out;
  const Itemset pos = rc.pos_body | rc.pos_head;
  for (const auto& [z, sz] : ps.rule_sets) {
    const Itemset free = z - pos;
    const Itemset forced = free & rc.neg_body;  // may not sit in the body
    if (forced.intersects(rc.neg_head)) continue;
    const Itemset base = rc.pos_head | forced;
    const Itemset movable = free - rc.neg_head - forced;

    // Heads are base ∪ A; a larger A only shrinks the body, so confidence
    // cannot rise and A is extended only while all its sub-heads pass.
    std::set<Itemset> level{Itemset{}};
    while (!level.empty()) {
      std::set<Itemset> confident;
      for (const auto& a : level) {
        const Itemset head = base | a;
        const Itemset body = z - head;
        if (body.empty()) continue;
        if (head.empty()) {
          confident.insert(a);
          continue;
        }
        auto it = ps.body_sets.find(body);
        if (it == ps.body_sets.end()) throw MissingSupport("no support for body " + body.to_string());
        if (it->second == 0) continue;
        const Ratio conf(sz, it->second);
        if (conf < rc.min_confidence) continue;
        confident.insert(a);
        if (rc.max_confidence && !(conf < *rc.max_confidence)) continue;
        if (rc.max_support && sz >= *rc.max_support) continue;
        out.push_back({body, head, sz, conf, 0});
      }
      std::set<Itemset> next;
      for (const auto& a : confident) {
        for (Item e : movable) {
          if (!a.empty() && e <= a.back()) continue;
          Itemset c = a.with(e);
          const auto subs = immediate_subsets(c);
          if (std::all_of(subs.begin(), subs.end(), [&](const Itemset& s) { return confident.contains(s); }))
            next.insert(std::move(c));
        }
      }
      level = std::move(next);
    }
  }
  return out;
}

QueryResult mine_query(const TransactionDB& db, const DisjointPlan& plan, const MineOptions& options) {
  QueryResult result;
  const std::size_t n = plan.set_disjuncts.size();
  std::vector<MineResult> mined(n);
  std::vector<std::vector<CountedSet>> traces(n);

  auto mine_one = [&](std::size_t j) {
    MineOptions opt = options;
    opt.trace = options.trace ? &traces[j] : nullptr;
    if (options.threads > 1 && n > 1) opt.threads = 1;
    mined[j] = mine_set_conjunct(db, plan.set_disjuncts[j], opt);
  };
  if (options.threads > 1 && n > 1) {
    std::vector<std::future<void>> jobs;
    for (std::size_t j = 0; j < n; ++j) jobs.push_back(std::async(std::launch::async, mine_one, j));
    for (auto& job : jobs) job.get();
  } else {
    for (std::size_t j = 0; j < n; ++j) mine_one(j);
  }

  SupportMap known;
  std::vector<std::map<Itemset, Count>> rule_sets(plan.disjuncts.size());
  for (std::size_t j = 0; j < n; ++j) {
    const SetConjunct& region = plan.set_disjuncts[j];
    result.stats += mined[j].stats;
    if (options.trace) options.trace->insert(options.trace->end(), traces[j].begin(), traces[j].end());
    for (const auto& m : mined[j].sets) {
      Itemset lifted = m.kernel | region.pos;
      known.emplace(lifted, m.support);
      if (!m.frequent || !eval_set(region, lifted, m.support)) continue;
      for (std::size_t k : plan.served[j])
        if (eval_set(plan.disjuncts[k].set, lifted, m.support)) rule_sets[k].emplace(lifted, m.support);
    }
  }

  std::vector<PersonalitySets> families;
  families.reserve(plan.disjuncts.size());
  for (std::size_t k = 0; k < plan.disjuncts.size(); ++k)
    families.push_back(personality_families(plan.disjuncts[k].rule, std::move(rule_sets[k])));
  std::vector<PersonalitySets*> refs;
  for (auto& f : families) refs.push_back(&f);
  resolve_supports(refs, map_lookup(known), db, result.stats, options);

  append_rules(families, plan, result);
  return result;
}

void append_rules(const std::vector<PersonalitySets>& families, const DisjointPlan& plan, QueryResult& result) {
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < plan.disjuncts.size(); ++k) {
    auto rules = generate_rules(families[k], plan.disjuncts[k].rule);
    for (auto& r : rules) r.disjunct = k;
    result.rules.insert(result.rules.end(), std::make_move_iterator(rules.begin()), std::make_move_iterator(rules.end()));
  }
  result.rules_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void sort_rules(std::vector<AssociationRule>& rules) {
  std::sort(rules.begin(), rules.end(), [](const AssociationRule& a, const AssociationRule& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.support != b.support) return a.support > b.support;
    if (a.body != b.body) return a.body < b.body;
    return a.head < b.head;
  });
}

}  // namespace qmine
