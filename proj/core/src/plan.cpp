#include "qmine/plan.hpp"

#include <algorithm>
#include <stdexcept>

#include "qmine/errors.hpp"

namespace qmine {

std::string render(const Literal& lit) { return (lit.negated ? "!" : "") + render(lit.atom); }

namespace {

void tighten_min(Count& current, Count value) { current = std::max(current, value); }

template <typename T>
void tighten_max(std::optional<T>& current, T value) {
  if (!current || value < *current) current = value;
}

std::string join_literals(const std::vector<Literal>& lits) {
  if (lits.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i) out += " & ";
    out += render(lits[i]);
  }
  return out;
}

}  // namespace

std::optional<RuleConjunct> RuleConjunct::conjoin(const Literal& lit) const {
  RuleConjunct out = *this;
  const Atom& a = lit.atom;
  switch (a.kind) {
    case AtomKind::body_item: {
      auto& side = lit.negated ? out.neg_body : out.pos_body;
      side = side.with(a.item);
      break;
    }
    case AtomKind::head_item: {
      auto& side = lit.negated ? out.neg_head : out.pos_head;
      side = side.with(a.item);
      break;
    }
    case AtomKind::set_item:
      throw std::logic_error("set(i) literal in a rule-level conjunct");
    case AtomKind::support_ge: tighten_min(out.min_support, a.count); break;
    case AtomKind::support_lt: tighten_max(out.max_support, a.count); break;
    case AtomKind::confidence_ge: out.min_confidence = std::max(out.min_confidence, a.ratio); break;
    case AtomKind::confidence_lt: tighten_max(out.max_confidence, a.ratio); break;
  }
  if (!out.satisfiable()) return std::nullopt;
  return out;
}

bool RuleConjunct::satisfiable() const {
  if (pos_body.intersects(neg_body) || pos_head.intersects(neg_head)) return false;
  if (pos_body.intersects(pos_head)) return false;
  if (max_support && min_support >= *max_support) return false;
  if (max_confidence && min_confidence >= *max_confidence) return false;
  return true;
}

std::vector<Literal> RuleConjunct::literals() const {
  std::vector<Literal> out;
  for (Item i : pos_body) out.push_back({Atom::body(i), false});
  for (Item i : neg_body) out.push_back({Atom::body(i), true});
  for (Item i : pos_head) out.push_back({Atom::head(i), false});
  for (Item i : neg_head) out.push_back({Atom::head(i), true});
  if (min_support > 0) out.push_back({Atom::support_at_least(min_support), false});
  if (max_support) out.push_back({Atom::support_below(*max_support), false});
  if (min_confidence > Ratio{}) out.push_back({Atom::confidence_at_least(min_confidence), false});
  if (max_confidence) out.push_back({Atom::confidence_below(*max_confidence), false});
  return out;
}

std::string RuleConjunct::to_string() const { return join_literals(literals()); }

std::optional<SetConjunct> SetConjunct::conjoin(const Literal& lit) const {
  SetConjunct out = *this;
  const Atom& a = lit.atom;
  switch (a.kind) {
    case AtomKind::set_item: {
      auto& side = lit.negated ? out.neg : out.pos;
      side = side.with(a.item);
      break;
    }
    case AtomKind::support_ge: tighten_min(out.min_support, a.count); break;
    case AtomKind::support_lt: tighten_max(out.max_support, a.count); break;
    default:
      throw std::logic_error("rule-level literal in a set-level conjunct");
  }
  if (!out.satisfiable()) return std::nullopt;
  return out;
}

bool SetConjunct::satisfiable() const {
  if (pos.intersects(neg)) return false;
  if (max_support && min_support >= *max_support) return false;
  return true;
}

std::vector<Literal> SetConjunct::literals() const {
  std::vector<Literal> out;
  for (Item i : pos) out.push_back({Atom::set(i), false});
  for (Item i : neg) out.push_back({Atom::set(i), true});
  if (min_support > 0) out.push_back({Atom::support_at_least(min_support), false});
  if (max_support) out.push_back({Atom::support_below(*max_support), false});
  return out;
}

std::string SetConjunct::to_string() const { return join_literals(literals()); }

namespace {

template <typename Conj>
std::optional<Conj> conjoin_all(Conj c, const std::vector<Literal>& lits) {
  for (const auto& lit : lits) {
    auto next = c.conjoin(lit);
    if (!next) return std::nullopt;
    c = std::move(*next);
  }
  return c;
}

}  // namespace

std::optional<RuleConjunct> make_rule_conjunct(const std::vector<Literal>& lits) {
  return conjoin_all(RuleConjunct{}, lits);
}

std::optional<SetConjunct> make_set_conjunct(const std::vector<Literal>& lits) {
  return conjoin_all(SetConjunct{}, lits);
}

template <typename Conj>
std::vector<Conj> subtract(const Conj& c, const Conj& d) {
  const auto dlits = d.literals();
  if (!conjoin_all(c, dlits)) return {c};
  std::vector<Conj> pieces;
  Conj prefix = c;
  for (const auto& lit : dlits) {
    if (auto piece = prefix.conjoin(lit.negate())) pieces.push_back(std::move(*piece));
    prefix = *prefix.conjoin(lit);  // satisfiable: a subset of c ∧ d
  }
  return pieces;
}

template <typename Conj>
std::vector<Conj> disjointify(const std::vector<Conj>& disjuncts) {
  std::vector<Conj> out;
  for (std::size_t i = 0; i < disjuncts.size(); ++i) {
    std::vector<Conj> pieces{disjuncts[i]};
    for (std::size_t j = 0; j < i && !pieces.empty(); ++j) {
      std::vector<Conj> next;
      for (const auto& p : pieces) {
        auto split = subtract(p, disjuncts[j]);
        next.insert(next.end(), std::make_move_iterator(split.begin()), std::make_move_iterator(split.end()));
      }
      pieces = std::move(next);
    }
    out.insert(out.end(), std::make_move_iterator(pieces.begin()), std::make_move_iterator(pieces.end()));
  }
  return out;
}

template std::vector<RuleConjunct> subtract(const RuleConjunct&, const RuleConjunct&);
template std::vector<SetConjunct> subtract(const SetConjunct&, const SetConjunct&);
template std::vector<RuleConjunct> disjointify(const std::vector<RuleConjunct>&);
template std::vector<SetConjunct> disjointify(const std::vector<SetConjunct>&);

SetConjunct rule_to_set_conjunct(const RuleConjunct& rc) {
  SetConjunct sc;
  sc.pos = rc.pos_body | rc.pos_head;
  sc.neg = rc.neg_body & rc.neg_head;
  sc.min_support = rc.min_support;
  sc.max_support = rc.max_support;
  return sc;
}

bool eval_set(const SetConjunct& conj, const Itemset& s, Count support) {
  if (!conj.admits_items(s)) return false;
  if (support < conj.min_support) return false;
  if (conj.max_support && support >= *conj.max_support) return false;
  return true;
}

bool rule_items_match(const RuleConjunct& rc, const Itemset& body, const Itemset& head) {
  return rc.pos_body.is_subset_of(body) && !rc.neg_body.intersects(body) && rc.pos_head.is_subset_of(head) &&
         !rc.neg_head.intersects(head);
}

bool eval_rule(const RuleConjunct& rc, const Itemset& body, const Itemset& head, Count support, Ratio confidence) {
  if (!rule_items_match(rc, body, head)) return false;
  if (support < rc.min_support) return false;
  if (rc.max_support && support >= *rc.max_support) return false;
  if (confidence < rc.min_confidence) return false;
  if (rc.max_confidence && confidence >= *rc.max_confidence) return false;
  return true;
}

namespace {

using Dnf = std::vector<std::vector<Literal>>;

Dnf dnf_of(const QueryExpr& e, bool negated) {
  switch (e.kind()) {
    case QueryExpr::Kind::leaf: {
      Literal lit{e.atom(), false};
      return {{negated ? lit.negate() : lit}};
    }
    case QueryExpr::Kind::not_:
      return dnf_of(e.children().front(), !negated);
    case QueryExpr::Kind::and_:
    case QueryExpr::Kind::or_: {
      const bool conjunctive = (e.kind() == QueryExpr::Kind::and_) != negated;
      if (!conjunctive) {
        Dnf out;
        for (const auto& c : e.children()) {
          auto part = dnf_of(c, negated);
          out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        }
        return out;
      }
      Dnf acc{{}};
      for (const auto& c : e.children()) {
        const auto part = dnf_of(c, negated);
        Dnf next;
        next.reserve(acc.size() * part.size());
        for (const auto& left : acc) {
          for (const auto& right : part) {
            auto merged = left;
            merged.insert(merged.end(), right.begin(), right.end());
            next.push_back(std::move(merged));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
  }
  return {};
}

bool mentions_confidence(const std::vector<Literal>& lits) {
  return std::any_of(lits.begin(), lits.end(), [](const Literal& l) {
    return l.atom.kind == AtomKind::confidence_ge || l.atom.kind == AtomKind::confidence_lt;
  });
}

template <typename Conj>
void sort_by_min_support(std::vector<Conj>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Conj& a, const Conj& b) { return a.min_support < b.min_support; });
}

}  // namespace

std::vector<std::vector<Literal>> to_dnf(const QueryExpr& expr) { return dnf_of(expr, false); }

DisjointPlan to_disjoint_dnf(const QueryExpr& expr, const PlanDefaults& defaults) {
  DisjointPlan plan;
  plan.original = expr;

  std::vector<RuleConjunct> conjuncts;
  for (const auto& lits : to_dnf(expr)) {
    for (const auto& l : lits) {
      if (l.atom.kind == AtomKind::support_ge &&
          (!plan.lowest_explicit_support || l.atom.count < *plan.lowest_explicit_support))
        plan.lowest_explicit_support = l.atom.count;
    }
    auto rc = make_rule_conjunct(lits);
    if (rc && !mentions_confidence(lits)) rc = rc->conjoin({Atom::confidence_at_least(defaults.default_confidence), false});
    if (rc) rc = rc->conjoin({Atom::support_at_least(defaults.floor_support), false});
    if (!rc) {
      ++plan.dropped_unsatisfiable;
      continue;
    }
    conjuncts.push_back(std::move(*rc));
  }
  if (defaults.sort_by_support) sort_by_min_support(conjuncts);

  auto rules = disjointify(conjuncts);
  if (rules.empty()) throw EmptyQuery();
  if (defaults.sort_by_support) sort_by_min_support(rules);

  std::vector<SetConjunct> sets;
  for (auto& rc : rules) {
    auto sc = rule_to_set_conjunct(rc);
    sets.push_back(sc);
    plan.disjuncts.push_back({std::move(rc), std::move(sc)});
  }
  sort_by_min_support(sets);
  plan.set_disjuncts = disjointify(sets);
  sort_by_min_support(plan.set_disjuncts);

  plan.served.resize(plan.set_disjuncts.size());
  for (std::size_t j = 0; j < plan.set_disjuncts.size(); ++j) {
    for (std::size_t k = 0; k < plan.disjuncts.size(); ++k) {
      if (conjoin_all(plan.set_disjuncts[j], plan.disjuncts[k].set.literals())) plan.served[j].push_back(k);
    }
  }
  return plan;
}

}  // namespace qmine
