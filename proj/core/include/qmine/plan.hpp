#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qmine/query.hpp"
#include "qmine/types.hpp"

namespace qmine {

/// An atom or the negation of an item atom. Threshold atoms are never
/// negated; their negation is the complementary threshold atom.
struct Literal {
  Atom atom;
  bool negated = false;

  [[nodiscard]] Literal negate() const {
    if (atom.is_threshold()) return {atom.complement(), false};
    return {atom, !negated};
  }
  friend bool operator==(const Literal&, const Literal&) = default;
};

std::string render(const Literal& lit);

/// Conjunction of rule-level literals in normalized form.
struct RuleConjunct {
  Itemset pos_body;
  Itemset neg_body;
  Itemset pos_head;
  Itemset neg_head;
  Count min_support = 0;
  std::optional<Count> max_support;  // exclusive
  Ratio min_confidence{};
  std::optional<Ratio> max_confidence;  // exclusive

  /// Conjoins one more literal; nullopt when the result is unsatisfiable.
  [[nodiscard]] std::optional<RuleConjunct> conjoin(const Literal& lit) const;
  [[nodiscard]] bool satisfiable() const;
  /// Items first (body+, body-, head+, head-), then thresholds.
  [[nodiscard]] std::vector<Literal> literals() const;
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const RuleConjunct&, const RuleConjunct&) = default;
};

/// Conjunction of set-level literals: Pos, Neg and a support interval.
struct SetConjunct {
  Itemset pos;
  Itemset neg;
  Count min_support = 0;
  std::optional<Count> max_support;  // exclusive

  [[nodiscard]] std::optional<SetConjunct> conjoin(const Literal& lit) const;
  [[nodiscard]] bool satisfiable() const;
  [[nodiscard]] std::vector<Literal> literals() const;
  [[nodiscard]] std::string to_string() const;
  /// Item literals only: pos ⊆ s and neg ∩ s = ∅.
  [[nodiscard]] bool admits_items(const Itemset& s) const { return pos.is_subset_of(s) && !neg.intersects(s); }

  friend bool operator==(const SetConjunct&, const SetConjunct&) = default;
};

/// Builds a conjunct from scratch; nullopt when contradictory.
std::optional<RuleConjunct> make_rule_conjunct(const std::vector<Literal>& lits);
std::optional<SetConjunct> make_set_conjunct(const std::vector<Literal>& lits);

/// c ∧ ¬d as a list of pairwise disjoint conjuncts (per-literal splitting).
/// Returns {c} untouched when c and d are already disjoint.
template <typename Conj>
std::vector<Conj> subtract(const Conj& c, const Conj& d);

/// φ₁ ∨ (φ₂ ∧ ¬φ₁) ∨ … with every disjunct re-expanded to conjunctions.
template <typename Conj>
std::vector<Conj> disjointify(const std::vector<Conj>& disjuncts);

SetConjunct rule_to_set_conjunct(const RuleConjunct& rc);

/// True iff rc.pos ⊆ s, rc.neg ∩ s = ∅ and support ∈ [min, max).
bool eval_set(const SetConjunct& conj, const Itemset& s, Count support);
/// Precondition: body ∩ head = ∅, both nonempty.
bool eval_rule(const RuleConjunct& rc, const Itemset& body, const Itemset& head, Count support, Ratio confidence);
/// eval_rule restricted to the item literals.
bool rule_items_match(const RuleConjunct& rc, const Itemset& body, const Itemset& head);

/// Session-level knobs applied while planning.
struct PlanDefaults {
  Count floor_support = 1;
  Ratio default_confidence{};
  /// Sort DNF disjuncts ascending on support before disjointification.
  bool sort_by_support = true;
};

struct PlannedDisjunct {
  RuleConjunct rule;
  SetConjunct set;  // rule_to_set_conjunct(rule)
};

struct DisjointPlan {
  /// Rule-level disjoint DNF, ascending on min_support.
  std::vector<PlannedDisjunct> disjuncts;
  /// Set-level disjoint DNF covering every disjunct's set conjunct.
  std::vector<SetConjunct> set_disjuncts;
  /// For each set disjunct, the indices of the rule disjuncts it serves.
  std::vector<std::vector<std::size_t>> served;
  QueryExpr original;

  std::size_t dropped_unsatisfiable = 0;
  /// Lowest explicit `support >=` threshold found in the query, if any.
  std::optional<Count> lowest_explicit_support;
};

/// Query expression to DNF, as lists of literals (negations pushed to atoms).
std::vector<std::vector<Literal>> to_dnf(const QueryExpr& expr);

/// DNF, drop contradictions, apply defaults and the floor, sort, make the
/// rule-level and set-level forms disjoint. Throws EmptyQuery when nothing
/// satisfiable remains.
DisjointPlan to_disjoint_dnf(const QueryExpr& expr, const PlanDefaults& defaults = {});

}  // namespace qmine
