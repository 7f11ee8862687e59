#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qmine/types.hpp"

namespace qmine {

enum class AtomKind {
  body_item,
  head_item,
  set_item,  // compiled set-queries only
  support_ge,
  support_lt,
  confidence_ge,
  confidence_lt,
};

struct Atom {
  AtomKind kind = AtomKind::body_item;
  Item item = 0;     // item atoms
  Count count = 0;   // support atoms
  Ratio ratio{};     // confidence atoms, within [0, 1]

  static Atom body(Item i) { return {AtomKind::body_item, i, 0, {}}; }
  static Atom head(Item i) { return {AtomKind::head_item, i, 0, {}}; }
  static Atom set(Item i) { return {AtomKind::set_item, i, 0, {}}; }
  static Atom support_at_least(Count n) { return {AtomKind::support_ge, 0, n, {}}; }
  static Atom support_below(Count n) { return {AtomKind::support_lt, 0, n, {}}; }
  static Atom confidence_at_least(Ratio r) { return {AtomKind::confidence_ge, 0, 0, r}; }
  static Atom confidence_below(Ratio r) { return {AtomKind::confidence_lt, 0, 0, r}; }

  [[nodiscard]] bool is_item() const {
    return kind == AtomKind::body_item || kind == AtomKind::head_item || kind == AtomKind::set_item;
  }
  [[nodiscard]] bool is_threshold() const { return !is_item(); }
  /// Threshold atoms negate to their complementary threshold.
  [[nodiscard]] Atom complement() const;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Boolean combination of atoms. And/Or nodes are n-ary.
class QueryExpr {
 public:
  enum class Kind { and_, or_, not_, leaf };

  static QueryExpr leaf(Atom atom);
  static QueryExpr all_of(std::vector<QueryExpr> children);
  static QueryExpr any_of(std::vector<QueryExpr> children);
  static QueryExpr negation(QueryExpr child);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const Atom& atom() const { return atom_; }
  [[nodiscard]] const std::vector<QueryExpr>& children() const { return children_; }

  friend bool operator==(const QueryExpr&, const QueryExpr&) = default;

 private:
  Kind kind_ = Kind::leaf;
  Atom atom_{};
  std::vector<QueryExpr> children_;
};

/// Recursive-descent parser for the rule-query language:
///
///   query := or ; or := and ('|' and)* ; and := not ('&' not)* ;
///   not   := '!' not | '(' query ')' | atom ;
///   atom  := 'body' '(' INT ')' | 'head' '(' INT ')'
///          | 'support' ('>='|'<') INT
///          | 'confidence' ('>='|'<') NUMBER ['%'] ;
///
/// A negation applied directly to a threshold atom is folded into the
/// complementary atom, so `!(support >= 3)` parses as `support < 3`.
/// Throws ParseError (with byte offset) or RangeError.
QueryExpr parse_query(std::string_view text);

/// Renders an expression in the grammar above; parse_query(render(e)) == e.
std::string render(const QueryExpr& expr);
std::string render(const Atom& atom);

/// Facts about a candidate rule used when evaluating a query against it.
struct RuleFacts {
  const Itemset& body;
  const Itemset& head;
  Count support;
  Ratio confidence;
};

/// Facts about an itemset for set-level evaluation.
struct SetFacts {
  const Itemset& items;
  Count support;
};

bool evaluate(const Atom& atom, const RuleFacts& rule);
bool evaluate(const QueryExpr& expr, const RuleFacts& rule);
/// Set-level evaluation; only set_item and support atoms are meaningful.
bool evaluate(const QueryExpr& expr, const SetFacts& set);

}  // namespace qmine
