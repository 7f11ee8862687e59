#include "qmine/query.hpp"

#include <cctype>
#include <limits>

#include "qmine/errors.hpp"

namespace qmine {

Atom Atom::complement() const {
  Atom out = *this;
  switch (kind) {
    case AtomKind::support_ge: out.kind = AtomKind::support_lt; break;
    case AtomKind::support_lt: out.kind = AtomKind::support_ge; break;
    case AtomKind::confidence_ge: out.kind = AtomKind::confidence_lt; break;
    case AtomKind::confidence_lt: out.kind = AtomKind::confidence_ge; break;
    default: break;
  }
  return out;
}

QueryExpr QueryExpr::leaf(Atom atom) {
  QueryExpr e;
  e.kind_ = Kind::leaf;
  e.atom_ = atom;
  return e;
}

QueryExpr QueryExpr::all_of(std::vector<QueryExpr> children) {
  if (children.size() == 1) return std::move(children.front());
  QueryExpr e;
  e.kind_ = Kind::and_;
  e.children_ = std::move(children);
  return e;
}

QueryExpr QueryExpr::any_of(std::vector<QueryExpr> children) {
  if (children.size() == 1) return std::move(children.front());
  QueryExpr e;
  e.kind_ = Kind::or_;
  e.children_ = std::move(children);
  return e;
}

QueryExpr QueryExpr::negation(QueryExpr child) {
  if (child.kind_ == Kind::leaf && child.atom_.is_threshold()) return leaf(child.atom_.complement());
  QueryExpr e;
  e.kind_ = Kind::not_;
  e.children_.push_back(std::move(child));
  return e;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  QueryExpr parse() {
    QueryExpr e = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  QueryExpr parse_or() {
    std::vector<QueryExpr> terms;
    terms.push_back(parse_and());
    while (accept("|")) terms.push_back(parse_and());
    return QueryExpr::any_of(std::move(terms));
  }

  QueryExpr parse_and() {
    std::vector<QueryExpr> factors;
    factors.push_back(parse_not());
    while (accept("&")) factors.push_back(parse_not());
    return QueryExpr::all_of(std::move(factors));
  }

  QueryExpr parse_not() {
    if (accept("!")) return QueryExpr::negation(parse_not());
    if (accept("(")) {
      QueryExpr inner = parse_or();
      expect(")");
      return inner;
    }
    return QueryExpr::leaf(parse_atom());
  }

  std::string_view keyword() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  Atom parse_atom() {
    skip_ws();
    const std::size_t start = pos_;
    const std::string_view word = keyword();
    if (word == "body" || word == "head") {
      expect("(");
      skip_ws();
      const std::size_t number = pos_;
      const Count id = parse_int();
      if (id > std::numeric_limits<Item>::max()) {
        pos_ = number;
        fail("item id out of range");
      }
      expect(")");
      return word == "body" ? Atom::body(static_cast<Item>(id)) : Atom::head(static_cast<Item>(id));
    }
    if (word == "support") {
      const bool ge = parse_comparison();
      const Count n = parse_int();
      return ge ? Atom::support_at_least(n) : Atom::support_below(n);
    }
    if (word == "confidence") {
      const bool ge = parse_comparison();
      const Ratio r = parse_number();
      return ge ? Atom::confidence_at_least(r) : Atom::confidence_below(r);
    }
    pos_ = start;
    fail(word.empty() ? "expected an atom" : "unknown atom '" + std::string(word) + "'");
  }

  bool parse_comparison() {
    if (accept(">=")) return true;
    if (accept("<")) return false;
    fail("expected '>=' or '<'");
  }

  Count parse_int() {
    skip_ws();
    const std::size_t start = pos_;
    Count value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const Count digit = static_cast<Count>(text_[pos_] - '0');
      if (value > (std::numeric_limits<Count>::max() - digit) / 10) {
        pos_ = start;
        fail("integer overflow");
      }
      value = value * 10 + digit;
      ++pos_;
    }
    if (pos_ == start) fail("expected an integer");
    return value;
  }

  Ratio parse_number() {
    skip_ws();
    const std::size_t start = pos_;
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    std::size_t digits = 0;
    bool fraction = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '.' && !fraction) {
        fraction = true;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        if (++digits > 17) {
          pos_ = start;
          fail("number has too many digits");
        }
        num = num * 10 + static_cast<std::uint64_t>(c - '0');
        if (fraction) den *= 10;
      } else {
        break;
      }
      ++pos_;
    }
    if (digits == 0) {
      pos_ = start;
      fail("expected a number");
    }
    if (accept("%")) den *= 100;
    const Ratio r(num, den);
    if (r > Ratio(1, 1)) throw RangeError(start, "confidence must lie within [0, 100]%");
    return r;
  }
};

void render_into(const QueryExpr& e, std::string& out, bool top) {
  switch (e.kind()) {
    case QueryExpr::Kind::leaf:
      out += render(e.atom());
      return;
    case QueryExpr::Kind::not_:
      out += '!';
      render_into(e.children().front(), out, false);
      return;
    case QueryExpr::Kind::and_:
    case QueryExpr::Kind::or_: {
      const char* sep = e.kind() == QueryExpr::Kind::and_ ? " & " : " | ";
      if (!top) out += '(';
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i) out += sep;
        render_into(e.children()[i], out, false);
      }
      if (!top) out += ')';
      return;
    }
  }
}

}  // namespace

QueryExpr parse_query(std::string_view text) { return Parser(text).parse(); }

std::string render(const Atom& a) {
  switch (a.kind) {
    case AtomKind::body_item: return "body(" + std::to_string(a.item) + ")";
    case AtomKind::head_item: return "head(" + std::to_string(a.item) + ")";
    case AtomKind::set_item: return "set(" + std::to_string(a.item) + ")";
    case AtomKind::support_ge: return "support >= " + std::to_string(a.count);
    case AtomKind::support_lt: return "support < " + std::to_string(a.count);
    case AtomKind::confidence_ge: return "confidence >= " + a.ratio.to_decimal();
    case AtomKind::confidence_lt: return "confidence < " + a.ratio.to_decimal();
  }
  return {};
}

std::string render(const QueryExpr& expr) {
  std::string out;
  render_into(expr, out, true);
  return out;
}

bool evaluate(const Atom& a, const RuleFacts& r) {
  switch (a.kind) {
    case AtomKind::body_item: return r.body.contains(a.item);
    case AtomKind::head_item: return r.head.contains(a.item);
    case AtomKind::set_item: return r.body.contains(a.item) || r.head.contains(a.item);
    case AtomKind::support_ge: return r.support >= a.count;
    case AtomKind::support_lt: return r.support < a.count;
    case AtomKind::confidence_ge: return r.confidence >= a.ratio;
    case AtomKind::confidence_lt: return r.confidence < a.ratio;
  }
  return false;
}

namespace {

template <typename Facts, typename LeafFn>
bool evaluate_tree(const QueryExpr& e, const Facts& facts, const LeafFn& leaf) {
  switch (e.kind()) {
    case QueryExpr::Kind::leaf: return leaf(e.atom(), facts);
    case QueryExpr::Kind::not_: return !evaluate_tree(e.children().front(), facts, leaf);
    case QueryExpr::Kind::and_:
      for (const auto& c : e.children())
        if (!evaluate_tree(c, facts, leaf)) return false;
      return true;
    case QueryExpr::Kind::or_:
      for (const auto& c : e.children())
        if (evaluate_tree(c, facts, leaf)) return true;
      return false;
  }
  return false;
}

bool evaluate_set_atom(const Atom& a, const SetFacts& s) {
  switch (a.kind) {
    case AtomKind::set_item: return s.items.contains(a.item);
    case AtomKind::support_ge: return s.support >= a.count;
    case AtomKind::support_lt: return s.support < a.count;
    default: return true;  // rule-only atoms do not constrain sets
  }
}

}  // namespace

bool evaluate(const QueryExpr& expr, const RuleFacts& rule) {
  return evaluate_tree(expr, rule, [](const Atom& a, const RuleFacts& r) { return evaluate(a, r); });
}

bool evaluate(const QueryExpr& expr, const SetFacts& set) {
  return evaluate_tree(expr, set, evaluate_set_atom);
}

}  // namespace qmine
