#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ranges>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nullcore/symbol.hpp"

namespace nullcore {

using NullId = std::uint64_t;

enum class TermKind : std::uint8_t { Constant, Null, Variable };

/// A constant, a labelled null or a variable. Constants and variables carry an
/// interned name; nulls carry a numeric id that is unique within a session.
class Term {
 public:
  Term() = default;

  static Term constant(std::string_view name) { return Term(TermKind::Constant, Symbol(name).id()); }
  static Term variable(std::string_view name) { return Term(TermKind::Variable, Symbol(name).id()); }
  static Term null(NullId id) { return Term(TermKind::Null, id); }

  TermKind kind() const noexcept { return kind_; }
  bool is_constant() const noexcept { return kind_ == TermKind::Constant; }
  bool is_null() const noexcept { return kind_ == TermKind::Null; }
  bool is_variable() const noexcept { return kind_ == TermKind::Variable; }

  NullId null_id() const noexcept { return value_; }
  // Name of a constant or variable. Empty for nulls.
  std::string_view name() const;
  // Constants and variables print as their name, nulls as `_:n<id>`.
  std::string to_string() const;

  std::uint64_t raw() const noexcept { return value_; }

  auto operator<=>(const Term&) const = default;

 private:
  Term(TermKind kind, std::uint64_t value) : kind_(kind), value_(value) {}

  TermKind kind_ = TermKind::Constant;
  std::uint64_t value_ = 0;
};

struct Atom {
  Symbol predicate;
  std::vector<Term> args;

  Atom() = default;
  Atom(Symbol p, std::vector<Term> a) : predicate(p), args(std::move(a)) {}
  Atom(std::string_view p, std::vector<Term> a) : predicate(p), args(std::move(a)) {}

  std::size_t arity() const noexcept { return args.size(); }
  bool is_ground() const;
  std::string to_string() const;

  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

using TermMap = std::map<Term, Term>;

Term substitute(const TermMap& map, const Term& t);
Atom substitute(const TermMap& map, const Atom& a);
std::vector<Atom> substitute(const TermMap& map, const std::vector<Atom>& atoms);

/// Distinct terms of the given atoms in order of first occurrence.
std::vector<Term> terms_of(const std::vector<Atom>& atoms);
std::vector<Term> variables_of(const std::vector<Atom>& atoms);

/// Predicate arities, fixed at first use.
class Signature {
 public:
  // Throws ArityMismatch when `atom` disagrees with a registered arity.
  void check_and_register(const Atom& atom, std::string_view context);
  std::optional<std::size_t> arity(Symbol predicate) const;
  const std::map<Symbol, std::size_t>& arities() const noexcept { return arities_; }

 private:
  std::map<Symbol, std::size_t> arities_;
};

/// Rule as written, before its quantifier structure is checked.
struct RuleSyntax {
  std::string id;
  std::vector<Atom> body_positive;
  std::vector<Atom> body_negative;
  std::vector<Atom> head;
  // Variables declared existential. Empty for Datalog-style rules; the parser
  // fills it with the head variables missing from the positive body.
  std::vector<Term> existential;
};

/// A validated (normal) existential rule. Only validate_rule creates these.
class Rule {
 public:
  const std::string& id() const noexcept { return id_; }
  const std::vector<Atom>& body_positive() const noexcept { return body_positive_; }
  const std::vector<Atom>& body_negative() const noexcept { return body_negative_; }
  const std::vector<Atom>& head() const noexcept { return head_; }
  // Sorted, duplicate free.
  const std::vector<Term>& frontier() const noexcept { return frontier_; }
  const std::vector<Term>& existential() const noexcept { return existential_; }
  // Positive-body variables in order of first occurrence.
  const std::vector<Term>& body_variables() const noexcept { return body_variables_; }

  bool is_plain() const noexcept { return body_negative_.empty(); }
  bool is_datalog() const noexcept { return existential_.empty(); }
  bool is_existential(const Term& v) const;

  // The rule with its negative body dropped.
  Rule positive_part() const;
  // Same rule with every variable renamed through `renaming`.
  Rule renamed(const TermMap& renaming) const;

  std::string to_string() const;

  bool operator==(const Rule&) const = default;

 private:
  friend Rule validate_rule(const RuleSyntax& syntax, Signature* signature);
  Rule() = default;

  std::string id_;
  std::vector<Atom> body_positive_;
  std::vector<Atom> body_negative_;
  std::vector<Atom> head_;
  std::vector<Term> frontier_;
  std::vector<Term> existential_;
  std::vector<Term> body_variables_;
};

/// Checks the rule invariants and computes the frontier/existential split.
/// Throws Error with UnsafeFrontier, UnsafeNegation, ArityMismatch,
/// NullInRule or ExistentialInBody.
Rule validate_rule(const RuleSyntax& syntax, Signature* signature = nullptr);

class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<Rule> rules, bool renamed_apart = false)
      : rules_(std::move(rules)), renamed_apart_(renamed_apart) {}

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  const Rule& operator[](std::size_t i) const { return rules_[i]; }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }
  bool renamed_apart() const noexcept { return renamed_apart_; }

  auto begin() const { return rules_.begin(); }
  auto end() const { return rules_.end(); }

  std::optional<std::size_t> index_of(std::string_view id) const;
  // Rules at the given indices, in that order; keeps the renamed-apart flag.
  RuleSet subset(const std::vector<std::size_t>& indices) const;

 private:
  std::vector<Rule> rules_;
  bool renamed_apart_ = false;
};

/// Renames the variables of rule k (1-based) by appending "#k". Idempotent on
/// sets already flagged renamed-apart.
RuleSet rename_apart(const RuleSet& rules);

// Printable name of a term; renamed variables keep their "#k" suffix.
std::string display_name(const Term& variable);

struct QuerySyntax {
  std::string name;
  std::vector<Atom> positive;
  std::vector<Atom> negative;
};

class Query {
 public:
  const std::string& name() const noexcept { return name_; }
  const std::vector<Atom>& positive() const noexcept { return positive_; }
  const std::vector<Atom>& negative() const noexcept { return negative_; }
  const std::vector<Term>& variables() const noexcept { return variables_; }
  bool is_bcq() const noexcept { return negative_.empty(); }

  std::string to_string() const;

 private:
  friend Query validate_query(const QuerySyntax& syntax, Signature* signature);
  Query() = default;

  std::string name_;
  std::vector<Atom> positive_;
  std::vector<Atom> negative_;
  std::vector<Term> variables_;
};

/// Throws Error with UnsafeNegation, TrivialQuery, NullInRule or ArityMismatch.
Query validate_query(const QuerySyntax& syntax, Signature* signature = nullptr);

/// Argument slot ⟨p,i⟩ of a predicate, 1-based.
struct Position {
  Symbol predicate;
  std::size_t index = 0;

  std::string to_string() const;
  auto operator<=>(const Position&) const = default;
};

// Orders positions by predicate name, then index.
bool name_order(const Position& a, const Position& b);

struct PredicateKey {
  Symbol predicate;
};

// Atom order with heterogeneous lookup by predicate.
struct AtomLess {
  using is_transparent = void;
  bool operator()(const Atom& a, const Atom& b) const { return a < b; }
  bool operator()(const Atom& a, PredicateKey k) const { return a.predicate < k.predicate; }
  bool operator()(PredicateKey k, const Atom& a) const { return k.predicate < a.predicate; }
};

/// Finite set of variable-free atoms, kept ordered by (predicate, args).
class Interpretation {
 public:
  using AtomSet = std::set<Atom, AtomLess>;
  using const_iterator = AtomSet::const_iterator;

  Interpretation() = default;
  Interpretation(std::initializer_list<Atom> atoms);
  explicit Interpretation(const std::vector<Atom>& atoms);

  // Throws PreconditionViolated for atoms with variables.
  bool insert(const Atom& atom);
  bool erase(const Atom& atom) { return atoms_.erase(atom) > 0; }
  bool contains(const Atom& atom) const { return atoms_.contains(atom); }

  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }
  const_iterator begin() const { return atoms_.begin(); }
  const_iterator end() const { return atoms_.end(); }

  // All atoms with the given predicate.
  std::ranges::subrange<const_iterator> with_predicate(Symbol predicate) const;
  const_iterator lower_bound(const Atom& atom) const { return atoms_.lower_bound(atom); }

  std::set<NullId> nulls() const;
  std::set<Term> terms() const;
  std::optional<NullId> max_null() const;
  bool is_database() const;

  std::vector<Atom> atoms() const { return {atoms_.begin(), atoms_.end()}; }
  Interpretation without(const std::vector<Atom>& atoms) const;
  void insert_all(const Interpretation& other);
  bool includes(const Interpretation& other) const;

  bool operator==(const Interpretation&) const = default;

 private:
  AtomSet atoms_;
};

Interpretation substitute(const TermMap& map, const Interpretation& instance);

}  // namespace nullcore

template <>
struct std::hash<nullcore::Term> {
  std::size_t operator()(const nullcore::Term& t) const noexcept {
    return std::hash<std::uint64_t>{}(t.raw() * 4 + static_cast<std::uint64_t>(t.kind()));
  }
};
