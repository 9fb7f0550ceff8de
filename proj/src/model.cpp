#include "nullcore/model.hpp"

#include <algorithm>
#include <sstream>

#include "nullcore/error.hpp"

namespace nullcore {
namespace {

void append_unique(std::vector<Term>& out, const Term& t) {
  if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
}

bool contains_term(const std::vector<Term>& terms, const Term& t) {
  return std::find(terms.begin(), terms.end(), t) != terms.end();
}

std::vector<Atom> dedup(const std::vector<Atom>& atoms) {
  std::vector<Atom> out;
  for (const auto& a : atoms) {
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

void join_atoms(std::ostringstream& os, const std::vector<Atom>& atoms, const char* prefix = "") {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i > 0) os << ", ";
    os << prefix << atoms[i].to_string();
  }
}

void reject_nulls(const std::vector<Atom>& atoms, const std::string& context) {
  for (const auto& a : atoms) {
    for (const auto& t : a.args) {
      if (t.is_null()) throw Error(ErrorCode::NullInRule, context + ": null " + t.to_string() + " in " + a.to_string());
    }
  }
}

}  // namespace

std::string_view Term::name() const {
  if (is_null()) return {};
  return Symbol::from_id(static_cast<std::uint32_t>(value_)).str();
}

std::string Term::to_string() const {
  if (is_null()) return "_:n" + std::to_string(value_);
  return std::string(name());
}

bool Atom::is_ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_constant(); });
}

std::string Atom::to_string() const {
  std::string out(predicate.str());
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) out += ',';
    out += args[i].to_string();
  }
  out += ')';
  return out;
}

Term substitute(const TermMap& map, const Term& t) {
  auto it = map.find(t);
  return it == map.end() ? t : it->second;
}

Atom substitute(const TermMap& map, const Atom& a) {
  Atom out;
  out.predicate = a.predicate;
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(substitute(map, t));
  return out;
}

std::vector<Atom> substitute(const TermMap& map, const std::vector<Atom>& atoms) {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(substitute(map, a));
  return out;
}

std::vector<Term> terms_of(const std::vector<Atom>& atoms) {
  std::vector<Term> out;
  for (const auto& a : atoms) {
    for (const auto& t : a.args) append_unique(out, t);
  }
  return out;
}

std::vector<Term> variables_of(const std::vector<Atom>& atoms) {
  std::vector<Term> out;
  for (const auto& a : atoms) {
    for (const auto& t : a.args) {
      if (t.is_variable()) append_unique(out, t);
    }
  }
  return out;
}

void Signature::check_and_register(const Atom& atom, std::string_view context) {
  auto [it, inserted] = arities_.emplace(atom.predicate, atom.arity());
  if (!inserted && it->second != atom.arity()) {
    std::ostringstream os;
    os << context << ": predicate " << atom.predicate.str() << " used with arity " << atom.arity()
       << " but registered with arity " << it->second;
    throw Error(ErrorCode::ArityMismatch, os.str());
  }
}

std::optional<std::size_t> Signature::arity(Symbol predicate) const {
  if (auto it = arities_.find(predicate); it != arities_.end()) return it->second;
  return std::nullopt;
}

bool Rule::is_existential(const Term& v) const { return std::binary_search(existential_.begin(), existential_.end(), v); }

Rule Rule::positive_part() const {
  Rule r = *this;
  r.body_negative_.clear();
  return r;
}

Rule Rule::renamed(const TermMap& renaming) const {
  Rule r;
  r.id_ = id_;
  r.body_positive_ = substitute(renaming, body_positive_);
  r.body_negative_ = substitute(renaming, body_negative_);
  r.head_ = substitute(renaming, head_);
  for (const auto& v : frontier_) r.frontier_.push_back(substitute(renaming, v));
  for (const auto& v : existential_) r.existential_.push_back(substitute(renaming, v));
  for (const auto& v : body_variables_) r.body_variables_.push_back(substitute(renaming, v));
  std::sort(r.frontier_.begin(), r.frontier_.end());
  std::sort(r.existential_.begin(), r.existential_.end());
  return r;
}

std::string Rule::to_string() const {
  std::ostringstream os;
  join_atoms(os, head_);
  os << " :- ";
  join_atoms(os, body_positive_);
  if (!body_negative_.empty()) {
    os << ", ";
    join_atoms(os, body_negative_, "~");
  }
  os << " .";
  return os.str();
}

Rule validate_rule(const RuleSyntax& syntax, Signature* signature) {
  const std::string context = "rule " + syntax.id;
  reject_nulls(syntax.body_positive, context);
  reject_nulls(syntax.body_negative, context);
  reject_nulls(syntax.head, context);

  Signature local;
  Signature& sig = signature ? *signature : local;
  for (const auto* part : {&syntax.body_positive, &syntax.body_negative, &syntax.head}) {
    for (const auto& a : *part) sig.check_and_register(a, context);
  }

  Rule r;
  r.id_ = syntax.id;
  r.body_positive_ = dedup(syntax.body_positive);
  r.body_negative_ = dedup(syntax.body_negative);
  r.head_ = dedup(syntax.head);
  r.body_variables_ = variables_of(r.body_positive_);

  for (const auto& v : syntax.existential) {
    if (contains_term(r.body_variables_, v) || contains_term(variables_of(r.body_negative_), v)) {
      throw Error(ErrorCode::ExistentialInBody, context + ": existential variable " + v.to_string() + " occurs in the body");
    }
  }
  for (const auto& v : variables_of(r.body_negative_)) {
    if (!contains_term(r.body_variables_, v)) {
      throw Error(ErrorCode::UnsafeNegation,
                  context + ": variable " + v.to_string() + " of a negated atom does not occur in the positive body");
    }
  }
  for (const auto& v : variables_of(r.head_)) {
    if (contains_term(r.body_variables_, v)) {
      append_unique(r.frontier_, v);
    } else if (contains_term(syntax.existential, v)) {
      append_unique(r.existential_, v);
    } else {
      throw Error(ErrorCode::UnsafeFrontier,
                  context + ": head variable " + v.to_string() + " is neither existential nor bound in the positive body");
    }
  }
  std::sort(r.frontier_.begin(), r.frontier_.end());
  std::sort(r.existential_.begin(), r.existential_.end());
  return r;
}

std::optional<std::size_t> RuleSet::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (rules_[i].id() == id) return i;
  }
  return std::nullopt;
}

RuleSet RuleSet::subset(const std::vector<std::size_t>& indices) const {
  std::vector<Rule> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(rules_.at(i));
  return RuleSet(std::move(out), renamed_apart_);
}

RuleSet rename_apart(const RuleSet& rules) {
  if (rules.renamed_apart()) return rules;
  std::vector<Rule> out;
  out.reserve(rules.size());
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Rule& r = rules[i];
    TermMap renaming;
    std::vector<Term> vars = variables_of(r.body_positive());
    for (const auto& v : variables_of(r.head())) append_unique(vars, v);
    for (const auto& v : vars) {
      renaming.emplace(v, Term::variable(std::string(v.name()) + "#" + std::to_string(i + 1)));
    }
    out.push_back(r.renamed(renaming));
  }
  return RuleSet(std::move(out), true);
}

std::string display_name(const Term& variable) { return variable.to_string(); }

std::string Query::to_string() const {
  std::ostringstream os;
  os << "?" << name_ << " :- ";
  join_atoms(os, positive_);
  if (!negative_.empty()) {
    os << ", ";
    join_atoms(os, negative_, "~");
  }
  os << " .";
  return os.str();
}

Query validate_query(const QuerySyntax& syntax, Signature* signature) {
  const std::string context = "query " + syntax.name;
  reject_nulls(syntax.positive, context);
  reject_nulls(syntax.negative, context);
  Signature local;
  Signature& sig = signature ? *signature : local;
  for (const auto* part : {&syntax.positive, &syntax.negative}) {
    for (const auto& a : *part) sig.check_and_register(a, context);
  }

  Query q;
  q.name_ = syntax.name;
  q.positive_ = dedup(syntax.positive);
  q.negative_ = dedup(syntax.negative);
  q.variables_ = variables_of(q.positive_);
  for (const auto& v : variables_of(q.negative_)) {
    if (!contains_term(q.variables_, v)) {
      throw Error(ErrorCode::UnsafeNegation,
                  context + ": variable " + v.to_string() + " of a negated atom does not occur positively");
    }
  }
  for (const auto& a : q.negative_) {
    if (std::find(q.positive_.begin(), q.positive_.end(), a) != q.positive_.end()) {
      throw Error(ErrorCode::TrivialQuery, context + ": atom " + a.to_string() + " occurs both positively and negatively");
    }
  }
  return q;
}

std::string Position::to_string() const {
  return "<" + std::string(predicate.str()) + "," + std::to_string(index) + ">";
}

bool name_order(const Position& a, const Position& b) {
  auto pa = a.predicate.str(), pb = b.predicate.str();
  if (pa != pb) return pa < pb;
  return a.index < b.index;
}

Interpretation::Interpretation(std::initializer_list<Atom> atoms) {
  for (const auto& a : atoms) insert(a);
}

Interpretation::Interpretation(const std::vector<Atom>& atoms) {
  for (const auto& a : atoms) insert(a);
}

bool Interpretation::insert(const Atom& atom) {
  for (const auto& t : atom.args) {
    if (t.is_variable()) {
      throw Error(ErrorCode::PreconditionViolated, "interpretation atom with variable: " + atom.to_string());
    }
  }
  return atoms_.insert(atom).second;
}

std::ranges::subrange<Interpretation::const_iterator> Interpretation::with_predicate(Symbol predicate) const {
  auto [lo, hi] = atoms_.equal_range(PredicateKey{predicate});
  return {lo, hi};
}

std::set<NullId> Interpretation::nulls() const {
  std::set<NullId> out;
  for (const auto& a : atoms_) {
    for (const auto& t : a.args) {
      if (t.is_null()) out.insert(t.null_id());
    }
  }
  return out;
}

std::set<Term> Interpretation::terms() const {
  std::set<Term> out;
  for (const auto& a : atoms_) out.insert(a.args.begin(), a.args.end());
  return out;
}

std::optional<NullId> Interpretation::max_null() const {
  auto ns = nulls();
  if (ns.empty()) return std::nullopt;
  return *ns.rbegin();
}

bool Interpretation::is_database() const {
  return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.is_ground(); });
}

Interpretation Interpretation::without(const std::vector<Atom>& atoms) const {
  Interpretation out = *this;
  for (const auto& a : atoms) out.atoms_.erase(a);
  return out;
}

void Interpretation::insert_all(const Interpretation& other) { atoms_.insert(other.begin(), other.end()); }

bool Interpretation::includes(const Interpretation& other) const {
  return std::includes(atoms_.begin(), atoms_.end(), other.begin(), other.end(), AtomLess{});
}

Interpretation substitute(const TermMap& map, const Interpretation& instance) {
  Interpretation out;
  for (const auto& a : instance) out.insert(substitute(map, a));
  return out;
}

}  // namespace nullcore
