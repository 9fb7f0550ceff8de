#include "nullcore/analysis.hpp"

#include <algorithm>
#include <functional>

namespace nullcore {
namespace {

// Generic terms of a witness are nulls numbered from zero.
class Witnesses {
 public:
  using Next = std::function<bool()>;

  Term fresh() { return Term::null(next_++); }

  // Assigns vars[i..] to terms of `pool` or to new generic terms, in
  // restricted-growth order. `k` returns true to stop the enumeration.
  bool assign(const std::vector<Term>& vars, std::size_t i, std::vector<Term>& pool, TermMap& h, const Next& k) {
    if (i == vars.size()) return k();
    const std::size_t n = pool.size();
    for (std::size_t j = 0; j < n; ++j) {
      h[vars[i]] = pool[j];
      if (assign(vars, i + 1, pool, h, k)) return true;
    }
    Term g = fresh();
    pool.push_back(g);
    h[vars[i]] = g;
    bool stop = assign(vars, i + 1, pool, h, k);
    pool.pop_back();
    --next_;
    h.erase(vars[i]);
    return stop;
  }

  // Extends `h` with a fresh null per existential variable.
  std::vector<Term> extend(const Rule& r, TermMap& h) {
    std::vector<Term> out;
    for (const auto& z : r.existential()) {
      Term n = fresh();
      h[z] = n;
      out.push_back(n);
    }
    return out;
  }

  void release(std::size_t count) { next_ -= count; }

 private:
  NullId next_ = 0;
};

std::vector<Term> rule_constants(const Rule& a, const Rule& b) {
  std::vector<Term> out;
  for (const Rule* r : {&a, &b}) {
    for (const auto* part : {&r->body_positive(), &r->body_negative(), &r->head()}) {
      for (const auto& t : terms_of(*part)) {
        if (t.is_constant() && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void add_terms(std::vector<Term>& pool, const Interpretation& instance) {
  for (const auto& t : instance.terms()) {
    if (std::find(pool.begin(), pool.end(), t) == pool.end()) pool.push_back(t);
  }
}

bool contains_any(const std::vector<Term>& terms, const Atom& a) {
  return std::any_of(a.args.begin(), a.args.end(),
                     [&](const Term& t) { return std::find(terms.begin(), terms.end(), t) != terms.end(); });
}

Interpretation union_of(const Interpretation& a, const std::vector<Atom>& extra) {
  Interpretation out = a;
  for (const auto& x : extra) out.insert(x);
  return out;
}

// Some atom of `produced` can be the image of an atom of `pattern` when only
// the terms in `free` may be remapped.
bool may_overlap(const std::vector<Atom>& pattern, const std::vector<Term>& free, const std::vector<Atom>& produced) {
  for (const auto& p : pattern) {
    for (const auto& a : produced) {
      if (p.predicate != a.predicate || p.args.size() != a.args.size()) continue;
      bool ok = true;
      for (std::size_t i = 0; i < p.args.size() && ok; ++i) {
        bool is_free = std::find(free.begin(), free.end(), p.args[i]) != free.end();
        ok = is_free || p.args[i] == a.args[i];
      }
      if (ok) return true;
    }
  }
  return false;
}

bool shares_predicate(const std::vector<Atom>& a, const std::vector<Atom>& b) {
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (x.predicate == y.predicate) return true;
    }
  }
  return false;
}

// Nulls of `nulls` missing from `atoms`.
std::vector<Term> dropped_nulls(const std::vector<Term>& nulls, const std::vector<Atom>& atoms) {
  auto present = terms_of(atoms);
  std::vector<Term> out;
  for (const auto& n : nulls) {
    if (std::find(present.begin(), present.end(), n) == present.end()) out.push_back(n);
  }
  return out;
}

// Some h: head → target fixing all non-null terms of `head` drops a null
// of `nulls`.
bool has_alternative(const std::vector<Atom>& head, const std::vector<Term>& nulls, const Interpretation& target) {
  TermMap fixed;
  for (const auto& t : terms_of(head)) {
    if (std::find(nulls.begin(), nulls.end(), t) == nulls.end()) fixed[t] = t;
  }
  return for_each_hom(head, target, fixed, {},
                      [&](const Homomorphism& h) { return dropped_nulls(nulls, substitute(h, head)).empty(); });
}

}  // namespace

PositionSet positions_of(const Term& var, const std::vector<Atom>& atoms) {
  PositionSet out;
  for (const auto& a : atoms) {
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (a.args[i] == var) out.insert(Position{a.predicate, i + 1});
    }
  }
  return out;
}

PositionSet all_positions(const RuleSet& rules) {
  PositionSet out;
  for (const auto& r : rules) {
    for (const auto* part : {&r.body_positive(), &r.body_negative(), &r.head()}) {
      for (const auto& a : *part) {
        for (std::size_t i = 0; i < a.args.size(); ++i) out.insert(Position{a.predicate, i + 1});
      }
    }
  }
  return out;
}

AffectionIndex compute_affection(const RuleSet& input) {
  RuleSet rules = rename_apart(input);
  struct Universal {
    PositionSet body;
    PositionSet head;
  };
  std::vector<Universal> universals;
  std::map<Term, std::size_t> rule_of;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const Rule& rule = rules[r];
    for (const auto& y : rule.body_variables()) {
      universals.push_back({positions_of(y, rule.body_positive()), positions_of(y, rule.head())});
    }
    for (const auto& z : rule.existential()) rule_of[z] = r;
  }

  AffectionIndex index;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    for (const auto& x : rules[r].existential()) {
      PositionSet omega = positions_of(x, rules[r].head());
      bool changed = true;
      while (changed) {
        changed = false;
        for (const auto& u : universals) {
          if (u.body.empty() || !std::includes(omega.begin(), omega.end(), u.body.begin(), u.body.end())) continue;
          for (const auto& p : u.head) changed = omega.insert(p).second || changed;
        }
      }
      index.jointly_affected.insert(omega.begin(), omega.end());
      index.omega[x] = std::move(omega);
    }
  }
  for (const auto& [x, omega] : index.omega) {
    for (const auto& [y, r] : rule_of) {
      const Rule& rule = rules[r];
      for (const auto& z : rule.frontier()) {
        PositionSet body = positions_of(z, rule.body_positive());
        if (std::includes(omega.begin(), omega.end(), body.begin(), body.end())) {
          index.leadsto.insert({x, y});
          break;
        }
      }
    }
  }
  return index;
}

PositionSet v_influenced(const std::set<Term>& V, const AffectionIndex& index) {
  std::set<Term> reached;
  std::vector<Term> stack(V.begin(), V.end());
  while (!stack.empty()) {
    Term x = stack.back();
    stack.pop_back();
    if (!reached.insert(x).second) continue;
    for (auto it = index.leadsto.lower_bound({x, Term()}); it != index.leadsto.end() && it->first == x; ++it) {
      stack.push_back(it->second);
    }
  }
  PositionSet out;
  for (const auto& y : reached) {
    if (auto it = index.omega.find(y); it != index.omega.end()) out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

std::optional<RestraintResult> restrains(const Rule& r1, const Rule& r2) {
  if (r2.existential().empty() || !shares_predicate(r1.head(), r2.head())) return std::nullopt;
  const Rule p1 = r1.positive_part();
  const Rule p2 = r2.positive_part();
  const auto constants = rule_constants(r1, r2);

  std::optional<RestraintResult> result;
  Witnesses w;
  std::vector<Term> pool = constants;
  TermMap h2;
  w.assign(r2.body_variables(), 0, pool, h2, [&] {
    Interpretation ia_pre(substitute(h2, r2.body_positive()));
    if (is_satisfied(p2, h2, ia_pre)) return false;
    TermMap ext2 = h2;
    auto n2 = w.extend(r2, ext2);
    const auto head2 = substitute(ext2, r2.head());
    Interpretation ia = union_of(ia_pre, head2);

    // A rule restrains itself within one application (I_a = I_b) when its
    // own head makes one of the fresh nulls redundant.
    if (r1.id() == r2.id()) {
      std::vector<Term> pool_alt = constants;
      add_terms(pool_alt, ia);
      TermMap alt;
      bool done = w.assign(n2, 0, pool_alt, alt, [&] {
        const auto image = substitute(alt, head2);
        auto dropped = dropped_nulls(n2, image);
        if (dropped.empty()) return false;
        std::vector<Atom> extra;
        for (const auto& a : image) {
          if (ia.contains(a)) continue;
          if (contains_any(n2, a)) return false;
          extra.push_back(a);
        }
        Interpretation ib_pre = union_of(ia_pre, extra);
        if (is_satisfied(p2, h2, ib_pre)) return false;
        Interpretation ib = union_of(ib_pre, head2);
        if (!is_generating(r2, h2, ib)) return false;
        if (has_alternative(head2, n2, ib.without(head2))) return false;
        if (!result) result = RestraintResult{RestraintWitness{ib, ib, ext2, ext2, alt}, {}};
        for (const auto& z : r2.existential()) {
          if (std::find(dropped.begin(), dropped.end(), ext2.at(z)) != dropped.end()) result->restrained.insert(z);
        }
        return result->restrained.size() == r2.existential().size();
      });
      if (done) {
        w.release(n2.size());
        return true;
      }
    }

    std::vector<Term> pool1 = constants;
    add_terms(pool1, ia);
    TermMap h1;
    bool stop = w.assign(r1.body_variables(), 0, pool1, h1, [&] {
      Interpretation ib_base = union_of(ia, substitute(h1, r1.body_positive()));
      TermMap ext1 = h1;
      auto n1 = w.extend(r1, ext1);
      const auto head1 = substitute(ext1, r1.head());
      Interpretation head1_set(head1);
      bool done = false;
      if (may_overlap(head2, n2, head1)) {
        std::vector<Term> pool_alt = constants;
        add_terms(pool_alt, ib_base);
        for (const auto& n : n1) pool_alt.push_back(n);
        TermMap alt;
        done = w.assign(n2, 0, pool_alt, alt, [&] {
          const auto image = substitute(alt, head2);
          auto dropped = dropped_nulls(n2, image);
          if (dropped.empty()) return false;
          bool overlap = false;
          std::vector<Atom> extra;
          for (const auto& a : image) {
            if (head1_set.contains(a)) {
              overlap = true;
            } else if (contains_any(n1, a)) {
              return false;
            } else {
              extra.push_back(a);
            }
          }
          if (!overlap) return false;
          Interpretation ib_pre = union_of(ib_base, extra);
          if (is_satisfied(p1, h1, ib_pre)) return false;
          Interpretation ib = union_of(ib_pre, head1);
          if (!is_generating(r1, h1, ib) || !is_generating(r2, h2, ib)) return false;

          // No alternative match avoiding r1's new atoms.
          if (has_alternative(head2, n2, ib.without(head1))) return false;

          if (!result) {
            result = RestraintResult{RestraintWitness{ia, ib, ext1, ext2, alt}, {}};
          }
          for (const auto& z : r2.existential()) {
            if (std::find(dropped.begin(), dropped.end(), ext2.at(z)) != dropped.end()) result->restrained.insert(z);
          }
          return result->restrained.size() == r2.existential().size();
        });
      }
      w.release(n1.size());
      return done;
    });
    w.release(n2.size());
    return stop;
  });
  return result;
}

RestraintReport restraint_report(const RuleSet& input) {
  RuleSet rules = rename_apart(input);
  RestraintReport report;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = 0; j < rules.size(); ++j) {
      auto r = restrains(rules[i], rules[j]);
      if (!r) continue;
      report.edges.insert({i, j});
      report.restrained_variables.insert(r->restrained.begin(), r->restrained.end());
      report.restrained_by_edge[{i, j}] = r->restrained;
      report.witnesses.emplace(RuleEdge{i, j}, std::move(r->witness));
    }
  }
  return report;
}

std::optional<RelianceWitness> positive_reliance_witness(const Rule& r1, const Rule& r2) {
  const Rule p1 = r1.positive_part();
  const Rule p2 = r2.positive_part();
  if (!shares_predicate(r1.head(), r2.body_positive())) return std::nullopt;
  const auto constants = rule_constants(r1, r2);

  std::optional<RelianceWitness> result;
  Witnesses w;
  std::vector<Term> pool = constants;
  TermMap h1;
  w.assign(r1.body_variables(), 0, pool, h1, [&] {
    const auto body1 = substitute(h1, r1.body_positive());
    TermMap ext1 = h1;
    auto n1 = w.extend(r1, ext1);
    Interpretation head1(substitute(ext1, r1.head()));
    std::vector<Term> pool2 = constants;
    add_terms(pool2, Interpretation(body1));
    for (const auto& n : n1) pool2.push_back(n);
    TermMap h2;
    bool stop = w.assign(r2.body_variables(), 0, pool2, h2, [&] {
      const auto body2 = substitute(h2, r2.body_positive());
      Interpretation ia(body1);
      for (const auto& a : body2) {
        if (head1.contains(a)) continue;
        if (contains_any(n1, a)) return false;
        ia.insert(a);
      }
      bool uses_new = std::any_of(body2.begin(), body2.end(), [&](const Atom& a) { return !ia.contains(a); });
      if (!uses_new) return false;
      if (is_satisfied(p1, h1, ia)) return false;
      Interpretation ib = ia;
      ib.insert_all(head1);
      if (is_satisfied(p2, h2, ib)) return false;
      result = RelianceWitness{ia, ib, ext1, h2};
      return true;
    });
    w.release(n1.size());
    return stop;
  });
  return result;
}

bool positive_reliance(const Rule& r1, const Rule& r2) { return positive_reliance_witness(r1, r2).has_value(); }

std::optional<RelianceWitness> negative_reliance_witness(const Rule& r1, const Rule& r2) {
  if (r2.body_negative().empty() || !shares_predicate(r1.head(), r2.body_negative())) return std::nullopt;
  const Rule p1 = r1.positive_part();
  const Rule p2 = r2.positive_part();
  const auto constants = rule_constants(r1, r2);

  std::optional<RelianceWitness> result;
  Witnesses w;
  std::vector<Term> pool = constants;
  TermMap h2;
  w.assign(r2.body_variables(), 0, pool, h2, [&] {
    Interpretation ia_pre(substitute(h2, r2.body_positive()));
    if (is_satisfied(p2, h2, ia_pre)) return false;
    TermMap ext2 = h2;
    auto n2 = w.extend(r2, ext2);
    Interpretation ia = union_of(ia_pre, substitute(ext2, r2.head()));
    const auto blocked = substitute(h2, r2.body_negative());

    std::vector<Term> pool1 = constants;
    add_terms(pool1, ia);
    TermMap h1;
    bool stop = w.assign(r1.body_variables(), 0, pool1, h1, [&] {
      TermMap ext1 = h1;
      auto n1 = w.extend(r1, ext1);
      const auto head1 = substitute(ext1, r1.head());
      Interpretation head1_set(head1);
      bool found = false;
      bool hits = std::any_of(blocked.begin(), blocked.end(), [&](const Atom& a) { return head1_set.contains(a); });
      if (hits) {
        // I_a ⊆ I_b, with I_a's atoms that r1 produces left to r1.
        Interpretation ib_pre = union_of(ia.without(head1), substitute(h1, r1.body_positive()));
        if (!is_satisfied(p1, h1, ib_pre)) {
          Interpretation ib = union_of(ib_pre, head1);
          Interpretation reduced = ib.without(head1);
          if (is_generating(r2, h2, reduced) && !is_generating(r2, h2, ib)) {
            result = RelianceWitness{ia, ib, ext1, ext2};
            found = true;
          }
        }
      }
      w.release(n1.size());
      return found;
    });
    w.release(n2.size());
    return stop;
  });
  return result;
}

bool negative_reliance(const Rule& r1, const Rule& r2) { return negative_reliance_witness(r1, r2).has_value(); }

RelationGraph compute_relations(const RuleSet& input) {
  RuleSet rules = rename_apart(input);
  RelationGraph g;
  g.size = rules.size();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = 0; j < rules.size(); ++j) {
      if (positive_reliance(rules[i], rules[j])) g.positive.insert({i, j});
      if (negative_reliance(rules[i], rules[j])) g.negative.insert({i, j});
    }
  }
  g.restraints = restraint_report(rules);
  g.restraint = g.restraints.edges;
  return g;
}

SafetyIndex compute_safety(const RuleSet& rules, const RestraintReport& restraints) {
  SafetyIndex s;
  s.renamed = rename_apart(rules);
  s.affection = compute_affection(s.renamed);
  s.restrained = restraints.restrained_variables;
  s.influenced = v_influenced(s.restrained, s.affection);
  for (const auto& p : all_positions(s.renamed)) {
    if (!s.influenced.contains(p)) s.core_safe.insert(p);
  }
  return s;
}

SafetyIndex compute_safety(const RuleSet& rules) { return compute_safety(rules, restraint_report(rules)); }

PositionSet core_safe_positions(const RuleSet& rules) { return compute_safety(rules).core_safe; }

std::string_view to_string(SafetyLevel level) {
  switch (level) {
    case SafetyLevel::BCQ: return "BCQ";
    case SafetyLevel::AffectionSafe: return "affection-safe";
    case SafetyLevel::CoreSafe: return "core-safe";
    case SafetyLevel::EffectivelyCoreSafe: return "effectively-core-safe";
    case SafetyLevel::Unsafe: return "unsafe";
  }
  return "unsafe";
}

std::set<Term> effectively_restrained(const SafetyIndex& index, const RestraintReport& restraints,
                                      const std::vector<ChaseStep>& trace) {
  std::set<Term> out;
  std::set<std::size_t> later;
  // Walk backwards so `later` holds the rules applied at step j or after.
  // Step j itself counts because a rule can restrain its own application.
  for (auto it = trace.rbegin(); it != trace.rend(); ++it) {
    later.insert(it->rule);
    const Rule& rule = index.renamed[it->rule];
    for (const auto& x : rule.existential()) {
      if (!restraints.restrained_variables.contains(x)) continue;
      bool hit = std::any_of(later.begin(), later.end(),
                             [&](std::size_t k) { return restraints.edges.contains({k, it->rule}); });
      if (hit) out.insert(x);
    }
  }
  return out;
}

SafetyClassification classify_query(const Query& q, const SafetyIndex& index, const RestraintReport& restraints,
                                    const std::vector<ChaseStep>* trace) {
  SafetyClassification out;
  if (q.is_bcq()) {
    out.level = SafetyLevel::BCQ;
    return out;
  }
  auto negative_vars = variables_of(q.negative());

  // Every negated variable has a position in q+ outside `bad`.
  auto safe_with = [&](const PositionSet& bad) {
    std::map<Term, Position> picks;
    for (const auto& x : negative_vars) {
      std::vector<Position> ok;
      for (const auto& p : positions_of(x, q.positive())) {
        if (!bad.contains(p)) ok.push_back(p);
      }
      if (ok.empty()) return std::optional<std::map<Term, Position>>();
      picks[x] = *std::min_element(ok.begin(), ok.end(), name_order);
    }
    return std::optional(picks);
  };

  if (auto p = safe_with(index.affection.jointly_affected)) {
    out.level = SafetyLevel::AffectionSafe;
    out.witness_positions = *p;
  } else if (auto p2 = safe_with(index.influenced)) {
    out.level = SafetyLevel::CoreSafe;
    out.witness_positions = *p2;
  } else if (trace) {
    auto rs = effectively_restrained(index, restraints, *trace);
    if (auto p3 = safe_with(v_influenced(rs, index.affection))) {
      out.level = SafetyLevel::EffectivelyCoreSafe;
      out.witness_positions = *p3;
    }
  }
  return out;
}

SafetyClassification classify_query(const Query& q, const RuleSet& rules, const std::vector<ChaseStep>* trace) {
  auto restraints = restraint_report(rules);
  auto index = compute_safety(rules, restraints);
  return classify_query(q, index, restraints, trace);
}

}  // namespace nullcore
