#include "nullcore/hom.hpp"

#include <algorithm>
#include <map>

#include "nullcore/error.hpp"

namespace nullcore {
namespace {

bool is_search_term(const Term& t) { return t.is_variable() || t.is_null(); }

// An atom whose arguments are either resolved terms or search-variable slots.
struct Pattern {
  Symbol predicate;
  std::vector<int> slot;      // -1 when the argument is resolved
  std::vector<Term> resolved;
};

class Search {
 public:
  Search(const std::vector<Atom>& source, const Interpretation& target, const TermMap& fixed,
         const std::vector<Atom>& forbidden, HomOptions options)
      : target_(target), fixed_(fixed), options_(options) {
    for (const auto& a : source) {
      for (const auto& t : a.args) {
        if (is_search_term(t) && !fixed.contains(t) && !index_.contains(t)) {
          index_.emplace(t, static_cast<int>(vars_.size()));
          vars_.push_back(t);
        }
      }
    }
    value_.assign(vars_.size(), std::nullopt);
    order_atoms(source);
    place_forbidden(forbidden);
    if (options_.injective) init_used(source);
  }

  bool run(const HomVisitor& visit) {
    if (!consistent_) return false;
    for (const auto& f : forbidden_initial_) {
      if (target_.contains(instantiate(f))) return false;
    }
    visit_ = &visit;
    return descend(0);
  }

 private:
  Pattern make_pattern(const Atom& a) const {
    Pattern p;
    p.predicate = a.predicate;
    p.slot.reserve(a.args.size());
    p.resolved.reserve(a.args.size());
    for (const auto& t : a.args) {
      if (auto it = index_.find(t); it != index_.end()) {
        p.slot.push_back(it->second);
        p.resolved.push_back(Term());
      } else if (auto f = fixed_.find(t); f != fixed_.end()) {
        p.slot.push_back(-1);
        p.resolved.push_back(f->second);
      } else {
        if (t.is_variable()) throw Error(ErrorCode::PreconditionViolated, "unbound variable " + t.to_string() + " in " + a.to_string());
        p.slot.push_back(-1);
        p.resolved.push_back(t);
      }
    }
    return p;
  }

  // Greedy order: next atom is the one with the most arguments already bound,
  // ties broken by fewer target candidates, then source order.
  void order_atoms(const std::vector<Atom>& source) {
    std::vector<Pattern> pending;
    std::vector<std::size_t> counts;
    for (const auto& a : source) {
      pending.push_back(make_pattern(a));
      auto range = target_.with_predicate(a.predicate);
      counts.push_back(static_cast<std::size_t>(std::distance(range.begin(), range.end())));
    }
    std::vector<bool> bound(vars_.size(), false);
    std::vector<bool> done(pending.size(), false);
    bound_after_.clear();
    for (std::size_t step = 0; step < pending.size(); ++step) {
      std::size_t best = pending.size();
      long best_score = -1;
      for (std::size_t i = 0; i < pending.size(); ++i) {
        if (done[i]) continue;
        long score = 0;
        for (auto s : pending[i].slot) {
          if (s < 0 || bound[s]) ++score;
        }
        if (best == pending.size() || score > best_score || (score == best_score && counts[i] < counts[best])) {
          best = i;
          best_score = score;
        }
      }
      done[best] = true;
      for (auto s : pending[best].slot) {
        if (s >= 0) bound[s] = true;
      }
      atoms_.push_back(pending[best]);
      bound_after_.push_back(bound);
    }
  }

  void place_forbidden(const std::vector<Atom>& forbidden) {
    forbidden_at_.assign(atoms_.size(), {});
    for (const auto& a : forbidden) {
      Pattern p = make_pattern(a);
      std::optional<std::size_t> depth;
      bool any_slot = false;
      for (auto s : p.slot) any_slot = any_slot || s >= 0;
      if (!any_slot) {
        forbidden_initial_.push_back(p);
        continue;
      }
      for (std::size_t d = 0; d < atoms_.size() && !depth; ++d) {
        bool all = std::all_of(p.slot.begin(), p.slot.end(), [&](int s) { return s < 0 || bound_after_[d][s]; });
        if (all) depth = d;
      }
      if (!depth) throw Error(ErrorCode::PreconditionViolated, "forbidden atom " + a.to_string() + " has unbound terms");
      forbidden_at_[*depth].push_back(p);
    }
  }

  void init_used(const std::vector<Atom>& source) {
    std::map<Term, Term> image_of;
    for (const auto& a : source) {
      for (const auto& t : a.args) {
        if (index_.contains(t)) continue;
        Term img = t;
        if (auto f = fixed_.find(t); f != fixed_.end()) img = f->second;
        auto [it, inserted] = image_of.emplace(t, img);
        (void)it;
        if (!inserted) continue;
        if (!used_.insert(img).second) consistent_ = false;
      }
    }
  }

  Atom instantiate(const Pattern& p) const {
    Atom a;
    a.predicate = p.predicate;
    a.args.reserve(p.slot.size());
    for (std::size_t i = 0; i < p.slot.size(); ++i) {
      a.args.push_back(p.slot[i] < 0 ? p.resolved[i] : *value_[p.slot[i]]);
    }
    return a;
  }

  std::optional<Term> known(const Pattern& p, std::size_t i) const {
    if (p.slot[i] < 0) return p.resolved[i];
    return value_[p.slot[i]];
  }

  bool descend(std::size_t depth) {
    if (depth == atoms_.size()) return emit();
    const Pattern& p = atoms_[depth];
    if (p.slot.empty()) {
      Atom a(p.predicate, {});
      if (!target_.contains(a)) return false;
      return after_assign(depth);
    }
    auto first = known(p, 0);
    auto it = first ? target_.lower_bound(Atom(p.predicate, {*first})) : target_.with_predicate(p.predicate).begin();
    for (; it != target_.end(); ++it) {
      const Atom& cand = *it;
      if (cand.predicate != p.predicate) break;
      if (first && cand.args[0] != *first) break;
      if (cand.args.size() != p.slot.size()) continue;
      std::vector<int> assigned;
      if (try_bind(p, cand, assigned)) {
        if (after_assign(depth)) return true;
      }
      for (int s : assigned) {
        if (options_.injective) used_.erase(*value_[s]);
        value_[s].reset();
      }
    }
    return false;
  }

  bool try_bind(const Pattern& p, const Atom& cand, std::vector<int>& assigned) {
    for (std::size_t i = 0; i < p.slot.size(); ++i) {
      const Term& t = cand.args[i];
      int s = p.slot[i];
      if (s < 0) {
        if (p.resolved[i] != t) return false;
        continue;
      }
      if (value_[s]) {
        if (*value_[s] != t) return false;
        continue;
      }
      if (options_.nulls_to_nulls && !t.is_null()) return false;
      if (options_.injective && !used_.insert(t).second) return false;
      value_[s] = t;
      assigned.push_back(s);
    }
    return true;
  }

  bool after_assign(std::size_t depth) {
    for (const auto& f : forbidden_at_[depth]) {
      if (target_.contains(instantiate(f))) return false;
    }
    return descend(depth + 1);
  }

  bool emit() {
    Homomorphism h = fixed_;
    for (std::size_t i = 0; i < vars_.size(); ++i) h[vars_[i]] = *value_[i];
    return !(*visit_)(h);
  }

  const Interpretation& target_;
  const TermMap& fixed_;
  HomOptions options_;
  std::vector<Term> vars_;
  std::map<Term, int> index_;
  std::vector<std::optional<Term>> value_;
  std::vector<Pattern> atoms_;
  std::vector<std::vector<bool>> bound_after_;
  std::vector<std::vector<Pattern>> forbidden_at_;
  std::vector<Pattern> forbidden_initial_;
  std::set<Term> used_;
  bool consistent_ = true;
  const HomVisitor* visit_ = nullptr;
};

// Union-find over the nulls of an instance; two nulls share a block when
// they occur together in an atom.
std::map<NullId, NullId> null_blocks(const Interpretation& instance) {
  std::map<NullId, NullId> parent;
  std::function<NullId(NullId)> find = [&](NullId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& a : instance) {
    std::optional<NullId> first;
    for (const auto& t : a.args) {
      if (!t.is_null()) continue;
      parent.try_emplace(t.null_id(), t.null_id());
      if (!first) {
        first = t.null_id();
      } else {
        auto ra = find(*first), rb = find(t.null_id());
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }
  std::map<NullId, NullId> root;
  for (const auto& [n, p] : parent) root[n] = find(n);
  return root;
}

bool mentions_null(const Atom& a, NullId n) {
  return std::any_of(a.args.begin(), a.args.end(), [n](const Term& t) { return t.is_null() && t.null_id() == n; });
}

// One retraction round: a map on some block's nulls whose image avoids a
// null of that block.
std::optional<Homomorphism> find_shrinking_map(const Interpretation& instance) {
  auto blocks = null_blocks(instance);
  std::map<NullId, std::vector<Atom>> block_atoms;
  for (const auto& a : instance) {
    for (const auto& t : a.args) {
      if (t.is_null()) {
        block_atoms[blocks.at(t.null_id())].push_back(a);
        break;
      }
    }
  }
  for (const auto& [n, root] : blocks) {
    Interpretation target;
    for (const auto& a : instance) {
      if (!mentions_null(a, n)) target.insert(a);
    }
    if (auto h = find_match(block_atoms.at(root), target)) return h;
  }
  return std::nullopt;
}

Homomorphism compose(const Homomorphism& outer, const Homomorphism& inner) {
  Homomorphism out;
  for (const auto& [k, v] : inner) out[k] = substitute(outer, v);
  for (const auto& [k, v] : outer) out.try_emplace(k, v);
  return out;
}

}  // namespace

bool for_each_hom(const std::vector<Atom>& source, const Interpretation& target, const TermMap& fixed,
                  const std::vector<Atom>& forbidden, const HomVisitor& visit, HomOptions options) {
  Search search(source, target, fixed, forbidden, options);
  return search.run(visit);
}

std::optional<Homomorphism> find_match(const std::vector<Atom>& source, const Interpretation& target,
                                       const TermMap& fixed, const std::vector<Atom>& forbidden, HomOptions options) {
  std::optional<Homomorphism> found;
  for_each_hom(source, target, fixed, forbidden,
               [&](const Homomorphism& h) {
                 found = h;
                 return false;
               },
               options);
  return found;
}

std::vector<Homomorphism> enumerate_homs(const std::vector<Atom>& source, const Interpretation& target,
                                         const TermMap& fixed, const std::vector<Atom>& forbidden) {
  std::vector<Homomorphism> out;
  for_each_hom(source, target, fixed, forbidden, [&](const Homomorphism& h) {
    out.push_back(h);
    return true;
  });
  return out;
}

std::optional<Homomorphism> find_hom(const Interpretation& from, const Interpretation& to, HomOptions options) {
  return find_match(from.atoms(), to, {}, {}, options);
}

bool hom_equivalent(const Interpretation& a, const Interpretation& b) {
  return find_hom(a, b).has_value() && find_hom(b, a).has_value();
}

std::string_view to_string(HomClass c) {
  switch (c) {
    case HomClass::NotAHomomorphism: return "none";
    case HomClass::Plain: return "plain";
    case HomClass::Strong: return "strong";
    case HomClass::Embedding: return "embedding";
    case HomClass::Isomorphism: return "isomorphism";
  }
  return "none";
}

HomClass classify_hom(const Homomorphism& h, const Interpretation& source, const Interpretation& target) {
  for (const auto& [k, v] : h) {
    if (k.is_constant() && k != v) return HomClass::NotAHomomorphism;
  }
  for (const auto& a : source) {
    if (!target.contains(substitute(h, a))) return HomClass::NotAHomomorphism;
  }

  std::map<Term, std::vector<Term>> preimage;
  for (const auto& t : source.terms()) preimage[substitute(h, t)].push_back(t);

  // Strong: every target atom over image terms is the image of each of its
  // preimage tuples.
  for (const auto& b : target) {
    bool covered = std::all_of(b.args.begin(), b.args.end(), [&](const Term& t) { return preimage.contains(t); });
    if (!covered) continue;
    std::vector<std::size_t> pick(b.args.size(), 0);
    while (true) {
      Atom pre;
      pre.predicate = b.predicate;
      for (std::size_t i = 0; i < b.args.size(); ++i) pre.args.push_back(preimage[b.args[i]][pick[i]]);
      if (!source.contains(pre)) return HomClass::Plain;
      std::size_t i = 0;
      for (; i < pick.size(); ++i) {
        if (++pick[i] < preimage[b.args[i]].size()) break;
        pick[i] = 0;
      }
      if (i == pick.size()) break;
    }
  }

  bool injective = std::all_of(preimage.begin(), preimage.end(), [](const auto& kv) { return kv.second.size() == 1; });
  if (!injective) return HomClass::Strong;
  if (target.terms().size() == preimage.size()) return HomClass::Isomorphism;
  return HomClass::Embedding;
}

CoreResult compute_core(const Interpretation& instance) {
  CoreResult result{instance, {}};
  for (const auto& t : instance.terms()) {
    if (t.is_null()) result.retraction[t] = t;
  }
  while (auto h = find_shrinking_map(result.core)) {
    result.core = substitute(*h, result.core);
    result.retraction = compose(*h, result.retraction);
  }
  return result;
}

Interpretation core_of(const Interpretation& instance) { return compute_core(instance).core; }

bool is_core(const Interpretation& instance) { return !find_shrinking_map(instance).has_value(); }

Homomorphism find_core_embedding(const Interpretation& core, const Interpretation& universal) {
  auto h = find_hom(core, universal);
  if (!h) throw Error(ErrorCode::NoHomomorphism, "no homomorphism from the core into the universal model");
  auto cls = classify_hom(*h, core, universal);
  if (cls != HomClass::Embedding && cls != HomClass::Isomorphism) {
    throw Error(ErrorCode::NoHomomorphism, "homomorphism from the core is not an embedding");
  }
  return *h;
}

bool is_isomorphic(const Interpretation& a, const Interpretation& b) {
  if (a.size() != b.size()) return false;
  auto ta = a.terms(), tb = b.terms();
  if (ta.size() != tb.size()) return false;
  std::vector<Term> ca, cb;
  std::copy_if(ta.begin(), ta.end(), std::back_inserter(ca), [](const Term& t) { return t.is_constant(); });
  std::copy_if(tb.begin(), tb.end(), std::back_inserter(cb), [](const Term& t) { return t.is_constant(); });
  if (ca != cb) return false;

  // Cheap invariant: atom counts per predicate.
  std::map<Symbol, std::size_t> pa, pb;
  for (const auto& x : a) ++pa[x.predicate];
  for (const auto& x : b) ++pb[x.predicate];
  if (pa != pb) return false;

  // An injective nulls-to-nulls homomorphism between equal-sized instances
  // maps atoms onto atoms, hence is an isomorphism.
  return find_hom(a, b, HomOptions{.injective = true, .nulls_to_nulls = true}).has_value();
}

}  // namespace nullcore
