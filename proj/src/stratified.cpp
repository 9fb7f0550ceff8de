#include "nullcore/stratified.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>

#include "nullcore/error.hpp"
#include "nullcore/hom.hpp"

namespace nullcore {
namespace {

std::vector<std::size_t> as_vector(const std::set<std::size_t>& s) { return {s.begin(), s.end()}; }

std::set<RuleEdge> combined_edges(const RelationGraph& g) {
  std::set<RuleEdge> all = g.positive;
  all.insert(g.negative.begin(), g.negative.end());
  all.insert(g.restraint.begin(), g.restraint.end());
  return all;
}

bool subset_core_safe(const RuleSet& rules, const std::set<std::size_t>& stratum) {
  RuleSet sub = rules.subset(as_vector(stratum));
  if (std::all_of(sub.begin(), sub.end(), [](const Rule& r) { return r.is_plain(); })) return true;
  SafetyIndex index = compute_safety(sub);
  return std::all_of(sub.begin(), sub.end(), [&](const Rule& r) { return rule_core_safe(r, index); });
}

bool has_internal(const std::set<RuleEdge>& edges, const std::set<std::size_t>& nodes) {
  return std::any_of(edges.begin(), edges.end(),
                     [&](const RuleEdge& e) { return nodes.contains(e.first) && nodes.contains(e.second); });
}

bool touches(const std::set<RuleEdge>& edges, const std::set<std::size_t>& nodes) {
  return std::any_of(edges.begin(), edges.end(),
                     [&](const RuleEdge& e) { return nodes.contains(e.first) || nodes.contains(e.second); });
}

void self_check(const RuleSet& rules, const RelationGraph& graph, const Stratification& s) {
  if (auto why = stratification_violation(rules, graph, s, s.kind)) {
    throw Error(ErrorCode::InvalidTransformation, "synthesized stratification is invalid: " + *why);
  }
}

std::optional<Stratification> synthesize(const RuleSet& rules, const RelationGraph& graph, StratificationKind kind) {
  Stratification out;
  out.kind = kind;
  if (rules.empty()) return out;
  auto components = ordered_components(graph);
  for (const auto& c : components) {
    if (has_internal(graph.negative, c)) return std::nullopt;
    if (kind == StratificationKind::Full && has_internal(graph.restraint, c)) return std::nullopt;
    if (!subset_core_safe(rules, c)) return std::nullopt;
  }
  bool prev_locked = false;
  for (const auto& c : components) {
    bool locked = touches(graph.negative, c);
    if (!out.strata.empty() && !locked && !prev_locked) {
      std::set<std::size_t> merged = out.strata.back();
      merged.insert(c.begin(), c.end());
      bool ok = !has_internal(graph.negative, merged) && subset_core_safe(rules, merged);
      if (kind == StratificationKind::Full) ok = ok && !has_internal(graph.restraint, merged);
      if (ok) {
        out.strata.back() = std::move(merged);
        continue;
      }
    }
    out.strata.push_back(c);
    prev_locked = locked;
  }
  self_check(rules, graph, out);
  return out;
}

Interpretation chase_stratum(const RuleSet& rules, const std::set<std::size_t>& stratum, const Interpretation& input,
                             const ChaseConfig& config, std::size_t* steps) {
  ChaseConfig cfg = config;
  cfg.variant = ChaseVariant::Restricted;
  ChaseResult r = run_chase(rules.subset(as_vector(stratum)), input, cfg);
  if (steps) *steps = r.steps_used;
  return std::move(r.instance);
}

}  // namespace

std::string_view to_string(StratificationKind kind) {
  switch (kind) {
    case StratificationKind::Quasi: return "quasi";
    case StratificationKind::Full: return "full";
    case StratificationKind::CoreSafe: return "core-safe";
  }
  return "quasi";
}

std::vector<std::vector<std::string>> stratum_ids(const RuleSet& rules, const Stratification& s) {
  std::vector<std::vector<std::string>> out;
  for (const auto& stratum : s.strata) {
    std::vector<std::string> ids;
    for (auto i : stratum) ids.push_back(rules[i].id());
    out.push_back(std::move(ids));
  }
  return out;
}

bool rule_core_safe(const Rule& rule, const SafetyIndex& index) {
  for (const auto& x : variables_of(rule.body_negative())) {
    bool found = false;
    for (const auto& p : positions_of(x, rule.body_positive())) {
      if (index.core_safe.contains(p)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

bool rule_core_safe(std::size_t rule, const RuleSet& rules) {
  if (rules[rule].is_plain()) return true;
  return rule_core_safe(rules[rule], compute_safety(rules));
}

bool check_prop6(const RuleSet& rules) { return check_prop6(rules, compute_relations(rules)); }

bool check_prop6(const RuleSet& rules, const RelationGraph& graph) {
  if (!graph.negative.empty()) return false;
  if (std::all_of(rules.begin(), rules.end(), [](const Rule& r) { return r.is_plain(); })) return true;
  SafetyIndex index = compute_safety(rules, graph.restraints);
  return std::all_of(rules.begin(), rules.end(), [&](const Rule& r) { return rule_core_safe(r, index); });
}

std::optional<std::string> stratification_violation(const RuleSet& rules, const RelationGraph& graph,
                                                    const Stratification& s, StratificationKind kind) {
  std::map<std::size_t, std::vector<std::size_t>> where;
  for (std::size_t k = 0; k < s.strata.size(); ++k) {
    if (s.strata[k].empty()) return "stratum " + std::to_string(k + 1) + " is empty";
    for (auto r : s.strata[k]) {
      if (r >= rules.size()) return "unknown rule index " + std::to_string(r);
      where[r].push_back(k);
    }
  }
  for (std::size_t r = 0; r < rules.size(); ++r) {
    if (!where.contains(r)) return "rule " + rules[r].id() + " is in no stratum";
  }
  auto check = [&](const std::set<RuleEdge>& edges, bool strict, std::string_view rel) -> std::optional<std::string> {
    for (const auto& [a, b] : edges) {
      for (auto i : where[a]) {
        for (auto j : where[b]) {
          if (strict ? i < j : i <= j) continue;
          return rules[a].id() + " " + std::string(rel) + " " + rules[b].id() + " but strata " +
                 std::to_string(i + 1) + ", " + std::to_string(j + 1);
        }
      }
    }
    return std::nullopt;
  };
  if (auto v = check(graph.positive, false, "<+")) return v;
  if (auto v = check(graph.negative, true, "<-")) return v;
  if (auto v = check(graph.restraint, kind == StratificationKind::Full, "restrains")) return v;
  if (kind == StratificationKind::CoreSafe) {
    for (std::size_t k = 0; k < s.strata.size(); ++k) {
      if (!subset_core_safe(rules, s.strata[k])) return "stratum " + std::to_string(k + 1) + " is not core-safe";
    }
  }
  return std::nullopt;
}

bool is_stratification(const RuleSet& rules, const Stratification& s, StratificationKind kind) {
  return !stratification_violation(rules, compute_relations(rules), s, kind).has_value();
}

std::vector<std::set<std::size_t>> ordered_components(const RelationGraph& graph) {
  const std::size_t n = graph.size;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [a, b] : combined_edges(graph)) adj[a].push_back(b);

  // Tarjan.
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> comp_of(n, 0);
  std::vector<std::set<std::size_t>> comps;
  int counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (auto w : adj[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::set<std::size_t> c;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        c.insert(w);
        comp_of[w] = comps.size();
      } while (w != v);
      comps.push_back(std::move(c));
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }

  // Kahn on the condensation, smallest member first.
  const std::size_t m = comps.size();
  std::vector<std::set<std::size_t>> succ(m);
  std::vector<std::size_t> indegree(m, 0);
  for (const auto& [a, b] : combined_edges(graph)) {
    auto ca = comp_of[a], cb = comp_of[b];
    if (ca != cb && succ[ca].insert(cb).second) ++indegree[cb];
  }
  using Item = std::pair<std::size_t, std::size_t>;  // (smallest rule, component)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (std::size_t c = 0; c < m; ++c) {
    if (indegree[c] == 0) ready.push({*comps[c].begin(), c});
  }
  std::vector<std::set<std::size_t>> out;
  while (!ready.empty()) {
    auto [_, c] = ready.top();
    ready.pop();
    out.push_back(comps[c]);
    for (auto d : succ[c]) {
      if (--indegree[d] == 0) ready.push({*comps[d].begin(), d});
    }
  }
  return out;
}

std::optional<Stratification> find_core_safe_stratification(const RuleSet& rules) {
  return find_core_safe_stratification(rules, compute_relations(rules));
}

std::optional<Stratification> find_core_safe_stratification(const RuleSet& rules, const RelationGraph& graph) {
  return synthesize(rules, graph, StratificationKind::CoreSafe);
}

std::optional<Stratification> find_full_stratification(const RuleSet& rules) {
  return find_full_stratification(rules, compute_relations(rules));
}

std::optional<Stratification> find_full_stratification(const RuleSet& rules, const RelationGraph& graph) {
  return synthesize(rules, graph, StratificationKind::Full);
}

Stratification split_stratum(const RuleSet& rules, const Stratification& s, std::size_t i,
                             const std::set<std::size_t>& left, const std::set<std::size_t>& right) {
  if (i >= s.strata.size()) throw Error(ErrorCode::InvalidTransformation, "no stratum " + std::to_string(i + 1));
  if (left.empty() || right.empty()) throw Error(ErrorCode::InvalidTransformation, "split parts must be non-empty");
  std::set<std::size_t> joined = left;
  joined.insert(right.begin(), right.end());
  if (joined != s.strata[i]) {
    throw Error(ErrorCode::InvalidTransformation, "split parts do not cover stratum " + std::to_string(i + 1));
  }
  Stratification out = s;
  out.strata[i] = left;
  out.strata.insert(out.strata.begin() + static_cast<std::ptrdiff_t>(i) + 1, right);
  if (auto why = stratification_violation(rules, compute_relations(rules), out, s.kind)) {
    throw Error(ErrorCode::InvalidTransformation, "split is invalid: " + *why);
  }
  return out;
}

Stratification merge_strata(const RuleSet& rules, const Stratification& s, std::size_t i) {
  if (i + 1 >= s.strata.size()) {
    throw Error(ErrorCode::InvalidTransformation, "cannot merge stratum " + std::to_string(i + 1) + " with its successor");
  }
  Stratification out = s;
  out.strata[i].insert(s.strata[i + 1].begin(), s.strata[i + 1].end());
  out.strata.erase(out.strata.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  if (auto why = stratification_violation(rules, compute_relations(rules), out, s.kind)) {
    throw Error(ErrorCode::InvalidTransformation, "merge is invalid: " + *why);
  }
  return out;
}

CoreSafeChaseResult core_safe_chase(const RuleSet& rules, const Stratification& s, const Interpretation& database,
                                    const ChaseConfig& config) {
  CoreSafeChaseResult out;
  out.cores.push_back(database);
  for (std::size_t k = 0; k < s.strata.size(); ++k) {
    const Interpretation& before = out.cores.back();
    StratumSummary row;
    row.stratum = k + 1;
    for (auto r : s.strata[k]) row.rules.push_back(rules[r].id());
    Interpretation chased = chase_stratum(rules, s.strata[k], before, config, &row.steps);
    Interpretation core = core_of(chased);
    row.added = chased.size() - before.size();
    row.removed = chased.size() - core.size();
    out.summary.push_back(std::move(row));
    out.cores.push_back(std::move(core));
  }
  out.final_model = out.cores.back();
  return out;
}

Interpretation perfect_core_model(const RuleSet& rules, const Stratification& s, const Interpretation& database,
                                  const ChaseConfig& config) {
  Interpretation current = database;
  for (const auto& stratum : s.strata) current = chase_stratum(rules, stratum, current, config, nullptr);
  return core_of(current);
}

}  // namespace nullcore
