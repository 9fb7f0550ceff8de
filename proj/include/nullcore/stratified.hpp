#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nullcore/analysis.hpp"
#include "nullcore/chase.hpp"
#include "nullcore/model.hpp"

namespace nullcore {

enum class StratificationKind { Quasi, Full, CoreSafe };

std::string_view to_string(StratificationKind kind);

/// Strata hold rule indices into the rule set they were built for.
struct Stratification {
  std::vector<std::set<std::size_t>> strata;
  StratificationKind kind = StratificationKind::Quasi;

  bool operator==(const Stratification&) const = default;
};

/// Rule ids per stratum, in rule-set order.
std::vector<std::vector<std::string>> stratum_ids(const RuleSet& rules, const Stratification& s);

/// Every variable of the negative body sits on a position of the positive
/// body that is core-safe w.r.t. `rules` (negated atoms ignored).
bool rule_core_safe(const Rule& rule, const SafetyIndex& index);
bool rule_core_safe(std::size_t rule, const RuleSet& rules);

/// All rules core-safe and no negative reliance.
bool check_prop6(const RuleSet& rules);
bool check_prop6(const RuleSet& rules, const RelationGraph& graph);

/// Reason the strata fail to be a stratification of `kind`, or nothing.
std::optional<std::string> stratification_violation(const RuleSet& rules, const RelationGraph& graph,
                                                    const Stratification& s, StratificationKind kind);
bool is_stratification(const RuleSet& rules, const Stratification& s, StratificationKind kind);

/// Strongly connected components of ≺+ ∪ ≺− ∪ ⊐ in topological order, ties
/// broken by the smallest rule index.
std::vector<std::set<std::size_t>> ordered_components(const RelationGraph& graph);

/// Components in topological order, adjacent ones merged while the result
/// stays core-safe. Components on a ≺− edge stay on their own.
std::optional<Stratification> find_core_safe_stratification(const RuleSet& rules);
std::optional<Stratification> find_core_safe_stratification(const RuleSet& rules, const RelationGraph& graph);

/// Same construction with ⊐ required to go strictly forward.
std::optional<Stratification> find_full_stratification(const RuleSet& rules);
std::optional<Stratification> find_full_stratification(const RuleSet& rules, const RelationGraph& graph);

/// Throws InvalidTransformation unless left/right partition stratum i and
/// the result is still a stratification of the same kind.
Stratification split_stratum(const RuleSet& rules, const Stratification& s, std::size_t i,
                             const std::set<std::size_t>& left, const std::set<std::size_t>& right);

/// Merges strata i and i+1 (0-based).
Stratification merge_strata(const RuleSet& rules, const Stratification& s, std::size_t i);

struct StratumSummary {
  std::size_t stratum = 0;
  std::vector<std::string> rules;
  std::size_t added = 0;
  std::size_t removed = 0;
  std::size_t steps = 0;
};

struct CoreSafeChaseResult {
  // C^0 .. C^n.
  std::vector<Interpretation> cores;
  Interpretation final_model;
  std::vector<StratumSummary> summary;
};

/// Restricted chase per stratum followed by its core. The variant in `config`
/// is ignored. Throws StepLimitExceeded from the stratum that hits the cap.
CoreSafeChaseResult core_safe_chase(const RuleSet& rules, const Stratification& s, const Interpretation& database,
                                    const ChaseConfig& config);

/// Stratum-by-stratum restricted chase with a single core at the end.
Interpretation perfect_core_model(const RuleSet& rules, const Stratification& s, const Interpretation& database,
                                  const ChaseConfig& config);

}  // namespace nullcore
