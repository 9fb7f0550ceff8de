#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "nullcore/chase.hpp"
#include "nullcore/model.hpp"

namespace nullcore {

using PositionSet = std::set<Position>;
using RuleEdge = std::pair<std::size_t, std::size_t>;

struct AffectionIndex {
  // Ω_x for every existential variable x.
  std::map<Term, PositionSet> omega;
  std::set<std::pair<Term, Term>> leadsto;
  PositionSet jointly_affected;
};

/// Positions of `var` in the given atoms.
PositionSet positions_of(const Term& var, const std::vector<Atom>& atoms);

/// Every position of every predicate used in the rules, negated atoms included.
PositionSet all_positions(const RuleSet& rules);

/// Least fixpoint of the Ω-closure, on rename_apart(rules). Negated body
/// atoms are ignored.
AffectionIndex compute_affection(const RuleSet& rules);

/// Positions in Ω_y for some y reachable from V under ⤳*. V holds variables
/// of the renamed-apart set.
PositionSet v_influenced(const std::set<Term>& V, const AffectionIndex& index);

/// Witness of r1 ⊐ r2. ia ⊆ ib; h2 and h1 are the extended matches.
struct RestraintWitness {
  Interpretation ia;
  Interpretation ib;
  Homomorphism h1;
  Homomorphism h2;
  Homomorphism alternative;
};

struct RestraintResult {
  RestraintWitness witness;
  // Union over all canonical witnesses.
  std::set<Term> restrained;
};

/// Decides r1 ⊐ r2 over canonical witnesses: r2 is applied first, then r1,
/// and the alternative match of r2's head needs an atom r1 produced. For
/// normal rules both matches must be generating on the final instance.
std::optional<RestraintResult> restrains(const Rule& r1, const Rule& r2);

struct RestraintReport {
  std::set<RuleEdge> edges;
  std::set<Term> restrained_variables;
  std::map<RuleEdge, std::set<Term>> restrained_by_edge;
  std::map<RuleEdge, RestraintWitness> witnesses;
};

/// Over rename_apart(rules), all ordered pairs including r1 = r2.
RestraintReport restraint_report(const RuleSet& rules);

struct RelianceWitness {
  Interpretation ia;
  Interpretation ib;
  Homomorphism h1;
  Homomorphism h2;
};

/// r1 ≺+ r2 on the positive parts: applying r1 yields a new unsatisfied
/// match of r2.
std::optional<RelianceWitness> positive_reliance_witness(const Rule& r1, const Rule& r2);
bool positive_reliance(const Rule& r1, const Rule& r2);

/// r1 ≺− r2: applying r1 blocks an earlier application of r2.
std::optional<RelianceWitness> negative_reliance_witness(const Rule& r1, const Rule& r2);
bool negative_reliance(const Rule& r1, const Rule& r2);

struct RelationGraph {
  std::size_t size = 0;
  std::set<RuleEdge> positive;
  std::set<RuleEdge> negative;
  std::set<RuleEdge> restraint;
  RestraintReport restraints;
};

RelationGraph compute_relations(const RuleSet& rules);

/// Core-safe positions w.r.t. a rule subset: all positions of `rules` that
/// are not influenced by variables restrained within the subset.
struct SafetyIndex {
  RuleSet renamed;
  AffectionIndex affection;
  std::set<Term> restrained;
  PositionSet influenced;
  PositionSet core_safe;
};

/// `edges` are the restraints among `rules` (indices into `rules`).
SafetyIndex compute_safety(const RuleSet& rules, const RestraintReport& restraints);
SafetyIndex compute_safety(const RuleSet& rules);

PositionSet core_safe_positions(const RuleSet& rules);

enum class SafetyLevel { BCQ, AffectionSafe, CoreSafe, EffectivelyCoreSafe, Unsafe };

std::string_view to_string(SafetyLevel level);

struct SafetyClassification {
  SafetyLevel level = SafetyLevel::Unsafe;
  // For each variable of the negative part, one safe position of q+ it occupies.
  std::map<Term, Position> witness_positions;
};

/// Restrained variables whose rule was applied at some step j with a step
/// k ≥ j applying a rule that restrains it (k = j only for self-restraint).
std::set<Term> effectively_restrained(const SafetyIndex& index, const RestraintReport& restraints,
                                      const std::vector<ChaseStep>& trace);

SafetyClassification classify_query(const Query& q, const SafetyIndex& index, const RestraintReport& restraints,
                                    const std::vector<ChaseStep>* trace = nullptr);
SafetyClassification classify_query(const Query& q, const RuleSet& rules, const std::vector<ChaseStep>* trace = nullptr);

}  // namespace nullcore
