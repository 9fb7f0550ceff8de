#pragma once

#include <optional>
#include <string>

#include "nullcore/analysis.hpp"
#include "nullcore/chase.hpp"
#include "nullcore/hom.hpp"
#include "nullcore/model.hpp"
#include "nullcore/stratified.hpp"

namespace nullcore {

enum class ModelUsed { Core, RestrictedChase, AnyChase, Padded };
enum class AnswerMode { Auto, Core, Chase };

std::string_view to_string(ModelUsed m);
std::string_view to_string(AnswerMode m);

struct EntailmentAnswer {
  std::string query_name;
  bool entailed = false;
  SafetyClassification classification;
  ModelUsed model_used = ModelUsed::Core;
  // h: q+ → model with h(q−) disjoint from the model.
  std::optional<Homomorphism> witness;
  std::optional<std::string> warning;
};

/// A homomorphism h: q+ → I with h(q−) ∩ I = ∅, if any.
std::optional<Homomorphism> evaluate(const Query& q, const Interpretation& instance);

/// Shared materialization for one (Σ, D, config). Chases and the core are
/// computed on first use and reused for every query.
///
/// Plain rule sets and normal ones meeting the no-negative-reliance,
/// all-rules-core-safe condition use the restricted chase directly. Other
/// normal rule sets take their core model from the core-safe chase.
class EntailmentSession {
 public:
  EntailmentSession(RuleSet rules, Interpretation database, ChaseConfig config, bool assume_finite_core = false);

  const RuleSet& rules() const noexcept { return rules_; }
  const ChaseConfig& config() const noexcept { return config_; }

  /// False when the core model comes from a core-safe stratification.
  bool chase_is_sound();

  /// The chase run with the configured variant and strategy.
  const ChaseResult& configured_chase();
  /// A restricted chase under the configured strategy and seed.
  const ChaseResult& restricted_chase();
  const Interpretation& core_model();

  SafetyClassification classify(const Query& q);
  EntailmentAnswer answer(const Query& q, AnswerMode mode = AnswerMode::Auto);

 private:
  const ChaseResult& run(std::optional<ChaseResult>& slot, const ChaseConfig& cfg);
  const RelationGraph& graph();
  EntailmentAnswer on(const Query& q, const Interpretation& model, ModelUsed used, SafetyClassification c);

  RuleSet rules_;
  Interpretation database_;
  ChaseConfig config_;
  bool assume_finite_core_;
  bool truncated_ = false;
  bool plain_;
  std::optional<RelationGraph> graph_;
  std::optional<bool> sound_;
  std::optional<ChaseResult> configured_;
  std::optional<ChaseResult> restricted_;
  std::optional<Interpretation> core_;
  std::optional<RestraintReport> restraints_;
  std::optional<SafetyIndex> safety_;
};

/// Restricted chase, its core, and q evaluated there. Throws
/// StepLimitExceeded when the chase does not finish.
EntailmentAnswer core_entails(const RuleSet& rules, const Interpretation& database, const Query& q,
                              const ChaseConfig& config = {});

/// Dispatches q to the cheapest model its safety class allows.
/// AnswerMode::Chase throws UnsafeQueryInChaseMode for unsafe queries.
EntailmentAnswer answer(const Query& q, const RuleSet& rules, const Interpretation& database,
                        const ChaseConfig& config = {}, AnswerMode mode = AnswerMode::Auto);

/// D with q+ instantiated by fresh nulls, then chased. Requires plain rules,
/// q+ entailed, and no α in q− derived at its padded instantiation; throws
/// PreconditionViolated otherwise.
Interpretation build_padded_universal(const RuleSet& rules, const Interpretation& database, const Query& q,
                                      const ChaseConfig& config = {});

}  // namespace nullcore
