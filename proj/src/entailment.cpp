#include "nullcore/entailment.hpp"

#include <algorithm>

#include "nullcore/error.hpp"

namespace nullcore {

std::string_view to_string(ModelUsed m) {
  switch (m) {
    case ModelUsed::Core: return "core";
    case ModelUsed::RestrictedChase: return "restricted-chase";
    case ModelUsed::AnyChase: return "any-chase";
    case ModelUsed::Padded: return "padded";
  }
  return "core";
}

std::string_view to_string(AnswerMode m) {
  switch (m) {
    case AnswerMode::Auto: return "auto";
    case AnswerMode::Core: return "core";
    case AnswerMode::Chase: return "chase";
  }
  return "auto";
}

std::optional<Homomorphism> evaluate(const Query& q, const Interpretation& instance) {
  return find_match(q.positive(), instance, {}, q.negative());
}

EntailmentSession::EntailmentSession(RuleSet rules, Interpretation database, ChaseConfig config,
                                     bool assume_finite_core)
    : rules_(std::move(rules)),
      database_(std::move(database)),
      config_(config),
      assume_finite_core_(assume_finite_core),
      plain_(std::all_of(rules_.begin(), rules_.end(), [](const Rule& r) { return r.is_plain(); })) {}

const RelationGraph& EntailmentSession::graph() {
  if (!graph_) graph_ = compute_relations(rules_);
  return *graph_;
}

bool EntailmentSession::chase_is_sound() {
  if (!sound_) sound_ = plain_ || check_prop6(rules_, graph());
  return *sound_;
}

const ChaseResult& EntailmentSession::run(std::optional<ChaseResult>& slot, const ChaseConfig& cfg) {
  if (!slot) {
    ChaseResult r = chase(rules_, database_, cfg);
    if (!r.terminated) {
      if (!assume_finite_core_) throw StepLimitExceeded(std::move(r));
      truncated_ = true;
    }
    slot = std::move(r);
  }
  return *slot;
}

const ChaseResult& EntailmentSession::restricted_chase() {
  ChaseConfig cfg = config_;
  cfg.variant = ChaseVariant::Restricted;
  return run(restricted_, cfg);
}

const ChaseResult& EntailmentSession::configured_chase() {
  // Negation is only meaningful under the restricted variant.
  if (config_.variant == ChaseVariant::Restricted || !plain_) return restricted_chase();
  return run(configured_, config_);
}

const Interpretation& EntailmentSession::core_model() {
  if (core_) return *core_;
  if (chase_is_sound()) {
    core_ = core_of(restricted_chase().instance);
    return *core_;
  }
  auto s = find_core_safe_stratification(rules_, graph());
  if (!s) throw Error(ErrorCode::NoStratification, "rule set has no core-safe stratification");
  ChaseConfig cfg = config_;
  cfg.variant = ChaseVariant::Restricted;
  core_ = core_safe_chase(rules_, *s, database_, cfg).final_model;
  return *core_;
}

SafetyClassification EntailmentSession::classify(const Query& q) {
  if (!restraints_) {
    restraints_ = graph().restraints;
    safety_ = compute_safety(rules_, *restraints_);
  }
  SafetyClassification c = classify_query(q, *safety_, *restraints_);
  if (c.level == SafetyLevel::Unsafe && chase_is_sound()) {
    c = classify_query(q, *safety_, *restraints_, &restricted_chase().trace);
  }
  return c;
}

EntailmentAnswer EntailmentSession::on(const Query& q, const Interpretation& model, ModelUsed used,
                                       SafetyClassification c) {
  EntailmentAnswer a;
  a.query_name = q.name();
  a.classification = std::move(c);
  a.model_used = used;
  a.witness = evaluate(q, model);
  a.entailed = a.witness.has_value();
  if (assume_finite_core_) {
    a.warning = truncated_ ? "chase stopped at the step cap; answer assumes the partial result has a finite core"
                           : "answer assumes a finite core model";
  }
  return a;
}

EntailmentAnswer EntailmentSession::answer(const Query& q, AnswerMode mode) {
  SafetyClassification c = classify(q);
  if (mode == AnswerMode::Core) return on(q, core_model(), ModelUsed::Core, std::move(c));
  if (mode == AnswerMode::Chase) {
    if (c.level == SafetyLevel::Unsafe) {
      throw Error(ErrorCode::UnsafeQueryInChaseMode, "query " + q.name() + " is unsafe; chase mode cannot answer it");
    }
    if (!chase_is_sound()) {
      throw Error(ErrorCode::UnsafeQueryInChaseMode,
                  "query " + q.name() + ": rule set needs stratified evaluation; chase mode cannot answer it");
    }
  }
  if (!chase_is_sound()) return on(q, core_model(), ModelUsed::Core, std::move(c));
  switch (c.level) {
    case SafetyLevel::BCQ:
    case SafetyLevel::AffectionSafe:
      return on(q, configured_chase().instance, ModelUsed::AnyChase, std::move(c));
    case SafetyLevel::CoreSafe:
    case SafetyLevel::EffectivelyCoreSafe:
      return on(q, restricted_chase().instance, ModelUsed::RestrictedChase, std::move(c));
    case SafetyLevel::Unsafe:
      break;
  }
  return on(q, core_model(), ModelUsed::Core, std::move(c));
}

EntailmentAnswer core_entails(const RuleSet& rules, const Interpretation& database, const Query& q,
                              const ChaseConfig& config) {
  EntailmentSession session(rules, database, config);
  return session.answer(q, AnswerMode::Core);
}

EntailmentAnswer answer(const Query& q, const RuleSet& rules, const Interpretation& database,
                        const ChaseConfig& config, AnswerMode mode) {
  EntailmentSession session(rules, database, config);
  return session.answer(q, mode);
}

Interpretation build_padded_universal(const RuleSet& rules, const Interpretation& database, const Query& q,
                                      const ChaseConfig& config) {
  if (!std::all_of(rules.begin(), rules.end(), [](const Rule& r) { return r.is_plain(); })) {
    throw Error(ErrorCode::PreconditionViolated, "padding needs a rule set without negation");
  }
  EntailmentSession session(rules, database, config);
  const Interpretation& core = session.core_model();
  if (!find_match(q.positive(), core)) {
    throw Error(ErrorCode::PreconditionViolated, "positive part of " + q.name() + " is not entailed");
  }
  NullId next = database.max_null() ? *database.max_null() + 1 : 0;
  TermMap nu;
  for (const auto& v : q.variables()) nu[v] = Term::null(next++);
  Interpretation padded = database;
  for (const auto& a : q.positive()) padded.insert(substitute(nu, a));
  Interpretation u = run_chase(rules, padded, config).instance;
  // Universality needs only the positive part; the negated atoms must stay
  // underived at their padded instantiation.
  for (const auto& alpha : q.negative()) {
    Atom grounded = substitute(nu, alpha);
    if (u.contains(grounded)) {
      throw Error(ErrorCode::PreconditionViolated,
                  "padded instance of " + q.name() + " derives " + grounded.to_string());
    }
  }
  return u;
}

}  // namespace nullcore
