#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nullcore/error.hpp"
#include "nullcore/hom.hpp"
#include "nullcore/model.hpp"

namespace nullcore {

enum class ChaseVariant { Restricted, Skolem, Oblivious };
enum class ChaseStrategy { Fifo, DatalogFirst, Random };

std::string_view to_string(ChaseVariant v);
std::string_view to_string(ChaseStrategy s);

inline constexpr std::size_t kDefaultMaxSteps = 10000;

struct ChaseConfig {
  ChaseVariant variant = ChaseVariant::Restricted;
  ChaseStrategy strategy = ChaseStrategy::DatalogFirst;
  std::uint64_t seed = 0;
  std::size_t max_steps = kDefaultMaxSteps;
};

struct ChaseStep {
  std::size_t index = 0;
  // Position of the rule in the rule set.
  std::size_t rule = 0;
  std::string rule_id;
  Homomorphism match;
  Homomorphism extension;
  std::vector<Term> introduced_nulls;
};

struct ChaseResult {
  Interpretation instance;
  std::vector<ChaseStep> trace;
  bool terminated = false;
  std::size_t steps_used = 0;
};

class StepLimitExceeded : public Error {
 public:
  explicit StepLimitExceeded(ChaseResult partial)
      : Error(ErrorCode::StepLimitExceeded,
              "chase did not terminate within " + std::to_string(partial.steps_used) + " steps"),
        partial_(std::move(partial)) {}

  const ChaseResult& partial() const noexcept { return partial_; }

 private:
  ChaseResult partial_;
};

/// Whether the positive-body match h extends to the head inside `instance`.
bool is_satisfied(const Rule& rule, const Homomorphism& match, const Interpretation& instance);

/// h(body_negative) ∩ instance = ∅.
bool is_generating(const Rule& rule, const Homomorphism& match, const Interpretation& instance);

/// Matches of `rule` that the variant would apply next on `instance`.
/// Skolem and oblivious consult `trace` for matches already applied; entries
/// of the trace for other rules are ignored.
std::vector<Homomorphism> applicable_matches(const Rule& rule, std::size_t rule_index, const Interpretation& instance,
                                             ChaseVariant variant, const std::vector<ChaseStep>& trace = {});

/// Runs to termination or the step cap, never throws on the cap.
ChaseResult chase(const RuleSet& rules, const Interpretation& database, const ChaseConfig& config);

/// As chase(), but throws StepLimitExceeded carrying the partial result.
ChaseResult run_chase(const RuleSet& rules, const Interpretation& database, const ChaseConfig& config);

/// Every applied match is generating on the final instance.
bool verify_generating(const RuleSet& rules, const ChaseResult& result);

/// No rule has an unsatisfied generating match in `instance`.
bool is_model(const RuleSet& rules, const Interpretation& instance);

/// `step <i>: rule <id> match {x=..., ...} new {_:nk, ...}` per line.
std::string format_trace(const std::vector<ChaseStep>& trace);

}  // namespace nullcore
