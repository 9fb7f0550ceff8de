#pragma once

#include <vector>

#include "nullcore/entailment.hpp"
#include "nullcore/io.hpp"

namespace nullcore {

/// Static analysis of a rule set and its queries. Query classes are computed
/// without a chase trace, so none is effectively-core-safe here.
AnalysisReport analyze_program(const RuleSet& rules, const std::vector<Query>& queries);

AnswerRecord to_record(const EntailmentAnswer& answer);

}  // namespace nullcore
