#include "nullcore/report.hpp"

namespace nullcore {
namespace {

std::vector<Edge> id_edges(const RuleSet& rules, const std::set<RuleEdge>& edges) {
  std::vector<Edge> out;
  for (const auto& [a, b] : edges) out.emplace_back(rules[a].id(), rules[b].id());
  return out;
}

}  // namespace

AnalysisReport analyze_program(const RuleSet& rules, const std::vector<Query>& queries) {
  AnalysisReport report;
  RelationGraph graph = compute_relations(rules);
  SafetyIndex safety = compute_safety(rules, graph.restraints);
  report.jointly_affected.assign(safety.affection.jointly_affected.begin(), safety.affection.jointly_affected.end());
  report.restraints = id_edges(rules, graph.restraint);
  for (const auto& v : graph.restraints.restrained_variables) report.restrained_variables.push_back(display_name(v));
  report.core_safe_positions.assign(safety.core_safe.begin(), safety.core_safe.end());
  report.positive_reliances = id_edges(rules, graph.positive);
  report.negative_reliances = id_edges(rules, graph.negative);
  if (auto s = find_core_safe_stratification(rules, graph)) report.stratification = stratum_ids(rules, *s);
  for (const auto& q : queries) {
    auto c = classify_query(q, safety, graph.restraints);
    report.query_classifications.emplace_back(q.name(), std::string(to_string(c.level)));
  }
  return report;
}

AnswerRecord to_record(const EntailmentAnswer& answer) {
  return {answer.query_name, answer.entailed, std::string(to_string(answer.classification.level)),
          std::string(to_string(answer.model_used))};
}

}  // namespace nullcore
