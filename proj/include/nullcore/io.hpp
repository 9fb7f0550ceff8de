#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nullcore/model.hpp"

namespace nullcore {

struct Program {
  RuleSet rules;
  Interpretation facts;
  std::vector<Query> queries;
  Signature signature;
};

struct ParseOptions {
  // Accept `_:n<k>` tokens as nulls in facts.
  bool allow_nulls = false;
};

/// Parses rules, facts and queries. Rules get ids r1, r2, ... in program
/// order. Throws SyntaxError, or the validation error of the offending
/// element with its line prefixed.
Program parse_program(std::string_view text, ParseOptions options = {});

/// Facts only, nulls allowed. Predicate arities are checked against
/// `signature` when given.
Interpretation parse_facts(std::string_view text, Signature* signature = nullptr);

std::string format_term(const Term& t);
std::string format_atom(const Atom& a);
std::string format_rule(const Rule& r);
std::string format_query(const Query& q);

/// One fact per line in (predicate, args) order, nulls as `_:n<id>`.
std::string emit_facts(const Interpretation& instance);

struct AnswerRecord {
  std::string name;
  bool entailed = false;
  std::string level;
  std::string model_used;
};

using Edge = std::pair<std::string, std::string>;

/// Flat, printable analysis results. Lists are sorted by emit_report.
struct AnalysisReport {
  std::vector<Position> jointly_affected;
  std::vector<Edge> restraints;
  std::vector<std::string> restrained_variables;
  std::vector<Position> core_safe_positions;
  std::vector<Edge> positive_reliances;
  std::vector<Edge> negative_reliances;
  // Empty optional when no core-safe stratification exists.
  std::optional<std::vector<std::vector<std::string>>> stratification;
  std::vector<std::pair<std::string, std::string>> query_classifications;
  std::vector<AnswerRecord> answers;
};

std::string emit_report(const AnalysisReport& report);
std::string emit_report_json(const AnalysisReport& report);

}  // namespace nullcore
