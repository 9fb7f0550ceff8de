// nullcore: command-line front end.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nullcore/entailment.hpp"
#include "nullcore/error.hpp"
#include "nullcore/io.hpp"
#include "nullcore/report.hpp"
#include "nullcore/stratified.hpp"

using namespace nullcore;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kNotEntailed = 1;
constexpr int kInputError = 2;
constexpr int kStepLimit = 3;
constexpr int kNoStratification = 4;

struct Options {
  std::string program;
  std::string facts;
  std::string variant = "restricted";
  std::string strategy = "datalog-first";
  std::uint64_t seed = 0;
  std::size_t max_steps = 0;
  bool trace = false;
  std::string mode = "auto";
  std::string out;
  bool json = false;
  bool assume_finite_core = false;
  std::string query;
  bool full = false;
};

class InputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t default_max_steps() {
  const char* env = std::getenv("NULLCORE_MAX_STEPS");
  if (!env || !*env) return kDefaultMaxSteps;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) throw InputError(std::string("NULLCORE_MAX_STEPS is not a positive integer: ") + env);
  return static_cast<std::size_t>(v);
}

ChaseConfig make_config(const Options& o) {
  static const std::map<std::string, ChaseVariant> variants{
      {"restricted", ChaseVariant::Restricted}, {"skolem", ChaseVariant::Skolem}, {"oblivious", ChaseVariant::Oblivious}};
  static const std::map<std::string, ChaseStrategy> strategies{
      {"fifo", ChaseStrategy::Fifo}, {"datalog-first", ChaseStrategy::DatalogFirst}, {"random", ChaseStrategy::Random}};
  ChaseConfig cfg;
  cfg.variant = variants.at(o.variant);
  cfg.strategy = strategies.at(o.strategy);
  cfg.seed = o.seed;
  cfg.max_steps = o.max_steps > 0 ? o.max_steps : default_max_steps();
  return cfg;
}

Program load(const Options& o) {
  Program p = parse_program(read_file(o.program));
  if (!o.facts.empty()) p.facts.insert_all(parse_facts(read_file(o.facts), &p.signature));
  return p;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string commented(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) out += "% " + line + "\n";
  return out;
}

ordered_json facts_json(const Interpretation& instance) {
  ordered_json arr = ordered_json::array();
  std::istringstream in(emit_facts(instance));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) arr.push_back(line);
  }
  return arr;
}

ordered_json trace_json(const std::vector<ChaseStep>& trace) {
  ordered_json arr = ordered_json::array();
  std::istringstream in(format_trace(trace));
  std::string line;
  while (std::getline(in, line)) arr.push_back(line);
  return arr;
}

int cmd_analyze(const Options& o) {
  Program p = load(o);
  AnalysisReport report = analyze_program(p.rules, p.queries);
  Output out(o.out);
  out.stream() << (o.json ? emit_report_json(report) : emit_report(report));
  return kOk;
}

void write_chase(const Options& o, const ChaseResult& r) {
  Output out(o.out);
  if (o.json) {
    ordered_json j;
    j["terminated"] = r.terminated;
    j["steps"] = r.steps_used;
    j["facts"] = facts_json(r.instance);
    if (o.trace) j["trace"] = trace_json(r.trace);
    out.stream() << j.dump(2) << "\n";
    return;
  }
  out.stream() << emit_facts(r.instance);
  if (o.trace) out.stream() << commented(format_trace(r.trace));
}

int cmd_chase(const Options& o) {
  Program p = load(o);
  ChaseResult r = chase(p.rules, p.facts, make_config(o));
  write_chase(o, r);
  if (!r.terminated) {
    std::cerr << "nullcore: chase did not terminate within " << r.steps_used << " steps\n";
    return kStepLimit;
  }
  return kOk;
}

int cmd_core(const Options& o) {
  Program p = load(o);
  EntailmentSession session(p.rules, p.facts, make_config(o));
  const Interpretation& core = session.core_model();
  Output out(o.out);
  if (o.json) {
    ordered_json j;
    j["facts"] = facts_json(core);
    if (o.trace && session.chase_is_sound()) j["trace"] = trace_json(session.restricted_chase().trace);
    out.stream() << j.dump(2) << "\n";
  } else {
    out.stream() << emit_facts(core);
    if (o.trace && session.chase_is_sound()) out.stream() << commented(format_trace(session.restricted_chase().trace));
  }
  return kOk;
}

int cmd_query(const Options& o) {
  Program p = load(o);
  std::vector<Query> queries;
  for (const auto& q : p.queries) {
    if (o.query.empty() || q.name() == o.query) queries.push_back(q);
  }
  if (!o.query.empty() && queries.empty()) throw InputError("no query named " + o.query);
  static const std::map<std::string, AnswerMode> modes{
      {"auto", AnswerMode::Auto}, {"core", AnswerMode::Core}, {"chase", AnswerMode::Chase}};
  EntailmentSession session(p.rules, p.facts, make_config(o), o.assume_finite_core);
  std::vector<EntailmentAnswer> answers;
  for (const auto& q : queries) answers.push_back(session.answer(q, modes.at(o.mode)));

  Output out(o.out);
  if (o.json) {
    ordered_json arr = ordered_json::array();
    for (const auto& a : answers) {
      ordered_json j{{"name", a.query_name},
                     {"entailed", a.entailed},
                     {"level", to_string(a.classification.level)},
                     {"model_used", to_string(a.model_used)}};
      if (a.warning) j["warning"] = *a.warning;
      arr.push_back(j);
    }
    out.stream() << ordered_json{{"answers", arr}}.dump(2) << "\n";
  } else {
    for (const auto& a : answers) {
      out.stream() << a.query_name << ": entailed=" << (a.entailed ? "true" : "false")
                   << " level=" << to_string(a.classification.level) << " model=" << to_string(a.model_used) << "\n";
      if (a.warning) std::cerr << "nullcore: warning: " << a.query_name << ": " << *a.warning << "\n";
    }
  }
  if (answers.size() == 1 && !answers.front().entailed) return kNotEntailed;
  return kOk;
}

void print_strata(std::ostream& os, const std::vector<std::vector<std::string>>& strata) {
  for (std::size_t i = 0; i < strata.size(); ++i) {
    os << "stratum " << i + 1 << ": {";
    for (std::size_t k = 0; k < strata[i].size(); ++k) os << (k ? ", " : "") << strata[i][k];
    os << "}\n";
  }
}

int cmd_stratify(const Options& o) {
  Program p = load(o);
  auto s = o.full ? find_full_stratification(p.rules) : find_core_safe_stratification(p.rules);
  if (!s) {
    std::cerr << "nullcore: no " << (o.full ? "full" : "core-safe") << " stratification\n";
    return kNoStratification;
  }
  Output out(o.out);
  auto ids = stratum_ids(p.rules, *s);
  if (o.json) {
    out.stream() << ordered_json{{"kind", to_string(s->kind)}, {"strata", ids}}.dump(2) << "\n";
  } else {
    print_strata(out.stream(), ids);
  }
  return kOk;
}

int cmd_solve(const Options& o) {
  Program p = load(o);
  auto s = find_core_safe_stratification(p.rules);
  if (!s) {
    std::cerr << "nullcore: no core-safe stratification\n";
    return kNoStratification;
  }
  CoreSafeChaseResult r = core_safe_chase(p.rules, *s, p.facts, make_config(o));
  Output out(o.out);
  if (o.json) {
    ordered_json strata = ordered_json::array();
    for (const auto& row : r.summary) {
      strata.push_back({{"stratum", row.stratum},
                        {"rules", row.rules},
                        {"added", row.added},
                        {"removed", row.removed},
                        {"steps", row.steps}});
    }
    out.stream() << ordered_json{{"facts", facts_json(r.final_model)}, {"strata", strata}}.dump(2) << "\n";
    return kOk;
  }
  out.stream() << emit_facts(r.final_model);
  for (const auto& row : r.summary) {
    out.stream() << "% stratum " << row.stratum << " {";
    for (std::size_t k = 0; k < row.rules.size(); ++k) out.stream() << (k ? ", " : "") << row.rules[k];
    out.stream() << "} added " << row.added << " removed " << row.removed << "\n";
  }
  return kOk;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::StepLimitExceeded: return kStepLimit;
    case ErrorCode::NoStratification: return kNoStratification;
    default: return kInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Core-entailment reasoning for existential rules with negation"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("program", o.program, "Program file (rules, facts, queries)")->required();
    cmd->add_option("--facts", o.facts, "Additional facts file");
    cmd->add_option("--out", o.out, "Write output to this file");
    cmd->add_flag("--json", o.json, "Structured output");
  };
  auto add_chase = [&](CLI::App* cmd) {
    cmd->add_option("--variant", o.variant, "restricted | skolem | oblivious")
        ->check(CLI::IsMember({"restricted", "skolem", "oblivious"}));
    cmd->add_option("--strategy", o.strategy, "fifo | datalog-first | random")
        ->check(CLI::IsMember({"fifo", "datalog-first", "random"}));
    cmd->add_option("--seed", o.seed, "Seed for the random strategy");
    cmd->add_option("--max-steps", o.max_steps, "Step cap (default 10000 or NULLCORE_MAX_STEPS)")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--trace", o.trace, "Print the chase trace");
  };

  std::map<CLI::App*, int (*)(const Options&)> handlers;
  auto analyze = app.add_subcommand("analyze", "Static analysis report");
  add_common(analyze);
  handlers[analyze] = cmd_analyze;

  auto chase_cmd = app.add_subcommand("chase", "Run a chase and print the result");
  add_common(chase_cmd);
  add_chase(chase_cmd);
  handlers[chase_cmd] = cmd_chase;

  auto core = app.add_subcommand("core", "Print the core model");
  add_common(core);
  add_chase(core);
  handlers[core] = cmd_core;

  auto query = app.add_subcommand("query", "Decide core entailment of the program's queries");
  add_common(query);
  add_chase(query);
  query->add_option("--mode", o.mode, "auto | core | chase")->check(CLI::IsMember({"auto", "core", "chase"}));
  query->add_option("--query", o.query, "Only answer the query with this name");
  query->add_flag("--assume-finite-core", o.assume_finite_core, "Answer from a chase cut off at the step cap");
  handlers[query] = cmd_query;

  auto stratify = app.add_subcommand("stratify", "Find a core-safe stratification");
  add_common(stratify);
  stratify->add_flag("--full", o.full, "Require a full stratification");
  handlers[stratify] = cmd_stratify;

  auto solve = app.add_subcommand("solve", "Core-safe chase along a synthesized stratification");
  add_common(solve);
  add_chase(solve);
  handlers[solve] = cmd_solve;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    for (auto& [cmd, handler] : handlers) {
      if (cmd->parsed()) return handler(o);
    }
  } catch (const Error& e) {
    std::cerr << "nullcore: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const InputError& e) {
    std::cerr << "nullcore: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
