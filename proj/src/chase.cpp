#include "nullcore/chase.hpp"

#include <deque>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "nullcore/io.hpp"

namespace nullcore {
namespace {

using MatchKey = std::pair<std::size_t, std::vector<Term>>;

std::vector<Term> image_of(const std::vector<Term>& vars, const Homomorphism& h) {
  std::vector<Term> out;
  out.reserve(vars.size());
  for (const auto& v : vars) out.push_back(substitute(h, v));
  return out;
}

// Binds the variables of `pattern` so that it equals `fact`.
bool unify(const Atom& pattern, const Atom& fact, TermMap& out) {
  if (pattern.predicate != fact.predicate || pattern.args.size() != fact.args.size()) return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    const Term& p = pattern.args[i];
    const Term& f = fact.args[i];
    if (!p.is_variable()) {
      if (p != f) return false;
      continue;
    }
    auto [it, inserted] = out.emplace(p, f);
    if (!inserted && it->second != f) return false;
  }
  return true;
}

struct Pending {
  std::size_t rule;
  Homomorphism match;
};

class Engine {
 public:
  Engine(const RuleSet& rules, const Interpretation& database, const ChaseConfig& config)
      : rules_(rules), config_(config), rng_(config.seed) {
    result_.instance = database;
    if (auto m = database.max_null()) next_null_ = *m + 1;
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      const auto& body = rules_[r].body_positive();
      for (std::size_t i = 0; i < body.size(); ++i) by_predicate_[body[i].predicate].emplace_back(r, i);
    }
  }

  ChaseResult run() {
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      for_each_hom(rules_[r].body_positive(), result_.instance, {}, {}, [&](const Homomorphism& h) {
        offer(r, h);
        return true;
      });
    }
    while (!empty()) {
      if (result_.steps_used >= config_.max_steps) {
        result_.terminated = !any_applicable();
        return std::move(result_);
      }
      Pending p = pop();
      if (applicable(p)) apply_step(p);
    }
    result_.terminated = true;
    return std::move(result_);
  }

 private:
  void offer(std::size_t r, const Homomorphism& h) {
    const Rule& rule = rules_[r];
    MatchKey key{r, image_of(rule.body_variables(), h)};
    if (!seen_.insert(key).second) return;
    if (!is_generating(rule, h, result_.instance)) return;
    Pending p{r, h};
    switch (config_.strategy) {
      case ChaseStrategy::Fifo: main_.push_back(std::move(p)); break;
      case ChaseStrategy::DatalogFirst:
        (rule.is_datalog() ? datalog_ : main_).push_back(std::move(p));
        break;
      case ChaseStrategy::Random: pool_.push_back(std::move(p)); break;
    }
  }

  bool empty() const { return main_.empty() && datalog_.empty() && pool_.empty(); }

  Pending pop() {
    if (config_.strategy == ChaseStrategy::Random) {
      std::size_t i = static_cast<std::size_t>(rng_() % pool_.size());
      std::swap(pool_[i], pool_.back());
      Pending p = std::move(pool_.back());
      pool_.pop_back();
      return p;
    }
    auto& q = datalog_.empty() ? main_ : datalog_;
    Pending p = std::move(q.front());
    q.pop_front();
    return p;
  }

  bool any_applicable() const {
    auto check = [&](const auto& items) {
      for (const auto& p : items) {
        if (applicable(p)) return true;
      }
      return false;
    };
    return check(main_) || check(datalog_) || check(pool_);
  }

  bool applicable(const Pending& p) const {
    const Rule& rule = rules_[p.rule];
    if (!is_generating(rule, p.match, result_.instance)) return false;
    switch (config_.variant) {
      case ChaseVariant::Restricted: return !is_satisfied(rule, p.match, result_.instance);
      case ChaseVariant::Skolem: return !skolem_applied_.contains({p.rule, image_of(rule.frontier(), p.match)});
      case ChaseVariant::Oblivious: return true;
    }
    return false;
  }

  void apply_step(const Pending& p) {
    const Rule& rule = rules_[p.rule];
    ChaseStep step;
    step.index = result_.trace.size() + 1;
    step.rule = p.rule;
    step.rule_id = rule.id();
    step.match = p.match;
    auto frontier_image = image_of(rule.frontier(), p.match);
    for (std::size_t i = 0; i < rule.frontier().size(); ++i) step.extension[rule.frontier()[i]] = frontier_image[i];
    for (const auto& z : rule.existential()) {
      Term n;
      if (config_.variant == ChaseVariant::Skolem) {
        auto [it, inserted] = skolem_nulls_.try_emplace({rule.id(), z, frontier_image}, next_null_);
        if (inserted) ++next_null_;
        n = Term::null(it->second);
      } else {
        n = Term::null(next_null_++);
      }
      step.extension[z] = n;
      step.introduced_nulls.push_back(n);
    }
    if (config_.variant == ChaseVariant::Skolem) skolem_applied_.insert({p.rule, frontier_image});

    std::vector<Atom> added;
    for (const auto& a : rule.head()) {
      Atom img = substitute(step.extension, a);
      if (result_.instance.insert(img)) added.push_back(std::move(img));
    }
    result_.trace.push_back(std::move(step));
    ++result_.steps_used;
    discover(added);
  }

  // Semi-naive: new matches must use at least one new atom.
  void discover(const std::vector<Atom>& added) {
    for (const auto& fact : added) {
      auto it = by_predicate_.find(fact.predicate);
      if (it == by_predicate_.end()) continue;
      for (const auto& [r, i] : it->second) {
        TermMap fixed;
        if (!unify(rules_[r].body_positive()[i], fact, fixed)) continue;
        for_each_hom(rules_[r].body_positive(), result_.instance, fixed, {}, [&](const Homomorphism& h) {
          offer(r, h);
          return true;
        });
      }
    }
  }

  const RuleSet& rules_;
  ChaseConfig config_;
  std::mt19937_64 rng_;
  ChaseResult result_;
  NullId next_null_ = 0;
  std::map<Symbol, std::vector<std::pair<std::size_t, std::size_t>>> by_predicate_;
  std::set<MatchKey> seen_;
  std::deque<Pending> main_;
  std::deque<Pending> datalog_;
  std::vector<Pending> pool_;
  std::set<MatchKey> skolem_applied_;
  std::map<std::tuple<std::string, Term, std::vector<Term>>, NullId> skolem_nulls_;
};

std::string join_terms(const std::vector<std::string>& parts) {
  std::string out = "{";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ", ";
    out += parts[i];
  }
  return out + "}";
}

}  // namespace

std::string_view to_string(ChaseVariant v) {
  switch (v) {
    case ChaseVariant::Restricted: return "restricted";
    case ChaseVariant::Skolem: return "skolem";
    case ChaseVariant::Oblivious: return "oblivious";
  }
  return "restricted";
}

std::string_view to_string(ChaseStrategy s) {
  switch (s) {
    case ChaseStrategy::Fifo: return "fifo";
    case ChaseStrategy::DatalogFirst: return "datalog-first";
    case ChaseStrategy::Random: return "random";
  }
  return "fifo";
}

bool is_satisfied(const Rule& rule, const Homomorphism& match, const Interpretation& instance) {
  TermMap fixed;
  for (const auto& v : rule.frontier()) fixed[v] = substitute(match, v);
  return find_match(rule.head(), instance, fixed).has_value();
}

bool is_generating(const Rule& rule, const Homomorphism& match, const Interpretation& instance) {
  for (const auto& a : rule.body_negative()) {
    if (instance.contains(substitute(match, a))) return false;
  }
  return true;
}

std::vector<Homomorphism> applicable_matches(const Rule& rule, std::size_t rule_index, const Interpretation& instance,
                                             ChaseVariant variant, const std::vector<ChaseStep>& trace) {
  std::set<std::vector<Term>> applied;
  for (const auto& step : trace) {
    if (step.rule != rule_index) continue;
    const auto& vars = variant == ChaseVariant::Skolem ? rule.frontier() : rule.body_variables();
    applied.insert(image_of(vars, step.match));
  }
  std::vector<Homomorphism> out;
  for_each_hom(rule.body_positive(), instance, {}, {}, [&](const Homomorphism& h) {
    if (!is_generating(rule, h, instance)) return true;
    bool ok = false;
    switch (variant) {
      case ChaseVariant::Restricted: ok = !is_satisfied(rule, h, instance); break;
      case ChaseVariant::Skolem: ok = !applied.contains(image_of(rule.frontier(), h)); break;
      case ChaseVariant::Oblivious: ok = !applied.contains(image_of(rule.body_variables(), h)); break;
    }
    if (ok) out.push_back(h);
    return true;
  });
  return out;
}

ChaseResult chase(const RuleSet& rules, const Interpretation& database, const ChaseConfig& config) {
  Engine engine(rules, database, config);
  return engine.run();
}

ChaseResult run_chase(const RuleSet& rules, const Interpretation& database, const ChaseConfig& config) {
  ChaseResult result = chase(rules, database, config);
  if (!result.terminated) throw StepLimitExceeded(std::move(result));
  return result;
}

bool verify_generating(const RuleSet& rules, const ChaseResult& result) {
  for (const auto& step : result.trace) {
    if (!is_generating(rules[step.rule], step.match, result.instance)) return false;
  }
  return true;
}

bool is_model(const RuleSet& rules, const Interpretation& instance) {
  for (const auto& rule : rules) {
    bool ok = !for_each_hom(rule.body_positive(), instance, {}, {}, [&](const Homomorphism& h) {
      return !(is_generating(rule, h, instance) && !is_satisfied(rule, h, instance));
    });
    if (!ok) return false;
  }
  return true;
}

std::string format_trace(const std::vector<ChaseStep>& trace) {
  std::ostringstream os;
  for (const auto& step : trace) {
    std::vector<std::string> bindings;
    for (const auto& [v, t] : step.match) bindings.push_back(v.to_string() + "=" + format_term(t));
    std::sort(bindings.begin(), bindings.end());
    std::vector<std::string> nulls;
    for (const auto& n : step.introduced_nulls) nulls.push_back(n.to_string());
    os << "step " << step.index << ": rule " << step.rule_id << " match " << join_terms(bindings) << " new "
       << join_terms(nulls) << "\n";
  }
  return os.str();
}

}  // namespace nullcore
