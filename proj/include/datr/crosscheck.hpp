#pragma once

#include <map>
#include <string>
#include <vector>

#include "datr/reverse.hpp"

namespace datr {

// Result of checking the reverse engine against forward evaluation over
// every query up to a path-length bound. A soundness violation is a query
// covered by some answer expansion that does not forward-evaluate to the
// value; a completeness miss is a defined query covered by no answer.
struct CrossCheckReport {
  long enumerated = 0;
  long defined = 0;
  long excluded = 0;  // forward evaluation hit a limit
  long values = 0;    // distinct values checked
  std::vector<std::string> violations;
  std::vector<std::string> misses;
  long suppressed_items = 0;

  bool ok() const { return violations.empty() && misses.empty(); }
};

inline CrossCheckReport cross_check(const RuleSet& rules, int max_len,
                                    const EvalLimits& limits = {}) {
  CrossCheckReport report;
  const Theory& theory = rules.theory;
  const std::set<Atom> atoms = theory.attribute_atoms();
  const std::vector<Atom> alphabet(atoms.begin(), atoms.end());

  std::map<std::vector<Atom>, std::vector<Query>> by_value;
  for (const Query& q : enumerate_queries(theory, max_len)) {
    ++report.enumerated;
    EvalResult r = eval_query(theory, q, limits);
    if (r.status == EvalStatus::LimitExceeded) {
      ++report.excluded;
    } else if (r.status == EvalStatus::Value) {
      ++report.defined;
      by_value[r.value].push_back(q);
    }
  }

  for (const auto& [value, queries] : by_value) {
    ++report.values;
    ReverseResult rr = reverse_query(rules, value, limits);
    report.suppressed_items += rr.suppressed();
    std::set<Query> covered;
    for (const ReverseAnswer& ans : rr.answers) {
      for (const Query& q : expand_answer(ans, alphabet, max_len)) {
        covered.insert(q);
        EvalResult check = eval_query(theory, q, limits);
        if (check.status == EvalStatus::LimitExceeded) continue;
        if (check.status != EvalStatus::Value || check.value != value)
          report.violations.push_back(query_to_string(q) + " from " +
                                      answer_to_string(ans) +
                                      " does not evaluate to \"" +
                                      EvalResult{EvalStatus::Value, value}
                                          .value_text() +
                                      "\"");
      }
    }
    for (const Query& q : queries)
      if (!covered.count(q))
        report.misses.push_back(query_to_string(q) + " = \"" +
                                EvalResult{EvalStatus::Value, value}.value_text() +
                                "\" not covered by any reverse answer");
  }
  return report;
}

}  // namespace datr
