//===- Filter.cpp - Shallow false-positive filter ---------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Report.h"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#ifndef LIFECHECK_DEFAULT_FILTERS
#define LIFECHECK_DEFAULT_FILTERS "data/filters.json"
#endif

namespace lifecheck {

bool globMatch(const std::string &Pattern, const std::string &Text) {
  // Iterative wildcard match with single-star backtracking.
  std::size_t P = 0, T = 0, Star = std::string::npos, Mark = 0;
  while (T < Text.size()) {
    if (P < Pattern.size() && Pattern[P] == '*') {
      Star = P++;
      Mark = T;
    } else if (P < Pattern.size() && Pattern[P] == Text[T]) {
      ++P;
      ++T;
    } else if (Star != std::string::npos) {
      P = Star + 1;
      T = ++Mark;
    } else {
      return false;
    }
  }
  while (P < Pattern.size() && Pattern[P] == '*')
    ++P;
  return P == Pattern.size();
}

std::vector<FilterRule> defaultFilterRules() {
  return {{"iter-next", "next", "*Iterator"},
          {"iter-next-back", "next_back", "*Iterator"}};
}

std::vector<FilterRule> loadFilterRules(const std::string &Path) {
  std::ifstream In(Path);
  if (!In)
    throw FilterFileError("cannot read filter file '" + Path + "'");
  nlohmann::json J;
  try {
    J = nlohmann::json::parse(In);
  } catch (const nlohmann::json::exception &E) {
    throw FilterFileError(Path + ": " + E.what());
  }
  if (!J.is_object() || J.value("version", 0) != 1 || !J.contains("rules") ||
      !J["rules"].is_array())
    throw FilterFileError(Path + ": expected {\"version\": 1, \"rules\": [...]}");
  std::vector<FilterRule> Rules;
  for (const auto &R : J["rules"]) {
    if (!R.is_object() || !R.contains("name") || !R.contains("function") ||
        !R["name"].is_string() || !R["function"].is_string())
      throw FilterFileError(Path + ": each rule needs string 'name' and 'function'");
    FilterRule Rule{R["name"], R["function"], std::nullopt};
    if (R.contains("impl")) {
      if (!R["impl"].is_string())
        throw FilterFileError(Path + ": 'impl' must be a string");
      Rule.ImplPattern = R["impl"].get<std::string>();
    }
    Rules.push_back(std::move(Rule));
  }
  return Rules;
}

std::vector<FilterRule> loadConfiguredFilterRules() {
  if (const char *Env = std::getenv("LIFECHECK_FILTERS"); Env && *Env)
    return loadFilterRules(Env);
  if (std::filesystem::exists(LIFECHECK_DEFAULT_FILTERS))
    return loadFilterRules(LIFECHECK_DEFAULT_FILTERS);
  return defaultFilterRules();
}

namespace {

bool ruleMatches(const FilterRule &R, const Finding &F) {
  if (!globMatch(R.FunctionPattern, F.FnName))
    return false;
  if (!R.ImplPattern)
    return true;
  if (F.ImplTrait && globMatch(*R.ImplPattern, *F.ImplTrait))
    return true;
  return F.ImplStruct && globMatch(*R.ImplPattern, *F.ImplStruct);
}

} // namespace

std::vector<Finding> applyShallowFilter(std::vector<Finding> Findings,
                                        const std::vector<FilterRule> &Rules) {
  for (Finding &F : Findings) {
    if (F.St == Stage::Filtered)
      continue;
    for (const FilterRule &R : Rules) {
      if (ruleMatches(R, F)) {
        F.St = Stage::Filtered;
        F.SuppressedBy = R.Name;
        break;
      }
    }
  }
  return Findings;
}

} // namespace lifecheck
