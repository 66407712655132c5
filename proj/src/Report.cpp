//===- Report.cpp - Text and JSON report emission ---------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Report.h"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace lifecheck {

const char *stageName(Stage S) {
  switch (S) {
  case Stage::Candidate:
    return "candidate";
  case Stage::AliasConfirmed:
    return "alias-confirmed";
  case Stage::PatternOnly:
    return "pattern-only";
  case Stage::Filtered:
    return "filtered";
  }
  return "?";
}

const char *confidenceName(Confidence C) {
  return C == Confidence::High ? "high" : "low";
}

ReportEntry toEntry(const Finding &F) {
  const CandidateViolation &V = F.Violation;
  return ReportEntry{V.Span.File,
                     V.Span.Line,
                     V.Function,
                     kindName(V.Kind),
                     V.Source.Path.str(),
                     V.Target.Path.str(),
                     confidenceName(F.Conf),
                     stageName(F.St)};
}

std::vector<ReportEntry> reportEntries(const std::vector<Finding> &Findings,
                                       bool Verbose) {
  std::vector<ReportEntry> Out;
  for (const Finding &F : Findings)
    if (Verbose || F.St != Stage::Filtered)
      Out.push_back(toEntry(F));
  std::sort(Out.begin(), Out.end());
  return Out;
}

std::string emitReport(const std::vector<Finding> &Findings, ReportFormat Format,
                       bool Verbose) {
  std::vector<ReportEntry> Entries = reportEntries(Findings, Verbose);
  if (Format == ReportFormat::Text) {
    std::ostringstream OS;
    for (const ReportEntry &E : Entries) {
      OS << E.File << ':' << E.Line << ' ' << E.Kind << ' ' << E.Source
         << " -> " << E.Target << " [" << E.Confidence << ']';
      if (E.Stage == "filtered")
        OS << " (filtered)";
      OS << '\n';
    }
    return OS.str();
  }

  nlohmann::ordered_json J;
  J["version"] = 1;
  J["findings"] = nlohmann::ordered_json::array();
  for (const ReportEntry &E : Entries) {
    nlohmann::ordered_json Row;
    Row["file"] = E.File;
    Row["line"] = E.Line;
    Row["function"] = E.Function;
    Row["kind"] = E.Kind;
    Row["source"] = E.Source;
    Row["target"] = E.Target;
    Row["confidence"] = E.Confidence;
    Row["stage"] = E.Stage;
    J["findings"].push_back(std::move(Row));
  }
  return J.dump(2) + "\n";
}

std::vector<ReportEntry> parseJsonReport(const std::string &Json) {
  nlohmann::json J;
  try {
    J = nlohmann::json::parse(Json);
  } catch (const nlohmann::json::exception &E) {
    throw std::runtime_error(std::string("malformed report: ") + E.what());
  }
  if (!J.is_object() || J.value("version", 0) != 1 || !J.contains("findings") ||
      !J["findings"].is_array())
    throw std::runtime_error("malformed report: expected version 1 with findings");
  std::vector<ReportEntry> Out;
  try {
    for (const auto &Row : J["findings"])
      Out.push_back(ReportEntry{Row.at("file"), Row.at("line"),
                                Row.at("function"), Row.at("kind"),
                                Row.at("source"), Row.at("target"),
                                Row.at("confidence"), Row.at("stage")});
  } catch (const nlohmann::json::exception &E) {
    throw std::runtime_error(std::string("malformed report row: ") + E.what());
  }
  return Out;
}

} // namespace lifecheck
