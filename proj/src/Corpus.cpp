//===- Corpus.cpp - Labeled corpus evaluation -------------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Corpus.h"
#include "lifecheck/Frontend.h"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace lifecheck {

const char *labelName(EntryLabel L) {
  switch (L) {
  case EntryLabel::TrueBug:
    return "true-bug";
  case EntryLabel::KnownFalsePositive:
    return "known-false-positive";
  case EntryLabel::KnownMiss:
    return "known-miss";
  }
  return "?";
}

static std::optional<EntryLabel> parseLabel(const std::string &S) {
  for (EntryLabel L : {EntryLabel::TrueBug, EntryLabel::KnownFalsePositive,
                       EntryLabel::KnownMiss})
    if (S == labelName(L))
      return L;
  return std::nullopt;
}

static std::string resolvePath(const std::string &BaseDir, const std::string &P) {
  fs::path Path(P);
  if (Path.is_relative() && !BaseDir.empty())
    Path = fs::path(BaseDir) / Path;
  return Path.lexically_normal().generic_string();
}

CorpusManifest parseManifest(const std::string &Json, const std::string &BaseDir) {
  nlohmann::json J;
  try {
    J = nlohmann::json::parse(Json);
  } catch (const nlohmann::json::exception &E) {
    throw ManifestError(std::string("malformed manifest: ") + E.what());
  }
  if (!J.is_object() || J.value("version", 0) != 1)
    throw ManifestError("manifest must be an object with \"version\": 1");
  if (!J.contains("entries") || !J["entries"].is_array() || J["entries"].empty())
    throw ManifestError("manifest has no entries");

  CorpusManifest M;
  if (J.contains("scan")) {
    if (!J["scan"].is_array())
      throw ManifestError("\"scan\" must be an array of paths");
    for (const auto &S : J["scan"]) {
      if (!S.is_string())
        throw ManifestError("\"scan\" must be an array of paths");
      std::string P = resolvePath(BaseDir, S.get<std::string>());
      if (!fs::exists(P))
        throw ManifestError("scan path does not exist: " + P);
      M.Scan.push_back(P);
    }
  }

  std::set<std::pair<std::string, std::string>> Seen;
  for (const auto &E : J["entries"]) {
    auto Str = [&](const char *Key) -> std::string {
      if (!E.is_object() || !E.contains(Key) || !E[Key].is_string())
        throw ManifestError(std::string("entry lacks string field '") + Key + "'");
      return E[Key].get<std::string>();
    };
    ManifestEntry Entry;
    Entry.File = resolvePath(BaseDir, Str("file"));
    Entry.Function = Str("function");
    auto Kind = parseKindName(Str("kind"));
    if (!Kind)
      throw ManifestError("unknown kind '" + Str("kind") + "'");
    Entry.Kind = *Kind;
    auto Label = parseLabel(Str("label"));
    if (!Label)
      throw ManifestError("unknown label '" + Str("label") + "'");
    Entry.Label = *Label;
    if (!fs::is_regular_file(Entry.File))
      throw ManifestError("entry file does not exist: " + Entry.File);
    if (!Seen.insert({Entry.File, Entry.Function}).second)
      throw ManifestError("duplicate entry " + Entry.File + "::" + Entry.Function);
    M.Entries.push_back(std::move(Entry));
  }
  return M;
}

CorpusManifest loadManifest(const std::string &Path) {
  std::ifstream In(Path);
  if (!In)
    throw ManifestError("cannot read manifest '" + Path + "'");
  std::ostringstream Buf;
  Buf << In.rdbuf();
  return parseManifest(Buf.str(), fs::path(Path).parent_path().generic_string());
}

CorpusMetrics evaluateCorpus(const CorpusManifest &M, const PipelineOptions &Opts) {
  if (M.Entries.empty())
    throw ManifestError("manifest has no entries");

  std::vector<std::string> Inputs = M.Scan;
  for (const ManifestEntry &E : M.Entries)
    Inputs.push_back(E.File);
  std::vector<FileResult> Results;
  try {
    Results = analyzePaths(Inputs, Opts);
  } catch (const InputError &E) {
    throw ManifestError(E.what());
  }

  CorpusMetrics Out;
  // (file, function) -> kinds of unfiltered findings.
  std::map<std::pair<std::string, std::string>, std::set<std::string>> Found;
  for (const FileResult &R : Results) {
    Out.Diagnostics.insert(Out.Diagnostics.end(), R.Diagnostics.begin(),
                           R.Diagnostics.end());
    for (const Finding &F : R.Findings)
      if (F.St != Stage::Filtered)
        Found[{R.File, F.Violation.Function}].insert(kindName(F.Violation.Kind));
  }
  for (const auto &[Fn, Kinds] : Found)
    Out.DetectedFunctions.push_back(Fn.first + "::" + Fn.second);

  // Entries must name functions the frontend kept.
  std::map<std::string, CrateModel> Parsed;
  for (const ManifestEntry &E : M.Entries) {
    auto It = Parsed.find(E.File);
    if (It == Parsed.end()) {
      std::ifstream In(E.File, std::ios::binary);
      std::ostringstream Buf;
      Buf << In.rdbuf();
      It = Parsed.emplace(E.File, parseCrate(Buf.str(), E.File)).first;
    }
    if (!It->second.findFunction(E.Function))
      throw ManifestError("unresolvable entry: no function '" + E.Function +
                          "' in " + E.File);
  }

  for (const ManifestEntry &E : M.Entries) {
    EntryResult R;
    R.Entry = E;
    auto It = Found.find({E.File, E.Function});
    if (It != Found.end()) {
      R.FoundKinds.assign(It->second.begin(), It->second.end());
      R.Detected = It->second.count(kindName(E.Kind)) > 0;
    }
    if (E.Label == EntryLabel::TrueBug) {
      ++Out.TrueBugs;
      if (R.Detected)
        ++Out.TruePositives;
    }
    if (E.Label == EntryLabel::KnownMiss && !R.FoundKinds.empty())
      Out.KnownMissViolations.push_back(E.File + "::" + E.Function);
    Out.PerEntry.push_back(std::move(R));
  }

  if (Out.DetectedFunctions.empty()) {
    Out.PrecisionVacuous = true;
    Out.Precision = 1.0;
  } else {
    Out.Precision = double(Out.TruePositives) / double(Out.DetectedFunctions.size());
  }
  if (Out.TrueBugs == 0) {
    Out.RecallVacuous = true;
    Out.Recall = 1.0;
  } else {
    Out.Recall = double(Out.TruePositives) / double(Out.TrueBugs);
  }
  return Out;
}

std::string formatMetrics(const CorpusMetrics &M) {
  std::ostringstream OS;
  auto Ratio = [](double V) {
    char Buf[32];
    std::snprintf(Buf, sizeof(Buf), "%.3f", V);
    return std::string(Buf);
  };
  OS << "precision " << Ratio(M.Precision) << " (" << M.TruePositives << "/"
     << M.DetectedFunctions.size() << ")"
     << (M.PrecisionVacuous ? " vacuous" : "") << '\n';
  OS << "recall " << Ratio(M.Recall) << " (" << M.TruePositives << "/"
     << M.TrueBugs << ")" << (M.RecallVacuous ? " vacuous" : "") << '\n';
  for (const EntryResult &R : M.PerEntry) {
    OS << "  " << R.Entry.File << "::" << R.Entry.Function << ' '
       << kindName(R.Entry.Kind) << ' ' << labelName(R.Entry.Label) << ' '
       << (R.Detected ? "detected" : "not-detected");
    if (!R.FoundKinds.empty()) {
      OS << " [";
      for (std::size_t I = 0; I < R.FoundKinds.size(); ++I)
        OS << (I ? "," : "") << R.FoundKinds[I];
      OS << ']';
    }
    OS << '\n';
  }
  for (const std::string &F : M.KnownMissViolations)
    OS << "known-miss detected: " << F << '\n';
  return OS.str();
}

} // namespace lifecheck
