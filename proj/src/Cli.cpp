//===- Cli.cpp - Command-line driver ----------------------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Cli.h"
#include "lifecheck/Corpus.h"
#include "lifecheck/Frontend.h"
#include "lifecheck/Pipeline.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>

namespace lifecheck {

namespace {

struct Flags {
  std::string Format = "text";
  bool NoAlias = false;
  bool UnknownFields = false;
  bool NoFilter = false;
  bool DropPatternOnly = false;
  bool Verbose = false;
  unsigned MaxDepth = DefaultMaxDepth;
};

void addAnalysisFlags(CLI::App &Cmd, Flags &F) {
  Cmd.add_option("--format", F.Format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
  Cmd.add_flag("--no-alias", F.NoAlias,
               "Skip alias confirmation; report every candidate at low confidence");
  Cmd.add_flag("--unknown-fields", F.UnknownFields,
               "Let calls link argument fields the analysis has not seen");
  Cmd.add_flag("--no-filter", F.NoFilter, "Skip the shallow filter");
  Cmd.add_flag("--drop-pattern-only", F.DropPatternOnly,
               "Drop candidates in functions whose body could not be lowered");
  Cmd.add_option("--max-depth", F.MaxDepth, "Field-path depth limit")
      ->check(CLI::Range(1u, 64u));
  Cmd.add_flag("-v,--verbose", F.Verbose,
               "Print filtered findings and frontend diagnostics");
}

PipelineOptions toOptions(const Flags &F) {
  PipelineOptions O;
  O.NoAlias = F.NoAlias;
  O.UnknownFields = F.UnknownFields;
  O.NoFilter = F.NoFilter;
  O.DropPatternOnly = F.DropPatternOnly;
  O.MaxDepth = F.MaxDepth;
  if (!F.NoFilter)
    O.Rules = loadConfiguredFilterRules();
  return O;
}

int runScan(const std::vector<std::string> &Paths, const Flags &F,
            std::ostream &Out, std::ostream &Err) {
  std::vector<FileResult> Results = analyzePaths(Paths, toOptions(F));
  if (F.Verbose)
    for (const FileResult &R : Results)
      for (const std::string &D : R.Diagnostics)
        Err << "note: " << D << '\n';
  std::vector<Finding> Findings = allFindings(Results);
  Out << emitReport(Findings, F.Format == "json" ? ReportFormat::Json
                                                 : ReportFormat::Text,
                    F.Verbose);
  bool Any = std::any_of(Findings.begin(), Findings.end(), [](const Finding &X) {
    return X.St != Stage::Filtered;
  });
  return Any ? 1 : 0;
}

int runEval(const std::string &Manifest, const Flags &F, std::ostream &Out,
            std::ostream &Err) {
  CorpusMetrics M = evaluateCorpus(loadManifest(Manifest), toOptions(F));
  if (F.Verbose)
    for (const std::string &D : M.Diagnostics)
      Err << "note: " << D << '\n';
  if (F.Format == "json") {
    nlohmann::ordered_json J;
    J["version"] = 1;
    J["precision"] = M.Precision;
    J["recall"] = M.Recall;
    J["precisionVacuous"] = M.PrecisionVacuous;
    J["recallVacuous"] = M.RecallVacuous;
    J["truePositives"] = M.TruePositives;
    J["trueBugs"] = M.TrueBugs;
    J["detectedFunctions"] = M.DetectedFunctions;
    J["entries"] = nlohmann::ordered_json::array();
    for (const EntryResult &R : M.PerEntry)
      J["entries"].push_back({{"file", R.Entry.File},
                              {"function", R.Entry.Function},
                              {"kind", kindName(R.Entry.Kind)},
                              {"label", labelName(R.Entry.Label)},
                              {"detected", R.Detected},
                              {"foundKinds", R.FoundKinds}});
    J["knownMissViolations"] = M.KnownMissViolations;
    Out << J.dump(2) << '\n';
  } else {
    Out << formatMetrics(M);
  }
  return M.KnownMissViolations.empty() ? 0 : 1;
}

} // namespace

int runCli(const std::vector<std::string> &Args, std::ostream &Out,
           std::ostream &Err) {
  CLI::App App{"Lifetime-annotation bug finder", "lifecheck"};
  App.require_subcommand(1);

  Flags ScanFlags, EvalFlags;
  std::vector<std::string> Paths;
  std::string Manifest;

  CLI::App *Scan = App.add_subcommand("scan", "Analyze source files or directories");
  Scan->add_option("paths", Paths, "Files or directories")->required();
  addAnalysisFlags(*Scan, ScanFlags);

  CLI::App *Eval = App.add_subcommand("eval", "Score a labeled corpus manifest");
  Eval->add_option("manifest", Manifest, "Manifest JSON")->required();
  addAnalysisFlags(*Eval, EvalFlags);

  // CLI11 consumes a reversed argument vector.
  std::vector<std::string> Rev(Args.rbegin(), Args.rend());
  try {
    App.parse(Rev);
  } catch (const CLI::ParseError &E) {
    int Code = App.exit(E, Out, Err);
    return Code == 0 ? 0 : 2;
  }

  try {
    if (Scan->parsed())
      return runScan(Paths, ScanFlags, Out, Err);
    return runEval(Manifest, EvalFlags, Out, Err);
  } catch (const ParseError &E) {
    Err << "error: " << E.what() << '\n';
  } catch (const ManifestError &E) {
    Err << "error: " << E.what() << '\n';
  } catch (const InputError &E) {
    Err << "error: " << E.what() << '\n';
  } catch (const FilterFileError &E) {
    Err << "error: " << E.what() << '\n';
  } catch (const std::exception &E) {
    Err << "internal error: " << E.what() << '\n';
  }
  return 2;
}

} // namespace lifecheck
