//===- Pipeline.cpp - The four-step analysis over files ---------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Pipeline.h"
#include "lifecheck/AliasAnalysis.h"
#include "lifecheck/Frontend.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

namespace fs = std::filesystem;

namespace lifecheck {

FileResult analyzeCrate(const CrateModel &Crate, const std::string &File,
                        const PipelineOptions &Opts) {
  FileResult R;
  R.File = File;
  R.Diagnostics = Crate.Diagnostics;

  CheckerOptions CO;
  CO.MaxDepth = Opts.MaxDepth;
  AliasOptions AO;
  AO.MaxDepth = Opts.MaxDepth;
  AO.UnknownFields = Opts.UnknownFields;

  for (const FunctionModel &Fn : Crate.Functions) {
    CheckResult Checked = checkFunction(Fn, Crate.Structs, CO);
    if (!Checked.Diagnostic.empty())
      R.Diagnostics.push_back(File + ": " + Checked.Diagnostic);
    for (CandidateViolation &C : Checked.Candidates) {
      Stage St = Stage::Candidate;
      if (Opts.NoAlias) {
        St = Stage::Candidate;
      } else if (!Fn.FnBody) {
        if (Opts.DropPatternOnly)
          continue;
        St = Stage::PatternOnly;
      } else if (confirmCandidate(Fn, C, AO)) {
        St = Stage::AliasConfirmed;
      } else {
        continue;
      }
      Finding F{std::move(C)};
      F.St = St;
      F.Conf = St == Stage::AliasConfirmed ? Confidence::High : Confidence::Low;
      F.FnName = Fn.Name;
      if (Fn.ImplOf) {
        F.ImplStruct = Fn.ImplOf->StructName;
        F.ImplTrait = Fn.ImplOf->Trait;
      }
      F.Violation.Span.File = File;
      R.Findings.push_back(std::move(F));
    }
  }
  if (!Opts.NoFilter)
    R.Findings = applyShallowFilter(std::move(R.Findings), Opts.Rules);
  return R;
}

FileResult analyzeSource(std::string_view Source, const std::string &File,
                         const PipelineOptions &Opts) {
  return analyzeCrate(parseCrate(Source, File), File, Opts);
}

FileResult analyzeFile(const std::string &Path, const PipelineOptions &Opts) {
  std::ifstream In(Path, std::ios::binary);
  if (!In)
    throw InputError("cannot read '" + Path + "'");
  std::ostringstream Buf;
  Buf << In.rdbuf();
  return analyzeSource(Buf.str(), Path, Opts);
}

std::vector<std::string> collectSources(const std::vector<std::string> &Paths) {
  std::vector<std::string> Files;
  for (const std::string &P : Paths) {
    std::error_code EC;
    if (fs::is_directory(P, EC)) {
      for (auto It = fs::recursive_directory_iterator(P, EC);
           !EC && It != fs::recursive_directory_iterator(); It.increment(EC))
        if (It->is_regular_file() && It->path().extension() == ".rs")
          Files.push_back(It->path().generic_string());
      if (EC)
        throw InputError("cannot list '" + P + "': " + EC.message());
    } else if (fs::is_regular_file(P, EC)) {
      Files.push_back(P);
    } else {
      throw InputError("no such file or directory: '" + P + "'");
    }
  }
  std::sort(Files.begin(), Files.end());
  Files.erase(std::unique(Files.begin(), Files.end()), Files.end());
  return Files;
}

std::vector<FileResult> analyzePaths(const std::vector<std::string> &Paths,
                                     const PipelineOptions &Opts) {
  std::vector<std::string> Files = collectSources(Paths);
  std::vector<std::future<FileResult>> Jobs;
  Jobs.reserve(Files.size());
  for (const std::string &F : Files)
    Jobs.push_back(std::async(std::launch::async,
                              [&Opts, F] { return analyzeFile(F, Opts); }));
  // get() in path order: the merge is deterministic whatever finishes first.
  // Every future is drained before an exception escapes.
  std::vector<FileResult> Results;
  std::exception_ptr First;
  for (auto &J : Jobs) {
    try {
      Results.push_back(J.get());
    } catch (...) {
      if (!First)
        First = std::current_exception();
    }
  }
  if (First)
    std::rethrow_exception(First);
  return Results;
}

std::vector<Finding> allFindings(const std::vector<FileResult> &Results) {
  std::vector<Finding> Out;
  for (const FileResult &R : Results)
    Out.insert(Out.end(), R.Findings.begin(), R.Findings.end());
  return Out;
}

} // namespace lifecheck
