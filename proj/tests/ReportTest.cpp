//===- ReportTest.cpp - Filter, report, corpus and CLI --------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "TestSupport.h"
#include "lifecheck/Cli.h"
#include "lifecheck/Corpus.h"
#include "lifecheck/Pipeline.h"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

namespace fs = std::filesystem;
using namespace lifecheck;
using namespace lifecheck::testing;

namespace {

/// A scratch directory removed at scope exit.
class TempDir {
public:
  TempDir() {
    static unsigned Counter = 0;
    Path = fs::temp_directory_path() /
           ("lifecheck-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(Counter++));
    fs::create_directories(Path);
  }
  ~TempDir() {
    std::error_code EC;
    fs::remove_all(Path, EC);
  }
  std::string write(const std::string &Name, const std::string &Text) const {
    fs::path P = Path / Name;
    std::ofstream(P) << Text;
    return P.string();
  }
  std::string str() const { return Path.string(); }

private:
  fs::path Path;
};

struct CliRun {
  int Code;
  std::string Out, Err;
};

CliRun run(std::vector<std::string> Args) {
  std::ostringstream Out, Err;
  int Code = runCli(Args, Out, Err);
  return {Code, Out.str(), Err.str()};
}

unsigned lines(const std::string &S) {
  return static_cast<unsigned>(std::count(S.begin(), S.end(), '\n'));
}

std::vector<Finding> analyze(const std::string &Relative, PipelineOptions Opts = {}) {
  return analyzeFile(sourcePath(Relative), Opts).Findings;
}

//===-- Shallow filter ----------------------------------------------------===//

TEST(Glob, Star) {
  EXPECT_TRUE(globMatch("next", "next"));
  EXPECT_FALSE(globMatch("next", "next_back"));
  EXPECT_TRUE(globMatch("next*", "next_back"));
  EXPECT_TRUE(globMatch("*Iterator", "DoubleEndedIterator"));
  EXPECT_TRUE(globMatch("*Iterator", "Iterator"));
  EXPECT_FALSE(globMatch("*Iterator", "IteratorExt"));
  EXPECT_TRUE(globMatch("*", ""));
  EXPECT_TRUE(globMatch("a*b*c", "axxbyyc"));
  EXPECT_FALSE(globMatch("a*b*c", "axxbyy"));
  EXPECT_FALSE(globMatch("", "x"));
}

TEST(Filter, IteratorNextIsFiltered) {
  PipelineOptions Opts;
  auto F = analyze("corpus/ablation/iter.rs", Opts);
  ASSERT_FALSE(F.empty());
  std::set<std::string> Rules;
  for (const Finding &X : F) {
    EXPECT_EQ(X.St, Stage::Filtered) << X.FnName;
    ASSERT_TRUE(X.SuppressedBy);
    Rules.insert(*X.SuppressedBy);
  }
  EXPECT_EQ(Rules, (std::set<std::string>{"iter-next", "iter-next-back"}));
}

TEST(Filter, LruIterIsNotFiltered) {
  auto F = analyze("corpus/bugs/lru.rs");
  bool Any = false;
  for (const Finding &X : F)
    if (X.FnName == "iter") {
      Any = true;
      EXPECT_NE(X.St, Stage::Filtered);
    }
  EXPECT_TRUE(Any);
}

TEST(Filter, EmptyRulesAreTheIdentity) {
  PipelineOptions Opts;
  Opts.NoFilter = true;
  auto Raw = analyze("corpus/ablation/iter.rs", Opts);
  auto Kept = applyShallowFilter(Raw, {});
  ASSERT_EQ(Kept.size(), Raw.size());
  for (std::size_t I = 0; I < Raw.size(); ++I) {
    EXPECT_EQ(toEntry(Kept[I]), toEntry(Raw[I]));
    EXPECT_FALSE(Kept[I].SuppressedBy);
  }
}

TEST(Filter, PreservesOrderAndOnlyMarks) {
  PipelineOptions Opts;
  Opts.NoFilter = true;
  auto Raw = analyze("corpus/ablation/iter.rs", Opts);
  auto Marked = applyShallowFilter(Raw, defaultFilterRules());
  ASSERT_EQ(Marked.size(), Raw.size());
  for (std::size_t I = 0; I < Raw.size(); ++I)
    EXPECT_EQ(Marked[I].Violation.Source.Path, Raw[I].Violation.Source.Path);
}

TEST(Filter, ImplPatternFallsBackToStruct) {
  CandidateViolation V{ViolationKind::UafArgReturn,
                       decompose(PathRoot::self(), SubjectType::prim("i32"), {})[0],
                       decompose(PathRoot::ret(), SubjectType::prim("i32"), {})[0],
                       NemForm::None, "next", SourceSpan{}};
  Finding Inherent(V);
  Inherent.FnName = "next";
  Inherent.ImplStruct = "Cursor";
  Finding ByStruct = Inherent;
  ByStruct.ImplStruct = "MyIterator";
  Finding Free = Inherent;
  Free.ImplStruct.reset();
  auto Out = applyShallowFilter({Inherent, ByStruct, Free}, defaultFilterRules());
  EXPECT_EQ(Out[0].St, Stage::Candidate);
  EXPECT_EQ(Out[1].St, Stage::Filtered);
  EXPECT_EQ(Out[2].St, Stage::Candidate);

  std::vector<FilterRule> Anywhere{{"any-next", "next", std::nullopt}};
  Out = applyShallowFilter({Inherent, Free}, Anywhere);
  EXPECT_EQ(Out[0].St, Stage::Filtered);
  EXPECT_EQ(Out[1].St, Stage::Filtered);
}

TEST(FilterFile, ShippedFileMatchesDefaults) {
  auto Rules = loadFilterRules(sourcePath("data/filters.json"));
  auto Defaults = defaultFilterRules();
  ASSERT_EQ(Rules.size(), Defaults.size());
  for (std::size_t I = 0; I < Rules.size(); ++I) {
    EXPECT_EQ(Rules[I].Name, Defaults[I].Name);
    EXPECT_EQ(Rules[I].FunctionPattern, Defaults[I].FunctionPattern);
    EXPECT_EQ(Rules[I].ImplPattern, Defaults[I].ImplPattern);
  }
}

TEST(FilterFile, Errors) {
  TempDir D;
  EXPECT_THROW(loadFilterRules(D.str() + "/missing.json"), FilterFileError);
  EXPECT_THROW(loadFilterRules(D.write("a.json", "{")), FilterFileError);
  EXPECT_THROW(loadFilterRules(D.write("b.json", R"({"version": 2, "rules": []})")),
               FilterFileError);
  EXPECT_THROW(loadFilterRules(D.write("c.json", R"({"version": 1, "rules": [{}]})")),
               FilterFileError);
  auto R = loadFilterRules(
      D.write("d.json", R"({"version": 1, "rules": [{"name": "x", "function": "f*"}]})"));
  ASSERT_EQ(R.size(), 1u);
  EXPECT_FALSE(R[0].ImplPattern);
}

TEST(FilterFile, EnvironmentOverride) {
  TempDir D;
  std::string P = D.write(
      "r.json", R"({"version": 1, "rules": [{"name": "only", "function": "zzz"}]})");
  const char *Old = std::getenv("LIFECHECK_FILTERS");
  std::string Saved = Old ? Old : "";
  ::setenv("LIFECHECK_FILTERS", P.c_str(), 1);
  auto Rules = loadConfiguredFilterRules();
  if (Old)
    ::setenv("LIFECHECK_FILTERS", Saved.c_str(), 1);
  else
    ::unsetenv("LIFECHECK_FILTERS");
  ASSERT_EQ(Rules.size(), 1u);
  EXPECT_EQ(Rules[0].Name, "only");
}

//===-- Report ------------------------------------------------------------===//

TEST(Report, TextFormat) {
  auto F = analyzeFile("corpus/bugs/fig.rs", {}).Findings;
  EXPECT_EQ(emitReport(F, ReportFormat::Text),
            "corpus/bugs/fig.rs:6 uaf-arg-return (*arg2).y -> *(ret.x) [high]\n");
}

TEST(Report, VerboseShowsFiltered) {
  auto F = analyzeFile("corpus/ablation/iter.rs", {}).Findings;
  EXPECT_EQ(emitReport(F, ReportFormat::Text), "");
  std::string Verbose = emitReport(F, ReportFormat::Text, true);
  EXPECT_EQ(lines(Verbose), F.size());
  EXPECT_NE(Verbose.find(" (filtered)\n"), std::string::npos);
}

TEST(Report, JsonRoundTrip) {
  PipelineOptions Opts;
  Opts.NoAlias = true;
  auto F = analyzeFile("corpus/bugs/fig.rs", Opts).Findings;
  std::string Json = emitReport(F, ReportFormat::Json);
  auto Back = parseJsonReport(Json);
  EXPECT_EQ(Back, reportEntries(F));
  ASSERT_EQ(Back.size(), 4u);
  EXPECT_EQ(Back[0].File, "corpus/bugs/fig.rs");
  EXPECT_EQ(Back[0].Line, 6u);
  EXPECT_EQ(Back[0].Function, "bar");
  EXPECT_EQ(Back[0].Stage, "candidate");
  EXPECT_EQ(Back[0].Confidence, "low");
  EXPECT_EQ(Json.rfind("{\n  \"version\": 1,\n  \"findings\": [", 0), 0u);
}

TEST(Report, MalformedJsonIsRejected) {
  EXPECT_THROW(parseJsonReport("nope"), std::runtime_error);
  EXPECT_THROW(parseJsonReport(R"({"version": 2, "findings": []})"), std::runtime_error);
  EXPECT_THROW(parseJsonReport(R"({"version": 1, "findings": [{"file": "x"}]})"),
               std::runtime_error);
  EXPECT_TRUE(parseJsonReport(R"({"version": 1, "findings": []})").empty());
}

TEST(Pipeline, PatternOnlyWithoutBody) {
  std::string Src = "struct P<'a> { p: *const String }\n"
                    "fn f<'a, 'b>(x: &'b String) -> P<'a> { let g = || 1; loop {} }\n";
  auto R = analyzeSource(Src, "t.rs", {});
  ASSERT_EQ(R.Findings.size(), 1u);
  EXPECT_EQ(R.Findings[0].St, Stage::PatternOnly);
  EXPECT_EQ(R.Findings[0].Conf, Confidence::Low);
  EXPECT_FALSE(R.Diagnostics.empty());
  PipelineOptions Drop;
  Drop.DropPatternOnly = true;
  EXPECT_TRUE(analyzeSource(Src, "t.rs", Drop).Findings.empty());
}

TEST(Pipeline, CollectSourcesIsSortedAndDeduplicated) {
  auto Files = collectSources({"corpus/bugs", "corpus/bugs/fig.rs"});
  EXPECT_TRUE(std::is_sorted(Files.begin(), Files.end()));
  EXPECT_EQ(std::count(Files.begin(), Files.end(), "corpus/bugs/fig.rs"), 1);
  for (const std::string &F : Files)
    EXPECT_EQ(fs::path(F).extension(), ".rs");
  EXPECT_THROW(collectSources({"corpus/nowhere"}), InputError);
}

//===-- Corpus ------------------------------------------------------------===//

TEST(Corpus, BugManifest) {
  CorpusManifest M = loadManifest(sourcePath("corpus/bugs/manifest.json"));
  CorpusMetrics R = evaluateCorpus(M, {});
  EXPECT_DOUBLE_EQ(R.Precision, 1.0);
  EXPECT_DOUBLE_EQ(R.Recall, 1.0);
  EXPECT_EQ(R.TruePositives, 4u);
  EXPECT_EQ(R.DetectedFunctions.size(), 4u);
  EXPECT_TRUE(R.KnownMissViolations.empty());
  EXPECT_FALSE(R.PrecisionVacuous);
}

TEST(Corpus, ManifestErrors) {
  TempDir D;
  D.write("a.rs", "fn f(x: &i32) -> &i32 { x }\n");
  EXPECT_THROW(parseManifest(R"({"version": 1, "entries": []})", D.str()),
               ManifestError);
  EXPECT_THROW(parseManifest("[", D.str()), ManifestError);
  EXPECT_THROW(parseManifest(R"({"version": 1, "entries": [{"file": "b.rs",
      "function": "f", "kind": "uaf-arg-return", "label": "true-bug"}]})",
                             D.str()),
               ManifestError);
  EXPECT_THROW(parseManifest(R"({"version": 1, "entries": [{"file": "a.rs",
      "function": "f", "kind": "uaf", "label": "true-bug"}]})",
                             D.str()),
               ManifestError);
  EXPECT_THROW(parseManifest(R"({"version": 1, "entries": [
      {"file": "a.rs", "function": "f", "kind": "uaf-arg-return", "label": "true-bug"},
      {"file": "a.rs", "function": "f", "kind": "uaf-arg-arg", "label": "true-bug"}]})",
                             D.str()),
               ManifestError);
  EXPECT_THROW(loadManifest(D.str() + "/none.json"), ManifestError);
}

TEST(Corpus, UnresolvableEntry) {
  TempDir D;
  D.write("a.rs", "fn f(x: &i32) -> &i32 { x }\n");
  CorpusManifest M = parseManifest(R"({"version": 1, "entries": [{"file": "a.rs",
      "function": "g", "kind": "uaf-arg-return", "label": "true-bug"}]})",
                                   D.str());
  EXPECT_THROW(evaluateCorpus(M, {}), ManifestError);
}

TEST(Corpus, AllKnownMissIsVacuous) {
  CorpusManifest M;
  M.Entries.push_back({sourcePath("corpus/bugs/waker.rs"), "waker",
                       ViolationKind::UafArgReturn, EntryLabel::KnownMiss});
  CorpusMetrics R = evaluateCorpus(M, {});
  EXPECT_TRUE(R.PrecisionVacuous);
  EXPECT_TRUE(R.RecallVacuous);
  EXPECT_DOUBLE_EQ(R.Precision, 1.0);
  EXPECT_DOUBLE_EQ(R.Recall, 1.0);
  EXPECT_TRUE(R.KnownMissViolations.empty());
  EXPECT_NE(formatMetrics(R).find("vacuous"), std::string::npos);
}

TEST(Corpus, DetectedKnownMissIsReported) {
  CorpusManifest M;
  M.Entries.push_back({sourcePath("corpus/bugs/fig.rs"), "bar",
                       ViolationKind::UafArgReturn, EntryLabel::KnownMiss});
  CorpusMetrics R = evaluateCorpus(M, {});
  ASSERT_EQ(R.KnownMissViolations.size(), 1u);
  EXPECT_DOUBLE_EQ(R.Precision, 0.0);
}

TEST(Corpus, AblationDirections) {
  CorpusManifest M = loadManifest(sourcePath("corpus/ablation/manifest.json"));
  CorpusMetrics Full = evaluateCorpus(M, {});
  PipelineOptions NoAlias, NoFilter;
  NoAlias.NoAlias = true;
  NoFilter.NoFilter = true;
  CorpusMetrics A = evaluateCorpus(M, NoAlias), F = evaluateCorpus(M, NoFilter);
  EXPECT_DOUBLE_EQ(Full.Precision, 1.0);
  EXPECT_DOUBLE_EQ(Full.Recall, 1.0);
  EXPECT_LT(A.Precision, Full.Precision);
  EXPECT_LT(F.Precision, Full.Precision);
  EXPECT_GE(A.Recall, Full.Recall);
  EXPECT_GE(F.Recall, Full.Recall);
}

//===-- CLI ---------------------------------------------------------------===//

TEST(Cli, FigureExitsOne) {
  CliRun R = run({"scan", "corpus/bugs/fig.rs"});
  EXPECT_EQ(R.Code, 1);
  EXPECT_EQ(lines(R.Out), 1u);
}

TEST(Cli, NoAliasReportsFour) {
  CliRun R = run({"scan", "--no-alias", "corpus/bugs/fig.rs"});
  EXPECT_EQ(R.Code, 1);
  EXPECT_EQ(lines(R.Out), 4u);
}

TEST(Cli, CleanExitsZero) {
  CliRun R = run({"scan", "corpus/bugs/clean.rs", "corpus/ablation/clean.rs"});
  EXPECT_EQ(R.Code, 0);
  EXPECT_EQ(R.Out, "");
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"scan", "--bogus", "corpus/bugs/fig.rs"}).Code, 2);
  EXPECT_EQ(run({"scan", "--max-depth", "0", "corpus/bugs/fig.rs"}).Code, 2);
  EXPECT_EQ(run({"scan", "--format", "xml", "corpus/bugs/fig.rs"}).Code, 2);
  EXPECT_EQ(run({}).Code, 2);
  CliRun Missing = run({"scan", "corpus/bugs/missing.rs"});
  EXPECT_EQ(Missing.Code, 2);
  EXPECT_EQ(Missing.Err.rfind("error:", 0), 0u) << Missing.Err;
}

TEST(Cli, ParseErrorExitsTwo) {
  TempDir D;
  std::string P = D.write("bad.rs", "struct S { x: }\n");
  CliRun R = run({"scan", P});
  EXPECT_EQ(R.Code, 2);
  EXPECT_NE(R.Err.find("bad.rs:1:"), std::string::npos) << R.Err;
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).Code, 0); }

TEST(Cli, JsonOutputParses) {
  CliRun R = run({"scan", "--format", "json", "corpus/bugs"});
  EXPECT_EQ(R.Code, 1);
  auto Entries = parseJsonReport(R.Out);
  std::set<std::string> Files;
  for (const ReportEntry &E : Entries)
    Files.insert(fs::path(E.File).filename().string());
  EXPECT_EQ(Files, (std::set<std::string>{"cslice.rs", "fig.rs", "lru.rs",
                                          "rulinalg.rs", "rusqlite.rs"}));
}

TEST(Cli, EvalExitCodes) {
  CliRun R = run({"eval", "corpus/bugs/manifest.json"});
  EXPECT_EQ(R.Code, 0) << R.Err;
  EXPECT_NE(R.Out.find("precision 1.000 (4/4)"), std::string::npos) << R.Out;
  EXPECT_NE(R.Out.find("recall 1.000 (4/4)"), std::string::npos) << R.Out;

  TempDir D;
  std::string M = D.write("m.json", "{\"version\": 1, \"entries\": [{\"file\": \"" +
                                        sourcePath("corpus/bugs/fig.rs") +
                                        "\", \"function\": \"bar\", \"kind\": "
                                        "\"uaf-arg-return\", \"label\": \"known-miss\"}]}");
  EXPECT_EQ(run({"eval", M}).Code, 1);
  EXPECT_EQ(run({"eval", D.str() + "/none.json"}).Code, 2);
}

TEST(Cli, EvalJson) {
  CliRun R = run({"eval", "--format", "json", "corpus/bugs/manifest.json"});
  ASSERT_EQ(R.Code, 0) << R.Err;
  auto J = nlohmann::json::parse(R.Out);
  EXPECT_EQ(J["precision"], 1.0);
  EXPECT_EQ(J["recall"], 1.0);
  EXPECT_EQ(J["entries"].size(), 5u);
}

TEST(Cli, VerboseAddsNotes) {
  CliRun R = run({"scan", "-v", "corpus/bugs/lru.rs"});
  EXPECT_NE(R.Err.find("note: "), std::string::npos);
  EXPECT_NE(R.Err.find("truncated to 256"), std::string::npos);
}

//===-- Flag monotonicity -------------------------------------------------===//

std::set<ReportEntry> unfiltered(PipelineOptions Opts) {
  std::set<ReportEntry> Out;
  for (const FileResult &R : analyzePaths({"corpus"}, Opts))
    for (const Finding &F : R.Findings)
      if (F.St != Stage::Filtered) {
        ReportEntry E = toEntry(F);
        // Confidence and stage differ by design across modes.
        E.Confidence.clear();
        E.Stage.clear();
        Out.insert(E);
      }
  return Out;
}

bool subset(const std::set<ReportEntry> &A, const std::set<ReportEntry> &B) {
  return std::includes(B.begin(), B.end(), A.begin(), A.end());
}

TEST(Flags, DisablingStagesOnlyAddsFindings) {
  PipelineOptions Default, NoAlias, NoFilter, Loose, Both;
  NoAlias.NoAlias = true;
  NoFilter.NoFilter = true;
  Loose.UnknownFields = true;
  Both.NoAlias = Both.NoFilter = true;
  auto Base = unfiltered(Default);
  EXPECT_TRUE(subset(Base, unfiltered(NoAlias)));
  EXPECT_TRUE(subset(Base, unfiltered(NoFilter)));
  EXPECT_TRUE(subset(Base, unfiltered(Loose)));
  EXPECT_TRUE(subset(unfiltered(NoAlias), unfiltered(Both)));
  EXPECT_TRUE(subset(unfiltered(NoFilter), unfiltered(Both)));
}

} // namespace
