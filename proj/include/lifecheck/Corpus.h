//===- Corpus.h - Labeled corpus evaluation ---------------------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// A manifest is a JSON file:
//
//   {"version": 1,
//    "scan": ["clean.rs"],
//    "entries": [{"file": "lru.rs", "function": "LruCache::iter",
//                 "kind": "uaf-arg-return", "label": "true-bug"}]}
//
// Paths are relative to the manifest. Every file named by an entry or by
// "scan" is analyzed; a function with any unfiltered finding counts as a
// detection for precision.
//
//===----------------------------------------------------------------------===//

#ifndef LIFECHECK_CORPUS_H
#define LIFECHECK_CORPUS_H

#include "lifecheck/Pipeline.h"

#include <stdexcept>
#include <string>
#include <vector>

namespace lifecheck {

class ManifestError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class EntryLabel { TrueBug, KnownFalsePositive, KnownMiss };

const char *labelName(EntryLabel L);

struct ManifestEntry {
  /// Resolved against the manifest directory.
  std::string File;
  std::string Function;
  ViolationKind Kind = ViolationKind::UafArgReturn;
  EntryLabel Label = EntryLabel::TrueBug;
};

struct CorpusManifest {
  std::vector<std::string> Scan;
  std::vector<ManifestEntry> Entries;
};

/// Parses and resolves paths; checks that files exist and that entries are
/// unique per (file, function). Does not parse the Rust sources.
CorpusManifest loadManifest(const std::string &Path);
CorpusManifest parseManifest(const std::string &Json, const std::string &BaseDir);

struct EntryResult {
  ManifestEntry Entry;
  /// An unfiltered finding of the expected kind exists in the function.
  bool Detected = false;
  /// Kinds of all unfiltered findings in the function.
  std::vector<std::string> FoundKinds;
};

struct CorpusMetrics {
  double Precision = 1.0;
  double Recall = 1.0;
  bool PrecisionVacuous = false;
  bool RecallVacuous = false;
  std::size_t TruePositives = 0;
  std::size_t TrueBugs = 0;
  /// `file::function` for every function with an unfiltered finding.
  std::vector<std::string> DetectedFunctions;
  std::vector<EntryResult> PerEntry;
  /// Known-miss entries that were detected.
  std::vector<std::string> KnownMissViolations;
  std::vector<std::string> Diagnostics;
};

/// Runs the pipeline over the corpus. Throws ManifestError if an entry's
/// function does not exist after parsing.
CorpusMetrics evaluateCorpus(const CorpusManifest &M, const PipelineOptions &Opts);

std::string formatMetrics(const CorpusMetrics &M);

} // namespace lifecheck

#endif // LIFECHECK_CORPUS_H
