// Copyright 2026 The TDP Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Canonical corpus format: UTF-8 text, one JSON object per line:
//
//   {"doc_id": "...", "dct_text": "...",
//    "sentences": [["tok", ...], ...],
//    "mentions": [{"id": "e1", "kind": "event", "sentence_index": 0,
//                  "token_span": [3, 4], "text": "signed"}, ...],
//    "gold_edges": [{"child": "e1", "parent": "t1", "label": "overlap"}, ...]}
//
// Labels are "before", "after", "overlap" or "depends_on". ROOT and DCT are
// referenced by the reserved ids "ROOT" and "DCT" and are not listed under
// "mentions". Predicted trees use the same format.

#ifndef TDP_CORPUS_IO_H_
#define TDP_CORPUS_IO_H_

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdp/candidates.h"
#include "tdp/tdt.h"

namespace tdp {

struct CorpusRecord {
  Document doc;
  TemporalDependencyTree tree;

  bool operator==(const CorpusRecord&) const = default;
};

struct LoadOptions {
  // Skip invalid records (reporting them through on_warning) instead of
  // throwing.
  bool lenient = false;
  // Accept records without "gold_edges" (documents to be parsed); their
  // tree has no edges. Records that do carry edges are still validated.
  bool documents_only = false;
  std::function<void(const std::string&)> on_warning;
};

// True iff the mention text and its span tokens agree once whitespace and
// punctuation are ignored ("February 27, 1998" matches February|27|1998).
bool MentionTextMatchesSpan(const Mention& mention,
                            const std::vector<std::string>& sentence);

std::string FormatRecord(const CorpusRecord& record);

// Parses one line. Throws ParseError for malformed JSON or missing fields
// and ValidationError (naming doc and mention/edge) for invariant failures.
CorpusRecord ParseRecord(std::string_view line, std::size_t line_number = 1,
                         bool documents_only = false);

std::vector<CorpusRecord> ReadCorpus(std::istream& in,
                                     const LoadOptions& options = {});
std::vector<CorpusRecord> LoadCorpus(const std::filesystem::path& path,
                                     const LoadOptions& options = {});

void WriteCorpus(std::span<const CorpusRecord> records, std::ostream& out);
void SaveCorpus(std::span<const CorpusRecord> records,
                const std::filesystem::path& path);

// Entry point for the 2019 TDT corpus release. Its native layout is not
// documented here, so this currently throws Error; records must first be
// converted to the canonical format.
std::vector<CorpusRecord> ConvertNativeRelease(const std::filesystem::path& path);

struct CorpusStats {
  long documents = 0;
  long sentences = 0;
  long events = 0;
  long timexes = 0;
  long dcts = 0;
  // Indexed by RelationLabel; includes the DCT -> ROOT edge.
  std::array<long, kNumLabels> labels{};
  // Gold parent kinds over all edges: ROOT, DCT, TIMEX (non-DCT), EVENT.
  long parent_root = 0;
  long parent_dct = 0;
  long parent_timex = 0;
  long parent_event = 0;
  // EVENT/TIMEX children, and how many of them have a gold parent outside
  // the candidate window.
  long children = 0;
  long gold_out_of_window = 0;

  long mentions() const { return events + timexes + dcts; }
  double out_of_window_fraction() const;

  CorpusStats& operator+=(const CorpusStats& other);
  bool operator==(const CorpusStats&) const = default;
};

CorpusStats operator+(CorpusStats a, const CorpusStats& b);

CorpusStats ComputeCorpusStats(std::span<const CorpusRecord> records,
                               const WindowConfig& window = {});
std::string FormatStatsJson(const CorpusStats& stats);
std::string FormatStatsTable(const CorpusStats& stats);

}  // namespace tdp

#endif  // TDP_CORPUS_IO_H_
