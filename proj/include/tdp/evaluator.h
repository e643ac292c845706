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

#ifndef TDP_EVALUATOR_H_
#define TDP_EVALUATOR_H_

#include <span>
#include <string>

#include "tdp/corpus_io.h"
#include "tdp/tdt.h"

namespace tdp {

// Children grouped by the kind of their *gold* parent.
enum class ParentCategory { kRoot = 0, kDct = 1, kTimex = 2, kEvent = 3 };
inline constexpr int kNumCategories = 4;
std::string_view CategoryName(ParentCategory c);

struct EdgeCounts {
  long gold = 0;
  long predicted = 0;
  long correct = 0;            // child, parent and label match
  long parent_correct = 0;     // child and parent match

  EdgeCounts& operator+=(const EdgeCounts& o);
};

struct CategoryScore {
  long total = 0;    // gold children in the category
  long correct = 0;  // of which predicted exactly
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

struct EvalReport {
  long documents = 0;
  // Mention edges only; the deterministic DCT -> ROOT edge is excluded.
  EdgeCounts edges;
  // Same counts with DCT -> ROOT included, for comparison with figures
  // that count a document's n + 1 edges.
  EdgeCounts edges_with_root;
  CategoryScore categories[kNumCategories];

  double precision() const;
  double recall() const;
  double f1() const;             // labeled
  double unlabeled_f1() const;
  double accuracy() const;       // correct / gold
  double f1_with_root_edge() const;
  const CategoryScore& category(ParentCategory c) const {
    return categories[static_cast<int>(c)];
  }
};

// Per-document counts; `predicted.doc_id` must equal `doc.doc_id()`.
EvalReport EvaluateDocument(const Document& doc,
                            const TemporalDependencyTree& predicted,
                            const TemporalDependencyTree& gold);

// Micro-averaged over documents paired by doc_id. Throws IdentityError if
// the document sets differ.
EvalReport Evaluate(std::span<const TemporalDependencyTree> predicted,
                    std::span<const CorpusRecord> gold);

EvalReport& operator+=(EvalReport& a, const EvalReport& b);

// report_b minus report_a, per category, in ParentCategory order.
struct CategoryDelta {
  double delta[kNumCategories] = {};
  double operator[](ParentCategory c) const { return delta[static_cast<int>(c)]; }
};
CategoryDelta CategoryBreakdownDelta(const EvalReport& a, const EvalReport& b);

std::string FormatReportJson(const EvalReport& report);
std::string FormatReportTable(const EvalReport& report);

}  // namespace tdp

#endif  // TDP_EVALUATOR_H_
