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

#ifndef TDP_SCORE_TABLE_H_
#define TDP_SCORE_TABLE_H_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tdp/candidates.h"
#include "tdp/tdt.h"

namespace tdp {

struct ScoreRow {
  int parent = kDctOrder;  // document_order of the candidate parent
  RelationLabel label = RelationLabel::kOverlap;
  double score = 0.0;        // raw model score
  double probability = 0.0;  // softmax over all rows of the table
};

// Scores of every (candidate parent, legal label) pair for one child. One
// softmax spans all rows, so probabilities sum to one per child.
struct ScoreTable {
  int child = 0;
  std::vector<ScoreRow> rows;

  // Index of the highest-probability row (first on ties), or -1 if empty.
  int ArgmaxRow() const;
};

// Builds the table's rows in candidate order x label order (only labels
// legal for the pair), with all raw scores zero.
ScoreTable EmptyScoreTable(const Document& doc, const CandidateSet& candidates);

// Recomputes every row's probability as the softmax of the raw scores.
void NormalizeScores(ScoreTable& table);

// Throws PreconditionError if a row names an unknown node or an edge that
// violates the label constraints.
void CheckScoreTable(const Document& doc, const ScoreTable& table);

// Serialized tables of one document:
//
//   {"doc_id": "...",
//    "tables": [{"child": "e1",
//                "rows": [{"parent": "DCT", "label": "before",
//                          "score": 1.5, "probability": 0.4}, ...]}, ...]}
//
// Nodes are referenced by id. "probability" is informational; reading
// recomputes it from "score".
nlohmann::json ScoreTablesToJson(const Document& doc, std::span<const ScoreTable> tables);

// Throws ConfigError for a malformed object and PreconditionError for
// unknown ids or illegal rows.
std::vector<ScoreTable> ScoreTablesFromJson(const Document& doc, const nlohmann::json& j);

}  // namespace tdp

#endif  // TDP_SCORE_TABLE_H_
