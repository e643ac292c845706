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

// Greedy incremental tree assembly.
//
// DCT -> ROOT is inserted first. Mentions are then visited in document
// order; each child's rows are ranked by descending probability (ties:
// nearer-earlier candidate, i.e. ascending document_order, then label order
// BEFORE < AFTER < OVERLAP < DEPENDS_ON) and the first row whose parent
// does not close a cycle is committed. Earlier children are never revisited.

#ifndef TDP_DECODER_H_
#define TDP_DECODER_H_

#include <span>
#include <string>
#include <vector>

#include "tdp/score_table.h"
#include "tdp/tdt.h"

namespace tdp {

struct ChildDecision {
  int child = 0;
  int parent = kDctOrder;
  RelationLabel label = RelationLabel::kOverlap;
  double probability = 0.0;
  int cycle_skips = 0;  // higher-ranked rows rejected because of a cycle
};

struct DecodeTrace {
  std::vector<ChildDecision> decisions;

  int children_with_skip() const;
  // Fraction of children whose first-ranked row was skipped; 0 when empty.
  double cycle_skip_fraction() const;
};

struct DecodeResult {
  TemporalDependencyTree tree;
  DecodeTrace trace;
};

// Row indices of `table` in decoding preference order.
std::vector<int> RankRows(const ScoreTable& table);

// `tables[i]` scores mention i. Throws PreconditionError on a missing,
// misordered or illegal table, or one without an acyclic row.
DecodeResult Decode(const Document& doc, std::span<const ScoreTable> tables);

// (# children whose first-ranked row was skipped) / (# children) over many
// documents. Throws PreconditionError when there are no children at all.
double CycleSkipRate(std::span<const DecodeTrace> traces);

// Indented rendering, one node per line, children sorted by document order.
std::string FormatTreeIndented(const Document& doc, const TemporalDependencyTree& tree);
// Graphviz description of the tree.
std::string FormatTreeDot(const Document& doc, const TemporalDependencyTree& tree);

}  // namespace tdp

#endif  // TDP_DECODER_H_
