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

// Pairwise temporal relations implied by a tree.
//
// Edge labels read "child <label> parent". Relations compose along paths:
//
//   OVERLAP . OVERLAP = OVERLAP     BEFORE . OVERLAP = BEFORE
//   OVERLAP . BEFORE  = BEFORE      BEFORE . BEFORE  = BEFORE
//
// and symmetrically for AFTER. BEFORE composed with AFTER stays UNKNOWN:
// the tree deliberately leaves such pairs underspecified. OVERLAP is
// treated as transitive ("same time") rather than as interval
// intersection. DEPENDS_ON edges carry no temporal relation, and ROOT is
// not part of the matrix.

#ifndef TDP_CLOSURE_H_
#define TDP_CLOSURE_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tdp/tdt.h"

namespace tdp {

enum class TemporalRelation { kBefore, kAfter, kOverlap, kUnknown };

std::string_view RelationName(TemporalRelation r);
TemporalRelation Inverse(TemporalRelation r);
TemporalRelation Compose(TemporalRelation ab, TemporalRelation bc);
// BEFORE/AFTER/OVERLAP map across; DEPENDS_ON has no temporal reading.
std::optional<TemporalRelation> TemporalReading(RelationLabel label);

// Square relation table over a fixed node list. Every pair starts UNKNOWN
// except the diagonal (OVERLAP). Set() writes both (a, b) and its inverse
// (b, a), so the matrix is always antisymmetric.
class RelationMatrix {
 public:
  RelationMatrix() = default;
  explicit RelationMatrix(std::vector<std::string> nodes);

  const std::vector<std::string>& nodes() const { return nodes_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  std::optional<int> IndexOf(std::string_view id) const;

  TemporalRelation at(int a, int b) const { return rel_[a * size() + b]; }
  // Throws PreconditionError for ids outside the matrix.
  TemporalRelation at(std::string_view a, std::string_view b) const;
  void Set(int a, int b, TemporalRelation r);

  // Same node set and the same relation for every ordered pair of ids,
  // regardless of node order.
  bool operator==(const RelationMatrix& other) const;

 private:
  std::vector<std::string> nodes_;
  std::unordered_map<std::string, int> index_;
  std::vector<TemporalRelation> rel_;
};

// Non-ROOT nodes of a tree: DCT first, then other nodes in order of first
// appearance among the edges.
std::vector<std::string> TreeNodes(const TemporalDependencyTree& tree);

// The transitive closure of `tree` (assumed valid).
RelationMatrix Close(const TemporalDependencyTree& tree);

// A derived relation that disagrees with one already in the matrix.
struct Inconsistency {
  std::string a;
  std::string b;
  TemporalRelation existing;
  TemporalRelation derived;
};

struct ConstraintClosure {
  RelationMatrix matrix;
  std::vector<Inconsistency> inconsistencies;
};

// Closes an arbitrary constraint matrix to a fixpoint. Known relations are
// never overwritten; conflicting derivations are reported instead.
ConstraintClosure CloseConstraints(const RelationMatrix& seeds);

// Seeds a matrix with the temporal edges of `tree` only (no composition).
RelationMatrix SeedMatrix(const TemporalDependencyTree& tree);

struct RelationDifference {
  std::string a;
  std::string b;
  TemporalRelation in_first;
  TemporalRelation in_second;
};

struct EquivalenceResult {
  bool equivalent = true;
  // First differing pair: tree edges of the first tree are checked first,
  // then all ordered pairs in node order.
  std::optional<RelationDifference> witness;
};

// Throws IdentityError if the trees do not cover the same nodes.
EquivalenceResult TreesEquivalent(const TemporalDependencyTree& a,
                                  const TemporalDependencyTree& b);

enum class TreeMatch { kExact, kClosureEquivalent, kDifferent };
std::string_view TreeMatchName(TreeMatch m);

struct DocumentMatch {
  std::string doc_id;
  TreeMatch match = TreeMatch::kExact;
  std::optional<RelationDifference> witness;
};

struct EquivalenceReport {
  std::vector<DocumentMatch> documents;
  long exact = 0;
  long closure_equivalent = 0;
  long different = 0;
};

// Pairs trees by doc_id; throws IdentityError if the document sets differ.
EquivalenceReport EquivalenceAwareReport(
    std::span<const TemporalDependencyTree> predicted,
    std::span<const TemporalDependencyTree> gold);

std::string FormatMatrixJson(const std::string& doc_id, const RelationMatrix& m);
std::string FormatEquivalenceJson(const EquivalenceReport& report);

}  // namespace tdp

#endif  // TDP_CLOSURE_H_
