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

// Core domain types: documents with pre-annotated mentions, relation labels,
// and Temporal Dependency Trees (TDTs).
//
// Every document carries two synthetic nodes besides its EVENT/TIMEX
// mentions: ROOT (document_order -2) and DCT, the document creation time
// (document_order -1). Real mentions are numbered 0..n-1 in reading order.
// Algorithms that need dense arrays index nodes by "slot" = order + 2, so
// ROOT is slot 0, DCT slot 1 and mention i slot i + 2.

#ifndef TDP_TDT_H_
#define TDP_TDT_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tdp {

enum class RelationLabel { kBefore = 0, kAfter = 1, kOverlap = 2, kDependsOn = 3 };

inline constexpr int kNumLabels = 4;
inline constexpr std::array<RelationLabel, kNumLabels> kAllLabels = {
    RelationLabel::kBefore, RelationLabel::kAfter, RelationLabel::kOverlap,
    RelationLabel::kDependsOn};

// Lower-case wire names: "before", "after", "overlap", "depends_on".
std::string_view LabelName(RelationLabel label);
std::optional<RelationLabel> ParseLabel(std::string_view name);

enum class MentionKind { kEvent, kTimex, kRoot, kDct };

// Wire names: "event", "timex", "root", "dct".
std::string_view KindName(MentionKind kind);
std::optional<MentionKind> ParseKind(std::string_view name);

inline constexpr int kRootOrder = -2;
inline constexpr int kDctOrder = -1;
inline constexpr std::string_view kRootId = "ROOT";
inline constexpr std::string_view kDctId = "DCT";

inline constexpr int SlotOf(int document_order) { return document_order + 2; }
inline constexpr int OrderOfSlot(int slot) { return slot - 2; }

// Half-open token range [start, end) within one sentence.
struct TokenSpan {
  int start = 0;
  int end = 0;
  bool operator==(const TokenSpan&) const = default;
};

struct Mention {
  std::string id;
  MentionKind kind = MentionKind::kEvent;
  std::string text;
  int sentence_index = -1;  // -1 for ROOT and DCT
  TokenSpan span;           // {0, 0} for ROOT and DCT
  int document_order = 0;

  bool is_synthetic() const {
    return kind == MentionKind::kRoot || kind == MentionKind::kDct;
  }
  bool operator==(const Mention&) const = default;
};

// An immutable document. The constructor stably sorts the supplied
// EVENT/TIMEX mentions by (sentence_index, span.start), assigns
// document_order, and throws ValidationError if a span falls outside the
// sentences, a span is empty, or an id is duplicated or reserved.
class Document {
 public:
  Document(std::string doc_id, std::string dct_text,
           std::vector<std::vector<std::string>> sentences,
           std::vector<Mention> mentions);

  const std::string& doc_id() const { return doc_id_; }
  const std::string& dct_text() const { return dct_.text; }
  const std::vector<std::vector<std::string>>& sentences() const {
    return sentences_;
  }
  // EVENT/TIMEX mentions in document order.
  const std::vector<Mention>& mentions() const { return mentions_; }
  int num_mentions() const { return static_cast<int>(mentions_.size()); }
  // ROOT + DCT + mentions.
  int num_nodes() const { return num_mentions() + 2; }

  const Mention& root() const { return root_; }
  const Mention& dct() const { return dct_; }
  // Node by document_order, including -2 (ROOT) and -1 (DCT).
  const Mention& node(int document_order) const;
  const Mention* Find(std::string_view id) const;
  std::optional<int> OrderOf(std::string_view id) const;

  bool operator==(const Document& other) const;

 private:
  std::string doc_id_;
  std::vector<std::vector<std::string>> sentences_;
  std::vector<Mention> mentions_;
  Mention root_;
  Mention dct_;
  std::unordered_map<std::string, int> order_by_id_;
};

struct Edge {
  std::string child;
  std::string parent;
  RelationLabel label = RelationLabel::kOverlap;
  bool operator==(const Edge&) const = default;
};

// Edge-level constraint table:
//   EVENT child -> parent in {DCT, TIMEX, EVENT}, label in {BEFORE, AFTER, OVERLAP}
//   TIMEX child -> parent in {ROOT, TIMEX},       label DEPENDS_ON
//   DCT child   -> parent ROOT,                   label DEPENDS_ON
//   ROOT never has a parent.
bool IsLegalParentKind(MentionKind child, MentionKind parent);
bool IsLegalEdge(MentionKind child, MentionKind parent, RelationLabel label);
// Legal labels in label order; empty if the parent kind is illegal.
std::vector<RelationLabel> LegalLabels(MentionKind child, MentionKind parent);

struct TemporalDependencyTree {
  std::string doc_id;
  std::vector<Edge> edges;

  const Edge* ParentEdge(std::string_view child) const;
  // Set equality: edge order is irrelevant.
  bool operator==(const TemporalDependencyTree& other) const;
};

struct Violation {
  enum class Kind {
    kUnknownNode,
    kSelfLoop,
    kRootHasParent,
    kIllegalParentKind,
    kIllegalLabel,
    kMultipleParents,
    kMissingParent,
    kCycle,
    kEdgeCount,
  };
  Kind kind;
  std::string node;  // offending child id (or first node of a cycle)
  std::string message;
};

using ValidationReport = std::vector<Violation>;

// Checks every TDT invariant of `tree` against `doc`. Returns an empty
// report iff the tree is valid. Throws IdentityError on doc_id mismatch.
ValidationReport ValidateTree(const TemporalDependencyTree& tree,
                              const Document& doc);

// Parent links of a partial tree keyed by child id.
using ParentMap = std::unordered_map<std::string, std::string>;

// True iff following existing parent links upward from `parent` reaches
// `child`, i.e. adding child -> parent would close a cycle.
bool WouldCreateCycle(const ParentMap& parents, std::string_view child,
                      std::string_view parent);

inline constexpr int kNoParent = -1;

// Dense variant over slots; parent_slot[s] == kNoParent when unattached.
bool WouldCreateCycle(std::span<const int> parent_slot, int child_slot,
                      int candidate_parent_slot);

// The fixed DCT -> ROOT (DEPENDS_ON) edge every tree starts with.
Edge DeducedRootEdge(const Document& doc);

}  // namespace tdp

#endif  // TDP_TDT_H_
