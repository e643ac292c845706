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

#include "tdp/tdt.h"

#include <algorithm>
#include <set>
#include <utility>

#include "tdp/errors.h"

namespace tdp {

std::string_view LabelName(RelationLabel label) {
  switch (label) {
    case RelationLabel::kBefore:
      return "before";
    case RelationLabel::kAfter:
      return "after";
    case RelationLabel::kOverlap:
      return "overlap";
    case RelationLabel::kDependsOn:
      return "depends_on";
  }
  return "?";
}

std::optional<RelationLabel> ParseLabel(std::string_view name) {
  for (RelationLabel label : kAllLabels) {
    if (LabelName(label) == name) return label;
  }
  return std::nullopt;
}

std::string_view KindName(MentionKind kind) {
  switch (kind) {
    case MentionKind::kEvent:
      return "event";
    case MentionKind::kTimex:
      return "timex";
    case MentionKind::kRoot:
      return "root";
    case MentionKind::kDct:
      return "dct";
  }
  return "?";
}

std::optional<MentionKind> ParseKind(std::string_view name) {
  for (MentionKind kind : {MentionKind::kEvent, MentionKind::kTimex,
                           MentionKind::kRoot, MentionKind::kDct}) {
    if (KindName(kind) == name) return kind;
  }
  return std::nullopt;
}

Document::Document(std::string doc_id, std::string dct_text,
                   std::vector<std::vector<std::string>> sentences,
                   std::vector<Mention> mentions)
    : doc_id_(std::move(doc_id)),
      sentences_(std::move(sentences)),
      mentions_(std::move(mentions)) {
  root_ = Mention{std::string(kRootId), MentionKind::kRoot, "", -1, {}, kRootOrder};
  dct_ = Mention{std::string(kDctId), MentionKind::kDct, std::move(dct_text), -1,
                 {}, kDctOrder};
  std::stable_sort(mentions_.begin(), mentions_.end(),
                   [](const Mention& a, const Mention& b) {
                     if (a.sentence_index != b.sentence_index) {
                       return a.sentence_index < b.sentence_index;
                     }
                     return a.span.start < b.span.start;
                   });
  const int num_sentences = static_cast<int>(sentences_.size());
  for (int i = 0; i < num_mentions(); ++i) {
    Mention& m = mentions_[i];
    m.document_order = i;
    const std::string where = "document " + doc_id_ + ", mention " + m.id;
    if (m.kind != MentionKind::kEvent && m.kind != MentionKind::kTimex) {
      throw ValidationError(where + ": only event/timex mentions may be listed");
    }
    if (m.id == kRootId || m.id == kDctId) {
      throw ValidationError(where + ": id is reserved");
    }
    if (m.sentence_index < 0 || m.sentence_index >= num_sentences) {
      throw ValidationError(where + ": sentence_index out of range");
    }
    const int len = static_cast<int>(sentences_[m.sentence_index].size());
    if (m.span.start < 0 || m.span.start >= m.span.end || m.span.end > len) {
      throw ValidationError(where + ": token_span out of range or empty");
    }
    if (!order_by_id_.emplace(m.id, i).second) {
      throw ValidationError(where + ": duplicate mention id");
    }
  }
  order_by_id_.emplace(root_.id, kRootOrder);
  order_by_id_.emplace(dct_.id, kDctOrder);
}

const Mention& Document::node(int document_order) const {
  if (document_order == kRootOrder) return root_;
  if (document_order == kDctOrder) return dct_;
  return mentions_.at(document_order);
}

const Mention* Document::Find(std::string_view id) const {
  auto order = OrderOf(id);
  return order ? &node(*order) : nullptr;
}

std::optional<int> Document::OrderOf(std::string_view id) const {
  auto it = order_by_id_.find(std::string(id));
  if (it == order_by_id_.end()) return std::nullopt;
  return it->second;
}

bool Document::operator==(const Document& other) const {
  return doc_id_ == other.doc_id_ && dct_ == other.dct_ &&
         sentences_ == other.sentences_ && mentions_ == other.mentions_;
}

bool IsLegalParentKind(MentionKind child, MentionKind parent) {
  switch (child) {
    case MentionKind::kEvent:
      return parent == MentionKind::kDct || parent == MentionKind::kTimex ||
             parent == MentionKind::kEvent;
    case MentionKind::kTimex:
      return parent == MentionKind::kRoot || parent == MentionKind::kTimex;
    case MentionKind::kDct:
      return parent == MentionKind::kRoot;
    case MentionKind::kRoot:
      return false;
  }
  return false;
}

bool IsLegalEdge(MentionKind child, MentionKind parent, RelationLabel label) {
  if (!IsLegalParentKind(child, parent)) return false;
  if (child == MentionKind::kEvent) return label != RelationLabel::kDependsOn;
  return label == RelationLabel::kDependsOn;
}

std::vector<RelationLabel> LegalLabels(MentionKind child, MentionKind parent) {
  std::vector<RelationLabel> labels;
  for (RelationLabel label : kAllLabels) {
    if (IsLegalEdge(child, parent, label)) labels.push_back(label);
  }
  return labels;
}

const Edge* TemporalDependencyTree::ParentEdge(std::string_view child) const {
  for (const Edge& e : edges) {
    if (e.child == child) return &e;
  }
  return nullptr;
}

namespace {

auto EdgeKey(const Edge& e) {
  return std::make_tuple(e.child, e.parent, static_cast<int>(e.label));
}

}  // namespace

bool TemporalDependencyTree::operator==(
    const TemporalDependencyTree& other) const {
  if (doc_id != other.doc_id || edges.size() != other.edges.size()) {
    return false;
  }
  std::multiset<decltype(EdgeKey(Edge{}))> a, b;
  for (const Edge& e : edges) a.insert(EdgeKey(e));
  for (const Edge& e : other.edges) b.insert(EdgeKey(e));
  return a == b;
}

ValidationReport ValidateTree(const TemporalDependencyTree& tree,
                              const Document& doc) {
  if (tree.doc_id != doc.doc_id()) {
    throw IdentityError("tree for document '" + tree.doc_id +
                        "' checked against document '" + doc.doc_id() + "'");
  }
  ValidationReport report;
  auto add = [&report](Violation::Kind kind, const std::string& node,
                       std::string message) {
    report.push_back({kind, node, std::move(message)});
  };

  const int num_slots = doc.num_nodes();
  std::vector<int> parent_slot(num_slots, kNoParent);
  std::vector<int> parent_count(num_slots, 0);

  for (const Edge& e : tree.edges) {
    const Mention* child = doc.Find(e.child);
    const Mention* parent = doc.Find(e.parent);
    const std::string edge_name = e.child + " -> " + e.parent;
    if (child == nullptr) {
      add(Violation::Kind::kUnknownNode, e.child,
          "edge " + edge_name + ": unknown child " + e.child);
    }
    if (parent == nullptr) {
      add(Violation::Kind::kUnknownNode, e.child,
          "edge " + edge_name + ": unknown parent " + e.parent);
    }
    if (child == nullptr || parent == nullptr) continue;
    if (child == parent) {
      add(Violation::Kind::kSelfLoop, e.child, e.child + " is its own parent");
      continue;
    }
    if (child->kind == MentionKind::kRoot) {
      add(Violation::Kind::kRootHasParent, e.child, "ROOT must not have a parent");
      continue;
    }
    if (!IsLegalParentKind(child->kind, parent->kind)) {
      add(Violation::Kind::kIllegalParentKind, e.child,
          "edge " + edge_name + ": a " + std::string(KindName(child->kind)) +
              " may not attach to a " + std::string(KindName(parent->kind)));
    } else if (!IsLegalEdge(child->kind, parent->kind, e.label)) {
      add(Violation::Kind::kIllegalLabel, e.child,
          "edge " + edge_name + ": label " + std::string(LabelName(e.label)) +
              " is illegal for a " + std::string(KindName(child->kind)) +
              " child");
    }
    const int c = SlotOf(child->document_order);
    if (++parent_count[c] > 1) {
      if (parent_count[c] == 2) {
        add(Violation::Kind::kMultipleParents, e.child,
            e.child + " has more than one parent");
      }
      continue;
    }
    parent_slot[c] = SlotOf(parent->document_order);
  }

  for (int s = 1; s < num_slots; ++s) {
    if (parent_count[s] == 0) {
      const std::string& id = doc.node(OrderOfSlot(s)).id;
      add(Violation::Kind::kMissingParent, id, id + " has no parent");
    }
  }

  // Any node whose parent chain revisits a node is on, or leads into, a
  // cycle. Report each cycle once.
  std::vector<int> state(num_slots, 0);  // 0 unseen, 1 on stack, 2 done
  for (int s = 0; s < num_slots; ++s) {
    std::vector<int> path;
    int cur = s;
    while (cur != kNoParent && state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = parent_slot[cur];
    }
    if (cur != kNoParent && state[cur] == 1) {
      auto start = std::find(path.begin(), path.end(), cur);
      std::string members;
      for (auto it = start; it != path.end(); ++it) {
        if (!members.empty()) members += " -> ";
        members += doc.node(OrderOfSlot(*it)).id;
      }
      const std::string& first = doc.node(OrderOfSlot(cur)).id;
      add(Violation::Kind::kCycle, first, "cycle: " + members + " -> " + first);
    }
    for (int p : path) state[p] = 2;
  }

  const std::size_t expected = static_cast<std::size_t>(doc.num_mentions()) + 1;
  if (tree.edges.size() != expected) {
    add(Violation::Kind::kEdgeCount, "",
        "tree has " + std::to_string(tree.edges.size()) + " edges, expected " +
            std::to_string(expected));
  }
  return report;
}

bool WouldCreateCycle(const ParentMap& parents, std::string_view child,
                      std::string_view parent) {
  std::string cur(parent);
  // Bounded walk: a malformed map must not hang the caller.
  for (std::size_t steps = 0; steps <= parents.size(); ++steps) {
    if (cur == child) return true;
    auto it = parents.find(cur);
    if (it == parents.end()) return false;
    cur = it->second;
  }
  return false;
}

bool WouldCreateCycle(std::span<const int> parent_slot, int child_slot,
                      int candidate_parent_slot) {
  int cur = candidate_parent_slot;
  for (std::size_t steps = 0; steps <= parent_slot.size(); ++steps) {
    if (cur == child_slot) return true;
    if (cur < 0 || static_cast<std::size_t>(cur) >= parent_slot.size()) {
      return false;
    }
    cur = parent_slot[cur];
  }
  return false;
}

Edge DeducedRootEdge(const Document& doc) {
  return Edge{doc.dct().id, doc.root().id, RelationLabel::kDependsOn};
}

}  // namespace tdp
