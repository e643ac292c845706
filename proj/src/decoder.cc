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

#include "tdp/decoder.h"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "tdp/errors.h"

namespace tdp {

int DecodeTrace::children_with_skip() const {
  return static_cast<int>(std::count_if(decisions.begin(), decisions.end(),
                                        [](const ChildDecision& d) {
                                          return d.cycle_skips > 0;
                                        }));
}

double DecodeTrace::cycle_skip_fraction() const {
  if (decisions.empty()) return 0.0;
  return static_cast<double>(children_with_skip()) / decisions.size();
}

std::vector<int> RankRows(const ScoreTable& table) {
  std::vector<int> order(table.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const ScoreRow& x = table.rows[a];
    const ScoreRow& y = table.rows[b];
    if (x.probability != y.probability) return x.probability > y.probability;
    if (x.parent != y.parent) return x.parent < y.parent;
    return static_cast<int>(x.label) < static_cast<int>(y.label);
  });
  return order;
}

DecodeResult Decode(const Document& doc, std::span<const ScoreTable> tables) {
  if (static_cast<int>(tables.size()) != doc.num_mentions()) {
    throw PreconditionError("document " + doc.doc_id() + " has " +
                            std::to_string(doc.num_mentions()) + " mentions but " +
                            std::to_string(tables.size()) + " score tables");
  }
  DecodeResult result;
  result.tree.doc_id = doc.doc_id();
  result.tree.edges.push_back(DeducedRootEdge(doc));

  std::vector<int> parent_slot(doc.num_nodes(), kNoParent);
  parent_slot[SlotOf(kDctOrder)] = SlotOf(kRootOrder);

  for (int i = 0; i < doc.num_mentions(); ++i) {
    const ScoreTable& table = tables[i];
    if (table.child != i) {
      throw PreconditionError("score table " + std::to_string(i) + " of " +
                              doc.doc_id() + " is for child " +
                              std::to_string(table.child));
    }
    CheckScoreTable(doc, table);
    ChildDecision decision;
    decision.child = i;
    bool committed = false;
    for (int row_index : RankRows(table)) {
      const ScoreRow& row = table.rows[row_index];
      if (WouldCreateCycle(parent_slot, SlotOf(i), SlotOf(row.parent))) {
        ++decision.cycle_skips;
        continue;
      }
      decision.parent = row.parent;
      decision.label = row.label;
      decision.probability = row.probability;
      committed = true;
      break;
    }
    if (!committed) {
      throw PreconditionError("no acyclic parent for " + doc.node(i).id + " in " +
                              doc.doc_id());
    }
    parent_slot[SlotOf(i)] = SlotOf(decision.parent);
    result.tree.edges.push_back(
        {doc.node(i).id, doc.node(decision.parent).id, decision.label});
    result.trace.decisions.push_back(decision);
  }
  return result;
}

double CycleSkipRate(std::span<const DecodeTrace> traces) {
  long children = 0;
  long skipped = 0;
  for (const DecodeTrace& t : traces) {
    children += static_cast<long>(t.decisions.size());
    skipped += t.children_with_skip();
  }
  if (children == 0) {
    throw PreconditionError("cycle skip rate is undefined without decoded children");
  }
  return static_cast<double>(skipped) / children;
}

namespace {

std::vector<std::vector<const Edge*>> ChildrenBySlot(const Document& doc,
                                                     const TemporalDependencyTree& tree) {
  std::vector<std::vector<const Edge*>> children(doc.num_nodes());
  for (const Edge& e : tree.edges) {
    auto p = doc.OrderOf(e.parent);
    if (p) children[SlotOf(*p)].push_back(&e);
  }
  for (auto& list : children) {
    std::sort(list.begin(), list.end(), [&](const Edge* a, const Edge* b) {
      return doc.OrderOf(a->child).value_or(0) < doc.OrderOf(b->child).value_or(0);
    });
  }
  return children;
}

std::string NodeLabel(const Mention& m) {
  if (m.kind == MentionKind::kRoot) return "ROOT";
  if (m.kind == MentionKind::kDct) return "DCT (" + m.text + ")";
  return m.text + " [" + m.id + "]";
}

}  // namespace

std::string FormatTreeIndented(const Document& doc, const TemporalDependencyTree& tree) {
  const auto children = ChildrenBySlot(doc, tree);
  std::ostringstream out;
  out << "# " << doc.doc_id() << '\n';
  std::vector<std::pair<int, int>> stack{{SlotOf(kRootOrder), 0}};
  std::vector<char> seen(doc.num_nodes());
  while (!stack.empty()) {
    auto [slot, depth] = stack.back();
    stack.pop_back();
    if (seen[slot]) continue;
    seen[slot] = 1;
    const Mention& m = doc.node(OrderOfSlot(slot));
    out << std::string(2 * depth, ' ');
    if (const Edge* e = tree.ParentEdge(m.id)) out << LabelName(e->label) << ": ";
    out << NodeLabel(m) << '\n';
    const auto& kids = children[slot];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      if (auto c = doc.OrderOf((*it)->child)) stack.push_back({SlotOf(*c), depth + 1});
    }
  }
  return out.str();
}

std::string FormatTreeDot(const Document& doc, const TemporalDependencyTree& tree) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  std::ostringstream out;
  out << "digraph " << quote(doc.doc_id()) << " {\n";
  for (int order = kRootOrder; order < doc.num_mentions(); ++order) {
    const Mention& m = doc.node(order);
    out << "  " << quote(m.id) << " [label=" << quote(NodeLabel(m)) << "];\n";
  }
  for (const Edge& e : tree.edges) {
    out << "  " << quote(e.parent) << " -> " << quote(e.child)
        << " [label=" << quote(std::string(LabelName(e.label))) << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace tdp
