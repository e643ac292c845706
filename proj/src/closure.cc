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

#include "tdp/closure.h"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "json.hpp"
#include "tdp/errors.h"

namespace tdp {

std::string_view RelationName(TemporalRelation r) {
  switch (r) {
    case TemporalRelation::kBefore:
      return "before";
    case TemporalRelation::kAfter:
      return "after";
    case TemporalRelation::kOverlap:
      return "overlap";
    case TemporalRelation::kUnknown:
      return "unknown";
  }
  return "?";
}

TemporalRelation Inverse(TemporalRelation r) {
  switch (r) {
    case TemporalRelation::kBefore:
      return TemporalRelation::kAfter;
    case TemporalRelation::kAfter:
      return TemporalRelation::kBefore;
    default:
      return r;
  }
}

TemporalRelation Compose(TemporalRelation ab, TemporalRelation bc) {
  using R = TemporalRelation;
  if (ab == R::kUnknown || bc == R::kUnknown) return R::kUnknown;
  if (ab == R::kOverlap) return bc;
  if (bc == R::kOverlap) return ab;
  return ab == bc ? ab : R::kUnknown;
}

std::optional<TemporalRelation> TemporalReading(RelationLabel label) {
  switch (label) {
    case RelationLabel::kBefore:
      return TemporalRelation::kBefore;
    case RelationLabel::kAfter:
      return TemporalRelation::kAfter;
    case RelationLabel::kOverlap:
      return TemporalRelation::kOverlap;
    case RelationLabel::kDependsOn:
      return std::nullopt;
  }
  return std::nullopt;
}

RelationMatrix::RelationMatrix(std::vector<std::string> nodes)
    : nodes_(std::move(nodes)) {
  const int n = size();
  rel_.assign(static_cast<std::size_t>(n) * n, TemporalRelation::kUnknown);
  for (int i = 0; i < n; ++i) {
    if (!index_.emplace(nodes_[i], i).second) {
      throw PreconditionError("duplicate node " + nodes_[i] + " in relation matrix");
    }
    rel_[i * n + i] = TemporalRelation::kOverlap;
  }
}

std::optional<int> RelationMatrix::IndexOf(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TemporalRelation RelationMatrix::at(std::string_view a, std::string_view b) const {
  auto i = IndexOf(a);
  auto j = IndexOf(b);
  if (!i || !j) {
    throw PreconditionError("relation matrix has no pair (" + std::string(a) + ", " +
                            std::string(b) + ")");
  }
  return at(*i, *j);
}

void RelationMatrix::Set(int a, int b, TemporalRelation r) {
  rel_[a * size() + b] = r;
  rel_[b * size() + a] = Inverse(r);
}

bool RelationMatrix::operator==(const RelationMatrix& other) const {
  if (size() != other.size()) return false;
  std::vector<int> map(size());
  for (int i = 0; i < size(); ++i) {
    auto j = other.IndexOf(nodes_[i]);
    if (!j) return false;
    map[i] = *j;
  }
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < size(); ++j) {
      if (at(i, j) != other.at(map[i], map[j])) return false;
    }
  }
  return true;
}

std::vector<std::string> TreeNodes(const TemporalDependencyTree& tree) {
  std::vector<std::string> nodes{std::string(kDctId)};
  std::set<std::string> seen{std::string(kDctId), std::string(kRootId)};
  for (const Edge& e : tree.edges) {
    for (const std::string* id : {&e.child, &e.parent}) {
      if (seen.insert(*id).second) nodes.push_back(*id);
    }
  }
  return nodes;
}

RelationMatrix SeedMatrix(const TemporalDependencyTree& tree) {
  RelationMatrix m(TreeNodes(tree));
  for (const Edge& e : tree.edges) {
    auto rel = TemporalReading(e.label);
    auto c = m.IndexOf(e.child);
    auto p = m.IndexOf(e.parent);
    if (rel && c && p) m.Set(*c, *p, *rel);
  }
  return m;
}

RelationMatrix Close(const TemporalDependencyTree& tree) {
  RelationMatrix m(TreeNodes(tree));
  const int n = m.size();
  // Temporal edges form a forest, so every pair is joined by at most one
  // simple path; walking it from each source yields the closure. Detours
  // never add information: backtracking over a BEFORE/AFTER edge composes
  // to UNKNOWN and over an OVERLAP edge is the identity.
  std::vector<std::vector<std::pair<int, TemporalRelation>>> adj(n);
  for (const Edge& e : tree.edges) {
    auto rel = TemporalReading(e.label);
    auto c = m.IndexOf(e.child);
    auto p = m.IndexOf(e.parent);
    if (!rel || !c || !p) continue;
    adj[*c].push_back({*p, *rel});
    adj[*p].push_back({*c, Inverse(*rel)});
  }
  std::vector<char> visited(n);
  std::vector<std::pair<int, TemporalRelation>> stack;
  for (int source = 0; source < n; ++source) {
    std::fill(visited.begin(), visited.end(), 0);
    visited[source] = 1;
    stack.assign(1, {source, TemporalRelation::kOverlap});
    while (!stack.empty()) {
      auto [node, rel] = stack.back();
      stack.pop_back();
      for (auto [next, step] : adj[node]) {
        if (visited[next]) continue;
        visited[next] = 1;
        const TemporalRelation composed = Compose(rel, step);
        if (composed == TemporalRelation::kUnknown) continue;
        m.Set(source, next, composed);
        stack.push_back({next, composed});
      }
    }
  }
  return m;
}

ConstraintClosure CloseConstraints(const RelationMatrix& seeds) {
  ConstraintClosure out{seeds, {}};
  RelationMatrix& m = out.matrix;
  const int n = m.size();
  // Semi-naive propagation: each newly known pair (a, b) is composed with
  // every known (b, c) and (c, a).
  std::deque<std::pair<int, int>> queue;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a != b && m.at(a, b) != TemporalRelation::kUnknown) queue.push_back({a, b});
    }
  }
  std::set<std::pair<int, int>> reported;
  auto derive = [&](int a, int c, TemporalRelation r) {
    if (r == TemporalRelation::kUnknown || a == c) return;
    const TemporalRelation existing = m.at(a, c);
    if (existing == TemporalRelation::kUnknown) {
      m.Set(a, c, r);
      queue.push_back({a, c});
      queue.push_back({c, a});
    } else if (existing != r && reported.insert({std::min(a, c), std::max(a, c)}).second) {
      out.inconsistencies.push_back({m.nodes()[a], m.nodes()[c], existing, r});
    }
  };
  while (!queue.empty()) {
    auto [a, b] = queue.front();
    queue.pop_front();
    for (int c = 0; c < n; ++c) {
      derive(a, c, Compose(m.at(a, b), m.at(b, c)));
      derive(c, b, Compose(m.at(c, a), m.at(a, b)));
    }
  }
  return out;
}

EquivalenceResult TreesEquivalent(const TemporalDependencyTree& a,
                                  const TemporalDependencyTree& b) {
  const RelationMatrix ma = Close(a);
  const RelationMatrix mb = Close(b);
  {
    auto na = ma.nodes();
    auto nb = mb.nodes();
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
    if (na != nb) {
      throw IdentityError("trees for '" + a.doc_id + "' and '" + b.doc_id +
                          "' cover different node sets");
    }
  }
  auto differ = [&](const std::string& x,
                    const std::string& y) -> std::optional<RelationDifference> {
    const TemporalRelation rx = ma.at(x, y);
    const TemporalRelation ry = mb.at(x, y);
    if (rx == ry) return std::nullopt;
    return RelationDifference{x, y, rx, ry};
  };
  for (const Edge& e : a.edges) {
    if (e.parent == kRootId || e.child == kRootId) continue;
    if (auto d = differ(e.child, e.parent)) return {false, d};
  }
  for (const std::string& x : ma.nodes()) {
    for (const std::string& y : ma.nodes()) {
      if (auto d = differ(x, y)) return {false, d};
    }
  }
  return {true, std::nullopt};
}

std::string_view TreeMatchName(TreeMatch m) {
  switch (m) {
    case TreeMatch::kExact:
      return "exact";
    case TreeMatch::kClosureEquivalent:
      return "closure_equivalent";
    case TreeMatch::kDifferent:
      return "different";
  }
  return "?";
}

EquivalenceReport EquivalenceAwareReport(
    std::span<const TemporalDependencyTree> predicted,
    std::span<const TemporalDependencyTree> gold) {
  std::map<std::string, const TemporalDependencyTree*> gold_by_id;
  for (const auto& t : gold) gold_by_id[t.doc_id] = &t;
  if (gold_by_id.size() != predicted.size()) {
    throw IdentityError("predicted and gold document sets differ in size");
  }
  EquivalenceReport report;
  for (const auto& p : predicted) {
    auto it = gold_by_id.find(p.doc_id);
    if (it == gold_by_id.end()) {
      throw IdentityError("predicted document '" + p.doc_id + "' has no gold tree");
    }
    DocumentMatch match{p.doc_id, TreeMatch::kExact, std::nullopt};
    if (!(p == *it->second)) {
      EquivalenceResult eq = TreesEquivalent(p, *it->second);
      match.match = eq.equivalent ? TreeMatch::kClosureEquivalent : TreeMatch::kDifferent;
      match.witness = eq.witness;
    }
    switch (match.match) {
      case TreeMatch::kExact:
        ++report.exact;
        break;
      case TreeMatch::kClosureEquivalent:
        ++report.closure_equivalent;
        break;
      case TreeMatch::kDifferent:
        ++report.different;
        break;
    }
    report.documents.push_back(std::move(match));
  }
  return report;
}

std::string FormatMatrixJson(const std::string& doc_id, const RelationMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.size(); ++j) row.push_back(RelationName(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"doc_id", doc_id}, {"nodes", m.nodes()}, {"relations", rows}}
      .dump();
}

std::string FormatEquivalenceJson(const EquivalenceReport& report) {
  nlohmann::json docs = nlohmann::json::array();
  for (const DocumentMatch& d : report.documents) {
    nlohmann::json j{{"doc_id", d.doc_id}, {"match", TreeMatchName(d.match)}};
    if (d.witness) {
      j["witness"] = {{"a", d.witness->a},
                      {"b", d.witness->b},
                      {"predicted", RelationName(d.witness->in_first)},
                      {"gold", RelationName(d.witness->in_second)}};
    }
    docs.push_back(std::move(j));
  }
  return nlohmann::json{{"exact", report.exact},
                        {"closure_equivalent", report.closure_equivalent},
                        {"different", report.different},
                        {"documents", docs}}
      .dump();
}

}  // namespace tdp
