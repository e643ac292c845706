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

#include "tdp/evaluator.h"

#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"
#include "tdp/errors.h"

namespace tdp {

namespace {

ParentCategory CategoryOf(MentionKind parent) {
  switch (parent) {
    case MentionKind::kRoot:
      return ParentCategory::kRoot;
    case MentionKind::kDct:
      return ParentCategory::kDct;
    case MentionKind::kTimex:
      return ParentCategory::kTimex;
    case MentionKind::kEvent:
      return ParentCategory::kEvent;
  }
  return ParentCategory::kRoot;
}

// 2c / (p + g): the harmonic mean of c/p and c/g, exact when p == g.
double F1(long correct, long predicted, long gold) {
  if (predicted + gold == 0) return 1.0;
  return 2.0 * static_cast<double>(correct) / static_cast<double>(predicted + gold);
}

}  // namespace

std::string_view CategoryName(ParentCategory c) {
  switch (c) {
    case ParentCategory::kRoot:
      return "root";
    case ParentCategory::kDct:
      return "dct";
    case ParentCategory::kTimex:
      return "timex";
    case ParentCategory::kEvent:
      return "event";
  }
  return "?";
}

EdgeCounts& EdgeCounts::operator+=(const EdgeCounts& o) {
  gold += o.gold;
  predicted += o.predicted;
  correct += o.correct;
  parent_correct += o.parent_correct;
  return *this;
}

double EvalReport::precision() const {
  if (edges.predicted == 0) return edges.gold == 0 ? 1.0 : 0.0;
  return static_cast<double>(edges.correct) / edges.predicted;
}

double EvalReport::recall() const {
  if (edges.gold == 0) return edges.predicted == 0 ? 1.0 : 0.0;
  return static_cast<double>(edges.correct) / edges.gold;
}

double EvalReport::f1() const { return F1(edges.correct, edges.predicted, edges.gold); }

double EvalReport::unlabeled_f1() const {
  return F1(edges.parent_correct, edges.predicted, edges.gold);
}

double EvalReport::accuracy() const { return recall(); }

double EvalReport::f1_with_root_edge() const {
  return F1(edges_with_root.correct, edges_with_root.predicted, edges_with_root.gold);
}

EvalReport EvaluateDocument(const Document& doc,
                            const TemporalDependencyTree& predicted,
                            const TemporalDependencyTree& gold) {
  if (predicted.doc_id != doc.doc_id() || gold.doc_id != doc.doc_id()) {
    throw IdentityError("evaluating '" + predicted.doc_id + "' against gold '" +
                        gold.doc_id + "' for document '" + doc.doc_id() + "'");
  }
  EvalReport report;
  report.documents = 1;
  std::map<std::string, const Edge*> predicted_by_child;
  for (const Edge& e : predicted.edges) {
    predicted_by_child.emplace(e.child, &e);
    const bool root_edge = e.child == kDctId;
    ++report.edges_with_root.predicted;
    if (!root_edge) ++report.edges.predicted;
  }
  for (const Edge& g : gold.edges) {
    const bool root_edge = g.child == kDctId;
    auto it = predicted_by_child.find(g.child);
    const bool parent_ok = it != predicted_by_child.end() && it->second->parent == g.parent;
    const bool correct = parent_ok && it->second->label == g.label;
    EdgeCounts counts{1, 0, correct ? 1 : 0, parent_ok ? 1 : 0};
    report.edges_with_root += counts;
    if (root_edge) continue;
    report.edges += counts;
    const Mention* parent = doc.Find(g.parent);
    if (parent == nullptr) continue;
    CategoryScore& cat = report.categories[static_cast<int>(CategoryOf(parent->kind))];
    ++cat.total;
    if (correct) ++cat.correct;
  }
  return report;
}

EvalReport& operator+=(EvalReport& a, const EvalReport& b) {
  a.documents += b.documents;
  a.edges += b.edges;
  a.edges_with_root += b.edges_with_root;
  for (int i = 0; i < kNumCategories; ++i) {
    a.categories[i].total += b.categories[i].total;
    a.categories[i].correct += b.categories[i].correct;
  }
  return a;
}

EvalReport Evaluate(std::span<const TemporalDependencyTree> predicted,
                    std::span<const CorpusRecord> gold) {
  std::map<std::string, const TemporalDependencyTree*> predicted_by_id;
  for (const auto& t : predicted) {
    if (!predicted_by_id.emplace(t.doc_id, &t).second) {
      throw IdentityError("duplicate predicted document '" + t.doc_id + "'");
    }
  }
  if (predicted_by_id.size() != gold.size()) {
    throw IdentityError("predicted has " + std::to_string(predicted_by_id.size()) +
                        " documents, gold has " + std::to_string(gold.size()));
  }
  EvalReport total;
  for (const CorpusRecord& g : gold) {
    auto it = predicted_by_id.find(g.doc.doc_id());
    if (it == predicted_by_id.end()) {
      throw IdentityError("gold document '" + g.doc.doc_id() + "' has no prediction");
    }
    total += EvaluateDocument(g.doc, *it->second, g.tree);
  }
  return total;
}

CategoryDelta CategoryBreakdownDelta(const EvalReport& a, const EvalReport& b) {
  CategoryDelta d;
  for (int i = 0; i < kNumCategories; ++i) {
    d.delta[i] = b.categories[i].accuracy() - a.categories[i].accuracy();
  }
  return d;
}

std::string FormatReportJson(const EvalReport& r) {
  nlohmann::json cats;
  for (int i = 0; i < kNumCategories; ++i) {
    const CategoryScore& c = r.categories[i];
    cats[std::string(CategoryName(static_cast<ParentCategory>(i)))] = {
        {"total", c.total}, {"correct", c.correct}, {"accuracy", c.accuracy()}};
  }
  return nlohmann::json{{"documents", r.documents},
                        {"f1", r.f1()},
                        {"unlabeled_f1", r.unlabeled_f1()},
                        {"precision", r.precision()},
                        {"recall", r.recall()},
                        {"accuracy", r.accuracy()},
                        {"f1_with_root_edge", r.f1_with_root_edge()},
                        {"gold_edges", r.edges.gold},
                        {"predicted_edges", r.edges.predicted},
                        {"correct_edges", r.edges.correct},
                        {"categories", cats}}
      .dump();
}

std::string FormatReportTable(const EvalReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "documents           " << r.documents << '\n'
      << "labeled F1          " << r.f1() << "  (" << r.edges.correct << '/'
      << r.edges.gold << ")\n"
      << "unlabeled F1        " << r.unlabeled_f1() << '\n'
      << "accuracy            " << r.accuracy() << '\n'
      << "F1 with root edge   " << r.f1_with_root_edge() << '\n'
      << "children of:\n";
  for (int i = 0; i < kNumCategories; ++i) {
    const CategoryScore& c = r.categories[i];
    out << "  " << std::left << std::setw(8) << CategoryName(static_cast<ParentCategory>(i))
        << std::right << c.accuracy() << "  (" << c.correct << '/' << c.total << ")\n";
  }
  return out.str();
}

}  // namespace tdp
