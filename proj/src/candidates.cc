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

#include "tdp/candidates.h"

#include <algorithm>

#include "tdp/errors.h"

namespace tdp {

void WindowConfig::Validate() const {
  if (back < 0 || forward < 0) {
    throw ConfigError("window sizes must be non-negative (back=" +
                      std::to_string(back) +
                      ", forward=" + std::to_string(forward) + ")");
  }
}

bool CandidateSet::Contains(int order) const {
  return std::find(candidates.begin(), candidates.end(), order) !=
         candidates.end();
}

std::vector<std::string> CandidateSet::Ids(const Document& doc) const {
  std::vector<std::string> ids;
  ids.reserve(candidates.size());
  for (int order : candidates) ids.push_back(doc.node(order).id);
  return ids;
}

CandidateSet GenerateCandidates(const Document& doc, int child_order,
                                const WindowConfig& window) {
  window.Validate();
  if (child_order < 0 || child_order >= doc.num_mentions()) {
    throw PreconditionError("candidate generation needs an event/timex child, got order " +
                            std::to_string(child_order) + " in document " +
                            doc.doc_id());
  }
  const MentionKind child_kind = doc.node(child_order).kind;
  CandidateSet set;
  set.child = child_order;
  auto consider = [&](int order) {
    if (order != child_order &&
        IsLegalParentKind(child_kind, doc.node(order).kind)) {
      set.candidates.push_back(order);
    }
  };
  consider(kRootOrder);
  consider(kDctOrder);
  const int first = std::max(0, child_order - window.back);
  const int last = std::min(doc.num_mentions() - 1, child_order + window.forward);
  for (int order = first; order <= last; ++order) consider(order);
  return set;
}

std::vector<TrainingInstance> BuildTrainingInstances(
    const Document& doc, const TemporalDependencyTree& gold,
    const WindowConfig& window) {
  std::vector<TrainingInstance> instances;
  instances.reserve(doc.mentions().size());
  for (const Mention& child : doc.mentions()) {
    const Edge* edge = gold.ParentEdge(child.id);
    if (edge == nullptr) {
      throw PreconditionError("gold tree for " + doc.doc_id() +
                              " has no parent for " + child.id);
    }
    auto parent = doc.OrderOf(edge->parent);
    if (!parent) {
      throw PreconditionError("gold tree for " + doc.doc_id() +
                              " names unknown parent " + edge->parent);
    }
    TrainingInstance instance;
    instance.candidates = GenerateCandidates(doc, child.document_order, window);
    instance.gold_parent = *parent;
    instance.gold_label = edge->label;
    if (!instance.candidates.Contains(*parent)) {
      instance.candidates.candidates.push_back(*parent);
      instance.gold_out_of_window = true;
    }
    instances.push_back(std::move(instance));
  }
  return instances;
}

}  // namespace tdp
