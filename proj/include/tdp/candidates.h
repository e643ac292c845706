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

#ifndef TDP_CANDIDATES_H_
#define TDP_CANDIDATES_H_

#include <string>
#include <vector>

#include "tdp/tdt.h"

namespace tdp {

// Parent window measured in mentions: a child at order i sees mentions
// i - back .. i + forward.
struct WindowConfig {
  int back = 10;
  int forward = 3;

  void Validate() const;  // throws ConfigError on negative sizes
  bool operator==(const WindowConfig&) const = default;
};

// Candidate parents of one child, as document_order values (ROOT = -2,
// DCT = -1). Order is ROOT, DCT, then window mentions ascending; parents
// whose kind cannot legally attach the child are filtered out.
struct CandidateSet {
  int child = 0;
  std::vector<int> candidates;

  bool Contains(int order) const;
  std::vector<std::string> Ids(const Document& doc) const;
};

// Throws PreconditionError unless `child_order` names an EVENT/TIMEX mention.
CandidateSet GenerateCandidates(const Document& doc, int child_order,
                                const WindowConfig& window);

struct TrainingInstance {
  CandidateSet candidates;
  int gold_parent = kDctOrder;
  RelationLabel gold_label = RelationLabel::kOverlap;
  // The gold parent lies outside the window and was appended to
  // `candidates` so training still sees it.
  bool gold_out_of_window = false;
};

// One instance per EVENT/TIMEX mention, in document order. `gold` must be
// valid for `doc`.
std::vector<TrainingInstance> BuildTrainingInstances(
    const Document& doc, const TemporalDependencyTree& gold,
    const WindowConfig& window);

}  // namespace tdp

#endif  // TDP_CANDIDATES_H_
