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

// Template-generated documents whose gold trees follow from surface cues:
// tense ("signed" / "is signing" / "will sign") relates an event to DCT,
// a leading connective ("Then", "Meanwhile", "Earlier") relates it to the
// previous event, and "On <day> ," anchors it to that time expression.
// Useful for smoke tests and for checking that a model can fit its data.

#ifndef TDP_SYNTHETIC_H_
#define TDP_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "tdp/corpus_io.h"

namespace tdp {

struct SyntheticOptions {
  int documents = 20;
  int min_sentences = 4;
  int max_sentences = 8;
  double timex_probability = 0.2;
  double connective_probability = 0.35;
  std::uint64_t seed = 1;
};

std::vector<CorpusRecord> GenerateSyntheticCorpus(const SyntheticOptions& options);

}  // namespace tdp

#endif  // TDP_SYNTHETIC_H_
