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

// Shared fixtures and random generators for tests.

#ifndef TDP_TESTS_TESTING_H_
#define TDP_TESTS_TESTING_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tdp/candidates.h"
#include "tdp/closure.h"
#include "tdp/contextual.h"
#include "tdp/corpus_io.h"
#include "tdp/ranker.h"
#include "tdp/score_table.h"
#include "tdp/tdt.h"
#include "tdp/trainer.h"

namespace tdp::testing {

// The three-sentence news example and its gold tree:
//
//   ROOT
//     DCT (depends_on)
//       share (overlap)  ruled (before)  called (before)
//                                          saying (overlap)
//                                            create (after)
//     feb_27_1998 (depends_on)
//       signed (overlap)
//
// Mention ids are the words themselves; the time expression is
// "feb_27_1998" with text "February 27, 1998".
CorpusRecord Example1();

// Document with `n` mentions of the given kind, one per sentence.
Document UniformDocument(int n, MentionKind kind, const std::string& doc_id = "uniform");

struct RandomDocOptions {
  int max_mentions = 20;
  int min_mentions = 0;
  double event_probability = 0.7;
};

Document RandomDocument(std::mt19937_64& rng, const RandomDocOptions& options = {},
                        const std::string& doc_id = "rand");

// A uniformly-shaped random valid tree: mentions are attached in random
// order, each to a random already-attached legal parent.
TemporalDependencyTree RandomTree(const Document& doc, std::mt19937_64& rng);

CorpusRecord RandomRecord(std::mt19937_64& rng, const RandomDocOptions& options = {},
                          const std::string& doc_id = "rand");

// One table per mention over the window candidates, with random raw scores
// (a mix of continuous and heavily tied values) and normalized probabilities.
std::vector<ScoreTable> RandomScoreTables(const Document& doc, const WindowConfig& window,
                                          std::mt19937_64& rng);

// Tables that put all mass (score 50 vs 0) on the gold rows of `tree`.
std::vector<ScoreTable> OracleScoreTables(const Document& doc,
                                          const TemporalDependencyTree& tree,
                                          const WindowConfig& window);

// Straightforward decoder for cross-checking: sorts a copy of each table's
// rows and tests every candidate by walking parent links from scratch.
TemporalDependencyTree ReferenceDecode(const Document& doc, std::span<const ScoreTable> tables);

// Three events whose top-ranked rows are m0 -> m1 (0.9), m1 -> m0 (0.8,
// closes a cycle; DCT 0.2 is next) and m2 -> m1 (1.0). Decoding skips
// exactly one row.
struct DecodeFixture {
  Document doc;
  std::vector<ScoreTable> tables;
};
DecodeFixture AdversarialCycleFixture();

// Reference closure: seeds the temporal edges, then sweeps every ordered
// triple (a, b, c) until no UNKNOWN pair can be filled by composition.
RelationMatrix BruteForceClosure(const TemporalDependencyTree& tree);

// A small randomly initialized contextual checkpoint whose vocabulary
// covers the words of `corpus` and of pseudo-sentences.
ContextualCheckpoint TinyContextualCheckpoint(std::span<const CorpusRecord> corpus,
                                              std::uint64_t seed = 5);

// Small dimensions for fast tests.
RankerConfig TinyRankerConfig(EncoderVariant variant = EncoderVariant::kRandomInitRecurrent);

// Resources for `config` over `corpus`; contextual variants get a tiny
// checkpoint.
EncoderResources TinyResources(const RankerConfig& config,
                               std::span<const CorpusRecord> corpus);

// Largest relative difference between the analytic gradient of the mean
// ranking loss over `batch` and central finite differences, over the
// parameters whose names start with `prefix`. Relative error is
// |a - n| / max(|a|, |n|, floor).
struct GradientCheck {
  double max_relative_error = 0.0;
  int entries = 0;
};
GradientCheck CheckRankingGradients(RankerModel& model,
                                    std::span<const RankingInstance* const> batch,
                                    const std::string& prefix, double step = 1e-5,
                                    double floor = 1e-7);

}  // namespace tdp::testing

#endif  // TDP_TESTS_TESTING_H_
