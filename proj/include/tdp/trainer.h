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

// Training loop, corpus-level parsing and hyperparameter grid search.

#ifndef TDP_TRAINER_H_
#define TDP_TRAINER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "tdp/corpus_io.h"
#include "tdp/decoder.h"
#include "tdp/evaluator.h"
#include "tdp/ranker.h"

namespace tdp {

struct TrainConfig {
  double learning_rate = 0.001;
  int epochs = 50;
  int runs = 1;
  int batch_size = 32;  // child instances
  std::uint64_t seed = 1;
  // Keep the parameters of the epoch with the best dev F1 instead of the
  // last epoch.
  bool select_best_dev = false;
  int jobs = 1;  // workers for dev parsing

  void Validate() const;  // throws ConfigError
  nlohmann::json ToJson() const;
};

struct EpochMetrics {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;  // mean over instances
  std::optional<double> dev_f1;
  double seconds = 0.0;

  nlohmann::json ToJson() const;
};

struct TrainResult {
  std::vector<EpochMetrics> trace;
  int selected_epoch = 0;
  std::optional<double> selected_dev_f1;
};

// A training instance bound to its document, with the gold row index.
struct RankingInstance {
  const Document* doc = nullptr;
  TrainingInstance instance;
  int gold_row = 0;
};

// Gold-augmented instances for every mention of every document.
std::vector<RankingInstance> BuildRankingInstances(const RankerModel& model,
                                                   std::span<const CorpusRecord> corpus);

// Mean ranking loss of a batch, built in `g` (one encoder pass per
// document).
nn::Expr BatchLoss(const RankerModel& model, nn::Graph& g,
                   std::span<const RankingInstance* const> batch);

// Adam over shuffled mini-batches, dev F1 after every epoch. Throws
// DivergenceError on a non-finite loss.
TrainResult Train(RankerModel& model, std::span<const CorpusRecord> train,
                  std::span<const CorpusRecord> dev, const TrainConfig& config,
                  const std::function<void(const EpochMetrics&)>& on_epoch = {});

// Parses every document with up to `jobs` threads; results keep input order.
std::vector<DecodeResult> ParseCorpus(const RankerModel& model,
                                      std::span<const CorpusRecord> corpus, int jobs = 1);

EvalReport EvaluateModel(const RankerModel& model, std::span<const CorpusRecord> corpus,
                         int jobs = 1);

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;  // population variance
};
MeanVariance ComputeMeanVariance(std::span<const double> values);

struct GridSpec {
  std::vector<double> learning_rates = {0.001, 0.0001, 0.0005, 0.00025};
  std::vector<int> epochs = {50, 75, 100};
};

struct GridCell {
  double learning_rate = 0.0;
  int epochs = 0;
  std::vector<double> dev_f1;  // one per run
  MeanVariance stats;

  nlohmann::json ToJson() const;
};

struct GridResult {
  std::vector<GridCell> cells;
  int best = -1;
};

// Highest mean dev F1; ties go to the lower learning rate, then fewer
// epochs.
int SelectBestCell(std::span<const GridCell> cells);

using ModelFactory = std::function<std::unique_ptr<RankerModel>(std::uint64_t seed)>;
using RunCallback = std::function<void(const GridCell& cell, int run, RankerModel& model,
                                       const TrainResult& result)>;

// Trains config.runs models per cell. Run r uses seed config.seed + r for
// both initialization and shuffling.
GridResult GridSearch(const ModelFactory& factory, std::span<const CorpusRecord> train,
                      std::span<const CorpusRecord> dev, const GridSpec& grid,
                      const TrainConfig& config, const RunCallback& on_run = {});

}  // namespace tdp

#endif  // TDP_TRAINER_H_
