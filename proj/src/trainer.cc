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

#include "tdp/trainer.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>
#include <tuple>

#include "tdp/errors.h"

namespace tdp {

using nlohmann::json;

void TrainConfig::Validate() const {
  if (!(learning_rate > 0)) throw ConfigError("learning rate must be positive");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

json TrainConfig::ToJson() const {
  return json{{"learning_rate", learning_rate}, {"epochs", epochs},
              {"runs", runs},                   {"batch_size", batch_size},
              {"seed", seed},                   {"select_best_dev", select_best_dev},
              {"optimizer", "adam"}};
}

json EpochMetrics::ToJson() const {
  json j{{"epoch", epoch}, {"train_loss", train_loss}, {"seconds", seconds}};
  j["dev_f1"] = dev_f1 ? json(*dev_f1) : json(nullptr);
  return j;
}

std::vector<RankingInstance> BuildRankingInstances(const RankerModel& model,
                                                   std::span<const CorpusRecord> corpus) {
  std::vector<RankingInstance> out;
  for (const CorpusRecord& r : corpus) {
    for (TrainingInstance& inst : BuildTrainingInstances(r.doc, r.tree, model.config().window)) {
      const ScoreTable rows = EmptyScoreTable(r.doc, inst.candidates);
      const int gold = GoldRow(rows, inst.gold_parent, inst.gold_label);
      out.push_back({&r.doc, std::move(inst), gold});
    }
  }
  return out;
}

nn::Expr BatchLoss(const RankerModel& model, nn::Graph& g,
                   std::span<const RankingInstance* const> batch) {
  if (batch.empty()) throw PreconditionError("empty batch");
  std::map<const Document*, std::unique_ptr<DocumentState>> states;
  std::vector<nn::Expr> losses;
  for (const RankingInstance* inst : batch) {
    auto& state = states[inst->doc];
    if (!state) state = model.encoder().Prepare(g, *inst->doc);
    const nn::Expr scores = model.ScoreExpr(g, *state, *inst->doc, inst->instance.candidates);
    losses.push_back(nn::PickNegLogSoftmax(scores, inst->gold_row));
  }
  return nn::Scale(nn::Sum(losses), 1.0 / static_cast<double>(losses.size()));
}

std::vector<DecodeResult> ParseCorpus(const RankerModel& model,
                                      std::span<const CorpusRecord> corpus, int jobs) {
  std::vector<DecodeResult> out(corpus.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < corpus.size();) {
      try {
        out[i] = model.Parse(corpus[i].doc);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = corpus.size();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(corpus.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

EvalReport EvaluateModel(const RankerModel& model, std::span<const CorpusRecord> corpus,
                         int jobs) {
  const auto results = ParseCorpus(model, corpus, jobs);
  std::vector<TemporalDependencyTree> trees;
  for (const auto& r : results) trees.push_back(r.tree);
  return Evaluate(trees, corpus);
}

TrainResult Train(RankerModel& model, std::span<const CorpusRecord> train,
                  std::span<const CorpusRecord> dev, const TrainConfig& config,
                  const std::function<void(const EpochMetrics&)>& on_epoch) {
  config.Validate();
  const std::vector<RankingInstance> instances = BuildRankingInstances(model, train);
  std::vector<const RankingInstance*> order;
  for (const auto& inst : instances) order.push_back(&inst);

  std::mt19937_64 rng(config.seed);
  nn::Adam adam({.learning_rate = config.learning_rate});
  model.params().ZeroGrad();
  TrainResult result;
  std::vector<nn::Matrix> best;
  double best_f1 = -1.0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t end = std::min(order.size(), b + config.batch_size);
      std::span<const RankingInstance* const> batch(order.data() + b, end - b);
      nn::Graph g;
      const nn::Expr loss = BatchLoss(model, g, batch);
      const double value = loss.scalar();
      if (!std::isfinite(value)) {
        throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch) +
                              ", batch " + std::to_string(b / config.batch_size + 1) +
                              " (learning rate " + std::to_string(config.learning_rate) + ")");
      }
      loss_sum += value * static_cast<double>(batch.size());
      g.Backward(loss);
      adam.Step(model.params());
    }
    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = order.empty() ? 0.0 : loss_sum / static_cast<double>(order.size());
    if (!dev.empty()) m.dev_f1 = EvaluateModel(model, dev, config.jobs).f1();
    m.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.trace.push_back(m);
    if (on_epoch) on_epoch(m);
    if (config.select_best_dev && m.dev_f1 && *m.dev_f1 > best_f1) {
      best_f1 = *m.dev_f1;
      best = model.params().Snapshot();
      result.selected_epoch = epoch;
      result.selected_dev_f1 = m.dev_f1;
    }
  }
  if (config.select_best_dev && !best.empty()) {
    model.params().Restore(best);
  } else {
    result.selected_epoch = config.epochs;
    result.selected_dev_f1 = result.trace.back().dev_f1;
  }
  return result;
}

MeanVariance ComputeMeanVariance(std::span<const double> values) {
  if (values.empty()) throw PreconditionError("mean of no values");
  MeanVariance mv;
  mv.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  for (double v : values) mv.variance += (v - mv.mean) * (v - mv.mean);
  mv.variance /= values.size();
  return mv;
}

json GridCell::ToJson() const {
  return json{{"learning_rate", learning_rate}, {"epochs", epochs},
              {"dev_f1", dev_f1},               {"mean_dev_f1", stats.mean},
              {"variance", stats.variance}};
}

int SelectBestCell(std::span<const GridCell> cells) {
  if (cells.empty()) throw PreconditionError("no grid cells");
  int best = 0;
  for (int i = 1; i < static_cast<int>(cells.size()); ++i) {
    const GridCell& a = cells[i];
    const GridCell& b = cells[best];
    if (std::tuple(-a.stats.mean, a.learning_rate, a.epochs) <
        std::tuple(-b.stats.mean, b.learning_rate, b.epochs)) {
      best = i;
    }
  }
  return best;
}

GridResult GridSearch(const ModelFactory& factory, std::span<const CorpusRecord> train,
                      std::span<const CorpusRecord> dev, const GridSpec& grid,
                      const TrainConfig& config, const RunCallback& on_run) {
  if (grid.learning_rates.empty() || grid.epochs.empty()) {
    throw ConfigError("grid search needs at least one learning rate and one epoch count");
  }
  if (dev.empty()) throw ConfigError("grid search needs a dev corpus");
  GridResult result;
  for (double lr : grid.learning_rates) {
    for (int epochs : grid.epochs) {
      GridCell cell;
      cell.learning_rate = lr;
      cell.epochs = epochs;
      for (int run = 0; run < config.runs; ++run) {
        TrainConfig c = config;
        c.learning_rate = lr;
        c.epochs = epochs;
        c.seed = config.seed + static_cast<std::uint64_t>(run);
        std::unique_ptr<RankerModel> model = factory(c.seed);
        const TrainResult r = Train(*model, train, dev, c);
        cell.dev_f1.push_back(r.selected_dev_f1.value_or(0.0));
        if (on_run) on_run(cell, run, *model, r);
      }
      cell.stats = ComputeMeanVariance(cell.dev_f1);
      result.cells.push_back(std::move(cell));
    }
  }
  result.best = SelectBestCell(result.cells);
  return result;
}

}  // namespace tdp
