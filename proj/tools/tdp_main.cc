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

// The `tdp` command-line tool.

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "CLI11.hpp"
#include "json.hpp"
#include "tdp/closure.h"
#include "tdp/contextual.h"
#include "tdp/corpus_io.h"
#include "tdp/decoder.h"
#include "tdp/encoder.h"
#include "tdp/errors.h"
#include "tdp/evaluator.h"
#include "tdp/manifest.h"
#include "tdp/ranker.h"
#include "tdp/synthetic.h"
#include "tdp/trainer.h"

namespace tdp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void Warn(const std::string& message) { std::cerr << "tdp: warning: " << message << '\n'; }

struct Loaded {
  std::vector<CorpusRecord> records;
  int skipped = 0;
};

Loaded Load(const std::string& path, bool lenient, bool documents_only = false) {
  Loaded out;
  LoadOptions options;
  options.lenient = lenient;
  options.documents_only = documents_only;
  options.on_warning = [&](const std::string& m) {
    ++out.skipped;
    Warn(path + ": " + m);
  };
  out.records = LoadCorpus(path, options);
  return out;
}

std::vector<TemporalDependencyTree> Trees(std::span<const CorpusRecord> records) {
  std::vector<TemporalDependencyTree> trees;
  for (const CorpusRecord& r : records) trees.push_back(r.tree);
  return trees;
}

std::ofstream OpenOutput(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out = OpenOutput(path);
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

fs::path ManifestPath(const std::string& flag, const fs::path& output) {
  return flag.empty() ? fs::path(output.string() + ".manifest.json") : fs::path(flag);
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first
// error.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

void AddWindowFlags(CLI::App* cmd, WindowConfig& window) {
  cmd->add_option("--window-back", window.back, "Candidate mentions before the child")
      ->capture_default_str();
  cmd->add_option("--window-forward", window.forward, "Candidate mentions after the child")
      ->capture_default_str();
}

// --- train ---

struct TrainFlags {
  std::string train;
  std::string dev;
  std::string out;
  std::string encoder = "recurrent";
  std::string checkpoint;
  std::string embeddings;
  std::string pooling = "first";
  std::string manifest;
  WindowConfig window;
  int embedding_dim = 100;
  int hidden_dim = 100;
  int ff_dim = 100;
  int max_sequence_length = 128;
  TrainConfig train_config;
  bool grid = false;
  std::vector<double> grid_lrs = GridSpec{}.learning_rates;
  std::vector<int> grid_epochs = GridSpec{}.epochs;
  bool lenient = false;
};

std::string FormatGridTable(const GridResult& grid) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "lr" << std::setw(8) << "epochs" << std::setw(6)
      << "runs" << std::setw(10) << "mean_f1" << std::setw(11) << "variance" << "dev_f1\n";
  for (int i = 0; i < static_cast<int>(grid.cells.size()); ++i) {
    const GridCell& c = grid.cells[i];
    std::ostringstream lr;
    lr << c.learning_rate;
    out << std::left << std::setw(10) << lr.str() << std::setw(8) << c.epochs << std::setw(6)
        << c.dev_f1.size() << std::fixed << std::setprecision(4) << std::setw(10)
        << c.stats.mean << std::setprecision(6) << std::setw(11) << c.stats.variance
        << std::setprecision(4);
    for (double f : c.dev_f1) out << f << ' ';
    out << (i == grid.best ? "*" : "") << '\n';
    out.unsetf(std::ios::fixed);
  }
  return out.str();
}

int RunTrain(const TrainFlags& f) {
  const Stopwatch clock;
  const auto variant = ParseVariant(f.encoder);
  if (!variant) throw ConfigError("unknown encoder " + f.encoder);
  TrainConfig tc = f.train_config;
  tc.Validate();
  if (f.dev.empty() && (tc.select_best_dev || tc.runs > 1 || f.grid)) {
    throw ConfigError("--select-best-dev, --runs > 1 and --grid need --dev");
  }

  const Loaded train = Load(f.train, f.lenient);
  Loaded dev;
  if (!f.dev.empty()) dev = Load(f.dev, f.lenient);
  if (train.records.empty()) throw ConfigError("training corpus " + f.train + " is empty");

  RankerConfig config;
  config.window = f.window;
  config.window.Validate();
  config.encoder = EncoderConfig::ForVariant(*variant);
  config.encoder.embedding_dim = f.embedding_dim;
  config.encoder.recurrent_hidden_dim = f.hidden_dim;
  config.encoder.max_sequence_length = f.max_sequence_length;
  config.encoder.pooling = f.pooling == "mean" ? HeadPooling::kMeanTokens : HeadPooling::kFirstToken;
  config.ff_hidden_dim = f.ff_dim;

  EncoderResources resources;
  resources.vocab = WordVocab::Build(train.records);
  WordVectors vectors;
  if (*variant == EncoderVariant::kStaticPretrainedRecurrent) {
    if (f.embeddings.empty()) throw ConfigError("--encoder recurrent-static needs --embeddings");
    vectors = LoadWordVectors(f.embeddings);
    config.encoder.embedding_dim = vectors.dim;
    resources.static_vectors = &vectors;
  }
  if (UsesContextualModel(*variant)) {
    if (f.checkpoint.empty()) {
      throw ConfigError("--encoder " + f.encoder + " needs --checkpoint (see init-contextual)");
    }
    config.encoder.contextual_model_name = f.checkpoint;
    resources.contextual = LoadContextualCheckpoint(f.checkpoint);
  }
  config.Validate();

  const CorpusStats stats = ComputeCorpusStats(train.records, config.window);
  std::cerr << "tdp: " << train.records.size() << " training documents, " << stats.children
            << " children, " << stats.gold_out_of_window
            << " gold parents outside the window\n";

  const fs::path out_dir = f.out;
  fs::create_directories(out_dir);
  const fs::path model_path = out_dir / "model.json";
  const fs::path metrics_path = out_dir / "metrics.jsonl";
  std::ofstream metrics = OpenOutput(metrics_path);
  EncoderStats encoder_stats;
  const ModelFactory factory = [&](std::uint64_t seed) {
    return std::make_unique<RankerModel>(config, resources, seed, &encoder_stats);
  };

  RunManifest manifest;
  manifest.command = "train";
  manifest.config = {{"ranker", config.ToJson()}, {"train", tc.ToJson()}};
  manifest.inputs = {{"train", f.train}};
  if (!f.dev.empty()) manifest.inputs["dev"] = f.dev;
  if (!f.checkpoint.empty()) manifest.inputs["checkpoint"] = f.checkpoint;
  if (!f.embeddings.empty()) manifest.inputs["embeddings"] = f.embeddings;
  manifest.outputs = {{"model", model_path.string()}, {"metrics", metrics_path.string()}};
  manifest.seed = tc.seed;
  manifest.results["skipped_records"] = train.skipped + dev.skipped;
  manifest.results["gold_out_of_window"] = stats.gold_out_of_window;

  if (f.grid) {
    const GridSpec spec{f.grid_lrs, f.grid_epochs};
    manifest.config["grid"] = {{"learning_rates", spec.learning_rates}, {"epochs", spec.epochs}};
    const fs::path runs_dir = out_dir / "runs";
    fs::create_directories(runs_dir);
    std::map<std::tuple<double, int, int>, fs::path> checkpoints;
    const GridResult grid = GridSearch(
        factory, train.records, dev.records, spec, tc,
        [&](const GridCell& cell, int run, RankerModel& model, const TrainResult& result) {
          std::ostringstream name;
          name << "lr" << cell.learning_rate << "_ep" << cell.epochs << "_run" << run << ".json";
          const fs::path path = runs_dir / name.str();
          model.Save(path);
          checkpoints[{cell.learning_rate, cell.epochs, run}] = path;
          for (const EpochMetrics& m : result.trace) {
            json line = m.ToJson();
            line["learning_rate"] = cell.learning_rate;
            line["epochs"] = cell.epochs;
            line["run"] = run;
            metrics << line.dump() << '\n';
          }
          std::cerr << "tdp: lr " << cell.learning_rate << " epochs " << cell.epochs << " run "
                    << run << " dev F1 " << result.selected_dev_f1.value_or(0.0) << '\n';
        });
    const GridCell& best = grid.cells[grid.best];
    int best_run = 0;
    for (int r = 1; r < static_cast<int>(best.dev_f1.size()); ++r) {
      if (best.dev_f1[r] > best.dev_f1[best_run]) best_run = r;
    }
    fs::copy_file(checkpoints.at({best.learning_rate, best.epochs, best_run}), model_path,
                  fs::copy_options::overwrite_existing);
    const fs::path grid_path = out_dir / "grid.json";
    json cells = json::array();
    for (const GridCell& c : grid.cells) cells.push_back(c.ToJson());
    WriteText(grid_path, json{{"cells", cells}, {"best", grid.best}}.dump(2) + "\n");
    const std::string table = FormatGridTable(grid);
    WriteText(out_dir / "grid.txt", table);
    std::cout << table;
    manifest.outputs["grid"] = grid_path.string();
    manifest.outputs["runs"] = runs_dir.string();
    manifest.results["best_cell"] = best.ToJson();
    manifest.results["best_run"] = best_run;
  } else {
    std::unique_ptr<RankerModel> best_model;
    std::optional<double> best_f1;
    std::vector<double> dev_f1;
    int best_run = 0;
    for (int run = 0; run < tc.runs; ++run) {
      TrainConfig c = tc;
      c.seed = tc.seed + static_cast<std::uint64_t>(run);
      auto model = factory(c.seed);
      const TrainResult result =
          Train(*model, train.records, dev.records, c, [&](const EpochMetrics& m) {
            json line = m.ToJson();
            line["run"] = run;
            metrics << line.dump() << '\n' << std::flush;
            std::cerr << "tdp: run " << run << " epoch " << m.epoch << " loss " << m.train_loss;
            if (m.dev_f1) std::cerr << " dev F1 " << *m.dev_f1;
            std::cerr << '\n';
          });
      if (result.selected_dev_f1) dev_f1.push_back(*result.selected_dev_f1);
      if (!best_model || (result.selected_dev_f1 && *result.selected_dev_f1 > *best_f1)) {
        best_model = std::move(model);
        best_f1 = result.selected_dev_f1;
        best_run = run;
        manifest.results["selected_epoch"] = result.selected_epoch;
      }
    }
    best_model->Save(model_path);
    manifest.results["best_run"] = best_run;
    if (!dev_f1.empty()) {
      const MeanVariance mv = ComputeMeanVariance(dev_f1);
      manifest.results["dev_f1"] = dev_f1;
      manifest.results["mean_dev_f1"] = mv.mean;
      manifest.results["variance_dev_f1"] = mv.variance;
      std::cout << "dev F1 mean " << mv.mean << " variance " << mv.variance << " over "
                << dev_f1.size() << " run(s); saved run " << best_run << '\n';
    }
  }
  if (*variant == EncoderVariant::kStaticPretrainedRecurrent) {
    manifest.results["static_vectors_found"] = encoder_stats.static_vectors_found;
  }
  manifest.seconds = clock.seconds();
  manifest.Write(f.manifest.empty() ? out_dir / "manifest.json" : fs::path(f.manifest));
  std::cout << "model written to " << model_path.string() << '\n';
  return 0;
}

// --- parse ---

struct ParseFlags {
  std::string model;
  std::string inject_scores;
  std::string input;
  std::string output;
  std::string traces;
  std::string dump;
  std::string dot;
  std::string manifest;
  int jobs = 1;
  bool lenient = false;
};

json TraceToJson(const Document& doc, const DecodeTrace& trace) {
  json decisions = json::array();
  for (const ChildDecision& d : trace.decisions) {
    decisions.push_back({{"child", doc.node(d.child).id},
                         {"parent", doc.node(d.parent).id},
                         {"label", LabelName(d.label)},
                         {"probability", d.probability},
                         {"cycle_skips", d.cycle_skips}});
  }
  return {{"doc_id", doc.doc_id()},
          {"children", trace.decisions.size()},
          {"children_with_skip", trace.children_with_skip()},
          {"decisions", std::move(decisions)}};
}

std::unordered_map<std::string, json> LoadInjectedScores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open score file " + path);
  std::unordered_map<std::string, json> by_doc;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
      const std::string doc_id = j.at("doc_id").get<std::string>();
      by_doc[doc_id] = std::move(j);
    } catch (const json::exception& e) {
      throw ConfigError(path + ": line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return by_doc;
}

int RunParse(const ParseFlags& f) {
  const Stopwatch clock;
  if (f.model.empty() == f.inject_scores.empty()) {
    throw ConfigError("give exactly one of --model and --inject-scores");
  }
  std::unique_ptr<RankerModel> model;
  std::unordered_map<std::string, json> injected;
  if (!f.model.empty()) {
    model = RankerModel::Load(f.model);
  } else {
    injected = LoadInjectedScores(f.inject_scores);
  }
  const Loaded input = Load(f.input, f.lenient, /*documents_only=*/true);
  const auto& records = input.records;

  std::vector<std::vector<ScoreTable>> tables(records.size());
  std::vector<DecodeResult> results(records.size());
  ParallelFor(records.size(), f.jobs, [&](std::size_t i) {
    const Document& doc = records[i].doc;
    if (model) {
      tables[i] = model->ScoreDocument(doc);
    } else {
      auto it = injected.find(doc.doc_id());
      if (it == injected.end()) {
        throw ConfigError(f.inject_scores + ": no score tables for document " + doc.doc_id());
      }
      tables[i] = ScoreTablesFromJson(doc, it->second);
    }
    results[i] = Decode(doc, tables[i]);
    const ValidationReport report = ValidateTree(results[i].tree, doc);
    if (!report.empty()) {
      throw Error("internal error: decoded tree for " + doc.doc_id() + " is invalid: " +
                  report.front().message);
    }
  });

  std::vector<CorpusRecord> predicted;
  std::vector<DecodeTrace> traces;
  for (std::size_t i = 0; i < records.size(); ++i) {
    predicted.push_back({records[i].doc, results[i].tree});
    traces.push_back(results[i].trace);
  }
  const fs::path output = f.output;
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  SaveCorpus(predicted, output);

  const fs::path traces_path = f.traces.empty() ? fs::path(f.output + ".traces.jsonl") : fs::path(f.traces);
  {
    std::ofstream out = OpenOutput(traces_path);
    for (std::size_t i = 0; i < records.size(); ++i) {
      out << TraceToJson(records[i].doc, traces[i]).dump() << '\n';
    }
  }
  RunManifest manifest;
  manifest.command = "parse";
  manifest.inputs = {{"input", f.input}};
  if (model) {
    manifest.inputs["model"] = f.model;
    manifest.config = model->config().ToJson();
  } else {
    manifest.inputs["inject_scores"] = f.inject_scores;
  }
  manifest.outputs = {{"predictions", f.output}, {"traces", traces_path.string()}};
  if (!f.dump.empty()) {
    std::ofstream out = OpenOutput(f.dump);
    for (std::size_t i = 0; i < records.size(); ++i) {
      out << ScoreTablesToJson(records[i].doc, tables[i]).dump() << '\n';
    }
    manifest.outputs["scores"] = f.dump;
  }
  if (!f.dot.empty()) {
    fs::create_directories(f.dot);
    for (std::size_t i = 0; i < records.size(); ++i) {
      WriteText(fs::path(f.dot) / (records[i].doc.doc_id() + ".dot"),
                FormatTreeDot(records[i].doc, results[i].tree));
    }
    manifest.outputs["dot"] = f.dot;
  }
  long children = 0;
  long with_skip = 0;
  for (const DecodeTrace& t : traces) {
    children += static_cast<long>(t.decisions.size());
    with_skip += t.children_with_skip();
  }
  manifest.results = {{"documents", records.size()},
                      {"children", children},
                      {"children_with_skip", with_skip},
                      {"skipped_records", input.skipped}};
  manifest.results["cycle_skip_rate"] =
      children > 0 ? json(CycleSkipRate(traces)) : json(nullptr);
  manifest.seconds = clock.seconds();
  manifest.Write(ManifestPath(f.manifest, output));
  std::cout << "parsed " << records.size() << " document(s)";
  if (children > 0) std::cout << ", cycle skip rate " << CycleSkipRate(traces);
  std::cout << '\n';
  return 0;
}

// --- eval / compare ---

struct EvalFlags {
  std::string predicted;
  std::string gold;
  std::string manifest;
  bool json_output = false;
  bool lenient = false;
};

int RunEval(const EvalFlags& f) {
  const Stopwatch clock;
  const Loaded predicted = Load(f.predicted, f.lenient);
  const Loaded gold = Load(f.gold, f.lenient);
  const auto trees = Trees(predicted.records);
  const EvalReport report = Evaluate(trees, gold.records);
  const EquivalenceReport equivalence = EquivalenceAwareReport(trees, Trees(gold.records));
  const json report_json = json::parse(FormatReportJson(report));
  const json equivalence_json = json::parse(FormatEquivalenceJson(equivalence));
  if (f.json_output) {
    std::cout << json{{"report", report_json}, {"equivalence", equivalence_json}}.dump(2) << '\n';
  } else {
    std::cout << FormatReportTable(report);
    std::cout << "trees: " << equivalence.exact << " exact, " << equivalence.closure_equivalent
              << " closure-equivalent, " << equivalence.different << " different\n";
  }
  if (!f.manifest.empty()) {
    RunManifest manifest;
    manifest.command = "eval";
    manifest.inputs = {{"predicted", f.predicted}, {"gold", f.gold}};
    manifest.results = {{"report", report_json},
                        {"exact", equivalence.exact},
                        {"closure_equivalent", equivalence.closure_equivalent},
                        {"different", equivalence.different}};
    manifest.seconds = clock.seconds();
    manifest.Write(f.manifest);
  }
  return 0;
}

struct CompareFlags {
  std::string a;
  std::string b;
  std::string gold;
  bool lenient = false;
};

int RunCompare(const CompareFlags& f) {
  const Loaded gold = Load(f.gold, f.lenient);
  const EvalReport a = Evaluate(Trees(Load(f.a, f.lenient).records), gold.records);
  const EvalReport b = Evaluate(Trees(Load(f.b, f.lenient).records), gold.records);
  const CategoryDelta delta = CategoryBreakdownDelta(a, b);
  std::cout << std::left << std::setw(8) << "parent" << std::setw(8) << "gold" << std::setw(9)
            << "acc_a" << std::setw(9) << "acc_b" << "delta\n"
            << std::fixed << std::setprecision(4);
  for (int c = 0; c < kNumCategories; ++c) {
    const auto cat = static_cast<ParentCategory>(c);
    std::cout << std::left << std::setw(8) << CategoryName(cat) << std::setw(8)
              << a.category(cat).total << std::setw(9) << a.category(cat).accuracy()
              << std::setw(9) << b.category(cat).accuracy() << std::showpos << delta[cat]
              << std::noshowpos << '\n';
  }
  std::cout << std::left << std::setw(16) << "f1" << std::setw(9) << a.f1() << std::setw(9)
            << b.f1() << std::showpos << b.f1() - a.f1() << std::noshowpos << '\n';
  return 0;
}

// --- corpus utilities ---

struct CorpusFlags {
  std::string input;
  std::string doc;
  bool json_output = false;
  bool lenient = false;
  bool dot = false;
  WindowConfig window;
};

std::vector<const CorpusRecord*> Select(const std::vector<CorpusRecord>& records,
                                        const std::string& doc_id) {
  std::vector<const CorpusRecord*> out;
  for (const CorpusRecord& r : records) {
    if (doc_id.empty() || r.doc.doc_id() == doc_id) out.push_back(&r);
  }
  if (!doc_id.empty() && out.empty()) throw ConfigError("no document " + doc_id);
  return out;
}

int RunStats(const CorpusFlags& f) {
  f.window.Validate();
  const Loaded corpus = Load(f.input, f.lenient);
  const CorpusStats stats = ComputeCorpusStats(corpus.records, f.window);
  std::cout << (f.json_output ? FormatStatsJson(stats) + "\n" : FormatStatsTable(stats));
  return 0;
}

int RunValidate(const CorpusFlags& f) {
  std::ifstream in(f.input);
  if (!in) throw Error("cannot open corpus " + f.input);
  std::string line;
  std::size_t line_number = 0;
  int valid = 0;
  int invalid = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ParseRecord(line, line_number);
      ++valid;
    } catch (const Error& e) {
      ++invalid;
      std::cout << f.input << ": " << e.what() << '\n';
    }
  }
  std::cout << valid << " valid, " << invalid << " invalid record(s)\n";
  return invalid == 0 ? 0 : 1;
}

int RunClosure(const CorpusFlags& f) {
  const Loaded corpus = Load(f.input, f.lenient);
  for (const CorpusRecord* r : Select(corpus.records, f.doc)) {
    std::cout << FormatMatrixJson(r->doc.doc_id(), Close(r->tree)) << '\n';
  }
  return 0;
}

int RunShow(const CorpusFlags& f) {
  const Loaded corpus = Load(f.input, f.lenient);
  for (const CorpusRecord* r : Select(corpus.records, f.doc)) {
    std::cout << (f.dot ? FormatTreeDot(r->doc, r->tree) : FormatTreeIndented(r->doc, r->tree));
  }
  return 0;
}

struct SynthFlags {
  std::string output;
  std::string manifest;
  SyntheticOptions options;
};

int RunSynth(const SynthFlags& f) {
  const Stopwatch clock;
  const auto corpus = GenerateSyntheticCorpus(f.options);
  const fs::path output = f.output;
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  SaveCorpus(corpus, output);
  RunManifest manifest;
  manifest.command = "synth";
  manifest.config = {{"documents", f.options.documents},
                     {"min_sentences", f.options.min_sentences},
                     {"max_sentences", f.options.max_sentences},
                     {"timex_probability", f.options.timex_probability},
                     {"connective_probability", f.options.connective_probability}};
  manifest.outputs = {{"corpus", f.output}};
  manifest.seed = f.options.seed;
  manifest.results = {{"documents", corpus.size()}};
  manifest.seconds = clock.seconds();
  manifest.Write(ManifestPath(f.manifest, output));
  std::cout << "wrote " << corpus.size() << " document(s) to " << f.output << '\n';
  return 0;
}

struct InitContextualFlags {
  std::vector<std::string> corpora;
  std::string output;
  std::string manifest;
  ContextualConfig config;
  bool cased = false;
  int vocab_words = 5000;
  std::uint64_t seed = 1;
};

int RunInitContextual(const InitContextualFlags& f) {
  const Stopwatch clock;
  ContextualConfig config = f.config;
  config.lowercase = !f.cased;
  config.Validate();
  std::vector<std::vector<std::string>> sentences;
  for (const std::string& path : f.corpora) {
    for (const CorpusRecord& r : Load(path, false, true).records) {
      for (const auto& s : r.doc.sentences()) sentences.push_back(s);
      std::vector<std::string> extra;
      std::istringstream words(r.doc.dct_text());
      for (std::string w; words >> w;) extra.push_back(w);
      for (const Mention& m : r.doc.mentions()) {
        std::istringstream text(m.text);
        for (std::string w; text >> w;) extra.push_back(w);
      }
      sentences.push_back(std::move(extra));
    }
  }
  sentences.push_back(PseudoSentenceWords());
  const ContextualCheckpoint ckpt =
      RandomContextualCheckpoint(config, WordPieceVocab::Build(sentences, f.vocab_words,
                                                               config.lowercase),
                                 f.seed);
  const fs::path output = f.output;
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  SaveContextualCheckpoint(output, ckpt);
  RunManifest manifest;
  manifest.command = "init-contextual";
  manifest.config = config.ToJson();
  manifest.config["vocab_words"] = f.vocab_words;
  manifest.inputs = {{"corpora", f.corpora}};
  manifest.outputs = {{"checkpoint", f.output}};
  manifest.seed = f.seed;
  manifest.results = {{"vocab_size", ckpt.vocab.size()}};
  manifest.seconds = clock.seconds();
  manifest.Write(ManifestPath(f.manifest, output));
  std::cout << "wrote contextual checkpoint with " << ckpt.vocab.size() << " subwords to "
            << f.output << '\n';
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Temporal dependency parsing toolkit"};
  app.set_version_flag("--version", std::string(ToolkitVersion()));
  app.require_subcommand(1);
  int status = 0;

  TrainFlags train;
  auto* t = app.add_subcommand("train", "Train a parser (optionally with a grid search)");
  t->add_option("--train", train.train, "Training corpus")->required();
  t->add_option("--dev", train.dev, "Development corpus");
  t->add_option("--out", train.out, "Output directory")->required();
  t->add_option("--encoder", train.encoder,
                "recurrent | recurrent-static | recurrent-contextual | transformer-finetuned")
      ->capture_default_str();
  t->add_option("--checkpoint", train.checkpoint, "Contextual model checkpoint");
  t->add_option("--embeddings", train.embeddings, "Word vectors in text format");
  AddWindowFlags(t, train.window);
  t->add_option("--embedding-dim", train.embedding_dim)->capture_default_str();
  t->add_option("--hidden-dim", train.hidden_dim, "Recurrent size per direction")
      ->capture_default_str();
  t->add_option("--ff-dim", train.ff_dim, "Ranking layer size")->capture_default_str();
  t->add_option("--max-seq-len", train.max_sequence_length, "Subwords per pseudo-sentence pair")
      ->capture_default_str();
  t->add_option("--pooling", train.pooling, "Span head: first | mean")
      ->check(CLI::IsMember({"first", "mean"}))
      ->capture_default_str();
  t->add_option("--lr", train.train_config.learning_rate)->capture_default_str();
  t->add_option("--epochs", train.train_config.epochs)->capture_default_str();
  t->add_option("--runs", train.train_config.runs, "Runs with seeds seed, seed+1, ...")
      ->capture_default_str();
  t->add_option("--batch-size", train.train_config.batch_size)->capture_default_str();
  t->add_option("--seed", train.train_config.seed)->capture_default_str();
  t->add_option("--jobs", train.train_config.jobs, "Threads for dev parsing")
      ->capture_default_str();
  t->add_flag("--select-best-dev", train.train_config.select_best_dev,
              "Keep the epoch with the best dev F1");
  t->add_flag("--grid", train.grid, "Grid search over --grid-lr x --grid-epochs");
  t->add_option("--grid-lr", train.grid_lrs)->capture_default_str();
  t->add_option("--grid-epochs", train.grid_epochs)->capture_default_str();
  t->add_flag("--lenient", train.lenient, "Skip invalid records");
  t->add_option("--manifest", train.manifest, "Manifest path");
  t->callback([&] { status = RunTrain(train); });

  ParseFlags parse;
  auto* p = app.add_subcommand("parse", "Parse documents with a trained model");
  p->add_option("--model", parse.model, "Model checkpoint");
  p->add_option("--inject-scores", parse.inject_scores,
                "Decode externally supplied score tables instead of running a model");
  p->add_option("--input", parse.input, "Documents to parse")->required();
  p->add_option("--output", parse.output, "Predicted corpus")->required();
  p->add_option("--traces", parse.traces, "Decode traces (default: <output>.traces.jsonl)");
  p->add_option("--dump", parse.dump, "Write the score tables");
  p->add_option("--dot", parse.dot, "Directory for Graphviz renderings");
  p->add_option("--jobs", parse.jobs)->capture_default_str();
  p->add_flag("--lenient", parse.lenient);
  p->add_option("--manifest", parse.manifest);
  p->callback([&] { status = RunParse(parse); });

  EvalFlags eval;
  auto* e = app.add_subcommand("eval", "Score predicted trees against gold trees");
  e->add_option("--predicted", eval.predicted)->required();
  e->add_option("--gold", eval.gold)->required();
  e->add_flag("--json", eval.json_output);
  e->add_flag("--lenient", eval.lenient);
  e->add_option("--manifest", eval.manifest);
  e->callback([&] { status = RunEval(eval); });

  CompareFlags compare;
  auto* c = app.add_subcommand("compare", "Per-parent-category accuracy of two systems");
  c->add_option("--a", compare.a)->required();
  c->add_option("--b", compare.b)->required();
  c->add_option("--gold", compare.gold)->required();
  c->add_flag("--lenient", compare.lenient);
  c->callback([&] { status = RunCompare(compare); });

  CorpusFlags corpus;
  auto* s = app.add_subcommand("stats", "Corpus statistics");
  s->add_option("--input", corpus.input)->required();
  s->add_flag("--json", corpus.json_output);
  s->add_flag("--lenient", corpus.lenient);
  AddWindowFlags(s, corpus.window);
  s->callback([&] { status = RunStats(corpus); });

  auto* v = app.add_subcommand("validate", "Check every record of a corpus");
  v->add_option("--input", corpus.input)->required();
  v->callback([&] { status = RunValidate(corpus); });

  auto* cl = app.add_subcommand("closure", "Pairwise relations implied by each tree");
  cl->add_option("--input", corpus.input)->required();
  cl->add_option("--doc", corpus.doc);
  cl->add_flag("--lenient", corpus.lenient);
  cl->callback([&] { status = RunClosure(corpus); });

  auto* sh = app.add_subcommand("show", "Render trees");
  sh->add_option("--input", corpus.input)->required();
  sh->add_option("--doc", corpus.doc);
  sh->add_flag("--dot", corpus.dot, "Graphviz output");
  sh->add_flag("--lenient", corpus.lenient);
  sh->callback([&] { status = RunShow(corpus); });

  SynthFlags synth;
  auto* sy = app.add_subcommand("synth", "Generate a synthetic corpus");
  sy->add_option("--output", synth.output)->required();
  sy->add_option("--documents", synth.options.documents)->capture_default_str();
  sy->add_option("--min-sentences", synth.options.min_sentences)->capture_default_str();
  sy->add_option("--max-sentences", synth.options.max_sentences)->capture_default_str();
  sy->add_option("--seed", synth.options.seed)->capture_default_str();
  sy->add_option("--manifest", synth.manifest);
  sy->callback([&] { status = RunSynth(synth); });

  InitContextualFlags init;
  auto* ic = app.add_subcommand("init-contextual",
                                "Write a randomly initialized contextual checkpoint");
  ic->add_option("--corpus", init.corpora, "Corpora for the vocabulary")->required();
  ic->add_option("--output", init.output)->required();
  ic->add_option("--hidden", init.config.hidden)->capture_default_str();
  ic->add_option("--layers", init.config.layers)->capture_default_str();
  ic->add_option("--heads", init.config.heads)->capture_default_str();
  ic->add_option("--ffn", init.config.ffn)->capture_default_str();
  ic->add_option("--max-positions", init.config.max_positions)->capture_default_str();
  ic->add_option("--vocab-words", init.vocab_words)->capture_default_str();
  ic->add_flag("--cased", init.cased);
  ic->add_option("--seed", init.seed)->capture_default_str();
  ic->add_option("--manifest", init.manifest);
  ic->callback([&] { status = RunInitContextual(init); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }
  return status;
}

}  // namespace
}  // namespace tdp

int main(int argc, char** argv) {
  try {
    return tdp::Main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "tdp: error: " << e.what() << '\n';
    return 1;
  }
}
