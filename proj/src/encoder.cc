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

#include "tdp/encoder.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "tdp/errors.h"
#include "tdp/nn/serialize.h"

namespace tdp {

using nlohmann::json;

std::string_view VariantName(EncoderVariant v) {
  switch (v) {
    case EncoderVariant::kRandomInitRecurrent:
      return "recurrent";
    case EncoderVariant::kStaticPretrainedRecurrent:
      return "recurrent-static";
    case EncoderVariant::kFrozenContextualRecurrent:
      return "recurrent-contextual";
    case EncoderVariant::kFinetunedTransformer:
      return "transformer-finetuned";
  }
  return "?";
}

std::optional<EncoderVariant> ParseVariant(std::string_view name) {
  for (EncoderVariant v :
       {EncoderVariant::kRandomInitRecurrent, EncoderVariant::kStaticPretrainedRecurrent,
        EncoderVariant::kFrozenContextualRecurrent, EncoderVariant::kFinetunedTransformer}) {
    if (VariantName(v) == name) return v;
  }
  return std::nullopt;
}

bool UsesContextualModel(EncoderVariant v) {
  return v == EncoderVariant::kFrozenContextualRecurrent ||
         v == EncoderVariant::kFinetunedTransformer;
}

EncoderConfig EncoderConfig::ForVariant(EncoderVariant v) {
  EncoderConfig c;
  c.variant = v;
  c.freeze_contextual = v == EncoderVariant::kFrozenContextualRecurrent;
  return c;
}

void EncoderConfig::Validate() const {
  if (variant == EncoderVariant::kFrozenContextualRecurrent && !freeze_contextual) {
    throw ConfigError("the frozen contextual encoder requires freeze_contextual");
  }
  if (variant == EncoderVariant::kFinetunedTransformer && freeze_contextual) {
    throw ConfigError("the fine-tuned transformer cannot freeze its contextual model");
  }
  if (embedding_dim <= 0 || recurrent_hidden_dim <= 0) {
    throw ConfigError("encoder dimensions must be positive");
  }
  if (max_sequence_length < 8) throw ConfigError("max_sequence_length must be at least 8");
}

json EncoderConfig::ToJson() const {
  return json{{"variant", VariantName(variant)},
              {"embedding_dim", embedding_dim},
              {"recurrent_hidden_dim", recurrent_hidden_dim},
              {"contextual_model_name", contextual_model_name},
              {"max_sequence_length", max_sequence_length},
              {"freeze_contextual", freeze_contextual},
              {"pooling", pooling == HeadPooling::kFirstToken ? "first" : "mean"}};
}

EncoderConfig EncoderConfig::FromJson(const json& j) {
  EncoderConfig c;
  try {
    const auto name = j.at("variant").get<std::string>();
    auto v = ParseVariant(name);
    if (!v) throw ConfigError("unknown encoder variant \"" + name + "\"");
    c.variant = *v;
    c.embedding_dim = j.at("embedding_dim").get<int>();
    c.recurrent_hidden_dim = j.at("recurrent_hidden_dim").get<int>();
    c.contextual_model_name = j.at("contextual_model_name").get<std::string>();
    c.max_sequence_length = j.at("max_sequence_length").get<int>();
    c.freeze_contextual = j.at("freeze_contextual").get<bool>();
    c.pooling = j.at("pooling").get<std::string>() == "mean" ? HeadPooling::kMeanTokens
                                                             : HeadPooling::kFirstToken;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad encoder config: ") + e.what());
  }
  c.Validate();
  return c;
}

// --- Pseudo-sentences ---

std::vector<std::string> PseudoSentenceSide::Tokens() const {
  std::vector<std::string> out = node_words;
  out.push_back(label);
  out.emplace_back(":");
  out.insert(out.end(), sentence.begin(), sentence.end());
  return out;
}

std::vector<std::string> PseudoSentencePair::Tokens() const {
  std::vector<std::string> out = {std::string(WordPieceVocab::kCls)};
  for (const auto& t : parent.Tokens()) out.push_back(t);
  out.emplace_back(WordPieceVocab::kSep);
  for (const auto& t : child.Tokens()) out.push_back(t);
  return out;
}

namespace {

std::vector<std::string> SplitWords(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

PseudoSentenceSide Side(const Document& doc, int order) {
  const Mention& m = doc.node(order);
  PseudoSentenceSide side;
  switch (m.kind) {
    case MentionKind::kRoot:
      side.node_words = {"root"};
      side.label = "TIMEX";
      break;
    case MentionKind::kDct:
      side.node_words = SplitWords(m.text);
      side.label = "TIMEX";
      break;
    case MentionKind::kTimex:
    case MentionKind::kEvent:
      side.node_words = SplitWords(m.text);
      side.label = m.kind == MentionKind::kTimex ? "TIMEX" : "EVENT";
      side.sentence = doc.sentences()[m.sentence_index];
      break;
  }
  return side;
}

}  // namespace

PseudoSentencePair BuildPseudoSentencePair(const Document& doc, int parent, int child) {
  if (parent == child) throw PreconditionError("pseudo-sentence pair needs two nodes");
  if (parent < kRootOrder || parent >= doc.num_mentions() || child < kRootOrder ||
      child >= doc.num_mentions()) {
    throw PreconditionError("pseudo-sentence node out of range");
  }
  return PseudoSentencePair{Side(doc, parent), Side(doc, child)};
}

PseudoSentencePair BuildPseudoSentencePair(const Document& doc, std::string_view parent_id,
                                           std::string_view child_id) {
  auto p = doc.OrderOf(parent_id);
  auto c = doc.OrderOf(child_id);
  if (!p || !c) throw PreconditionError("unknown node in pseudo-sentence pair");
  return BuildPseudoSentencePair(doc, *p, *c);
}

std::vector<std::string> PseudoSentenceWords() { return {"root", "TIMEX", "EVENT", ":"}; }

SubwordSequence EncodePseudoSentencePair(const PseudoSentencePair& pair,
                                         const WordPieceVocab& vocab, int max_length) {
  auto tokenize = [&](const std::vector<std::string>& words) {
    std::vector<int> ids;
    for (const auto& w : words) {
      const auto pieces = vocab.TokenizeWord(w);
      ids.insert(ids.end(), pieces.begin(), pieces.end());
    }
    return ids;
  };
  auto head = [&](const PseudoSentenceSide& s) {
    std::vector<std::string> words = s.node_words;
    words.push_back(s.label);
    words.emplace_back(":");
    return tokenize(words);
  };
  const std::vector<int> parent_head = head(pair.parent);
  const std::vector<int> child_head = head(pair.child);
  std::vector<int> parent_sentence = tokenize(pair.parent.sentence);
  std::vector<int> child_sentence = tokenize(pair.child.sentence);

  const std::size_t fixed = 2 + parent_head.size() + child_head.size();
  if (fixed > static_cast<std::size_t>(max_length)) {
    throw ConfigError("max_sequence_length " + std::to_string(max_length) +
                      " cannot hold the node words and labels (" + std::to_string(fixed) +
                      " subwords)");
  }
  SubwordSequence out;
  while (fixed + parent_sentence.size() + child_sentence.size() >
         static_cast<std::size_t>(max_length)) {
    if (parent_sentence.size() > child_sentence.size()) {
      parent_sentence.pop_back();
    } else {
      child_sentence.pop_back();
    }
    ++out.truncated;
  }
  out.ids.push_back(vocab.cls_id());
  out.ids.insert(out.ids.end(), parent_head.begin(), parent_head.end());
  out.ids.insert(out.ids.end(), parent_sentence.begin(), parent_sentence.end());
  out.ids.push_back(vocab.sep_id());
  out.segments.assign(out.ids.size(), 0);
  out.ids.insert(out.ids.end(), child_head.begin(), child_head.end());
  out.ids.insert(out.ids.end(), child_sentence.begin(), child_sentence.end());
  out.segments.resize(out.ids.size(), 1);
  return out;
}

// --- Features ---

FeatureLayout::FeatureLayout(const WindowConfig& window) : window_(window) {
  window_.Validate();
}

int FeatureLayout::DistanceIndex(int distance) const {
  if (distance < 0 && distance >= -window_.back) return distance + window_.back;
  if (distance > 0 && distance <= window_.forward) return window_.back + distance - 1;
  return -1;
}

int FeatureLayout::KindPair(MentionKind child, MentionKind parent) const {
  const int c = child == MentionKind::kTimex ? 1 : 0;
  int p = 0;
  switch (parent) {
    case MentionKind::kRoot:
      p = 0;
      break;
    case MentionKind::kDct:
      p = 1;
      break;
    case MentionKind::kTimex:
      p = 2;
      break;
    case MentionKind::kEvent:
      p = 3;
      break;
  }
  return same_sentence() + 1 + c * 4 + p;
}

nn::Vector FeatureLayout::Extract(const Document& doc, int parent, int child) const {
  nn::Vector f = nn::Vector::Zero(dim());
  const Mention& c = doc.node(child);
  const Mention& p = doc.node(parent);
  int bucket = -1;
  if (parent >= 0 && child >= 0) bucket = DistanceIndex(parent - child);
  f(bucket >= 0 ? bucket : out_of_range()) = 1.0;
  if (parent >= 0 && child >= 0 && p.sentence_index == c.sentence_index) {
    f(same_sentence()) = 1.0;
  }
  f(KindPair(c.kind, p.kind)) = 1.0;
  if (p.kind == MentionKind::kDct) f(parent_is_dct()) = 1.0;
  if (p.kind == MentionKind::kRoot) f(parent_is_root()) = 1.0;
  return f;
}

// --- Vocabularies ---

WordVocab::WordVocab() : WordVocab(std::vector<std::string>{}) {}

WordVocab::WordVocab(std::vector<std::string> words) : words_(std::move(words)) {
  if (std::find(words_.begin(), words_.end(), kUnknown) == words_.end()) {
    words_.insert(words_.begin(), std::string(kUnknown));
  }
  for (int i = 0; i < size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw ConfigError("duplicate vocabulary word \"" + words_[i] + "\"");
    }
  }
  unknown_ = index_.at(std::string(kUnknown));
}

WordVocab WordVocab::Build(std::span<const CorpusRecord> corpus) {
  std::map<std::string, int> seen;
  for (const CorpusRecord& r : corpus) {
    for (const auto& s : r.doc.sentences())
      for (const auto& w : s) seen[w] = 1;
  }
  std::vector<std::string> words;
  for (const auto& [w, unused] : seen) words.push_back(w);
  return WordVocab(std::move(words));
}

int WordVocab::Id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? unknown_ : it->second;
}

WordVectors LoadWordVectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open word vectors " + path.string());
  WordVectors out;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> values;
    for (double v; fields >> v;) values.push_back(v);
    if (!fields.eof()) {
      throw ConfigError(path.string() + ": line " + std::to_string(line_number) +
                        ": non-numeric vector component");
    }
    if (line_number == 1 && values.size() == 1) continue;  // "<count> <dim>" header
    if (out.dim == 0) out.dim = static_cast<int>(values.size());
    if (values.empty() || static_cast<int>(values.size()) != out.dim) {
      throw ConfigError(path.string() + ": line " + std::to_string(line_number) + ": expected " +
                        std::to_string(out.dim) + " components, got " +
                        std::to_string(values.size()));
    }
    out.vectors[word] = Eigen::Map<nn::Vector>(values.data(), out.dim);
  }
  if (out.dim == 0) throw ConfigError(path.string() + ": no word vectors");
  return out;
}

// --- Encoders ---

nn::Expr PairEncoder::EncodePairs(nn::Graph& g, DocumentState& state, const Document& doc,
                                  int child, std::span<const int> parents) const {
  if (parents.empty()) throw PreconditionError("no candidate parents to encode");
  const nn::Expr dense = EncodeDense(g, state, doc, child, parents);
  nn::Matrix feats(features_.dim(), static_cast<long>(parents.size()));
  for (std::size_t j = 0; j < parents.size(); ++j) {
    feats.col(static_cast<long>(j)) = features_.Extract(doc, parents[j], child);
  }
  const nn::Expr parts[] = {dense, g.Input(std::move(feats))};
  return nn::ConcatRows(parts);
}

namespace {

struct RecurrentState : DocumentState {
  // Node representations in slot order: ROOT, DCT, mentions.
  nn::Expr nodes;
};

class RecurrentEncoder : public PairEncoder {
 public:
  RecurrentEncoder(const EncoderConfig& config, const WindowConfig& window, WordVocab vocab,
                   std::unique_ptr<ContextualModel> contextual, nn::ParameterCollection& params,
                   std::mt19937_64& rng)
      : PairEncoder(config, window), vocab_(std::move(vocab)), contextual_(std::move(contextual)) {
    const int input_dim = contextual_ ? contextual_->hidden() : config.embedding_dim;
    if (!contextual_) {
      embeddings_ = &params.Add("encoder/embeddings", config.embedding_dim, vocab_.size(),
                                nn::Init::kNormal, rng, 0.1);
    }
    lstm_ = nn::BiLstm::Create(params, "encoder/bilstm", input_dim, config.recurrent_hidden_dim,
                               rng);
    root_ = &params.Add("encoder/root", 2 * config.recurrent_hidden_dim, 1, nn::Init::kNormal,
                        rng, 0.1);
    dct_ = &params.Add("encoder/dct", 2 * config.recurrent_hidden_dim, 1, nn::Init::kNormal,
                       rng, 0.1);
  }

  int dense_dim() const override { return 4 * config().recurrent_hidden_dim; }
  const WordVocab& vocab() const { return vocab_; }
  nn::Parameter* embeddings() const { return embeddings_; }
  const ContextualModel* contextual() const { return contextual_.get(); }

  std::unique_ptr<DocumentState> Prepare(nn::Graph& g, const Document& doc) const override {
    auto state = std::make_unique<RecurrentState>();
    std::vector<nn::Expr> columns = {g.Param(*root_), g.Param(*dct_)};
    std::vector<int> offsets;
    std::vector<std::string> words;
    for (const auto& s : doc.sentences()) {
      offsets.push_back(static_cast<int>(words.size()));
      words.insert(words.end(), s.begin(), s.end());
    }
    if (doc.num_mentions() > 0 && !words.empty()) {
      nn::Expr x;
      if (contextual_) {
        x = g.Input(ContextualInputs(doc, words));
      } else {
        std::vector<int> ids;
        for (const auto& w : words) ids.push_back(vocab_.Id(w));
        x = nn::SelectCols(g.Param(*embeddings_), ids);
      }
      const nn::Expr h = lstm_(g, x);
      if (config().pooling == HeadPooling::kFirstToken) {
        std::vector<int> heads;
        for (const Mention& m : doc.mentions()) heads.push_back(offsets[m.sentence_index] + m.span.start);
        columns.push_back(nn::SelectCols(h, heads));
      } else {
        for (const Mention& m : doc.mentions()) {
          columns.push_back(nn::MeanCols(
              nn::Cols(h, offsets[m.sentence_index] + m.span.start, m.span.end - m.span.start)));
        }
      }
    }
    state->nodes = nn::ConcatCols(columns);
    return state;
  }

 protected:
  nn::Expr EncodeDense(nn::Graph&, DocumentState& state, const Document&, int child,
                       std::span<const int> parents) const override {
    auto& s = static_cast<RecurrentState&>(state);
    std::vector<int> parent_slots;
    for (int p : parents) parent_slots.push_back(SlotOf(p));
    const std::vector<int> child_slots(parents.size(), SlotOf(child));
    const nn::Expr parts[] = {nn::SelectCols(s.nodes, parent_slots),
                              nn::SelectCols(s.nodes, child_slots)};
    return nn::ConcatRows(parts);
  }

 private:
  // Frozen contextual vectors for the document's tokens, sentence by
  // sentence. They never change, so they are computed once per document.
  nn::Matrix ContextualInputs(const Document& doc, const std::vector<std::string>& words) const {
    const std::string key = doc.doc_id() + "\x1f" + std::to_string(words.size());
    {
      std::lock_guard<std::mutex> lock(cache_mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    nn::Matrix x(contextual_->hidden(), static_cast<long>(words.size()));
    long col = 0;
    for (const auto& s : doc.sentences()) {
      if (s.empty()) continue;
      x.middleCols(col, static_cast<long>(s.size())) = contextual_->EmbedWords(s);
      col += static_cast<long>(s.size());
    }
    std::lock_guard<std::mutex> lock(cache_mutex_);
    cache_.emplace(key, x);
    return x;
  }

  WordVocab vocab_;
  std::unique_ptr<ContextualModel> contextual_;
  nn::Parameter* embeddings_ = nullptr;
  nn::BiLstm lstm_;
  nn::Parameter* root_ = nullptr;
  nn::Parameter* dct_ = nullptr;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::string, nn::Matrix> cache_;
};

class TransformerEncoder : public PairEncoder {
 public:
  TransformerEncoder(const EncoderConfig& config, const WindowConfig& window,
                     std::unique_ptr<ContextualModel> contextual)
      : PairEncoder(config, window), contextual_(std::move(contextual)) {
    if (config.max_sequence_length > contextual_->config().max_positions) {
      throw ConfigError("max_sequence_length " + std::to_string(config.max_sequence_length) +
                        " exceeds the contextual model's " +
                        std::to_string(contextual_->config().max_positions) + " positions");
    }
  }

  int dense_dim() const override { return contextual_->hidden(); }
  const ContextualModel* contextual() const { return contextual_.get(); }

  std::unique_ptr<DocumentState> Prepare(nn::Graph&, const Document&) const override {
    return std::make_unique<DocumentState>();
  }

 protected:
  nn::Expr EncodeDense(nn::Graph& g, DocumentState&, const Document& doc, int child,
                       std::span<const int> parents) const override {
    std::vector<nn::Expr> columns;
    for (int p : parents) {
      const SubwordSequence seq = EncodePseudoSentencePair(
          BuildPseudoSentencePair(doc, p, child), contextual_->vocab(),
          config().max_sequence_length);
      columns.push_back(nn::Cols(contextual_->Forward(g, seq.ids, seq.segments), 0, 1));
    }
    return nn::ConcatCols(columns);
  }

 private:
  std::unique_ptr<ContextualModel> contextual_;
};

}  // namespace

std::unique_ptr<PairEncoder> CreateEncoder(const EncoderConfig& config,
                                           const WindowConfig& window,
                                           const EncoderResources& resources,
                                           nn::ParameterCollection& params,
                                           std::mt19937_64& rng, EncoderStats* stats) {
  config.Validate();
  window.Validate();
  std::unique_ptr<ContextualModel> contextual;
  if (UsesContextualModel(config.variant)) {
    if (!resources.contextual) {
      throw ConfigError(std::string("encoder ") + std::string(VariantName(config.variant)) +
                        " needs a contextual checkpoint");
    }
    const ContextualCheckpoint& ckpt = *resources.contextual;
    contextual = std::make_unique<ContextualModel>(ckpt.config, ckpt.vocab, params, rng);
    nn::AssignParameters(params, ckpt.parameters, contextual->prefix() + "/",
                         config.contextual_model_name.empty() ? "contextual checkpoint"
                                                              : config.contextual_model_name);
    params.SetTrainable(contextual->prefix() + "/", !config.freeze_contextual);
  }

  switch (config.variant) {
    case EncoderVariant::kRandomInitRecurrent:
      return std::make_unique<RecurrentEncoder>(config, window, resources.vocab, nullptr, params,
                                                rng);
    case EncoderVariant::kStaticPretrainedRecurrent: {
      if (resources.static_vectors == nullptr) {
        throw ConfigError("encoder recurrent-static needs word vectors");
      }
      const WordVectors& vectors = *resources.static_vectors;
      if (vectors.dim != config.embedding_dim) {
        throw ConfigError("word vectors have dimension " + std::to_string(vectors.dim) +
                          " but embedding_dim is " + std::to_string(config.embedding_dim));
      }
      auto enc = std::make_unique<RecurrentEncoder>(config, window, resources.vocab, nullptr,
                                                    params, rng);
      int found = 0;
      const auto& words = enc->vocab().words();
      for (int i = 0; i < static_cast<int>(words.size()); ++i) {
        auto it = vectors.vectors.find(words[i]);
        if (it == vectors.vectors.end()) continue;
        enc->embeddings()->value.col(i) = it->second;
        ++found;
      }
      if (stats) stats->static_vectors_found = found;
      return enc;
    }
    case EncoderVariant::kFrozenContextualRecurrent:
      return std::make_unique<RecurrentEncoder>(config, window, resources.vocab,
                                                std::move(contextual), params, rng);
    case EncoderVariant::kFinetunedTransformer:
      return std::make_unique<TransformerEncoder>(config, window, std::move(contextual));
  }
  throw ConfigError("unknown encoder variant");
}

const ContextualModel* ContextualModelOf(const PairEncoder& encoder) {
  if (auto* r = dynamic_cast<const RecurrentEncoder*>(&encoder)) return r->contextual();
  if (auto* t = dynamic_cast<const TransformerEncoder*>(&encoder)) return t->contextual();
  return nullptr;
}

const WordVocab* WordVocabOf(const PairEncoder& encoder) {
  if (auto* r = dynamic_cast<const RecurrentEncoder*>(&encoder)) return &r->vocab();
  return nullptr;
}

}  // namespace tdp
