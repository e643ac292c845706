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

// Pair encoders: a dense representation of a (candidate parent, child)
// pair in its document context, with linguistic features appended.
//
// Recurrent variants run a document-level BiLSTM over the whitespace tokens
// of all sentences and concatenate the outputs at the parent's and the
// child's head tokens (ROOT and DCT use learned sentinel vectors). The
// fine-tuned transformer encodes a pseudo-sentence pair and takes the
// output at [CLS].

#ifndef TDP_ENCODER_H_
#define TDP_ENCODER_H_

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "tdp/candidates.h"
#include "tdp/contextual.h"
#include "tdp/corpus_io.h"
#include "tdp/nn/graph.h"
#include "tdp/nn/layers.h"
#include "tdp/tdt.h"

namespace tdp {

enum class EncoderVariant {
  kRandomInitRecurrent,
  kStaticPretrainedRecurrent,
  kFrozenContextualRecurrent,
  kFinetunedTransformer,
};

// "recurrent", "recurrent-static", "recurrent-contextual",
// "transformer-finetuned".
std::string_view VariantName(EncoderVariant v);
std::optional<EncoderVariant> ParseVariant(std::string_view name);
bool UsesContextualModel(EncoderVariant v);

enum class HeadPooling { kFirstToken, kMeanTokens };

struct EncoderConfig {
  EncoderVariant variant = EncoderVariant::kRandomInitRecurrent;
  int embedding_dim = 100;         // word embeddings of the recurrent variants
  int recurrent_hidden_dim = 100;  // per direction
  std::string contextual_model_name;  // checkpoint path for contextual variants
  int max_sequence_length = 128;      // subwords, fine-tuned transformer only
  bool freeze_contextual = false;
  HeadPooling pooling = HeadPooling::kFirstToken;

  // Defaults for a variant, with freeze_contextual set accordingly.
  static EncoderConfig ForVariant(EncoderVariant v);
  // Throws ConfigError.
  void Validate() const;
  nlohmann::json ToJson() const;
  static EncoderConfig FromJson(const nlohmann::json& j);
};

// --- Pseudo-sentences ---

struct PseudoSentenceSide {
  std::vector<std::string> node_words;
  std::string label;  // "TIMEX" or "EVENT"
  std::vector<std::string> sentence;

  // node words, label, ":", sentence
  std::vector<std::string> Tokens() const;
};

struct PseudoSentencePair {
  PseudoSentenceSide parent;
  PseudoSentenceSide child;

  // [CLS] parent side [SEP] child side
  std::vector<std::string> Tokens() const;
};

// Node words are the whitespace-split mention text; the sentence is copied
// verbatim. DCT renders as TIMEX with its date words and ROOT as the word
// "root" with label TIMEX; both have an empty sentence.
PseudoSentencePair BuildPseudoSentencePair(const Document& doc, int parent, int child);
PseudoSentencePair BuildPseudoSentencePair(const Document& doc, std::string_view parent_id,
                                           std::string_view child_id);

// Words every pseudo-sentence may contain besides corpus tokens: "root",
// the two labels and ":".
std::vector<std::string> PseudoSentenceWords();

struct SubwordSequence {
  std::vector<int> ids;
  std::vector<int> segments;  // 0 through the [SEP], 1 after
  int truncated = 0;          // sentence subwords dropped
};

// Subword ids of the pair. While too long, drops the last subword of the
// longer sentence (the child's on ties); node words and labels are never
// dropped. Throws ConfigError if they alone exceed max_length.
SubwordSequence EncodePseudoSentencePair(const PseudoSentencePair& pair,
                                         const WordPieceVocab& vocab, int max_length);

// --- Linguistic features ---

// Layout: mention distance parent - child one-hot over -back..-1, +1..+forward
// and out-of-range; same sentence; child kind (EVENT, TIMEX) x parent kind
// (ROOT, DCT, TIMEX, EVENT); parent is DCT; parent is ROOT.
class FeatureLayout {
 public:
  explicit FeatureLayout(const WindowConfig& window);

  int dim() const { return window_.back + window_.forward + 1 + 1 + 8 + 2; }
  // -1 for distances outside the window (and for 0).
  int DistanceIndex(int distance) const;
  int out_of_range() const { return window_.back + window_.forward; }
  int same_sentence() const { return out_of_range() + 1; }
  int KindPair(MentionKind child, MentionKind parent) const;
  int parent_is_dct() const { return same_sentence() + 9; }
  int parent_is_root() const { return same_sentence() + 10; }

  nn::Vector Extract(const Document& doc, int parent, int child) const;

 private:
  WindowConfig window_;
};

// --- Vocabularies and pretrained vectors ---

class WordVocab {
 public:
  static constexpr std::string_view kUnknown = "<unk>";

  WordVocab();
  explicit WordVocab(std::vector<std::string> words);  // kUnknown is added if absent
  static WordVocab Build(std::span<const CorpusRecord> corpus);

  int Id(std::string_view word) const;  // unknown id if absent
  int size() const { return static_cast<int>(words_.size()); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
  int unknown_ = 0;
};

// Word vectors in the common text format: optional "<count> <dim>" header,
// then "<word> <v1> ... <vdim>" per line.
struct WordVectors {
  int dim = 0;
  std::unordered_map<std::string, nn::Vector> vectors;
};
// Throws ConfigError naming the file on bad input.
WordVectors LoadWordVectors(const std::filesystem::path& path);

// --- Encoders ---

// Per-document state built inside one graph.
struct DocumentState {
  virtual ~DocumentState() = default;
};

class PairEncoder {
 public:
  PairEncoder(EncoderConfig config, const WindowConfig& window)
      : config_(std::move(config)), features_(window) {}
  virtual ~PairEncoder() = default;

  const EncoderConfig& config() const { return config_; }
  const FeatureLayout& features() const { return features_; }
  // Width of the dense part; output_dim() adds the features.
  virtual int dense_dim() const = 0;
  int output_dim() const { return dense_dim() + features_.dim(); }

  virtual std::unique_ptr<DocumentState> Prepare(nn::Graph& g, const Document& doc) const = 0;

  // output_dim() x parents.size(), one column per candidate parent.
  nn::Expr EncodePairs(nn::Graph& g, DocumentState& state, const Document& doc, int child,
                       std::span<const int> parents) const;

 protected:
  virtual nn::Expr EncodeDense(nn::Graph& g, DocumentState& state, const Document& doc,
                               int child, std::span<const int> parents) const = 0;

 private:
  EncoderConfig config_;
  FeatureLayout features_;
};

struct EncoderResources {
  WordVocab vocab;                                  // recurrent variants
  const WordVectors* static_vectors = nullptr;      // STATIC_PRETRAINED_RECURRENT
  std::optional<ContextualCheckpoint> contextual;   // contextual variants
};

struct EncoderStats {
  int static_vectors_found = 0;  // vocabulary words initialized from vectors
};

// Creates parameters under "encoder/" (and "contextual/" for the
// contextual variants, frozen for FROZEN_CONTEXTUAL_RECURRENT). Throws
// ConfigError if a required resource is missing.
std::unique_ptr<PairEncoder> CreateEncoder(const EncoderConfig& config,
                                           const WindowConfig& window,
                                           const EncoderResources& resources,
                                           nn::ParameterCollection& params,
                                           std::mt19937_64& rng,
                                           EncoderStats* stats = nullptr);

// The contextual model inside an encoder, if any.
const ContextualModel* ContextualModelOf(const PairEncoder& encoder);
const WordVocab* WordVocabOf(const PairEncoder& encoder);

}  // namespace tdp

#endif  // TDP_ENCODER_H_
