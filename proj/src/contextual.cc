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

#include "tdp/contextual.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "tdp/errors.h"
#include "tdp/nn/serialize.h"

namespace tdp {

using nlohmann::json;

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(c));
  }
  return out;
}

bool IsContinuationByte(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

// UTF-8 code points of a string, as substrings.
std::vector<std::string> Characters(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i + 1;
    while (j < s.size() && IsContinuationByte(s[j])) ++j;
    out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

WordPieceVocab::WordPieceVocab(std::vector<std::string> tokens, bool lowercase)
    : tokens_(std::move(tokens)), lowercase_(lowercase) {
  for (int i = 0; i < size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw ConfigError("duplicate vocabulary entry \"" + tokens_[i] + "\"");
    }
  }
  unk_ = Id(kUnk);
  cls_ = Id(kCls);
  sep_ = Id(kSep);
  if (unk_ < 0 || cls_ < 0 || sep_ < 0) {
    throw ConfigError("vocabulary lacks [UNK], [CLS] or [SEP]");
  }
}

WordPieceVocab WordPieceVocab::Build(std::span<const std::vector<std::string>> sentences,
                                     int max_words, bool lowercase) {
  std::vector<std::string> tokens = {std::string(kPad), std::string(kUnk), std::string(kCls),
                                     std::string(kSep), std::string(kMask)};
  std::map<std::string, long> counts;
  std::map<std::string, int> chars;
  for (const auto& sentence : sentences) {
    for (const std::string& raw : sentence) {
      const std::string word = lowercase ? Lower(raw) : raw;
      ++counts[word];
      for (const std::string& c : Characters(word)) chars[c] = 1;
    }
  }
  std::unordered_map<std::string, int> seen;
  for (const auto& t : tokens) seen[t] = 1;
  auto push = [&](const std::string& t) {
    if (seen.emplace(t, 1).second) tokens.push_back(t);
  };
  for (const auto& [c, unused] : chars) {
    push(c);
    push("##" + c);
  }
  std::vector<std::pair<std::string, long>> words(counts.begin(), counts.end());
  std::stable_sort(words.begin(), words.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (int i = 0; i < std::min<int>(max_words, static_cast<int>(words.size())); ++i) {
    push(words[i].first);
  }
  return WordPieceVocab(std::move(tokens), lowercase);
}

int WordPieceVocab::Id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> WordPieceVocab::TokenizeWord(std::string_view raw) const {
  const std::string word = lowercase_ ? Lower(raw) : std::string(raw);
  if (word.empty() || word.size() > 100) return {unk_};
  std::vector<int> out;
  std::size_t start = 0;
  while (start < word.size()) {
    int found = -1;
    std::size_t end = word.size();
    for (; end > start; --end) {
      if (end < word.size() && IsContinuationByte(word[end])) continue;
      const std::string piece = (start > 0 ? "##" : "") + word.substr(start, end - start);
      found = Id(piece);
      if (found >= 0) break;
    }
    if (found < 0) return {unk_};
    out.push_back(found);
    start = end;
  }
  return out;
}

void ContextualConfig::Validate() const {
  if (hidden <= 0 || layers < 0 || heads <= 0 || ffn <= 0 || max_positions < 3) {
    throw ConfigError("contextual config: sizes must be positive");
  }
  if (hidden % heads != 0) {
    throw ConfigError("contextual config: hidden size " + std::to_string(hidden) +
                      " is not divisible by " + std::to_string(heads) + " heads");
  }
}

json ContextualConfig::ToJson() const {
  return json{{"hidden", hidden}, {"layers", layers}, {"heads", heads},
              {"ffn", ffn},       {"max_positions", max_positions}, {"lowercase", lowercase}};
}

ContextualConfig ContextualConfig::FromJson(const json& j, const std::string& source) {
  ContextualConfig c;
  try {
    c.hidden = j.at("hidden").get<int>();
    c.layers = j.at("layers").get<int>();
    c.heads = j.at("heads").get<int>();
    c.ffn = j.at("ffn").get<int>();
    c.max_positions = j.at("max_positions").get<int>();
    c.lowercase = j.at("lowercase").get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(source + ": bad contextual config (" + e.what() + ")");
  }
  c.Validate();
  return c;
}

ContextualModel::ContextualModel(ContextualConfig config, WordPieceVocab vocab,
                                 nn::ParameterCollection& params, std::mt19937_64& rng,
                                 const std::string& prefix)
    : config_(config), vocab_(std::move(vocab)), prefix_(prefix) {
  config_.Validate();
  const int h = config_.hidden;
  const std::string e = prefix_ + "/embeddings";
  word_ = &params.Add(e + "/word", h, vocab_.size(), nn::Init::kNormal, rng, 0.02);
  position_ = &params.Add(e + "/position", h, config_.max_positions, nn::Init::kNormal, rng, 0.02);
  token_type_ = &params.Add(e + "/token_type", h, 2, nn::Init::kNormal, rng, 0.02);
  embedding_norm_ = nn::LayerNorm::Create(params, e + "/norm", h, rng);
  for (int l = 0; l < config_.layers; ++l) {
    const std::string p = prefix_ + "/layer_" + std::to_string(l);
    Block b;
    b.query = nn::Linear::Create(params, p + "/attention/query", h, h, rng);
    b.key = nn::Linear::Create(params, p + "/attention/key", h, h, rng);
    b.value = nn::Linear::Create(params, p + "/attention/value", h, h, rng);
    b.output = nn::Linear::Create(params, p + "/attention/output", h, h, rng);
    b.attention_norm = nn::LayerNorm::Create(params, p + "/attention/norm", h, rng);
    b.ffn_in = nn::Linear::Create(params, p + "/ffn/in", h, config_.ffn, rng);
    b.ffn_out = nn::Linear::Create(params, p + "/ffn/out", config_.ffn, h, rng);
    b.output_norm = nn::LayerNorm::Create(params, p + "/ffn/norm", h, rng);
    blocks_.push_back(b);
  }
}

nn::Expr ContextualModel::Forward(nn::Graph& g, std::span<const int> ids,
                                  std::span<const int> segments) const {
  const int t = static_cast<int>(ids.size());
  if (t == 0 || t > config_.max_positions || segments.size() != ids.size()) {
    throw PreconditionError("contextual input of length " + std::to_string(t) +
                            " (max " + std::to_string(config_.max_positions) + ")");
  }
  for (int id : ids) {
    if (id < 0 || id >= vocab_.size()) throw PreconditionError("token id out of range");
  }
  std::vector<int> positions(t);
  std::iota(positions.begin(), positions.end(), 0);
  const nn::Expr parts[] = {nn::SelectCols(g.Param(*word_), ids),
                            nn::SelectCols(g.Param(*position_), positions),
                            nn::SelectCols(g.Param(*token_type_), segments)};
  nn::Expr x = embedding_norm_(g, nn::Sum(parts));

  const int heads = config_.heads;
  const int dh = config_.hidden / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  for (const Block& b : blocks_) {
    const nn::Expr q = b.query(g, x);
    const nn::Expr k = b.key(g, x);
    const nn::Expr v = b.value(g, x);
    std::vector<nn::Expr> contexts;
    for (int head = 0; head < heads; ++head) {
      const nn::Expr qh = nn::Rows(q, head * dh, dh);
      const nn::Expr kh = nn::Rows(k, head * dh, dh);
      const nn::Expr vh = nn::Rows(v, head * dh, dh);
      // scores(j, i): key j against query i; softmax over keys.
      const nn::Expr attn =
          nn::SoftmaxCols(nn::Scale(nn::MatMul(nn::Transpose(kh), qh), scale));
      contexts.push_back(nn::MatMul(vh, attn));
    }
    x = b.attention_norm(g, nn::Add(x, b.output(g, nn::ConcatRows(contexts))));
    x = b.output_norm(g, nn::Add(x, b.ffn_out(g, nn::Gelu(b.ffn_in(g, x)))));
  }
  return x;
}

nn::Matrix ContextualModel::EmbedWords(std::span<const std::string> words) const {
  nn::Matrix out(config_.hidden, static_cast<long>(words.size()));
  const int budget = config_.max_positions - 2;
  std::size_t next = 0;
  while (next < words.size()) {
    std::vector<int> ids = {vocab_.cls_id()};
    std::vector<std::pair<long, int>> firsts;  // (word index, token position)
    while (next < words.size()) {
      std::vector<int> pieces = vocab_.TokenizeWord(words[next]);
      const int used = static_cast<int>(ids.size()) - 1;
      if (used + static_cast<int>(pieces.size()) > budget) {
        if (used > 0) break;
        pieces.resize(budget);  // a single over-long word
      }
      firsts.emplace_back(static_cast<long>(next), static_cast<int>(ids.size()));
      ids.insert(ids.end(), pieces.begin(), pieces.end());
      ++next;
    }
    ids.push_back(vocab_.sep_id());
    const std::vector<int> segments(ids.size(), 0);
    nn::Graph g;
    const nn::Matrix& h = Forward(g, ids, segments).value();
    for (const auto& [word, pos] : firsts) out.col(word) = h.col(pos);
  }
  return out;
}

ContextualCheckpoint LoadContextualCheckpoint(const std::filesystem::path& path) {
  const std::string source = "contextual checkpoint " + path.string();
  std::ifstream in(path);
  if (!in) throw ConfigError(source + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(source + ": not valid JSON (" + e.what() + ")");
  }
  if (!j.is_object() || j.value("format", "") != "tdp-contextual") {
    throw ConfigError(source + ": not a tdp-contextual checkpoint");
  }
  ContextualCheckpoint ckpt;
  ckpt.config = ContextualConfig::FromJson(j.value("config", json::object()), source);
  try {
    ckpt.vocab = WordPieceVocab(j.at("vocab").get<std::vector<std::string>>(),
                                ckpt.config.lowercase);
    ckpt.parameters = j.at("parameters");
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return ckpt;
}

ContextualCheckpoint RandomContextualCheckpoint(const ContextualConfig& config,
                                                WordPieceVocab vocab, std::uint64_t seed) {
  nn::ParameterCollection params;
  std::mt19937_64 rng(seed);
  ContextualModel model(config, vocab, params, rng);
  return ContextualCheckpoint{config, std::move(vocab),
                              nn::ParametersToJson(params, model.prefix() + "/")};
}

void SaveContextualCheckpoint(const std::filesystem::path& path,
                              const ContextualCheckpoint& checkpoint) {
  json j{{"format", "tdp-contextual"},
         {"config", checkpoint.config.ToJson()},
         {"vocab", checkpoint.vocab.tokens()},
         {"parameters", checkpoint.parameters}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace tdp
