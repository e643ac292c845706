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

#include <gtest/gtest.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "tdp/errors.h"
#include "tdp/nn/serialize.h"

namespace tdp {
namespace {

using Sentences = std::vector<std::vector<std::string>>;

WordPieceVocab ToyVocab() {
  return WordPieceVocab({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "un", "unaff", "##aff",
                         "##able", "a", "##b", "é", "##é", "the"},
                        true);
}

std::vector<std::string> Pieces(const WordPieceVocab& v, std::string_view word) {
  std::vector<std::string> out;
  for (int id : v.TokenizeWord(word)) out.push_back(v.tokens()[id]);
  return out;
}

TEST(WordPieceTest, GreedyLongestMatchFirst) {
  const WordPieceVocab v = ToyVocab();
  EXPECT_EQ(Pieces(v, "unaffable"), (std::vector<std::string>{"unaff", "##able"}));
  EXPECT_EQ(Pieces(v, "UNAFF"), (std::vector<std::string>{"unaff"}));
  EXPECT_EQ(Pieces(v, "abb"), (std::vector<std::string>{"a", "##b", "##b"}));
  EXPECT_EQ(Pieces(v, "éé"), (std::vector<std::string>{"é", "##é"}));
  EXPECT_EQ(Pieces(v, "unx"), (std::vector<std::string>{"[UNK]"}));
  EXPECT_EQ(Pieces(v, ""), (std::vector<std::string>{"[UNK]"}));
  EXPECT_EQ(v.Id("missing"), -1);
}

TEST(WordPieceTest, RequiresSpecialTokens) {
  EXPECT_THROW(WordPieceVocab({"a", "b"}, false), ConfigError);
}

TEST(WordPieceTest, BuiltVocabularyCoversEveryCharacter) {
  const Sentences text = {{"Kuchma", "signed", "a", "plan"}, {"naïve", "signed", "27,"}};
  const WordPieceVocab v = WordPieceVocab::Build(text, 1, false);
  EXPECT_GE(v.Id("signed"), 0);  // the most frequent word
  EXPECT_EQ(v.Id("plan"), -1);
  for (const auto& s : text) {
    for (const auto& w : s) {
      const auto ids = v.TokenizeWord(w);
      EXPECT_TRUE(std::find(ids.begin(), ids.end(), v.unk_id()) == ids.end()) << w;
    }
  }
  EXPECT_EQ(v.tokens(), WordPieceVocab::Build(text, 1, false).tokens());
}

ContextualConfig TinyConfig() {
  ContextualConfig c;
  c.hidden = 6;
  c.layers = 2;
  c.heads = 2;
  c.ffn = 5;
  c.max_positions = 12;
  return c;
}

TEST(ContextualConfigTest, ValidatesAndRoundTrips) {
  ContextualConfig c = TinyConfig();
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(ContextualConfig::FromJson(c.ToJson(), "test").ToJson(), c.ToJson());
  c.heads = 4;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(ContextualModelTest, ForwardShapeAndLayerNormedOutput) {
  nn::ParameterCollection pc;
  std::mt19937_64 rng(1);
  const ContextualModel model(TinyConfig(), ToyVocab(), pc, rng);
  const std::vector<int> ids = {2, 5, 8, 3, 9, 13};
  const std::vector<int> segments = {0, 0, 0, 0, 1, 1};
  nn::Graph g;
  const nn::Matrix h = model.Forward(g, ids, segments).value();
  ASSERT_EQ(h.rows(), 6);
  ASSERT_EQ(h.cols(), 6);
  // gamma = 1 and beta = 0 at initialization.
  for (int t = 0; t < h.cols(); ++t) EXPECT_NEAR(h.col(t).mean(), 0.0, 1e-9);

  nn::Graph g2;
  const std::vector<int> too_long(13, 5);
  const std::vector<int> too_long_segments(13, 0);
  EXPECT_THROW(model.Forward(g2, too_long, too_long_segments), PreconditionError);
}

// Central differences through embeddings, attention, feed-forward and
// normalization layers.
TEST(ContextualModelTest, GradientsMatchFiniteDifferences) {
  nn::ParameterCollection pc;
  std::mt19937_64 rng(2);
  const ContextualModel model(TinyConfig(), ToyVocab(), pc, rng);
  const std::vector<int> ids = {2, 5, 8, 5, 3, 9, 13};
  const std::vector<int> segments = {0, 0, 0, 0, 0, 1, 1};
  const nn::Matrix weights = nn::Matrix::Random(6, 7);
  auto loss = [&](nn::Graph& g) {
    return nn::SumAll(nn::CwiseProduct(model.Forward(g, ids, segments), g.Input(weights)));
  };
  pc.ZeroGrad();
  {
    nn::Graph g;
    g.Backward(loss(g));
  }
  double worst = 0.0;
  int checked = 0;
  for (const auto& p : pc.all()) {
    for (long i = 0; i < p->value.size(); i += 1 + p->value.size() / 6) {
      const double saved = p->value.data()[i];
      const double h = 1e-6;
      p->value.data()[i] = saved + h;
      nn::Graph gp;
      const double up = loss(gp).scalar();
      p->value.data()[i] = saved - h;
      nn::Graph gm;
      const double down = loss(gm).scalar();
      p->value.data()[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = p->grad.data()[i];
      const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-4});
      worst = std::max(worst, std::abs(numeric - analytic) / scale);
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
  EXPECT_LT(worst, 1e-4);
}

TEST(ContextualModelTest, EmbedWordsSplitsLongSentencesIntoWindows) {
  nn::ParameterCollection pc;
  std::mt19937_64 rng(3);
  const ContextualModel model(TinyConfig(), ToyVocab(), pc, rng);
  // max_positions 12 leaves 10 subwords per window.
  std::vector<std::string> words(15, "unaffable");  // two subwords each
  const nn::Matrix all = model.EmbedWords(words);
  ASSERT_EQ(all.cols(), 15);
  const std::vector<std::string> first(words.begin(), words.begin() + 5);
  EXPECT_TRUE(all.leftCols(5).isApprox(model.EmbedWords(first)));
  const std::vector<std::string> second(words.begin() + 5, words.begin() + 10);
  EXPECT_TRUE(all.middleCols(5, 5).isApprox(model.EmbedWords(second)));
  EXPECT_EQ(model.EmbedWords(std::vector<std::string>{}).cols(), 0);
}

TEST(ContextualCheckpointTest, SaveLoadRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("tdp_contextual_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const ContextualCheckpoint ckpt = RandomContextualCheckpoint(TinyConfig(), ToyVocab(), 7);
  SaveContextualCheckpoint(dir / "model.json", ckpt);
  const ContextualCheckpoint back = LoadContextualCheckpoint(dir / "model.json");
  EXPECT_EQ(back.config.ToJson(), ckpt.config.ToJson());
  EXPECT_EQ(back.vocab.tokens(), ckpt.vocab.tokens());
  EXPECT_EQ(back.parameters, ckpt.parameters);

  nn::ParameterCollection pc;
  std::mt19937_64 rng(99);
  const ContextualModel model(back.config, back.vocab, pc, rng);
  nn::AssignParameters(pc, back.parameters, "contextual/", "test");
  const std::vector<std::string> words = {"the", "unaffable"};
  nn::ParameterCollection pc2;
  const ContextualModel model2(ckpt.config, ckpt.vocab, pc2, rng);
  nn::AssignParameters(pc2, ckpt.parameters, "contextual/", "test");
  EXPECT_EQ(model.EmbedWords(words), model2.EmbedWords(words));

  std::ofstream(dir / "garbage.json") << "{not json";
  std::ofstream(dir / "other.json") << R"({"format": "something-else"})";
  for (const char* name : {"garbage.json", "other.json", "missing.json"}) {
    try {
      LoadContextualCheckpoint(dir / name);
      ADD_FAILURE() << name;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(name), std::string::npos) << e.what();
    }
  }

  auto broken = ckpt;
  broken.parameters.erase(broken.parameters.begin());
  nn::ParameterCollection pc3;
  const ContextualModel model3(broken.config, broken.vocab, pc3, rng);
  EXPECT_THROW(nn::AssignParameters(pc3, broken.parameters, "contextual/", "test"), ConfigError);
  std::filesystem::remove_all(dir);
}

// A tiny random BERT converted by tools/convert_bert_checkpoint.py, with
// hidden states computed by the reference implementation
// (tests/data/make_bert_fixture.py regenerates it).
TEST(ContextualModelTest, MatchesConvertedReferenceModel) {
  std::ifstream in(TDP_TEST_DATA_DIR "/bert_fixture.json");
  ASSERT_TRUE(in);
  const nlohmann::json fixture = nlohmann::json::parse(in);
  const auto dir = std::filesystem::temp_directory_path() /
                   ("tdp_bert_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bert.json") << fixture.at("checkpoint").dump();
  const ContextualCheckpoint ckpt = LoadContextualCheckpoint(dir / "bert.json");
  std::filesystem::remove_all(dir);

  nn::ParameterCollection pc;
  std::mt19937_64 rng(1);
  const ContextualModel model(ckpt.config, ckpt.vocab, pc, rng);
  nn::AssignParameters(pc, ckpt.parameters, "contextual/", "fixture");
  const auto ids = fixture.at("ids").get<std::vector<int>>();
  const auto segments = fixture.at("segments").get<std::vector<int>>();
  const auto expected = fixture.at("hidden").get<std::vector<std::vector<double>>>();
  nn::Graph g;
  const nn::Matrix h = model.Forward(g, ids, segments).value();
  ASSERT_EQ(h.rows(), static_cast<long>(expected.size()));
  ASSERT_EQ(h.cols(), static_cast<long>(ids.size()));
  for (long r = 0; r < h.rows(); ++r) {
    for (long c = 0; c < h.cols(); ++c) EXPECT_NEAR(h(r, c), expected[r][c], 1e-9) << r << "," << c;
  }
  EXPECT_EQ(ckpt.vocab.TokenizeWord("signeds"),
            (std::vector<int>{ckpt.vocab.Id("signed"), ckpt.vocab.Id("##s")}));
}

}  // namespace
}  // namespace tdp
