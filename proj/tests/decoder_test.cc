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

#include "tdp/decoder.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <tuple>

#include "tdp/errors.h"
#include "testing.h"

namespace tdp {
namespace {

using L = RelationLabel;

// Table over explicit (parent, label, probability) rows.
ScoreTable Table(int child, std::vector<ScoreRow> rows) {
  for (ScoreRow& r : rows) r.score = r.probability;
  return ScoreTable{child, std::move(rows)};
}

TEST(DecodeTest, OracleScoresReproduceGold) {
  const auto rec = testing::Example1();
  const auto tables = testing::OracleScoreTables(rec.doc, rec.tree, {});
  const DecodeResult out = Decode(rec.doc, tables);
  EXPECT_EQ(out.tree, rec.tree);
  EXPECT_EQ(out.trace.children_with_skip(), 0);
  EXPECT_EQ(out.tree.edges.front(), DeducedRootEdge(rec.doc));
}

TEST(DecodeTest, SingleMention) {
  const Document doc = testing::UniformDocument(1, MentionKind::kEvent);
  ScoreTable t = EmptyScoreTable(doc, GenerateCandidates(doc, 0, {}));
  NormalizeScores(t);
  const std::vector<ScoreTable> tables = {t};
  const DecodeResult out = Decode(doc, tables);
  ASSERT_EQ(out.tree.edges.size(), 2u);
  EXPECT_EQ(out.tree.edges[1].parent, "DCT");
  EXPECT_EQ(out.tree.edges[1].label, L::kBefore);  // label order breaks the tie
  EXPECT_TRUE(ValidateTree(out.tree, doc).empty());
}

TEST(DecodeTest, SkipsCycleExactlyOnce) {
  const auto [doc, tables] = testing::AdversarialCycleFixture();
  const DecodeResult out = Decode(doc, tables);
  ASSERT_EQ(out.trace.decisions.size(), 3u);
  EXPECT_EQ(out.trace.decisions[0].parent, 1);  // forward parent, not yet attached
  EXPECT_EQ(out.trace.decisions[1].parent, kDctOrder);
  EXPECT_EQ(out.trace.decisions[1].cycle_skips, 1);
  EXPECT_DOUBLE_EQ(out.trace.decisions[1].probability, 0.2);
  EXPECT_EQ(out.trace.children_with_skip(), 1);
  EXPECT_NEAR(out.trace.cycle_skip_fraction(), 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(ValidateTree(out.tree, doc).empty());
}

TEST(DecodeTest, TiesPreferEarlierParentThenLabelOrder) {
  const Document doc = testing::UniformDocument(3, MentionKind::kEvent);
  const std::vector<ScoreTable> tables = {
      Table(0, {{2, L::kAfter, 0, 0.5}, {kDctOrder, L::kOverlap, 0, 0.5}}),
      Table(1, {{2, L::kOverlap, 0, 0.5}, {2, L::kBefore, 0, 0.5}}),
      Table(2, {{kDctOrder, L::kBefore, 0, 1.0}}),
  };
  const DecodeResult out = Decode(doc, tables);
  EXPECT_EQ(out.trace.decisions[0].parent, kDctOrder);
  EXPECT_EQ(out.trace.decisions[1].label, L::kBefore);
}

TEST(DecodeTest, RejectsBadTables) {
  const auto rec = testing::Example1();
  auto tables = testing::OracleScoreTables(rec.doc, rec.tree, {});
  std::vector<ScoreTable> short_list(tables.begin(), tables.end() - 1);
  EXPECT_THROW(Decode(rec.doc, short_list), PreconditionError);

  auto swapped = tables;
  std::swap(swapped[0], swapped[1]);
  EXPECT_THROW(Decode(rec.doc, swapped), PreconditionError);

  auto illegal = tables;
  illegal[2].rows.push_back({kDctOrder, L::kDependsOn, 99, 1.0});  // event -> DEPENDS_ON
  EXPECT_THROW(Decode(rec.doc, illegal), PreconditionError);

  auto empty = tables;
  empty[3].rows.clear();
  EXPECT_THROW(Decode(rec.doc, empty), PreconditionError);
}

TEST(DecodeTest, FuzzedScoresAlwaysGiveValidTrees) {
  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<int> wdist(0, 4);
  for (int trial = 0; trial < 1000; ++trial) {
    const Document doc = testing::RandomDocument(rng, {.max_mentions = 20});
    const WindowConfig window{wdist(rng) + 1, wdist(rng)};
    const auto tables = testing::RandomScoreTables(doc, window, rng);
    const DecodeResult out = Decode(doc, tables);
    ASSERT_TRUE(ValidateTree(out.tree, doc).empty()) << trial;
    ASSERT_EQ(out.tree.edges.size(), static_cast<std::size_t>(doc.num_mentions() + 1));
    ASSERT_EQ(out.trace.decisions.size(), static_cast<std::size_t>(doc.num_mentions()));
  }
}

TEST(DecodeTest, MatchesReferenceOnSmallDocuments) {
  std::mt19937_64 rng(6);
  int with_skips = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Document doc =
        testing::RandomDocument(rng, {.max_mentions = 6, .event_probability = 0.8});
    const auto tables = testing::RandomScoreTables(doc, {10, 3}, rng);
    const DecodeResult out = Decode(doc, tables);
    ASSERT_EQ(out.tree.edges, testing::ReferenceDecode(doc, tables).edges) << trial;
    with_skips += out.trace.children_with_skip() > 0;
    // Each committed row is the best acyclic one: nothing ranked above it
    // survives except via a cycle skip.
    for (const ChildDecision& d : out.trace.decisions) {
      const auto ranked = RankRows(tables[d.child]);
      const ScoreRow& chosen = tables[d.child].rows[ranked[d.cycle_skips]];
      ASSERT_EQ(chosen.parent, d.parent);
      ASSERT_EQ(chosen.label, d.label);
    }
  }
  EXPECT_GT(with_skips, 0);
}

TEST(CycleSkipRateTest, AggregatesAcrossDocuments) {
  DecodeTrace clean;
  clean.decisions.resize(5);
  std::vector<DecodeTrace> traces(5, clean);
  EXPECT_DOUBLE_EQ(CycleSkipRate(traces), 0.0);
  traces[3].decisions[2].cycle_skips = 2;
  EXPECT_DOUBLE_EQ(CycleSkipRate(traces), 0.04);
  std::vector<DecodeTrace> none(3);
  EXPECT_THROW(CycleSkipRate(none), PreconditionError);
  EXPECT_EQ(DecodeTrace{}.cycle_skip_fraction(), 0.0);
}

TEST(FormatTreeTest, IndentedAndDot) {
  const auto rec = testing::Example1();
  const std::string text = FormatTreeIndented(rec.doc, rec.tree);
  EXPECT_NE(text.find("ROOT\n"), std::string::npos) << text;
  EXPECT_NE(text.find("\n        after: create [create]\n"), std::string::npos) << text;
  const std::string dot = FormatTreeDot(rec.doc, rec.tree);
  EXPECT_EQ(dot.rfind("digraph", 0), 0u) << dot;
}

TEST(ScoreTableJsonTest, RoundTripsAndRejectsBadRows) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const Document doc = testing::RandomDocument(rng, {.max_mentions = 8});
    const auto tables = testing::RandomScoreTables(doc, WindowConfig{}, rng);
    const auto back = ScoreTablesFromJson(doc, ScoreTablesToJson(doc, tables));
    ASSERT_EQ(back.size(), tables.size());
    for (std::size_t c = 0; c < tables.size(); ++c) {
      ASSERT_EQ(back[c].child, tables[c].child);
      ASSERT_EQ(back[c].rows.size(), tables[c].rows.size());
      for (std::size_t i = 0; i < tables[c].rows.size(); ++i) {
        ASSERT_EQ(back[c].rows[i].parent, tables[c].rows[i].parent);
        ASSERT_EQ(back[c].rows[i].label, tables[c].rows[i].label);
        ASSERT_EQ(back[c].rows[i].score, tables[c].rows[i].score);
        ASSERT_NEAR(back[c].rows[i].probability, tables[c].rows[i].probability, 1e-12);
      }
    }
  }
  const auto rec = testing::Example1();
  const auto tables = testing::OracleScoreTables(rec.doc, rec.tree, WindowConfig{});
  auto j = ScoreTablesToJson(rec.doc, tables);
  auto unknown = j;
  unknown["tables"][0]["rows"][0]["parent"] = "nobody";
  EXPECT_THROW(ScoreTablesFromJson(rec.doc, unknown), PreconditionError);
  auto illegal = j;
  illegal["tables"][0]["rows"][0]["label"] = "depends_on";  // signed -> DCT
  EXPECT_THROW(ScoreTablesFromJson(rec.doc, illegal), PreconditionError);
  auto missing = j;
  missing["tables"][0].erase("rows");
  EXPECT_THROW(ScoreTablesFromJson(rec.doc, missing), ConfigError);
  auto other = j;
  other["doc_id"] = "other";
  EXPECT_THROW(ScoreTablesFromJson(rec.doc, other), ConfigError);
}

}  // namespace
}  // namespace tdp
