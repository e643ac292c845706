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

#include "tdp/evaluator.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "tdp/errors.h"
#include "testing.h"

namespace tdp {
namespace {

using L = RelationLabel;

TemporalDependencyTree Relabel(TemporalDependencyTree tree, const std::string& child,
                               RelationLabel label) {
  for (Edge& e : tree.edges) {
    if (e.child == child) e.label = label;
  }
  return tree;
}

TEST(EvaluateTest, IdenticalTreesScorePerfectly) {
  const auto rec = testing::Example1();
  const EvalReport r = EvaluateDocument(rec.doc, rec.tree, rec.tree);
  EXPECT_EQ(r.edges.gold, 7);
  EXPECT_EQ(r.edges_with_root.gold, 8);
  EXPECT_DOUBLE_EQ(r.f1(), 1.0);
  EXPECT_DOUBLE_EQ(r.unlabeled_f1(), 1.0);
  EXPECT_DOUBLE_EQ(r.accuracy(), 1.0);
  EXPECT_DOUBLE_EQ(r.f1_with_root_edge(), 1.0);
}

TEST(EvaluateTest, OneWrongLabel) {
  const auto rec = testing::Example1();
  const auto pred = Relabel(rec.tree, "create", L::kBefore);
  const EvalReport r = EvaluateDocument(rec.doc, pred, rec.tree);
  EXPECT_NEAR(r.f1(), 6.0 / 7.0, 1e-12);
  EXPECT_NEAR(r.f1_with_root_edge(), 7.0 / 8.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.unlabeled_f1(), 1.0);
  EXPECT_EQ(r.category(ParentCategory::kEvent).total, 2);
  EXPECT_EQ(r.category(ParentCategory::kEvent).correct, 1);
  EXPECT_EQ(r.category(ParentCategory::kDct).correct, 3);
  EXPECT_EQ(r.category(ParentCategory::kTimex).correct, 1);
  EXPECT_EQ(r.category(ParentCategory::kRoot).total, 1);
}

TEST(EvaluateTest, EmptyDocumentIsPerfect) {
  Document doc("empty", "today", {}, {});
  TemporalDependencyTree tree{"empty", {DeducedRootEdge(doc)}};
  const EvalReport r = EvaluateDocument(doc, tree, tree);
  EXPECT_EQ(r.edges.gold, 0);
  EXPECT_DOUBLE_EQ(r.f1(), 1.0);
}

TEST(EvaluateTest, DocumentSetMismatchIsIdentityError) {
  const auto rec = testing::Example1();
  std::vector<CorpusRecord> gold = {rec};
  std::vector<TemporalDependencyTree> pred = {rec.tree};
  pred[0].doc_id = "other";
  EXPECT_THROW(Evaluate(pred, gold), IdentityError);
  std::vector<TemporalDependencyTree> none;
  EXPECT_THROW(Evaluate(none, gold), IdentityError);
  EXPECT_THROW(EvaluateDocument(rec.doc, pred[0], rec.tree), IdentityError);
}

TEST(EvaluateTest, F1EqualsAccuracyForCompleteTrees) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const Document doc = testing::RandomDocument(rng, {.max_mentions = 15});
    const auto gold = testing::RandomTree(doc, rng);
    const auto pred = testing::RandomTree(doc, rng);
    const EvalReport r = EvaluateDocument(doc, pred, gold);
    ASSERT_EQ(r.edges.predicted, r.edges.gold);
    ASSERT_NEAR(r.f1(), r.accuracy(), 1e-12);
    ASSERT_LE(r.f1(), r.unlabeled_f1());
  }
}

TEST(EvaluateTest, MicroAverageSumsDocumentCounts) {
  std::mt19937_64 rng(78);
  std::vector<CorpusRecord> gold;
  std::vector<TemporalDependencyTree> pred;
  EdgeCounts expected;
  long category_total = 0;
  for (int i = 0; i < 30; ++i) {
    gold.push_back(testing::RandomRecord(rng, {}, "d" + std::to_string(i)));
    pred.push_back(testing::RandomTree(gold.back().doc, rng));
    const EvalReport one = EvaluateDocument(gold.back().doc, pred.back(), gold.back().tree);
    expected += one.edges;
    for (const auto& c : one.categories) category_total += c.total;
  }
  std::reverse(pred.begin(), pred.end());  // pairing is by doc_id
  const EvalReport r = Evaluate(pred, gold);
  EXPECT_EQ(r.documents, 30);
  EXPECT_EQ(r.edges.gold, expected.gold);
  EXPECT_EQ(r.edges.correct, expected.correct);
  EXPECT_EQ(r.edges.parent_correct, expected.parent_correct);
  EXPECT_EQ(category_total, r.edges.gold);
}

TEST(CategoryBreakdownDeltaTest, SubtractsPerCategory) {
  EvalReport a, b;
  auto set = [](EvalReport& r, ParentCategory c, long total, long correct) {
    r.categories[static_cast<int>(c)] = {total, correct};
  };
  set(a, ParentCategory::kDct, 10, 5);
  set(b, ParentCategory::kDct, 10, 6);
  set(a, ParentCategory::kTimex, 10, 2);
  set(b, ParentCategory::kTimex, 10, 4);
  set(a, ParentCategory::kEvent, 10, 5);
  set(b, ParentCategory::kEvent, 10, 4);
  const CategoryDelta d = CategoryBreakdownDelta(a, b);
  EXPECT_NEAR(d[ParentCategory::kDct], 0.1, 1e-12);
  EXPECT_NEAR(d[ParentCategory::kTimex], 0.2, 1e-12);
  EXPECT_NEAR(d[ParentCategory::kEvent], -0.1, 1e-12);
  EXPECT_EQ(d[ParentCategory::kRoot], 0.0);
}

TEST(FormatReportTest, JsonHasHeadlineFields) {
  const auto rec = testing::Example1();
  const std::string json = FormatReportJson(EvaluateDocument(rec.doc, rec.tree, rec.tree));
  EXPECT_NE(json.find("\"f1\":1.0"), std::string::npos) << json;
  EXPECT_NE(json.find("\"f1_with_root_edge\""), std::string::npos);
}

}  // namespace
}  // namespace tdp
