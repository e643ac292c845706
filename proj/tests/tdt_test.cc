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

#include "tdp/tdt.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "tdp/errors.h"
#include "testing.h"

namespace tdp {
namespace {

bool HasKind(const ValidationReport& report, Violation::Kind kind) {
  return std::any_of(report.begin(), report.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

bool HasMessage(const ValidationReport& report, const std::string& text) {
  return std::any_of(report.begin(), report.end(), [&](const Violation& v) {
    return v.message.find(text) != std::string::npos;
  });
}

TEST(LabelTest, WireNamesRoundTrip) {
  for (RelationLabel l : kAllLabels) EXPECT_EQ(ParseLabel(LabelName(l)), l);
  EXPECT_EQ(LabelName(RelationLabel::kDependsOn), "depends_on");
  EXPECT_FALSE(ParseLabel("includes").has_value());
  EXPECT_FALSE(ParseLabel("BEFORE").has_value());
}

TEST(DocumentTest, AssignsOrderAndSynthesizesRootAndDct) {
  const auto rec = testing::Example1();
  const Document& doc = rec.doc;
  EXPECT_EQ(doc.num_mentions(), 7);
  EXPECT_EQ(doc.root().document_order, kRootOrder);
  EXPECT_EQ(doc.dct().document_order, kDctOrder);
  EXPECT_EQ(doc.dct_text(), "March 1, 1998");
  EXPECT_EQ(doc.OrderOf("called"), 4);
  EXPECT_EQ(doc.node(1).id, "feb_27_1998");
  EXPECT_EQ(doc.Find("ROOT")->kind, MentionKind::kRoot);
  EXPECT_EQ(doc.Find("nope"), nullptr);
}

TEST(DocumentTest, SortsMentionsStablyBySentenceThenStart) {
  std::vector<Mention> mentions = {
      {"b", MentionKind::kEvent, "y", 1, {0, 1}, 0},
      {"a", MentionKind::kEvent, "x", 0, {1, 2}, 0},
      {"tie1", MentionKind::kEvent, "x", 0, {0, 1}, 0},
      {"tie2", MentionKind::kTimex, "x", 0, {0, 2}, 0},
  };
  Document doc("d", "now", {{"x", "x"}, {"y"}}, mentions);
  ASSERT_EQ(doc.num_mentions(), 4);
  EXPECT_EQ(doc.node(0).id, "tie1");
  EXPECT_EQ(doc.node(1).id, "tie2");
  EXPECT_EQ(doc.node(2).id, "a");
  EXPECT_EQ(doc.node(3).id, "b");
}

TEST(DocumentTest, RejectsBadSpansAndIds) {
  auto make = [](Mention m) {
    return Document("d", "now", {{"a", "b"}}, {std::move(m)});
  };
  EXPECT_THROW(make({"m", MentionKind::kEvent, "a", 0, {1, 1}, 0}), ValidationError);
  EXPECT_THROW(make({"m", MentionKind::kEvent, "a", 0, {0, 3}, 0}), ValidationError);
  EXPECT_THROW(make({"m", MentionKind::kEvent, "a", 1, {0, 1}, 0}), ValidationError);
  EXPECT_THROW(make({"DCT", MentionKind::kEvent, "a", 0, {0, 1}, 0}), ValidationError);
  EXPECT_THROW(make({"m", MentionKind::kDct, "a", 0, {0, 1}, 0}), ValidationError);
  EXPECT_THROW(Document("d", "now", {{"a", "b"}},
                        {{"m", MentionKind::kEvent, "a", 0, {0, 1}, 0},
                         {"m", MentionKind::kEvent, "b", 0, {1, 2}, 0}}),
               ValidationError);
}

TEST(EdgeConstraintTest, LegalLabelTable) {
  using K = MentionKind;
  EXPECT_EQ(LegalLabels(K::kEvent, K::kDct).size(), 3u);
  EXPECT_EQ(LegalLabels(K::kEvent, K::kEvent).size(), 3u);
  EXPECT_TRUE(LegalLabels(K::kEvent, K::kRoot).empty());
  EXPECT_EQ(LegalLabels(K::kTimex, K::kRoot),
            std::vector<RelationLabel>{RelationLabel::kDependsOn});
  EXPECT_EQ(LegalLabels(K::kTimex, K::kTimex).size(), 1u);
  EXPECT_TRUE(LegalLabels(K::kTimex, K::kDct).empty());
  EXPECT_TRUE(LegalLabels(K::kTimex, K::kEvent).empty());
  EXPECT_TRUE(LegalLabels(K::kDct, K::kTimex).empty());
  EXPECT_TRUE(IsLegalEdge(K::kDct, K::kRoot, RelationLabel::kDependsOn));
  EXPECT_FALSE(IsLegalEdge(K::kEvent, K::kEvent, RelationLabel::kDependsOn));
}

TEST(ValidateTreeTest, Example1IsValid) {
  const auto rec = testing::Example1();
  EXPECT_TRUE(ValidateTree(rec.tree, rec.doc).empty());
  EXPECT_EQ(rec.tree.edges.size(), 8u);
}

TEST(ValidateTreeTest, DocIdMismatchIsIdentityError) {
  auto rec = testing::Example1();
  rec.tree.doc_id = "other";
  EXPECT_THROW(ValidateTree(rec.tree, rec.doc), IdentityError);
}

TEST(ValidateTreeTest, TwoCycleIsReported) {
  Document doc = testing::UniformDocument(2, MentionKind::kEvent);
  TemporalDependencyTree tree{doc.doc_id(),
                              {DeducedRootEdge(doc),
                               {"m0", "m1", RelationLabel::kBefore},
                               {"m1", "m0", RelationLabel::kAfter}}};
  const auto report = ValidateTree(tree, doc);
  EXPECT_TRUE(HasKind(report, Violation::Kind::kCycle));
}

TEST(ValidateTreeTest, DeletingAnyEdgeIsReported) {
  const auto rec = testing::Example1();
  for (std::size_t i = 0; i < rec.tree.edges.size(); ++i) {
    auto tree = rec.tree;
    const Edge removed = tree.edges[i];
    tree.edges.erase(tree.edges.begin() + static_cast<long>(i));
    const auto report = ValidateTree(tree, rec.doc);
    EXPECT_TRUE(HasMessage(report, removed.child + " has no parent")) << removed.child;
    EXPECT_TRUE(HasKind(report, Violation::Kind::kEdgeCount));
  }
  auto tree = rec.tree;
  std::erase_if(tree.edges, [](const Edge& e) { return e.child == "signed"; });
  EXPECT_TRUE(HasMessage(ValidateTree(tree, rec.doc), "signed has no parent"));
}

TEST(ValidateTreeTest, ReportsEachKindOfViolation) {
  const auto rec = testing::Example1();
  auto with = [&](auto mutate) {
    auto tree = rec.tree;
    mutate(tree);
    return ValidateTree(tree, rec.doc);
  };
  EXPECT_TRUE(HasKind(with([](auto& t) { t.edges[1].parent = "ghost"; }),
                      Violation::Kind::kUnknownNode));
  EXPECT_TRUE(HasKind(with([](auto& t) { t.edges[1].parent = "signed"; }),
                      Violation::Kind::kSelfLoop));
  EXPECT_TRUE(HasKind(with([](auto& t) {
                        t.edges.push_back({"ROOT", "DCT", RelationLabel::kDependsOn});
                      }),
                      Violation::Kind::kRootHasParent));
  EXPECT_TRUE(HasKind(with([](auto& t) { t.edges[3].parent = "ROOT"; }),
                      Violation::Kind::kIllegalParentKind));
  EXPECT_TRUE(HasKind(with([](auto& t) { t.edges[3].label = RelationLabel::kDependsOn; }),
                      Violation::Kind::kIllegalLabel));
  EXPECT_TRUE(HasKind(with([](auto& t) { t.edges.push_back(t.edges[3]); }),
                      Violation::Kind::kMultipleParents));
  // An event may not sit directly under ROOT.
  EXPECT_FALSE(with([](auto& t) { t.edges[4].parent = "ROOT"; }).empty());
  // DCT is pinned to ROOT.
  EXPECT_TRUE(HasKind(with([](auto& t) { t.edges[0].parent = "feb_27_1998"; }),
                      Violation::Kind::kIllegalParentKind));
}

// Every corruption that breaks an invariant by construction must be caught.
TEST(ValidateTreeTest, MutationsOfRandomTreesAreDetected) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rec = testing::RandomRecord(rng, {.max_mentions = 10, .min_mentions = 1});
    ASSERT_TRUE(ValidateTree(rec.tree, rec.doc).empty());
    for (std::size_t i = 0; i < rec.tree.edges.size(); ++i) {
      const Edge& e = rec.tree.edges[i];
      std::vector<TemporalDependencyTree> corrupted;
      auto mutate = [&](auto fn) {
        auto t = rec.tree;
        fn(t.edges[i]);
        corrupted.push_back(std::move(t));
      };
      mutate([](Edge& x) { x.parent = "nowhere"; });
      mutate([](Edge& x) { x.child = "nobody"; });
      mutate([](Edge& x) { x.parent = x.child; });
      mutate([&](Edge& x) {
        x.label = e.label == RelationLabel::kDependsOn ? RelationLabel::kOverlap
                                                       : RelationLabel::kDependsOn;
      });
      for (const Edge& other : rec.tree.edges) {
        if (other.child != e.child) {
          mutate([&](Edge& x) { x.child = other.child; });
          break;
        }
      }
      {
        auto t = rec.tree;
        t.edges.erase(t.edges.begin() + static_cast<long>(i));
        corrupted.push_back(std::move(t));
      }
      for (const auto& t : corrupted) {
        EXPECT_FALSE(ValidateTree(t, rec.doc).empty()) << "trial " << trial << " edge " << i;
      }
    }
  }
}

TEST(WouldCreateCycleTest, SpecExamples) {
  ParentMap parents;
  EXPECT_FALSE(WouldCreateCycle(parents, "A", "ROOT"));
  parents = {{"B", "A"}};
  EXPECT_TRUE(WouldCreateCycle(parents, "A", "B"));
  parents = {{"C", "B"}, {"B", "A"}};
  EXPECT_TRUE(WouldCreateCycle(parents, "A", "C"));
  EXPECT_FALSE(WouldCreateCycle(parents, "C", "A"));
  EXPECT_FALSE(WouldCreateCycle(parents, "A", "unknown"));
  parents = {{"DCT", "ROOT"}, {"x", "DCT"}};
  EXPECT_FALSE(WouldCreateCycle(parents, "y", "ROOT"));
}

// Brute-force transitive reachability over the parent relation.
std::vector<std::vector<char>> ReachabilityClosure(const std::vector<int>& parent) {
  const int n = static_cast<int>(parent.size());
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    reach[i][i] = 1;
    if (parent[i] != kNoParent) reach[i][parent[i]] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = 1;
  return reach;
}

void CheckAllQueries(const std::vector<int>& parent) {
  const int n = static_cast<int>(parent.size());
  ParentMap as_map;
  for (int i = 0; i < n; ++i) {
    if (parent[i] != kNoParent) as_map[std::to_string(i)] = std::to_string(parent[i]);
  }
  const auto reach = ReachabilityClosure(parent);
  for (int child = 0; child < n; ++child) {
    for (int p = 0; p < n; ++p) {
      const bool expected = reach[p][child];
      ASSERT_EQ(WouldCreateCycle(parent, child, p), expected);
      ASSERT_EQ(WouldCreateCycle(as_map, std::to_string(child), std::to_string(p)), expected);
    }
  }
}

TEST(WouldCreateCycleTest, AgreesWithClosureOracleExhaustivelyUpToSixNodes) {
  for (int n = 1; n <= 6; ++n) {
    std::vector<int> parent(n, kNoParent);
    // Odometer over parent[i] in {kNoParent, 0..n-1} \ {i}.
    while (true) {
      CheckAllQueries(parent);
      int i = 0;
      for (; i < n; ++i) {
        int next = parent[i] + 1;
        if (next == i) ++next;
        if (next < n) {
          parent[i] = next;
          break;
        }
        parent[i] = kNoParent;
      }
      if (i == n) break;
    }
  }
}

TEST(WouldCreateCycleTest, AgreesWithClosureOracleOnRandomSevenAndEightNodeSets) {
  std::mt19937_64 rng(11);
  for (int n : {7, 8}) {
    std::uniform_int_distribution<int> pick(-1, n - 1);
    for (int trial = 0; trial < 3000; ++trial) {
      std::vector<int> parent(n);
      for (int i = 0; i < n; ++i) {
        int p = pick(rng);
        parent[i] = p == i ? kNoParent : p;
      }
      CheckAllQueries(parent);
    }
  }
}

TEST(DeducedRootEdgeTest, IsDctToRootDependsOn) {
  const auto rec = testing::Example1();
  const Edge e = DeducedRootEdge(rec.doc);
  EXPECT_EQ(e, (Edge{"DCT", "ROOT", RelationLabel::kDependsOn}));
  EXPECT_TRUE(IsLegalEdge(MentionKind::kDct, MentionKind::kRoot, e.label));

  Document empty("empty", "today", {}, {});
  TemporalDependencyTree tree{"empty", {DeducedRootEdge(empty)}};
  EXPECT_EQ(tree.edges.size(), 1u);
  EXPECT_TRUE(ValidateTree(tree, empty).empty());
}

TEST(TreePropertyTest, ParentChainsReachRootWithinEdgeCount) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto rec = testing::RandomRecord(rng);
    for (int order = kDctOrder; order < rec.doc.num_mentions(); ++order) {
      std::string cur = rec.doc.node(order).id;
      std::size_t steps = 0;
      while (cur != kRootId) {
        const Edge* e = rec.tree.ParentEdge(cur);
        ASSERT_NE(e, nullptr);
        cur = e->parent;
        ASSERT_LE(++steps, rec.tree.edges.size());
      }
    }
  }
}

}  // namespace
}  // namespace tdp
