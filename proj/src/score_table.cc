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

#include "tdp/score_table.h"

#include <algorithm>
#include <cmath>

#include "tdp/errors.h"

namespace tdp {

int ScoreTable::ArgmaxRow() const {
  int best = -1;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    if (best < 0 || rows[i].probability > rows[best].probability) best = i;
  }
  return best;
}

ScoreTable EmptyScoreTable(const Document& doc, const CandidateSet& candidates) {
  ScoreTable table;
  table.child = candidates.child;
  const MentionKind child_kind = doc.node(candidates.child).kind;
  for (int parent : candidates.candidates) {
    for (RelationLabel label : LegalLabels(child_kind, doc.node(parent).kind)) {
      table.rows.push_back({parent, label, 0.0, 0.0});
    }
  }
  NormalizeScores(table);
  return table;
}

void NormalizeScores(ScoreTable& table) {
  if (table.rows.empty()) return;
  double max_score = table.rows.front().score;
  for (const ScoreRow& r : table.rows) max_score = std::max(max_score, r.score);
  double z = 0.0;
  for (ScoreRow& r : table.rows) {
    r.probability = std::exp(r.score - max_score);
    z += r.probability;
  }
  for (ScoreRow& r : table.rows) r.probability /= z;
}

void CheckScoreTable(const Document& doc, const ScoreTable& table) {
  if (table.child < 0 || table.child >= doc.num_mentions()) {
    throw PreconditionError("score table names child order " +
                            std::to_string(table.child) + " outside document " +
                            doc.doc_id());
  }
  const Mention& child = doc.node(table.child);
  for (const ScoreRow& row : table.rows) {
    if (row.parent < kRootOrder || row.parent >= doc.num_mentions()) {
      throw PreconditionError("score table for " + child.id +
                              " names unknown parent order " +
                              std::to_string(row.parent));
    }
    const Mention& parent = doc.node(row.parent);
    if (row.parent == table.child ||
        !IsLegalEdge(child.kind, parent.kind, row.label)) {
      throw PreconditionError("score table for " + child.id + " has illegal row (" +
                              parent.id + ", " + std::string(LabelName(row.label)) +
                              ")");
    }
    if (!std::isfinite(row.probability)) {
      throw PreconditionError("score table for " + child.id +
                              " has a non-finite probability");
    }
  }
}

nlohmann::json ScoreTablesToJson(const Document& doc, std::span<const ScoreTable> tables) {
  nlohmann::json out_tables = nlohmann::json::array();
  for (const ScoreTable& t : tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const ScoreRow& r : t.rows) {
      rows.push_back({{"parent", doc.node(r.parent).id},
                      {"label", LabelName(r.label)},
                      {"score", r.score},
                      {"probability", r.probability}});
    }
    out_tables.push_back({{"child", doc.node(t.child).id}, {"rows", std::move(rows)}});
  }
  return {{"doc_id", doc.doc_id()}, {"tables", std::move(out_tables)}};
}

std::vector<ScoreTable> ScoreTablesFromJson(const Document& doc, const nlohmann::json& j) {
  const std::string where = "score tables of " + doc.doc_id();
  auto order_of = [&](const std::string& id) {
    const auto order = doc.OrderOf(id);
    if (!order) throw PreconditionError(where + ": unknown node " + id);
    return *order;
  };
  std::vector<ScoreTable> tables;
  try {
    if (j.at("doc_id").get<std::string>() != doc.doc_id()) {
      throw ConfigError(where + ": doc_id is " + j.at("doc_id").get<std::string>());
    }
    for (const auto& raw : j.at("tables")) {
      ScoreTable t;
      t.child = order_of(raw.at("child").get<std::string>());
      for (const auto& row : raw.at("rows")) {
        const auto label = ParseLabel(row.at("label").get<std::string>());
        if (!label) throw ConfigError(where + ": unknown label " + row.at("label").dump());
        t.rows.push_back({order_of(row.at("parent").get<std::string>()), *label,
                          row.at("score").get<double>(), 0.0});
      }
      NormalizeScores(t);
      CheckScoreTable(doc, t);
      tables.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return tables;
}

}  // namespace tdp
