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

#include "tdp/corpus_io.h"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "tdp/errors.h"

namespace tdp {

using json = nlohmann::json;

namespace {

// Keeps ASCII alphanumerics and every non-ASCII byte.
std::string Squash(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (c >= 0x80 || std::isalnum(c)) out.push_back(static_cast<char>(c));
  }
  return out;
}

template <typename T>
T Field(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(line, std::string("missing field \"") + key + "\"");
  }
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(line, std::string("field \"") + key + "\": " + e.what());
  }
}

json RecordToJson(const CorpusRecord& record) {
  const Document& doc = record.doc;
  json mentions = json::array();
  for (const Mention& m : doc.mentions()) {
    mentions.push_back({{"id", m.id},
                        {"kind", KindName(m.kind)},
                        {"sentence_index", m.sentence_index},
                        {"token_span", {m.span.start, m.span.end}},
                        {"text", m.text}});
  }
  json edges = json::array();
  for (const Edge& e : record.tree.edges) {
    edges.push_back(
        {{"child", e.child}, {"parent", e.parent}, {"label", LabelName(e.label)}});
  }
  return json{{"doc_id", doc.doc_id()},
              {"dct_text", doc.dct_text()},
              {"sentences", doc.sentences()},
              {"mentions", std::move(mentions)},
              {"gold_edges", std::move(edges)}};
}

}  // namespace

bool MentionTextMatchesSpan(const Mention& mention,
                            const std::vector<std::string>& sentence) {
  std::string joined;
  for (int i = mention.span.start; i < mention.span.end; ++i) {
    if (i < 0 || i >= static_cast<int>(sentence.size())) return false;
    joined += sentence[i];
  }
  return Squash(joined) == Squash(mention.text);
}

std::string FormatRecord(const CorpusRecord& record) {
  return RecordToJson(record).dump();
}

CorpusRecord ParseRecord(std::string_view line, std::size_t line_number, bool documents_only) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_number, std::string("malformed record: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(line_number, "record is not an object");

  const auto doc_id = Field<std::string>(obj, "doc_id", line_number);
  const auto dct_text = Field<std::string>(obj, "dct_text", line_number);
  auto sentences =
      Field<std::vector<std::vector<std::string>>>(obj, "sentences", line_number);
  const auto raw_mentions = Field<json>(obj, "mentions", line_number);
  const bool has_edges = obj.contains("gold_edges");
  const auto raw_edges =
      documents_only && !has_edges ? json::array() : Field<json>(obj, "gold_edges", line_number);
  if (!raw_mentions.is_array() || !raw_edges.is_array()) {
    throw ParseError(line_number, "\"mentions\" and \"gold_edges\" must be arrays");
  }

  const std::string where =
      "line " + std::to_string(line_number) + ": document " + doc_id;
  std::vector<Mention> mentions;
  for (const json& raw : raw_mentions) {
    Mention m;
    m.id = Field<std::string>(raw, "id", line_number);
    const auto kind_name = Field<std::string>(raw, "kind", line_number);
    auto kind = ParseKind(kind_name);
    if (!kind) {
      throw ParseError(line_number, "mention " + m.id + ": unknown kind \"" +
                                        kind_name + "\"");
    }
    m.kind = *kind;
    m.sentence_index = Field<int>(raw, "sentence_index", line_number);
    const auto span = Field<std::vector<int>>(raw, "token_span", line_number);
    if (span.size() != 2) {
      throw ParseError(line_number, "mention " + m.id + ": token_span needs 2 values");
    }
    m.span = {span[0], span[1]};
    m.text = Field<std::string>(raw, "text", line_number);
    mentions.push_back(std::move(m));
  }

  std::vector<Edge> edges;
  for (const json& raw : raw_edges) {
    Edge e;
    e.child = Field<std::string>(raw, "child", line_number);
    e.parent = Field<std::string>(raw, "parent", line_number);
    const auto label_name = Field<std::string>(raw, "label", line_number);
    auto label = ParseLabel(label_name);
    if (!label) {
      throw ParseError(line_number, "edge " + e.child + " -> " + e.parent +
                                        ": unknown label \"" + label_name + "\"");
    }
    e.label = *label;
    edges.push_back(std::move(e));
  }

  std::optional<Document> doc;
  try {
    doc.emplace(doc_id, dct_text, std::move(sentences), std::move(mentions));
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line_number) + ": " + e.what());
  }
  for (const Mention& m : doc->mentions()) {
    if (!MentionTextMatchesSpan(m, doc->sentences()[m.sentence_index])) {
      throw ValidationError(where + ": mention " + m.id + " text \"" + m.text +
                            "\" does not match its token span");
    }
  }
  TemporalDependencyTree tree{doc_id, std::move(edges)};
  if (!has_edges) return CorpusRecord{std::move(*doc), std::move(tree)};
  ValidationReport report = ValidateTree(tree, *doc);
  if (!report.empty()) {
    std::string msg = where + ": invalid tree:";
    for (const Violation& v : report) msg += " " + v.message + ";";
    throw ValidationError(msg);
  }
  return CorpusRecord{std::move(*doc), std::move(tree)};
}

std::vector<CorpusRecord> ReadCorpus(std::istream& in, const LoadOptions& options) {
  std::vector<CorpusRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(ParseRecord(line, line_number, options.documents_only));
    } catch (const Error& e) {
      if (!options.lenient) throw;
      if (options.on_warning) options.on_warning(std::string("skipped: ") + e.what());
    }
  }
  return records;
}

std::vector<CorpusRecord> LoadCorpus(const std::filesystem::path& path,
                                     const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus " + path.string());
  try {
    return ReadCorpus(in, options);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.detail());
  }
}

void WriteCorpus(std::span<const CorpusRecord> records, std::ostream& out) {
  for (const CorpusRecord& r : records) out << FormatRecord(r) << '\n';
}

void SaveCorpus(std::span<const CorpusRecord> records,
                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus " + path.string());
  WriteCorpus(records, out);
  out.flush();
  if (!out) throw Error("write failed for corpus " + path.string());
}

std::vector<CorpusRecord> ConvertNativeRelease(const std::filesystem::path& path) {
  throw Error("native release conversion is not available for " + path.string() +
              "; convert it to the canonical line-delimited format first");
}

double CorpusStats::out_of_window_fraction() const {
  return children == 0 ? 0.0 : static_cast<double>(gold_out_of_window) / children;
}

CorpusStats& CorpusStats::operator+=(const CorpusStats& o) {
  documents += o.documents;
  sentences += o.sentences;
  events += o.events;
  timexes += o.timexes;
  dcts += o.dcts;
  for (int i = 0; i < kNumLabels; ++i) labels[i] += o.labels[i];
  parent_root += o.parent_root;
  parent_dct += o.parent_dct;
  parent_timex += o.parent_timex;
  parent_event += o.parent_event;
  children += o.children;
  gold_out_of_window += o.gold_out_of_window;
  return *this;
}

CorpusStats operator+(CorpusStats a, const CorpusStats& b) { return a += b; }

CorpusStats ComputeCorpusStats(std::span<const CorpusRecord> records,
                               const WindowConfig& window) {
  CorpusStats stats;
  for (const CorpusRecord& r : records) {
    const Document& doc = r.doc;
    ++stats.documents;
    ++stats.dcts;
    stats.sentences += static_cast<long>(doc.sentences().size());
    for (const Mention& m : doc.mentions()) {
      (m.kind == MentionKind::kEvent ? stats.events : stats.timexes)++;
    }
    for (const Edge& e : r.tree.edges) {
      ++stats.labels[static_cast<int>(e.label)];
      const Mention* parent = doc.Find(e.parent);
      if (parent == nullptr) continue;
      switch (parent->kind) {
        case MentionKind::kRoot:
          ++stats.parent_root;
          break;
        case MentionKind::kDct:
          ++stats.parent_dct;
          break;
        case MentionKind::kTimex:
          ++stats.parent_timex;
          break;
        case MentionKind::kEvent:
          ++stats.parent_event;
          break;
      }
    }
    for (const TrainingInstance& inst : BuildTrainingInstances(doc, r.tree, window)) {
      ++stats.children;
      if (inst.gold_out_of_window) ++stats.gold_out_of_window;
    }
  }
  return stats;
}

std::string FormatStatsJson(const CorpusStats& s) {
  json labels;
  for (RelationLabel l : kAllLabels) {
    labels[std::string(LabelName(l))] = s.labels[static_cast<int>(l)];
  }
  json j{{"documents", s.documents},
         {"sentences", s.sentences},
         {"mentions", s.mentions()},
         {"mentions_by_kind", {{"event", s.events}, {"timex", s.timexes}, {"dct", s.dcts}}},
         {"labels", labels},
         {"parent_categories",
          {{"root", s.parent_root},
           {"dct", s.parent_dct},
           {"timex", s.parent_timex},
           {"event", s.parent_event}}},
         {"children", s.children},
         {"gold_out_of_window", s.gold_out_of_window},
         {"gold_out_of_window_fraction", s.out_of_window_fraction()}};
  return j.dump();
}

std::string FormatStatsTable(const CorpusStats& s) {
  std::ostringstream out;
  out << "documents            " << s.documents << '\n'
      << "sentences            " << s.sentences << '\n'
      << "mentions             " << s.mentions() << "  (event " << s.events
      << ", timex " << s.timexes << ", dct " << s.dcts << ")\n"
      << "labels              ";
  for (RelationLabel l : kAllLabels) {
    out << ' ' << LabelName(l) << '=' << s.labels[static_cast<int>(l)];
  }
  out << "\nparent categories    root=" << s.parent_root << " dct=" << s.parent_dct
      << " timex=" << s.parent_timex << " event=" << s.parent_event << '\n'
      << "gold out of window   " << s.gold_out_of_window << '/' << s.children
      << " (" << std::fixed << std::setprecision(4) << s.out_of_window_fraction()
      << ")\n";
  return out.str();
}

}  // namespace tdp
