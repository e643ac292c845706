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

#include "tdp/synthetic.h"

#include <random>
#include <string>

#include "tdp/errors.h"

namespace tdp {

namespace {

struct Verb {
  const char* base;
  const char* past;
  const char* ing;
};

constexpr Verb kVerbs[] = {
    {"sign", "signed", "signing"},       {"visit", "visited", "visiting"},
    {"announce", "announced", "announcing"}, {"approve", "approved", "approving"},
    {"reject", "rejected", "rejecting"}, {"open", "opened", "opening"},
    {"launch", "launched", "launching"}, {"review", "reviewed", "reviewing"},
};
constexpr const char* kSubjects[] = {"Kuchma", "Yeltsin", "Officials", "Ministers", "Maria",
                                     "Chen"};
constexpr const char* kObjects[] = {"plan", "treaty", "deal", "bridge", "factory", "report"};
constexpr const char* kDays[] = {"Monday", "Tuesday", "Wednesday", "Thursday", "Friday"};

template <typename T, std::size_t N>
const T& Pick(const T (&items)[N], std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, N - 1);
  return items[d(rng)];
}

}  // namespace

std::vector<CorpusRecord> GenerateSyntheticCorpus(const SyntheticOptions& options) {
  if (options.documents < 0 || options.min_sentences < 1 ||
      options.max_sentences < options.min_sentences) {
    throw ConfigError("bad synthetic corpus options");
  }
  std::mt19937_64 rng(options.seed);
  std::bernoulli_distribution timex(options.timex_probability);
  std::bernoulli_distribution connective(options.connective_probability);
  std::uniform_int_distribution<int> three(0, 2);
  std::uniform_int_distribution<int> length(options.min_sentences, options.max_sentences);

  std::vector<CorpusRecord> corpus;
  for (int d = 0; d < options.documents; ++d) {
    const std::string doc_id = "synth-" + std::to_string(d);
    std::vector<std::vector<std::string>> sentences;
    std::vector<Mention> mentions;
    std::vector<Edge> edges = {{std::string(kDctId), std::string(kRootId),
                                RelationLabel::kDependsOn}};
    std::string last_event;
    const int n = length(rng);
    for (int s = 0; s < n; ++s) {
      const int index = static_cast<int>(sentences.size());
      const Verb& verb = Pick(kVerbs, rng);
      const std::string subject = Pick(kSubjects, rng);
      const std::string object = Pick(kObjects, rng);
      const std::string event_id = "e" + std::to_string(s);
      std::vector<std::string> tokens;
      auto add_event = [&](const std::string& word) {
        const int pos = static_cast<int>(tokens.size());
        tokens.push_back(word);
        mentions.push_back(Mention{event_id, MentionKind::kEvent, word, index, {pos, pos + 1}, 0});
      };
      if (timex(rng)) {
        const std::string day = Pick(kDays, rng);
        const std::string timex_id = "t" + std::to_string(s);
        tokens = {"On", day, ",", subject};
        mentions.push_back(Mention{timex_id, MentionKind::kTimex, day, index, {1, 2}, 0});
        edges.push_back({timex_id, std::string(kRootId), RelationLabel::kDependsOn});
        add_event(verb.past);
        edges.push_back({event_id, timex_id, RelationLabel::kOverlap});
      } else if (!last_event.empty() && connective(rng)) {
        static constexpr const char* kCue[] = {"Then", "Meanwhile", "Earlier"};
        static constexpr RelationLabel kLabel[] = {RelationLabel::kAfter, RelationLabel::kOverlap,
                                                   RelationLabel::kBefore};
        const int c = three(rng);
        tokens = {kCue[c], subject};
        add_event(verb.past);
        edges.push_back({event_id, last_event, kLabel[c]});
      } else {
        const int tense = three(rng);
        tokens = {subject};
        if (tense == 0) {
          add_event(verb.past);
          edges.push_back({event_id, std::string(kDctId), RelationLabel::kBefore});
        } else if (tense == 1) {
          tokens.push_back("is");
          add_event(verb.ing);
          edges.push_back({event_id, std::string(kDctId), RelationLabel::kOverlap});
        } else {
          tokens.push_back("will");
          add_event(verb.base);
          edges.push_back({event_id, std::string(kDctId), RelationLabel::kAfter});
        }
      }
      tokens.insert(tokens.end(), {"the", object, "."});
      sentences.push_back(std::move(tokens));
      last_event = event_id;
    }
    Document doc(doc_id, "2020-01-01", std::move(sentences), std::move(mentions));
    corpus.push_back(CorpusRecord{std::move(doc), TemporalDependencyTree{doc_id, std::move(edges)}});
  }
  return corpus;
}

}  // namespace tdp
