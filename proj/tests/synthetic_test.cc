// Copyright 2026 The corefpipe Authors.
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

#include "corefpipe/synthetic.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>

#include "corefpipe/checkpoint.h"
#include "corefpipe/conllu.h"

namespace corefpipe {
namespace {

std::map<std::string, int> EmptyNodeForms(const std::vector<Document> &docs) {
  std::map<std::string, int> forms;
  for (const Document &doc : docs) {
    for (const Sentence &s : doc.sentences) {
      for (const Token &t : s.tokens) {
        if (t.is_empty) ++forms[t.form];
      }
    }
  }
  return forms;
}

// The ten CoNLL-U columns of every token, MISC without Entity=.
std::vector<std::string> Columns(const Document &doc) {
  std::vector<std::string> rows;
  for (const Sentence &s : doc.sentences) {
    for (const Token &t : s.tokens) {
      std::string row = t.id;
      for (const std::string *c : {&t.form, &t.lemma, &t.upos, &t.xpos, &t.feats,
                                   &t.head, &t.deprel, &t.deps}) {
        row += "\t" + *c;
      }
      for (const std::string &m : t.misc) row += "\t" + m;
      rows.push_back(row);
    }
  }
  return rows;
}

TEST(SyntheticTest, SameSeedSameDocuments) {
  for (const std::string &id : SyntheticDatasets()) {
    EXPECT_TRUE(GenerateSynthetic(id, 5, 3) == GenerateSynthetic(id, 5, 3));
    EXPECT_FALSE(GenerateSynthetic(id, 5, 3) == GenerateSynthetic(id, 5, 4));
  }
}

TEST(SyntheticTest, DocumentsCarryDatasetAndLanguage) {
  for (const std::string &id : SyntheticDatasets()) {
    const auto docs = GenerateSynthetic(id, 4, 1, "dev");
    ASSERT_EQ(docs.size(), 4u);
    std::set<std::string> ids;
    for (const Document &doc : docs) {
      EXPECT_EQ(doc.dataset_id, id);
      EXPECT_EQ(doc.language, LanguageOf(id));
      EXPECT_NE(doc.doc_id.find("dev"), std::string::npos);
      EXPECT_GE(doc.sentences.size(), 2u);
      ids.insert(doc.doc_id);
    }
    EXPECT_EQ(ids.size(), docs.size());
  }
}

TEST(SyntheticTest, EmptyNodesDependOnTheLanguage) {
  const auto xa = EmptyNodeForms(GenerateSynthetic("xa_syn", 20, 1));
  const auto xb = EmptyNodeForms(GenerateSynthetic("xb_syn", 20, 1));
  const auto xc = EmptyNodeForms(GenerateSynthetic("xc_syn", 20, 1));
  EXPECT_GT(xa.count("#PersPron"), 0u);
  EXPECT_GT(xa.count("#Gen"), 0u);
  EXPECT_GT(xb.count("#PersPron"), 0u);
  EXPECT_EQ(xb.count("#Gen"), 0u);
  EXPECT_TRUE(xc.empty());
}

TEST(SyntheticTest, DroppedSubjectsAreMentionsOfTheirVerb) {
  int dropped = 0;
  for (const Document &doc : GenerateSynthetic("xa_syn", 20, 2)) {
    std::set<int> heads;
    for (const Entity &e : doc.entities) {
      EXPECT_GE(e.mentions.size(), 1u);
      for (const Mention &m : e.mentions) {
        EXPECT_LE(m.start, m.head);
        EXPECT_LE(m.head, m.end);
        EXPECT_LT(m.end, doc.TokenCount());
        heads.insert(m.head);
      }
    }
    const auto offsets = doc.SentenceOffsets();
    for (size_t s = 0; s < doc.sentences.size(); ++s) {
      const auto &tokens = doc.sentences[s].tokens;
      for (size_t i = 0; i < tokens.size(); ++i) {
        const Token &t = tokens[i];
        if (!t.is_empty || t.form != "#PersPron") continue;
        ++dropped;
        EXPECT_EQ(t.DependencyRelation(), "nsubj");
        const int head = std::stoi(t.DependencyHead());
        EXPECT_EQ(tokens[i - 1].WordIndex(), head) << "node follows its verb";
        EXPECT_EQ(tokens[i - 1].upos, "VERB");
        EXPECT_TRUE(heads.count(offsets[s] + i)) << "node heads a mention";
      }
    }
  }
  EXPECT_GT(dropped, 10);
}

TEST(SyntheticTest, DocumentsRoundtripThroughConllu) {
  for (const std::string &id : SyntheticDatasets()) {
    const auto docs = GenerateSynthetic(id, 10, 5);
    const std::string text = SerializeConllu(docs);
    const auto parsed = ParseConllu(text);
    ASSERT_EQ(parsed.size(), docs.size());
    for (size_t i = 0; i < docs.size(); ++i) {
      EXPECT_EQ(parsed[i].doc_id, docs[i].doc_id);
      EXPECT_EQ(Columns(parsed[i]), Columns(docs[i])) << docs[i].doc_id;
      EXPECT_TRUE(parsed[i].entities == docs[i].entities) << docs[i].doc_id;
    }
    EXPECT_EQ(SerializeConllu(parsed), text);
  }
}

TEST(SyntheticTest, CorpusLayout) {
  const auto root = std::filesystem::temp_directory_path() / "corefpipe_syn_corpus";
  std::filesystem::remove_all(root);
  SyntheticCorpusOptions options;
  options.train_documents = {3, 2, 1};
  options.dev_documents = 2;
  WriteSyntheticCorpus(root, options);
  for (size_t i = 0; i < SyntheticDatasets().size(); ++i) {
    const std::string &id = SyntheticDatasets()[i];
    const auto train = DatasetFile(root, id, "train");
    EXPECT_EQ(train, root / id / (id + "-corefud-train.conllu"));
    EXPECT_EQ(ParseConllu(ReadFile(train)).size(),
              static_cast<size_t>(options.train_documents[i]));
    EXPECT_EQ(ParseConllu(ReadFile(DatasetFile(root, id, "dev"))).size(), 2u);
  }
  std::filesystem::remove_all(root);
}

}  // namespace
}  // namespace corefpipe
