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

#include "corefpipe/conllu.h"

#include <gtest/gtest.h>

#include "corefpipe/checkpoint.h"
#include "corefpipe/errors.h"
#include "corefpipe/synthetic.h"
#include "test_util.h"

namespace corefpipe {
namespace {

using testing::DataDir;
using testing::FixtureFiles;

std::vector<Document> ParseFixture(const std::string &name) {
  return ParseConllu(ReadFile(DataDir() / name));
}

// (start, end, head) of every mention of an entity.
std::vector<std::tuple<int, int, int>> Spans(const Entity &entity) {
  std::vector<std::tuple<int, int, int>> spans;
  for (const Mention &m : entity.mentions) spans.emplace_back(m.start, m.end, m.head);
  return spans;
}

TEST(ConlluTest, FixturesRoundTripByteForByte) {
  auto files = FixtureFiles();
  ASSERT_GE(files.size(), 4u);
  for (const auto &file : files) {
    const std::string text = ReadFile(file);
    EXPECT_EQ(SerializeConllu(ParseConllu(text)), text) << file;
  }
}

TEST(ConlluTest, SyntheticCorpusRoundTrips) {
  for (const std::string &id : SyntheticDatasets()) {
    const std::string text = SerializeConllu(GenerateSynthetic(id, 6, 3));
    EXPECT_EQ(SerializeConllu(ParseConllu(text)), text) << id;
  }
}

TEST(ConlluTest, NestedMentions) {
  auto docs = ParseFixture("nested.conllu");
  ASSERT_EQ(docs.size(), 1u);
  const Document &doc = docs[0];
  EXPECT_EQ(doc.doc_id, "nested-1");
  ASSERT_EQ(doc.entities.size(), 3u);
  // "The book of Anna" with head "book", and "the old book of her sister".
  EXPECT_EQ(Spans(doc.entities[0]),
            (std::vector<std::tuple<int, int, int>>{{0, 3, 1}, {8, 13, 10}}));
  EXPECT_EQ(doc.entities[0].mentions[0].attrs, "object-2");
  // Anna, She, her.
  EXPECT_EQ(Spans(doc.entities[1]),
            (std::vector<std::tuple<int, int, int>>{{3, 3, 3}, {6, 6, 6}, {12, 12, 12}}));
  EXPECT_EQ(Spans(doc.entities[2]),
            (std::vector<std::tuple<int, int, int>>{{12, 13, 13}}));
}

TEST(ConlluTest, CrossingBrackets) {
  auto docs = ParseFixture("crossing.conllu");
  ASSERT_EQ(docs[0].entities.size(), 2u);
  EXPECT_EQ(Spans(docs[0].entities[0]),
            (std::vector<std::tuple<int, int, int>>{{0, 2, 0}, {4, 4, 4}}));
  EXPECT_EQ(Spans(docs[0].entities[1]),
            (std::vector<std::tuple<int, int, int>>{{1, 3, 1}}));
}

TEST(ConlluTest, EmptyNodesArePositions) {
  auto docs = ParseFixture("empty_nodes.conllu");
  ASSERT_EQ(docs.size(), 2u);
  const Document &doc = docs[0];
  EXPECT_EQ(doc.TokenCount(), 8);
  const Token &node = doc.TokenAt(1);
  EXPECT_TRUE(node.is_empty);
  EXPECT_EQ(node.WordIndex(), 1);
  EXPECT_EQ(node.EmptyIndex(), 1);
  EXPECT_EQ(node.DependencyHead(), "1");
  EXPECT_EQ(node.DependencyRelation(), "nsubj");
  EXPECT_EQ(doc.TokenAt(6).id, "4.2");
  ASSERT_EQ(doc.entities.size(), 1u);
  EXPECT_EQ(Spans(doc.entities[0]),
            (std::vector<std::tuple<int, int, int>>{{1, 1, 1}, {5, 5, 5}}));
  // The zero subject nested in a span closing on the same node.
  EXPECT_EQ(Spans(docs[1].entities[0]),
            (std::vector<std::tuple<int, int, int>>{{0, 1, 0}}));
}

TEST(ConlluTest, MultiwordTokensKeepTheirLines) {
  auto docs = ParseFixture("multiword.conllu");
  const Sentence &s = docs[0].sentences[0];
  ASSERT_EQ(s.tokens.size(), 8u);
  EXPECT_EQ(s.tokens[1].multiword_line, "2-3\tal\t_\t_\t_\t_\t_\t_\t_\t_");
  EXPECT_EQ(s.tokens[4].multiword_line, "5-6\tdel\t_\t_\t_\t_\t_\t_\t_\t_");
  EXPECT_TRUE(s.tokens[0].multiword_line.empty());
}

TEST(ConlluTest, SentenceOffsetsAndLocate) {
  auto docs = ParseFixture("nested.conllu");
  EXPECT_EQ(docs[0].SentenceOffsets(), (std::vector<int>{0, 6, 15}));
  EXPECT_EQ(docs[0].Locate(0), std::make_pair(0, 0));
  EXPECT_EQ(docs[0].Locate(7), std::make_pair(1, 1));
  EXPECT_EQ(docs[0].TokenAt(14).form, ".");
}

TEST(ConlluTest, TextWithoutNewdocIsOneDocument) {
  auto docs = ParseConllu("1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n\n"
                          "1\tb\t_\t_\t_\t_\t0\troot\t_\t_\n\n");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].sentences.size(), 2u);
}

TEST(ConlluTest, EmptyInputHasNoDocuments) {
  EXPECT_TRUE(ParseConllu("").empty());
  EXPECT_EQ(SerializeConllu({}), "");
}

TEST(ConlluTest, ParseErrorsCarryLineNumbers) {
  try {
    ParseConllu("# sent_id = 1\n1\ta\t_\t_\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2);
  }
  try {
    ParseConllu("1\ta\t_\t_\t_\t_\t0\troot\t_\tEntity=e1)\n\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 1);
  }
  EXPECT_THROW(ParseConllu("1\ta\t_\t_\t_\t_\t0\troot\t_\tEntity=(e1\n\n"), ParseError);
}

TEST(ConlluTest, DefaultHeadIsTheWordAttachedOutside) {
  auto docs = ParseFixture("nested.conllu");
  EXPECT_EQ(DefaultMentionHead(docs[0], 0, 3), 1);
  EXPECT_EQ(DefaultMentionHead(docs[0], 2, 3), 3);
  EXPECT_EQ(DefaultMentionHead(docs[0], 4, 4), 4);
}

TEST(ConlluTest, LanguageOfDatasetIds) {
  EXPECT_EQ(LanguageOf("cs_pdt"), "cs");
  EXPECT_EQ(LanguageOf("grc"), "grc");
  EXPECT_EQ(LanguageOf("xa_syn"), "xa");
}

TEST(ConlluTest, StripAndRestoreEmptyNodes) {
  auto docs = ParseFixture("empty_nodes.conllu");
  for (const Document &doc : docs) {
    StrippedDocument stripped = StripEmptyNodes(doc);
    for (const Sentence &s : stripped.doc.sentences) {
      for (const Token &t : s.tokens) EXPECT_FALSE(t.is_empty);
    }
    EXPECT_EQ(RestoreEmptyNodes(stripped), doc);
  }
  StrippedDocument first = StripEmptyNodes(docs[0]);
  ASSERT_EQ(first.targets.size(), 3u);
  EXPECT_EQ(first.targets[0].anchor, 1);
  EXPECT_EQ(first.targets[0].Head(), "1");
  EXPECT_EQ(first.targets[2].anchor, 4);
  EXPECT_EQ(first.targets[2].slot, 1);
  EXPECT_EQ(first.targets[2].Deprel(), "obl");
  // Both mentions were zero mentions.
  EXPECT_TRUE(first.doc.entities.empty());
  // The event span loses its empty node but survives.
  StrippedDocument second = StripEmptyNodes(docs[1]);
  ASSERT_EQ(second.doc.entities.size(), 1u);
  EXPECT_EQ(Spans(second.doc.entities[0]),
            (std::vector<std::tuple<int, int, int>>{{0, 0, 0}}));
}

TEST(ConlluTest, InsertEmptyNodesAfterExistingOnes) {
  auto docs = ParseFixture("empty_nodes.conllu");
  StrippedDocument stripped = StripEmptyNodes(docs[0]);
  Document once = InsertEmptyNodes(stripped.doc, {stripped.targets[0]});
  Document twice = InsertEmptyNodes(once, {stripped.targets[0]});
  const Sentence &s = twice.sentences[0];
  EXPECT_EQ(s.tokens[1].id, "1.1");
  EXPECT_EQ(s.tokens[2].id, "1.2");
  EXPECT_EQ(s.tokens[3].id, "2");
}

TEST(ConlluTest, SerializeRejectsMentionOutsideDocument) {
  auto docs = ParseFixture("crossing.conllu");
  docs[0].entities[0].mentions[0].end = 99;
  EXPECT_THROW(SerializeConllu(docs), DataError);
}

}  // namespace
}  // namespace corefpipe
