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

// CorefUD object model and CoNLL-U reader/writer.
//
// A Document is a list of sentences plus the entities annotated over them.
// Mentions address tokens by document position: all tokens of the document,
// surface words and empty nodes alike, numbered from 0 in file order.
//
// Coreference is read from and written to the `Entity=` MISC attribute using
// the CorefUD bracket syntax:
//
//   (e1-person-2     opens a mention of e1, fields after the id are opaque
//   e1)              closes the most recent open mention of e1
//   (e1)             single-token mention
//
// Only the entity id and the head field are interpreted; all other fields
// are stored as an opaque string on the mention and written back verbatim.

#ifndef COREFPIPE_CONLLU_H_
#define COREFPIPE_CONLLU_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace corefpipe {

struct Token {
  std::string id;  // "7" for surface words, "7.1" for empty nodes
  std::string form = "_";
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::string feats = "_";
  std::string head = "_";
  std::string deprel = "_";
  std::string deps = "_";

  // MISC attributes other than Entity=, in file order.
  std::vector<std::string> misc;
  // Index in `misc` where the Entity= attribute is written; -1 appends it.
  int entity_misc_index = -1;
  // A multiword token range line ("1-2\t...") printed verbatim before this
  // token, empty if none.
  std::string multiword_line;

  bool is_empty = false;

  // Surface index k of "k" or "k.j".
  int WordIndex() const;
  // j of "k.j", 0 for surface words.
  int EmptyIndex() const;

  // Dependency head id. Empty nodes usually keep it in DEPS ("3:nsubj");
  // the HEAD column takes precedence when filled.
  std::string DependencyHead() const;
  std::string DependencyRelation() const;

  bool operator==(const Token &) const = default;
};

struct Sentence {
  std::vector<std::string> comments;  // text after the leading '#'
  std::vector<Token> tokens;

  bool operator==(const Sentence &) const = default;
};

struct Mention {
  int start = 0;  // document positions, end inclusive
  int end = 0;
  int head = 0;
  std::string entity_id;
  // Bracket fields after the entity id, e.g. "person-1-new"; empty if the
  // bracket carried only the id.
  std::string attrs;
  // Discontinuous part marker such as "[1/2]", empty for contiguous spans.
  std::string part;

  bool operator==(const Mention &) const = default;
};

struct Entity {
  std::string id;
  std::vector<Mention> mentions;

  bool operator==(const Entity &) const = default;
};

struct Document {
  std::string doc_id;
  std::string dataset_id;
  std::string language;
  std::vector<Sentence> sentences;
  std::vector<Entity> entities;

  int TokenCount() const;
  // Document position of the first token of every sentence, plus a final
  // entry equal to TokenCount().
  std::vector<int> SentenceOffsets() const;
  // (sentence, token index) of a document position.
  std::pair<int, int> Locate(int position) const;
  const Token &TokenAt(int position) const;

  bool operator==(const Document &) const = default;
};

// Parses CoNLL-U text. Documents are split on `# newdoc` comments; without
// any, the whole text is one document. Warnings (discontinuous mentions)
// are appended to `warnings` when given. Throws ParseError.
std::vector<Document> ParseConllu(std::string_view text,
                                  const std::string &dataset_id = "",
                                  std::vector<std::string> *warnings = nullptr);

// Writes documents back in CoNLL-U. Throws DataError on an entity without
// mentions or a mention outside the document.
std::string SerializeConllu(const std::vector<Document> &docs);

// Head of the span [start, end]: the first token whose dependency head lies
// outside the span, or `start` when there is none.
int DefaultMentionHead(const Document &doc, int start, int end);

// Sorts mentions inside entities by (start asc, end desc, head asc) and
// entities by their first mention. Parsing produces canonical documents.
void Canonicalize(Document &doc);

// Language code of a dataset id, "cs" for "cs_pdt".
std::string LanguageOf(std::string_view dataset_id);

// A gold empty node removed from a document.
struct EmptyNodeTarget {
  int sentence = 0;
  int anchor = 0;  // k of "k.j": inserted after surface word k
  int slot = 0;    // order among the empty nodes sharing the anchor
  Token token;

  std::string Head() const { return token.DependencyHead(); }
  std::string Deprel() const { return token.DependencyRelation(); }
};

struct StrippedDocument {
  Document doc;
  std::vector<EmptyNodeTarget> targets;
  // Entities of the input, used to restore mentions that were dropped or
  // shrunk by the removal.
  std::vector<Entity> original_entities;
};

// Removes all empty nodes. Mentions consisting only of empty nodes are
// dropped, the others are shrunk to their surface tokens and re-headed when
// their head was removed.
StrippedDocument StripEmptyNodes(const Document &doc);

// Inserts empty nodes after their anchor words, behind any empty nodes
// already present at that anchor, in target order. Ids at each anchor are
// renumbered 1, 2, ... and mention positions shifted accordingly.
Document InsertEmptyNodes(const Document &doc,
                          const std::vector<EmptyNodeTarget> &targets);

// Inverse of StripEmptyNodes.
Document RestoreEmptyNodes(const StrippedDocument &stripped);

}  // namespace corefpipe

#endif  // COREFPIPE_CONLLU_H_
