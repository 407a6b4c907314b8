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

// Model input windows.
//
// Every sentence of a document becomes one Segment: the sentence itself,
// then up to `lookahead` following subwords, then as many preceding subwords
// as the remaining length budget allows.

#ifndef COREFPIPE_SEGMENTER_H_
#define COREFPIPE_SEGMENTER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corefpipe/conllu.h"

namespace corefpipe {

// Subword tokenizer contract: deterministic, fixed vocabulary.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  // Subword ids of a single word.
  virtual std::vector<int> EncodeWord(std::string_view word) const = 0;
  virtual int vocab_size() const = 0;
  // Short description stored in checkpoints, e.g. "hash:4:4096".
  virtual std::string Reference() const = 0;

  struct Encoding {
    std::vector<int> ids;
    std::vector<bool> word_starts;
  };
  // Tokenizes a sequence of words. Throws DataError on a word without
  // subwords.
  Encoding Encode(const std::vector<std::string> &words) const;
};

// Splits words into pieces of at most `piece_length` code points and hashes
// each piece into the vocabulary. The first piece of a word is marked so
// that word-initial and word-internal pieces get different ids. Id 0 is
// reserved.
class HashTokenizer : public Tokenizer {
 public:
  HashTokenizer(int piece_length = 4, int vocab_size = 4096);

  std::vector<int> EncodeWord(std::string_view word) const override;
  int vocab_size() const override { return vocab_size_; }
  std::string Reference() const override;

  // Parses a reference produced by Reference(). Throws ModelError.
  static HashTokenizer FromReference(std::string_view reference);

 private:
  int piece_length_;
  int vocab_size_;
};

struct Segment {
  std::string doc_id;
  int sentence_index = 0;
  std::vector<int> subword_ids;
  std::vector<bool> word_starts;
  // Document position of the token each subword belongs to.
  std::vector<int> token_positions;
  // Subword range [current_first, current_last] of the predicted sentence.
  int current_first = 0;
  int current_last = -1;
  // The sentence alone exceeded max_len and was cut from the right.
  bool truncated = false;

  int size() const { return subword_ids.size(); }
  // Document positions of the current-sentence tokens whose first subword
  // lies inside the current range, in order.
  std::vector<int> CurrentWords() const;
  // Subword index of the first subword of every word starting in the window.
  std::vector<int> WordStartIndices() const;
};

// Subword ids and word boundaries of a whole document.
struct TokenizedDocument {
  std::vector<int> ids;
  std::vector<bool> word_starts;
  std::vector<int> token_positions;
  std::vector<int> sentence_begin;  // first subword of each sentence
  std::vector<int> sentence_end;    // one past the last subword
};

TokenizedDocument TokenizeDocument(const Document &doc,
                                   const Tokenizer &tokenizer);

// One segment per sentence. Empty nodes present in the document are
// tokenized like words. Truncations are reported in `warnings`.
std::vector<Segment> BuildSegments(const Document &doc,
                                   const Tokenizer &tokenizer, int max_len,
                                   int lookahead = 50,
                                   std::vector<std::string> *warnings = nullptr);

// Same, over an already tokenized document.
std::vector<Segment> BuildSegments(const Document &doc,
                                   const TokenizedDocument &tokens,
                                   int max_len, int lookahead = 50,
                                   std::vector<std::string> *warnings = nullptr);

// A segment holding only sentence `sentence`, without context.
Segment SentenceSegment(const Document &doc, const TokenizedDocument &tokens,
                        int sentence, int max_len);

// Mapping between word-start subwords of a segment and document positions.
class WindowPositions {
 public:
  explicit WindowPositions(const Segment &segment);

  // Document position of the word starting at `subword`, if it starts one.
  std::optional<int> ToDocument(int subword) const;
  // First subword of the token at `position`, if it starts in the window.
  std::optional<int> ToSubword(int position) const;
  // Last subword of the token at `position`, if its first subword is in the
  // window.
  std::optional<int> LastSubword(int position) const;

 private:
  std::vector<int> to_document_;
  std::unordered_map<int, int> to_subword_;
  std::unordered_map<int, int> last_subword_;
};

}  // namespace corefpipe

#endif  // COREFPIPE_SEGMENTER_H_
