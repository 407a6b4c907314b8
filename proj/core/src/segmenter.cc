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

#include "corefpipe/segmenter.h"

#include <algorithm>
#include <charconv>

#include "corefpipe/errors.h"

namespace corefpipe {

namespace {

uint64_t Fnv1a(std::string_view s, uint64_t hash = 14695981039346656037ull) {
  for (unsigned char c : s) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

bool IsContinuationByte(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

Tokenizer::Encoding Tokenizer::Encode(
    const std::vector<std::string> &words) const {
  Encoding encoding;
  for (const std::string &word : words) {
    std::vector<int> pieces = EncodeWord(word);
    if (pieces.empty()) {
      throw DataError("tokenizer produced no subwords for '" + word + "'");
    }
    for (size_t i = 0; i < pieces.size(); ++i) {
      encoding.ids.push_back(pieces[i]);
      encoding.word_starts.push_back(i == 0);
    }
  }
  return encoding;
}

HashTokenizer::HashTokenizer(int piece_length, int vocab_size)
    : piece_length_(piece_length), vocab_size_(vocab_size) {
  if (piece_length < 1 || vocab_size < 2) {
    throw ModelError("invalid hash tokenizer parameters");
  }
}

std::vector<int> HashTokenizer::EncodeWord(std::string_view word) const {
  std::vector<int> ids;
  size_t begin = 0;
  while (begin < word.size()) {
    size_t end = begin;
    int points = 0;
    while (end < word.size() && points < piece_length_) {
      ++end;
      while (end < word.size() && IsContinuationByte(word[end])) ++end;
      ++points;
    }
    uint64_t hash = Fnv1a(begin == 0 ? "\x01" : "\x02");
    hash = Fnv1a(word.substr(begin, end - begin), hash);
    ids.push_back(1 + static_cast<int>(hash % (vocab_size_ - 1)));
    begin = end;
  }
  return ids;
}

std::string HashTokenizer::Reference() const {
  return "hash:" + std::to_string(piece_length_) + ":" +
         std::to_string(vocab_size_);
}

HashTokenizer HashTokenizer::FromReference(std::string_view reference) {
  int piece = 0, vocab = 0;
  if (reference.substr(0, 5) == "hash:") {
    std::string_view rest = reference.substr(5);
    size_t colon = rest.find(':');
    if (colon != std::string_view::npos) {
      auto a = std::from_chars(rest.data(), rest.data() + colon, piece);
      auto b = std::from_chars(rest.data() + colon + 1,
                               rest.data() + rest.size(), vocab);
      if (a.ec == std::errc() && b.ec == std::errc() &&
          b.ptr == rest.data() + rest.size()) {
        return HashTokenizer(piece, vocab);
      }
    }
  }
  throw ModelError("unknown tokenizer reference '" + std::string(reference) +
                   "'");
}

std::vector<int> Segment::CurrentWords() const {
  std::vector<int> words;
  for (int i = current_first; i <= current_last; ++i) {
    if (word_starts[i]) words.push_back(token_positions[i]);
  }
  return words;
}

std::vector<int> Segment::WordStartIndices() const {
  std::vector<int> indices;
  for (int i = 0; i < size(); ++i) {
    if (word_starts[i]) indices.push_back(i);
  }
  return indices;
}

TokenizedDocument TokenizeDocument(const Document &doc,
                                   const Tokenizer &tokenizer) {
  TokenizedDocument result;
  int position = 0;
  for (const Sentence &sentence : doc.sentences) {
    result.sentence_begin.push_back(result.ids.size());
    for (const Token &token : sentence.tokens) {
      std::vector<int> pieces = tokenizer.EncodeWord(token.form);
      if (pieces.empty()) {
        throw DataError("tokenizer produced no subwords for token " +
                        token.id + " '" + token.form + "' of " + doc.doc_id);
      }
      for (size_t i = 0; i < pieces.size(); ++i) {
        result.ids.push_back(pieces[i]);
        result.word_starts.push_back(i == 0);
        result.token_positions.push_back(position);
      }
      ++position;
    }
    result.sentence_end.push_back(result.ids.size());
  }
  return result;
}

namespace {

Segment Slice(const Document &doc, const TokenizedDocument &tokens,
              int sentence, int begin, int end, int current_begin,
              int current_end) {
  Segment segment;
  segment.doc_id = doc.doc_id;
  segment.sentence_index = sentence;
  segment.subword_ids.assign(tokens.ids.begin() + begin,
                             tokens.ids.begin() + end);
  segment.word_starts.assign(tokens.word_starts.begin() + begin,
                             tokens.word_starts.begin() + end);
  segment.token_positions.assign(tokens.token_positions.begin() + begin,
                                 tokens.token_positions.begin() + end);
  segment.current_first = current_begin - begin;
  segment.current_last = current_end - begin - 1;
  return segment;
}

}  // namespace

std::vector<Segment> BuildSegments(const Document &doc,
                                   const TokenizedDocument &tokens,
                                   int max_len, int lookahead,
                                   std::vector<std::string> *warnings) {
  if (max_len < 1) throw DataError("max_len must be positive");
  if (lookahead < 0) throw DataError("lookahead must be non-negative");
  std::vector<Segment> segments;
  const int total = tokens.ids.size();
  for (size_t s = 0; s < doc.sentences.size(); ++s) {
    int begin = tokens.sentence_begin[s];
    int end = tokens.sentence_end[s];
    int length = end - begin;
    if (length > max_len) {
      if (warnings != nullptr) {
        warnings->push_back("sentence " + std::to_string(s) + " of " +
                            doc.doc_id + " has " + std::to_string(length) +
                            " subwords, truncated to " +
                            std::to_string(max_len));
      }
      Segment segment =
          Slice(doc, tokens, s, begin, begin + max_len, begin, begin + max_len);
      segment.truncated = true;
      segments.push_back(std::move(segment));
      continue;
    }
    int budget = max_len - length;
    int right = std::min({lookahead, total - end, budget});
    int left = std::min(budget - right, begin);
    segments.push_back(
        Slice(doc, tokens, s, begin - left, end + right, begin, end));
  }
  return segments;
}

std::vector<Segment> BuildSegments(const Document &doc,
                                   const Tokenizer &tokenizer, int max_len,
                                   int lookahead,
                                   std::vector<std::string> *warnings) {
  return BuildSegments(doc, TokenizeDocument(doc, tokenizer), max_len,
                       lookahead, warnings);
}

Segment SentenceSegment(const Document &doc, const TokenizedDocument &tokens,
                        int sentence, int max_len) {
  int begin = tokens.sentence_begin[sentence];
  int end = std::min(tokens.sentence_end[sentence], begin + max_len);
  Segment segment = Slice(doc, tokens, sentence, begin, end, begin, end);
  segment.truncated = end < tokens.sentence_end[sentence];
  return segment;
}

WindowPositions::WindowPositions(const Segment &segment)
    : to_document_(segment.size(), -1) {
  for (int i = 0; i < segment.size(); ++i) {
    int position = segment.token_positions[i];
    if (segment.word_starts[i]) {
      to_document_[i] = position;
      to_subword_[position] = i;
      last_subword_[position] = i;
    } else if (last_subword_.count(position)) {
      last_subword_[position] = i;
    }
  }
}

std::optional<int> WindowPositions::ToDocument(int subword) const {
  if (subword < 0 || subword >= static_cast<int>(to_document_.size()) ||
      to_document_[subword] < 0) {
    return std::nullopt;
  }
  return to_document_[subword];
}

std::optional<int> WindowPositions::ToSubword(int position) const {
  auto it = to_subword_.find(position);
  if (it == to_subword_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> WindowPositions::LastSubword(int position) const {
  auto it = last_subword_.find(position);
  if (it == last_subword_.end()) return std::nullopt;
  return it->second;
}

}  // namespace corefpipe
