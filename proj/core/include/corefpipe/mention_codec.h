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

// Stack-based tagging of possibly overlapping mention spans.
//
// Each word gets one tag with three counts, applied in this order when
// decoding word i:
//
//   POP    close the `pops` most recently opened spans with end = i
//   CLOSE  emit `closes` single-word spans (i, i)
//   PUSH   open `pushes` spans with start = i
//
// A span set round-trips exactly unless it contains two multi-word spans
// (s1, e1), (s2, e2) with s1 < s2 < e1 < e2. Spans touching at one word,
// e.g. (1, 3) and (3, 5), are representable because pops precede pushes.
// Words are numbered from 1.

#ifndef COREFPIPE_MENTION_CODEC_H_
#define COREFPIPE_MENTION_CODEC_H_

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace corefpipe {

using Span = std::pair<int, int>;  // (start, end), 1-based, inclusive

struct SpanTag {
  int pops = 0;
  int closes = 0;
  int pushes = 0;

  bool operator==(const SpanTag &) const = default;
};

struct EncodeResult {
  std::vector<SpanTag> tags;
  // Spans left out because they cross an earlier-starting span.
  std::vector<Span> dropped;
  // Number of counts clamped to the tag cap.
  int overflow = 0;
};

// Encodes spans over a sentence of n words. Crossing spans are dropped,
// keeping spans in (start asc, end desc) order. Counts above `cap` are
// clamped. Throws DataError on spans outside 1..n or duplicates.
EncodeResult EncodeSpans(int n, const std::set<Span> &spans, int cap = 4);

// Total decoder with repair: pops on an empty stack are ignored and spans
// still open after the last word are closed there.
std::set<Span> DecodeTags(const std::vector<SpanTag> &tags);

// True when no two multi-word spans cross.
bool IsStackCompatible(const std::set<Span> &spans);

// Label space of the tagging head: all (pops, closes, pushes) with counts in
// 0..cap, indexed pops * (cap+1)^2 + closes * (cap+1) + pushes.
class TagVocabulary {
 public:
  explicit TagVocabulary(int cap = 4) : cap_(cap) {}

  int cap() const { return cap_; }
  int size() const { return (cap_ + 1) * (cap_ + 1) * (cap_ + 1); }
  int Index(const SpanTag &tag) const;
  SpanTag Tag(int index) const;
  // "POP^a CLOSE^b PUSH^c".
  std::string Label(int index) const;
  std::vector<std::string> Labels() const;
  // JSON list of labels.
  std::string ToJson() const;
  // Parses a label list produced by ToJson(). Throws ModelError when the
  // labels are not the canonical list of some cap.
  static TagVocabulary FromJson(std::string_view json);

 private:
  int cap_;
};

}  // namespace corefpipe

#endif  // COREFPIPE_MENTION_CODEC_H_
