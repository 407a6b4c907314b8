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

#include "corefpipe/mention_codec.h"

#include <gtest/gtest.h>

#include <random>

#include "corefpipe/errors.h"

namespace corefpipe {
namespace {

// Two multi-word spans cross when each contains exactly one endpoint
// strictly inside the other, checked pair by pair.
bool CrossesBruteForce(const std::set<Span> &spans) {
  for (const Span &a : spans) {
    for (const Span &b : spans) {
      if (a.first == a.second || b.first == b.second) continue;
      if (a.first < b.first && b.first < a.second && a.second < b.second) return true;
    }
  }
  return false;
}

std::set<Span> RandomSpans(std::mt19937_64 &rng, int n, int count) {
  std::uniform_int_distribution<int> word(1, n);
  std::set<Span> spans;
  for (int i = 0; i < count; ++i) {
    int a = word(rng), b = word(rng);
    spans.emplace(std::min(a, b), std::max(a, b));
  }
  return spans;
}

TEST(MentionCodecTest, EmptySentence) {
  EXPECT_EQ(EncodeSpans(3, {}).tags, std::vector<SpanTag>(3));
  EXPECT_TRUE(DecodeTags(std::vector<SpanTag>(3)).empty());
  EXPECT_TRUE(DecodeTags({}).empty());
}

TEST(MentionCodecTest, NestedSingleWordSpan) {
  EncodeResult r = EncodeSpans(3, {{1, 3}, {2, 2}});
  EXPECT_EQ(r.tags, (std::vector<SpanTag>{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}}));
  EXPECT_TRUE(r.dropped.empty());
  EXPECT_EQ(DecodeTags(r.tags), (std::set<Span>{{1, 3}, {2, 2}}));
}

TEST(MentionCodecTest, CrossingSpanIsDropped) {
  EncodeResult r = EncodeSpans(4, {{1, 3}, {2, 4}});
  EXPECT_EQ(r.dropped, (std::vector<Span>{{2, 4}}));
  EXPECT_EQ(DecodeTags(r.tags), (std::set<Span>{{1, 3}}));
}

TEST(MentionCodecTest, TouchingSpansAreRepresentable) {
  std::set<Span> spans = {{1, 3}, {3, 5}};
  EXPECT_TRUE(IsStackCompatible(spans));
  EXPECT_EQ(DecodeTags(EncodeSpans(5, spans).tags), spans);
}

TEST(MentionCodecTest, RepairClosesUnmatchedPush) {
  std::vector<SpanTag> tags(5);
  tags[1].pushes = 1;
  EXPECT_EQ(DecodeTags(tags), (std::set<Span>{{2, 5}}));
}

TEST(MentionCodecTest, RepairIgnoresUnmatchedPop) {
  std::vector<SpanTag> tags(3);
  tags[0].pops = 2;
  tags[2].closes = 1;
  EXPECT_EQ(DecodeTags(tags), (std::set<Span>{{3, 3}}));
}

TEST(MentionCodecTest, PopsCloseLastOpenedSpan) {
  // Two spans open at word 1; the first pop closes one of them at word 2.
  std::vector<SpanTag> tags = {{0, 0, 2}, {1, 0, 0}, {1, 0, 0}};
  EXPECT_EQ(DecodeTags(tags), (std::set<Span>{{1, 2}, {1, 3}}));
}

TEST(MentionCodecTest, RejectsInvalidSpans) {
  EXPECT_THROW(EncodeSpans(3, {{0, 1}}), DataError);
  EXPECT_THROW(EncodeSpans(3, {{2, 4}}), DataError);
  EXPECT_THROW(EncodeSpans(3, {{3, 2}}), DataError);
}

TEST(MentionCodecTest, OverflowIsClampedAndReported) {
  std::set<Span> spans;
  for (int e = 2; e <= 7; ++e) spans.emplace(1, e);
  EncodeResult r = EncodeSpans(7, spans, 4);
  EXPECT_EQ(r.tags[0].pushes, 4);
  EXPECT_EQ(r.overflow, 2);
}

TEST(MentionCodecTest, CompatibilityMatchesBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    auto spans = RandomSpans(rng, 1 + trial % 12, 1 + trial % 5);
    EXPECT_EQ(IsStackCompatible(spans), !CrossesBruteForce(spans));
  }
}

TEST(MentionCodecTest, RoundTripOnCompatibleSets) {
  std::mt19937_64 rng(5);
  int checked = 0;
  while (checked < 1000) {
    const int n = std::uniform_int_distribution<int>(1, 40)(rng);
    auto spans = RandomSpans(rng, n, std::uniform_int_distribution<int>(0, 8)(rng));
    if (CrossesBruteForce(spans)) continue;
    EncodeResult r = EncodeSpans(n, spans, 8);
    ASSERT_TRUE(r.dropped.empty());
    ASSERT_EQ(DecodeTags(r.tags), spans);
    ++checked;
  }
}

TEST(MentionCodecTest, EncodingKeepsACompatibleSubset) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 15)(rng);
    auto spans = RandomSpans(rng, n, 6);
    EncodeResult r = EncodeSpans(n, spans, 8);
    std::set<Span> kept = DecodeTags(r.tags);
    EXPECT_FALSE(CrossesBruteForce(kept));
    EXPECT_EQ(kept.size() + r.dropped.size(), spans.size());
    for (const Span &s : kept) EXPECT_TRUE(spans.count(s));
  }
}

TEST(MentionCodecTest, DecodeIsTotal) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> count(0, 4);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<SpanTag> tags(std::uniform_int_distribution<int>(0, 20)(rng));
    for (SpanTag &t : tags) t = {count(rng), count(rng), count(rng)};
    std::set<Span> spans = DecodeTags(tags);
    for (const Span &s : spans) {
      EXPECT_GE(s.first, 1);
      EXPECT_LE(s.first, s.second);
      EXPECT_LE(s.second, static_cast<int>(tags.size()));
    }
  }
}

TEST(MentionCodecTest, VocabularyEnumeratesAllTags) {
  TagVocabulary vocab(4);
  EXPECT_EQ(vocab.size(), 125);
  for (int i = 0; i < vocab.size(); ++i) EXPECT_EQ(vocab.Index(vocab.Tag(i)), i);
  EXPECT_EQ(vocab.Label(vocab.Index({1, 0, 2})), "POP^1 CLOSE^0 PUSH^2");
  EXPECT_EQ(vocab.Index({}), 0);
}

TEST(MentionCodecTest, VocabularyJsonRoundTrip) {
  TagVocabulary vocab(2);
  TagVocabulary back = TagVocabulary::FromJson(vocab.ToJson());
  EXPECT_EQ(back.cap(), 2);
  EXPECT_EQ(back.Labels(), vocab.Labels());
  EXPECT_THROW(TagVocabulary::FromJson("[\"POP^0 CLOSE^0 PUSH^0\", \"x\"]"),
               ModelError);
  EXPECT_THROW(TagVocabulary::FromJson("not json"), ModelError);
}

}  // namespace
}  // namespace corefpipe
