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

#include <algorithm>

#include <nlohmann/json.hpp>

#include "corefpipe/errors.h"

namespace corefpipe {

namespace {

bool Crosses(const Span &a, const Span &b) {
  return a.first < b.first && b.first < a.second && a.second < b.second;
}

}  // namespace

bool IsStackCompatible(const std::set<Span> &spans) {
  std::vector<Span> multi;
  for (const Span &s : spans) {
    if (s.first < s.second) multi.push_back(s);
  }
  for (const Span &a : multi) {
    for (const Span &b : multi) {
      if (Crosses(a, b)) return false;
    }
  }
  return true;
}

EncodeResult EncodeSpans(int n, const std::set<Span> &spans, int cap) {
  std::vector<Span> ordered(spans.begin(), spans.end());
  for (const Span &s : ordered) {
    if (s.first < 1 || s.second > n || s.first > s.second) {
      throw DataError("span (" + std::to_string(s.first) + ", " +
                      std::to_string(s.second) + ") outside sentence of " +
                      std::to_string(n) + " words");
    }
  }
  std::sort(ordered.begin(), ordered.end(), [](const Span &a, const Span &b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  });

  EncodeResult result;
  result.tags.resize(n);
  std::vector<Span> kept;
  for (const Span &span : ordered) {
    if (span.first == span.second) {
      ++result.tags[span.first - 1].closes;
      continue;
    }
    bool crossing = std::any_of(kept.begin(), kept.end(), [&](const Span &k) {
      return Crosses(k, span);
    });
    if (crossing) {
      result.dropped.push_back(span);
      continue;
    }
    kept.push_back(span);
    ++result.tags[span.first - 1].pushes;
    ++result.tags[span.second - 1].pops;
  }
  for (SpanTag &tag : result.tags) {
    for (int *count : {&tag.pops, &tag.closes, &tag.pushes}) {
      if (*count > cap) {
        result.overflow += *count - cap;
        *count = cap;
      }
    }
  }
  return result;
}

std::set<Span> DecodeTags(const std::vector<SpanTag> &tags) {
  std::set<Span> spans;
  std::vector<int> stack;
  const int n = tags.size();
  for (int i = 1; i <= n; ++i) {
    const SpanTag &tag = tags[i - 1];
    for (int p = 0; p < tag.pops && !stack.empty(); ++p) {
      spans.emplace(stack.back(), i);
      stack.pop_back();
    }
    if (tag.closes > 0) spans.emplace(i, i);
    for (int p = 0; p < tag.pushes; ++p) stack.push_back(i);
  }
  while (!stack.empty()) {
    spans.emplace(stack.back(), n);
    stack.pop_back();
  }
  return spans;
}

int TagVocabulary::Index(const SpanTag &tag) const {
  auto clamp = [&](int v) { return std::clamp(v, 0, cap_); };
  int base = cap_ + 1;
  return (clamp(tag.pops) * base + clamp(tag.closes)) * base +
         clamp(tag.pushes);
}

SpanTag TagVocabulary::Tag(int index) const {
  int base = cap_ + 1;
  SpanTag tag;
  tag.pushes = index % base;
  tag.closes = (index / base) % base;
  tag.pops = index / (base * base);
  return tag;
}

std::string TagVocabulary::Label(int index) const {
  SpanTag tag = Tag(index);
  return "POP^" + std::to_string(tag.pops) + " CLOSE^" +
         std::to_string(tag.closes) + " PUSH^" + std::to_string(tag.pushes);
}

std::vector<std::string> TagVocabulary::Labels() const {
  std::vector<std::string> labels;
  for (int i = 0; i < size(); ++i) labels.push_back(Label(i));
  return labels;
}

std::string TagVocabulary::ToJson() const {
  return nlohmann::json(Labels()).dump();
}

TagVocabulary TagVocabulary::FromJson(std::string_view json) {
  std::vector<std::string> labels;
  try {
    labels = nlohmann::json::parse(json).get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception &e) {
    throw ModelError(std::string("invalid tag vocabulary: ") + e.what());
  }
  for (int cap = 0; cap <= 16; ++cap) {
    TagVocabulary vocab(cap);
    if (vocab.size() == static_cast<int>(labels.size()) &&
        vocab.Labels() == labels) {
      return vocab;
    }
  }
  throw ModelError("tag vocabulary does not match the POP/CLOSE/PUSH scheme");
}

}  // namespace corefpipe
