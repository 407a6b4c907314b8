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

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <unordered_map>

#include "corefpipe/errors.h"

namespace corefpipe {

namespace {

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t begin = 0;
  while (true) {
    size_t pos = s.find(sep, begin);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(begin));
      return parts;
    }
    parts.push_back(s.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

std::optional<int> ParseInt(std::string_view s) {
  if (s.empty()) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

// Value of a "key = value" comment, if the comment has that key.
std::optional<std::string_view> CommentValue(std::string_view comment,
                                             std::string_view key) {
  comment = Trim(comment);
  if (comment.substr(0, key.size()) != key) return std::nullopt;
  std::string_view rest = Trim(comment.substr(key.size()));
  if (rest.empty()) return rest;
  if (rest.front() != '=') return std::nullopt;
  return Trim(rest.substr(1));
}

struct OpenMention {
  int start;
  int line;
  std::string entity_id;
  std::string attrs;
  std::string part;
  int head_index;  // 1-based within the span, 0 when not annotated
};

struct PendingMention {
  Mention mention;
  int head_index;
  int line;
};

// Accumulates one document while its lines are read.
class DocumentBuilder {
 public:
  DocumentBuilder(std::string doc_id, const std::string &dataset_id,
                  std::vector<std::string> *warnings)
      : warnings_(warnings) {
    doc_.doc_id = std::move(doc_id);
    doc_.dataset_id = dataset_id;
    doc_.language = LanguageOf(dataset_id);
  }

  bool empty() const { return doc_.sentences.empty(); }
  int position() const { return position_; }

  void SetHeadField(int index) { head_field_ = index; }

  void AddSentence(Sentence sentence) {
    doc_.sentences.push_back(std::move(sentence));
  }

  // Parses the value of an Entity= attribute of the token at the current
  // position.
  void AddBrackets(std::string_view value, int line) {
    size_t i = 0;
    while (i < value.size()) {
      if (value[i] == '(') {
        size_t j = i + 1;
        while (j < value.size() && value[j] != '(' && value[j] != ')') ++j;
        std::string_view content = value.substr(i + 1, j - i - 1);
        if (content.empty()) {
          throw ParseError("empty entity bracket in '" + std::string(value) +
                               "'",
                           line);
        }
        Open(content, line);
        if (j < value.size() && value[j] == ')') {
          Close(OpenKey(content), line);
          i = j + 1;
        } else {
          i = j;
        }
      } else {
        size_t j = value.find(')', i);
        if (j == std::string_view::npos || value.find('(', i) < j) {
          throw ParseError(
              "malformed Entity attribute '" + std::string(value) + "'", line);
        }
        Close(std::string(value.substr(i, j - i)), line);
        i = j + 1;
      }
    }
  }

  void Advance() { ++position_; }

  Document Finish() {
    for (const auto &[key, stack] : open_) {
      if (!stack.empty()) {
        throw ParseError("unclosed mention of entity " + stack.back().entity_id,
                         stack.back().line);
      }
    }
    std::map<std::string, size_t> entity_index;
    for (PendingMention &pending : pending_) {
      Mention &m = pending.mention;
      if (pending.head_index > 0) {
        if (pending.head_index > m.end - m.start + 1) {
          throw ParseError("mention head index " +
                               std::to_string(pending.head_index) +
                               " outside the span of entity " + m.entity_id,
                           pending.line);
        }
        m.head = m.start + pending.head_index - 1;
      } else {
        m.head = DefaultMentionHead(doc_, m.start, m.end);
      }
      auto [it, inserted] =
          entity_index.try_emplace(m.entity_id, doc_.entities.size());
      if (inserted) doc_.entities.push_back(Entity{m.entity_id, {}});
      doc_.entities[it->second].mentions.push_back(std::move(m));
    }
    Canonicalize(doc_);
    return std::move(doc_);
  }

 private:
  static std::string OpenKey(std::string_view content) {
    return std::string(content.substr(0, content.find('-')));
  }

  void Open(std::string_view content, int line) {
    OpenMention open;
    open.start = position_;
    open.line = line;
    size_t dash = content.find('-');
    std::string eid(content.substr(0, dash));
    if (dash != std::string_view::npos) {
      open.attrs = std::string(content.substr(dash + 1));
    }
    size_t bracket = eid.find('[');
    if (bracket != std::string::npos) {
      open.part = eid.substr(bracket);
      eid = eid.substr(0, bracket);
      if (warnings_ != nullptr) {
        warnings_->push_back("line " + std::to_string(line) +
                             ": discontinuous mention of entity " + eid +
                             " read as separate contiguous parts");
      }
    }
    open.entity_id = eid;
    open.head_index = 0;
    if (head_field_ > 0) {
      std::vector<std::string_view> fields = Split(content, '-');
      if (head_field_ < static_cast<int>(fields.size())) {
        std::string_view field = fields[head_field_];
        if (!field.empty()) {
          std::optional<int> index = ParseInt(field);
          if (!index || *index < 1) {
            throw ParseError("invalid mention head '" + std::string(field) +
                                 "' for entity " + eid,
                             line);
          }
          open.head_index = *index;
        }
      }
    }
    open_[eid + open.part].push_back(std::move(open));
  }

  void Close(const std::string &key, int line) {
    auto it = open_.find(key);
    if (it == open_.end() || it->second.empty()) {
      throw ParseError("closing bracket of entity " + key +
                           " without a matching opening",
                       line);
    }
    OpenMention open = std::move(it->second.back());
    it->second.pop_back();
    PendingMention pending;
    pending.mention.start = open.start;
    pending.mention.end = position_;
    pending.mention.entity_id = std::move(open.entity_id);
    pending.mention.attrs = std::move(open.attrs);
    pending.mention.part = std::move(open.part);
    pending.head_index = open.head_index;
    pending.line = open.line;
    pending_.push_back(std::move(pending));
  }

  Document doc_;
  std::vector<std::string> *warnings_;
  int position_ = 0;
  int head_field_ = 2;  // eid-etype-head-other
  std::map<std::string, std::vector<OpenMention>> open_;
  std::vector<PendingMention> pending_;
};

// Validates token ids of a sentence as they are appended.
class IdChecker {
 public:
  void Check(const Token &token, int line) {
    if (token.is_empty) {
      int k = token.WordIndex();
      int j = token.EmptyIndex();
      if (k != last_word_ || j != last_empty_ + 1) {
        throw ParseError("unexpected empty node id " + token.id, line);
      }
      last_empty_ = j;
    } else {
      if (token.WordIndex() != last_word_ + 1) {
        throw ParseError("unexpected word id " + token.id + " after " +
                             std::to_string(last_word_),
                         line);
      }
      last_word_ = token.WordIndex();
      last_empty_ = 0;
    }
  }

 private:
  int last_word_ = 0;
  int last_empty_ = 0;
};

Token ParseTokenLine(const std::vector<std::string_view> &cols, int line) {
  Token token;
  token.id = std::string(cols[0]);
  size_t dot = cols[0].find('.');
  token.is_empty = dot != std::string_view::npos;
  std::optional<int> k = ParseInt(cols[0].substr(0, dot));
  std::optional<int> j =
      token.is_empty ? ParseInt(cols[0].substr(dot + 1)) : std::optional<int>(0);
  if (!k || !j || *k < 0 || (token.is_empty ? *j < 1 : *k < 1)) {
    throw ParseError("malformed token id '" + token.id + "'", line);
  }
  token.form = std::string(cols[1]);
  token.lemma = std::string(cols[2]);
  token.upos = std::string(cols[3]);
  token.xpos = std::string(cols[4]);
  token.feats = std::string(cols[5]);
  token.head = std::string(cols[6]);
  token.deprel = std::string(cols[7]);
  token.deps = std::string(cols[8]);
  return token;
}

struct BracketEvent {
  const Mention *mention;
  int entity_index;
};

}  // namespace

int Token::WordIndex() const {
  size_t dot = id.find('.');
  return ParseInt(std::string_view(id).substr(0, dot)).value_or(0);
}

int Token::EmptyIndex() const {
  size_t dot = id.find('.');
  if (dot == std::string::npos) return 0;
  return ParseInt(std::string_view(id).substr(dot + 1)).value_or(0);
}

std::string Token::DependencyHead() const {
  if (head != "_" || !is_empty) return head;
  if (deps == "_") return head;
  std::string_view first = Split(deps, '|').front();
  return std::string(first.substr(0, first.find(':')));
}

std::string Token::DependencyRelation() const {
  if (deprel != "_" || !is_empty) return deprel;
  if (deps == "_") return deprel;
  std::string_view first = Split(deps, '|').front();
  size_t colon = first.find(':');
  if (colon == std::string_view::npos) return deprel;
  return std::string(first.substr(colon + 1));
}

int Document::TokenCount() const {
  int count = 0;
  for (const Sentence &s : sentences) count += s.tokens.size();
  return count;
}

std::vector<int> Document::SentenceOffsets() const {
  std::vector<int> offsets;
  offsets.reserve(sentences.size() + 1);
  int position = 0;
  for (const Sentence &s : sentences) {
    offsets.push_back(position);
    position += s.tokens.size();
  }
  offsets.push_back(position);
  return offsets;
}

std::pair<int, int> Document::Locate(int position) const {
  int offset = 0;
  for (size_t s = 0; s < sentences.size(); ++s) {
    int size = sentences[s].tokens.size();
    if (position < offset + size) {
      return {static_cast<int>(s), position - offset};
    }
    offset += size;
  }
  throw DataError("document position " + std::to_string(position) +
                  " out of range in " + doc_id);
}

const Token &Document::TokenAt(int position) const {
  auto [s, t] = Locate(position);
  return sentences[s].tokens[t];
}

std::string LanguageOf(std::string_view dataset_id) {
  return std::string(dataset_id.substr(0, dataset_id.find('_')));
}

int DefaultMentionHead(const Document &doc, int start, int end) {
  std::vector<int> offsets = doc.SentenceOffsets();
  for (int pos = start; pos <= end; ++pos) {
    auto [s, t] = doc.Locate(pos);
    const Sentence &sentence = doc.sentences[s];
    std::string head = sentence.tokens[t].DependencyHead();
    if (head == "_" || head == "0") return pos;
    int head_pos = -1;
    for (size_t i = 0; i < sentence.tokens.size(); ++i) {
      if (sentence.tokens[i].id == head) {
        head_pos = offsets[s] + static_cast<int>(i);
        break;
      }
    }
    if (head_pos < start || head_pos > end) return pos;
  }
  return start;
}

void Canonicalize(Document &doc) {
  auto mention_less = [](const Mention &a, const Mention &b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end > b.end;
    return a.head < b.head;
  };
  for (Entity &entity : doc.entities) {
    std::stable_sort(entity.mentions.begin(), entity.mentions.end(),
                     mention_less);
  }
  std::stable_sort(doc.entities.begin(), doc.entities.end(),
                   [&](const Entity &a, const Entity &b) {
                     if (a.mentions.empty() || b.mentions.empty()) {
                       return !a.mentions.empty() && b.mentions.empty();
                     }
                     const Mention &ma = a.mentions.front();
                     const Mention &mb = b.mentions.front();
                     if (mention_less(ma, mb)) return true;
                     if (mention_less(mb, ma)) return false;
                     return a.id < b.id;
                   });
}

std::vector<Document> ParseConllu(std::string_view text,
                                  const std::string &dataset_id,
                                  std::vector<std::string> *warnings) {
  std::vector<Document> docs;
  std::optional<DocumentBuilder> builder;
  Sentence sentence;
  IdChecker ids;
  std::string pending_multiword;
  int head_field = 2;
  int line_number = 0;

  auto finish_doc = [&]() {
    if (builder && !builder->empty()) docs.push_back(builder->Finish());
    builder.reset();
  };
  auto finish_sentence = [&](int line) {
    if (sentence.tokens.empty()) {
      if (!sentence.comments.empty()) {
        throw ParseError("sentence without tokens", line);
      }
      return;
    }
    if (!pending_multiword.empty()) {
      throw ParseError("multiword token range past the end of the sentence",
                       line);
    }
    builder->AddSentence(std::move(sentence));
    sentence = Sentence();
    ids = IdChecker();
  };

  size_t begin = 0;
  while (begin < text.size()) {
    size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    begin = end + 1;
    ++line_number;

    if (line.empty()) {
      finish_sentence(line_number);
      continue;
    }
    if (line.front() == '#') {
      if (!sentence.tokens.empty()) {
        throw ParseError("comment inside a sentence", line_number);
      }
      std::string_view comment = line.substr(1);
      auto id = CommentValue(comment, "newdoc id");
      if (!id) id = CommentValue(comment, "newdoc");
      if (id) {
        finish_doc();
        builder.emplace(std::string(*id), dataset_id, warnings);
        builder->SetHeadField(head_field);
      }
      if (auto fields = CommentValue(comment, "global.Entity")) {
        std::vector<std::string_view> names = Split(*fields, '-');
        auto it = std::find(names.begin(), names.end(), "head");
        head_field = it == names.end() ? 0 : static_cast<int>(it - names.begin());
        if (builder) builder->SetHeadField(head_field);
      }
      sentence.comments.emplace_back(comment);
      continue;
    }

    std::vector<std::string_view> cols = Split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError("expected 10 tab-separated columns, found " +
                           std::to_string(cols.size()),
                       line_number);
    }
    if (cols[0].find('-') != std::string_view::npos) {
      if (!pending_multiword.empty()) {
        throw ParseError("consecutive multiword token ranges", line_number);
      }
      pending_multiword = std::string(line);
      continue;
    }
    if (!builder) {
      builder.emplace("", dataset_id, warnings);
      builder->SetHeadField(head_field);
    }

    Token token = ParseTokenLine(cols, line_number);
    ids.Check(token, line_number);
    if (!pending_multiword.empty()) {
      if (token.is_empty) {
        throw ParseError("multiword token range before an empty node",
                         line_number);
      }
      token.multiword_line = std::move(pending_multiword);
      pending_multiword.clear();
    }

    std::string_view misc = cols[9];
    if (misc != "_") {
      for (std::string_view attr : Split(misc, '|')) {
        if (attr.substr(0, 7) == "Entity=") {
          if (token.entity_misc_index >= 0) {
            throw ParseError("repeated Entity attribute", line_number);
          }
          token.entity_misc_index = token.misc.size();
          builder->AddBrackets(attr.substr(7), line_number);
        } else {
          token.misc.emplace_back(attr);
        }
      }
    }
    sentence.tokens.push_back(std::move(token));
    builder->Advance();
  }
  if (builder) finish_sentence(line_number);
  finish_doc();
  return docs;
}

std::string SerializeConllu(const std::vector<Document> &docs) {
  std::string out;
  for (const Document &doc : docs) {
    const int size = doc.TokenCount();
    std::vector<std::vector<BracketEvent>> opens(size), closes(size);
    for (size_t e = 0; e < doc.entities.size(); ++e) {
      const Entity &entity = doc.entities[e];
      if (entity.mentions.empty()) {
        throw DataError("entity " + entity.id + " has no mentions in " +
                        doc.doc_id);
      }
      for (const Mention &m : entity.mentions) {
        if (m.start < 0 || m.end >= size || m.start > m.end ||
            m.head < m.start || m.head > m.end) {
          throw DataError("invalid mention span of entity " + entity.id +
                          " in " + doc.doc_id);
        }
        opens[m.start].push_back({&m, static_cast<int>(e)});
        if (m.end != m.start) closes[m.end].push_back({&m, static_cast<int>(e)});
      }
    }
    // Closing brackets innermost first; openings outermost first.
    for (auto &events : closes) {
      std::sort(events.begin(), events.end(),
                [](const BracketEvent &a, const BracketEvent &b) {
                  if (a.mention->start != b.mention->start) {
                    return a.mention->start > b.mention->start;
                  }
                  return a.entity_index > b.entity_index;
                });
    }
    for (auto &events : opens) {
      std::sort(events.begin(), events.end(),
                [](const BracketEvent &a, const BracketEvent &b) {
                  if (a.mention->end != b.mention->end) {
                    return a.mention->end > b.mention->end;
                  }
                  return a.entity_index < b.entity_index;
                });
    }

    int position = 0;
    for (const Sentence &sentence : doc.sentences) {
      for (const std::string &comment : sentence.comments) {
        out += '#';
        out += comment;
        out += '\n';
      }
      for (const Token &token : sentence.tokens) {
        // With closings present, single-token mentions go first, as in
        // "(e2)e1)", then the closings, then openings of longer mentions. A
        // closing never follows an opening of the same entity, which would
        // pair them up when reading back.
        std::string brackets;
        auto open = [&](const Mention &m) {
          brackets += '(' + m.entity_id + m.part;
          if (!m.attrs.empty()) brackets += '-' + m.attrs;
          if (m.end == m.start) brackets += ')';
        };
        const bool closing = !closes[position].empty();
        for (const BracketEvent &event : opens[position]) {
          if (closing && event.mention->end == position) open(*event.mention);
        }
        for (const BracketEvent &event : closes[position]) {
          brackets += event.mention->entity_id + event.mention->part + ')';
        }
        for (const BracketEvent &event : opens[position]) {
          if (!closing || event.mention->end != position) open(*event.mention);
        }

        if (!token.multiword_line.empty()) {
          out += token.multiword_line;
          out += '\n';
        }
        for (const std::string *col :
             {&token.id, &token.form, &token.lemma, &token.upos, &token.xpos,
              &token.feats, &token.head, &token.deprel, &token.deps}) {
          out += *col;
          out += '\t';
        }
        std::vector<std::string> misc = token.misc;
        if (!brackets.empty()) {
          size_t at = token.entity_misc_index < 0
                          ? misc.size()
                          : std::min<size_t>(token.entity_misc_index, misc.size());
          misc.insert(misc.begin() + at, "Entity=" + brackets);
        }
        if (misc.empty()) {
          out += '_';
        } else {
          for (size_t i = 0; i < misc.size(); ++i) {
            if (i > 0) out += '|';
            out += misc[i];
          }
        }
        out += '\n';
        ++position;
      }
      out += '\n';
    }
  }
  return out;
}

StrippedDocument StripEmptyNodes(const Document &doc) {
  StrippedDocument result;
  result.original_entities = doc.entities;
  Document &out = result.doc;
  out.doc_id = doc.doc_id;
  out.dataset_id = doc.dataset_id;
  out.language = doc.language;

  std::vector<int> new_position(doc.TokenCount(), -1);
  int old_pos = 0;
  int new_pos = 0;
  for (size_t s = 0; s < doc.sentences.size(); ++s) {
    const Sentence &sentence = doc.sentences[s];
    Sentence stripped;
    stripped.comments = sentence.comments;
    std::map<int, int> slots;
    for (const Token &token : sentence.tokens) {
      if (token.is_empty) {
        EmptyNodeTarget target;
        target.sentence = s;
        target.anchor = token.WordIndex();
        target.slot = slots[target.anchor]++;
        target.token = token;
        result.targets.push_back(std::move(target));
      } else {
        stripped.tokens.push_back(token);
        new_position[old_pos] = new_pos++;
      }
      ++old_pos;
    }
    out.sentences.push_back(std::move(stripped));
  }

  for (const Entity &entity : doc.entities) {
    Entity kept{entity.id, {}};
    for (const Mention &m : entity.mentions) {
      int start = -1, end = -1;
      for (int p = m.start; p <= m.end; ++p) {
        if (new_position[p] < 0) continue;
        if (start < 0) start = new_position[p];
        end = new_position[p];
      }
      if (start < 0) continue;
      Mention shrunk = m;
      shrunk.start = start;
      shrunk.end = end;
      shrunk.head = new_position[m.head] >= 0
                        ? new_position[m.head]
                        : DefaultMentionHead(out, start, end);
      kept.mentions.push_back(std::move(shrunk));
    }
    if (!kept.mentions.empty()) out.entities.push_back(std::move(kept));
  }
  Canonicalize(out);
  return result;
}

Document InsertEmptyNodes(const Document &doc,
                          const std::vector<EmptyNodeTarget> &targets) {
  // Targets of each sentence grouped by anchor, in given order.
  std::map<int, std::map<int, std::vector<const EmptyNodeTarget *>>> grouped;
  for (const EmptyNodeTarget &t : targets) {
    if (t.sentence < 0 || t.sentence >= static_cast<int>(doc.sentences.size())) {
      throw DataError("empty node target refers to missing sentence " +
                      std::to_string(t.sentence));
    }
    grouped[t.sentence][t.anchor].push_back(&t);
  }

  Document out = doc;
  std::vector<int> new_position(doc.TokenCount(), -1);
  int old_pos = 0;
  int new_pos = 0;
  for (size_t s = 0; s < doc.sentences.size(); ++s) {
    const Sentence &sentence = doc.sentences[s];
    Sentence &result = out.sentences[s];
    result.tokens.clear();
    auto sentence_targets = grouped.find(s);
    int words = 0;
    for (const Token &token : sentence.tokens) {
      if (!token.is_empty) ++words;
    }

    auto flush_anchor = [&](int anchor, int existing) {
      if (sentence_targets == grouped.end()) return;
      auto it = sentence_targets->second.find(anchor);
      if (it == sentence_targets->second.end()) return;
      int j = existing;
      for (const EmptyNodeTarget *t : it->second) {
        Token token = t->token;
        token.is_empty = true;
        token.id = std::to_string(anchor) + "." + std::to_string(++j);
        token.multiword_line.clear();
        result.tokens.push_back(std::move(token));
        ++new_pos;
      }
    };

    int anchor = 0;
    int existing = 0;
    for (const Token &token : sentence.tokens) {
      if (!token.is_empty) {
        flush_anchor(anchor, existing);
        anchor = token.WordIndex();
        existing = 0;
      } else {
        ++existing;
      }
      result.tokens.push_back(token);
      new_position[old_pos++] = new_pos++;
    }
    flush_anchor(anchor, existing);
    if (sentence_targets != grouped.end()) {
      for (const auto &[a, list] : sentence_targets->second) {
        if (a < 0 || a > words) {
          throw DataError("empty node anchor " + std::to_string(a) +
                          " outside sentence " + std::to_string(s));
        }
      }
    }
  }

  for (Entity &entity : out.entities) {
    for (Mention &m : entity.mentions) {
      m.start = new_position[m.start];
      m.end = new_position[m.end];
      m.head = new_position[m.head];
    }
  }
  return out;
}

Document RestoreEmptyNodes(const StrippedDocument &stripped) {
  Document doc = InsertEmptyNodes(stripped.doc, stripped.targets);
  doc.entities = stripped.original_entities;
  return doc;
}

}  // namespace corefpipe
