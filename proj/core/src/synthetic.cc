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

#include <array>
#include <map>
#include <random>

#include "corefpipe/checkpoint.h"
#include "corefpipe/errors.h"

namespace corefpipe {

namespace {

struct Lexicon {
  bool pro_drop = false;
  bool passive = false;
  std::string xpos;   // XPOS of generated empty nodes
  std::string feats;  // FEATS of "#PersPron"
  std::array<std::vector<std::string>, 2> names;  // masculine, feminine
  std::array<std::string, 2> pronouns;
  std::vector<std::string> nouns;
  std::vector<std::string> transitive;  // stems, gender suffix added
  std::vector<std::string> intransitive;
  std::vector<std::string> passives;
  std::string det, of;
  std::array<std::string, 2> agreement;
};

Lexicon MakeLexicon(const std::string &dataset_id) {
  Lexicon lex;
  if (dataset_id == "xa_syn") {
    lex.pro_drop = lex.passive = true;
    lex.xpos = "PRP";
    lex.feats = "Person=3";
    lex.names = {{{"Tomo", "Karo", "Miro", "Pavo", "Liso"},
                  {"Jana", "Eva", "Mila", "Sara", "Nika"}}};
    lex.pronouns = {"ono", "ona"};
    lex.nouns = {"kniha", "stolek", "okno", "pero", "lampa", "dopis"};
    lex.transitive = {"vidy", "kupi", "nosi", "psal", "hled"};
    lex.intransitive = {"spal", "bezel", "sedel"};
    lex.passives = {"ztracen", "nalezen", "prodan"};
    lex.det = "ten";
    lex.of = "ze";
    lex.agreement = {"o", "a"};
  } else if (dataset_id == "xb_syn") {
    lex.pro_drop = true;
    lex.xpos = "_";
    lex.feats = "_";
    lex.names = {{{"Dario", "Bruno", "Gusto", "Fabio", "Lino"},
                  {"Bela", "Dora", "Gilda", "Fina", "Lucia"}}};
    lex.pronouns = {"ilo", "ila"};
    lex.nouns = {"libro", "mesa", "ventana", "pluma", "carta", "silla"};
    lex.transitive = {"vede", "compra", "porta", "scrive", "cerca"};
    lex.intransitive = {"dorme", "corre", "siede"};
    lex.det = "le";
    lex.of = "di";
    lex.agreement = {"u", "i"};
  } else if (dataset_id == "xc_syn") {
    lex.names = {{{"Wendel", "Quill", "Varn", "Tybolt", "Xander"},
                  {"Wynne", "Quella", "Vesna", "Tyra", "Xenia"}}};
    lex.pronouns = {"hem", "hes"};
    lex.nouns = {"bok", "tavel", "vindo", "penn", "lamp", "brev"};
    lex.transitive = {"sey", "buy", "bear", "writ", "seek"};
    lex.intransitive = {"slep", "run", "sit"};
    lex.det = "tha";
    lex.of = "ov";
    lex.agreement = {"", ""};
    lex.xpos = "_";
    lex.feats = "_";
  } else {
    throw DataError("unknown synthetic dataset '" + dataset_id + "'");
  }
  return lex;
}

// Builds one document token by token.
class DocumentWriter {
 public:
  explicit DocumentWriter(Document &doc) : doc_(doc) {}

  void StartSentence(const std::string &sent_id) {
    doc_.sentences.emplace_back();
    doc_.sentences.back().comments.push_back(" sent_id = " + sent_id);
  }

  // Appends a surface word and returns its document position.
  int Word(const std::string &form, const std::string &upos,
           const std::string &feats = "_") {
    Sentence &s = doc_.sentences.back();
    Token t;
    t.id = std::to_string(++words_in_sentence_);
    t.form = form;
    t.lemma = Lower(form);
    t.upos = upos;
    t.feats = feats;
    s.tokens.push_back(t);
    return position_++;
  }

  // Appends an empty node after the last word.
  int Empty(const std::string &form, const std::string &xpos,
            const std::string &feats, int head, const std::string &deprel) {
    Sentence &s = doc_.sentences.back();
    Token t;
    t.id = std::to_string(words_in_sentence_) + ".1";
    t.form = t.lemma = form;
    t.upos = "PRON";
    t.xpos = xpos;
    t.feats = feats;
    t.deps = std::to_string(head) + ":" + deprel;
    t.is_empty = true;
    s.tokens.push_back(t);
    return position_++;
  }

  Token &At(int position) { return doc_.sentences.back().tokens[position - sentence_start_]; }
  int WordId(int position) { return std::stoi(At(position).id); }

  void Attach(int dependent, int head, const std::string &deprel) {
    Token &t = At(dependent);
    t.head = head < 0 ? "0" : std::to_string(WordId(head));
    t.deprel = deprel;
  }

  void FinishSentence() {
    Sentence &s = doc_.sentences.back();
    std::string text;
    for (size_t i = 0; i < s.tokens.size(); ++i) {
      const Token &t = s.tokens[i];
      if (t.is_empty) continue;
      if (!text.empty() && t.form != ".") text += " ";
      text += t.form;
    }
    // The word before the final period is written without a space.
    for (size_t i = s.tokens.size(); i-- > 1;) {
      if (s.tokens[i].form == "." && !s.tokens[i - 1].is_empty) {
        s.tokens[i - 1].misc.push_back("SpaceAfter=No");
        break;
      }
    }
    s.comments.push_back(" text = " + text);
    sentence_start_ = position_;
    words_in_sentence_ = 0;
  }

  void AddMention(const std::string &key, const std::string &type, int start,
                  int end, int head) {
    mentions_.push_back({key, type, start, end, head});
  }

  void Finish() {
    std::map<std::string, int> entity_of;
    for (const auto &m : mentions_) {
      auto [it, inserted] = entity_of.emplace(m.key, doc_.entities.size());
      if (inserted) {
        doc_.entities.push_back({"e" + std::to_string(doc_.entities.size() + 1), {}});
      }
      Entity &entity = doc_.entities[it->second];
      Mention mention;
      mention.start = m.start;
      mention.end = m.end;
      mention.head = m.head;
      mention.entity_id = entity.id;
      mention.attrs = m.type + "-" + std::to_string(m.head - m.start + 1);
      entity.mentions.push_back(mention);
    }
    Canonicalize(doc_);
  }

 private:
  static std::string Lower(std::string s) {
    for (char &c : s) c = std::tolower(static_cast<unsigned char>(c));
    return s;
  }

  struct Pending {
    std::string key, type;
    int start, end, head;
  };
  Document &doc_;
  int position_ = 0;
  int sentence_start_ = 0;
  int words_in_sentence_ = 0;
  std::vector<Pending> mentions_;
};

}  // namespace

const std::vector<std::string> &SyntheticDatasets() {
  static const std::vector<std::string> kIds = {"xa_syn", "xb_syn", "xc_syn"};
  return kIds;
}

std::vector<Document> GenerateSynthetic(const std::string &dataset_id,
                                        int documents, uint64_t seed,
                                        const std::string &split) {
  const Lexicon lex = MakeLexicon(dataset_id);
  std::mt19937_64 rng(seed ^ std::hash<std::string>{}(dataset_id + split));
  auto pick = [&](const std::vector<std::string> &list) -> const std::string & {
    return list[std::uniform_int_distribution<size_t>(0, list.size() - 1)(rng)];
  };
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  std::vector<Document> docs;
  for (int d = 0; d < documents; ++d) {
    Document doc;
    char name[64];
    std::snprintf(name, sizeof(name), "%s-%s-%03d", dataset_id.c_str(),
                  split.c_str(), d + 1);
    doc.doc_id = name;
    doc.dataset_id = dataset_id;
    doc.language = LanguageOf(dataset_id);
    DocumentWriter writer(doc);

    std::array<std::string, 2> persons = {pick(lex.names[0]), pick(lex.names[1])};
    std::array<bool, 2> introduced = {false, false};
    const int sentences = std::uniform_int_distribution<int>(5, 8)(rng);
    for (int s = 0; s < sentences; ++s) {
      writer.StartSentence(doc.doc_id + "-" + std::to_string(s + 1));
      if (lex.passive && chance(0.15)) {
        // det noun VERB-pass . with an agent empty node after the verb.
        const std::string &noun = pick(lex.nouns);
        int det = writer.Word(lex.det, "DET");
        int n = writer.Word(noun, "NOUN");
        int verb = writer.Word(pick(lex.passives) + "e", "VERB", "Voice=Pass");
        writer.Empty("#Gen", lex.xpos, "_", writer.WordId(verb), "obl:agent");
        int dot = writer.Word(".", "PUNCT");
        writer.Attach(det, n, "det");
        writer.Attach(n, verb, "nsubj:pass");
        writer.Attach(verb, -1, "root");
        writer.Attach(dot, verb, "punct");
        writer.AddMention("o:" + noun, "object", det, n, n);
        writer.FinishSentence();
        continue;
      }

      int gender = chance(0.5) ? 1 : 0;
      enum { kName, kPronoun, kZero } subject = kName;
      if (introduced[gender]) {
        double r = std::uniform_real_distribution<double>(0, 1)(rng);
        if (r < 0.35) {
          subject = kName;
        } else if (r < 0.65 || !lex.pro_drop) {
          subject = kPronoun;
        } else {
          subject = kZero;
        }
      }
      const std::string key = "p:" + std::to_string(gender);
      double object_roll = std::uniform_real_distribution<double>(0, 1)(rng);
      bool transitive = object_roll < 0.85;
      const std::string verb_form =
          (transitive ? pick(lex.transitive) : pick(lex.intransitive)) +
          lex.agreement[gender];

      int subj = -1, verb = -1;
      if (subject == kZero) {
        verb = writer.Word(verb_form, "VERB");
        int node = writer.Empty("#PersPron", lex.xpos, lex.feats,
                                writer.WordId(verb), "nsubj");
        writer.AddMention(key, "person", node, node, node);
      } else {
        subj = subject == kName
                   ? writer.Word(persons[gender], "PROPN")
                   : writer.Word(lex.pronouns[gender], "PRON",
                                 gender ? "Gender=Fem" : "Gender=Masc");
        verb = writer.Word(verb_form, "VERB");
        writer.Attach(subj, verb, "nsubj");
        writer.AddMention(key, "person", subj, subj, subj);
      }
      introduced[gender] = true;
      writer.Attach(verb, -1, "root");

      if (transitive) {
        int other = 1 - gender;
        if (object_roll < 0.45) {
          const std::string &noun = pick(lex.nouns);
          int det = writer.Word(lex.det, "DET");
          int n = writer.Word(noun, "NOUN");
          writer.Attach(det, n, "det");
          writer.Attach(n, verb, "obj");
          writer.AddMention("o:" + noun, "object", det, n, n);
        } else if (object_roll < 0.70) {
          const std::string &noun = pick(lex.nouns);
          int det = writer.Word(lex.det, "DET");
          int n = writer.Word(noun, "NOUN");
          int of = writer.Word(lex.of, "ADP");
          int owner = writer.Word(persons[other], "PROPN");
          writer.Attach(det, n, "det");
          writer.Attach(n, verb, "obj");
          writer.Attach(of, owner, "case");
          writer.Attach(owner, n, "nmod");
          writer.AddMention("o:" + noun + ":" + persons[other], "object", det,
                            owner, n);
          writer.AddMention("p:" + std::to_string(other), "person", owner, owner,
                            owner);
          introduced[other] = true;
        } else {
          int obj = writer.Word(persons[other], "PROPN");
          writer.Attach(obj, verb, "obj");
          writer.AddMention("p:" + std::to_string(other), "person", obj, obj, obj);
          introduced[other] = true;
        }
      }
      int dot = writer.Word(".", "PUNCT");
      writer.Attach(dot, verb, "punct");
      writer.FinishSentence();
    }
    writer.Finish();
    auto &comments = doc.sentences.front().comments;
    comments.insert(comments.begin(), " newdoc id = " + doc.doc_id);
    if (d == 0) {
      comments.insert(comments.begin() + 1, " global.Entity = eid-etype-head-other");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::filesystem::path DatasetFile(const std::filesystem::path &root,
                                  const std::string &dataset_id,
                                  const std::string &split) {
  return root / dataset_id / (dataset_id + "-corefud-" + split + ".conllu");
}

void WriteSyntheticCorpus(const std::filesystem::path &root,
                          const SyntheticCorpusOptions &options) {
  const auto &ids = SyntheticDatasets();
  for (size_t i = 0; i < ids.size(); ++i) {
    int train = i < options.train_documents.size() ? options.train_documents[i] : 20;
    WriteFile(DatasetFile(root, ids[i], "train"),
              SerializeConllu(GenerateSynthetic(ids[i], train, options.seed, "train")));
    WriteFile(DatasetFile(root, ids[i], "dev"),
              SerializeConllu(GenerateSynthetic(ids[i], options.dev_documents,
                                                options.seed, "dev")));
  }
}

}  // namespace corefpipe
