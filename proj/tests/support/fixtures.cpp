#include "fixtures.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

namespace sensemt::testing {

AnnotatedSentence annotate(const std::string& id, const std::string& text,
                           const std::map<std::string, std::string>& senses) {
  AnnotatedSentence s;
  s.id = id;
  s.text = text;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    auto end = text.find(' ', pos);
    if (end == std::string::npos) end = text.size();
    AnnotatedToken t;
    t.surface = text.substr(pos, end - pos);
    for (char c : t.surface) t.lemma.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    t.start = pos;
    t.end = end;
    if (auto it = senses.find(t.lemma); it != senses.end()) t.sense = SenseId(it->second);
    s.tokens.push_back(std::move(t));
    pos = end;
  }
  return s;
}

ParallelPair make_pair(const std::string& id, const std::string& text, const std::string& target,
                       const std::map<std::string, std::string>& senses, const std::string& src,
                       const std::string& tgt) {
  return ParallelPair{annotate(id, text, senses), target, src, tgt};
}

std::vector<ParallelPair> c0_corpus() {
  return {
      make_pair("s1", "I sat by the bank", "me senté junto a la orilla", {{"bank", "R"}}),
      make_pair("s2", "the bank approved the loan", "el banco aprobó el préstamo", {{"bank", "F"}}),
      make_pair("s3", "the bank was muddy", "la orilla estaba embarrada", {{"bank", "R"}}),
      make_pair("s4", "he plays bass", "él toca el bajo", {{"bass", "M"}}),
  };
}

std::vector<ParallelPair> random_corpus(Rng& rng, std::size_t max_sentences, std::size_t max_lemmas,
                                        std::size_t max_senses) {
  const auto lemma_count = 1 + uniform_below(rng, max_lemmas);
  std::vector<std::size_t> sense_count(lemma_count);
  for (auto& n : sense_count) n = 1 + uniform_below(rng, max_senses);
  const auto sentences = uniform_below(rng, max_sentences + 1);
  std::vector<ParallelPair> out;
  for (std::size_t i = 0; i < sentences; ++i) {
    ParallelPair p;
    p.source.id = fmt::format("g{:03}", i);
    p.target = fmt::format("t{}", i);
    p.src_lang = "en";
    p.tgt_lang = "de";
    const auto len = 1 + uniform_below(rng, 6);
    for (std::size_t k = 0; k < len; ++k) {
      const auto lemma = uniform_below(rng, lemma_count);
      if (!p.source.text.empty()) p.source.text += ' ';
      AnnotatedToken t;
      // Mixed case surfaces exercise lemma lowercasing.
      t.surface = uniform_below(rng, 2) ? fmt::format("W{}", lemma) : fmt::format("w{}", lemma);
      t.lemma = fmt::format("w{}", lemma);
      t.start = p.source.text.size();
      p.source.text += t.surface;
      t.end = p.source.text.size();
      if (uniform_below(rng, 10) < 6)
        t.sense = SenseId(fmt::format("w{}#s{}", lemma, uniform_below(rng, sense_count[lemma])));
      p.source.tokens.push_back(std::move(t));
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::size_t recount_degree(const std::vector<ParallelPair>& corpus, const std::string& lemma) {
  std::set<std::string> senses;
  for (const auto& p : corpus)
    for (const auto& t : p.source.tokens)
      if (t.sense && t.lemma == lemma) senses.insert(t.sense->str());
  return senses.size();
}

std::uint64_t recount_frequency(const std::vector<ParallelPair>& corpus, const SenseId& sense) {
  std::uint64_t n = 0;
  for (const auto& p : corpus)
    for (const auto& t : p.source.tokens)
      if (t.sense && *t.sense == sense) ++n;
  return n;
}

namespace {

std::size_t weighted_pick(Rng& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  // 53-bit uniform in [0, 1).
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace

SyntheticWorld make_synthetic_world(std::size_t corpus_size, std::size_t item_count, std::uint64_t seed,
                                    std::size_t min_per_sense) {
  SyntheticWorld w;
  w.lemmas = {
      {"bank", {"bank.finance", "bank.river"}, {"banco", "orilla"}, {0.7, 0.3}},
      {"bass", {"bass.music", "bass.fish"}, {"bajo", "lubina"}, {0.75, 0.25}},
      {"crane", {"crane.machine", "crane.bird"}, {"grua", "grulla"}, {0.65, 0.35}},
      {"bat", {"bat.animal", "bat.club"}, {"murcielago", "bate"}, {0.6, 0.4}},
      {"spring", {"spring.season", "spring.coil", "spring.water"}, {"primavera", "resorte", "manantial"},
       {0.6, 0.25, 0.15}},
      {"plant", {"plant.flora", "plant.factory"}, {"planta", "fabrica"}, {0.7, 0.3}},
      {"pitch", {"pitch.field", "pitch.tone", "pitch.throw"}, {"campo", "tono", "lanzamiento"},
       {0.5, 0.3, 0.2}},
      {"seal", {"seal.animal", "seal.stamp"}, {"foca", "sello"}, {0.55, 0.45}},
      {"match", {"match.game", "match.fire"}, {"partido", "cerilla"}, {0.7, 0.3}},
      {"blaze", {"blaze.fire", "blaze.mark"}, {"incendio", "lucero"}, {0.8, 0.2}},
  };
  w.fillers = {{"the", "el"},         {"near", "cerca"},    {"old", "viejo"},     {"green", "verde"},
               {"small", "pequeno"},  {"house", "casa"},    {"city", "ciudad"},   {"morning", "manana"},
               {"quiet", "tranquilo"}, {"big", "grande"},   {"red", "rojo"},      {"new", "nuevo"},
               {"road", "camino"},    {"today", "hoy"},     {"there", "alli"},    {"was", "estaba"},
               {"very", "muy"},       {"dark", "oscuro"},   {"north", "norte"},   {"with", "con"}};

  Rng rng(seed);
  auto sentence = [&](const std::string& id, std::size_t lemma, std::size_t sense) {
    const auto& L = w.lemmas[lemma];
    std::vector<std::pair<std::string, std::string>> words{{"the", "el"}, {L.word, L.forms[sense]}};
    const auto extra = 2 + uniform_below(rng, 3);
    for (std::size_t i = 0; i < extra; ++i) {
      // Skip the article so each sentence keeps a single "the".
      words.push_back(w.fillers[1 + uniform_below(rng, w.fillers.size() - 1)]);
    }
    std::string src;
    std::string tgt;
    for (const auto& [s, t] : words) {
      if (!src.empty()) {
        src += ' ';
        tgt += ' ';
      }
      src += s;
      tgt += t;
    }
    return make_pair(id, src, tgt, {{L.word, L.senses[sense]}});
  };

  std::size_t next_id = 0;
  for (std::size_t l = 0; l < w.lemmas.size(); ++l)
    for (std::size_t s = 0; s < w.lemmas[l].senses.size(); ++s)
      for (std::size_t r = 0; r < min_per_sense; ++r)
        w.corpus.push_back(sentence(fmt::format("c{:04}", next_id++), l, s));
  while (w.corpus.size() < corpus_size) {
    const auto l = uniform_below(rng, w.lemmas.size());
    const auto s = weighted_pick(rng, w.lemmas[l].weights);
    w.corpus.push_back(sentence(fmt::format("c{:04}", next_id++), l, s));
  }

  // Eval items cycle through lemmas and favour less frequent senses, the
  // cases where an unguided model falls back to the wrong reading.
  for (std::size_t i = 0; i < item_count; ++i) {
    const auto l = i % w.lemmas.size();
    const auto& L = w.lemmas[l];
    const auto round = i / w.lemmas.size();
    const std::size_t sense = round % 4 == 1 ? 0 : 1 + round % (L.senses.size() - 1);
    auto pair = sentence(fmt::format("e{:03}", i), l, sense);
    EvalItem item;
    item.id = pair.id();
    item.source = pair.source;
    item.good = {L.forms[sense]};
    for (std::size_t o = 0; o < L.forms.size(); ++o)
      if (o != sense) item.bad.push_back(L.forms[o]);
    item.src_lang = "en";
    item.tgt_lang = "es";
    w.items.push_back(std::move(item));
  }

  nlohmann::ordered_json lex;
  for (const auto& [word, target] : w.fillers) lex[word] = {{{"sense", ""}, {"target", target}}};
  for (const auto& L : w.lemmas) {
    auto forms = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < L.senses.size(); ++s) forms.push_back({{"sense", L.senses[s]}, {"target", L.forms[s]}});
    lex[L.word] = forms;
  }
  w.lexicon_json = lex.dump(2) + "\n";
  w.lexicon = MockLexicon::parse(w.lexicon_json);
  return w;
}

}  // namespace sensemt::testing
