#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sensemt/corpus.hpp"
#include "sensemt/mock_model.hpp"
#include "sensemt/rng.hpp"

namespace sensemt::testing {

/// Whitespace-tokenized sentence; tokens whose lowercase surface is a key of
/// `senses` carry that sense.
AnnotatedSentence annotate(const std::string& id, const std::string& text,
                           const std::map<std::string, std::string>& senses = {});

ParallelPair make_pair(const std::string& id, const std::string& text, const std::string& target,
                       const std::map<std::string, std::string>& senses = {},
                       const std::string& src = "en", const std::string& tgt = "es");

/// s1 "I sat by the bank" (bank:R), s2 "the bank approved the loan" (bank:F),
/// s3 "the bank was muddy" (bank:R), s4 "he plays bass" (bass:M).
std::vector<ParallelPair> c0_corpus();

inline const SenseId kR{"R"};
inline const SenseId kF{"F"};
inline const SenseId kM{"M"};

/// Random annotated corpus: up to `max_sentences` sentences over up to
/// `max_lemmas` lemmas with up to `max_senses` senses each.
std::vector<ParallelPair> random_corpus(Rng& rng, std::size_t max_sentences = 50,
                                        std::size_t max_lemmas = 8, std::size_t max_senses = 4);

/// Brute-force statistics computed straight from the tokens.
std::size_t recount_degree(const std::vector<ParallelPair>& corpus, const std::string& lemma);
std::uint64_t recount_frequency(const std::vector<ParallelPair>& corpus, const SenseId& sense);

/// Synthetic disambiguation world: ambiguous English lemmas with
/// sense-specific Spanish forms plus unambiguous filler words.
struct SyntheticWorld {
  struct Lemma {
    std::string word;
    std::vector<std::string> senses;  // most frequent first
    std::vector<std::string> forms;   // parallel to senses
    std::vector<double> weights;
  };
  std::vector<Lemma> lemmas;
  std::vector<std::pair<std::string, std::string>> fillers;  // word -> translation

  std::vector<ParallelPair> corpus;
  std::vector<EvalItem> items;
  MockLexicon lexicon;
  std::string lexicon_json;
};

/// Builds `corpus_size` sentences with exactly one ambiguous word each and
/// `item_count` eval items (not part of the corpus). Every (lemma, sense)
/// pair occurs at least `min_per_sense` times in the corpus.
SyntheticWorld make_synthetic_world(std::size_t corpus_size, std::size_t item_count, std::uint64_t seed,
                                    std::size_t min_per_sense = 4);

}  // namespace sensemt::testing
