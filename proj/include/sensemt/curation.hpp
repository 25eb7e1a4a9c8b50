#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sensemt/corpus.hpp"
#include "sensemt/exec.hpp"
#include "sensemt/sense_index.hpp"

namespace sensemt {

struct AmbiguityScore {
  std::uint32_t max_degree = 0;  // over the sentence's sense-bearing lemmas
  std::uint64_t min_freq = 0;    // over the sentence's senses

  bool operator==(const AmbiguityScore&) const = default;
};

std::optional<AmbiguityScore> score_sentence(const AnnotatedSentence& sentence,
                                             const SenseIndex& index);

struct ScoredSentence {
  std::string id;
  AmbiguityScore score;
};

/// Scores every sentence, dropping those without senses. Output keeps corpus
/// order.
std::vector<ScoredSentence> score_corpus(const std::vector<ParallelPair>& corpus,
                                         const SenseIndex& index, Exec exec = Exec::parallel);

struct CurationRanking {
  std::vector<std::string> by_degree;  // greatest max_degree first
  std::vector<std::string> by_rarity;  // smallest min_freq first
  std::vector<std::string> selected;
  std::size_t target_size = 0;
};

/// Ranks scoreable sentences two ways and alternates between the rankings,
/// degree first, skipping ids already taken, until `target_size` ids are
/// selected or both rankings are exhausted. Ties: the opposite score, then id.
CurationRanking rank_and_interleave(const std::vector<ParallelPair>& corpus,
                                    const SenseIndex& index, std::size_t target_size,
                                    Exec exec = Exec::parallel);
CurationRanking rank_and_interleave(std::vector<ScoredSentence> scored, std::size_t target_size);

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> valid;
};

inline constexpr std::size_t kDefaultHoldout = 500;

/// Seeded random holdout; both halves keep the input order.
Split split_validation(const std::vector<std::string>& selected, std::size_t holdout,
                       std::uint64_t seed);

/// LoRA fine-tuning hyperparameters written to the manifest.
struct FinetuneConfig {
  int lora_rank = 8;
  int lora_alpha = 8;
  double lora_dropout = 0.05;
  std::vector<std::string> lora_targets{"query", "key", "value"};
  int effective_batch_size = 32;
  double learning_rate = 3e-4;
  int max_length = 256;
  int epochs = 5;
  bool shuffle_each_epoch = true;
  std::string checkpoint_selection = "validation_cross_entropy";
  int inference_beam_size = 3;
  int inference_max_new_tokens = 150;
};

struct Provenance {
  std::string corpus_id;
  std::string index_checksum;
  std::uint64_t seed = 0;
  std::size_t holdout = kDefaultHoldout;
  std::size_t target_size = 0;
};

struct EmittedDataset {
  std::filesystem::path train_path;
  std::filesystem::path valid_path;
  std::filesystem::path manifest_path;
  std::size_t train_records = 0;
  std::size_t valid_records = 0;
};

/// Writes train.jsonl, valid.jsonl (Alpaca records) and manifest.json
/// atomically into out_dir.
EmittedDataset emit_finetune_dataset(const std::vector<std::string>& train,
                                     const std::vector<std::string>& valid,
                                     const CorpusView& corpus,
                                     const std::filesystem::path& out_dir,
                                     const Provenance& provenance,
                                     const FinetuneConfig& config = {});

std::string render_finetune_manifest(const FinetuneConfig& config, const Provenance& provenance,
                                     std::size_t train_records, std::size_t valid_records);

}  // namespace sensemt
