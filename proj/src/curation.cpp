#include "sensemt/curation.hpp"

#include "sensemt/io.hpp"
#include "sensemt/prompt.hpp"
#include "sensemt/rng.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

namespace sensemt {

std::optional<AmbiguityScore> score_sentence(const AnnotatedSentence& sentence,
                                             const SenseIndex& index) {
  std::optional<AmbiguityScore> score;
  for (const auto& tok : sentence.tokens) {
    if (!tok.sense) continue;
    const auto degree = index.polysemy_degree(tok.lemma);
    const auto freq = index.sense_frequency(*tok.sense);
    if (!score) {
      score = AmbiguityScore{degree, freq};
    } else {
      score->max_degree = std::max(score->max_degree, degree);
      score->min_freq = std::min(score->min_freq, freq);
    }
  }
  return score;
}

std::vector<ScoredSentence> score_corpus(const std::vector<ParallelPair>& corpus,
                                         const SenseIndex& index, Exec exec) {
  std::vector<std::optional<AmbiguityScore>> scores(corpus.size());
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      scores[static_cast<std::size_t>(i)] = score_sentence(corpus[static_cast<std::size_t>(i)].source, index);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i)
      scores[static_cast<std::size_t>(i)] = score_sentence(corpus[static_cast<std::size_t>(i)].source, index);
  }
  std::vector<ScoredSentence> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (scores[i]) out.push_back({corpus[i].id(), *scores[i]});
  }
  return out;
}

CurationRanking rank_and_interleave(std::vector<ScoredSentence> scored, std::size_t target_size) {
  CurationRanking ranking;
  ranking.target_size = target_size;

  auto by_degree = scored;
  std::sort(by_degree.begin(), by_degree.end(), [](const auto& a, const auto& b) {
    if (a.score.max_degree != b.score.max_degree) return a.score.max_degree > b.score.max_degree;
    if (a.score.min_freq != b.score.min_freq) return a.score.min_freq < b.score.min_freq;
    return a.id < b.id;
  });
  auto& by_rarity = scored;
  std::sort(by_rarity.begin(), by_rarity.end(), [](const auto& a, const auto& b) {
    if (a.score.min_freq != b.score.min_freq) return a.score.min_freq < b.score.min_freq;
    if (a.score.max_degree != b.score.max_degree) return a.score.max_degree > b.score.max_degree;
    return a.id < b.id;
  });
  for (const auto& s : by_degree) ranking.by_degree.push_back(s.id);
  for (const auto& s : by_rarity) ranking.by_rarity.push_back(s.id);

  const std::array<const std::vector<std::string>*, 2> lists{&ranking.by_degree, &ranking.by_rarity};
  std::array<std::size_t, 2> cursor{0, 0};
  std::unordered_set<std::string_view> taken;
  const auto limit = std::min(target_size, ranking.by_degree.size());
  std::size_t turn = 0;  // degree list first, so an odd size favours it
  while (ranking.selected.size() < limit) {
    // Advance past ids the other list already contributed.
    auto next_free = [&](std::size_t which) -> const std::string* {
      auto& c = cursor[which];
      const auto& list = *lists[which];
      while (c < list.size() && taken.contains(list[c])) ++c;
      return c < list.size() ? &list[c] : nullptr;
    };
    const std::string* pick = next_free(turn);
    if (!pick) pick = next_free(1 - turn);
    if (!pick) break;
    taken.insert(*pick);
    ranking.selected.push_back(*pick);
    turn = 1 - turn;
  }
  return ranking;
}

CurationRanking rank_and_interleave(const std::vector<ParallelPair>& corpus, const SenseIndex& index,
                                    std::size_t target_size, Exec exec) {
  return rank_and_interleave(score_corpus(corpus, index, exec), target_size);
}

Split split_validation(const std::vector<std::string>& selected, std::size_t holdout,
                       std::uint64_t seed) {
  if (holdout > 0 && holdout >= selected.size())
    throw Error(fmt::format("holdout {} must be smaller than the selection size {}", holdout,
                            selected.size()));
  std::vector<std::size_t> order(selected.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  partial_shuffle(std::span<std::size_t>(order), holdout, rng);
  std::vector<bool> is_valid(selected.size(), false);
  for (std::size_t i = 0; i < holdout; ++i) is_valid[order[i]] = true;
  Split split;
  for (std::size_t i = 0; i < selected.size(); ++i)
    (is_valid[i] ? split.valid : split.train).push_back(selected[i]);
  return split;
}

std::string render_finetune_manifest(const FinetuneConfig& c, const Provenance& p,
                                     std::size_t train_records, std::size_t valid_records) {
  nlohmann::ordered_json m;
  m["format"] = "alpaca";
  m["lora"] = {{"rank", c.lora_rank},
               {"alpha", c.lora_alpha},
               {"dropout", c.lora_dropout},
               {"target_modules", c.lora_targets}};
  m["training"] = {{"effective_batch_size", c.effective_batch_size},
                   {"learning_rate", c.learning_rate},
                   {"max_length", c.max_length},
                   {"epochs", c.epochs},
                   {"shuffle_each_epoch", c.shuffle_each_epoch},
                   {"checkpoint_selection", c.checkpoint_selection}};
  m["inference"] = {{"beam_size", c.inference_beam_size},
                    {"max_new_tokens", c.inference_max_new_tokens}};
  m["data"] = {{"train_file", "train.jsonl"},
               {"valid_file", "valid.jsonl"},
               {"train_records", train_records},
               {"valid_records", valid_records},
               {"holdout", p.holdout},
               {"target_size", p.target_size}};
  m["provenance"] = {{"corpus_id", p.corpus_id},
                     {"index_checksum", p.index_checksum},
                     {"seed", p.seed},
                     {"tool_version", SENSEMT_VERSION}};
  return m.dump(2) + "\n";
}

EmittedDataset emit_finetune_dataset(const std::vector<std::string>& train,
                                     const std::vector<std::string>& valid,
                                     const CorpusView& corpus, const std::filesystem::path& out_dir,
                                     const Provenance& provenance, const FinetuneConfig& config) {
  if (train.empty()) throw Error("training set is empty");
  auto render = [&](const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
      const auto* pair = corpus.find(id);
      if (!pair) throw Error(fmt::format("sentence id '{}' is not in the corpus", id));
      out += serialize_alpaca(render_alpaca_record(*pair));
      out += '\n';
    }
    return out;
  };
  // Render everything before touching the filesystem.
  const auto train_text = render(train);
  const auto valid_text = render(valid);
  EmittedDataset out;
  out.train_path = out_dir / "train.jsonl";
  out.valid_path = out_dir / "valid.jsonl";
  out.manifest_path = out_dir / "manifest.json";
  out.train_records = train.size();
  out.valid_records = valid.size();
  io::write_atomic(out.train_path, train_text);
  io::write_atomic(out.valid_path, valid_text);
  io::write_atomic(out.manifest_path,
                   render_finetune_manifest(config, provenance, train.size(), valid.size()));
  return out;
}

}  // namespace sensemt
