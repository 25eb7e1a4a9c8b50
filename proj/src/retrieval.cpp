#include "sensemt/retrieval.hpp"

#include "sensemt/rng.hpp"

#include <algorithm>
#include <unordered_set>

#include <fmt/format.h>

namespace sensemt {

std::string_view to_string(FallbackPolicy policy) {
  return policy == FallbackPolicy::matched_only ? "matched-only" : "pad-random";
}

FallbackPolicy parse_fallback_policy(std::string_view name) {
  if (name == "matched-only") return FallbackPolicy::matched_only;
  if (name == "pad-random") return FallbackPolicy::pad_random;
  throw Error(fmt::format("unknown fallback policy '{}'", name));
}

std::optional<TargetSenseChoice> select_target_sense(const AnnotatedSentence& sentence,
                                                     const SenseIndex& index) {
  std::optional<TargetSenseChoice> best;
  std::uint64_t best_freq = 0;
  for (std::size_t pos = 0; pos < sentence.tokens.size(); ++pos) {
    const auto& tok = sentence.tokens[pos];
    if (!tok.sense) continue;
    const auto degree = index.polysemy_degree(tok.lemma);
    const auto freq = index.sense_frequency(*tok.sense);
    // Strict comparisons keep the earliest position on full ties.
    if (!best || degree > best->degree || (degree == best->degree && freq > best_freq)) {
      best = TargetSenseChoice{pos, tok.lemma, *tok.sense, degree};
      best_freq = freq;
    }
  }
  return best;
}

std::vector<std::string> sense_candidates(const SenseIndex& index, const SenseId& sense,
                                          std::string_view exclude_id) {
  std::vector<std::string> ids;
  for (const auto& p : index.postings(sense)) {
    if (p.sentence_id == exclude_id) continue;
    // Postings are sorted by sentence id, so repeats are adjacent.
    if (!ids.empty() && ids.back() == p.sentence_id) continue;
    ids.push_back(p.sentence_id);
  }
  return ids;
}

DemonstrationSet sample_demonstrations(const SenseIndex& index, const CorpusView& corpus,
                                       const SenseId& sense, std::size_t k, std::uint64_t seed,
                                       std::string_view exclude_id) {
  if (k == 0) throw Error("k must be at least 1");
  DemonstrationSet set;
  set.requested_k = k;
  set.seed = seed;

  auto ids = sense_candidates(index, sense, exclude_id);
  // Index and corpus may disagree if the index was built from a superset.
  std::erase_if(ids, [&](const std::string& id) { return corpus.find(id) == nullptr; });

  Rng rng(seed);
  const auto take = std::min(k, ids.size());
  partial_shuffle(std::span<std::string>(ids), take, rng);
  for (std::size_t i = 0; i < take; ++i) set.demos.push_back(*corpus.find(ids[i]));
  set.matched_k = take;
  return set;
}

namespace {

/// Appends up to `count` uniformly drawn pairs that are neither the query
/// nor already present.
void pad_with_random(DemonstrationSet& set, const CorpusView& corpus, std::size_t count, Rng& rng,
                     std::string_view exclude_id) {
  std::unordered_set<std::string_view> taken;
  for (const auto& d : set.demos) taken.insert(d.id());
  std::vector<std::size_t> pool;
  pool.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& id = corpus.pairs()[i].id();
    if (id != exclude_id && !taken.contains(id)) pool.push_back(i);
  }
  const auto take = std::min(count, pool.size());
  partial_shuffle(std::span<std::size_t>(pool), take, rng);
  for (std::size_t i = 0; i < take; ++i) set.demos.push_back(corpus.pairs()[pool[i]]);
}

}  // namespace

DemonstrationSet sample_random(const CorpusView& corpus, std::size_t k, std::uint64_t seed,
                               std::string_view exclude_id) {
  DemonstrationSet set;
  set.requested_k = k;
  set.seed = seed;
  Rng rng(seed);
  pad_with_random(set, corpus, k, rng, exclude_id);
  return set;
}

DemonstrationSet retrieve_similar(const AnnotatedSentence& sentence, const SenseIndex& index,
                                  const CorpusView& corpus, std::size_t k, std::uint64_t seed,
                                  FallbackPolicy fallback) {
  if (corpus.size() == 0 || k == 0) {
    DemonstrationSet empty;
    empty.requested_k = k;
    empty.seed = seed;
    return empty;
  }
  auto choice = select_target_sense(sentence, index);
  if (!choice) {
    auto set = sample_random(corpus, k, seed, sentence.id);
    set.fallback_used = true;
    return set;
  }
  auto set = sample_demonstrations(index, corpus, choice->sense, k, seed, sentence.id);
  set.target = choice;
  if (set.matched_k < k && fallback == FallbackPolicy::pad_random) {
    // Separate stream so padding never perturbs the matched sample.
    Rng pad_rng(seed ^ 0x9E3779B97F4A7C15ULL);
    const auto before = set.demos.size();
    pad_with_random(set, corpus, k - set.matched_k, pad_rng, sentence.id);
    set.fallback_used = set.demos.size() > before;
  }
  return set;
}

CoverageReport coverage_report(const std::vector<ParallelPair>& corpus, const SenseIndex& index,
                               std::size_t k, Exec exec) {
  CoverageReport report;
  std::size_t covered = 0;
  std::size_t eligible = 0;
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
  auto check = [&](std::ptrdiff_t i, std::size_t& cov, std::size_t& elig) {
    const auto& s = corpus[static_cast<std::size_t>(i)].source;
    auto choice = select_target_sense(s, index);
    if (!choice) return;
    ++elig;
    if (k == 0 || sense_candidates(index, choice->sense, s.id).size() >= k) ++cov;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : covered, eligible)
    for (std::ptrdiff_t i = 0; i < n; ++i) check(i, covered, eligible);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) check(i, covered, eligible);
  }
  report.covered = covered;
  report.eligible = eligible;
  report.zero_denominator = eligible == 0;
  report.fraction = eligible == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(eligible);
  return report;
}

}  // namespace sensemt
