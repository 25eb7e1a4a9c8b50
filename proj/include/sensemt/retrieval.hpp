#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensemt/corpus.hpp"
#include "sensemt/exec.hpp"
#include "sensemt/sense_index.hpp"

namespace sensemt {

struct TargetSenseChoice {
  std::size_t token_position = 0;
  std::string lemma;
  SenseId sense;
  std::uint32_t degree = 0;

  bool operator==(const TargetSenseChoice&) const = default;
};

enum class FallbackPolicy {
  matched_only,  // return fewer than k demonstrations
  pad_random,    // top up with random non-self pairs
};

std::string_view to_string(FallbackPolicy policy);
FallbackPolicy parse_fallback_policy(std::string_view name);

struct DemonstrationSet {
  std::vector<ParallelPair> demos;
  std::size_t requested_k = 0;
  std::size_t matched_k = 0;
  bool fallback_used = false;
  std::uint64_t seed = 0;
  std::optional<TargetSenseChoice> target;

  bool operator==(const DemonstrationSet&) const = default;
};

/// Most polysemous sense-bearing token. Ties go to the higher frequency of
/// the borne sense, then to the lowest position.
std::optional<TargetSenseChoice> select_target_sense(const AnnotatedSentence& sentence,
                                                     const SenseIndex& index);

/// Distinct sentence ids from the sense's posting list, minus `exclude_id`.
std::vector<std::string> sense_candidates(const SenseIndex& index, const SenseId& sense,
                                          std::string_view exclude_id);

/// Uniform sample without replacement of up to k same-sense pairs.
DemonstrationSet sample_demonstrations(const SenseIndex& index, const CorpusView& corpus,
                                       const SenseId& sense, std::size_t k, std::uint64_t seed,
                                       std::string_view exclude_id);

/// Uniform sample of k pairs from the whole corpus (the naive baseline).
DemonstrationSet sample_random(const CorpusView& corpus, std::size_t k, std::uint64_t seed,
                               std::string_view exclude_id);

/// Target-sense selection followed by same-sense sampling.
DemonstrationSet retrieve_similar(const AnnotatedSentence& sentence, const SenseIndex& index,
                                  const CorpusView& corpus, std::size_t k, std::uint64_t seed,
                                  FallbackPolicy fallback = FallbackPolicy::matched_only);

struct CoverageReport {
  std::size_t covered = 0;
  std::size_t eligible = 0;  // sentences with >= 1 sense-bearing token
  double fraction = 0.0;
  bool zero_denominator = false;
};

/// Fraction of sense-bearing sentences whose target sense has at least k
/// non-self matches.
CoverageReport coverage_report(const std::vector<ParallelPair>& corpus, const SenseIndex& index,
                               std::size_t k, Exec exec = Exec::parallel);

}  // namespace sensemt
