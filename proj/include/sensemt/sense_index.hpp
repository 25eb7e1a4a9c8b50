#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sensemt/corpus.hpp"
#include "sensemt/exec.hpp"

namespace sensemt {

struct Posting {
  std::string sentence_id;
  std::uint32_t position = 0;  // token index within the sentence

  auto operator<=>(const Posting&) const = default;
  bool operator==(const Posting&) const = default;
};

/// Sense inventory of an annotated corpus.
///
/// Polysemy degree of a lemma is the number of distinct senses observed for
/// it in the indexed corpus; an optional override table (e.g. degrees taken
/// from a full knowledge base) takes precedence at query time. Sense
/// frequency is the number of annotated occurrences of a sense.
class SenseIndex {
 public:
  using LemmaSenses = std::map<std::string, std::set<SenseId>, std::less<>>;
  using SenseFreq = std::map<SenseId, std::uint64_t>;
  using Postings = std::map<SenseId, std::vector<Posting>>;

  SenseIndex() = default;

  std::uint32_t polysemy_degree(std::string_view lemma) const;
  std::uint64_t sense_frequency(const SenseId& sense) const;
  /// Sorted by (sentence id, position).
  std::span<const Posting> postings(const SenseId& sense) const;

  const LemmaSenses& lemma_senses() const noexcept { return lemma_senses_; }
  const SenseFreq& sense_freq() const noexcept { return sense_freq_; }
  const Postings& all_postings() const noexcept { return postings_; }
  const std::map<std::string, std::uint32_t, std::less<>>& degree_overrides() const noexcept {
    return degree_overrides_;
  }
  const std::string& corpus_id() const noexcept { return corpus_id_; }
  std::uint64_t total_sense_tokens() const noexcept { return total_sense_tokens_; }
  bool empty() const noexcept { return total_sense_tokens_ == 0; }

  void set_degree_overrides(std::map<std::string, std::uint32_t, std::less<>> overrides);

  /// Returns a description of the first broken invariant, or nothing.
  std::optional<std::string> check_invariants() const;

  bool operator==(const SenseIndex&) const = default;

 private:
  friend SenseIndex build_index(std::span<const ParallelPair>, std::string, Exec);
  friend SenseIndex load_index(const std::filesystem::path&);
  friend SenseIndex decode_index(std::string_view);

  LemmaSenses lemma_senses_;
  SenseFreq sense_freq_;
  Postings postings_;
  std::map<std::string, std::uint32_t, std::less<>> degree_overrides_;
  std::string corpus_id_;
  std::uint64_t total_sense_tokens_ = 0;
};

/// Builds the index. The parallel path folds per-thread shards and merges
/// them; both paths yield identical indexes for any input order.
SenseIndex build_index(std::span<const ParallelPair> pairs, std::string corpus_id,
                       Exec exec = Exec::parallel);

inline constexpr std::uint32_t kIndexFormatVersion = 1;

/// Versioned binary encoding, see docs/index_format.md.
std::string encode_index(const SenseIndex& index);
/// Throws FormatError on bad magic, newer version, truncation, checksum or
/// invariant failure.
SenseIndex decode_index(std::string_view bytes);

void save_index(const SenseIndex& index, const std::filesystem::path& path);
SenseIndex load_index(const std::filesystem::path& path);

/// Reads "lemma<TAB>degree" lines.
std::map<std::string, std::uint32_t, std::less<>> parse_degree_overrides(std::string_view contents);

}  // namespace sensemt
