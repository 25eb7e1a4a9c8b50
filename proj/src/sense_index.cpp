#include "sensemt/sense_index.hpp"

#include "sensemt/digest.hpp"
#include "sensemt/io.hpp"
#include "sensemt/text.hpp"

#include <algorithm>
#include <cstring>

#include <fmt/format.h>
#include <omp.h>

namespace sensemt {

std::uint32_t SenseIndex::polysemy_degree(std::string_view lemma) const {
  if (auto it = degree_overrides_.find(lemma); it != degree_overrides_.end()) return it->second;
  auto it = lemma_senses_.find(lemma);
  return it == lemma_senses_.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
}

std::uint64_t SenseIndex::sense_frequency(const SenseId& sense) const {
  auto it = sense_freq_.find(sense);
  return it == sense_freq_.end() ? 0 : it->second;
}

std::span<const Posting> SenseIndex::postings(const SenseId& sense) const {
  auto it = postings_.find(sense);
  if (it == postings_.end()) return {};
  return it->second;
}

void SenseIndex::set_degree_overrides(std::map<std::string, std::uint32_t, std::less<>> overrides) {
  degree_overrides_ = std::move(overrides);
}

std::optional<std::string> SenseIndex::check_invariants() const {
  std::uint64_t freq_sum = 0;
  std::uint64_t posting_sum = 0;
  for (const auto& [lemma, senses] : lemma_senses_) {
    if (senses.empty()) return fmt::format("lemma '{}' has no senses", lemma);
  }
  for (const auto& [sense, freq] : sense_freq_) {
    freq_sum += freq;
    auto it = postings_.find(sense);
    const std::size_t len = it == postings_.end() ? 0 : it->second.size();
    if (len != freq)
      return fmt::format("sense '{}': frequency {} but {} postings", sense.str(), freq, len);
  }
  for (const auto& [sense, list] : postings_) {
    posting_sum += list.size();
    if (!sense_freq_.contains(sense)) return fmt::format("postings for unknown sense '{}'", sense.str());
    if (!std::is_sorted(list.begin(), list.end()))
      return fmt::format("postings for '{}' are not sorted", sense.str());
  }
  if (freq_sum != total_sense_tokens_ || posting_sum != total_sense_tokens_)
    return fmt::format("total {} disagrees with frequency sum {} / posting sum {}", total_sense_tokens_,
                       freq_sum, posting_sum);
  return std::nullopt;
}

namespace {

struct Shard {
  SenseIndex::LemmaSenses lemma_senses;
  SenseIndex::SenseFreq sense_freq;
  SenseIndex::Postings postings;
};

void fold_into(Shard& shard, std::span<const ParallelPair> pairs) {
  for (const auto& pair : pairs) {
    const auto& s = pair.source;
    for (std::size_t pos = 0; pos < s.tokens.size(); ++pos) {
      const auto& tok = s.tokens[pos];
      if (!tok.sense) continue;
      shard.lemma_senses[tok.lemma].insert(*tok.sense);
      ++shard.sense_freq[*tok.sense];
      shard.postings[*tok.sense].push_back({s.id, static_cast<std::uint32_t>(pos)});
    }
  }
}

void merge_into(Shard& into, Shard&& from) {
  for (auto& [lemma, senses] : from.lemma_senses) into.lemma_senses[lemma].merge(senses);
  for (const auto& [sense, n] : from.sense_freq) into.sense_freq[sense] += n;
  for (auto& [sense, list] : from.postings) {
    auto& dst = into.postings[sense];
    dst.insert(dst.end(), std::make_move_iterator(list.begin()), std::make_move_iterator(list.end()));
  }
}

}  // namespace

SenseIndex build_index(std::span<const ParallelPair> pairs, std::string corpus_id, Exec exec) {
  Shard merged;
  if (exec == Exec::serial || pairs.size() < 2) {
    fold_into(merged, pairs);
  } else {
    const auto shard_count = static_cast<std::size_t>(
        std::max(1, std::min<int>(omp_get_max_threads(), static_cast<int>(pairs.size()))));
    std::vector<Shard> shards(shard_count);
    const std::size_t chunk = (pairs.size() + shard_count - 1) / shard_count;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(shard_count); ++i) {
      const std::size_t lo = static_cast<std::size_t>(i) * chunk;
      const std::size_t hi = std::min(pairs.size(), lo + chunk);
      if (lo < hi) fold_into(shards[static_cast<std::size_t>(i)], pairs.subspan(lo, hi - lo));
    }
    for (auto& shard : shards) merge_into(merged, std::move(shard));
  }

  SenseIndex index;
  index.corpus_id_ = std::move(corpus_id);
  index.lemma_senses_ = std::move(merged.lemma_senses);
  index.sense_freq_ = std::move(merged.sense_freq);
  index.postings_ = std::move(merged.postings);
  for (auto& [sense, list] : index.postings_) std::sort(list.begin(), list.end());
  for (const auto& [sense, n] : index.sense_freq_) index.total_sense_tokens_ += n;
  return index;
}

namespace {

constexpr char kMagic[8] = {'S', 'E', 'N', 'S', 'E', 'I', 'D', 'X'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  std::string& buffer() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::string_view take(std::size_t n) {
    if (in_.size() - pos_ < n) throw FormatError("index file is truncated");
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() {
    auto s = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[i])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    auto s = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[i])) << (8 * i);
    return v;
  }
  std::string str() {
    const auto n = u32();
    return std::string(take(n));
  }
  SenseId sense() {
    try {
      return SenseId(str());
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(fmt::format("index file holds an invalid sense id: {}", e.what()));
    }
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_index(const SenseIndex& index) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kIndexFormatVersion);
  w.str(index.corpus_id());
  w.u64(index.total_sense_tokens());
  w.u32(static_cast<std::uint32_t>(index.lemma_senses().size()));
  for (const auto& [lemma, senses] : index.lemma_senses()) {
    w.str(lemma);
    w.u32(static_cast<std::uint32_t>(senses.size()));
    for (const auto& s : senses) w.str(s.str());
  }
  w.u32(static_cast<std::uint32_t>(index.sense_freq().size()));
  for (const auto& [sense, freq] : index.sense_freq()) {
    w.str(sense.str());
    w.u64(freq);
    auto list = index.postings(sense);
    w.u32(static_cast<std::uint32_t>(list.size()));
    for (const auto& p : list) {
      w.str(p.sentence_id);
      w.u32(p.position);
    }
  }
  w.u32(static_cast<std::uint32_t>(index.degree_overrides().size()));
  for (const auto& [lemma, degree] : index.degree_overrides()) {
    w.str(lemma);
    w.u32(degree);
  }
  const auto digest = sha256(w.buffer());
  w.bytes(digest.data(), digest.size());
  return std::move(w.buffer());
}

SenseIndex decode_index(std::string_view bytes) {
  if (bytes.empty()) throw FormatError("index file is empty");
  Reader r(bytes);
  if (std::memcmp(r.take(sizeof kMagic).data(), kMagic, sizeof kMagic) != 0)
    throw FormatError("not a sense index file (bad magic)");
  const auto version = r.u32();
  if (version > kIndexFormatVersion)
    throw FormatError(fmt::format("index format version {} is newer than supported version {}", version,
                                  kIndexFormatVersion));
  if (version == 0) throw FormatError("index format version 0 is invalid");
  if (bytes.size() < 32 + sizeof kMagic + 4) throw FormatError("index file is truncated");

  SenseIndex index;
  index.corpus_id_ = r.str();
  index.total_sense_tokens_ = r.u64();
  const auto lemma_count = r.u32();
  for (std::uint32_t i = 0; i < lemma_count; ++i) {
    auto lemma = r.str();
    auto& senses = index.lemma_senses_[lemma];
    const auto n = r.u32();
    for (std::uint32_t j = 0; j < n; ++j) senses.insert(r.sense());
  }
  const auto sense_count = r.u32();
  for (std::uint32_t i = 0; i < sense_count; ++i) {
    auto sense = r.sense();
    index.sense_freq_[sense] = r.u64();
    auto& list = index.postings_[sense];
    const auto n = r.u32();
    for (std::uint32_t j = 0; j < n; ++j) {
      Posting p;
      p.sentence_id = r.str();
      p.position = r.u32();
      list.push_back(std::move(p));
    }
  }
  const auto override_count = r.u32();
  for (std::uint32_t i = 0; i < override_count; ++i) {
    auto lemma = r.str();
    index.degree_overrides_[lemma] = r.u32();
  }
  const auto payload_size = r.pos();
  const auto stored = r.take(32);
  if (!r.done()) throw FormatError("trailing bytes after index checksum");
  const auto digest = sha256(bytes.substr(0, payload_size));
  if (std::memcmp(stored.data(), digest.data(), digest.size()) != 0)
    throw FormatError("index checksum mismatch");
  if (auto problem = index.check_invariants()) throw FormatError("index invariant violated: " + *problem);
  return index;
}

void save_index(const SenseIndex& index, const std::filesystem::path& path) {
  io::write_atomic(path, encode_index(index));
}

SenseIndex load_index(const std::filesystem::path& path) {
  try {
    return decode_index(io::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::map<std::string, std::uint32_t, std::less<>> parse_degree_overrides(std::string_view contents) {
  std::map<std::string, std::uint32_t, std::less<>> out;
  std::size_t line_no = 0;
  for (const auto& line : io::split_lines(contents)) {
    ++line_no;
    auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = text::split(trimmed, '\t');
    if (fields.size() != 2) throw Error(fmt::format("line {}: expected lemma<TAB>degree", line_no));
    std::uint32_t degree = 0;
    try {
      std::size_t used = 0;
      const auto value = std::stoul(std::string(fields[1]), &used);
      if (used != fields[1].size() || value == 0) throw Error("");
      degree = static_cast<std::uint32_t>(value);
    } catch (const std::exception&) {
      throw Error(fmt::format("line {}: degree must be a positive integer", line_no));
    }
    out[text::fold_case(fields[0])] = degree;
  }
  return out;
}

}  // namespace sensemt
