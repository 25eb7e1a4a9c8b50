#include "sensemt/digest.hpp"

#include "sensemt/error.hpp"
#include "sensemt/io.hpp"

#include <openssl/sha.h>

namespace sensemt {

Sha256 sha256(std::span<const std::uint8_t> bytes) {
  Sha256 out{};
  SHA256(bytes.data(), bytes.size(), out.data());
  return out;
}

Sha256 sha256(std::string_view bytes) {
  return sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

std::string to_hex(const Sha256& digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(digest.size() * 2);
  for (auto b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0x0F]);
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) { return to_hex(sha256(bytes)); }

std::string file_sha256_hex(const std::string& path) { return sha256_hex(io::read_file(path)); }

std::uint64_t derive_seed(std::uint64_t base, std::string_view key) {
  std::string material(8, '\0');
  for (int i = 0; i < 8; ++i) material[i] = static_cast<char>((base >> (8 * i)) & 0xFF);
  material.append(key);
  const auto digest = sha256(material);
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) seed |= static_cast<std::uint64_t>(digest[i]) << (8 * i);
  return seed;
}

}  // namespace sensemt
