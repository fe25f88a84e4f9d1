#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rnc/core.hpp"

namespace rnc::aes {

inline constexpr int kKeyWords = 4;    // 32-bit words per key
inline constexpr int kRounds = 10;     // rounds for the 128-bit key size
inline constexpr std::size_t kScheduleBytes = 16 * (kRounds + 1);

using Block = std::array<std::uint8_t, 16>;
using Key = std::array<std::uint8_t, 16>;
using Schedule = std::array<std::uint8_t, kScheduleBytes>;

extern const std::array<std::uint8_t, 256> kSbox;

/// FIPS-197 key schedule, plain bytes. Serves as the oracle and as the
/// unprotected arm of the leakage experiment.
Schedule key_schedule_baseline(const Key& key);

/// Single-block AES-128 encryption (ECB, encrypt only).
Block aes128_encrypt_baseline(const Key& key, const Block& block);

/// Rounds on a caller-supplied schedule; shared by the baseline and the
/// protected pipeline after its decode stage.
Block encrypt_with_schedule(const Schedule& schedule, const Block& block);

/// How SubWord resolves encoded bytes without decoding them.
enum class SboxLookup { kGrid, kTree };

/// 176 encoded schedule bytes (11 round keys x 16).
struct EncodedKeySchedule {
  std::vector<EncodedValue> bytes;
  std::uint64_t moduli_id = 0;
};

/// Encodes the 16 key bytes with random multiple shifts.
std::vector<EncodedValue> encode_key(const ModuliSet& ms, const Key& key,
                                     Rng& rng);

/// Key expansion over encoded bytes. RotWord permutes encoded bytes, SubWord
/// resolves through an encoded S-box container, and every word combination
/// uses the homomorphic XOR; no key-derived byte is decoded. Each
/// XorEnc/SubWord output is re-shifted when rng is non-null.
EncodedKeySchedule key_expansion_enc(const ModuliSet& ms,
                                     std::span<const EncodedValue> key,
                                     Rng* rng,
                                     SboxLookup lookup = SboxLookup::kGrid);

/// Decodes a full encoded schedule into plain bytes.
Schedule decode_schedule(const ModuliSet& ms, const EncodedKeySchedule& enc);

/// Full protected pipeline: encode the key, expand it homomorphically,
/// decode the round keys only at the decode stage, run the standard rounds,
/// then wipe the schedule buffers and the internal moduli copy.
Block aes128_encrypt_protected(const Key& key, const Block& block,
                               ModuliSet set, Rng& rng,
                               SboxLookup lookup = SboxLookup::kGrid);

// Hex helpers for the CLI surfaces (lowercase, no prefix).
std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(std::string_view hex) {
  const std::vector<std::uint8_t> bytes = from_hex(hex);
  if (bytes.size() != N) {
    throw OutOfRangeError("expected " + std::to_string(N) + " bytes");
  }
  std::array<std::uint8_t, N> out{};
  std::copy(bytes.begin(), bytes.end(), out.begin());
  return out;
}

}  // namespace rnc::aes
