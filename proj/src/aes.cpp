#include "rnc/aes.hpp"

#include <algorithm>
#include <utility>

#include "rnc/containers.hpp"
#include "rnc/ops.hpp"
#include "rnc/trace.hpp"

namespace rnc::aes {

// clang-format off
const std::array<std::uint8_t, 256> kSbox = {
  0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
  0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
  0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
  0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
  0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
  0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
  0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
  0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
  0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
  0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
  0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
  0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
  0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
  0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
  0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
  0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
};
// clang-format on

namespace {

constexpr std::array<std::uint8_t, 11> kRcon = {0x00, 0x01, 0x02, 0x04,
                                                0x08, 0x10, 0x20, 0x40,
                                                0x80, 0x1b, 0x36};

void emit_byte(const char* label, std::uint8_t v) {
  trace::emit(label, v, 8);
}

void emit_word_at(const char* label, const std::uint8_t* b) {
  trace::emit(label, (std::uint64_t{b[0]} << 24) | (std::uint64_t{b[1]} << 16) |
                         (std::uint64_t{b[2]} << 8) | b[3],
              32);
}

std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x >> 7) * 0x1b));
}

void secure_zero(void* p, std::size_t n) {
  volatile auto* c = static_cast<volatile unsigned char*>(p);
  while (n-- > 0) *c++ = 0;
}

}  // namespace

Schedule key_schedule_baseline(const Key& key) {
  Schedule w{};
  trace::begin_segment(trace::Segment::kExpansionHead);
  for (int i = 0; i < 16; ++i) {
    w[i] = key[i];
    emit_byte("aes.schedule_byte", w[i]);
    if (i % 4 == 3) emit_word_at("aes.schedule_word", &w[i - 3]);
  }
  trace::begin_segment(trace::Segment::kRoundKeyGen);
  for (int n = kKeyWords; n < 4 * (kRounds + 1); ++n) {
    std::array<std::uint8_t, 4> temp;
    for (int j = 0; j < 4; ++j) {
      temp[j] = w[4 * (n - 1) + j];
      emit_byte("aes.schedule_byte", temp[j]);
    }
    if (n % kKeyWords == 0) {
      std::rotate(temp.begin(), temp.begin() + 1, temp.end());
      for (auto& b : temp) b = kSbox[b];
      temp[0] = static_cast<std::uint8_t>(temp[0] ^ kRcon[n / kKeyWords]);
      for (std::uint8_t b : temp) emit_byte("aes.schedule_byte", b);
    }
    for (int j = 0; j < 4; ++j) {
      emit_byte("aes.schedule_byte", w[4 * (n - kKeyWords) + j]);
      w[4 * n + j] =
          static_cast<std::uint8_t>(w[4 * (n - kKeyWords) + j] ^ temp[j]);
      emit_byte("aes.schedule_byte", w[4 * n + j]);
    }
    emit_word_at("aes.schedule_word", &w[4 * n]);
  }
  return w;
}

namespace {

void add_round_key(std::array<std::uint8_t, 16>& state,
                   const Schedule& schedule, int round) {
  for (int c = 0; c < 4; ++c) {
    emit_word_at("aes.round_key_word", &schedule[16 * round + 4 * c]);
  }
  for (int i = 0; i < 16; ++i) {
    state[i] = static_cast<std::uint8_t>(state[i] ^ schedule[16 * round + i]);
    emit_byte("aes.state_byte", state[i]);
  }
}

void sub_bytes(std::array<std::uint8_t, 16>& state) {
  for (auto& b : state) {
    b = kSbox[b];
    emit_byte("aes.state_byte", b);
  }
}

// State byte (r, c) lives at 4c + r; rows rotate left by the row index.
void shift_rows(std::array<std::uint8_t, 16>& state) {
  const std::array<std::uint8_t, 16> old = state;
  for (int r = 1; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      state[4 * c + r] = old[4 * ((c + r) % 4) + r];
    }
  }
}

void mix_columns(std::array<std::uint8_t, 16>& state) {
  for (int c = 0; c < 4; ++c) {
    std::uint8_t* col = &state[4 * c];
    const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
    const std::uint8_t all = static_cast<std::uint8_t>(a0 ^ a1 ^ a2 ^ a3);
    col[0] = static_cast<std::uint8_t>(a0 ^ all ^ xtime(a0 ^ a1));
    col[1] = static_cast<std::uint8_t>(a1 ^ all ^ xtime(a1 ^ a2));
    col[2] = static_cast<std::uint8_t>(a2 ^ all ^ xtime(a2 ^ a3));
    col[3] = static_cast<std::uint8_t>(a3 ^ all ^ xtime(a3 ^ a0));
    for (int r = 0; r < 4; ++r) emit_byte("aes.state_byte", col[r]);
  }
}

}  // namespace

Block encrypt_with_schedule(const Schedule& schedule, const Block& block) {
  std::array<std::uint8_t, 16> state = block;
  add_round_key(state, schedule, 0);
  for (int round = 1; round < kRounds; ++round) {
    sub_bytes(state);
    shift_rows(state);
    mix_columns(state);
    add_round_key(state, schedule, round);
  }
  sub_bytes(state);
  shift_rows(state);
  add_round_key(state, schedule, kRounds);
  return state;
}

Block aes128_encrypt_baseline(const Key& key, const Block& block) {
  trace::begin_segment(trace::Segment::kInitEncode);
  for (std::uint8_t b : key) emit_byte("aes.key_byte", b);
  for (std::uint8_t b : block) emit_byte("aes.input_byte", b);
  const Schedule schedule = key_schedule_baseline(key);
  trace::begin_segment(trace::Segment::kDecodeCipher);
  Block out = encrypt_with_schedule(schedule, block);
  for (std::uint8_t b : out) emit_byte("aes.output_byte", b);
  return out;
}

std::vector<EncodedValue> encode_key(const ModuliSet& ms, const Key& key,
                                     Rng& rng) {
  std::vector<EncodedValue> out;
  out.reserve(key.size());
  for (std::uint8_t b : key) out.push_back(encode(ms, b, rng));
  return out;
}

namespace {

// Encoded S-box containers, built once per expansion: key i maps to the
// pre-encoded kSbox[i] so SubWord emits encoded bytes directly.
struct EncodedSbox {
  std::optional<RncGrid<EncodedValue>> grid;
  std::optional<RncTree<EncodedValue>> tree;

  EncodedSbox(const ModuliSet& ms, Rng* rng, SboxLookup lookup) {
    std::vector<EncodedValue> payloads;
    payloads.reserve(256);
    for (int i = 0; i < 256; ++i) {
      payloads.push_back(rng != nullptr ? encode(ms, kSbox[i], *rng)
                                        : encode(ms, kSbox[i]));
    }
    if (lookup == SboxLookup::kGrid) {
      grid.emplace(grid_from_table<EncodedValue>(ms, payloads));
    } else {
      tree.emplace(ms);
      insert_balanced(ms, payloads, 0, 256);
    }
  }

  void insert_balanced(const ModuliSet& ms,
                       const std::vector<EncodedValue>& payloads, int lo,
                       int hi) {
    if (lo >= hi) return;
    const int mid = lo + (hi - lo) / 2;
    tree->insert(encode(ms, static_cast<std::uint64_t>(mid)), payloads[mid]);
    insert_balanced(ms, payloads, lo, mid);
    insert_balanced(ms, payloads, mid + 1, hi);
  }

  EncodedValue lookup_byte(const EncodedValue& b) const {
    const EncodedValue* hit =
        grid.has_value() ? grid->get(b) : tree->get(b);
    if (hit == nullptr) {
      throw OutOfRangeError("encoded byte outside the S-box domain");
    }
    return *hit;
  }
};

}  // namespace

EncodedKeySchedule key_expansion_enc(const ModuliSet& ms,
                                     std::span<const EncodedValue> key,
                                     Rng* rng, SboxLookup lookup) {
  if (key.size() != 16) throw OutOfRangeError("key must be 16 encoded bytes");
  if (ms.dynamic_range() <= 255) {
    throw OutOfRangeError("dynamic range must exceed 255 for byte values");
  }
  for (const EncodedValue& b : key) require_bound(ms, b);

  // Setup still belongs to the init/encode phase: the S-box payloads and the
  // round constants are encoded before any key byte is touched.
  const EncodedSbox sbox(ms, rng, lookup);
  std::array<EncodedValue, 11> rcon_enc;
  for (int i = 1; i <= kRounds; ++i) {
    rcon_enc[i] = rng != nullptr ? encode(ms, kRcon[i], *rng)
                                 : encode(ms, kRcon[i]);
  }

  EncodedKeySchedule sched;
  sched.moduli_id = ms.id();
  sched.bytes.resize(kScheduleBytes);

  trace::begin_segment(trace::Segment::kExpansionHead);
  for (int i = 0; i < 16; ++i) sched.bytes[i] = key[i];

  trace::begin_segment(trace::Segment::kRoundKeyGen);
  for (int n = kKeyWords; n < 4 * (kRounds + 1); ++n) {
    std::array<EncodedValue, 4> temp;
    for (int j = 0; j < 4; ++j) temp[j] = sched.bytes[4 * (n - 1) + j];
    if (n % kKeyWords == 0) {
      std::rotate(temp.begin(), temp.begin() + 1, temp.end());
      for (auto& b : temp) {
        b = sbox.lookup_byte(b);
        if (rng != nullptr) b = add_random_shift(ms, std::move(b), *rng);
      }
      temp[0] = xor_enc(ms, temp[0], rcon_enc[n / kKeyWords], 8, rng);
    }
    for (int j = 0; j < 4; ++j) {
      sched.bytes[4 * n + j] =
          xor_enc(ms, sched.bytes[4 * (n - kKeyWords) + j], temp[j], 8, rng);
    }
  }
  return sched;
}

Schedule decode_schedule(const ModuliSet& ms, const EncodedKeySchedule& enc) {
  if (enc.bytes.size() != kScheduleBytes || enc.moduli_id != ms.id()) {
    throw ModuliMismatchError("schedule is not bound to this moduli set");
  }
  Schedule out{};
  for (std::size_t i = 0; i < kScheduleBytes; ++i) {
    out[i] = static_cast<std::uint8_t>(decode(ms, enc.bytes[i]));
    emit_byte("aes.schedule_byte", out[i]);
    if (i % 4 == 3) emit_word_at("aes.schedule_word", &out[i - 3]);
  }
  return out;
}

Block aes128_encrypt_protected(const Key& key, const Block& block,
                               ModuliSet set, Rng& rng, SboxLookup lookup) {
  trace::begin_segment(trace::Segment::kInitEncode);
  for (std::uint8_t b : key) emit_byte("aes.key_byte", b);
  for (std::uint8_t b : block) emit_byte("aes.input_byte", b);

  std::vector<EncodedValue> key_enc = encode_key(set, key, rng);
  EncodedKeySchedule sched_enc = key_expansion_enc(set, key_enc, &rng, lookup);

  trace::begin_segment(trace::Segment::kDecodeCipher);
  Schedule schedule = decode_schedule(set, sched_enc);
  Block out = encrypt_with_schedule(schedule, block);
  for (std::uint8_t b : out) emit_byte("aes.output_byte", b);

  // Leave no key material or moduli behind.
  secure_zero(schedule.data(), schedule.size());
  for (EncodedValue& v : sched_enc.bytes) {
    secure_zero(v.components.data(), v.components.size() * sizeof(uint64_t));
  }
  for (EncodedValue& v : key_enc) {
    secure_zero(v.components.data(), v.components.size() * sizeof(uint64_t));
  }
  set.scrub();
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw OutOfRangeError("odd hex string length");
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw OutOfRangeError("invalid hex digit");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace rnc::aes
