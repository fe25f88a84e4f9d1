#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "rnc/errors.hpp"

namespace rnc {

/// Deterministic random source. Randomness is always injected by the caller,
/// never ambient; keep one instance per thread of use.
using Rng = std::mt19937_64;

/// Result of the extended Euclidean algorithm: a*x + b*y == gcd.
struct Bezout {
  std::int64_t gcd = 0;
  std::int64_t x = 0;
  std::int64_t y = 0;
};

/// Extended Euclid. Preconditions: a, b >= 0 and not both zero.
Bezout extended_gcd(std::int64_t a, std::int64_t b);

/// Multiplicative inverse of a mod m, or nullopt when gcd(a, m) != 1.
std::optional<std::uint64_t> mod_inverse(std::uint64_t a, std::uint64_t m);

/// Validated pairwise-coprime moduli with precomputed reconstruction
/// constants. Immutable after construction and shareable across threads.
///
/// Moduli are stored in increasing order; each modulus fits 32 bits and the
/// dynamic range M (their product) must fit a 64-bit word.
class ModuliSet {
 public:
  explicit ModuliSet(std::vector<std::uint64_t> moduli);

  std::size_t count() const noexcept { return moduli_.size(); }
  std::span<const std::uint64_t> moduli() const noexcept { return moduli_; }
  std::uint64_t modulus(std::size_t i) const { return moduli_.at(i); }

  /// M = product of all moduli; values live in [0, M).
  std::uint64_t dynamic_range() const noexcept { return m_; }

  /// M_i = M / m_i.
  std::uint64_t crt_weight(std::size_t i) const { return crt_weights_.at(i); }

  /// alpha_i, the inverse of M_i mod m_i. M_i * alpha_i == 1 (mod m_i).
  std::uint64_t crt_inverse(std::size_t i) const {
    return crt_inverses_.at(i);
  }

  /// Inverse of m_i mod m_j, defined for i < j. Used by mixed-radix
  /// conversion.
  std::uint64_t mrc_inverse(std::size_t i, std::size_t j) const;

  /// Identity token binding encoded values to the set that produced them.
  /// Copies of a set share the identity.
  std::uint64_t id() const noexcept { return id_; }

  /// Zeroizes every internal table. The set is unusable afterwards; teardown
  /// paths that must not leave moduli in memory call this on their own copy.
  void scrub() noexcept;

 private:
  std::vector<std::uint64_t> moduli_;
  std::vector<std::uint64_t> crt_weights_;
  std::vector<std::uint64_t> crt_inverses_;
  std::vector<std::uint64_t> mrc_inverses_;  // row-major count x count
  std::uint64_t m_ = 1;
  std::uint64_t id_ = 0;
};

inline ModuliSet make_moduli_set(std::vector<std::uint64_t> moduli) {
  return ModuliSet(std::move(moduli));
}

/// One value split into residue components, bound to the ModuliSet that
/// produced it. Components may carry random multiples of their modulus;
/// reducing component i mod m_i recovers the canonical form. Plain value
/// type: freely copyable and sendable.
struct EncodedValue {
  std::vector<std::uint64_t> components;
  std::uint64_t moduli_id = 0;
};

/// Positional mixed-radix digits: digit i has weight m_0 * ... * m_{i-1}.
struct MixedRadixDigits {
  std::vector<std::uint64_t> digits;
};

/// Exclusive upper bound of random shift multipliers. Keeps every shifted
/// component well inside the 64-bit component word for 32-bit moduli.
inline constexpr std::uint64_t kShiftMultiplierBound = std::uint64_t{1} << 16;

/// Throws ModuliMismatchError unless x was produced by ms.
void require_bound(const ModuliSet& ms, const EncodedValue& x);

/// Canonical encoding of v (components v mod m_i). Requires 0 <= v < M.
EncodedValue encode(const ModuliSet& ms, std::uint64_t v);

/// Encoding with a random multiple shift applied to every component.
EncodedValue encode(const ModuliSet& ms, std::uint64_t v, Rng& rng);

/// Adds multipliers[i] * m_i to component i. Semantic value is unchanged.
EncodedValue add_multiple_shift(const ModuliSet& ms, EncodedValue x,
                                std::span<const std::uint64_t> multipliers);

/// Adds an independent random multiple of m_i to every component.
EncodedValue add_random_shift(const ModuliSet& ms, EncodedValue x, Rng& rng);

/// Reduces every component mod its modulus. Idempotent.
EncodedValue canonicalize(const ModuliSet& ms, EncodedValue x);

/// CRT reconstruction of the unique value in [0, M). Canonicalizes first.
std::uint64_t decode(const ModuliSet& ms, const EncodedValue& x);

/// Two-modulus reconstruction via the Bezout coefficient of (m_0, m_1).
/// Requires count() == 2; kept alongside decode() as an independent route.
std::uint64_t decode_two_mod(const ModuliSet& ms, const EncodedValue& x);

/// Mixed-radix conversion without full reconstruction:
/// sum(digit_i * weight_i) == decode(x).
MixedRadixDigits to_mixed_radix(const ModuliSet& ms, const EncodedValue& x);

/// Signed encoding over [-floor(M/2), ceil(M/2)): negatives wrap to M - |v|.
EncodedValue encode_signed(const ModuliSet& ms, std::int64_t v);
EncodedValue encode_signed(const ModuliSet& ms, std::int64_t v, Rng& rng);
std::int64_t decode_signed(const ModuliSet& ms, const EncodedValue& x);

/// Number of decode calls made by this thread so far. Tests use the delta to
/// prove that no decode happens inside fully homomorphic code paths.
std::uint64_t decode_call_count() noexcept;

}  // namespace rnc
