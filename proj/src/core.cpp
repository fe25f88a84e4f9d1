#include "rnc/core.hpp"

#include <atomic>
#include <algorithm>
#include <numeric>

#include "rnc/trace.hpp"

namespace rnc {

namespace {

thread_local std::uint64_t t_decode_calls = 0;

std::uint64_t next_set_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(a) * b % m);
}

void emit_components(const char* label, const EncodedValue& v) {
  if (trace::TraceLog* t = trace::active()) {
    for (std::uint64_t c : v.components) t->emit(label, c, 64);
  }
}

}  // namespace

Bezout extended_gcd(std::int64_t a, std::int64_t b) {
  if (a < 0 || b < 0 || (a == 0 && b == 0)) {
    throw Error("extended_gcd requires a, b >= 0 and not both zero");
  }
  if (a == 0) return Bezout{b, 0, 1};
  Bezout sub = extended_gcd(b % a, a);
  return Bezout{sub.gcd, sub.y - (b / a) * sub.x, sub.x};
}

std::optional<std::uint64_t> mod_inverse(std::uint64_t a, std::uint64_t m) {
  a %= m;
  if (a == 0) return std::nullopt;
  Bezout bz = extended_gcd(static_cast<std::int64_t>(a),
                           static_cast<std::int64_t>(m));
  if (bz.gcd != 1) return std::nullopt;
  std::int64_t x = bz.x % static_cast<std::int64_t>(m);
  if (x < 0) x += static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(x);
}

ModuliSet::ModuliSet(std::vector<std::uint64_t> moduli)
    : moduli_(std::move(moduli)) {
  if (moduli_.empty()) throw Error("moduli list must not be empty");
  for (std::uint64_t m : moduli_) {
    if (m < 2) throw ModulusTooSmallError(m);
    if (m > 0xFFFFFFFFull) {
      throw OutOfRangeError("modulus " + std::to_string(m) +
                            " exceeds 32 bits");
    }
  }
  // Coprimality is checked in the caller's order so the reported pair matches
  // the input.
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    for (std::size_t j = i + 1; j < moduli_.size(); ++j) {
      if (std::gcd(moduli_[i], moduli_[j]) != 1) {
        throw NotCoprimeError(moduli_[i], moduli_[j]);
      }
    }
  }
  std::sort(moduli_.begin(), moduli_.end());

  unsigned __int128 product = 1;
  for (std::uint64_t m : moduli_) {
    product *= m;
    if (product > 0xFFFFFFFFFFFFFFFFull) throw DynamicRangeTooLargeError();
  }
  m_ = static_cast<std::uint64_t>(product);

  const std::size_t u = moduli_.size();
  crt_weights_.resize(u);
  crt_inverses_.resize(u);
  for (std::size_t i = 0; i < u; ++i) {
    crt_weights_[i] = m_ / moduli_[i];
    auto inv = mod_inverse(crt_weights_[i] % moduli_[i], moduli_[i]);
    // Always exists: M_i is coprime to m_i by construction.
    crt_inverses_[i] = *inv;
  }
  mrc_inverses_.assign(u * u, 0);
  for (std::size_t i = 0; i < u; ++i) {
    for (std::size_t j = i + 1; j < u; ++j) {
      mrc_inverses_[i * u + j] =
          *mod_inverse(moduli_[i] % moduli_[j], moduli_[j]);
    }
  }
  id_ = next_set_id();
}

std::uint64_t ModuliSet::mrc_inverse(std::size_t i, std::size_t j) const {
  return mrc_inverses_.at(i * moduli_.size() + j);
}

void ModuliSet::scrub() noexcept {
  auto wipe = [](std::vector<std::uint64_t>& v) {
    volatile std::uint64_t* p = v.data();
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = 0;
    v.clear();
  };
  wipe(moduli_);
  wipe(crt_weights_);
  wipe(crt_inverses_);
  wipe(mrc_inverses_);
  m_ = 0;
  id_ = 0;
}

void require_bound(const ModuliSet& ms, const EncodedValue& x) {
  if (x.moduli_id != ms.id() || x.components.size() != ms.count()) {
    throw ModuliMismatchError(
        "encoded value is not bound to this moduli set");
  }
}

EncodedValue encode(const ModuliSet& ms, std::uint64_t v) {
  if (v >= ms.dynamic_range()) {
    throw OutOfRangeError("value " + std::to_string(v) +
                          " is outside [0, M) with M = " +
                          std::to_string(ms.dynamic_range()));
  }
  trace::emit("rnc.encode", v, 64);
  EncodedValue out;
  out.components.reserve(ms.count());
  for (std::uint64_t m : ms.moduli()) out.components.push_back(v % m);
  out.moduli_id = ms.id();
  emit_components("rnc.encode", out);
  return out;
}

EncodedValue encode(const ModuliSet& ms, std::uint64_t v, Rng& rng) {
  return add_random_shift(ms, encode(ms, v), rng);
}

EncodedValue add_multiple_shift(const ModuliSet& ms, EncodedValue x,
                                std::span<const std::uint64_t> multipliers) {
  require_bound(ms, x);
  if (multipliers.size() != ms.count()) {
    throw Error("one shift multiplier per modulus required");
  }
  for (std::size_t i = 0; i < x.components.size(); ++i) {
    const std::uint64_t add = multipliers[i] * ms.modulus(i);
    // Components never overflow the word: reduce first if headroom is gone.
    if (x.components[i] > 0xFFFFFFFFFFFFFFFFull - add) {
      x.components[i] %= ms.modulus(i);
    }
    x.components[i] += add;
  }
  emit_components("rnc.shift", x);
  return x;
}

EncodedValue add_random_shift(const ModuliSet& ms, EncodedValue x, Rng& rng) {
  std::vector<std::uint64_t> rs(ms.count());
  for (std::uint64_t& r : rs) r = rng() % kShiftMultiplierBound;
  return add_multiple_shift(ms, std::move(x), rs);
}

EncodedValue canonicalize(const ModuliSet& ms, EncodedValue x) {
  require_bound(ms, x);
  for (std::size_t i = 0; i < x.components.size(); ++i) {
    x.components[i] %= ms.modulus(i);
  }
  emit_components("rnc.canonicalize", x);
  return x;
}

std::uint64_t decode(const ModuliSet& ms, const EncodedValue& x) {
  require_bound(ms, x);
  ++t_decode_calls;
  emit_components("rnc.decode", x);
  unsigned __int128 acc = 0;
  for (std::size_t i = 0; i < ms.count(); ++i) {
    const std::uint64_t m = ms.modulus(i);
    const std::uint64_t u = x.components[i] % m;
    acc += static_cast<unsigned __int128>(ms.crt_weight(i)) *
           mul_mod(ms.crt_inverse(i), u, m);
  }
  const auto v = static_cast<std::uint64_t>(acc % ms.dynamic_range());
  trace::emit("rnc.decode", v, 64);
  return v;
}

std::uint64_t decode_two_mod(const ModuliSet& ms, const EncodedValue& x) {
  require_bound(ms, x);
  if (ms.count() != 2) {
    throw Error("two-modulus decode requires exactly two moduli");
  }
  ++t_decode_calls;
  const std::uint64_t m1 = ms.modulus(0);
  const std::uint64_t m2 = ms.modulus(1);
  const Bezout bz = extended_gcd(static_cast<std::int64_t>(m1),
                                 static_cast<std::int64_t>(m2));
  const std::uint64_t v1 = x.components[0] % m1;
  __int128 diff = static_cast<__int128>(x.components[1] % m2) - v1;
  __int128 t = diff % static_cast<__int128>(m2) * bz.x %
               static_cast<__int128>(m2);
  if (t < 0) t += m2;
  const std::uint64_t v = v1 + static_cast<std::uint64_t>(t) * m1;
  return v % ms.dynamic_range();
}

MixedRadixDigits to_mixed_radix(const ModuliSet& ms, const EncodedValue& x) {
  EncodedValue c = canonicalize(ms, x);
  const std::size_t u = ms.count();
  MixedRadixDigits out;
  out.digits.resize(u);
  // Peel digits least significant first: after digit i is fixed, divide the
  // remaining residues by m_i using the precomputed pairwise inverses.
  for (std::size_t i = 0; i < u; ++i) {
    const std::uint64_t d = c.components[i];
    out.digits[i] = d;
    trace::emit("rnc.mrc", d, 64);
    for (std::size_t j = i + 1; j < u; ++j) {
      const std::uint64_t mj = ms.modulus(j);
      std::uint64_t r = c.components[j] + mj - d;  // d < m_i < m_j
      if (r >= mj) r -= mj;
      c.components[j] = mul_mod(r, ms.mrc_inverse(i, j), mj);
    }
  }
  return out;
}

namespace {

// Split point of the signed range: values below ceil(M/2) are non-negative.
std::uint64_t signed_split(const ModuliSet& ms) {
  return ms.dynamic_range() / 2 + (ms.dynamic_range() & 1);
}

}  // namespace

EncodedValue encode_signed(const ModuliSet& ms, std::int64_t v) {
  const std::uint64_t m = ms.dynamic_range();
  const std::uint64_t half_down = m / 2;          // floor(M/2)
  const std::uint64_t half_up = signed_split(ms);  // ceil(M/2)
  if (v >= 0) {
    if (static_cast<std::uint64_t>(v) >= half_up) {
      throw OutOfRangeError("signed value out of range");
    }
    return encode(ms, static_cast<std::uint64_t>(v));
  }
  const std::uint64_t mag = static_cast<std::uint64_t>(-(v + 1)) + 1;
  if (mag > half_down) throw OutOfRangeError("signed value out of range");
  return encode(ms, m - mag);
}

EncodedValue encode_signed(const ModuliSet& ms, std::int64_t v, Rng& rng) {
  return add_random_shift(ms, encode_signed(ms, v), rng);
}

std::int64_t decode_signed(const ModuliSet& ms, const EncodedValue& x) {
  const std::uint64_t u = decode(ms, x);
  if (u < signed_split(ms)) return static_cast<std::int64_t>(u);
  return -static_cast<std::int64_t>(ms.dynamic_range() - u);
}

std::uint64_t decode_call_count() noexcept { return t_decode_calls; }

}  // namespace rnc
