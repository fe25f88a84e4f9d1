#include "rnc/ops.hpp"

#include <utility>

#include "rnc/trace.hpp"

namespace rnc {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp,
                      std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) r = mul_mod(r, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return r;
}

void emit_value(const char* label, const EncodedValue& v) {
  if (trace::TraceLog* t = trace::active()) {
    for (std::uint64_t c : v.components) t->emit(label, c, 64);
  }
}

void emit_operands(const char* label, const EncodedValue& x,
                   const EncodedValue& y) {
  emit_value(label, x);
  emit_value(label, y);
}

template <typename F>
EncodedValue zip_components(const ModuliSet& ms, const EncodedValue& x,
                            const EncodedValue& y, Rng* rng, F&& f) {
  EncodedValue a = canonicalize(ms, x);
  EncodedValue b = canonicalize(ms, y);
  for (std::size_t i = 0; i < ms.count(); ++i) {
    a.components[i] = f(a.components[i], b.components[i], ms.modulus(i));
  }
  if (rng != nullptr) a = add_random_shift(ms, std::move(a), *rng);
  return a;
}

}  // namespace

EncodedValue add_enc(const ModuliSet& ms, const EncodedValue& x,
                     const EncodedValue& y, Rng* rng) {
  require_bound(ms, x);
  require_bound(ms, y);
  emit_operands("rnc.add", x, y);
  EncodedValue z = zip_components(
      ms, x, y, rng,
      [](std::uint64_t a, std::uint64_t b, std::uint64_t m) {
        std::uint64_t s = a + b;
        return s >= m ? s - m : s;
      });
  emit_value("rnc.add", z);
  return z;
}

EncodedValue add_enc_checked(const ModuliSet& ms, const EncodedValue& x,
                             const EncodedValue& y, Rng* rng) {
  EncodedValue z = add_enc(ms, x, y, rng);
  if (less_than(ms, z, x)) throw OverflowError("encoded addition wrapped");
  return z;
}

EncodedValue sub_enc(const ModuliSet& ms, const EncodedValue& x,
                     const EncodedValue& y, Rng* rng) {
  require_bound(ms, x);
  require_bound(ms, y);
  emit_operands("rnc.sub", x, y);
  EncodedValue z = zip_components(
      ms, x, y, rng,
      [](std::uint64_t a, std::uint64_t b, std::uint64_t m) {
        return a >= b ? a - b : a + m - b;
      });
  emit_value("rnc.sub", z);
  return z;
}

EncodedValue sub_enc_checked(const ModuliSet& ms, const EncodedValue& x,
                             const EncodedValue& y, Rng* rng) {
  if (less_than(ms, x, y)) {
    throw UnderflowError("encoded subtraction would go below zero");
  }
  return sub_enc(ms, x, y, rng);
}

EncodedValue mul_enc(const ModuliSet& ms, const EncodedValue& x,
                     const EncodedValue& y, Rng* rng) {
  require_bound(ms, x);
  require_bound(ms, y);
  emit_operands("rnc.mul", x, y);
  EncodedValue z = zip_components(
      ms, x, y, rng,
      [](std::uint64_t a, std::uint64_t b, std::uint64_t m) {
        return mul_mod(a, b, m);
      });
  emit_value("rnc.mul", z);
  return z;
}

EncodedValue mul_enc_checked(const ModuliSet& ms, const EncodedValue& x,
                             const EncodedValue& y, Rng* rng) {
  const unsigned __int128 product =
      static_cast<unsigned __int128>(decode(ms, x)) * decode(ms, y);
  if (product >= ms.dynamic_range()) {
    throw OverflowError("encoded multiplication wrapped");
  }
  return mul_enc(ms, x, y, rng);
}

EncodedValue shl_enc(const ModuliSet& ms, const EncodedValue& x, unsigned n,
                     Rng* rng) {
  require_bound(ms, x);
  emit_value("rnc.shl", x);
  EncodedValue z = canonicalize(ms, x);
  for (std::size_t i = 0; i < ms.count(); ++i) {
    const std::uint64_t m = ms.modulus(i);
    z.components[i] = mul_mod(z.components[i], pow_mod(2, n, m), m);
  }
  if (rng != nullptr) z = add_random_shift(ms, std::move(z), *rng);
  emit_value("rnc.shl", z);
  return z;
}

EncodedValue shl_enc_checked(const ModuliSet& ms, const EncodedValue& x,
                             unsigned n, Rng* rng) {
  const std::uint64_t v = decode(ms, x);
  if (v != 0) {
    if (n >= 64 ||
        static_cast<unsigned __int128>(v) << n >= ms.dynamic_range()) {
      throw OverflowError("encoded shift wrapped");
    }
  }
  return shl_enc(ms, x, n, rng);
}

bool less_than(const ModuliSet& ms, const EncodedValue& x,
               const EncodedValue& y) {
  require_bound(ms, x);
  require_bound(ms, y);
  emit_operands("rnc.less_than", x, y);
  const MixedRadixDigits dx = to_mixed_radix(ms, x);
  const MixedRadixDigits dy = to_mixed_radix(ms, y);
  for (std::size_t i = ms.count(); i-- > 0;) {
    if (dx.digits[i] != dy.digits[i]) {
      const bool lt = dx.digits[i] < dy.digits[i];
      trace::emit("rnc.less_than", lt ? 1 : 0, 8);
      return lt;
    }
  }
  trace::emit("rnc.less_than", 0, 8);
  return false;
}

DivResult div_int(const ModuliSet& ms, const EncodedValue& x,
                  const EncodedValue& y, Rng* rng) {
  require_bound(ms, x);
  require_bound(ms, y);
  emit_operands("rnc.div", x, y);
  const EncodedValue zero = encode(ms, 0);
  if (eq_enc(ms, y, zero)) {
    throw DivisionByZeroError("encoded division by zero");
  }
  EncodedValue quotient = zero;
  EncodedValue remainder = canonicalize(ms, x);
  const EncodedValue divisor = canonicalize(ms, y);
  while (!less_than(ms, remainder, divisor)) {
    // Double the subtrahend while it still fits under the remainder and has
    // not wrapped past M (wrap shows up as t2 < t).
    EncodedValue t = divisor;
    EncodedValue step = encode(ms, 1);
    while (true) {
      EncodedValue t2 = add_enc(ms, t, t);
      if (less_than(ms, t2, t)) break;
      if (less_than(ms, remainder, t2)) break;
      t = std::move(t2);
      step = add_enc(ms, step, step);
    }
    remainder = sub_enc(ms, remainder, t);
    quotient = add_enc(ms, quotient, step);
  }
  if (rng != nullptr) {
    quotient = add_random_shift(ms, std::move(quotient), *rng);
    remainder = add_random_shift(ms, std::move(remainder), *rng);
  }
  emit_value("rnc.div", quotient);
  emit_value("rnc.div", remainder);
  return DivResult{std::move(quotient), std::move(remainder)};
}

EncodedValue mod_enc(const ModuliSet& ms, const EncodedValue& x,
                     const EncodedValue& y, Rng* rng) {
  return div_int(ms, x, y, rng).remainder;
}

EncodedValue div_exact(const ModuliSet& ms, const EncodedValue& x,
                       const EncodedValue& y, Rng* rng) {
  require_bound(ms, x);
  require_bound(ms, y);
  emit_operands("rnc.div_exact", x, y);
  EncodedValue a = canonicalize(ms, x);
  const EncodedValue b = canonicalize(ms, y);
  for (std::size_t i = 0; i < ms.count(); ++i) {
    const std::uint64_t m = ms.modulus(i);
    const auto inv = mod_inverse(b.components[i], m);
    if (!inv) {
      throw NoModularInverseError(
          "divisor component has no inverse mod " + std::to_string(m));
    }
    a.components[i] = mul_mod(a.components[i], *inv, m);
  }
  if (rng != nullptr) a = add_random_shift(ms, std::move(a), *rng);
  emit_value("rnc.div_exact", a);
  return a;
}

EncodedValue pow_enc(const ModuliSet& ms, const EncodedValue& x,
                     std::uint64_t n, Rng* rng) {
  require_bound(ms, x);
  emit_value("rnc.pow", x);
  EncodedValue result = encode(ms, 1 % ms.dynamic_range());
  for (std::uint64_t i = 0; i < n; ++i) result = mul_enc(ms, result, x);
  if (rng != nullptr) result = add_random_shift(ms, std::move(result), *rng);
  emit_value("rnc.pow", result);
  return result;
}

namespace {

EncodedValue bitwise_enc(const ModuliSet& ms, const EncodedValue& x,
                         const EncodedValue& y, unsigned bit_width, Rng* rng,
                         bool is_xor, const char* label) {
  require_bound(ms, x);
  require_bound(ms, y);
  emit_operands(label, x, y);
  if (bit_width == 0 ||
      (static_cast<unsigned __int128>(1) << bit_width) > ms.dynamic_range()) {
    throw OutOfRangeError("bit width does not fit the dynamic range");
  }
  const bool full_range =
      (static_cast<unsigned __int128>(1) << bit_width) == ms.dynamic_range();
  if (!full_range) {
    const EncodedValue bound = encode(ms, std::uint64_t{1} << bit_width);
    if (!less_than(ms, x, bound) || !less_than(ms, y, bound)) {
      throw OutOfRangeError("operand does not fit the stated bit width");
    }
  }
  const EncodedValue two = encode(ms, 2);
  EncodedValue rx = canonicalize(ms, x);
  EncodedValue ry = canonicalize(ms, y);
  EncodedValue result = encode(ms, 0);
  for (unsigned k = 0; k < bit_width; ++k) {
    DivResult dx = div_int(ms, rx, two);
    DivResult dy = div_int(ms, ry, two);
    const EncodedValue sum = add_enc(ms, dx.remainder, dy.remainder);
    const EncodedValue prod = mul_enc(ms, dx.remainder, dy.remainder);
    // xor: a + b - 2ab; or: a + b - ab. Both stay in {0, 1}.
    const EncodedValue bit =
        is_xor ? sub_enc(ms, sum, shl_enc(ms, prod, 1))
               : sub_enc(ms, sum, prod);
    result = add_enc(ms, result, shl_enc(ms, bit, k));
    rx = std::move(dx.quotient);
    ry = std::move(dy.quotient);
  }
  if (rng != nullptr) result = add_random_shift(ms, std::move(result), *rng);
  emit_value(label, result);
  return result;
}

}  // namespace

EncodedValue xor_enc(const ModuliSet& ms, const EncodedValue& x,
                     const EncodedValue& y, unsigned bit_width, Rng* rng) {
  return bitwise_enc(ms, x, y, bit_width, rng, true, "rnc.xor");
}

EncodedValue or_enc(const ModuliSet& ms, const EncodedValue& x,
                    const EncodedValue& y, unsigned bit_width, Rng* rng) {
  return bitwise_enc(ms, x, y, bit_width, rng, false, "rnc.or");
}

bool eq_enc(const ModuliSet& ms, const EncodedValue& x,
            const EncodedValue& y) {
  require_bound(ms, x);
  require_bound(ms, y);
  emit_operands("rnc.eq", x, y);
  const EncodedValue a = canonicalize(ms, x);
  const EncodedValue b = canonicalize(ms, y);
  const bool eq = a.components == b.components;
  trace::emit("rnc.eq", eq ? 1 : 0, 8);
  return eq;
}

bool neq_enc(const ModuliSet& ms, const EncodedValue& x,
             const EncodedValue& y) {
  return !eq_enc(ms, x, y);
}

}  // namespace rnc
