#pragma once

#include "rnc/core.hpp"

namespace rnc {

// Homomorphic operation catalog. Every binary operation requires both
// operands bound to the same ModuliSet (ModuliMismatchError otherwise),
// removes any random multiple shifting, operates componentwise where the
// operation allows it, and re-shifts the result with fresh random multiples
// when rng is non-null. Unless stated otherwise, semantics are mod M.

/// decode == (decode x + decode y) mod M.
EncodedValue add_enc(const ModuliSet& ms, const EncodedValue& x,
                     const EncodedValue& y, Rng* rng = nullptr);

/// add_enc that throws OverflowError when the sum wraps past M. Wrap is
/// detected homomorphically: result < x after canonicalization.
EncodedValue add_enc_checked(const ModuliSet& ms, const EncodedValue& x,
                             const EncodedValue& y, Rng* rng = nullptr);

/// decode == (decode x - decode y) mod M.
EncodedValue sub_enc(const ModuliSet& ms, const EncodedValue& x,
                     const EncodedValue& y, Rng* rng = nullptr);

/// sub_enc that throws UnderflowError when decode y > decode x (checked
/// homomorphically via less_than before subtracting).
EncodedValue sub_enc_checked(const ModuliSet& ms, const EncodedValue& x,
                             const EncodedValue& y, Rng* rng = nullptr);

/// decode == (decode x * decode y) mod M.
EncodedValue mul_enc(const ModuliSet& ms, const EncodedValue& x,
                     const EncodedValue& y, Rng* rng = nullptr);

/// mul_enc that throws OverflowError when the plain product reaches M.
/// The check decodes both operands (there is no homomorphic route), so this
/// is a validation aid, not a protected-path operation.
EncodedValue mul_enc_checked(const ModuliSet& ms, const EncodedValue& x,
                             const EncodedValue& y, Rng* rng = nullptr);

/// decode == (decode x * 2^n) mod M; multiplication by 2^n mod m_i.
EncodedValue shl_enc(const ModuliSet& ms, const EncodedValue& x, unsigned n,
                     Rng* rng = nullptr);

/// shl_enc with the same decode-assisted overflow check as mul_enc_checked.
EncodedValue shl_enc_checked(const ModuliSet& ms, const EncodedValue& x,
                             unsigned n, Rng* rng = nullptr);

/// true iff decode x < decode y. Compares mixed-radix digits most
/// significant first; partially homomorphic, no full reconstruction.
bool less_than(const ModuliSet& ms, const EncodedValue& x,
               const EncodedValue& y);

struct DivResult {
  EncodedValue quotient;
  EncodedValue remainder;
};

/// Floor division built from sub_enc and less_than only (subtraction cycles,
/// accelerated by doubling the subtrahend). Throws DivisionByZeroError when
/// y encodes zero, detected via eq_enc against encode(0).
DivResult div_int(const ModuliSet& ms, const EncodedValue& x,
                  const EncodedValue& y, Rng* rng = nullptr);

/// Remainder component of div_int.
EncodedValue mod_enc(const ModuliSet& ms, const EncodedValue& x,
                     const EncodedValue& y, Rng* rng = nullptr);

/// Componentwise x_i * y_i^-1 mod m_i. Equals the true quotient only when
/// decode y divides decode x exactly; otherwise the result decodes to the
/// value v with v * decode y == decode x (mod M), which is not floor
/// division. Throws NoModularInverseError when some y_i has no inverse.
EncodedValue div_exact(const ModuliSet& ms, const EncodedValue& x,
                       const EncodedValue& y, Rng* rng = nullptr);

/// decode == (decode x)^n mod M via repeated mul_enc; n is plain.
EncodedValue pow_enc(const ModuliSet& ms, const EncodedValue& x,
                     std::uint64_t n, Rng* rng = nullptr);

/// Bitwise XOR of two values below 2^bit_width (requires 2^bit_width <= M).
/// Bits are extracted homomorphically with div_int/mod_enc by two, combined
/// per position, and recombined with shl_enc/add_enc. Partially homomorphic.
EncodedValue xor_enc(const ModuliSet& ms, const EncodedValue& x,
                     const EncodedValue& y, unsigned bit_width,
                     Rng* rng = nullptr);

/// Bitwise OR with the same construction as xor_enc.
EncodedValue or_enc(const ModuliSet& ms, const EncodedValue& x,
                    const EncodedValue& y, unsigned bit_width,
                    Rng* rng = nullptr);

/// Canonicalizes both operands and compares components. Fully homomorphic,
/// never decodes; the boolean comes back plain.
bool eq_enc(const ModuliSet& ms, const EncodedValue& x, const EncodedValue& y);
bool neq_enc(const ModuliSet& ms, const EncodedValue& x,
             const EncodedValue& y);

}  // namespace rnc
