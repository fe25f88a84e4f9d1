#pragma once

#include <set>
#include <string>

#include "rnc/core.hpp"
#include "rnc/ir.hpp"

namespace rnc::ir {

/// Value names carrying sensitive data: every name with the sensitivity
/// prefix plus everything data-dependent on one.
using TaintSet = std::set<std::string>;

inline constexpr std::string_view kSensitivePrefix = "rnc_";

/// Least fixpoint closure over def-use edges, per function. A value is
/// tainted iff its name is prefixed or any operand is tainted.
TaintSet propagate_taint(const Module& m);

/// First coprime pair (a, b), a scanned upward from 2^(width/2) and b from
/// a+1, whose product covers 2^width. Deterministic; the result passes
/// ModuliSet validation. width must be in [1, 32].
ModuliSet select_moduli(unsigned bit_width);

/// The protection pass. Constants whose name is tainted become
/// compile-time-encoded, compile-time-shifted component literals
/// (@rnc.const). Supported ops (add, sub, mul, eq, ne) touching tainted
/// values are replaced by their homomorphic intrinsics, with plain operands
/// encoded on the way in. Unsupported ops (div, xor, shl, user calls) get
/// @rnc.decode on every encoded operand, and an encoded return value is
/// decoded before ret.
Module transform(const Module& m, const ModuliSet& ms, Rng& rng);

/// Canonical text of a transformed module, with the seed and moduli recorded
/// in a comment header so builds are reproducible.
std::string write_transformed(const Module& transformed, std::uint64_t seed,
                              const ModuliSet& ms);

}  // namespace rnc::ir
