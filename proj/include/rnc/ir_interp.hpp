#pragma once

#include <span>
#include <string_view>

#include "rnc/core.hpp"
#include "rnc/ir.hpp"

namespace rnc::ir {

/// Bindings for the @rnc.* intrinsics. Plain modules run without one;
/// transformed modules need the moduli and, for runtime re-shifting, an rng.
struct InterpContext {
  const ModuliSet* moduli = nullptr;
  Rng* rng = nullptr;
};

/// Evaluates a function on plain integer arguments (one per parameter,
/// masked at the parameter type) and returns the value of its ret.
/// Deterministic for a fixed context; traps (TrapError) on division by
/// zero. Arithmetic wraps at the instruction type's width.
std::uint64_t interpret(const Module& m, std::string_view function,
                        std::span<const std::uint64_t> args,
                        InterpContext ctx = {});

}  // namespace rnc::ir
