#pragma once

#include <cstdint>

#include "rnc/errors.hpp"

namespace rnc::attack {

/// Inputs of the closed-form security estimators.
struct AttackParams {
  unsigned register_bits = 32;          // b
  std::uint64_t encode_cycles = 66;     // T_exec
  double cpu_hz = 4e9;                  // S_cpu
  std::uint64_t data_registers = 8;     // N_DR
  std::uint64_t trojan_states = 5;      // gamma
  std::uint64_t max_modulus = 2;        // M
  std::uint64_t moduli_count = 1;       // k

  void validate() const;
};

struct BruteForceCost {
  /// M^k * k * (ln M)^2. +inf with the flag set when not representable.
  double total_ops = 0.0;
  /// The congruence-solving term alone: k * (ln M)^2.
  double crt_solve_ops = 0.0;
  bool overflowed = false;
};

/// Work to brute-force unknown moduli: try ~M^k candidate sets, solving the
/// congruences for each.
BruteForceCost brute_force_cost(std::uint64_t max_modulus,
                                std::uint64_t moduli_count);

enum class TrojanModel { kCombinational, kSequential };

/// Exhaustive trigger-testing time in seconds: N_DR * 2^b * T_exec / S_cpu,
/// times the state count for the sequential model. 2^b * T_exec is carried
/// in 128-bit integer arithmetic before the division.
double trojan_test_time_s(const AttackParams& p, TrojanModel model);

/// Known mismatch between the sequential formula and the originally reported
/// sequential figure; printed next to results so it stays visible.
extern const char* const kSequentialDiscrepancyNote;

}  // namespace rnc::attack
