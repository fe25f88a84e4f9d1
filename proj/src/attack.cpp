#include "rnc/attack.hpp"

#include <cmath>
#include <limits>

namespace rnc::attack {

const char* const kSequentialDiscrepancyNote =
    "the reference figures are ~9.44 min combinational and ~2.89 min "
    "sequential (gamma=5), but the sequential formula is combinational x "
    "gamma, which gives ~47.2 min under the parameters that reproduce the "
    "combinational figure; both are reported and the mismatch is left "
    "unresolved";

void AttackParams::validate() const {
  // b == 0 is the degenerate zero-width register: 2^0 = 1 trial per register.
  if (register_bits > 64) {
    throw OutOfRangeError("register width must not exceed 64");
  }
  if (encode_cycles == 0 || cpu_hz <= 0 || data_registers == 0 ||
      trojan_states == 0) {
    throw OutOfRangeError("attack parameters must be positive");
  }
}

BruteForceCost brute_force_cost(std::uint64_t max_modulus,
                                std::uint64_t moduli_count) {
  if (max_modulus < 2 || moduli_count < 1) {
    throw OutOfRangeError("need max modulus >= 2 and at least one modulus");
  }
  BruteForceCost cost;
  const double ln_m = std::log(static_cast<double>(max_modulus));
  cost.crt_solve_ops = static_cast<double>(moduli_count) * ln_m * ln_m;
  const double guesses = std::pow(static_cast<double>(max_modulus),
                                  static_cast<double>(moduli_count));
  cost.total_ops = guesses * cost.crt_solve_ops;
  if (!std::isfinite(cost.total_ops)) {
    cost.total_ops = std::numeric_limits<double>::infinity();
    cost.overflowed = true;
  }
  return cost;
}

double trojan_test_time_s(const AttackParams& p, TrojanModel model) {
  p.validate();
  // b may be 64, and 2^b * T_exec does not fit a 64-bit word.
  const unsigned __int128 search_cycles =
      static_cast<unsigned __int128>(p.encode_cycles) << p.register_bits;
  const double per_register =
      static_cast<double>(search_cycles) / p.cpu_hz;
  const double combinational =
      static_cast<double>(p.data_registers) * per_register;
  if (model == TrojanModel::kCombinational) return combinational;
  return combinational * static_cast<double>(p.trojan_states);
}

}  // namespace rnc::attack
