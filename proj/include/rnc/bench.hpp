#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rnc/core.hpp"

namespace rnc::bench {

/// Randomization variants of the measured homomorphic path.
///   with-rand:    operands arrive shifted; each op re-shifts its result and
///                 draws fresh multipliers inside the timed region.
///   without-rand: canonical operands, no shifting anywhere.
///   ir-path:      operands pre-encoded and pre-shifted outside the timed
///                 region (compile-time encoding); ops strip the shift but
///                 never re-randomize.
enum class Variant { kWithRand, kWithoutRand, kIrPath };

const char* variant_name(Variant v);
std::optional<Variant> variant_from_name(std::string_view name);

struct BenchConfig {
  std::vector<std::string> ops = {"add", "sub", "mul", "eq", "ne"};
  std::vector<Variant> variants = {Variant::kWithRand, Variant::kWithoutRand,
                                   Variant::kIrPath};
  int max_count = 1000;  // instruction counts swept 0..max_count
  int count_step = 250;
  int repetitions = 30;  // timed repetitions per cell, after one warm-up
  std::uint64_t seed = 0x5eed;
  std::vector<std::uint64_t> moduli = {17, 19};

  void validate() const;
};

struct BenchRow {
  std::string op;
  Variant variant = Variant::kWithoutRand;
  int count = 0;
  double mean_plain_ns = 0.0;
  double mean_rnc_ns = 0.0;
  double median_rnc_ns = 0.0;
  double variance_rnc_ns = 0.0;
  std::optional<double> ratio;  // unset when not measurable
  std::string null_reason;      // why ratio is unset
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchRow> rows;
};

/// Times count plain ops against count homomorphic ops over identical
/// seeded operand streams, repeated config.repetitions times with a warm-up
/// pass excluded from the statistics. Pure computation; callers write the
/// report wherever they want it.
BenchReport bench_run(const BenchConfig& config);

/// CSV schema: op,variant,count,mean_plain_ns,mean_rnc_ns,ratio
void write_csv(const BenchReport& report, std::ostream& out);

/// JSON mirror of the CSV plus medians, variances and null reasons.
void write_json(const BenchReport& report, std::ostream& out);

/// Loads a config from key=value lines or a JSON object (sniffed from the
/// first non-space character). Unknown keys are rejected.
BenchConfig load_config(const std::string& path);

}  // namespace rnc::bench
