#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rnc/aes.hpp"
#include "rnc/trace.hpp"

namespace rnc::audit {

enum class RunMode { kBaseline, kProtectedTree, kProtectedGrid };

const char* mode_name(RunMode mode);

struct TracedRun {
  aes::Block ciphertext{};
  trace::TraceLog log;
};

/// Runs one AES encryption under a fresh TraceLog. Baseline mode records the
/// unprotected program; the protected modes resolve SubWord through an
/// RncTree or RncGrid respectively.
TracedRun run_traced(RunMode mode, const aes::Key& key,
                     const aes::Block& block, const ModuliSet& ms, Rng& rng);

struct SegmentReport {
  /// Hits of every possible byte value in this segment's words. 8-bit
  /// patterns are matched at every byte offset of an event word.
  std::array<std::uint64_t, 256> byte_value_hits{};
  /// Hits of the 16 key bytes, by key position.
  std::array<std::uint64_t, 16> key_byte_hits{};
  /// Percentage of the 16 key bytes seen at least once.
  double key_bytes_found_pct = 0.0;
  /// Hits of the 44 round-key words. 32-bit patterns are matched at the
  /// aligned 32-bit halves of events at least that wide.
  std::array<std::uint64_t, 44> round_key_word_hits{};
};

/// Per-segment search results for one traced run.
struct LeakReport {
  aes::Key key{};
  std::array<SegmentReport, 4> segments{};
  /// Byte values flagged as key-independent coincidences; filled by
  /// apply_cross_key_flags.
  std::vector<std::uint8_t> cross_key_flagged;

  std::uint64_t word_hits_in_protected_segments() const;
};

/// Exact-match search of all key bytes and round-key words over the trace,
/// bucketed by segment. The schedule must be the baseline schedule of key.
LeakReport find_keys(const trace::TraceLog& log, const aes::Key& key,
                     const aes::Schedule& schedule);

/// Byte values that hit segments 1-2 in at least two of the reports; such
/// values appear irrespective of the key and are false positives for a
/// key-byte search. Throws NeedTwoKeysError for fewer than two reports.
std::vector<std::uint8_t> cross_key_filter(std::span<const LeakReport> reports);

/// Runs cross_key_filter and stores the flags into every report.
void apply_cross_key_flags(std::span<LeakReport> reports);

/// JSON report with per-segment arrays (key-byte hits, found percentage,
/// round-key-word hits) plus the cross-key flags.
void write_report_json(const LeakReport& report, std::ostream& out);

}  // namespace rnc::audit
