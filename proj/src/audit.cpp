#include "rnc/audit.hpp"

#include <map>
#include <ostream>

#include <json.hpp>

namespace rnc::audit {

const char* mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::kBaseline:
      return "baseline";
    case RunMode::kProtectedTree:
      return "protected-tree";
    case RunMode::kProtectedGrid:
      return "protected-grid";
  }
  return "?";
}

TracedRun run_traced(RunMode mode, const aes::Key& key,
                     const aes::Block& block, const ModuliSet& ms, Rng& rng) {
  TracedRun run;
  trace::ScopedTrace scope(run.log);
  switch (mode) {
    case RunMode::kBaseline:
      run.ciphertext = aes::aes128_encrypt_baseline(key, block);
      break;
    case RunMode::kProtectedTree:
      run.ciphertext = aes::aes128_encrypt_protected(
          key, block, ms, rng, aes::SboxLookup::kTree);
      break;
    case RunMode::kProtectedGrid:
      run.ciphertext = aes::aes128_encrypt_protected(
          key, block, ms, rng, aes::SboxLookup::kGrid);
      break;
  }
  if (!run.log.all_segments_seen()) {
    throw Error("traced run did not cover all four segments");
  }
  return run;
}

std::uint64_t LeakReport::word_hits_in_protected_segments() const {
  std::uint64_t total = 0;
  for (int seg : {1, 2}) {
    for (std::uint64_t h : segments[seg].round_key_word_hits) total += h;
  }
  return total;
}

LeakReport find_keys(const trace::TraceLog& log, const aes::Key& key,
                     const aes::Schedule& schedule) {
  LeakReport report;
  report.key = key;

  // A word value can correspond to several schedule positions (repeated
  // round-key words), so map value -> all indices.
  std::map<std::uint32_t, std::vector<std::size_t>> word_index;
  for (std::size_t w = 0; w < 44; ++w) {
    const std::uint8_t* b = &schedule[4 * w];
    const std::uint32_t value = (std::uint32_t{b[0]} << 24) |
                                (std::uint32_t{b[1]} << 16) |
                                (std::uint32_t{b[2]} << 8) | b[3];
    word_index[value].push_back(w);
  }

  for (const trace::Event& e : log.events()) {
    SegmentReport& seg = report.segments[e.segment];
    const int bytes = e.width / 8;
    for (int p = 0; p < bytes; ++p) {
      ++seg.byte_value_hits[(e.value >> (8 * p)) & 0xFF];
    }
    for (int p = 0; p + 4 <= bytes; p += 4) {
      const auto w = static_cast<std::uint32_t>(e.value >> (8 * p));
      if (auto it = word_index.find(w); it != word_index.end()) {
        for (std::size_t idx : it->second) {
          ++seg.round_key_word_hits[idx];
        }
      }
    }
  }

  for (SegmentReport& seg : report.segments) {
    int found = 0;
    for (int i = 0; i < 16; ++i) {
      seg.key_byte_hits[i] = seg.byte_value_hits[key[i]];
      if (seg.key_byte_hits[i] > 0) ++found;
    }
    seg.key_bytes_found_pct = 100.0 * found / 16.0;
  }
  return report;
}

std::vector<std::uint8_t> cross_key_filter(
    std::span<const LeakReport> reports) {
  if (reports.size() < 2) {
    throw NeedTwoKeysError("cross-key filtering needs at least two reports");
  }
  std::vector<std::uint8_t> flagged;
  for (int v = 0; v < 256; ++v) {
    int runs_hit = 0;
    for (const LeakReport& r : reports) {
      if (r.segments[1].byte_value_hits[v] + r.segments[2].byte_value_hits[v] >
          0) {
        ++runs_hit;
      }
    }
    if (runs_hit >= 2) flagged.push_back(static_cast<std::uint8_t>(v));
  }
  return flagged;
}

void apply_cross_key_flags(std::span<LeakReport> reports) {
  const std::vector<std::uint8_t> flagged =
      cross_key_filter({reports.data(), reports.size()});
  for (LeakReport& r : reports) r.cross_key_flagged = flagged;
}

void write_report_json(const LeakReport& report, std::ostream& out) {
  nlohmann::json j;
  j["key"] = aes::to_hex(report.key);
  j["segments"] = nlohmann::json::array();
  for (int s = 0; s < 4; ++s) {
    const SegmentReport& seg = report.segments[s];
    nlohmann::json js;
    js["segment"] = s;
    js["key_byte_hits"] = seg.key_byte_hits;
    js["key_bytes_found_pct"] = seg.key_bytes_found_pct;
    js["round_key_word_hits"] = seg.round_key_word_hits;
    j["segments"].push_back(std::move(js));
  }
  j["cross_key_flagged"] = report.cross_key_flagged;
  out << j.dump(2) << '\n';
}

}  // namespace rnc::audit
