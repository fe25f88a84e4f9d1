#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <set>
#include <sstream>

#include "rnc/audit.hpp"
#include "rnc/ops.hpp"

using namespace rnc;
using namespace rnc::audit;

namespace {

const aes::Key kKey1 =
    aes::array_from_hex<16>("2b7eaffccbaed2a6abf7cf8b09cf4fd3");
const aes::Key kKey2 =
    aes::array_from_hex<16>("b3ee5ffccbaed2ccabf7cf8bb9cf4fd3");
const aes::Key kKey3 =
    aes::array_from_hex<16>("fb4e9ffbcbaed2ccabf7cfbbb9cfbfdd");
const aes::Block kBlock =
    aes::array_from_hex<16>("3243f6a8885a308d313198a2e0370734");

bool logs_equal(const trace::TraceLog& a, const trace::TraceLog& b) {
  if (a.events().size() != b.events().size()) return false;
  for (std::size_t i = 0; i < a.events().size(); ++i) {
    const trace::Event& x = a.events()[i];
    const trace::Event& y = b.events()[i];
    if (x.step != y.step || x.segment != y.segment || x.width != y.width ||
        x.value != y.value || std::strcmp(x.label, y.label) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("segment boundaries appear once each, in order") {
  trace::TraceLog log;
  log.begin_segment(trace::Segment::kInitEncode);
  CHECK_THROWS_AS(log.begin_segment(trace::Segment::kDecodeCipher), Error);
  log.begin_segment(trace::Segment::kExpansionHead);
  log.begin_segment(trace::Segment::kRoundKeyGen);
  log.begin_segment(trace::Segment::kDecodeCipher);
  CHECK(log.all_segments_seen());
  CHECK_THROWS_AS(log.begin_segment(trace::Segment::kDecodeCipher), Error);
}

TEST_CASE("traced runs cover all segments and keep the ciphertext") {
  const ModuliSet ms({17, 19});
  const aes::Block expected = aes::aes128_encrypt_baseline(kKey1, kBlock);
  for (const RunMode mode :
       {RunMode::kBaseline, RunMode::kProtectedTree, RunMode::kProtectedGrid}) {
    Rng rng(51);
    const TracedRun run = run_traced(mode, kKey1, kBlock, ms, rng);
    CHECK(run.ciphertext == expected);
    CHECK(run.log.all_segments_seen());
    CHECK_FALSE(run.log.events().empty());
    // Segment tags are non-decreasing by construction.
    std::uint8_t last = 0;
    for (const trace::Event& e : run.log.events()) {
      CHECK(e.segment >= last);
      last = e.segment;
    }
  }
}

TEST_CASE("traces are deterministic under a fixed seed") {
  const ModuliSet ms({17, 19});
  Rng rng_a(52);
  Rng rng_b(52);
  const TracedRun a = run_traced(RunMode::kProtectedGrid, kKey1, kBlock, ms,
                                 rng_a);
  const TracedRun b = run_traced(RunMode::kProtectedGrid, kKey1, kBlock, ms,
                                 rng_b);
  CHECK(logs_equal(a.log, b.log));

  Rng rng_c(53);
  const TracedRun c = run_traced(RunMode::kProtectedGrid, kKey1, kBlock, ms,
                                 rng_c);
  CHECK_FALSE(logs_equal(a.log, c.log));
}

TEST_CASE("every intrinsic contributes operand and result events") {
  const ModuliSet ms({17, 19});
  trace::TraceLog log;
  {
    trace::ScopedTrace scope(log);
    log.begin_segment(trace::Segment::kInitEncode);
    const EncodedValue a = encode(ms, 29);
    const EncodedValue b = encode(ms, 27);
    (void)add_enc(ms, a, b);
  }
  int add_events = 0;
  for (const trace::Event& e : log.events()) {
    if (std::strcmp(e.label, "rnc.add") == 0) ++add_events;
  }
  // Two operands and one result, one event per component.
  CHECK(add_events >= 3 * static_cast<int>(ms.count()));
}

TEST_CASE("baseline run leaks every key byte in all four segments") {
  const ModuliSet ms({17, 19});
  Rng rng(54);
  const TracedRun run = run_traced(RunMode::kBaseline, kKey1, kBlock, ms, rng);
  const aes::Schedule schedule = aes::key_schedule_baseline(kKey1);
  const LeakReport report = find_keys(run.log, kKey1, schedule);

  for (int seg = 0; seg < 4; ++seg) {
    CHECK(report.segments[seg].key_bytes_found_pct == 100.0);
    // 0x2b is key byte 0.
    CHECK(report.segments[seg].byte_value_hits[0x2b] > 0);
  }
  // Every round-key word is visible somewhere in segments 1-2.
  for (std::size_t w = 0; w < 44; ++w) {
    CHECK(report.segments[1].round_key_word_hits[w] +
              report.segments[2].round_key_word_hits[w] >=
          1);
  }
}

TEST_CASE("protected runs leak no round-key word in segments 1-2") {
  const ModuliSet ms({17, 19});
  for (const RunMode mode :
       {RunMode::kProtectedTree, RunMode::kProtectedGrid}) {
    for (const aes::Key& key : {kKey1, kKey2, kKey3}) {
      Rng rng(55);
      const TracedRun run = run_traced(mode, key, kBlock, ms, rng);
      const aes::Schedule schedule = aes::key_schedule_baseline(key);
      const LeakReport report = find_keys(run.log, key, schedule);
      CHECK(report.word_hits_in_protected_segments() == 0);
      // The key is visible where it is stored (segment 0) and where the
      // schedule is decoded (segment 3).
      CHECK(report.segments[0].key_bytes_found_pct == 100.0);
      CHECK(report.segments[3].key_bytes_found_pct == 100.0);
      // No decode happens while the schedule is being generated.
      for (const trace::Event& e : run.log.events()) {
        if (e.segment == 1 || e.segment == 2) {
          CHECK(std::strcmp(e.label, "rnc.decode") != 0);
        }
      }
    }
  }
}

TEST_CASE("cross-key filter flags key-independent byte values") {
  const ModuliSet ms({17, 19});
  std::vector<LeakReport> reports;
  for (const aes::Key& key : {kKey1, kKey2, kKey3}) {
    Rng rng(56);
    const TracedRun run =
        run_traced(RunMode::kProtectedGrid, key, kBlock, ms, rng);
    reports.push_back(
        find_keys(run.log, key, aes::key_schedule_baseline(key)));
  }

  const std::vector<std::uint8_t> single(1);
  CHECK_THROWS_AS(cross_key_filter({reports.data(), 1}), NeedTwoKeysError);

  apply_cross_key_flags(reports);
  CHECK_FALSE(reports[0].cross_key_flagged.empty());
  CHECK(reports[0].cross_key_flagged == reports[2].cross_key_flagged);
  // Every flagged value hit the protected segments for at least two keys.
  for (std::uint8_t v : reports[0].cross_key_flagged) {
    int runs_hit = 0;
    for (const LeakReport& r : reports) {
      if (r.segments[1].byte_value_hits[v] +
              r.segments[2].byte_value_hits[v] >
          0) {
        ++runs_hit;
      }
    }
    CHECK(runs_hit >= 2);
  }
}

TEST_CASE("a synthetic constant injected into every run is flagged") {
  // Minimal hand-built logs: the value 0xAA shows up in segment 1 of every
  // run regardless of the key.
  std::vector<LeakReport> reports;
  for (const aes::Key& key : {kKey1, kKey2}) {
    trace::TraceLog log;
    log.begin_segment(trace::Segment::kInitEncode);
    log.begin_segment(trace::Segment::kExpansionHead);
    log.emit("synthetic", 0xAA, 8);
    log.begin_segment(trace::Segment::kRoundKeyGen);
    log.begin_segment(trace::Segment::kDecodeCipher);
    reports.push_back(find_keys(log, key, aes::key_schedule_baseline(key)));
  }
  const std::vector<std::uint8_t> flagged =
      cross_key_filter({reports.data(), reports.size()});
  CHECK(flagged == std::vector<std::uint8_t>{0xAA});
}

TEST_CASE("word search scans aligned halves of wide events") {
  trace::TraceLog log;
  log.begin_segment(trace::Segment::kInitEncode);
  log.begin_segment(trace::Segment::kExpansionHead);
  const aes::Key zero_key{};
  const aes::Schedule schedule = aes::key_schedule_baseline(zero_key);
  // w[4] of the zero-key schedule, placed in the upper half of a 64-bit word.
  const std::uint64_t w4 = (std::uint64_t{schedule[16]} << 24) |
                           (std::uint64_t{schedule[17]} << 16) |
                           (std::uint64_t{schedule[18]} << 8) | schedule[19];
  log.emit("synthetic", w4 << 32, 64);
  log.begin_segment(trace::Segment::kRoundKeyGen);
  log.begin_segment(trace::Segment::kDecodeCipher);
  const LeakReport report = find_keys(log, zero_key, schedule);
  CHECK(report.segments[1].round_key_word_hits[4] >= 1);
  // An 8-bit event never matches a 32-bit pattern.
  CHECK(report.segments[2].round_key_word_hits[4] == 0);
}

TEST_CASE("csv export carries one record per event") {
  const ModuliSet ms({17, 19});
  Rng rng(57);
  const TracedRun run = run_traced(RunMode::kBaseline, kKey1, kBlock, ms, rng);
  std::ostringstream out;
  trace::write_csv(run.log, out);
  const std::string text = out.str();
  const std::size_t lines =
      static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  CHECK(lines == run.log.events().size() + 1);  // header + rows
  CHECK(text.starts_with("step,segment,width,hex_value,label\n"));
  CHECK(text.find("aes.key_byte") != std::string::npos);
}

TEST_CASE("report json mirrors the segment arrays") {
  const ModuliSet ms({17, 19});
  Rng rng(58);
  const TracedRun run =
      run_traced(RunMode::kProtectedGrid, kKey1, kBlock, ms, rng);
  LeakReport report = find_keys(run.log, kKey1,
                                aes::key_schedule_baseline(kKey1));
  report.cross_key_flagged = {0xAA};
  std::ostringstream out;
  write_report_json(report, out);
  const std::string text = out.str();
  CHECK(text.find("\"segments\"") != std::string::npos);
  CHECK(text.find("\"key_bytes_found_pct\"") != std::string::npos);
  CHECK(text.find("\"round_key_word_hits\"") != std::string::npos);
  CHECK(text.find("\"cross_key_flagged\"") != std::string::npos);
}
