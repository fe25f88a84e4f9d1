#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rnc/errors.hpp"

namespace rnc::trace {

/// Timeline phases of an audited run.
///   0: initialization, storing the plain key/input, encoding the key
///   1: first key-schedule words
///   2: generation of the remaining round-key words
///   3: decoding and cipher output
enum class Segment : std::uint8_t {
  kInitEncode = 0,
  kExpansionHead = 1,
  kRoundKeyGen = 2,
  kDecodeCipher = 3,
};

/// One machine-visible word. width is the logical width in bits (8, 32 or
/// 64); label names the operation that exposed the word.
struct Event {
  std::uint64_t step;
  std::uint8_t segment;
  std::uint8_t width;
  std::uint64_t value;
  const char* label;
};

/// Ordered record of every machine-visible word of a run, with phase tags.
/// Collects events while installed as the thread's active sink.
class TraceLog {
 public:
  void begin_segment(Segment s);
  void emit(const char* label, std::uint64_t value, std::uint8_t width);

  const std::vector<Event>& events() const noexcept { return events_; }
  std::optional<std::uint64_t> segment_start(Segment s) const;
  bool all_segments_seen() const noexcept { return next_segment_ == 4; }

 private:
  std::vector<Event> events_;
  std::array<std::optional<std::uint64_t>, 4> segment_starts_;
  int next_segment_ = 0;  // boundaries must appear once each, in order
  std::uint8_t current_segment_ = 0;
};

/// Newline-delimited records: step,segment,width,hex_value,label.
void write_csv(const TraceLog& log, std::ostream& out);

/// Installs a TraceLog as this thread's active sink for its lifetime.
class ScopedTrace {
 public:
  explicit ScopedTrace(TraceLog& log);
  ~ScopedTrace();
  ScopedTrace(const ScopedTrace&) = delete;
  ScopedTrace& operator=(const ScopedTrace&) = delete;

 private:
  TraceLog* previous_;
};

/// Active sink of the calling thread, or nullptr.
TraceLog* active() noexcept;

inline void emit(const char* label, std::uint64_t value, std::uint8_t width) {
  if (TraceLog* t = active()) t->emit(label, value, width);
}

inline void begin_segment(Segment s) {
  if (TraceLog* t = active()) t->begin_segment(s);
}

}  // namespace rnc::trace
