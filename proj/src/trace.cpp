#include "rnc/trace.hpp"

#include <ostream>

namespace rnc::trace {

namespace {
thread_local TraceLog* t_active = nullptr;
}

void TraceLog::begin_segment(Segment s) {
  const int id = static_cast<int>(s);
  if (id != next_segment_) {
    throw Error("segment boundaries must appear once each, in order");
  }
  segment_starts_[static_cast<std::size_t>(id)] = events_.size();
  current_segment_ = static_cast<std::uint8_t>(id);
  ++next_segment_;
}

void TraceLog::emit(const char* label, std::uint64_t value,
                    std::uint8_t width) {
  events_.push_back(Event{events_.size(), current_segment_, width, value,
                          label});
}

std::optional<std::uint64_t> TraceLog::segment_start(Segment s) const {
  return segment_starts_[static_cast<std::size_t>(s)];
}

void write_csv(const TraceLog& log, std::ostream& out) {
  out << "step,segment,width,hex_value,label\n";
  char buf[17];
  for (const Event& e : log.events()) {
    std::snprintf(buf, sizeof buf, "%llx",
                  static_cast<unsigned long long>(e.value));
    out << e.step << ',' << int(e.segment) << ',' << int(e.width) << ','
        << buf << ',' << e.label << '\n';
  }
}

ScopedTrace::ScopedTrace(TraceLog& log) : previous_(t_active) {
  t_active = &log;
}

ScopedTrace::~ScopedTrace() { t_active = previous_; }

TraceLog* active() noexcept { return t_active; }

}  // namespace rnc::trace
