#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "tabkit/term.hpp"

namespace tabkit {

struct MachineStats;

enum class EventKind : std::uint8_t {
  ProducerStarted,
  ConsumerRegistered,
  AnswerInserted,
  AnswerDuplicate,
  AnswerEmitted,
};

std::string_view to_string(EventKind k);

struct AnswerEvent {
  EventKind kind = EventKind::ProducerStarted;
  VariantKey key;
  /// Canonical answer tuple; empty for producer/consumer events.
  Term tuple;
  std::uint64_t ordinal = 0;
};

struct Metrics {
  std::uint64_t n_p = 0;  // producers: distinct variant calls
  std::uint64_t n_c = 0;  // consumer calls
  std::uint64_t n_s = 0;  // answers stored over all tables
  std::uint64_t duplicates = 0;
  std::uint64_t emitted = 0;
  std::uint64_t last_ordinal = 0;
  std::uint64_t first_emit_ordinal = 0;  // 0 while nothing was emitted

  std::uint64_t captures = 0;
  std::uint64_t resumes = 0;
  std::uint64_t cont_frames_total = 0;
  std::uint64_t max_cont_frames = 0;

  std::uint64_t tables_created() const noexcept { return n_p; }
  std::uint64_t tabled_calls() const noexcept { return n_p + n_c; }
  /// Only meaningful when n_p > 0.
  double r_c() const noexcept { return n_p ? double(n_c) / double(n_p) : 0.0; }
  double r_s() const noexcept { return n_p ? double(n_s) / double(n_p) : 0.0; }
};

/// Counts one event. Throws MetricsError unless ordinals strictly increase.
void record(const AnswerEvent& e, Metrics& m);

/// Copies the continuation accounting of a machine into `m`.
void absorb(const MachineStats& s, Metrics& m);

struct MetricsRow {
  std::string name;
  std::uint64_t n_p = 0;
  std::uint64_t n_c = 0;
  std::uint64_t n_s = 0;
  std::string r_c;
  std::string r_s;
};

/// num/den rounded half up to one decimal, e.g. "48.0". "-" when den is 0.
std::string format_ratio(std::uint64_t num, std::uint64_t den);

MetricsRow report(std::string name, const Metrics& m);

}  // namespace tabkit
