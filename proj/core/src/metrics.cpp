#include "tabkit/metrics.hpp"

#include "tabkit/errors.hpp"
#include "tabkit/machine.hpp"

namespace tabkit {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::ProducerStarted: return "producer_started";
    case EventKind::ConsumerRegistered: return "consumer_registered";
    case EventKind::AnswerInserted: return "answer_inserted";
    case EventKind::AnswerDuplicate: return "answer_duplicate";
    case EventKind::AnswerEmitted: return "answer_emitted";
  }
  return "?";
}

void record(const AnswerEvent& e, Metrics& m) {
  if (e.ordinal <= m.last_ordinal)
    throw MetricsError("event ordinal " + std::to_string(e.ordinal) + " does not follow " +
                       std::to_string(m.last_ordinal));
  m.last_ordinal = e.ordinal;
  switch (e.kind) {
    case EventKind::ProducerStarted: ++m.n_p; break;
    case EventKind::ConsumerRegistered: ++m.n_c; break;
    case EventKind::AnswerInserted: ++m.n_s; break;
    case EventKind::AnswerDuplicate: ++m.duplicates; break;
    case EventKind::AnswerEmitted:
      if (m.emitted++ == 0) m.first_emit_ordinal = e.ordinal;
      break;
  }
}

void absorb(const MachineStats& s, Metrics& m) {
  m.captures = s.captures;
  m.resumes = s.resumes;
  m.cont_frames_total = s.cont_frames_total;
  m.max_cont_frames = s.max_cont_frames;
}

std::string format_ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return "-";
  // Rounded half up in integer arithmetic.
  std::uint64_t whole = num / den;
  std::uint64_t tenths = ((num % den) * 20 + den) / (2 * den);
  if (tenths == 10) {
    ++whole;
    tenths = 0;
  }
  auto frac = static_cast<unsigned>(tenths);
  return std::to_string(whole) + "." + std::to_string(frac);
}

MetricsRow report(std::string name, const Metrics& m) {
  return MetricsRow{std::move(name), m.n_p, m.n_c, m.n_s, format_ratio(m.n_c, m.n_p),
                    format_ratio(m.n_s, m.n_p)};
}

}  // namespace tabkit
