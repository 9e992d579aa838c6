#pragma once

// Event-log ingestion: JSONL and CSV parsing, per-user sessionization, and
// projection of traces onto a task's page set. Malformed records never abort
// a run; they are counted in IngestStats and skipped.
//
// The CSV dialect is deliberately plain (no quoting): it is only suitable
// for logs whose ids contain no commas. JSONL handles arbitrary ids.

#include <cstdint>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "navmine/core.hpp"
#include "navmine/errors.hpp"

namespace navmine {

enum class EventLogFormat { jsonl, csv };

struct IngestStats {
  std::int64_t events_read = 0;
  std::int64_t events_dropped_offtask = 0;
  std::int64_t events_malformed = 0;
  std::int64_t traces_built = 0;

  bool operator==(const IngestStats&) const = default;
};

struct ParseResult {
  std::vector<NavigationEvent> events;
  IngestStats stats;
};

inline const char* csv_header() { return "user_id,page_id,ts"; }

namespace detail {

inline void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline bool blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

// Returns false when the line is not a valid event record.
inline bool parse_jsonl_record(const std::string& line, std::vector<NavigationEvent>& out) {
  const nlohmann::json rec = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (rec.is_discarded() || !rec.is_object()) return false;
  auto user = rec.find("user_id");
  auto page = rec.find("page_id");
  auto ts = rec.find("ts");
  if (user == rec.end() || page == rec.end() || ts == rec.end()) return false;
  if (!user->is_string() || !page->is_string() || !ts->is_number_integer()) return false;
  try {
    out.emplace_back(UserId(user->get<std::string>()), PageId(page->get<std::string>()),
                     ts->get<std::int64_t>());
  } catch (const Error&) {
    return false;
  }
  return true;
}

inline bool parse_csv_record(const std::string& line, std::vector<NavigationEvent>& out) {
  std::size_t c1 = line.find(',');
  if (c1 == std::string::npos) return false;
  std::size_t c2 = line.find(',', c1 + 1);
  if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) return false;
  const std::string user = line.substr(0, c1);
  const std::string page = line.substr(c1 + 1, c2 - c1 - 1);
  const std::string ts_text = line.substr(c2 + 1);
  std::int64_t ts = 0;
  const char* first = ts_text.data();
  const char* last = first + ts_text.size();
  auto [ptr, ec] = std::from_chars(first, last, ts);
  if (ec != std::errc() || ptr != last) return false;
  try {
    out.emplace_back(UserId(user), PageId(page), ts);
  } catch (const Error&) {
    return false;
  }
  return true;
}

}  // namespace detail

// Reads an event log. Blank lines are ignored; records that do not satisfy
// the event invariants count as malformed and are skipped.
inline ParseResult parse_events(std::istream& in, EventLogFormat format) {
  ParseResult result;
  std::string line;
  bool saw_csv_header = false;
  while (std::getline(in, line)) {
    detail::chomp(line);
    if (detail::blank(line)) continue;
    if (format == EventLogFormat::csv && !saw_csv_header) {
      saw_csv_header = true;
      if (line == csv_header()) continue;
      // A data file without the mandatory header: the first line is counted
      // as malformed and parsing continues with the remaining lines.
      result.stats.events_read += 1;
      result.stats.events_malformed += 1;
      continue;
    }
    result.stats.events_read += 1;
    const bool ok = format == EventLogFormat::jsonl
                        ? detail::parse_jsonl_record(line, result.events)
                        : detail::parse_csv_record(line, result.events);
    if (!ok) result.stats.events_malformed += 1;
  }
  if (in.bad())
    fail(Errc::unreadable_input, "event log: read error");
  return result;
}

inline void serialize_events(std::ostream& out, const std::vector<NavigationEvent>& events,
                             EventLogFormat format) {
  if (format == EventLogFormat::csv) {
    out << csv_header() << '\n';
    for (const auto& e : events)
      out << e.user.value() << ',' << e.page.value() << ',' << e.ts << '\n';
    return;
  }
  for (const auto& e : events) {
    nlohmann::ordered_json rec;
    rec["user_id"] = e.user.value();
    rec["page_id"] = e.page.value();
    rec["ts"] = e.ts;
    out << rec.dump() << '\n';
  }
}

// Groups events into one trace per user. Traces come back ordered by user id;
// each trace is in timestamp order (stable for ties).
inline std::vector<UserTrace> sessionize(const std::vector<NavigationEvent>& events) {
  std::map<UserId, std::vector<NavigationEvent>> by_user;
  for (const auto& e : events) by_user[e.user].push_back(e);
  std::vector<UserTrace> traces;
  traces.reserve(by_user.size());
  for (auto& [user, evs] : by_user) traces.emplace_back(user, std::move(evs));
  return traces;
}

// Keeps only events on the task's pages. Idempotent.
inline UserTrace project_trace(const UserTrace& trace, const TaskSpec& task,
                               std::int64_t* dropped = nullptr) {
  std::vector<NavigationEvent> kept;
  kept.reserve(trace.size());
  for (const auto& e : trace.events())
    if (task.pages.contains(e.page)) kept.push_back(e);
  if (dropped) *dropped += static_cast<std::int64_t>(trace.size() - kept.size());
  return UserTrace(trace.user(), std::move(kept));
}

inline std::vector<UserTrace> project_traces(const std::vector<UserTrace>& traces,
                                             const TaskSpec& task,
                                             IngestStats* stats = nullptr) {
  std::vector<UserTrace> out;
  out.reserve(traces.size());
  std::int64_t dropped = 0;
  for (const auto& t : traces) out.push_back(project_trace(t, task, &dropped));
  if (stats) {
    stats->events_dropped_offtask += dropped;
    stats->traces_built = static_cast<std::int64_t>(out.size());
  }
  return out;
}

}  // namespace navmine
