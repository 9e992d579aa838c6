#pragma once

// Serialization of anomaly reports, metrics and labels. Report and metrics
// JSON is emitted with a fixed key order and indentation so that identical
// inputs yield byte-identical files.

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "navmine/core.hpp"
#include "navmine/detect.hpp"
#include "navmine/errors.hpp"
#include "navmine/evaluate.hpp"

namespace navmine {

inline void write_reports(std::ostream& out, const std::vector<AnomalyReport>& reports) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& report : reports) {
    nlohmann::ordered_json item;
    item["user_id"] = report.user.value();
    item["score"] = report.score;
    item["flagged"] = report.flagged;
    item["top_page"] = report.top_page.value();
    nlohmann::ordered_json features = nlohmann::ordered_json::object();
    for (const auto& [page, fv] : report.features) {
      features[page.value()] = {{"count", fv.count}, {"intensity", fv.intensity}};
    }
    item["features"] = std::move(features);
    doc.push_back(std::move(item));
  }
  out << doc.dump(2) << '\n';
}

// Reads a report file written by write_reports. Per-page score breakdowns
// are not serialized; reconstructed reports carry the fields evaluation
// needs (user, score, flagged, per-page features, top page).
inline std::vector<AnomalyReport> read_reports(std::istream& in) {
  const nlohmann::json doc = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_array())
    fail(Errc::unreadable_input, "report file is not a JSON array");

  std::vector<AnomalyReport> reports;
  reports.reserve(doc.size());
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("user_id") || !item["user_id"].is_string() ||
        !item.contains("score") || !item["score"].is_number() || !item.contains("flagged") ||
        !item["flagged"].is_boolean() || !item.contains("top_page") ||
        !item["top_page"].is_string())
      fail(Errc::unreadable_input, "report entry is missing required fields");
    try {
      AnomalyReport report{UserId(item["user_id"].get<std::string>()),
                           {},
                           {},
                           item["score"].get<double>(),
                           item["flagged"].get<bool>(),
                           PageId(item["top_page"].get<std::string>())};
      if (item.contains("features")) {
        if (!item["features"].is_object())
          fail(Errc::unreadable_input, "report features must be an object");
        for (const auto& [page, fv] : item["features"].items()) {
          if (!fv.is_object() || !fv.contains("count") || !fv["count"].is_number_integer() ||
              !fv.contains("intensity") || !fv["intensity"].is_number_integer())
            fail(Errc::unreadable_input, "report feature entry is malformed");
          report.features.emplace(PageId(page), FeatureVector{fv["count"].get<std::int64_t>(),
                                                              fv["intensity"].get<std::int64_t>()});
        }
      }
      reports.push_back(std::move(report));
    } catch (const Error& e) {
      if (e.code() == Errc::unreadable_input) throw;
      fail(Errc::unreadable_input, std::string("report entry is invalid: ") + e.what());
    }
  }
  return reports;
}

inline nlohmann::ordered_json metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json doc;
  doc["tp"] = m.tp;
  doc["fp"] = m.fp;
  doc["tn"] = m.tn;
  doc["fn"] = m.fn;
  doc["precision"] = m.precision;
  doc["recall"] = m.recall;
  doc["f1"] = m.f1;
  return doc;
}

inline void write_labels_csv(std::ostream& out, const std::map<UserId, bool>& labels) {
  out << "user_id,label\n";
  for (const auto& [user, positive] : labels)
    out << user.value() << ',' << (positive ? '1' : '0') << '\n';
}

// Strict reader for the labels format: evaluation results are meaningless
// with silently dropped labels, so malformed rows are an error here, unlike
// event-log ingestion.
inline std::map<UserId, bool> read_labels_csv(std::istream& in) {
  std::map<UserId, bool> labels;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!saw_header) {
      saw_header = true;
      if (line != "user_id,label")
        fail(Errc::unreadable_input, "labels file must start with 'user_id,label'");
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      fail(Errc::unreadable_input, "labels line " + std::to_string(line_no) + " is malformed");
    const std::string user = line.substr(0, comma);
    const std::string label = line.substr(comma + 1);
    if (label != "0" && label != "1")
      fail(Errc::unreadable_input,
           "labels line " + std::to_string(line_no) + " has label '" + label + "', expected 0 or 1");
    try {
      if (!labels.emplace(UserId(user), label == "1").second)
        fail(Errc::unreadable_input, "duplicate label for user '" + user + "'");
    } catch (const Error& e) {
      if (e.code() == Errc::unreadable_input) throw;
      fail(Errc::unreadable_input, std::string("labels line ") + std::to_string(line_no) +
                                       ": " + e.what());
    }
  }
  if (in.bad())
    fail(Errc::unreadable_input, "labels file: read error");
  return labels;
}

}  // namespace navmine
