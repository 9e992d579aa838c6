#pragma once

// Precision/recall evaluation of anomaly reports against ground-truth labels
// and threshold sweeps over a fixed scoring (CDFs are fitted once, only the
// flagging threshold moves).

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "navmine/core.hpp"
#include "navmine/detect.hpp"
#include "navmine/errors.hpp"

namespace navmine {

struct Metrics {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;
  double precision = 0.0;  // 0 when nothing was flagged
  double recall = 0.0;     // 0 when there are no positives
  double f1 = 0.0;         // 0 when precision + recall == 0

  bool operator==(const Metrics&) const = default;
};

namespace detail {

inline void finish_metrics(Metrics& m) {
  const std::int64_t flagged = m.tp + m.fp;
  const std::int64_t positive = m.tp + m.fn;
  m.precision = flagged == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(flagged);
  m.recall = positive == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(positive);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
}

inline bool label_of(const std::map<UserId, bool>& labels, const UserId& user) {
  auto it = labels.find(user);
  if (it == labels.end())
    fail(Errc::missing_label, "no ground-truth label for user '" + user.value() + "'");
  return it->second;
}

}  // namespace detail

// Confusion counts and derived metrics. Every reported user needs a label.
inline Metrics evaluate(const std::vector<AnomalyReport>& reports,
                        const std::map<UserId, bool>& labels) {
  Metrics m;
  for (const auto& report : reports) {
    const bool positive = detail::label_of(labels, report.user);
    if (report.flagged)
      (positive ? m.tp : m.fp) += 1;
    else
      (positive ? m.fn : m.tn) += 1;
  }
  detail::finish_metrics(m);
  return m;
}

// Metrics for several flagging thresholds over one detect() run. Scores are
// computed once with `config`; each epsilon in the grid only re-thresholds
// them, so the sweep is consistent with individual detect() runs.
inline std::vector<std::pair<double, Metrics>> sweep_threshold(
    const std::vector<UserTrace>& traces, const PageModel& model, const DetectionConfig& config,
    const std::map<UserId, bool>& labels, const std::vector<double>& epsilons) {
  if (epsilons.empty())
    fail(Errc::invalid_argument, "sweep_threshold: epsilon grid must be non-empty");
  const std::vector<AnomalyReport> reports = detect(traces, model, config);

  std::vector<std::pair<double, Metrics>> sweep;
  sweep.reserve(epsilons.size());
  for (double eps : epsilons) {
    Metrics m;
    for (const auto& report : reports) {
      const bool positive = detail::label_of(labels, report.user);
      if (report.score >= eps)
        (positive ? m.tp : m.fp) += 1;
      else
        (positive ? m.fn : m.tn) += 1;
    }
    detail::finish_metrics(m);
    sweep.emplace_back(eps, m);
  }
  return sweep;
}

}  // namespace navmine
