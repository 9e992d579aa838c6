#pragma once

// Advance-then-backtrack pattern extraction, per-(page, feature) empirical
// CDFs over the whole trace population, rarity scoring and thresholding.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "navmine/core.hpp"
#include "navmine/errors.hpp"
#include "navmine/model.hpp"

namespace navmine {

enum class ScoreFormula {
  consistent,  // fraction of the population strictly below v
  literal,     // 1 - fraction at or below v
};

enum class FeatureCombine { max, count_only, intensity_only };

struct DetectionConfig {
  double epsilon = 0.8;
  std::int64_t window_ms = 120000;
  ScoreFormula score_formula = ScoreFormula::consistent;
  FeatureCombine feature_combine = FeatureCombine::max;

  void validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
      fail(Errc::invalid_config, "epsilon must be in [0, 1]");
    if (window_ms <= 0)
      fail(Errc::invalid_config, "window_ms must be > 0");
  }
};

// One advance-then-backtrack occurrence anchored at page B: the user arrived
// at B from a page of strictly lower progress and left it for a page of
// strictly lower progress.
struct PatternOccurrence {
  PageId page_b;
  std::size_t trace_index;  // index of the B event within the trace
  std::int64_t ts;          // timestamp of the arrival at C (the backtrack step)

  bool operator==(const PatternOccurrence&) const = default;
};

struct FeatureVector {
  std::int64_t count = 0;
  std::int64_t intensity = 0;

  bool operator==(const FeatureVector&) const = default;
};

// Occurrences of the pattern at page_b within one trace. Events on pages
// without a progress value are invisible to the scan: the triple is formed
// from the neighbouring events that do have progress.
inline std::vector<PatternOccurrence> find_patterns(const UserTrace& trace,
                                                    const ProgressMap& progress,
                                                    const PageId& page_b) {
  const double b_progress = progress.at(page_b);

  std::vector<std::size_t> visible;
  visible.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (progress.contains(trace.events()[i].page)) visible.push_back(i);

  std::vector<PatternOccurrence> found;
  for (std::size_t k = 1; k + 1 < visible.size(); ++k) {
    const auto& a = trace.events()[visible[k - 1]];
    const auto& b = trace.events()[visible[k]];
    const auto& c = trace.events()[visible[k + 1]];
    if (b.page != page_b) continue;
    if (progress.at(a.page) < b_progress && progress.at(c.page) < b_progress)
      found.push_back(PatternOccurrence{page_b, visible[k], c.ts});
  }
  return found;
}

// count: number of occurrences at page_b. intensity: the length of the
// longest run of consecutive occurrences whose backtrack arrivals are less
// than window_ms apart (a single occurrence is a run of length 1).
inline FeatureVector compute_features(const UserTrace& trace, const ProgressMap& progress,
                                      const PageId& page_b, std::int64_t window_ms) {
  const auto occurrences = find_patterns(trace, progress, page_b);
  FeatureVector fv;
  fv.count = static_cast<std::int64_t>(occurrences.size());

  std::int64_t run = 0;
  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    if (i == 0 || occurrences[i].ts - occurrences[i - 1].ts >= window_ms)
      run = 1;
    else
      ++run;
    fv.intensity = std::max(fv.intensity, run);
  }
  return fv;
}

// Empirical distribution of one feature across the trace population.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty())
      fail(Errc::empty_population, "cannot fit a CDF to an empty population");
    std::sort(values_.begin(), values_.end());
  }

  std::size_t n() const noexcept { return values_.size(); }
  const std::vector<double>& sorted_values() const noexcept { return values_; }

  std::size_t count_below(double v) const {
    return static_cast<std::size_t>(
        std::lower_bound(values_.begin(), values_.end(), v) - values_.begin());
  }

  std::size_t count_at_or_below(double v) const {
    return static_cast<std::size_t>(
        std::upper_bound(values_.begin(), values_.end(), v) - values_.begin());
  }

 private:
  std::vector<double> values_;
};

inline EmpiricalCdf fit_cdf(std::vector<double> values) { return EmpiricalCdf(std::move(values)); }

// Rarity of v within the population; larger means more anomalous.
inline double score_at(const EmpiricalCdf& cdf, double v, ScoreFormula formula) {
  const double n = static_cast<double>(cdf.n());
  if (formula == ScoreFormula::consistent)
    return static_cast<double>(cdf.count_below(v)) / n;
  return 1.0 - static_cast<double>(cdf.count_at_or_below(v)) / n;
}

struct FeatureScores {
  double count_score = 0.0;
  double intensity_score = 0.0;
};

struct AnomalyReport {
  UserId user;
  std::map<PageId, FeatureVector> features;       // per candidate page
  std::map<PageId, FeatureScores> feature_scores; // per candidate page
  double score = 0.0;
  bool flagged = false;
  PageId top_page;  // candidate page contributing the combined score
};

// Scores every trace against CDFs fitted over the whole population. The
// candidate pages are those with a progress value, excluding the final page
// and the model's exclusion set. Reports come back sorted by descending
// score (user id breaks ties) and do not depend on the input order.
inline std::vector<AnomalyReport> detect(const std::vector<UserTrace>& traces,
                                         const PageModel& model,
                                         const DetectionConfig& config = {}) {
  config.validate();
  if (traces.empty())
    fail(Errc::empty_population, "no traces to score");

  // The final page is the unique page at maximal progress 1.
  const PageId* final_page = nullptr;
  for (const auto& [page, value] : model.progress.values)
    if (value == 1.0) final_page = &page;

  std::vector<PageId> candidates;
  for (const auto& page : model.transitions.pages()) {
    if (!model.progress.contains(page)) continue;
    if (model.excluded.contains(page)) continue;
    if (final_page && page == *final_page) continue;
    candidates.push_back(page);
  }
  if (candidates.empty())
    fail(Errc::no_candidate_pages, "every page is excluded from detection");

  const std::size_t n = traces.size();
  std::vector<AnomalyReport> reports;
  reports.reserve(n);
  for (const auto& trace : traces)
    reports.push_back(AnomalyReport{trace.user(), {}, {}, 0.0, false, candidates.front()});

  for (const auto& page : candidates) {
    std::vector<double> counts(n), intensities(n);
    for (std::size_t t = 0; t < n; ++t) {
      const FeatureVector fv = compute_features(traces[t], model.progress, page,
                                                config.window_ms);
      reports[t].features.emplace(page, fv);
      counts[t] = static_cast<double>(fv.count);
      intensities[t] = static_cast<double>(fv.intensity);
    }
    const EmpiricalCdf count_cdf = fit_cdf(counts);
    const EmpiricalCdf intensity_cdf = fit_cdf(intensities);
    for (std::size_t t = 0; t < n; ++t) {
      const FeatureVector& fv = reports[t].features.at(page);
      FeatureScores scores;
      scores.count_score =
          score_at(count_cdf, static_cast<double>(fv.count), config.score_formula);
      scores.intensity_score =
          score_at(intensity_cdf, static_cast<double>(fv.intensity), config.score_formula);
      reports[t].feature_scores.emplace(page, scores);
    }
  }

  for (auto& report : reports) {
    double best = -1.0;
    for (const auto& page : candidates) {
      const FeatureScores& scores = report.feature_scores.at(page);
      std::vector<double> considered;
      switch (config.feature_combine) {
        case FeatureCombine::max:
          considered = {scores.count_score, scores.intensity_score};
          break;
        case FeatureCombine::count_only:
          considered = {scores.count_score};
          break;
        case FeatureCombine::intensity_only:
          considered = {scores.intensity_score};
          break;
      }
      for (double s : considered) {
        if (s > best) {
          best = s;
          report.top_page = page;
        }
      }
    }
    report.score = best;
    report.flagged = report.score >= config.epsilon;
  }

  std::sort(reports.begin(), reports.end(), [](const AnomalyReport& a, const AnomalyReport& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.user < b.user;
  });
  return reports;
}

}  // namespace navmine
