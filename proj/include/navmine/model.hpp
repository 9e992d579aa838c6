#pragma once

// The Markov page model built from projected traces: transition counts and
// row-normalized probabilities, per-page progress values, expected backtrack
// statistics derived from the absorbing-chain fundamental matrix, and the
// set of pages excluded from anomaly detection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "navmine/core.hpp"
#include "navmine/errors.hpp"
#include "navmine/linalg.hpp"

namespace navmine {

struct Edge {
  PageId from;
  PageId to;
  double prob;
};

// Transition counts and probabilities over a fixed, sorted page set. Rows
// are normalized independently; a page with no observed outgoing transitions
// has an all-zero row. Solvers treat the final page as absorbing regardless
// of its row, so a model built from probabilities may give the final page
// outgoing edges (useful for export) without affecting the math.
class TransitionModel {
 public:
  TransitionModel(std::vector<PageId> pages, std::vector<std::vector<std::int64_t>> counts)
      : pages_(std::move(pages)), counts_(std::move(counts)) {
    if (!std::is_sorted(pages_.begin(), pages_.end()))
      std::sort(pages_.begin(), pages_.end());
    const std::size_t n = pages_.size();
    if (counts_.size() != n)
      fail(Errc::invalid_argument, "transition counts must be square over the page set");
    for (const auto& row : counts_) {
      if (row.size() != n)
        fail(Errc::invalid_argument, "transition counts must be square over the page set");
      for (std::int64_t c : row)
        if (c < 0) fail(Errc::invalid_argument, "transition counts must be >= 0");
    }
    for (std::size_t i = 0; i < n; ++i) index_.emplace(pages_[i], i);
    if (index_.size() != n)
      fail(Errc::invalid_argument, "duplicate page in transition model");
    normalize();
  }

  // Builds a model from explicit edge probabilities (ground-truth models for
  // simulation). Each named row must sum to 1 within 1e-9; counts are
  // synthesized at a fixed scale so the count/probability invariant holds.
  static TransitionModel from_probabilities(const std::set<PageId>& pages,
                                            const std::vector<Edge>& edges) {
    std::vector<PageId> page_list(pages.begin(), pages.end());
    std::map<PageId, std::size_t> index;
    for (std::size_t i = 0; i < page_list.size(); ++i) index.emplace(page_list[i], i);

    const std::size_t n = page_list.size();
    std::vector<std::vector<double>> probs(n, std::vector<double>(n, 0.0));
    for (const auto& e : edges) {
      auto from = index.find(e.from);
      auto to = index.find(e.to);
      if (from == index.end())
        fail(Errc::unknown_page, "edge from unknown page '" + e.from.value() + "'");
      if (to == index.end())
        fail(Errc::unknown_page, "edge to unknown page '" + e.to.value() + "'");
      if (!(e.prob >= 1e-6 && e.prob <= 1.0))
        fail(Errc::invalid_argument, "edge probability must be in [1e-6, 1]: '" +
                                         e.from.value() + "' -> '" + e.to.value() + "'");
      if (probs[from->second][to->second] != 0.0)
        fail(Errc::invalid_argument, "duplicate edge '" + e.from.value() + "' -> '" +
                                         e.to.value() + "'");
      probs[from->second][to->second] = e.prob;
    }
    constexpr double kCountScale = 1e6;
    std::vector<std::vector<std::int64_t>> counts(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      double row_sum = 0.0;
      for (double p : probs[i]) row_sum += p;
      if (row_sum == 0.0) continue;
      if (std::abs(row_sum - 1.0) > 1e-9)
        fail(Errc::invalid_argument,
             "outgoing probabilities of page '" + page_list[i].value() +
                 "' sum to " + std::to_string(row_sum) + ", expected 1");
      for (std::size_t j = 0; j < n; ++j)
        counts[i][j] = static_cast<std::int64_t>(std::llround(probs[i][j] * kCountScale));
    }
    return TransitionModel(std::move(page_list), std::move(counts));
  }

  const std::vector<PageId>& pages() const noexcept { return pages_; }

  std::optional<std::size_t> index_of(const PageId& p) const {
    auto it = index_.find(p);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require_index(const PageId& p) const {
    auto idx = index_of(p);
    if (!idx) fail(Errc::unknown_page, "page '" + p.value() + "' is not in the model");
    return *idx;
  }

  std::int64_t count(std::size_t i, std::size_t j) const { return counts_[i][j]; }
  double prob(std::size_t i, std::size_t j) const { return probs_[i][j]; }
  std::size_t page_count() const noexcept { return pages_.size(); }

  std::int64_t total_count() const {
    std::int64_t total = 0;
    for (const auto& row : counts_)
      for (std::int64_t c : row) total += c;
    return total;
  }

 private:
  void normalize() {
    probs_.assign(counts_.size(), std::vector<double>(counts_.size(), 0.0));
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      std::int64_t row_sum = 0;
      for (std::int64_t c : counts_[i]) row_sum += c;
      if (row_sum == 0) continue;
      for (std::size_t j = 0; j < counts_.size(); ++j)
        probs_[i][j] = static_cast<double>(counts_[i][j]) / static_cast<double>(row_sum);
    }
  }

  std::vector<PageId> pages_;
  std::map<PageId, std::size_t> index_;
  std::vector<std::vector<std::int64_t>> counts_;
  std::vector<std::vector<double>> probs_;
};

// Estimates transition counts from adjacent event pairs of the projected
// traces. Throws NoTransitions when no trace has two consecutive events and
// UnknownPage when a trace mentions a page outside the task.
inline TransitionModel estimate_transitions(const std::vector<UserTrace>& traces,
                                            const TaskSpec& task) {
  validate_task(task);
  std::vector<PageId> pages(task.pages.begin(), task.pages.end());
  std::map<PageId, std::size_t> index;
  for (std::size_t i = 0; i < pages.size(); ++i) index.emplace(pages[i], i);

  std::vector<std::vector<std::int64_t>> counts(pages.size(),
                                                std::vector<std::int64_t>(pages.size(), 0));
  std::int64_t pairs = 0;
  for (const auto& trace : traces) {
    const auto& evs = trace.events();
    for (const auto& e : evs)
      if (!index.count(e.page))
        fail(Errc::unknown_page,
             "trace of user '" + trace.user().value() + "' visits off-task page '" +
                 e.page.value() + "'");
    for (std::size_t k = 0; k + 1 < evs.size(); ++k) {
      counts[index[evs[k].page]][index[evs[k + 1].page]] += 1;
      ++pairs;
    }
  }
  if (pairs == 0)
    fail(Errc::no_transitions, "no adjacent event pairs in any trace");
  return TransitionModel(std::move(pages), std::move(counts));
}

// Progress values for the pages that can reach the final page. Pages outside
// `values` have no defined progress.
struct ProgressMap {
  std::map<PageId, double> values;

  bool contains(const PageId& p) const { return values.count(p) != 0; }

  double at(const PageId& p) const {
    auto it = values.find(p);
    if (it == values.end())
      fail(Errc::unknown_page, "no progress value for page '" + p.value() + "'");
    return it->second;
  }
};

namespace detail {

// Pages from which the final page is reachable (final included), found by a
// breadth-first search over reversed edges with count > 0. Also reports the
// hop distance to final. Outgoing counts of the final page are ignored: the
// model treats it as absorbing.
inline std::map<std::size_t, std::int64_t> reach_final(const TransitionModel& model,
                                                       std::size_t final_idx) {
  std::map<std::size_t, std::int64_t> dist;
  dist[final_idx] = 0;
  std::deque<std::size_t> queue{final_idx};
  while (!queue.empty()) {
    const std::size_t q = queue.front();
    queue.pop_front();
    for (std::size_t p = 0; p < model.page_count(); ++p) {
      if (p == final_idx || dist.count(p)) continue;
      if (model.count(p, q) > 0) {
        dist[p] = dist[q] + 1;
        queue.push_back(p);
      }
    }
  }
  return dist;
}

inline std::size_t checked_final(const TransitionModel& model, const TaskSpec& task) {
  return model.require_index(task.final);
}

inline void check_begin_reaches(const std::map<std::size_t, std::int64_t>& dist,
                                const TransitionModel& model, const TaskSpec& task) {
  const std::size_t begin_idx = model.require_index(task.begin);
  if (!dist.count(begin_idx))
    fail(Errc::final_unreachable_from_begin,
         "final page '" + task.final.value() + "' is unreachable from begin page '" +
             task.begin.value() + "'");
}

}  // namespace detail

// Progress from shortest-path hop distance to final: progress = (D - d) / D
// where D is the largest distance among pages that reach final.
inline ProgressMap shortest_path_progress(const TransitionModel& model, const TaskSpec& task) {
  const std::size_t final_idx = detail::checked_final(model, task);
  const auto dist = detail::reach_final(model, final_idx);
  detail::check_begin_reaches(dist, model, task);

  std::int64_t max_d = 0;
  for (const auto& [idx, d] : dist) max_d = std::max(max_d, d);

  ProgressMap progress;
  for (const auto& [idx, d] : dist) {
    const double value = max_d == 0 ? 1.0
                                    : (static_cast<double>(max_d - d) /
                                       static_cast<double>(max_d));
    progress.values.emplace(model.pages()[idx], value);
  }
  return progress;
}

namespace detail {

// Transient pages (reach final, not final itself) in model page order.
inline std::vector<std::size_t> transient_pages(const std::map<std::size_t, std::int64_t>& dist,
                                                std::size_t final_idx) {
  std::vector<std::size_t> t;
  for (const auto& [idx, d] : dist)
    if (idx != final_idx) t.push_back(idx);
  std::sort(t.begin(), t.end());
  return t;
}

// I - Q over the given transient pages, Q being transition probabilities
// restricted to them.
inline Matrix i_minus_q(const TransitionModel& model, const std::vector<std::size_t>& transient) {
  const std::size_t m = transient.size();
  Matrix a = Matrix::identity(m);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c)
      a(r, c) -= model.prob(transient[r], transient[c]);
  return a;
}

constexpr double kResidualMax = 1e-9;

inline void check_residual(const Matrix& a, const std::vector<double>& x,
                           const std::vector<double>& b) {
  const double r = residual_inf(a, x, b);
  if (!(r <= kResidualMax))
    fail(Errc::singular_system,
         "linear solve residual " + std::to_string(r) + " exceeds 1e-9");
}

}  // namespace detail

// Progress from expected hitting time h(p) of the final page, obtained from
// (I - Q) h = 1: progress = (H - h(p)) / H with H the largest hitting time.
inline ProgressMap hitting_time_progress(const TransitionModel& model, const TaskSpec& task) {
  const std::size_t final_idx = detail::checked_final(model, task);
  const auto dist = detail::reach_final(model, final_idx);
  detail::check_begin_reaches(dist, model, task);

  const auto transient = detail::transient_pages(dist, final_idx);
  ProgressMap progress;
  progress.values.emplace(task.final, 1.0);
  if (transient.empty()) return progress;

  const Matrix a = detail::i_minus_q(model, transient);
  const std::vector<double> b(transient.size(), 1.0);
  const std::vector<double> h = solve(a, b);
  detail::check_residual(a, h, b);

  double max_h = 0.0;
  for (double v : h) max_h = std::max(max_h, v);
  for (std::size_t k = 0; k < transient.size(); ++k)
    progress.values.emplace(model.pages()[transient[k]], (max_h - h[k]) / max_h);
  return progress;
}

// Expected number of visits to each transient page on a walk started at the
// begin page, i.e. the begin row of the fundamental matrix N = (I - Q)^-1,
// computed by solving the transposed system (I - Q)^T x = e_begin.
inline std::map<PageId, double> expected_visits(const TransitionModel& model,
                                                const TaskSpec& task) {
  const std::size_t final_idx = detail::checked_final(model, task);
  const auto dist = detail::reach_final(model, final_idx);
  detail::check_begin_reaches(dist, model, task);

  const auto transient = detail::transient_pages(dist, final_idx);
  std::map<PageId, double> visits;
  if (transient.empty()) return visits;

  const std::size_t begin_idx = model.require_index(task.begin);
  const Matrix at = detail::i_minus_q(model, transient).transposed();
  std::vector<double> b(transient.size(), 0.0);
  for (std::size_t k = 0; k < transient.size(); ++k)
    if (transient[k] == begin_idx) b[k] = 1.0;
  const std::vector<double> x = solve(at, b);
  detail::check_residual(at, x, b);

  for (std::size_t k = 0; k < transient.size(); ++k)
    visits.emplace(model.pages()[transient[k]], x[k]);
  return visits;
}

// Probability that one step from p lowers progress: the summed probability
// of transitions into pages with strictly smaller progress. Pages without a
// progress value never count as a backtrack target.
inline double backtrack_probability(const TransitionModel& model, const ProgressMap& progress,
                                    const PageId& p) {
  const std::size_t i = model.require_index(p);
  const double own = progress.at(p);
  double beta = 0.0;
  for (std::size_t j = 0; j < model.page_count(); ++j) {
    const PageId& q = model.pages()[j];
    if (progress.contains(q) && progress.at(q) < own) beta += model.prob(i, j);
  }
  return std::min(beta, 1.0);
}

struct BacktrackStats {
  std::map<PageId, double> expected_visits;
  std::map<PageId, double> backtrack_prob;
  std::map<PageId, double> expected_backtracks;  // product of the two above
};

// Pages whose expected backtrack count exceeds tau: backtracking there is a
// normal part of the task, so the detector must not score it.
inline std::set<PageId> exclusion_set(const BacktrackStats& stats, double tau) {
  if (!(tau > 0.0))
    fail(Errc::invalid_argument, "exclusion threshold tau must be > 0");
  std::set<PageId> excluded;
  for (const auto& [page, eb] : stats.expected_backtracks)
    if (eb > tau) excluded.insert(page);
  return excluded;
}

enum class ProgressMethod { hitting_time, shortest_path };

struct ModelConfig {
  ProgressMethod progress_method = ProgressMethod::hitting_time;
  double exclusion_tau = 1.0;
};

struct PageModel {
  TransitionModel transitions;
  ProgressMap progress;
  BacktrackStats stats;
  std::set<PageId> excluded;
};

// Full model build: transitions, progress (hitting time with shortest-path
// fallback when the linear system is unsolvable), backtrack statistics and
// the exclusion set. Pages without a progress value are always excluded.
inline PageModel build_page_model(const std::vector<UserTrace>& traces, const TaskSpec& task,
                                  const ModelConfig& config = {}) {
  TransitionModel transitions = estimate_transitions(traces, task);

  ProgressMap progress;
  if (config.progress_method == ProgressMethod::shortest_path) {
    progress = shortest_path_progress(transitions, task);
  } else {
    try {
      progress = hitting_time_progress(transitions, task);
    } catch (const Error& e) {
      if (e.code() != Errc::singular_system) throw;
      progress = shortest_path_progress(transitions, task);
    }
  }

  BacktrackStats stats;
  try {
    stats.expected_visits = expected_visits(transitions, task);
  } catch (const Error& e) {
    // Leave the statistics empty when the fundamental system is unsolvable;
    // progress-based detection still works, only expectation-based
    // exclusions are unavailable.
    if (e.code() != Errc::singular_system) throw;
  }
  for (const auto& [page, visits] : stats.expected_visits) {
    const double beta = backtrack_probability(transitions, progress, page);
    stats.backtrack_prob.emplace(page, beta);
    stats.expected_backtracks.emplace(page, visits * beta);
  }

  std::set<PageId> excluded = exclusion_set(stats, config.exclusion_tau);
  for (const auto& page : transitions.pages())
    if (!progress.contains(page)) excluded.insert(page);

  return PageModel{std::move(transitions), std::move(progress), std::move(stats),
                   std::move(excluded)};
}

}  // namespace navmine
