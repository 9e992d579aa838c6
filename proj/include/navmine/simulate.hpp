#pragma once

// Synthetic labeled datasets. Normal users walk the ground-truth transition
// model until they hit the final page or the step limit; failure users are
// cut at their first backtrack-arrival at the failure page and replaced by a
// retry loop there, after which they abandon the task.

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "navmine/core.hpp"
#include "navmine/errors.hpp"
#include "navmine/model.hpp"
#include "navmine/rng.hpp"

namespace navmine {

struct SimConfig {
  TransitionModel ground_truth;
  TaskSpec task;
  std::int64_t n_users = 0;
  double failure_rate = 0.0;
  PageId failure_page;
  std::int64_t retry_min = 3;
  std::int64_t retry_max = 8;
  std::int64_t retry_gap_ms_max = 60000;
  std::int64_t normal_gap_mean_ms = 20000;
  std::int64_t max_steps = 200;
  std::uint64_t seed = 0;

  void validate() const {
    validate_task(task);
    std::set<PageId> model_pages(ground_truth.pages().begin(), ground_truth.pages().end());
    if (model_pages != task.pages)
      fail(Errc::invalid_config, "ground-truth model pages must equal the task page set");
    if (n_users < 1)
      fail(Errc::invalid_config, "n_users must be >= 1");
    if (!(failure_rate >= 0.0 && failure_rate <= 1.0))
      fail(Errc::invalid_config, "failure_rate must be in [0, 1]");
    if (!task.pages.contains(failure_page))
      fail(Errc::invalid_config,
           "failure page '" + failure_page.value() + "' is not in the task page set");
    if (failure_page == task.begin)
      fail(Errc::invalid_config, "failure page must differ from the begin page");
    if (retry_min < 1 || retry_min > retry_max)
      fail(Errc::invalid_config, "need 1 <= retry_min <= retry_max");
    if (retry_gap_ms_max < 1)
      fail(Errc::invalid_config, "retry_gap_ms_max must be >= 1");
    if (normal_gap_mean_ms < 1)
      fail(Errc::invalid_config, "normal_gap_mean_ms must be >= 1");
    if (max_steps < 1)
      fail(Errc::invalid_config, "max_steps must be >= 1");
    double begin_out = 0.0;
    const std::size_t begin_idx = ground_truth.require_index(task.begin);
    for (std::size_t j = 0; j < ground_truth.page_count(); ++j)
      begin_out += ground_truth.prob(begin_idx, j);
    if (begin_out <= 0.0)
      fail(Errc::invalid_config, "begin page has no outgoing transitions");
  }
};

struct LabeledDataset {
  std::vector<UserTrace> traces;
  std::map<UserId, bool> labels;  // true marks an injected failure

  bool operator==(const LabeledDataset&) const = default;
};

using GapSampler = std::function<std::int64_t(Rng&)>;

// One walk through the model, starting at the begin page at start_ts and
// stopping on the final page, on a page with no outgoing probability, or
// after max_steps events. Gaps between events come from the sampler.
inline UserTrace random_walk(const TransitionModel& model, const TaskSpec& task,
                             const UserId& user, std::int64_t start_ts, std::int64_t max_steps,
                             const GapSampler& gap, Rng& rng) {
  if (max_steps < 1)
    fail(Errc::invalid_argument, "random_walk: max_steps must be >= 1");
  std::size_t here = model.require_index(task.begin);
  const std::size_t final_idx = model.require_index(task.final);

  std::vector<NavigationEvent> events;
  std::int64_t ts = start_ts;
  events.emplace_back(user, model.pages()[here], ts);
  for (std::int64_t step = 1; step < max_steps; ++step) {
    if (here == final_idx) break;
    double row_sum = 0.0;
    for (std::size_t j = 0; j < model.page_count(); ++j) row_sum += model.prob(here, j);
    if (row_sum <= 0.0) break;

    double draw = rng.uniform01() * row_sum;
    std::size_t next = here;
    for (std::size_t j = 0; j < model.page_count(); ++j) {
      draw -= model.prob(here, j);
      if (draw < 0.0) {
        next = j;
        break;
      }
    }
    ts += gap(rng);
    events.emplace_back(user, model.pages()[next], ts);
    here = next;
  }
  return UserTrace(user, std::move(events));
}

// Replaces the tail of a walk with a retry loop at the failure page. The
// prefix must already end on the failure page; r retry cycles (backtrack to
// the previous page and re-advance) are appended with gaps drawn uniformly
// from [1, retry_gap_ms_max], then the user abandons. The result contains
// exactly r additional backtrack-arrival events at the failure page.
inline UserTrace inject_failure(const UserTrace& prefix, const SimConfig& config, Rng& rng) {
  const auto& evs = prefix.events();
  if (evs.empty() || evs.back().page != config.failure_page)
    fail(Errc::invalid_argument, "inject_failure: prefix must end on the failure page");
  if (evs.size() < 2)
    fail(Errc::no_predecessor, "inject_failure: prefix has no page before the failure page");

  const PageId& retreat = evs[evs.size() - 2].page;
  const std::int64_t r = rng.uniform_int(config.retry_min, config.retry_max);

  std::vector<NavigationEvent> events = evs;
  std::int64_t ts = events.back().ts;
  for (std::int64_t k = 0; k < r; ++k) {
    ts += rng.uniform_int(1, config.retry_gap_ms_max);
    events.emplace_back(prefix.user(), retreat, ts);
    ts += rng.uniform_int(1, config.retry_gap_ms_max);
    events.emplace_back(prefix.user(), config.failure_page, ts);
  }
  return UserTrace(prefix.user(), std::move(events));
}

namespace detail {

inline std::string zero_padded(std::int64_t value, std::size_t width) {
  std::string digits = std::to_string(value);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return digits;
}

inline ProgressMap sim_progress(const SimConfig& config) {
  try {
    return hitting_time_progress(config.ground_truth, config.task);
  } catch (const Error& e) {
    if (e.code() != Errc::singular_system) throw;
    return shortest_path_progress(config.ground_truth, config.task);
  }
}

}  // namespace detail

// Generates n_users traces with ground-truth labels. Each user draws from an
// independent substream of the seed, so the dataset is reproducible and
// per-user output does not depend on the order of generation. A user chosen
// to fail is re-walked until a walk arrives at the failure page from a page
// of strictly lower progress; if 100 walks never do, the user stays normal.
inline LabeledDataset generate_dataset(const SimConfig& config) {
  config.validate();
  const ProgressMap progress = detail::sim_progress(config);
  if (!progress.contains(config.failure_page))
    fail(Errc::invalid_config,
         "failure page '" + config.failure_page.value() + "' cannot reach the final page");
  const double failure_progress = progress.at(config.failure_page);

  const std::size_t id_width = std::max<std::size_t>(
      5, std::to_string(config.n_users).size());
  const GapSampler normal_gap = [mean = static_cast<double>(config.normal_gap_mean_ms)](
                                    Rng& rng) {
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(rng.exponential(mean)));
  };

  LabeledDataset dataset;
  dataset.traces.reserve(static_cast<std::size_t>(config.n_users));
  for (std::int64_t i = 0; i < config.n_users; ++i) {
    const UserId user(std::string("u") + detail::zero_padded(i + 1, id_width));
    Rng rng = Rng::substream(config.seed, static_cast<std::uint64_t>(i));
    const std::int64_t start_ts = rng.uniform_int(0, 86399999);
    const bool wants_failure = rng.bernoulli(config.failure_rate);

    bool injected = false;
    UserTrace trace(user, {});
    if (!wants_failure) {
      trace = random_walk(config.ground_truth, config.task, user, start_ts, config.max_steps,
                          normal_gap, rng);
    } else {
      for (int attempt = 0; attempt < 100; ++attempt) {
        UserTrace walk = random_walk(config.ground_truth, config.task, user, start_ts,
                                     config.max_steps, normal_gap, rng);
        const auto& evs = walk.events();
        std::size_t cut = 0;
        for (std::size_t k = 1; k < evs.size(); ++k) {
          if (evs[k].page != config.failure_page) continue;
          const PageId& prev = evs[k - 1].page;
          if (progress.contains(prev) && progress.at(prev) < failure_progress) {
            cut = k;
            break;
          }
        }
        if (cut == 0) {
          trace = std::move(walk);  // keep the last walk if no attempt qualifies
          continue;
        }
        std::vector<NavigationEvent> prefix_events(evs.begin(),
                                                   evs.begin() + static_cast<std::ptrdiff_t>(cut) + 1);
        trace = inject_failure(UserTrace(user, std::move(prefix_events)), config, rng);
        injected = true;
        break;
      }
    }
    dataset.labels.emplace(user, injected);
    dataset.traces.push_back(std::move(trace));
  }
  return dataset;
}

}  // namespace navmine
