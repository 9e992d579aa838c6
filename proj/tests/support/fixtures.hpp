#pragma once

// Shared fixtures: a tiny two-trace chain whose model is solvable by hand,
// a seven-page checkout funnel for simulation scenarios, and small builders
// used across the test suites.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "navmine/core.hpp"
#include "navmine/errors.hpp"
#include "navmine/model.hpp"
#include "navmine/simulate.hpp"

namespace fixtures {

// Runs f, which must throw a navmine::Error, and reports its code.
inline navmine::Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const navmine::Error& e) {
    return e.code();
  }
  throw std::logic_error("expected a navmine::Error, none was thrown");
}

inline navmine::PageId page(const std::string& id) { return navmine::PageId(id); }
inline navmine::UserId user(const std::string& id) { return navmine::UserId(id); }

inline navmine::UserTrace make_trace(const std::string& user_id,
                                     const std::vector<std::pair<std::string, std::int64_t>>& steps) {
  navmine::UserId u(user_id);
  std::vector<navmine::NavigationEvent> events;
  events.reserve(steps.size());
  for (const auto& [page_id, ts] : steps)
    events.emplace_back(u, navmine::PageId(page_id), ts);
  return navmine::UserTrace(std::move(u), std::move(events));
}

// Three pages S -> M -> F where one of two users loops back once. The
// resulting model: P(S->M)=1, P(M->F)=2/3, P(M->S)=1/3, hitting times
// h(S)=3, h(M)=2, expected visits from S of 3/2 each, and an expected
// backtrack count at M of 1/2.
inline navmine::TaskSpec chain_task() {
  return navmine::TaskSpec{{page("S"), page("M"), page("F")}, page("S"), page("F")};
}

inline std::vector<navmine::UserTrace> chain_traces() {
  return {
      make_trace("u1", {{"S", 0}, {"M", 1000}, {"F", 2000}}),
      make_trace("u2", {{"S", 0}, {"M", 1000}, {"S", 2000}, {"M", 3000}, {"F", 4000}}),
  };
}

// Seven-page checkout funnel. The only progress-lowering edge is
// pay -> checkout (0.1), so backtrack patterns concentrate on the pay page
// and expected backtracks stay well under the default exclusion threshold.
inline navmine::TaskSpec checkout_task() {
  return navmine::TaskSpec{{page("home"), page("browse"), page("detail"), page("cart"),
                            page("checkout"), page("pay"), page("done")},
                           page("home"), page("done")};
}

inline navmine::TransitionModel checkout_model() {
  using navmine::Edge;
  const std::vector<Edge> edges = {
      {page("home"), page("browse"), 0.9},    {page("home"), page("home"), 0.1},
      {page("browse"), page("detail"), 0.85}, {page("browse"), page("browse"), 0.15},
      {page("detail"), page("cart"), 0.8},    {page("detail"), page("detail"), 0.2},
      {page("cart"), page("checkout"), 0.9},  {page("cart"), page("cart"), 0.1},
      {page("checkout"), page("pay"), 1.0},
      {page("pay"), page("done"), 0.9},       {page("pay"), page("checkout"), 0.1},
  };
  return navmine::TransitionModel::from_probabilities(checkout_task().pages, edges);
}

inline navmine::SimConfig checkout_sim(std::int64_t n_users, double failure_rate,
                                       std::uint64_t seed) {
  return navmine::SimConfig{checkout_model(),
                            checkout_task(),
                            n_users,
                            failure_rate,
                            page("pay"),
                            /*retry_min=*/3,
                            /*retry_max=*/8,
                            /*retry_gap_ms_max=*/60000,
                            /*normal_gap_mean_ms=*/20000,
                            /*max_steps=*/200,
                            seed};
}

}  // namespace fixtures
