#pragma once

// Domain vocabulary shared by every other header: identifiers, navigation
// events, per-user traces and the task description. All of these are value
// types whose invariants are enforced at construction time.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "navmine/errors.hpp"

namespace navmine {

class PageId {
 public:
  explicit PageId(std::string value) : value_(std::move(value)) {
    if (value_.empty())
      fail(Errc::invalid_argument, "page id must be non-empty");
    if (std::isspace(static_cast<unsigned char>(value_.front())) ||
        std::isspace(static_cast<unsigned char>(value_.back())))
      fail(Errc::invalid_argument,
           "page id must not have leading or trailing whitespace: '" + value_ + "'");
  }

  const std::string& value() const noexcept { return value_; }

  auto operator<=>(const PageId&) const = default;

 private:
  std::string value_;
};

class UserId {
 public:
  explicit UserId(std::string value) : value_(std::move(value)) {
    if (value_.empty())
      fail(Errc::invalid_argument, "user id must be non-empty");
  }

  const std::string& value() const noexcept { return value_; }

  auto operator<=>(const UserId&) const = default;

 private:
  std::string value_;
};

struct NavigationEvent {
  UserId user;
  PageId page;
  std::int64_t ts;  // epoch milliseconds

  NavigationEvent(UserId u, PageId p, std::int64_t t)
      : user(std::move(u)), page(std::move(p)), ts(t) {
    if (ts < 0)
      fail(Errc::invalid_argument, "event timestamp must be >= 0");
  }

  auto operator<=>(const NavigationEvent&) const = default;
};

// One user's navigation history, kept in timestamp order. Events with equal
// timestamps keep their original relative order.
class UserTrace {
 public:
  UserTrace(UserId user, std::vector<NavigationEvent> events)
      : user_(std::move(user)), events_(std::move(events)) {
    for (const auto& e : events_) {
      if (e.user != user_)
        fail(Errc::invalid_argument,
             "trace for user '" + user_.value() + "' contains event of user '" +
                 e.user.value() + "'");
    }
    std::stable_sort(events_.begin(), events_.end(),
                     [](const NavigationEvent& a, const NavigationEvent& b) {
                       return a.ts < b.ts;
                     });
  }

  const UserId& user() const noexcept { return user_; }
  const std::vector<NavigationEvent>& events() const noexcept { return events_; }
  bool empty() const noexcept { return events_.empty(); }
  std::size_t size() const noexcept { return events_.size(); }

  bool operator==(const UserTrace&) const = default;

 private:
  UserId user_;
  std::vector<NavigationEvent> events_;
};

// Description of the task whose completion is being studied: the pages that
// belong to it plus the designated entry and completion pages.
struct TaskSpec {
  std::set<PageId> pages;
  PageId begin;
  PageId final;
};

// Checks the TaskSpec invariants, in a fixed order so that error reporting is
// stable: begin membership, final membership, begin != final, page count.
inline const TaskSpec& validate_task(const TaskSpec& task) {
  if (!task.pages.contains(task.begin))
    fail(Errc::begin_not_in_pages,
         "begin page '" + task.begin.value() + "' is not in the task page set");
  if (!task.pages.contains(task.final))
    fail(Errc::final_not_in_pages,
         "final page '" + task.final.value() + "' is not in the task page set");
  if (task.begin == task.final)
    fail(Errc::begin_equals_final,
         "begin and final page must differ, both are '" + task.begin.value() + "'");
  if (task.pages.size() < 2)
    fail(Errc::too_few_pages, "a task needs at least two pages");
  return task;
}

}  // namespace navmine
