#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "navmine/core.hpp"
#include "navmine/rng.hpp"
#include "support/fixtures.hpp"

using namespace navmine;
using fixtures::code_of;

TEST_CASE("page and user ids enforce their invariants") {
  CHECK(PageId("checkout").value() == "checkout");
  CHECK(code_of([] { PageId(""); }) == Errc::invalid_argument);
  CHECK(code_of([] { PageId(" cart"); }) == Errc::invalid_argument);
  CHECK(code_of([] { PageId("cart "); }) == Errc::invalid_argument);
  CHECK(code_of([] { UserId(""); }) == Errc::invalid_argument);
  CHECK(PageId("a b").value() == "a b");  // interior whitespace is fine
}

TEST_CASE("events reject negative timestamps") {
  CHECK(NavigationEvent(UserId("u"), PageId("p"), 0).ts == 0);
  CHECK(code_of([] { NavigationEvent(UserId("u"), PageId("p"), -1); }) ==
        Errc::invalid_argument);
}

TEST_CASE("traces sort events by timestamp and keep ties stable") {
  const UserId u("u1");
  std::vector<NavigationEvent> events{
      {u, PageId("c"), 30}, {u, PageId("a"), 10}, {u, PageId("b1"), 20}, {u, PageId("b2"), 20}};
  const UserTrace trace(u, events);
  REQUIRE(trace.size() == 4);
  CHECK(trace.events()[0].page == PageId("a"));
  CHECK(trace.events()[1].page == PageId("b1"));  // ties keep input order
  CHECK(trace.events()[2].page == PageId("b2"));
  CHECK(trace.events()[3].page == PageId("c"));
}

TEST_CASE("traces reject foreign events") {
  const UserId u("u1");
  std::vector<NavigationEvent> events{{UserId("u2"), PageId("a"), 0}};
  CHECK(code_of([&] { UserTrace(u, events); }) == Errc::invalid_argument);
}

TEST_CASE("trace sorting is invariant under input permutation") {
  Rng rng(20240817);
  for (int round = 0; round < 50; ++round) {
    const UserId u("u");
    std::vector<NavigationEvent> events;
    const int n = static_cast<int>(rng.uniform_int(0, 12));
    for (int i = 0; i < n; ++i)
      events.emplace_back(u, PageId("p" + std::to_string(rng.uniform_int(0, 3))),
                          rng.uniform_int(0, 5));
    const UserTrace sorted_once(u, events);
    // Fisher-Yates shuffle driven by the deterministic test rng.
    std::vector<NavigationEvent> shuffled = events;
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1],
                shuffled[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    const UserTrace sorted_twice(u, shuffled);
    REQUIRE(sorted_once.size() == sorted_twice.size());
    for (std::size_t i = 0; i < sorted_once.size(); ++i)
      CHECK(sorted_once.events()[i].ts == sorted_twice.events()[i].ts);
    CHECK(std::is_sorted(sorted_once.events().begin(), sorted_once.events().end(),
                         [](const NavigationEvent& a, const NavigationEvent& b) {
                           return a.ts < b.ts;
                         }));
  }
}

TEST_CASE("validate_task checks memberships before identity and size") {
  CHECK_NOTHROW(validate_task(fixtures::chain_task()));

  const TaskSpec begin_missing{{PageId("A")}, PageId("B"), PageId("A")};
  CHECK(code_of([&] { validate_task(begin_missing); }) == Errc::begin_not_in_pages);

  // begin is present but final is not: the membership error wins over the
  // size violation of the single-page set.
  const TaskSpec final_missing{{PageId("A")}, PageId("A"), PageId("B")};
  CHECK(code_of([&] { validate_task(final_missing); }) == Errc::final_not_in_pages);

  const TaskSpec same{{PageId("A"), PageId("B")}, PageId("A"), PageId("A")};
  CHECK(code_of([&] { validate_task(same); }) == Errc::begin_equals_final);
}

TEST_CASE("randomly built valid tasks pass validation") {
  Rng rng(7);
  for (int round = 0; round < 100; ++round) {
    const int n = static_cast<int>(rng.uniform_int(2, 9));
    std::set<PageId> pages;
    for (int i = 0; i < n; ++i) pages.insert(PageId("p" + std::to_string(i)));
    TaskSpec task{pages, PageId("p0"),
                  PageId("p" + std::to_string(rng.uniform_int(1, n - 1)))};
    CHECK_NOTHROW(validate_task(task));
  }
}
