#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <vector>

#include "navmine/detect.hpp"
#include "navmine/model.hpp"
#include "navmine/rng.hpp"
#include "support/fixtures.hpp"

using namespace navmine;
using Catch::Matchers::WithinAbs;
using fixtures::chain_task;
using fixtures::chain_traces;
using fixtures::code_of;
using fixtures::make_trace;

namespace {

ProgressMap chain_progress() {
  return ProgressMap{{{PageId("S"), 0.0}, {PageId("M"), 1.0 / 3.0}, {PageId("F"), 1.0}}};
}

// Quadratic reference implementation of the pattern scan: enumerate visible
// triples directly.
std::vector<PatternOccurrence> brute_force_patterns(const UserTrace& trace,
                                                    const ProgressMap& progress,
                                                    const PageId& page_b) {
  std::vector<std::size_t> visible;
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (progress.contains(trace.events()[i].page)) visible.push_back(i);
  std::vector<PatternOccurrence> found;
  for (std::size_t k = 0; k + 2 < visible.size(); ++k) {
    const auto& a = trace.events()[visible[k]];
    const auto& b = trace.events()[visible[k + 1]];
    const auto& c = trace.events()[visible[k + 2]];
    if (b.page == page_b && progress.at(a.page) < progress.at(b.page) &&
        progress.at(c.page) < progress.at(b.page))
      found.push_back(PatternOccurrence{page_b, visible[k + 1], c.ts});
  }
  return found;
}

std::int64_t brute_force_intensity(const std::vector<PatternOccurrence>& occurrences,
                                   std::int64_t window_ms) {
  std::int64_t best = 0;
  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    std::int64_t run = 1;
    for (std::size_t j = i + 1; j < occurrences.size(); ++j) {
      if (occurrences[j].ts - occurrences[j - 1].ts < window_ms)
        ++run;
      else
        break;
    }
    best = std::max(best, run);
  }
  return best;
}

}  // namespace

TEST_CASE("the canonical advance-backtrack triple is found") {
  const auto progress = chain_progress();
  const auto trace = make_trace("u1", {{"S", 0}, {"M", 1000}, {"S", 2000}, {"M", 3000}, {"F", 4000}});
  const auto hits = find_patterns(trace, progress, PageId("M"));
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].page_b == PageId("M"));
  CHECK(hits[0].trace_index == 1);
  CHECK(hits[0].ts == 2000);  // timestamp of the arrival at C

  CHECK(find_patterns(trace, progress, PageId("S")).empty());
  CHECK(find_patterns(trace, progress, PageId("F")).empty());
}

TEST_CASE("monotone traces contain no patterns") {
  const auto progress = chain_progress();
  const auto trace = make_trace("u1", {{"S", 0}, {"M", 1}, {"F", 2}});
  CHECK(find_patterns(trace, progress, PageId("M")).empty());
}

TEST_CASE("A and C may be the same page and repeats all count") {
  const auto progress = chain_progress();
  const auto trace = make_trace(
      "u1", {{"S", 0}, {"M", 1}, {"S", 2}, {"M", 3}, {"S", 4}, {"M", 5}, {"F", 6}});
  const auto hits = find_patterns(trace, progress, PageId("M"));
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].trace_index == 1);
  CHECK(hits[1].trace_index == 3);
}

TEST_CASE("pages without progress are invisible to the scan") {
  ProgressMap progress = chain_progress();
  // X is in no progress map: S,M,X,S is read as S,M,S.
  const auto trace = make_trace("u1", {{"S", 0}, {"M", 1}, {"X", 2}, {"S", 3}, {"M", 4}, {"F", 5}});
  const auto hits = find_patterns(trace, progress, PageId("M"));
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].trace_index == 1);
  CHECK(hits[0].ts == 3);
}

TEST_CASE("find_patterns requires a progress value for page B") {
  const auto trace = make_trace("u1", {{"S", 0}, {"M", 1}, {"F", 2}});
  CHECK(code_of([&] { find_patterns(trace, chain_progress(), PageId("Z")); }) ==
        Errc::unknown_page);
}

TEST_CASE("features count occurrences and measure the densest run") {
  const auto progress = chain_progress();
  // Three backtracks at M; the first two arrivals are 1s apart, the third is
  // 10 minutes later.
  const auto trace = make_trace("u1", {{"S", 0},      {"M", 500},    {"S", 1000},
                                       {"M", 1500},   {"S", 2000},   {"M", 600000},
                                       {"S", 700000}, {"M", 700500}, {"F", 701000}});
  const auto fv = compute_features(trace, progress, PageId("M"), 120000);
  CHECK(fv.count == 3);
  CHECK(fv.intensity == 2);

  // A gap equal to the window breaks the run.
  const auto edge = make_trace("u1", {{"S", 0}, {"M", 1}, {"S", 2}, {"M", 3}, {"S", 120002},
                                      {"M", 120003}, {"F", 120004}});
  const auto efv = compute_features(edge, progress, PageId("M"), 120000);
  CHECK(efv.count == 2);
  CHECK(efv.intensity == 1);

  const auto quiet = make_trace("u1", {{"S", 0}, {"M", 1}, {"F", 2}});
  CHECK(compute_features(quiet, progress, PageId("M"), 120000) == FeatureVector{0, 0});
}

TEST_CASE("pattern scan matches the brute-force reference on random traces") {
  Rng rng(314159);
  const std::vector<std::string> page_names = {"p0", "p1", "p2", "p3", "p4", "p5"};
  for (int round = 0; round < 1000; ++round) {
    // Random progress over a random subset; one page may be left out to
    // exercise invisibility.
    ProgressMap progress;
    for (const auto& name : page_names)
      if (rng.bernoulli(0.85))
        progress.values.emplace(PageId(name), rng.uniform_int(0, 4) / 4.0);

    const int len = static_cast<int>(rng.uniform_int(0, 50));
    std::vector<std::pair<std::string, std::int64_t>> steps;
    std::int64_t ts = 0;
    for (int i = 0; i < len; ++i) {
      ts += rng.uniform_int(1, 150000);
      steps.emplace_back(page_names[static_cast<std::size_t>(rng.uniform_int(0, 5))], ts);
    }
    const auto trace = make_trace("u", steps);

    for (const auto& [page, unused] : progress.values) {
      const auto expected = brute_force_patterns(trace, progress, page);
      const auto actual = find_patterns(trace, progress, page);
      REQUIRE(actual == expected);

      const auto fv = compute_features(trace, progress, page, 120000);
      CHECK(fv.count == static_cast<std::int64_t>(expected.size()));
      CHECK(fv.intensity == brute_force_intensity(expected, 120000));
    }
  }
}

TEST_CASE("empirical cdf counts strictly and inclusively") {
  const auto cdf = fit_cdf({0, 0, 1, 2, 2, 5});
  CHECK(cdf.n() == 6);
  CHECK(cdf.count_below(0) == 0);
  CHECK(cdf.count_below(2) == 3);
  CHECK(cdf.count_at_or_below(2) == 5);
  CHECK(cdf.count_below(10) == 6);
  CHECK(code_of([] { fit_cdf({}); }) == Errc::empty_population);
}

TEST_CASE("score formulas disagree exactly on ties") {
  const auto cdf = fit_cdf({0, 0, 0, 0, 5});
  CHECK_THAT(score_at(cdf, 5, ScoreFormula::consistent), WithinAbs(0.8, 1e-15));
  CHECK_THAT(score_at(cdf, 5, ScoreFormula::literal), WithinAbs(0.0, 1e-15));
  CHECK_THAT(score_at(cdf, 0, ScoreFormula::consistent), WithinAbs(0.0, 1e-15));
  CHECK_THAT(score_at(cdf, 0, ScoreFormula::literal), WithinAbs(0.2, 1e-15));
  CHECK_THAT(score_at(cdf, 7, ScoreFormula::literal), WithinAbs(0.0, 1e-15));
  CHECK_THAT(score_at(cdf, -1, ScoreFormula::consistent), WithinAbs(0.0, 1e-15));
}

TEST_CASE("score_at is monotone in v, rising for consistent and falling for literal") {
  Rng rng(271828);
  std::vector<double> values;
  for (int i = 0; i < 100; ++i) values.push_back(rng.uniform_int(0, 12));
  const auto cdf = fit_cdf(values);
  double last_consistent = -1.0;
  double last_literal = 2.0;
  for (double v = -1; v <= 14; v += 0.5) {
    const double consistent = score_at(cdf, v, ScoreFormula::consistent);
    const double literal = score_at(cdf, v, ScoreFormula::literal);
    CHECK(consistent >= last_consistent);
    CHECK(literal <= last_literal);
    for (double s : {consistent, literal}) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
    last_consistent = consistent;
    last_literal = literal;
  }
  // Above every observed value the whole population lies strictly below.
  CHECK(score_at(cdf, 13, ScoreFormula::consistent) == 1.0);
  CHECK(score_at(cdf, 13, ScoreFormula::literal) == 0.0);
  // Below every observed value nothing does.
  CHECK(score_at(cdf, -2, ScoreFormula::consistent) == 0.0);
  CHECK(score_at(cdf, -2, ScoreFormula::literal) == 1.0);
}

TEST_CASE("detect flags the single heavy backtracker at 0.8") {
  // Five traces; only u5 loops S->M five times in quick succession.
  std::vector<UserTrace> traces;
  for (int i = 1; i <= 4; ++i)
    traces.push_back(make_trace("u" + std::to_string(i), {{"S", 0}, {"M", 1000}, {"F", 2000}}));
  std::vector<std::pair<std::string, std::int64_t>> steps;
  std::int64_t ts = 0;
  steps.emplace_back("S", ts);
  for (int k = 0; k < 5; ++k) {
    steps.emplace_back("M", ts += 1000);
    steps.emplace_back("S", ts += 1000);
  }
  steps.emplace_back("M", ts += 1000);
  steps.emplace_back("F", ts += 1000);
  traces.push_back(make_trace("u5", steps));

  const auto model = build_page_model(traces, chain_task());
  const auto reports = detect(traces, model, DetectionConfig{});
  REQUIRE(reports.size() == 5);
  CHECK(reports[0].user == UserId("u5"));
  CHECK_THAT(reports[0].score, WithinAbs(0.8, 1e-12));
  CHECK(reports[0].flagged);
  CHECK(reports[0].top_page == PageId("M"));
  CHECK(reports[0].features.at(PageId("M")).count == 5);
  for (std::size_t i = 1; i < reports.size(); ++i) {
    CHECK_FALSE(reports[i].flagged);
    CHECK_THAT(reports[i].score, WithinAbs(0.0, 1e-15));
  }
}

TEST_CASE("identical traces all score zero") {
  std::vector<UserTrace> traces;
  for (int i = 0; i < 6; ++i)
    traces.push_back(make_trace("u" + std::to_string(i),
                                {{"S", 0}, {"M", 1}, {"S", 2}, {"M", 3}, {"F", 4}}));
  const auto model = build_page_model(traces, chain_task());
  const auto reports = detect(traces, model, DetectionConfig{});
  for (const auto& r : reports) {
    CHECK(r.score == 0.0);
    CHECK_FALSE(r.flagged);
  }
}

TEST_CASE("detect validates its inputs") {
  const auto model = build_page_model(chain_traces(), chain_task());
  CHECK(code_of([&] { detect({}, model, DetectionConfig{}); }) == Errc::empty_population);

  DetectionConfig bad;
  bad.epsilon = 1.5;
  CHECK(code_of([&] { detect(chain_traces(), model, bad); }) == Errc::invalid_config);
  bad.epsilon = 0.8;
  bad.window_ms = 0;
  CHECK(code_of([&] { detect(chain_traces(), model, bad); }) == Errc::invalid_config);

  PageModel all_excluded = model;
  all_excluded.excluded = {PageId("S"), PageId("M")};
  CHECK(code_of([&] { detect(chain_traces(), all_excluded, DetectionConfig{}); }) ==
        Errc::no_candidate_pages);
}

TEST_CASE("reports are sorted and independent of input order") {
  std::vector<UserTrace> traces;
  Rng rng(5150);
  for (int i = 0; i < 12; ++i) {
    std::vector<std::pair<std::string, std::int64_t>> steps;
    std::int64_t ts = 0;
    steps.emplace_back("S", ts);
    const int loops = static_cast<int>(rng.uniform_int(0, 4));
    for (int k = 0; k < loops; ++k) {
      steps.emplace_back("M", ts += 1000);
      steps.emplace_back("S", ts += 1000);
    }
    steps.emplace_back("M", ts += 1000);
    steps.emplace_back("F", ts += 1000);
    traces.push_back(make_trace("u" + std::to_string(10 + i), steps));
  }
  // A generous exclusion threshold keeps M scorable despite heavy looping.
  const auto model = build_page_model(traces, chain_task(),
                                      ModelConfig{ProgressMethod::hitting_time, 100.0});
  REQUIRE(model.excluded.empty());
  const auto reports = detect(traces, model, DetectionConfig{});

  std::vector<UserTrace> reversed(traces.rbegin(), traces.rend());
  const auto reports_reversed = detect(reversed, model, DetectionConfig{});
  REQUIRE(reports.size() == reports_reversed.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CHECK(reports[i].user == reports_reversed[i].user);
    CHECK(reports[i].score == reports_reversed[i].score);
    CHECK(reports[i].flagged == reports_reversed[i].flagged);
  }
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const bool ordered = reports[i - 1].score > reports[i].score ||
                         (reports[i - 1].score == reports[i].score &&
                          reports[i - 1].user < reports[i].user);
    CHECK(ordered);
  }
}

TEST_CASE("raising epsilon only unflags") {
  std::vector<UserTrace> traces;
  Rng rng(8888);
  for (int i = 0; i < 20; ++i) {
    std::vector<std::pair<std::string, std::int64_t>> steps;
    std::int64_t ts = 0;
    steps.emplace_back("S", ts);
    const int loops = static_cast<int>(rng.uniform_int(0, 6));
    for (int k = 0; k < loops; ++k) {
      steps.emplace_back("M", ts += 1000);
      steps.emplace_back("S", ts += 1000);
    }
    steps.emplace_back("M", ts += 1000);
    steps.emplace_back("F", ts += 1000);
    traces.push_back(make_trace("u" + std::to_string(10 + i), steps));
  }
  const auto model = build_page_model(traces, chain_task(),
                                      ModelConfig{ProgressMethod::hitting_time, 100.0});

  DetectionConfig lo;
  lo.epsilon = 0.3;
  DetectionConfig hi;
  hi.epsilon = 0.7;
  const auto flagged_at = [&](const DetectionConfig& cfg) {
    std::set<UserId> flagged;
    for (const auto& r : detect(traces, model, cfg))
      if (r.flagged) flagged.insert(r.user);
    return flagged;
  };
  const auto lo_set = flagged_at(lo);
  const auto hi_set = flagged_at(hi);
  for (const auto& u : hi_set) CHECK(lo_set.count(u) == 1);
}

TEST_CASE("feature combination modes") {
  // Everyone backtracks once; u9 backtracks four times but spread so far
  // apart that the intensity stays at the population's common value of 1.
  std::vector<UserTrace> traces;
  for (int i = 0; i < 4; ++i)
    traces.push_back(make_trace("u" + std::to_string(i),
                                {{"S", 0}, {"M", 1000}, {"S", 2000}, {"M", 3000}, {"F", 4000}}));
  std::vector<std::pair<std::string, std::int64_t>> steps;
  std::int64_t ts = 0;
  steps.emplace_back("S", ts);
  for (int k = 0; k < 4; ++k) {
    steps.emplace_back("M", ts += 1000);
    steps.emplace_back("S", ts += 200000);  // wider than the window
  }
  steps.emplace_back("M", ts += 1000);
  steps.emplace_back("F", ts += 1000);
  traces.push_back(make_trace("u9", steps));

  const auto model = build_page_model(traces, chain_task(),
                                      ModelConfig{ProgressMethod::hitting_time, 100.0});
  REQUIRE(model.excluded.empty());
  DetectionConfig count_only;
  count_only.feature_combine = FeatureCombine::count_only;
  DetectionConfig intensity_only;
  intensity_only.feature_combine = FeatureCombine::intensity_only;
  DetectionConfig both;

  const auto by_user = [](const std::vector<AnomalyReport>& reports, const std::string& user) {
    for (const auto& r : reports)
      if (r.user == UserId(user)) return r;
    throw std::logic_error("user not found");
  };

  const auto count_score = by_user(detect(traces, model, count_only), "u9").score;
  const auto intensity_score = by_user(detect(traces, model, intensity_only), "u9").score;
  const auto max_score = by_user(detect(traces, model, both), "u9").score;
  CHECK_THAT(count_score, WithinAbs(0.8, 1e-12));
  CHECK_THAT(intensity_score, WithinAbs(0.0, 1e-15));
  CHECK(max_score == std::max(count_score, intensity_score));
}
