// Copyright 2026 The itemvoice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "itemvoice/error.hpp"
#include "itemvoice/metrics.hpp"
#include "itemvoice/rng.hpp"
#include "itemvoice/timeline.hpp"
#include "itemvoice/vote.hpp"
#include "support.hpp"

using itemvoice::ErrorKind;
using itemvoice::Rng;
using itemvoice::eval::FScores;
using itemvoice::vote::CombineRule;
using itemvoice::vote::ItemDecision;
using itemvoice::vote::SegmentProbabilityGrid;
using testsupport::capture;

namespace {

SegmentProbabilityGrid make_grid(const std::vector<double>& p_present,
                                 const std::string& rec = "r1", int item = 1) {
  SegmentProbabilityGrid grid;
  grid.recording_id = rec;
  grid.item_index = item;
  for (double p : p_present) grid.probs.push_back({1.0 - p, p});
  grid.geometry.recording_duration_s =
      static_cast<double>(p_present.size()) + 12.0;
  grid.geometry.n_segments = static_cast<std::int64_t>(p_present.size());
  return grid;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

TEST_SUITE("hard_vote") {
  TEST_CASE("majority of argmax votes decides") {
    const ItemDecision d = itemvoice::vote::hard_vote(make_grid({0.1, 0.4, 0.8}));
    CHECK_FALSE(d.present);
    CHECK(d.aggregate_present_prob == doctest::Approx(1.0 / 3.0));
    CHECK(d.method == itemvoice::vote::VoteMethod::hard);
    CHECK(d.item_index == 1);
  }

  TEST_CASE("vote ties go to present") {
    const ItemDecision d = itemvoice::vote::hard_vote(make_grid({0.1, 0.9}));
    CHECK(d.present);
    CHECK(d.aggregate_present_prob == doctest::Approx(0.5));
  }

  TEST_CASE("segment-level 0.5 rows count as present votes") {
    const ItemDecision d = itemvoice::vote::hard_vote(make_grid({0.5}));
    CHECK(d.present);
    CHECK(d.aggregate_present_prob == 1.0);
  }

  TEST_CASE("unanimous present has aggregate one") {
    const ItemDecision d = itemvoice::vote::hard_vote(make_grid({0.7, 0.7, 0.7, 0.7}));
    CHECK(d.present);
    CHECK(d.aggregate_present_prob == 1.0);
  }
}

TEST_SUITE("soft_vote") {
  TEST_CASE("mean probability decides") {
    const ItemDecision d = itemvoice::vote::soft_vote(make_grid({0.1, 0.4, 0.8}));
    CHECK_FALSE(d.present);
    CHECK(d.aggregate_present_prob == doctest::Approx(0.4333333333).epsilon(1e-9));
  }

  TEST_CASE("mean exactly one half is present") {
    const ItemDecision d = itemvoice::vote::soft_vote(make_grid({0.0, 1.0}));
    CHECK(d.present);
    CHECK(d.aggregate_present_prob == doctest::Approx(0.5));
  }

  TEST_CASE("single row reduces to its argmax") {
    CHECK(itemvoice::vote::soft_vote(make_grid({0.8})).present);
    CHECK_FALSE(itemvoice::vote::soft_vote(make_grid({0.2})).present);
  }

  TEST_CASE("empty grids are rejected by both rules") {
    const SegmentProbabilityGrid empty = make_grid({});
    auto r = capture([&] { itemvoice::vote::hard_vote(empty); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::EmptyGrid);
    r = capture([&] { itemvoice::vote::soft_vote(empty); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::EmptyGrid);
  }
}

TEST_SUITE("vote_properties") {
  TEST_CASE("brute force over every grid on the quarter lattice") {
    const double lattice[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int n = 1; n <= 4; ++n) {
      std::vector<int> digits(static_cast<std::size_t>(n), 0);
      while (true) {
        std::vector<double> ps;
        for (int d : digits) ps.push_back(lattice[d]);
        const SegmentProbabilityGrid grid = make_grid(ps);

        std::int64_t votes = 0;
        double mean = 0.0;
        for (double p : ps) {
          if (p >= 1.0 - p) ++votes;
          mean += p;
        }
        mean /= static_cast<double>(n);

        const ItemDecision hard = itemvoice::vote::hard_vote(grid);
        CHECK(hard.present == (2 * votes >= n));
        CHECK(hard.aggregate_present_prob ==
              doctest::Approx(static_cast<double>(votes) / n).epsilon(1e-12));

        const ItemDecision soft = itemvoice::vote::soft_vote(grid);
        CHECK(soft.present == (mean >= 0.5));
        CHECK(soft.aggregate_present_prob == doctest::Approx(mean).epsilon(1e-12));

        int i = n - 1;
        while (i >= 0 && digits[static_cast<std::size_t>(i)] == 4) {
          digits[static_cast<std::size_t>(i)] = 0;
          --i;
        }
        if (i < 0) break;
        ++digits[static_cast<std::size_t>(i)];
      }
    }
  }

  TEST_CASE("both rules ignore segment order") {
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> ps(5 + rng.below(6));
      for (double& p : ps) p = rng.uniform(0.0, 1.0);
      const ItemDecision h0 = itemvoice::vote::hard_vote(make_grid(ps));
      const ItemDecision s0 = itemvoice::vote::soft_vote(make_grid(ps));
      rng.shuffle(ps);
      const ItemDecision h1 = itemvoice::vote::hard_vote(make_grid(ps));
      const ItemDecision s1 = itemvoice::vote::soft_vote(make_grid(ps));
      CHECK(h0.present == h1.present);
      CHECK(h0.aggregate_present_prob == doctest::Approx(h1.aggregate_present_prob));
      CHECK(s0.present == s1.present);
      CHECK(s0.aggregate_present_prob ==
            doctest::Approx(s1.aggregate_present_prob).epsilon(1e-12));
    }
  }

  TEST_CASE("duplicating the grid changes nothing") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> ps(3 + rng.below(5));
      for (double& p : ps) p = rng.uniform(0.0, 1.0);
      std::vector<double> doubled = ps;
      doubled.insert(doubled.end(), ps.begin(), ps.end());
      CHECK(itemvoice::vote::hard_vote(make_grid(ps)).present ==
            itemvoice::vote::hard_vote(make_grid(doubled)).present);
      CHECK(itemvoice::vote::soft_vote(make_grid(ps)).aggregate_present_prob ==
            doctest::Approx(itemvoice::vote::soft_vote(make_grid(doubled))
                                .aggregate_present_prob)
                .epsilon(1e-12));
    }
  }

  TEST_CASE("unanimous argmax makes hard and soft agree") {
    Rng rng(43);
    int seen = 0;
    while (seen < 40) {
      std::vector<double> ps(4 + rng.below(5));
      const bool side = rng.below(2) == 1;
      for (double& p : ps) {
        p = side ? rng.uniform(0.5, 1.0) : rng.uniform(0.0, 0.4999);
      }
      const SegmentProbabilityGrid grid = make_grid(ps);
      const ItemDecision hard = itemvoice::vote::hard_vote(grid);
      const ItemDecision soft = itemvoice::vote::soft_vote(grid);
      CHECK(hard.present == side);
      CHECK(hard.present == soft.present);
      ++seen;
    }
  }
}

TEST_SUITE("combine_items") {
  TEST_CASE("count threshold counts present decisions") {
    std::vector<ItemDecision> ds(10);
    for (int i = 0; i < 10; ++i) {
      ds[static_cast<std::size_t>(i)].item_index = i + 1;
      ds[static_cast<std::size_t>(i)].present = i < 6;
    }
    const CombineRule rule = itemvoice::vote::combine_rule_by_name("count_threshold", 5);
    CHECK(itemvoice::vote::combine_items(ds, rule, 10));
    const CombineRule strict = itemvoice::vote::combine_rule_by_name("count_threshold", 7);
    CHECK_FALSE(itemvoice::vote::combine_items(ds, strict, 10));
  }

  TEST_CASE("all absent is never depressed") {
    std::vector<ItemDecision> ds(10);
    for (auto& d : ds) {
      d.present = false;
      d.aggregate_present_prob = 0.0;
    }
    CHECK_FALSE(itemvoice::vote::combine_items(
        ds, itemvoice::vote::combine_rule_by_name("count_threshold", 1), 10));
    CHECK_FALSE(itemvoice::vote::combine_items(
        ds, itemvoice::vote::combine_rule_by_name("mean_prob", 0), 10));
  }

  TEST_CASE("mean_prob pools aggregate probabilities") {
    std::vector<ItemDecision> ds(8);
    for (auto& d : ds) d.aggregate_present_prob = 0.4;
    const CombineRule rule = itemvoice::vote::combine_rule_by_name("mean_prob", 0);
    CHECK_FALSE(itemvoice::vote::combine_items(ds, rule, 8));
    for (auto& d : ds) d.aggregate_present_prob = 0.5;
    CHECK(itemvoice::vote::combine_items(ds, rule, 8));
  }

  TEST_CASE("incomplete decision sets are rejected") {
    std::vector<ItemDecision> ds(9);
    const auto r = capture([&] {
      itemvoice::vote::combine_items(
          ds, itemvoice::vote::combine_rule_by_name("mean_prob", 0), 10);
    });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::IncompleteDecisions);
  }

  TEST_CASE("rule parsing validates its arguments") {
    auto r = capture([] { itemvoice::vote::combine_rule_by_name("count_threshold", 0); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::BadConfig);
    r = capture([] { itemvoice::vote::combine_rule_by_name("majority", 1); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::BadConfig);
    r = capture([] { itemvoice::vote::vote_method_by_name("fuzzy"); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::BadConfig);
    CHECK(itemvoice::vote::vote_method_name(
              itemvoice::vote::vote_method_by_name("hard")) == "hard");
    CHECK(itemvoice::vote::vote_method_name(
              itemvoice::vote::vote_method_by_name("soft")) == "soft");
  }
}

TEST_SUITE("f_scores") {
  TEST_CASE("perfect predictions score one everywhere") {
    const FScores f = itemvoice::eval::f_scores({true, false, true, false},
                                                {true, false, true, false});
    CHECK(f.weighted_f == doctest::Approx(1.0));
    CHECK(f.f_absent == doctest::Approx(1.0));
    CHECK(f.f_present == doctest::Approx(1.0));
    CHECK(f.support_absent == 2);
    CHECK(f.support_present == 2);
  }

  TEST_CASE("worked confusion example") {
    // labels P,P,A,A; predictions P,A,A,A
    const FScores f = itemvoice::eval::f_scores({true, false, false, false},
                                                {true, true, false, false});
    CHECK(f.f_present == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(f.f_absent == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(f.weighted_f == doctest::Approx((2.0 * 0.8 + 2.0 * 2.0 / 3.0) / 4.0).epsilon(1e-12));
  }

  TEST_CASE("a class with zero support contributes nothing") {
    const FScores f = itemvoice::eval::f_scores({true, true, true}, {true, true, true});
    CHECK(f.f_present == doctest::Approx(1.0));
    CHECK(f.f_absent == 0.0);
    CHECK(f.support_absent == 0);
    CHECK(f.weighted_f == doctest::Approx(1.0));
  }

  TEST_CASE("brute-force oracle over every length-4 pair") {
    for (int pm = 0; pm < 16; ++pm) {
      for (int lm = 0; lm < 16; ++lm) {
        std::vector<bool> preds, labels;
        for (int i = 0; i < 4; ++i) {
          preds.push_back((pm >> i) & 1);
          labels.push_back((lm >> i) & 1);
        }
        std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
        for (int i = 0; i < 4; ++i) {
          if (preds[static_cast<std::size_t>(i)] && labels[static_cast<std::size_t>(i)]) ++tp;
          if (preds[static_cast<std::size_t>(i)] && !labels[static_cast<std::size_t>(i)]) ++fp;
          if (!preds[static_cast<std::size_t>(i)] && labels[static_cast<std::size_t>(i)]) ++fn;
          if (!preds[static_cast<std::size_t>(i)] && !labels[static_cast<std::size_t>(i)]) ++tn;
        }
        const auto f1 = [](std::int64_t tp_, std::int64_t fp_, std::int64_t fn_) {
          const double prec = tp_ + fp_ > 0 ? static_cast<double>(tp_) / (tp_ + fp_) : 0.0;
          const double rec = tp_ + fn_ > 0 ? static_cast<double>(tp_) / (tp_ + fn_) : 0.0;
          return prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        };
        const double want_present = tp + fn > 0 ? f1(tp, fp, fn) : 0.0;
        const double want_absent = tn + fp > 0 ? f1(tn, fn, fp) : 0.0;
        const double want_weighted =
            ((tn + fp) * want_absent + (tp + fn) * want_present) / 4.0;

        const FScores f = itemvoice::eval::f_scores(preds, labels);
        CHECK(std::fabs(f.f_present - want_present) <= 1e-12);
        CHECK(std::fabs(f.f_absent - want_absent) <= 1e-12);
        CHECK(std::fabs(f.weighted_f - want_weighted) <= 1e-12);
        CHECK(f.support_present == tp + fn);
        CHECK(f.support_absent == tn + fp);
      }
    }
  }

  TEST_CASE("length mismatches and empty inputs are rejected") {
    auto r = capture([] { itemvoice::eval::f_scores({true}, {true, false}); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::LengthMismatch);
    r = capture([] { itemvoice::eval::f_scores({}, {}); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::LengthMismatch);
  }
}

TEST_SUITE("report") {
  TEST_CASE("wap cell rounds each score to two decimals") {
    FScores f;
    f.weighted_f = 0.7012;
    f.f_absent = 0.7449;
    f.f_present = 0.5251;
    CHECK(itemvoice::eval::wap_cell(f) == "0.70/0.74/0.53");
    f.weighted_f = 1.0;
    f.f_absent = 0.0;
    f.f_present = 0.666666;
    CHECK(itemvoice::eval::wap_cell(f) == "1.00/0.00/0.67");
  }

  TEST_CASE("csv rendering matches the golden file byte for byte") {
    itemvoice::eval::EvalReport report;
    report.scale_name = "madrs";
    report.split = "test";

    itemvoice::eval::ReportRow item;
    item.item_index = 10;
    item.item_name = "Suicidal thoughts";
    item.hard = itemvoice::eval::f_scores({true, false, false, false},
                                          {true, true, false, false});
    item.soft = item.hard;
    report.rows.push_back(item);

    itemvoice::eval::ReportRow dep;
    dep.item_index = 0;
    dep.item_name = "depression";
    dep.hard = itemvoice::eval::f_scores({true, false, true, false},
                                         {true, false, true, false});
    dep.soft = dep.hard;
    report.rows.push_back(dep);

    const std::string golden =
        testsupport::read_file(std::string(ITEMVOICE_GOLDEN_DIR) + "/report_golden.csv");
    REQUIRE_FALSE(golden.empty());
    CHECK(itemvoice::eval::report_csv_string(report) == golden);

    testsupport::TempDir dir("report");
    itemvoice::eval::write_report_csv(dir.file("report.csv"), report);
    CHECK(testsupport::read_file(dir.file("report.csv")) == golden);
  }
}

TEST_SUITE("timeline") {
  TEST_CASE("ramp endpoints, midpoint and clamping") {
    CHECK(itemvoice::vote::ramp_color(0.0) == "#2a0a4a");
    CHECK(itemvoice::vote::ramp_color(1.0) == "#f5e642");
    CHECK(itemvoice::vote::ramp_color(0.5) == "#907846");
    CHECK(itemvoice::vote::ramp_color(-3.0) == "#2a0a4a");
    CHECK(itemvoice::vote::ramp_color(7.0) == "#f5e642");
  }

  TEST_CASE("json document carries the grid and both decisions") {
    const SegmentProbabilityGrid grid = make_grid({0.85, 0.2, 0.6}, "p01", 10);
    const std::string text = itemvoice::vote::timeline_json(grid, "Suicidal thoughts");
    const nlohmann::json doc = nlohmann::json::parse(text);
    CHECK(doc.at("recording_id") == "p01");
    CHECK(doc.at("item_index") == 10);
    CHECK(doc.at("item_name") == "Suicidal thoughts");
    CHECK(doc.at("hop_s") == 1.0);
    CHECK(doc.at("span_s") == 13.0);
    REQUIRE(doc.at("segments").size() == 3);
    CHECK(doc.at("segments")[0].at("index") == 0);
    CHECK(doc.at("segments")[0].at("start_s") == 0.0);
    CHECK(doc.at("segments")[0].at("p_present") == 0.85);
    CHECK(doc.at("segments")[0].at("p_absent") == doctest::Approx(0.15));
    CHECK(doc.at("segments")[2].at("start_s") == 2.0);

    const ItemDecision hard = itemvoice::vote::hard_vote(grid);
    const ItemDecision soft = itemvoice::vote::soft_vote(grid);
    CHECK(doc.at("decision").at("hard").at("present") == hard.present);
    CHECK(doc.at("decision").at("soft").at("present") == soft.present);
    CHECK(doc.at("decision").at("soft").at("aggregate_present_prob") ==
          doctest::Approx(soft.aggregate_present_prob));
  }

  TEST_CASE("svg draws two cells per segment with ramp fills") {
    const SegmentProbabilityGrid grid = make_grid({0.85, 0.2, 0.6}, "p01", 10);
    const std::string svg = itemvoice::vote::timeline_svg(grid, "Suicidal thoughts");
    CHECK(count_occurrences(svg, "<rect ") == 6);
    CHECK(testsupport::contains(svg, "Suicidal thoughts"));
    CHECK(testsupport::contains(svg, "fill=\"" + itemvoice::vote::ramp_color(0.85) + "\""));
    CHECK(testsupport::contains(svg, "fill=\"" + itemvoice::vote::ramp_color(0.15) + "\""));
    CHECK(testsupport::contains(svg, "<svg xmlns"));
  }

  TEST_CASE("a 35 s drop-last grid renders 22 columns") {
    std::vector<double> ps(22, 0.5);
    SegmentProbabilityGrid grid = make_grid(ps, "p02", 1);
    grid.geometry = itemvoice::seg::grid_geometry(35.0, true);
    const std::string svg = itemvoice::vote::timeline_svg(grid, "Apparent sadness");
    CHECK(count_occurrences(svg, "<rect ") == 44);
    // uniform 0.5 grid sits mid-ramp everywhere
    CHECK(count_occurrences(svg, "fill=\"#907846\"") == 44);
  }

  TEST_CASE("write_timeline emits both artifacts") {
    testsupport::TempDir dir("timeline");
    const SegmentProbabilityGrid grid = make_grid({0.3, 0.9}, "p03", 2);
    itemvoice::vote::write_timeline(grid, "Reported sadness", dir.file("t.json"),
                                    dir.file("t.svg"));
    const std::string json_text = testsupport::read_file(dir.file("t.json"));
    const std::string svg_text = testsupport::read_file(dir.file("t.svg"));
    CHECK(nlohmann::json::parse(json_text).at("recording_id") == "p03");
    CHECK(count_occurrences(svg_text, "<rect ") == 4);
  }
}
