#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "evclust/clusterer.hpp"
#include "evclust/synth.hpp"

using namespace evclust;

namespace {

const SensorGeometry kGeom{64, 64};

StreamClusterer small_clusterer(Timestamp delta = 1000, int d = 1,
                                std::uint64_t n = 3, std::uint64_t m = 2) {
    return StreamClusterer(kGeom, ClusterParams{delta, d, n, m});
}

using Kind = StepOutcome::Kind;

}  // namespace

TEST_CASE("fresh state has no results and processes nothing") {
    StreamClusterer c(kGeom, ClusterParams{1000, 1, 3, 2});
    CHECK(c.results().empty());
    CHECK(c.events_processed() == 0);
    CHECK(c.state().time_surface.at(5, 5) == kNever);
    CHECK_FALSE(c.is_linked({5, 5}));
    CHECK(c.state().cluster_id.at(5, 5) == kNoRow);
}

TEST_CASE("invalid construction is rejected") {
    CHECK_THROWS_AS(StreamClusterer(SensorGeometry{0, 0},
                                    ClusterParams{1000, 1, 3, 2}),
                    Error);
    CHECK_THROWS_AS(StreamClusterer(kGeom, ClusterParams{1000, 1, 2, 2}),
                    Error);
}

TEST_CASE("state memory scales with pixels, not events") {
    StreamClusterer small(SensorGeometry{64, 64}, ClusterParams{1000, 1, 3, 2});
    StreamClusterer big(SensorGeometry{128, 128}, ClusterParams{1000, 1, 3, 2});
    CHECK(big.state_memory_bytes() == 4 * small.state_memory_bytes());

    const std::size_t before = small.state_memory_bytes();
    for (Timestamp t = 0; t < 10000; t += 10)
        small.process({t, 5, 5, 1});
    CHECK(small.state_memory_bytes() == before);
}

TEST_CASE("first event of a stream is isolated") {
    auto c = small_clusterer();
    const auto out = c.process({0, 5, 5, 1});
    CHECK(out.kind == Kind::Isolated);
    CHECK_FALSE(out.detection.has_value());
    CHECK(c.state().time_surface.at(5, 5) == 0);
    CHECK_FALSE(c.is_linked({5, 5}));
}

TEST_CASE("three-event trace founds and reports a cluster") {
    auto c = small_clusterer();

    CHECK(c.process({0, 5, 5, 1}).kind == Kind::Isolated);

    const auto founded = c.process({100, 5, 6, 1});
    CHECK(founded.kind == Kind::ClusterFounded);
    CHECK_FALSE(founded.detection.has_value());
    CHECK(c.root_link({5, 5}) == PixelCoord{5, 5});
    CHECK(c.root_link({5, 6}) == PixelCoord{5, 5});
    CHECK(c.state().cluster_begin.at(5, 5) == 0);
    CHECK(c.state().compatibility.at(5, 5) == 0);
    CHECK(c.state().compatibility.at(5, 6) == 0);
    CHECK(c.state().cluster_end.at(5, 5) == 100);
    CHECK(c.state().grade.at(5, 5) == 2);
    CHECK(c.state().pixels.at(5, 5) == 2);

    const auto attached = c.process({200, 6, 5, 1});
    CHECK(attached.kind == Kind::PixelAttached);
    REQUIRE(attached.detection.has_value());
    CHECK(attached.detection->freshness == DetectionEvent::Freshness::NewRow);
    CHECK(attached.detection->row_index == 0);
    CHECK(attached.detection->record ==
          ClusterRecord{0, 5, 5, 200, 3, 3});
    CHECK(c.results() == std::vector<ClusterRecord>{{0, 5, 5, 200, 3, 3}});
}

TEST_CASE("extending updates the published row in place") {
    auto c = small_clusterer();
    c.process({0, 5, 5, 1});
    c.process({100, 5, 6, 1});
    c.process({200, 6, 5, 1});

    const auto extended = c.process({300, 5, 5, 1});
    CHECK(extended.kind == Kind::ClusterExtended);
    REQUIRE(extended.detection.has_value());
    CHECK(extended.detection->freshness ==
          DetectionEvent::Freshness::UpdatedRow);
    CHECK(extended.detection->row_index == 0);
    CHECK(c.state().grade.at(5, 5) == 4);
    CHECK(c.results() == std::vector<ClusterRecord>{{0, 5, 5, 300, 4, 3}});
}

TEST_CASE("stale link detection and reset") {
    auto c = small_clusterer();

    SUBCASE("unlinked pixel is never stale") {
        c.process({0, 5, 5, 1});
        CHECK_FALSE(c.check_and_clear_stale_link({5, 5}));
    }

    SUBCASE("a member of the live cluster is not stale") {
        c.process({0, 5, 5, 1});
        c.process({100, 5, 6, 1});
        CHECK_FALSE(c.check_and_clear_stale_link({5, 6}));
        CHECK(c.is_linked({5, 6}));
    }

    SUBCASE("re-rooting makes old members stale") {
        c.process({0, 5, 5, 1});
        c.process({100, 5, 6, 1});  // cluster 1 rooted at (5,5), begin 0
        c.process({3000, 5, 5, 1});  // isolated: everything went quiet
        // Anchor (5,5) is linked but its cluster is long over, so this
        // founds a new cluster at (5,5) with begin 3000.
        CHECK(c.process({3100, 5, 5, 1}).kind == Kind::ClusterFounded);
        CHECK(c.state().cluster_begin.at(5, 5) == 3000);

        // (5,6) still carries compatibility 0 from cluster 1.
        CHECK(c.check_and_clear_stale_link({5, 6}));
        CHECK_FALSE(c.is_linked({5, 6}));
        CHECK(c.state().compatibility.at(5, 6) == 0);
        CHECK_FALSE(c.check_and_clear_stale_link({5, 6}));
    }

    SUBCASE("stale member joins the new cluster through process") {
        c.process({0, 5, 5, 1});
        c.process({100, 5, 6, 1});
        c.process({3000, 5, 5, 1});
        c.process({3100, 5, 5, 1});
        const auto out = c.process({3200, 5, 6, 1});
        CHECK(out.kind == Kind::PixelAttached);
        CHECK(c.state().grade.at(5, 5) == 3);
        CHECK(c.state().pixels.at(5, 5) == 2);
        CHECK(c.state().compatibility.at(5, 6) == 3000);
    }
}

TEST_CASE("membership boundary is inclusive in delta") {
    auto c = small_clusterer(1000);
    c.process({0, 5, 5, 1});
    c.process({100, 5, 6, 1});  // cluster end = 100
    CHECK_FALSE(c.is_cluster_member({4, 4}, 200));  // unlinked
    CHECK(c.is_cluster_member({5, 6}, 1100));       // gap exactly delta
    CHECK_FALSE(c.is_cluster_member({5, 6}, 1101)); // one past delta
}

TEST_CASE("anchor selection") {
    auto c = small_clusterer(1000);

    SUBCASE("nothing fresh, nothing selected") {
        CHECK_FALSE(c.select_anchor({5, 5}, 100).has_value());
    }

    SUBCASE("smallest time distance wins") {
        c.process({0, 5, 5, 1});
        c.process({100, 5, 6, 1});
        const auto got = c.select_anchor({6, 5}, 200);
        REQUIRE(got.has_value());
        CHECK(*got == PixelCoord{5, 6});
    }

    SUBCASE("stale surfaces beyond delta are skipped") {
        c.process({0, 5, 5, 1});
        CHECK_FALSE(c.select_anchor({5, 6}, 1500).has_value());
        CHECK(c.select_anchor({5, 6}, 1000).has_value());
    }

    SUBCASE("equal distances fall to raster order") {
        auto c2 = small_clusterer(1000, 1);
        c2.process({50, 4, 4, 1});
        c2.process({50, 5, 4, 1});
        const auto got = c2.select_anchor({4, 5}, 100);
        REQUIRE(got.has_value());
        CHECK(*got == PixelCoord{4, 4});
    }
}

TEST_CASE("two events on one pixel found a single-pixel cluster") {
    auto c = small_clusterer();
    c.process({0, 7, 7, 1});
    const auto out = c.process({100, 7, 7, 1});
    CHECK(out.kind == Kind::ClusterFounded);
    CHECK(c.state().pixels.at(7, 7) == 1);
    CHECK(c.state().grade.at(7, 7) == 2);
    CHECK(c.state().cluster_begin.at(7, 7) == 0);
}

TEST_CASE("founding never emits a detection") {
    auto c = small_clusterer();
    c.process({0, 5, 5, 1});
    const auto out = c.process({100, 5, 6, 1});
    CHECK(out.kind == Kind::ClusterFounded);
    CHECK_FALSE(out.detection.has_value());
}

TEST_CASE("no detection while grade is below n") {
    auto c = small_clusterer(1000, 1, 10, 2);
    c.process({0, 5, 5, 1});
    c.process({100, 5, 6, 1});
    const auto out = c.process({200, 6, 5, 1});
    CHECK(out.kind == Kind::PixelAttached);
    CHECK_FALSE(out.detection.has_value());
    CHECK(c.results().empty());
}

TEST_CASE("hot pixel stays below the pixel threshold") {
    auto c = small_clusterer(1000, 1, 3, 2);
    for (int i = 0; i < 100; ++i)
        c.process({static_cast<Timestamp>(10 * i), 9, 9, 1});
    CHECK(c.results().empty());
    CHECK(c.state().pixels.at(9, 9) == 1);
    CHECK(c.state().grade.at(9, 9) == 100);
}

TEST_CASE("hot pixel is reported when m is 1") {
    auto c = small_clusterer(1000, 1, 3, 1);
    for (int i = 0; i < 100; ++i)
        c.process({static_cast<Timestamp>(10 * i), 9, 9, 1});
    REQUIRE(c.results().size() == 1);
    CHECK(c.results()[0].pixel_count == 1);
    CHECK(c.results()[0].event_count == 100);
    CHECK(c.results()[0].root_t == 0);
}

TEST_CASE("a quiet gap at one location yields a second row") {
    auto c = small_clusterer(1000, 1, 3, 2);
    // burst 1
    c.process({0, 5, 5, 1});
    c.process({100, 5, 6, 1});
    c.process({200, 6, 5, 1});
    c.process({300, 6, 6, 1});
    // > delta of silence, then burst 2 on the same pixels
    c.process({5300, 5, 5, 1});
    CHECK(c.process({5400, 5, 6, 1}).kind == Kind::ClusterFounded);
    const auto out = c.process({5500, 6, 5, 1});
    REQUIRE(out.detection.has_value());
    CHECK(out.detection->freshness == DetectionEvent::Freshness::NewRow);
    CHECK(out.detection->row_index == 1);

    REQUIRE(c.results().size() == 2);
    CHECK(c.results()[0] == ClusterRecord{0, 5, 5, 300, 4, 4});
    CHECK(c.results()[1] == ClusterRecord{5300, 5, 5, 5500, 3, 3});
}

TEST_CASE("an expired anchor founds instead of attaching") {
    auto c = small_clusterer(1000, 1, 3, 2);
    c.process({0, 5, 5, 1});
    c.process({100, 5, 6, 1});   // cluster 1, begin 0
    c.process({5300, 5, 5, 1});  // isolated
    // (5,5) is still linked to the dead cluster 1; attaching would drag
    // the new burst into it, so a fresh cluster starts at (5,5) instead.
    const auto out = c.process({5400, 5, 6, 1});
    CHECK(out.kind == Kind::ClusterFounded);
    CHECK(c.state().cluster_begin.at(5, 5) == 5300);
    CHECK(c.state().grade.at(5, 5) == 2);
}

TEST_CASE("zero radius clusters same-pixel chains only") {
    auto c = small_clusterer(1000, 0, 3, 1);
    c.process({0, 5, 5, 1});
    c.process({50, 5, 6, 1});   // adjacent pixel, unreachable at d = 0
    CHECK(c.process({100, 5, 5, 1}).kind == Kind::ClusterFounded);
    CHECK(c.process({150, 5, 6, 1}).kind == Kind::ClusterFounded);
    const auto out = c.process({200, 5, 5, 1});
    CHECK(out.kind == Kind::ClusterExtended);
    REQUIRE(out.detection.has_value());
    CHECK(out.detection->record == ClusterRecord{0, 5, 5, 200, 3, 1});
}

TEST_CASE("clusters form at the sensor corner") {
    auto c = small_clusterer();
    c.process({0, 0, 0, 1});
    CHECK(c.process({100, 1, 0, 1}).kind == Kind::ClusterFounded);
    const auto out = c.process({200, 0, 1, 1});
    CHECK(out.kind == Kind::PixelAttached);
    REQUIRE(out.detection.has_value());
    CHECK(out.detection->record == ClusterRecord{0, 0, 0, 200, 3, 3});
}

TEST_CASE("out-of-order timestamps are a hard error") {
    auto c = small_clusterer();
    c.process({100, 5, 5, 1});
    CHECK_THROWS_AS(c.process({99, 5, 5, 1}), StreamError);
    CHECK_NOTHROW(c.process({100, 5, 6, 1}));  // equal is fine
}

TEST_CASE("out-of-bounds events are a hard error") {
    auto c = small_clusterer();
    CHECK_THROWS_AS(c.process({0, 64, 5, 1}), StreamError);
    CHECK_THROWS_AS(c.process({0, 5, 64, 1}), StreamError);
}

TEST_CASE("root counters track true membership on arbitrary streams") {
    // Shadow bookkeeping: follow each outcome and maintain the member
    // pixel set and event tally per cluster incarnation (root pixel plus
    // its begin timestamp). The root's grade and pixels cells must agree
    // at every step; in particular a pixel is never counted twice.
    using Key = std::tuple<int, int, Timestamp>;
    const SensorGeometry geom{16, 16};
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        SplitMix64 rng(seed);
        StreamClusterer c(geom, ClusterParams{400 + rng.below(1200),
                                              1 + static_cast<int>(rng.below(2)),
                                              3, 1 + rng.below(3)});
        std::map<Key, std::set<std::pair<int, int>>> members;
        std::map<Key, std::uint64_t> tally;

        Timestamp t = 0;
        for (int i = 0; i < 300; ++i) {
            t += rng.below(250);
            const Event e{t, static_cast<std::uint16_t>(rng.below(16)),
                          static_cast<std::uint16_t>(rng.below(16)), 1};
            const auto out = c.process(e);
            if (out.kind == StepOutcome::Kind::Isolated) continue;

            const PixelCoord root = c.root_link({e.x, e.y});
            const Key key{root.x, root.y, c.state().cluster_begin.at(root)};
            if (out.kind == StepOutcome::Kind::ClusterFounded) {
                members[key] = {{root.x, root.y}, {e.x, e.y}};
                tally[key] = 2;
            } else {
                if (out.kind == StepOutcome::Kind::ClusterExtended)
                    CHECK(members[key].count({e.x, e.y}) == 1);
                members[key].insert({e.x, e.y});
                tally[key] += 1;
            }
            CHECK(c.state().pixels.at(root) == members[key].size());
            CHECK(c.state().grade.at(root) == tally[key]);
            // Joined pixels carry their cluster's begin timestamp, and
            // link coordinates always come as a valid pair.
            CHECK(c.state().compatibility.at(e.x, e.y) ==
                  c.state().cluster_begin.at(root));
            CHECK(c.state().root_link_x.at(e.x, e.y) >= 0);
            CHECK(c.state().root_link_y.at(e.x, e.y) >= 0);
            CHECK(geom.contains(c.root_link({e.x, e.y})));
        }
    }
}

TEST_CASE("identical streams give identical outcomes and rows") {
    const std::vector<Event> stream = {
        {0, 5, 5, 1},  {100, 5, 6, 1},  {200, 6, 5, 1},  {300, 5, 5, 1},
        {5300, 5, 5, 1}, {5400, 5, 6, 1}, {5500, 6, 5, 1}, {5600, 7, 5, 1},
    };
    auto run = [&stream] {
        auto c = small_clusterer(1000, 1, 3, 2);
        std::vector<Kind> kinds;
        for (const Event& e : stream) kinds.push_back(c.process(e).kind);
        return std::pair{kinds, c.results()};
    };
    CHECK(run() == run());
}
