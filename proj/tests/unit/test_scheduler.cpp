#include <algorithm>
#include <set>

#include "catch2/catch_amalgamated.hpp"
#include "fixtures.hpp"
#include "hetsim/error.hpp"
#include "hetsim/scheduler.hpp"
#include "hetsim/synth.hpp"

using namespace hetsim;
using ir::LayerKind;
using sched::Reason;

namespace {

const hw::HardwareSuite& suite() {
  static const auto s = hw::canonical_suite();
  return s;
}

const hw::HardwareSuite& mensa() {
  static const auto s = suite().subset(suite().scenario("Mensa-G"));
  return s;
}

// Runs phase 2 with hand-picked ideals.
sched::SchedulePlan with_ideals(const ir::ModelGraph& g, const std::vector<std::string>& ideals) {
  const auto m = metrics::model_metrics(g);
  auto a = sched::phase1(g, m, hw::canonical_routing());
  for (std::size_t i = 0; i < a.size(); ++i) a[i].ideal = ideals[i];
  return sched::phase2(g, m, std::move(a), suite());
}

// F1 conv: 3x3, 32->32 at 112x112 output.
ir::LayerDescriptor f1(std::string id) { return fixtures::conv(std::move(id), LayerKind::StandardConv, 114, 32, 32, 3); }
// F3 FC: 1 MiB of weights, reuse 1.
ir::LayerDescriptor f3(std::string id) { return fixtures::fc(std::move(id), 1024, 1024); }

}  // namespace

TEST_CASE("phase 1 routes by family") {
  const auto lstm = fixtures::lstm_model(1024, 1024, 2);
  const auto m = metrics::model_metrics(lstm);
  for (const auto& a : sched::phase1(lstm, m, hw::canonical_routing())) CHECK(a.ideal == "Pavlov");

  const auto cnn = fixtures::chain("c", {f1("a"), fixtures::conv("dw", LayerKind::DepthwiseConv, 16, 256, 0, 3),
                                         fixtures::conv("pw", LayerKind::PointwiseConv, 35, 128, 128, 1)});
  const auto a = sched::phase1(cnn, metrics::model_metrics(cnn), hw::canonical_routing());
  CHECK(a[0].family == families::Family::F1);
  CHECK(a[0].ideal == "Pascal");
  CHECK(a[1].family == families::Family::F5);
  CHECK(a[1].ideal == "Jacquard");
  CHECK(a[2].family == families::Family::Unclassified);
  CHECK(a[2].nearest_routed);
  CHECK(a[2].ideal == "Pascal");
}

TEST_CASE("routing must cover every family") {
  auto r = hw::canonical_routing();
  r.erase(families::Family::F4);
  const auto g = fixtures::chain("c", {f1("a")});
  CHECK_THROWS_AS(sched::schedule(g, suite(), r), ConfigError);
  CHECK_THROWS_AS(sched::check_routing({}), ConfigError);
}

TEST_CASE("condition A: much slower compute on the previous accelerator") {
  const auto g = fixtures::chain("c", {fixtures::conv("dw", LayerKind::DepthwiseConv, 16, 256, 0, 3), f1("a")});
  const auto p = with_ideals(g, {"Jacquard", "Pascal"});
  CHECK(p.assignments[0].reason == Reason::IdealSame);
  CHECK(p.assignments[1].reason == Reason::MovedCondA);
  CHECK(p.assignments[1].destination == "Pascal");
  const auto m = metrics::layer_metrics(g.layer(1));
  CHECK(cost::compute_bound_time(g.layer(1), m, suite().at("Jacquard")) >=
        4 * cost::compute_bound_time(g.layer(1), m, suite().at("Pascal")));
}

TEST_CASE("condition B: weight traffic against activation traffic") {
  SECTION("small weights, large predecessor output, high reuse: stays") {
    // 2 MiB output feeding ~100 KB of weights with reuse 289.
    const auto big_out = fixtures::conv("a", LayerKind::PointwiseConv, 256, 32, 32, 1);
    const auto small_w = fixtures::conv("b", LayerKind::StandardConv, 19, 106, 106, 3);
    REQUIRE(metrics::layer_metrics(big_out).output_act_bytes == 2u * 1024 * 1024);
    const auto p = with_ideals(fixtures::chain("c", {big_out, small_w}), {"Pascal", "Jacquard"});
    CHECK(p.assignments[1].reason == Reason::StayedWithPrev);
    CHECK(p.assignments[1].destination == "Pascal");
    CHECK(p.events.empty());
  }
  SECTION("large weights, low reuse: moves") {
    const auto p = with_ideals(fixtures::chain("c", {fixtures::fc("a", 16, 64), f3("b")}), {"Pascal", "Pavlov"});
    CHECK(p.assignments[1].reason == Reason::MovedCondB);
    CHECK(p.assignments[1].destination == "Pavlov");
    REQUIRE(p.events.size() == 1);
    CHECK(p.events[0].bytes == 64);
    CHECK(p.events[0].from_accelerator == "Pascal");
    CHECK(p.events[0].to_accelerator == "Pavlov");
  }
}

TEST_CASE("alternating families produce an event at every switch") {
  const auto g = fixtures::chain("alt", {f1("a"), f3("b"), f1("c"), f3("d"), f1("e")});
  const auto p = sched::schedule(g, mensa(), hw::canonical_routing());
  std::vector<std::string> dest;
  for (const auto& a : p.assignments) dest.push_back(a.destination);
  CHECK(dest == std::vector<std::string>{"Pascal", "Pavlov", "Pascal", "Pavlov", "Pascal"});
  REQUIRE(p.events.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(p.events[i].producer == g.layer(i).id);
    CHECK(p.events[i].bytes == metrics::layer_metrics(g.layer(i)).output_act_bytes);
    CHECK_FALSE(p.events[i].reload);
  }
}

TEST_CASE("skip connections evicted while execution was elsewhere are reloaded") {
  // a's 392 KiB output overflows Pascal's 256 KiB activation buffer.
  auto c = f1("c");
  c.predecessors = {"b", "a"};
  const auto g = fixtures::chain("skip", {f1("a"), f3("b"), c});
  const auto p = sched::schedule(g, mensa(), hw::canonical_routing());
  REQUIRE(p.events.size() == 3);
  CHECK(p.events[2].producer == "a");
  CHECK(p.events[2].consumer == "c");
  CHECK(p.events[2].reload);
  CHECK(p.events[2].from_accelerator == p.events[2].to_accelerator);
}

TEST_CASE("pure LSTM on the heterogeneous suite stays on Pavlov") {
  const auto g = fixtures::lstm_model(1024, 1024, 4, 2);
  const auto p = sched::schedule(g, mensa(), hw::canonical_routing());
  for (const auto& a : p.assignments) CHECK(a.destination == "Pavlov");
  CHECK(p.events.empty());
}

TEST_CASE("scheduler properties over random models") {
  synth::Rng rng(2024);
  const auto single = suite().subset(suite().scenario("Baseline"));
  for (int k = 0; k < 300; ++k) {
    const auto g = fixtures::random_model(rng, "r" + std::to_string(k));
    const auto p = sched::schedule(g, mensa(), hw::canonical_routing());
    REQUIRE(p.assignments.size() == g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto& a = p.assignments[i];
      CHECK(a.layer_id == g.layer(i).id);
      if (i == 0) {
        CHECK(a.destination == a.ideal);
      } else {
        const auto& prev = p.assignments[i - 1].destination;
        CHECK((a.destination == a.ideal || a.destination == prev));
        CHECK((a.reason == Reason::IdealSame) == (a.ideal == prev));
        if (a.reason == Reason::StayedWithPrev) CHECK(a.destination == prev);
        if (a.reason == Reason::MovedCondA || a.reason == Reason::MovedCondB) CHECK(a.destination == a.ideal);
      }
    }
    // Determinism.
    const auto again = sched::schedule(g, mensa(), hw::canonical_routing());
    CHECK(again.events.size() == p.events.size());
    for (std::size_t i = 0; i < p.assignments.size(); ++i)
      CHECK(again.assignments[i].destination == p.assignments[i].destination);
    // Every event crosses accelerators or is a reload; no duplicates.
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : p.events) {
      CHECK((e.from_accelerator != e.to_accelerator || e.reload));
      CHECK(seen.emplace(e.producer, e.to_accelerator).second);
    }
    // One accelerator: nothing to move.
    const auto solo = sched::schedule(g, single, hw::uniform_routing("Baseline"));
    CHECK(solo.events.empty());
    for (const auto& a : solo.assignments) CHECK(a.destination == "Baseline");
  }
}

TEST_CASE("phase 2 rejects unknown accelerators") {
  const auto g = fixtures::chain("c", {f1("a")});
  CHECK_THROWS_AS(with_ideals(g, {"Nowhere"}), ConfigError);
}
