#include "catch2/catch_amalgamated.hpp"
#include "fixtures.hpp"
#include "hetsim/engine.hpp"
#include "hetsim/error.hpp"
#include "hetsim/synth.hpp"

using namespace hetsim;
using ir::LayerKind;

namespace {

const hw::HardwareSuite& suite() {
  static const auto s = hw::canonical_suite();
  return s;
}

const std::vector<std::string> kScenarios = {"Baseline", "Base+HB", "Mensa-G"};

}  // namespace

TEST_CASE("one-layer model reports exactly its estimate") {
  const auto g = fixtures::chain("one", {fixtures::conv("c", LayerKind::StandardConv, 58, 64, 64, 3)});
  const auto& base = suite().at("Baseline");
  const auto r = engine::run_scenario(g, suite(), suite().scenario("Baseline"));
  const auto c = cost::estimate(g.layer(0), base);
  const auto e = energy::layer_energy(c, metrics::layer_metrics(g.layer(0)), base);
  CHECK(r.latency_s == c.latency_s);
  CHECK(r.energy.total == e.total);
  CHECK(r.mean_utilization == c.utilization);
  CHECK(r.total_macs == c.macs);
  CHECK(r.comms.empty());
  REQUIRE(r.per_accelerator.size() == 1);
  CHECK(r.per_accelerator[0].name == "Baseline");
}

TEST_CASE("layers on one accelerator add up with no communication") {
  const auto a = fixtures::conv("a", LayerKind::StandardConv, 58, 64, 64, 3);
  const auto b = fixtures::conv("b", LayerKind::PointwiseConv, 56, 64, 128, 1);
  const auto g = fixtures::chain("two", {a, b});
  const auto r = engine::run_scenario(g, suite(), suite().scenario("Baseline"));
  const auto& base = suite().at("Baseline");
  const auto ca = cost::estimate(a, base);
  const auto cb = cost::estimate(b, base);
  CHECK(r.comm_latency_s == 0.0);
  CHECK(r.comm_energy_j == 0.0);
  CHECK(r.latency_s == Catch::Approx(ca.latency_s + cb.latency_s));
  CHECK(r.mean_utilization ==
        Catch::Approx((ca.utilization * ca.macs + cb.utilization * cb.macs) / static_cast<double>(ca.macs + cb.macs)));
}

TEST_CASE("communication cost of one event") {
  sched::CommEvent e{"a", "b", "Baseline", "Base+HB", 1024 * 1024, true, false};
  CHECK(engine::comm_energy(e, suite()) == Catch::Approx(2.0 * 1024 * 1024 * 32e-12));
  CHECK(engine::comm_latency(e, suite()) == Catch::Approx(1048576 / 32e9 + 1048576 / 256e9));
  e.to_accelerator = "Pavlov";
  CHECK(engine::comm_energy(e, suite()) == Catch::Approx(1048576 * (32e-12 + 16e-12)));
}

TEST_CASE("report totals are sums of rows and events") {
  synth::Rng rng(3);
  for (int k = 0; k < 60; ++k) {
    const auto g = fixtures::random_model(rng, "r");
    for (const auto& name : kScenarios) {
      const auto r = engine::run_scenario(g, suite(), suite().scenario(name));
      double lat = 0, energy = 0, comm = 0;
      std::uint64_t macs = 0;
      for (const auto& row : r.layers) {
        lat += row.cost.latency_s;
        energy += row.energy.total;
        macs += row.metrics.macs;
      }
      for (const auto& c : r.comms) comm += c.energy_j;
      CHECK(r.total_macs == macs);
      CHECK(r.layer_latency_s == Catch::Approx(lat));
      CHECK(r.energy.total == Catch::Approx(energy + comm));
      CHECK(r.energy.total == Catch::Approx(r.energy.component_sum()));
      CHECK(r.latency_s == Catch::Approx(r.layer_latency_s + r.comm_latency_s));
      CHECK(r.mean_utilization <= 1.0 + 1e-12);
      double acc_lat = 0;
      for (const auto& t : r.per_accelerator) acc_lat += t.latency_s;
      CHECK(acc_lat == Catch::Approx(r.layer_latency_s));
    }
  }
}

TEST_CASE("idle leakage only adds energy") {
  const auto g = fixtures::chain("alt", {fixtures::conv("a", LayerKind::StandardConv, 114, 32, 32, 3),
                                         fixtures::fc("b", 1024, 1024)});
  engine::SimOptions leak;
  leak.idle_leakage = true;
  const auto& sc = suite().scenario("Mensa-G");
  const auto plain = engine::run_scenario(g, suite(), sc);
  const auto leaky = engine::run_scenario(g, suite(), sc, leak);
  CHECK(leaky.energy.total > plain.energy.total);
  CHECK(leaky.latency_s == plain.latency_s);
}

TEST_CASE("plan and suite must agree") {
  const auto g = fixtures::chain("two", {fixtures::fc("a", 8, 8), fixtures::fc("b", 8, 8)});
  auto plan = sched::schedule(g, suite(), hw::uniform_routing("Pascal"));
  plan.assignments.pop_back();
  CHECK_THROWS_AS(engine::simulate(g, plan, suite()), ConfigError);
  plan = sched::schedule(g, suite(), hw::uniform_routing("Pascal"));
  plan.assignments[1].destination = "Ghost";
  CHECK_THROWS_AS(engine::simulate(g, plan, suite()), ConfigError);
}

TEST_CASE("comparisons") {
  const auto g = fixtures::lstm_model(1024, 1024, 8);
  SECTION("baseline against itself") {
    const auto c = engine::compare_suites(g, suite(), {"Baseline"}, "Baseline");
    REQUIRE(c.rows.size() == 1);
    CHECK(c.rows[0].energy_efficiency_x == 1.0);
    CHECK(c.rows[0].throughput_x == 1.0);
    CHECK(c.rows[0].latency_x == 1.0);
  }
  SECTION("baseline must be compared") {
    CHECK_THROWS_AS(engine::compare_suites(g, suite(), {"Mensa-G"}, "Baseline"), ConfigError);
    CHECK_THROWS_AS(engine::compare_suites(std::vector<ir::ModelGraph>{g}, suite(), {"Mensa-G"}, "Baseline"),
                    ConfigError);
  }
  SECTION("8x bandwidth speeds up a pure LSTM by at most 8x") {
    const auto c = engine::compare_suites(g, suite(), {"Baseline", "Base+HB"}, "Baseline");
    const double x = c.rows[1].throughput_x;
    CHECK(x > 4.0);
    CHECK(x <= 8.0);
    CHECK(c.rows[1].latency_x == Catch::Approx(1.0 / x));
  }
  SECTION("suite aggregation") {
    const auto cnn = fixtures::chain("cnn", {fixtures::conv("a", LayerKind::StandardConv, 114, 32, 32, 3)});
    const auto s = engine::compare_suites(std::vector<ir::ModelGraph>{g, cnn}, suite(), kScenarios, "Baseline");
    REQUIRE(s.rows.size() == 3);
    REQUIRE(s.per_model.size() == 2);
    CHECK(s.rows[0].totals.throughput_x == 1.0);
    CHECK(s.rows[0].geomean_throughput_x == Catch::Approx(1.0));
    const double geo = std::sqrt(s.per_model[0].rows[2].throughput_x * s.per_model[1].rows[2].throughput_x);
    CHECK(s.rows[2].geomean_throughput_x == Catch::Approx(geo));
    const double total_lat = s.per_model[0].rows[0].latency_s + s.per_model[1].rows[0].latency_s;
    CHECK(s.rows[0].totals.latency_s == Catch::Approx(total_lat));
  }
}
