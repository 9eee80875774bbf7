#include "catch2/catch_amalgamated.hpp"
#include "fixtures.hpp"
#include "hetsim/families.hpp"
#include "hetsim/metrics.hpp"
#include "hetsim/synth.hpp"

using namespace hetsim;
using families::Family;
using ir::LayerKind;

namespace {

metrics::LayerMetrics m(std::uint64_t bytes, double reuse, std::uint64_t macs) {
  metrics::LayerMetrics x;
  x.param_bytes = bytes;
  x.param_reuse = reuse;
  x.macs = macs;
  return x;
}

}  // namespace

TEST_CASE("reference classifications") {
  CHECK(families::classify(m(2097152, 1, 2097152), LayerKind::LstmGate) == Family::F3);
  // Depthwise example misses the F5 MAC floor by 10%; the boundary slack admits it.
  CHECK(families::classify(m(2304, 196, 451584), LayerKind::DepthwiseConv) == Family::F5);
  // The 35x35 pointwise layer sits below every MAC range except F2's, whose
  // footprint it misses: unclassified, routed as F1 by distance.
  const auto pw = m(16384, 1225, 20070400);
  CHECK(families::classify(pw, LayerKind::PointwiseConv) == Family::Unclassified);
  CHECK(families::nearest_family(pw) == Family::F1);
  CHECK(families::routing_family(pw, LayerKind::PointwiseConv) == Family::F1);
}

TEST_CASE("one representative per family") {
  CHECK(families::classify(m(9216, 12544, 115605504), LayerKind::StandardConv) == Family::F1);
  CHECK(families::classify(m(262144, 196, 51380224), LayerKind::PointwiseConv) == Family::F2);
  CHECK(families::classify(m(1048576, 1, 1048576), LayerKind::FullyConnected) == Family::F3);
  CHECK(families::classify(m(589824, 25, 14745600), LayerKind::StandardConv) == Family::F4);
  CHECK(families::classify(m(4608, 400, 1843200), LayerKind::DepthwiseConv) == Family::F5);
}

TEST_CASE("slack is 10% at each edge") {
  const auto f1 = families::matching_ranges(Family::F1);
  CHECK(f1.param_reuse.lo == Catch::Approx(702));
  CHECK(f1.macs.hi == Catch::Approx(220e6));
  const auto f3 = families::matching_ranges(Family::F3);
  CHECK(f3.param_reuse.hi == families::kMinimalReuse);
  CHECK(families::classify(m(1048576, 8.0, 1048576), LayerKind::FullyConnected) == Family::F3);
  CHECK(families::classify(m(1048576, 8.5, 1048576 * 8), LayerKind::FullyConnected) != Family::F3);
}

TEST_CASE("parameter-free stages are unclassified and not routed") {
  CHECK(families::classify(m(0, 0, 0), LayerKind::LstmCellCombine) == Family::Unclassified);
  CHECK_FALSE(families::routing_family(m(0, 0, 0), LayerKind::LstmCellCombine).has_value());
}

TEST_CASE("multi-match resolves by precedence") {
  // Inside both the widened F3 and F4 footprint ranges; reuse decides F3 only
  // when minimal, so craft a box hit for F4 and F5 instead: impossible by
  // construction, so check F3 beats F4 on an overlapping footprint.
  const auto x = m(2 * 1024 * 1024, 1, 2 * 1024 * 1024);
  CHECK(families::matches(Family::F3, x));
  CHECK(families::classify(x, LayerKind::FullyConnected) == Family::F3);
}

TEST_CASE("LSTM gates with footprint in the F3 range are always F3") {
  for (std::int64_t h = 256; h <= 4096; h += 128)
    for (std::int64_t c : {1, 2, 8, 64}) {
      for (auto mvm : {ir::MvmRole::Input, ir::MvmRole::Hidden}) {
        const auto g = fixtures::gate(h, h, 1, c, mvm);
        const auto lm = metrics::layer_metrics(g);
        const double mb = static_cast<double>(lm.param_bytes) / (1024.0 * 1024.0);
        if (mb < 0.9 || mb > 18 || lm.param_reuse > 8) continue;
        CHECK(families::classify(lm, LayerKind::LstmGate) == Family::F3);
      }
    }
}

TEST_CASE("family invariants on random layers") {
  synth::Rng rng(5);
  for (int k = 0; k < 300; ++k) {
    const auto g = fixtures::random_model(rng, "m");
    for (const auto& l : g.layers()) {
      const auto lm = metrics::layer_metrics(l);
      const auto f = families::classify(lm, l.kind);
      CHECK(families::classify(lm, l.kind) == f);
      if (f == Family::F3) CHECK(lm.param_reuse <= 8.0);
      if (f == Family::F1) CHECK(lm.param_reuse >= 702.0);
      if (lm.param_bytes > 0) CHECK(families::routing_family(lm, l.kind).has_value());
    }
  }
}

TEST_CASE("histograms") {
  SECTION("empty model") {
    const auto h = families::family_histogram(ir::ModelGraph::build("e", ir::ModelClass::CNN, {}));
    CHECK(h.total == 0);
    CHECK(h.classified_fraction() == 0.0);
  }
  SECTION("all-LSTM model is all F3, each weight set counted once") {
    const auto h = families::family_histogram(fixtures::lstm_model(1024, 1024, 5));
    CHECK(h.total == 8);
    CHECK(h.count(Family::F3) == 8);
    CHECK(h.classified_fraction() == 1.0);
  }
  SECTION("default synthetic suite populates every family") {
    families::Histogram h;
    for (const auto& g : synth::generate_suite(synth::SyntheticSuiteSpec::defaults(1))) h += families::family_histogram(g);
    for (auto f : families::kFamilies) CHECK(h.count(f) > 0);
    CHECK(h.classified_fraction() >= 0.97);
  }
}

TEST_CASE("family names round-trip") {
  for (auto f : {Family::F1, Family::F2, Family::F3, Family::F4, Family::F5, Family::Unclassified})
    CHECK(families::parse_family(families::to_string(f)) == f);
  CHECK_FALSE(families::parse_family("F6").has_value());
}
