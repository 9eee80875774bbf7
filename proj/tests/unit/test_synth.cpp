#include <algorithm>

#include "catch2/catch_amalgamated.hpp"
#include "hetsim/error.hpp"
#include "hetsim/families.hpp"
#include "hetsim/model_io.hpp"
#include "hetsim/synth.hpp"

using namespace hetsim;

TEST_CASE("rng is reproducible and bounded") {
  synth::Rng a(9), b(9), c(10);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.uniform(-3, 7);
    CHECK(x == b.uniform(-3, 7));
    CHECK(x >= -3);
    CHECK(x <= 7);
    differs = differs || x != c.uniform(-3, 7);
    const double u = a.unit();
    b.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto s = a.uniform_step(1000, 2048, 256);
    b.uniform_step(1000, 2048, 256);
    CHECK(s % 256 == 0);
    CHECK(s >= 1024);
    CHECK(s <= 2048);
  }
  CHECK(differs);
  // Fixed first draw for seed 1, so a library change cannot silently alter suites.
  CHECK(synth::Rng(1).next() == std::mt19937_64(1)());
}

TEST_CASE("default suite is deterministic") {
  const auto spec = synth::SyntheticSuiteSpec::defaults(1);
  const auto a = synth::generate_suite(spec);
  const auto b = synth::generate_suite(spec);
  REQUIRE(a.size() == 12);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(ir::serialize_model(a[i]) == ir::serialize_model(b[i]));
  const auto other = synth::generate_suite(synth::SyntheticSuiteSpec::defaults(2));
  CHECK(ir::serialize_model(other[0]) != ir::serialize_model(a[0]));
}

TEST_CASE("suite composition") {
  const auto models = synth::generate_suite(synth::SyntheticSuiteSpec::defaults(4));
  std::map<ir::ModelClass, int> classes;
  for (const auto& m : models) ++classes[m.model_class()];
  CHECK(classes[ir::ModelClass::CNN] == 4);
  CHECK(classes[ir::ModelClass::LSTM] == 3);
  CHECK(classes[ir::ModelClass::Transducer] == 3);
  CHECK(classes[ir::ModelClass::RCNN] == 2);

  families::Histogram h;
  for (const auto& m : models) h += families::family_histogram(m);
  for (auto f : families::kFamilies) CHECK(h.count(f) > 0);
}

TEST_CASE("CNN layers vary widely") {
  for (std::uint64_t seed : {1, 2, 3}) {
    for (const auto& m : synth::generate_suite(synth::SyntheticSuiteSpec::defaults(seed))) {
      if (m.model_class() != ir::ModelClass::CNN) continue;
      const auto mm = metrics::model_metrics(m);
      std::uint64_t lo = UINT64_MAX, hi = 0, flo = UINT64_MAX, fhi = 0;
      for (const auto& l : mm.per_layer) {
        lo = std::min(lo, l.macs);
        hi = std::max(hi, l.macs);
        if (l.param_bytes > 0) {
          flo = std::min(flo, l.param_bytes);
          fhi = std::max(fhi, l.param_bytes);
        }
      }
      CHECK(static_cast<double>(hi) / static_cast<double>(lo) >= 200.0);
      CHECK(static_cast<double>(fhi) / static_cast<double>(flo) >= 20.0);
    }
  }
}

TEST_CASE("LSTM shapes stay inside the configured ranges") {
  const auto spec = synth::SyntheticSuiteSpec::defaults(5);
  for (const auto& m : synth::generate_suite(spec))
    for (const auto& l : m.layers()) {
      if (m.model_class() != ir::ModelClass::LSTM) continue;
      if (l.kind != ir::LayerKind::LstmGate) continue;
      CHECK(l.rec.h % 256 == 0);
      CHECK(l.rec.h >= spec.lstm_hidden.lo);
      CHECK(l.rec.h <= spec.lstm_hidden.hi);
      CHECK(l.rec.t >= spec.lstm_timesteps.lo);
      CHECK(l.rec.t <= spec.lstm_timesteps.hi);
    }
}

TEST_CASE("infeasible specs fail to generate") {
  auto spec = synth::SyntheticSuiteSpec::defaults(1);
  spec.max_attempts = 50;
  spec.families[0].ranges.macs = {10, 20};
  CHECK_THROWS_AS(synth::generate_suite(spec), GenerationError);

  spec = synth::SyntheticSuiteSpec::defaults(1);
  spec.lstm_hidden = {2048, 1024};
  CHECK_THROWS_AS(synth::generate_suite(spec), GenerationError);
}
