#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "hetsim/families.hpp"
#include "hetsim/ir.hpp"

namespace hetsim::synth {

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

// How many layers of a family each CNN (and RCNN front end) gets, and the
// metric box every sampled layer must fall in.
struct FamilySampling {
  int count = 0;
  families::FamilyRanges ranges;
};

struct SyntheticSuiteSpec {
  std::uint64_t seed = 1;
  int cnn_models = 4;
  int lstm_models = 3;
  int transducer_models = 3;
  int rcnn_models = 2;

  // Indexed by static_cast<size_t>(Family), F1..F5. F3 entries become FC
  // heads; LSTM weights are checked against the F3 footprint/reuse box.
  std::array<FamilySampling, 5> families{};

  IntRange lstm_hidden{1024, 2048};
  IntRange lstm_timesteps{10, 32};
  IntRange lstm_depth{1, 2};

  // CNN diversity floors: max/min layer MACs and parameter footprint.
  double min_mac_spread = 200.0;
  double min_footprint_spread = 20.0;

  int max_attempts = 20000;

  // Counts 2/4/1/2/4 per CNN over the un-widened family ranges.
  static SyntheticSuiteSpec defaults(std::uint64_t seed = 1);
};

// MobileNet-like CNNs, LSTM stacks, transducers and RCNN hybrids, in that
// order. Same spec -> identical graphs. GenerationError when a range cannot
// be sampled within max_attempts.
std::vector<ir::ModelGraph> generate_suite(const SyntheticSuiteSpec& spec);

// std::mt19937_64 with a fixed integer mapping: std:: distributions are
// implementation-defined, this is not, so output is identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  // Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
  std::int64_t uniform(IntRange r) { return uniform(r.lo, r.hi); }
  // Uniform multiple of step in [lo, hi] (lo rounded up to the grid).
  std::int64_t uniform_step(std::int64_t lo, std::int64_t hi, std::int64_t step);
  double unit();

 private:
  std::mt19937_64 engine_;
};

}  // namespace hetsim::synth
