#pragma once

#include <cstdint>
#include <string_view>

#include "hetsim/hardware.hpp"
#include "hetsim/ir.hpp"
#include "hetsim/metrics.hpp"

namespace hetsim::cost {

enum class Bottleneck { Compute, Memory };
std::string_view to_string(Bottleneck b);

struct EstimateOptions {
  // Sum compute and memory time instead of overlapping them.
  bool additive_latency = false;
  // Barrier between the MVMs of a cell on BaselineMonolithic: nothing
  // overlaps the gate's weight stream, so its compute and memory time add.
  bool gate_serialization = true;
  // Parameters that fit the parameter buffer stay resident across
  // inferences (no DRAM fetch). Off: every inference starts cold.
  bool steady_state_params = false;
};

// Accumulator width used for partial sums crossing the NoC.
inline constexpr std::uint64_t kPartialSumBytes = 4;

struct CostEstimate {
  std::uint64_t macs = 0;
  std::uint64_t parallelism = 1;
  std::uint64_t compute_cycles = 0;
  std::uint64_t dram_param_bytes = 0;
  std::uint64_t dram_act_bytes = 0;
  std::uint64_t param_buf_accesses = 0;
  std::uint64_t act_buf_accesses = 0;
  std::uint64_t noc_bytes = 0;
  double compute_time_s = 0.0;
  double memory_time_s = 0.0;
  double latency_s = 0.0;
  double utilization = 0.0;
  Bottleneck bottleneck = Bottleneck::Compute;

  std::uint64_t dram_bytes() const { return dram_param_bytes + dram_act_bytes; }
};

// How many times a layer's weights cross the DRAM interface per inference,
// counted over all of the layer's timesteps and cells.
std::uint64_t param_fetch_multiplier(const ir::LayerDescriptor& layer, const hw::AcceleratorConfig& accel);

// MAC lanes the dataflow can keep busy at once (never more than the PE count).
std::uint64_t effective_parallelism(const ir::LayerDescriptor& layer, const hw::AcceleratorConfig& accel);

// Rate of one PE lane, chosen so a saturated array reaches peak.
double lane_rate(const hw::AcceleratorConfig& accel);

CostEstimate estimate(const ir::LayerDescriptor& layer, const metrics::LayerMetrics& m,
                      const hw::AcceleratorConfig& accel, const EstimateOptions& opts = {});
CostEstimate estimate(const ir::LayerDescriptor& layer, const hw::AcceleratorConfig& accel,
                      const EstimateOptions& opts = {});

// Latency with unlimited bandwidth, without cycle rounding.
double compute_bound_time(const ir::LayerDescriptor& layer, const metrics::LayerMetrics& m,
                          const hw::AcceleratorConfig& accel);

// min(peak, bandwidth * intensity), MAC/s. DomainError for negative intensity.
double roofline_attainable(double intensity, const hw::AcceleratorConfig& accel);

// Intensity (MAC/byte) where the roofline turns flat.
double ridge_point(const hw::AcceleratorConfig& accel);

// MACs per DRAM byte actually moved; +inf when nothing is moved.
double operational_intensity(const CostEstimate& c);

}  // namespace hetsim::cost
