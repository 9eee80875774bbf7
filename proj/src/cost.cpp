#include "hetsim/cost.hpp"

#include <algorithm>
#include <limits>

#include "hetsim/error.hpp"

namespace hetsim::cost {

using hw::DataflowKind;
using ir::LayerKind;

namespace {

std::uint64_t u(std::int64_t v) { return static_cast<std::uint64_t>(v); }

bool refetches_recurrent_weights(DataflowKind d) {
  return d == DataflowKind::BaselineMonolithic || d == DataflowKind::PascalFlow;
}

// Weight bytes this descriptor pulls from DRAM before any miss filtering.
std::uint64_t param_traffic(const ir::LayerDescriptor& l, std::uint64_t param_bytes, DataflowKind d) {
  if (l.kind != LayerKind::LstmGate) return param_bytes;
  // Without temporal multicast the weights are streamed again for every cell
  // of every timestep; with it they are fetched once, at the first timestep.
  if (refetches_recurrent_weights(d)) return param_bytes * u(l.rec.c);
  return l.timestep == 1 ? param_bytes : 0;
}

std::uint64_t sat_sub(std::uint64_t a, std::uint64_t b) { return a > b ? a - b : 0; }

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

// Reduction extent Jacquard spreads across PEs.
std::uint64_t jacquard_reduction(const ir::LayerDescriptor& l) {
  if (l.kind == LayerKind::LstmGate) return l.mvm == ir::MvmRole::Input ? u(l.rec.d) : u(l.rec.h);
  if (l.kind == LayerKind::LstmCellCombine) return 1;
  return u(l.conv.ci);
}

}  // namespace

std::string_view to_string(Bottleneck b) { return b == Bottleneck::Compute ? "Compute" : "Memory"; }

std::uint64_t param_fetch_multiplier(const ir::LayerDescriptor& layer, const hw::AcceleratorConfig& accel) {
  if (layer.kind != LayerKind::LstmGate) return 1;
  if (refetches_recurrent_weights(accel.dataflow)) return u(layer.rec.t) * u(layer.rec.c);
  return 1;
}

std::uint64_t effective_parallelism(const ir::LayerDescriptor& l, const hw::AcceleratorConfig& accel) {
  const std::uint64_t pes = u(accel.pe_count());
  std::uint64_t want = pes;
  switch (accel.dataflow) {
    case DataflowKind::BaselineMonolithic:
    case DataflowKind::PascalFlow:
      want = l.kind == LayerKind::LstmGate ? u(l.rec.h) : metrics::output_elements(l);
      break;
    case DataflowKind::PavlovFlow:
      want = l.kind == LayerKind::LstmGate ? 4 * u(l.rec.h) : metrics::output_elements(l);
      break;
    case DataflowKind::JacquardFlow:
      want = jacquard_reduction(l);
      break;
  }
  return std::max<std::uint64_t>(1, std::min(pes, want));
}

double lane_rate(const hw::AcceleratorConfig& accel) {
  return accel.peak_macs_per_s() / static_cast<double>(accel.pe_count());
}

CostEstimate estimate(const ir::LayerDescriptor& l, const metrics::LayerMetrics& m,
                      const hw::AcceleratorConfig& accel, const EstimateOptions& opts) {
  CostEstimate c;
  c.macs = m.macs;
  c.parallelism = effective_parallelism(l, accel);
  c.compute_cycles = ceil_div(m.macs, c.parallelism);
  c.compute_time_s = static_cast<double>(c.compute_cycles) / lane_rate(accel);

  if (m.param_bytes > 0) {
    const bool resident = opts.steady_state_params && m.param_bytes <= accel.param_buffer_bytes;
    c.dram_param_bytes = resident ? 0 : param_traffic(l, m.param_bytes, accel.dataflow);
  }

  const std::uint64_t in = m.input_act_bytes;
  const std::uint64_t out = m.output_act_bytes;
  if (l.kind == LayerKind::LstmCellCombine) {
    // Elementwise stage: operands come from and return to DRAM.
    c.dram_act_bytes = in + out;
  } else if (accel.dataflow == DataflowKind::PascalFlow) {
    // Outputs are reduced in-PE and never spill.
    c.dram_act_bytes = sat_sub(in, accel.act_buffer_bytes);
  } else {
    c.dram_act_bytes = sat_sub(in + out, accel.act_buffer_bytes);
  }

  if (accel.dataflow == DataflowKind::JacquardFlow && l.kind != LayerKind::LstmCellCombine)
    c.noc_bytes = metrics::output_elements(l) * (jacquard_reduction(l) - 1) * kPartialSumBytes;

  if (accel.param_buffer_bytes > 0 && m.param_bytes > 0)
    c.param_buf_accesses = c.dram_param_bytes + std::max(c.dram_param_bytes, m.param_bytes);
  c.act_buf_accesses = in + out;
  if (accel.dataflow == DataflowKind::BaselineMonolithic && l.kind != LayerKind::LstmCellCombine) {
    // Reductions longer than the array height spill partial sums to the
    // activation buffer between passes (write + read back).
    const std::uint64_t passes = ceil_div(std::max<std::uint64_t>(1, metrics::reduction_length(l)), u(accel.pe_rows));
    c.act_buf_accesses += 2 * metrics::output_elements(l) * kPartialSumBytes * (passes - 1);
  }

  c.memory_time_s = static_cast<double>(c.dram_bytes()) / accel.bandwidth_bytes_per_s();
  const bool serialized =
      opts.gate_serialization && accel.dataflow == DataflowKind::BaselineMonolithic && l.kind == LayerKind::LstmGate;
  c.latency_s = (opts.additive_latency || serialized) ? c.compute_time_s + c.memory_time_s
                                                      : std::max(c.compute_time_s, c.memory_time_s);
  c.bottleneck = c.compute_time_s >= c.memory_time_s ? Bottleneck::Compute : Bottleneck::Memory;
  if (c.latency_s > 0)
    c.utilization = std::clamp(static_cast<double>(m.macs) / (accel.peak_macs_per_s() * c.latency_s), 0.0, 1.0);
  return c;
}

CostEstimate estimate(const ir::LayerDescriptor& layer, const hw::AcceleratorConfig& accel,
                      const EstimateOptions& opts) {
  return estimate(layer, metrics::layer_metrics(layer), accel, opts);
}

double compute_bound_time(const ir::LayerDescriptor& layer, const metrics::LayerMetrics& m,
                          const hw::AcceleratorConfig& accel) {
  return static_cast<double>(m.macs) /
         (static_cast<double>(effective_parallelism(layer, accel)) * lane_rate(accel));
}

double roofline_attainable(double intensity, const hw::AcceleratorConfig& accel) {
  if (!(intensity >= 0)) throw DomainError("roofline intensity must be >= 0");
  return std::min(accel.peak_macs_per_s(), accel.bandwidth_bytes_per_s() * intensity);
}

double ridge_point(const hw::AcceleratorConfig& accel) {
  return accel.peak_macs_per_s() / accel.bandwidth_bytes_per_s();
}

double operational_intensity(const CostEstimate& c) {
  if (c.dram_bytes() == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(c.macs) / static_cast<double>(c.dram_bytes());
}

}  // namespace hetsim::cost
