#pragma once

#include <cstdint>

#include "hetsim/cost.hpp"
#include "hetsim/hardware.hpp"
#include "hetsim/ir.hpp"
#include "hetsim/metrics.hpp"

namespace hetsim::energy {

// Joules.
struct EnergyBreakdown {
  double pe_dynamic = 0.0;
  double buf_static = 0.0;
  double buf_dynamic = 0.0;
  double noc = 0.0;
  double dram = 0.0;
  double pe_static = 0.0;
  double total = 0.0;

  double component_sum() const { return pe_dynamic + buf_static + buf_dynamic + noc + dram + pe_static; }
  EnergyBreakdown& operator+=(const EnergyBreakdown& other);
};

struct EnergyOptions {
  // Static power accrues over the layer's own latency on its accelerator.
  bool include_static = true;
};

EnergyBreakdown layer_energy(const cost::CostEstimate& cost, const metrics::LayerMetrics& m,
                             const hw::AcceleratorConfig& accel, const EnergyOptions& opts = {});

// Best achievable MACs per joule at a DRAM intensity (MAC/byte). DomainError
// for intensity <= 0.
double energy_roofline(double intensity, const hw::EnergyCoefficients& coeffs);

// Fraction of a footprint the buffer can hold; 1 for an empty footprint.
double buffer_effectiveness(std::uint64_t param_bytes, std::uint64_t param_buffer_bytes);

// Byte-weighted mean of the per-layer value over the weight-owning layers.
double buffer_effectiveness(const ir::ModelGraph& model, std::uint64_t param_buffer_bytes);

}  // namespace hetsim::energy
