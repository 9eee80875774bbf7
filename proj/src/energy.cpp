#include "hetsim/energy.hpp"

#include <algorithm>

#include "hetsim/error.hpp"

namespace hetsim::energy {

EnergyBreakdown& EnergyBreakdown::operator+=(const EnergyBreakdown& o) {
  pe_dynamic += o.pe_dynamic;
  buf_static += o.buf_static;
  buf_dynamic += o.buf_dynamic;
  noc += o.noc;
  dram += o.dram;
  pe_static += o.pe_static;
  total += o.total;
  return *this;
}

EnergyBreakdown layer_energy(const cost::CostEstimate& c, const metrics::LayerMetrics& m,
                             const hw::AcceleratorConfig& accel, const EnergyOptions& opts) {
  const hw::EnergyCoefficients& e = accel.energy;
  EnergyBreakdown b;
  b.pe_dynamic = static_cast<double>(m.macs) * e.e_mac();
  b.buf_dynamic = static_cast<double>(c.param_buf_accesses) * e.e_param_buf() +
                  static_cast<double>(c.act_buf_accesses) * e.e_act_buf();
  b.noc = static_cast<double>(c.noc_bytes) * e.e_noc();
  b.dram = static_cast<double>(c.dram_bytes()) * e.e_dram();
  if (opts.include_static) {
    b.pe_static = e.p_static_pe() * static_cast<double>(accel.pe_count()) * c.latency_s;
    b.buf_static = e.p_static_buf_per_kb() * accel.storage_kb() * c.latency_s;
  }
  b.total = b.component_sum();
  return b;
}

double energy_roofline(double intensity, const hw::EnergyCoefficients& coeffs) {
  if (!(intensity > 0)) throw DomainError("energy roofline intensity must be > 0");
  return 1.0 / (coeffs.e_mac() + coeffs.e_dram() / intensity);
}

double buffer_effectiveness(std::uint64_t param_bytes, std::uint64_t param_buffer_bytes) {
  if (param_bytes == 0) return 1.0;
  return std::min(1.0, static_cast<double>(param_buffer_bytes) / static_cast<double>(param_bytes));
}

double buffer_effectiveness(const ir::ModelGraph& model, std::uint64_t param_buffer_bytes) {
  double cached = 0.0;
  double total = 0.0;
  for (const auto& l : model.layers()) {
    if (!metrics::owns_weights(l)) continue;
    const auto bytes = metrics::layer_metrics(l).param_bytes;
    cached += static_cast<double>(bytes) * buffer_effectiveness(bytes, param_buffer_bytes);
    total += static_cast<double>(bytes);
  }
  return total == 0.0 ? 1.0 : cached / total;
}

}  // namespace hetsim::energy
