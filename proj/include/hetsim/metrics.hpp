#pragma once

#include <cstdint>
#include <vector>

#include "hetsim/ir.hpp"

namespace hetsim::metrics {

struct LayerMetrics {
  std::uint64_t macs = 0;
  std::uint64_t param_bytes = 0;
  // MACs per parameter byte; 0 for parameter-free stages.
  double param_reuse = 0.0;
  std::uint64_t input_act_bytes = 0;
  std::uint64_t output_act_bytes = 0;
  // MACs per input-activation byte.
  double act_reuse = 0.0;

  bool operator==(const LayerMetrics&) const = default;
};

// Bytes needed to hold `elements` values of `bits` width.
std::uint64_t bytes_for(std::uint64_t elements, int bits);

// Number of output elements the layer produces (per descriptor).
std::uint64_t output_elements(const ir::LayerDescriptor& layer);

// Length of the dot product behind one output element.
std::uint64_t reduction_length(const ir::LayerDescriptor& layer);

LayerMetrics layer_metrics(const ir::LayerDescriptor& layer);

struct LstmFootprint {
  std::string group;
  // W_x + W_h of one gate.
  std::uint64_t per_gate_bytes = 0;
  // All four gates.
  std::uint64_t layer_bytes = 0;
};

struct ModelMetrics {
  std::uint64_t total_macs = 0;
  // Weights shared across LSTM timesteps are counted once.
  std::uint64_t total_param_bytes = 0;
  std::vector<LayerMetrics> per_layer;
  std::vector<LstmFootprint> lstm_layers;
};

ModelMetrics model_metrics(const ir::ModelGraph& model);

// True when this descriptor is the first holder of its weights (every conv/FC
// layer; LSTM gate MVMs only at timestep 1).
bool owns_weights(const ir::LayerDescriptor& layer);

}  // namespace hetsim::metrics
