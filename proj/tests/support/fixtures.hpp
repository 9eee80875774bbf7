#pragma once

#include <string>
#include <vector>

#include "hetsim/ir.hpp"
#include "hetsim/synth.hpp"

namespace fixtures {

using hetsim::ir::LayerDescriptor;
using hetsim::ir::LayerKind;
using hetsim::ir::ModelGraph;

inline LayerDescriptor conv(std::string id, LayerKind kind, std::int64_t hi, std::int64_t ci, std::int64_t co,
                            std::int64_t k, std::int64_t stride = 1) {
  LayerDescriptor d;
  d.id = std::move(id);
  d.kind = kind;
  d.conv.hi = d.conv.wi = hi;
  d.conv.ci = ci;
  d.conv.co = kind == LayerKind::DepthwiseConv ? ci : co;
  d.conv.kh = d.conv.kw = k;
  d.conv.stride = stride;
  d.conv.ho = d.conv.wo = hetsim::ir::conv_output_dim(hi, k, stride);
  return d;
}

inline LayerDescriptor fc(std::string id, std::int64_t ci, std::int64_t co) {
  LayerDescriptor d;
  d.id = std::move(id);
  d.kind = LayerKind::FullyConnected;
  d.conv.ci = ci;
  d.conv.co = co;
  return d;
}

inline LayerDescriptor gate(std::int64_t d, std::int64_t h, std::int64_t t = 1, std::int64_t c = 1,
                            hetsim::ir::MvmRole mvm = hetsim::ir::MvmRole::Input, std::int64_t timestep = 1) {
  LayerDescriptor g;
  g.id = "g";
  g.kind = LayerKind::LstmGate;
  g.rec = {d, h, t, c};
  g.group = "lstm";
  g.timestep = timestep;
  g.gate = hetsim::ir::GateRole::Input;
  g.mvm = mvm;
  return g;
}

// Links each layer to the one before it.
inline ModelGraph chain(std::string name, std::vector<LayerDescriptor> layers,
                        hetsim::ir::ModelClass cls = hetsim::ir::ModelClass::CNN) {
  for (std::size_t i = 1; i < layers.size(); ++i)
    if (layers[i].predecessors.empty()) layers[i].predecessors = {layers[i - 1].id};
  return ModelGraph::build(std::move(name), cls, std::move(layers));
}

inline ModelGraph lstm_model(std::int64_t d, std::int64_t h, std::int64_t t, std::int64_t c = 1,
                             std::string name = "lstm") {
  auto layers = hetsim::ir::expand_lstm({"lstm", {d, h, t, c}, 8}, {});
  return ModelGraph::build(std::move(name), hetsim::ir::ModelClass::LSTM, std::move(layers));
}

// Random DAG over assorted layer shapes: a chain with occasional skip edges,
// sometimes with an LSTM layer in the middle.
inline ModelGraph random_model(hetsim::synth::Rng& rng, const std::string& name) {
  std::vector<LayerDescriptor> layers;
  const int n = static_cast<int>(rng.uniform(1, 14));
  for (int i = 0; i < n; ++i) {
    const std::string id = "l" + std::to_string(i);
    LayerDescriptor d;
    switch (rng.uniform(0, 5)) {
      case 0: d = conv(id, LayerKind::StandardConv, rng.uniform(3, 130), rng.uniform(1, 256), rng.uniform(1, 256), 3); break;
      case 1: d = conv(id, LayerKind::DepthwiseConv, rng.uniform(3, 64), rng.uniform(8, 1024), 0, 3); break;
      case 2: d = conv(id, LayerKind::PointwiseConv, rng.uniform(1, 64), rng.uniform(8, 1024), rng.uniform(8, 1024), 1); break;
      case 3: d = fc(id, rng.uniform(16, 4096), rng.uniform(16, 4096)); break;
      case 4: d = conv(id, LayerKind::StandardConv, rng.uniform(5, 9), rng.uniform(64, 512), rng.uniform(64, 512), 3); break;
      default: {
        const std::int64_t h = rng.uniform(16, 1536);
        auto lstm = hetsim::ir::expand_lstm(
            {id, {rng.uniform(16, 1536), h, rng.uniform(1, 4), rng.uniform(1, 2)}, 8},
            layers.empty() ? std::vector<std::vector<std::string>>{} : std::vector<std::vector<std::string>>{{layers.back().id}});
        layers.insert(layers.end(), lstm.begin(), lstm.end());
        continue;
      }
    }
    if (!layers.empty()) {
      d.predecessors = {layers.back().id};
      // Skip edge from a random earlier layer.
      if (layers.size() > 2 && rng.uniform(0, 3) == 0) {
        const auto& src = layers[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(layers.size()) - 2))];
        if (src.id != d.predecessors.front()) d.predecessors.push_back(src.id);
      }
    }
    layers.push_back(std::move(d));
  }
  return ModelGraph::build(name, hetsim::ir::ModelClass::CNN, std::move(layers));
}

}  // namespace fixtures
