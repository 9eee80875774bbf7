#include "hetsim/metrics.hpp"

#include <map>

namespace hetsim::metrics {

using ir::LayerKind;

namespace {

std::uint64_t u(std::int64_t v) { return static_cast<std::uint64_t>(v); }

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// Elementwise gate combination reads the 8 MVM outputs plus c_{t-1} and
// writes c_t and h_t.
constexpr std::uint64_t kCombineInputsPerCell = 9;
constexpr std::uint64_t kCombineOutputsPerCell = 2;

}  // namespace

std::uint64_t bytes_for(std::uint64_t elements, int bits) {
  return (elements * static_cast<std::uint64_t>(bits) + 7) / 8;
}

std::uint64_t output_elements(const ir::LayerDescriptor& l) {
  switch (l.kind) {
    case LayerKind::StandardConv:
    case LayerKind::DepthwiseConv:
    case LayerKind::PointwiseConv:
      return u(l.conv.ho) * u(l.conv.wo) * u(l.conv.co);
    case LayerKind::FullyConnected:
      return u(l.conv.co);
    case LayerKind::LstmGate:
      return u(l.rec.h) * u(l.rec.c);
    case LayerKind::LstmCellCombine:
      return kCombineOutputsPerCell * u(l.rec.h) * u(l.rec.c);
  }
  return 0;
}

std::uint64_t reduction_length(const ir::LayerDescriptor& l) {
  switch (l.kind) {
    case LayerKind::StandardConv:
      return u(l.conv.ci) * u(l.conv.kh) * u(l.conv.kw);
    case LayerKind::DepthwiseConv:
      return u(l.conv.kh) * u(l.conv.kw);
    case LayerKind::PointwiseConv:
    case LayerKind::FullyConnected:
      return u(l.conv.ci);
    case LayerKind::LstmGate:
      return l.mvm == ir::MvmRole::Input ? u(l.rec.d) : u(l.rec.h);
    case LayerKind::LstmCellCombine:
      return 0;
  }
  return 0;
}

LayerMetrics layer_metrics(const ir::LayerDescriptor& l) {
  LayerMetrics m;
  std::uint64_t weights = 0;
  std::uint64_t in_elems = 0;
  const auto& s = l.conv;
  const auto& r = l.rec;
  switch (l.kind) {
    case LayerKind::StandardConv:
      m.macs = u(s.ho) * u(s.wo) * u(s.co) * u(s.ci) * u(s.kh) * u(s.kw);
      weights = u(s.co) * u(s.ci) * u(s.kh) * u(s.kw);
      in_elems = u(s.hi) * u(s.wi) * u(s.ci);
      break;
    case LayerKind::DepthwiseConv:
      m.macs = u(s.ho) * u(s.wo) * u(s.ci) * u(s.kh) * u(s.kw);
      weights = u(s.ci) * u(s.kh) * u(s.kw);
      in_elems = u(s.hi) * u(s.wi) * u(s.ci);
      break;
    case LayerKind::PointwiseConv:
      m.macs = u(s.ho) * u(s.wo) * u(s.co) * u(s.ci);
      weights = u(s.co) * u(s.ci);
      in_elems = u(s.hi) * u(s.wi) * u(s.ci);
      break;
    case LayerKind::FullyConnected:
      m.macs = u(s.ci) * u(s.co);
      weights = u(s.ci) * u(s.co);
      in_elems = u(s.ci);
      break;
    case LayerKind::LstmGate: {
      const std::uint64_t cols = l.mvm == ir::MvmRole::Input ? u(r.d) : u(r.h);
      m.macs = u(r.h) * cols * u(r.c);
      weights = u(r.h) * cols;
      in_elems = cols * u(r.c);
      break;
    }
    case LayerKind::LstmCellCombine:
      in_elems = kCombineInputsPerCell * u(r.h) * u(r.c);
      break;
  }
  m.param_bytes = weights == 0 ? 0 : bytes_for(weights, l.bits);
  m.param_reuse = ratio(m.macs, m.param_bytes);
  m.input_act_bytes = bytes_for(in_elems, l.bits);
  m.output_act_bytes = bytes_for(output_elements(l), l.bits);
  m.act_reuse = ratio(m.macs, m.input_act_bytes);
  return m;
}

bool owns_weights(const ir::LayerDescriptor& l) {
  if (l.kind == LayerKind::LstmCellCombine) return false;
  if (l.kind == LayerKind::LstmGate) return l.timestep == 1;
  return true;
}

ModelMetrics model_metrics(const ir::ModelGraph& model) {
  ModelMetrics out;
  out.per_layer.reserve(model.size());
  std::map<std::string, LstmFootprint> lstm;
  std::vector<std::string> lstm_order;
  for (const auto& l : model.layers()) {
    const LayerMetrics m = layer_metrics(l);
    out.total_macs += m.macs;
    if (owns_weights(l)) out.total_param_bytes += m.param_bytes;
    if (l.kind == LayerKind::LstmGate && l.timestep == 1) {
      auto [it, inserted] = lstm.try_emplace(l.group);
      if (inserted) {
        it->second.group = l.group;
        lstm_order.push_back(l.group);
      }
      it->second.layer_bytes += m.param_bytes;
      if (l.gate == ir::GateRole::Input) it->second.per_gate_bytes += m.param_bytes;
    }
    out.per_layer.push_back(m);
  }
  for (const auto& g : lstm_order) out.lstm_layers.push_back(lstm.at(g));
  return out;
}

}  // namespace hetsim::metrics
