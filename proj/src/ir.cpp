#include "hetsim/ir.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>

#include "hetsim/error.hpp"

namespace hetsim::ir {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view text,
                           const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [name, value] : table) {
    if (name == text) return value;
  }
  return std::nullopt;
}

constexpr std::array<std::pair<std::string_view, LayerKind>, 6> kKindNames = {{
    {"StandardConv", LayerKind::StandardConv},
    {"DepthwiseConv", LayerKind::DepthwiseConv},
    {"PointwiseConv", LayerKind::PointwiseConv},
    {"FullyConnected", LayerKind::FullyConnected},
    {"LstmGate", LayerKind::LstmGate},
    {"LstmCellCombine", LayerKind::LstmCellCombine},
}};

constexpr std::array<std::pair<std::string_view, GateRole>, 4> kGateNames = {{
    {"input", GateRole::Input},
    {"modulation", GateRole::Modulation},
    {"forget", GateRole::Forget},
    {"output", GateRole::Output},
}};

constexpr std::array<std::pair<std::string_view, MvmRole>, 2> kMvmNames = {{
    {"input", MvmRole::Input},
    {"hidden", MvmRole::Hidden},
}};

constexpr std::array<std::pair<std::string_view, ModelClass>, 4> kClassNames = {{
    {"CNN", ModelClass::CNN},
    {"LSTM", ModelClass::LSTM},
    {"Transducer", ModelClass::Transducer},
    {"RCNN", ModelClass::RCNN},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

[[noreturn]] void invalid(const LayerDescriptor& layer, const std::string& what) {
  throw ValidationError("layer '" + layer.id + "': " + what);
}

void require_positive(const LayerDescriptor& layer, std::int64_t value, const char* field) {
  if (value <= 0) invalid(layer, std::string(field) + " must be > 0 (got " + std::to_string(value) + ")");
}

}  // namespace

std::string_view to_string(LayerKind kind) { return name_of(kind, kKindNames); }
std::string_view to_string(GateRole role) { return name_of(role, kGateNames); }
std::string_view to_string(MvmRole role) { return name_of(role, kMvmNames); }
std::string_view to_string(ModelClass cls) { return name_of(cls, kClassNames); }

std::optional<LayerKind> parse_layer_kind(std::string_view text) { return lookup(text, kKindNames); }
std::optional<GateRole> parse_gate_role(std::string_view text) { return lookup(text, kGateNames); }
std::optional<MvmRole> parse_mvm_role(std::string_view text) { return lookup(text, kMvmNames); }
std::optional<ModelClass> parse_model_class(std::string_view text) { return lookup(text, kClassNames); }

bool is_lstm_stage(LayerKind kind) {
  return kind == LayerKind::LstmGate || kind == LayerKind::LstmCellCombine;
}

bool is_conv_like(LayerKind kind) { return !is_lstm_stage(kind); }

std::int64_t conv_output_dim(std::int64_t input, std::int64_t kernel, std::int64_t stride) {
  if (input < kernel || stride <= 0) return 0;
  return (input - kernel) / stride + 1;
}

void validate_descriptor(const LayerDescriptor& layer) {
  if (layer.id.empty()) throw ValidationError("layer with empty id");
  if (layer.bits <= 0 || layer.bits > 64) invalid(layer, "bits must be in [1, 64]");

  if (is_conv_like(layer.kind)) {
    if (layer.gate || layer.mvm) invalid(layer, "gate/mvm roles are only valid on LstmGate layers");
    const ConvShape& s = layer.conv;
    require_positive(layer, s.hi, "hi");
    require_positive(layer, s.wi, "wi");
    require_positive(layer, s.ci, "ci");
    require_positive(layer, s.co, "co");
    require_positive(layer, s.kh, "kh");
    require_positive(layer, s.kw, "kw");
    require_positive(layer, s.stride, "stride");
    require_positive(layer, s.ho, "ho");
    require_positive(layer, s.wo, "wo");
    if (layer.kind == LayerKind::FullyConnected) {
      if (s.hi != 1 || s.wi != 1 || s.ho != 1 || s.wo != 1 || s.kh != 1 || s.kw != 1)
        invalid(layer, "FullyConnected layers carry only ci/co");
      return;
    }
    if (s.ho != conv_output_dim(s.hi, s.kh, s.stride))
      invalid(layer, "ho = " + std::to_string(s.ho) + " inconsistent with hi/kh/stride (expected " +
                         std::to_string(conv_output_dim(s.hi, s.kh, s.stride)) + ")");
    if (s.wo != conv_output_dim(s.wi, s.kw, s.stride))
      invalid(layer, "wo = " + std::to_string(s.wo) + " inconsistent with wi/kw/stride (expected " +
                         std::to_string(conv_output_dim(s.wi, s.kw, s.stride)) + ")");
    if (layer.kind == LayerKind::DepthwiseConv && s.ci != s.co)
      invalid(layer, "DepthwiseConv requires ci == co");
    if (layer.kind == LayerKind::PointwiseConv && (s.kh != 1 || s.kw != 1))
      invalid(layer, "PointwiseConv requires kh == kw == 1");
    return;
  }

  const RecurrentShape& r = layer.rec;
  require_positive(layer, r.d, "d");
  require_positive(layer, r.h, "h");
  require_positive(layer, r.t, "t");
  require_positive(layer, r.c, "c");
  if (layer.group.empty()) invalid(layer, "LSTM stages need a group");
  if (layer.timestep < 1 || layer.timestep > r.t) invalid(layer, "timestep must be in [1, t]");
  if (layer.kind == LayerKind::LstmGate) {
    if (!layer.gate || !layer.mvm) invalid(layer, "LstmGate layers need gate and mvm roles");
  } else if (layer.gate || layer.mvm) {
    invalid(layer, "LstmCellCombine layers carry no gate/mvm role");
  }
}

ModelGraph ModelGraph::build(std::string name, ModelClass cls, std::vector<LayerDescriptor> layers) {
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    validate_descriptor(layers[i]);
    if (!position.emplace(layers[i].id, i).second)
      throw StructuralError("duplicate layer id '" + layers[i].id + "'");
  }

  const std::size_t n = layers.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& p : layers[i].predecessors) {
      auto it = position.find(p);
      if (it == position.end())
        throw StructuralError("layer '" + layers[i].id + "' lists unknown predecessor '" + p + "'");
      succ[it->second].push_back(i);
      ++indegree[i];
    }
  }

  // Kahn's algorithm, always releasing the earliest-declared ready layer.
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t u = ready.top();
    ready.pop();
    order.push_back(u);
    for (std::size_t v : succ[u])
      if (--indegree[v] == 0) ready.push(v);
  }

  if (order.size() != n) {
    // Walk predecessor links among the unreleased layers until one repeats.
    std::size_t start = 0;
    while (indegree[start] == 0) ++start;
    std::vector<std::size_t> path;
    std::vector<int> seen_at(n, -1);
    std::size_t u = start;
    while (seen_at[u] < 0) {
      seen_at[u] = static_cast<int>(path.size());
      path.push_back(u);
      for (const auto& p : layers[u].predecessors) {
        const std::size_t v = position.at(p);
        if (indegree[v] != 0) {
          u = v;
          break;
        }
      }
    }
    std::ostringstream msg;
    msg << "cycle in layer graph:";
    for (std::size_t k = static_cast<std::size_t>(seen_at[u]); k < path.size(); ++k)
      msg << ' ' << layers[path[k]].id << " <-";
    msg << ' ' << layers[u].id;
    throw StructuralError(msg.str());
  }

  ModelGraph graph;
  graph.name_ = std::move(name);
  graph.class_ = cls;
  graph.layers_.reserve(n);
  for (std::size_t i : order) graph.layers_.push_back(std::move(layers[i]));
  for (std::size_t i = 0; i < n; ++i) graph.index_.emplace(graph.layers_[i].id, i);
  graph.preds_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& p : graph.layers_[i].predecessors) graph.preds_[i].push_back(graph.index_.at(p));
  return graph;
}

std::optional<std::size_t> ModelGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string lstm_gate_id(std::string_view group, std::int64_t t, GateRole gate, MvmRole mvm) {
  std::string id(group);
  id += ".t" + std::to_string(t) + '.';
  id += to_string(gate);
  id += mvm == MvmRole::Input ? ".x" : ".h";
  return id;
}

std::string lstm_combine_id(std::string_view group, std::int64_t t) {
  return std::string(group) + ".t" + std::to_string(t) + ".combine";
}

std::vector<LayerDescriptor> expand_lstm(const LstmLayerSpec& spec,
                                         const std::vector<std::vector<std::string>>& inputs_per_step) {
  const RecurrentShape& r = spec.shape;
  if (r.t <= 0) throw ValidationError("LSTM layer '" + spec.id + "': t must be > 0");
  if (inputs_per_step.size() > 1 && static_cast<std::int64_t>(inputs_per_step.size()) != r.t)
    throw ValidationError("LSTM layer '" + spec.id + "': per-step inputs do not match t");

  std::vector<LayerDescriptor> out;
  out.reserve(static_cast<std::size_t>(9 * r.t));
  for (std::int64_t t = 1; t <= r.t; ++t) {
    std::vector<std::string> step_inputs;
    if (inputs_per_step.size() == 1) step_inputs = inputs_per_step.front();
    else if (!inputs_per_step.empty()) step_inputs = inputs_per_step[static_cast<std::size_t>(t - 1)];

    std::vector<std::string> gate_ids;
    for (GateRole gate : kGateOrder) {
      for (MvmRole mvm : {MvmRole::Input, MvmRole::Hidden}) {
        LayerDescriptor d;
        d.id = lstm_gate_id(spec.id, t, gate, mvm);
        d.kind = LayerKind::LstmGate;
        d.rec = r;
        d.group = spec.id;
        d.timestep = t;
        d.gate = gate;
        d.mvm = mvm;
        d.bits = spec.bits;
        if (mvm == MvmRole::Input) d.predecessors = step_inputs;
        else if (t > 1) d.predecessors = {lstm_combine_id(spec.id, t - 1)};
        gate_ids.push_back(d.id);
        out.push_back(std::move(d));
      }
    }
    LayerDescriptor combine;
    combine.id = lstm_combine_id(spec.id, t);
    combine.kind = LayerKind::LstmCellCombine;
    combine.rec = r;
    combine.group = spec.id;
    combine.timestep = t;
    combine.bits = spec.bits;
    combine.predecessors = std::move(gate_ids);
    out.push_back(std::move(combine));
  }
  return out;
}

namespace {

// Appends a stack of LSTM layers; returns the id of each layer for chaining.
std::vector<std::string> append_stack(std::vector<LayerDescriptor>& layers, const std::string& prefix,
                                      const std::vector<RecurrentShape>& stack, int bits) {
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < stack.size(); ++k) {
    LstmLayerSpec spec{prefix + std::to_string(k + 1), stack[k], bits};
    std::vector<std::vector<std::string>> inputs;
    if (k > 0) {
      const RecurrentShape& prev = stack[k - 1];
      if (prev.t == spec.shape.t) {
        for (std::int64_t t = 1; t <= spec.shape.t; ++t) inputs.push_back({lstm_combine_id(ids.back(), t)});
      } else {
        inputs.push_back({lstm_combine_id(ids.back(), prev.t)});
      }
    }
    auto expanded = expand_lstm(spec, inputs);
    layers.insert(layers.end(), std::make_move_iterator(expanded.begin()),
                  std::make_move_iterator(expanded.end()));
    ids.push_back(spec.id);
  }
  return ids;
}

}  // namespace

ModelGraph build_transducer(std::string name, const std::vector<RecurrentShape>& encoder,
                            const std::vector<RecurrentShape>& prediction,
                            const std::vector<FcSpec>& joint, int bits) {
  if (encoder.empty()) throw ValidationError("transducer encoder stack is empty");
  if (prediction.empty()) throw ValidationError("transducer prediction stack is empty");
  if (joint.empty()) throw ValidationError("transducer joint network is empty");

  std::vector<LayerDescriptor> layers;
  const auto enc_ids = append_stack(layers, "enc", encoder, bits);
  const auto pred_ids = append_stack(layers, "pred", prediction, bits);

  std::vector<std::string> prev = {lstm_combine_id(enc_ids.back(), encoder.back().t),
                                   lstm_combine_id(pred_ids.back(), prediction.back().t)};
  for (std::size_t k = 0; k < joint.size(); ++k) {
    LayerDescriptor fc;
    fc.id = joint[k].id.empty() ? "joint" + std::to_string(k + 1) : joint[k].id;
    fc.kind = LayerKind::FullyConnected;
    fc.conv.ci = joint[k].ci;
    fc.conv.co = joint[k].co;
    fc.bits = joint[k].bits;
    fc.predecessors = prev;
    prev = {fc.id};
    layers.push_back(std::move(fc));
  }
  return ModelGraph::build(std::move(name), ModelClass::Transducer, std::move(layers));
}

}  // namespace hetsim::ir
