#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hetsim::ir {

enum class LayerKind {
  StandardConv,
  DepthwiseConv,
  PointwiseConv,
  FullyConnected,
  LstmGate,
  LstmCellCombine,
};

enum class GateRole { Input, Modulation, Forget, Output };

// Input-MVM multiplies W_x with x_t, hidden-MVM multiplies W_h with h_{t-1}.
enum class MvmRole { Input, Hidden };

enum class ModelClass { CNN, LSTM, Transducer, RCNN };

std::string_view to_string(LayerKind kind);
std::string_view to_string(GateRole role);
std::string_view to_string(MvmRole role);
std::string_view to_string(ModelClass cls);

std::optional<LayerKind> parse_layer_kind(std::string_view text);
std::optional<GateRole> parse_gate_role(std::string_view text);
std::optional<MvmRole> parse_mvm_role(std::string_view text);
std::optional<ModelClass> parse_model_class(std::string_view text);

bool is_lstm_stage(LayerKind kind);
bool is_conv_like(LayerKind kind);

inline constexpr std::array<GateRole, 4> kGateOrder = {GateRole::Input, GateRole::Modulation,
                                                       GateRole::Forget, GateRole::Output};

// Effective (padding already applied) spatial shape. FC layers use
// hi = wi = ho = wo = kh = kw = 1.
struct ConvShape {
  std::int64_t hi = 1;
  std::int64_t wi = 1;
  std::int64_t ci = 1;
  std::int64_t co = 1;
  std::int64_t kh = 1;
  std::int64_t kw = 1;
  std::int64_t stride = 1;
  std::int64_t ho = 1;
  std::int64_t wo = 1;

  bool operator==(const ConvShape&) const = default;
};

// d: input dim, h: hidden dim, t: timesteps, c: cell multiplicity.
struct RecurrentShape {
  std::int64_t d = 1;
  std::int64_t h = 1;
  std::int64_t t = 1;
  std::int64_t c = 1;

  bool operator==(const RecurrentShape&) const = default;
};

struct LayerDescriptor {
  std::string id;
  LayerKind kind = LayerKind::StandardConv;
  ConvShape conv;
  RecurrentShape rec;
  // LSTM stages only: the un-expanded layer they came from and the 1-based
  // timestep. Gate descriptors also carry their roles.
  std::string group;
  std::int64_t timestep = 0;
  std::optional<GateRole> gate;
  std::optional<MvmRole> mvm;
  int bits = 8;
  std::vector<std::string> predecessors;

  bool operator==(const LayerDescriptor&) const = default;
};

// Validated, immutable NN graph. Layers are stored in a topological order
// (stable with respect to the order they were supplied in).
class ModelGraph {
 public:
  ModelGraph() = default;

  // Validates every descriptor, resolves edges and establishes topological
  // order. Throws ValidationError / StructuralError.
  static ModelGraph build(std::string name, ModelClass cls, std::vector<LayerDescriptor> layers);

  const std::string& name() const { return name_; }
  ModelClass model_class() const { return class_; }
  std::span<const LayerDescriptor> layers() const { return layers_; }
  std::size_t size() const { return layers_.size(); }
  bool empty() const { return layers_.empty(); }
  const LayerDescriptor& layer(std::size_t index) const { return layers_.at(index); }

  std::optional<std::size_t> index_of(std::string_view id) const;
  // Positions of the layer's predecessors, in declaration order.
  const std::vector<std::size_t>& predecessor_indices(std::size_t index) const {
    return preds_.at(index);
  }

  bool operator==(const ModelGraph& other) const {
    return name_ == other.name_ && class_ == other.class_ && layers_ == other.layers_;
  }

 private:
  std::string name_;
  ModelClass class_ = ModelClass::CNN;
  std::vector<LayerDescriptor> layers_;
  std::vector<std::vector<std::size_t>> preds_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Throws ValidationError if a single descriptor is inconsistent.
void validate_descriptor(const LayerDescriptor& layer);

// Output dim of a valid convolution along one axis.
std::int64_t conv_output_dim(std::int64_t input, std::int64_t kernel, std::int64_t stride);

// Un-expanded LSTM layer, as written in model documents.
struct LstmLayerSpec {
  std::string id;
  RecurrentShape shape;
  int bits = 8;
};

// Expands one LSTM layer into 9 descriptors per timestep: 4 gates x
// {input-MVM, hidden-MVM} followed by the cell combine stage.
//
// inputs_per_step[t-1] lists the predecessors of timestep t's input-MVMs; a
// single entry is shared by every timestep, an empty vector means none.
std::vector<LayerDescriptor> expand_lstm(const LstmLayerSpec& spec,
                                         const std::vector<std::vector<std::string>>& inputs_per_step);

std::string lstm_gate_id(std::string_view group, std::int64_t t, GateRole gate, MvmRole mvm);
std::string lstm_combine_id(std::string_view group, std::int64_t t);

struct FcSpec {
  std::string id;
  std::int64_t ci = 1;
  std::int64_t co = 1;
  int bits = 8;
};

// Encoder + prediction network + joint. Each stack is a non-empty list of
// LSTM layers; the first joint layer consumes the last step of both stacks.
ModelGraph build_transducer(std::string name, const std::vector<RecurrentShape>& encoder,
                            const std::vector<RecurrentShape>& prediction,
                            const std::vector<FcSpec>& joint, int bits = 8);

}  // namespace hetsim::ir
