#include "hetsim/model_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "hetsim/error.hpp"
#include "json.hpp"

namespace hetsim::ir {

using nlohmann::json;

namespace {

std::string where(std::size_t index, const json& layer) {
  std::string s = "layers[" + std::to_string(index) + "]";
  if (layer.is_object() && layer.contains("id") && layer["id"].is_string())
    s += " ('" + layer["id"].get<std::string>() + "')";
  return s;
}

std::int64_t get_int(const json& obj, const char* field, const std::string& ctx, std::int64_t fallback,
                     bool required) {
  if (!obj.contains(field)) {
    if (required) throw ParseError(ctx + ": missing field '" + field + "'");
    return fallback;
  }
  const json& v = obj[field];
  if (!v.is_number_integer()) throw ParseError(ctx + ": field '" + field + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& obj, const char* field, const std::string& ctx) {
  if (!obj.contains(field)) throw ParseError(ctx + ": missing field '" + field + "'");
  if (!obj[field].is_string()) throw ParseError(ctx + ": field '" + field + "' must be a string");
  return obj[field].get<std::string>();
}

std::vector<std::string> get_predecessors(const json& obj, const std::string& ctx) {
  std::vector<std::string> out;
  if (!obj.contains("predecessors")) return out;
  const json& p = obj["predecessors"];
  if (!p.is_array()) throw ParseError(ctx + ": field 'predecessors' must be an array of ids");
  for (const auto& e : p) {
    if (!e.is_string()) throw ParseError(ctx + ": field 'predecessors' must be an array of ids");
    out.push_back(e.get<std::string>());
  }
  return out;
}

ConvShape parse_conv(const json& l, LayerKind kind, const std::string& ctx) {
  ConvShape s;
  s.ci = get_int(l, "ci", ctx, 0, true);
  if (kind == LayerKind::FullyConnected) {
    s.co = get_int(l, "co", ctx, 0, true);
    return s;
  }
  s.hi = get_int(l, "hi", ctx, 0, true);
  s.wi = get_int(l, "wi", ctx, s.hi, false);
  s.co = get_int(l, "co", ctx, s.ci, kind != LayerKind::DepthwiseConv);
  const std::int64_t default_k = kind == LayerKind::PointwiseConv ? 1 : 0;
  s.kh = get_int(l, "kh", ctx, default_k, kind != LayerKind::PointwiseConv);
  s.kw = get_int(l, "kw", ctx, s.kh, false);
  s.stride = get_int(l, "stride", ctx, 1, false);
  s.ho = get_int(l, "ho", ctx, conv_output_dim(s.hi, s.kh, s.stride), false);
  s.wo = get_int(l, "wo", ctx, conv_output_dim(s.wi, s.kw, s.stride), false);
  return s;
}

RecurrentShape parse_recurrent(const json& l, const std::string& ctx) {
  RecurrentShape r;
  r.d = get_int(l, "d", ctx, 0, true);
  r.h = get_int(l, "h", ctx, 0, true);
  r.t = get_int(l, "t", ctx, 1, false);
  r.c = get_int(l, "c", ctx, 1, false);
  return r;
}

}  // namespace

ModelGraph load_model(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("model document must be a JSON object");
  const std::string name = get_string(doc, "name", "model");
  const std::string cls_text = get_string(doc, "class", "model");
  const auto cls = parse_model_class(cls_text);
  if (!cls) throw ParseError("model: field 'class' has unknown value '" + cls_text + "'");
  if (!doc.contains("layers") || !doc["layers"].is_array())
    throw ParseError("model: field 'layers' must be an array");

  // First pass: remember every un-expanded LSTM layer so references to it can
  // be redirected to its combine stages.
  std::unordered_map<std::string, std::int64_t> lstm_steps;
  for (std::size_t i = 0; i < doc["layers"].size(); ++i) {
    const json& l = doc["layers"][i];
    if (!l.is_object()) throw ParseError(where(i, l) + ": layer must be an object");
    if (l.contains("kind") && l["kind"] == "LstmLayer") {
      const std::string ctx = where(i, l);
      lstm_steps[get_string(l, "id", ctx)] = get_int(l, "t", ctx, 1, false);
    }
  }
  auto last_combine = [&](const std::string& id) {
    auto it = lstm_steps.find(id);
    return it == lstm_steps.end() ? id : lstm_combine_id(id, it->second);
  };

  std::vector<LayerDescriptor> layers;
  for (std::size_t i = 0; i < doc["layers"].size(); ++i) {
    const json& l = doc["layers"][i];
    const std::string ctx = where(i, l);
    const std::string id = get_string(l, "id", ctx);
    const std::string kind_text = get_string(l, "kind", ctx);
    const int bits = static_cast<int>(get_int(l, "bits", ctx, 8, false));
    auto preds = get_predecessors(l, ctx);

    if (kind_text == "LstmLayer") {
      LstmLayerSpec spec{id, parse_recurrent(l, ctx), bits};
      std::vector<std::vector<std::string>> per_step(static_cast<std::size_t>(std::max<std::int64_t>(spec.shape.t, 0)));
      for (std::int64_t t = 1; t <= spec.shape.t; ++t) {
        for (const auto& p : preds) {
          auto it = lstm_steps.find(p);
          if (it == lstm_steps.end()) per_step[static_cast<std::size_t>(t - 1)].push_back(p);
          else if (it->second == spec.shape.t) per_step[static_cast<std::size_t>(t - 1)].push_back(lstm_combine_id(p, t));
          else per_step[static_cast<std::size_t>(t - 1)].push_back(lstm_combine_id(p, it->second));
        }
      }
      auto expanded = expand_lstm(spec, per_step);
      layers.insert(layers.end(), std::make_move_iterator(expanded.begin()),
                    std::make_move_iterator(expanded.end()));
      continue;
    }

    const auto kind = parse_layer_kind(kind_text);
    if (!kind) throw ParseError(ctx + ": field 'kind' has unknown value '" + kind_text + "'");
    LayerDescriptor d;
    d.id = id;
    d.kind = *kind;
    d.bits = bits;
    for (auto& p : preds) d.predecessors.push_back(last_combine(p));
    if (is_conv_like(*kind)) {
      d.conv = parse_conv(l, *kind, ctx);
    } else {
      d.rec = parse_recurrent(l, ctx);
      d.group = get_string(l, "group", ctx);
      d.timestep = get_int(l, "timestep", ctx, 0, true);
      if (*kind == LayerKind::LstmGate) {
        const std::string g = get_string(l, "gate", ctx);
        const std::string m = get_string(l, "mvm", ctx);
        d.gate = parse_gate_role(g);
        d.mvm = parse_mvm_role(m);
        if (!d.gate) throw ParseError(ctx + ": field 'gate' has unknown value '" + g + "'");
        if (!d.mvm) throw ParseError(ctx + ": field 'mvm' has unknown value '" + m + "'");
      }
    }
    layers.push_back(std::move(d));
  }
  return ModelGraph::build(name, *cls, std::move(layers));
}

ModelGraph load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str());
}

std::string serialize_model(const ModelGraph& graph, int indent) {
  nlohmann::ordered_json doc;
  doc["name"] = graph.name();
  doc["class"] = std::string(to_string(graph.model_class()));
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (const auto& l : graph.layers()) {
    nlohmann::ordered_json j;
    j["id"] = l.id;
    j["kind"] = std::string(to_string(l.kind));
    if (is_conv_like(l.kind)) {
      j["ci"] = l.conv.ci;
      j["co"] = l.conv.co;
      if (l.kind != LayerKind::FullyConnected) {
        j["hi"] = l.conv.hi;
        j["wi"] = l.conv.wi;
        j["kh"] = l.conv.kh;
        j["kw"] = l.conv.kw;
        j["stride"] = l.conv.stride;
        j["ho"] = l.conv.ho;
        j["wo"] = l.conv.wo;
      }
    } else {
      j["d"] = l.rec.d;
      j["h"] = l.rec.h;
      j["t"] = l.rec.t;
      j["c"] = l.rec.c;
      j["group"] = l.group;
      j["timestep"] = l.timestep;
      if (l.gate) j["gate"] = std::string(to_string(*l.gate));
      if (l.mvm) j["mvm"] = std::string(to_string(*l.mvm));
    }
    j["bits"] = l.bits;
    j["predecessors"] = l.predecessors;
    layers.push_back(std::move(j));
  }
  doc["layers"] = std::move(layers);
  return doc.dump(indent) + "\n";
}

}  // namespace hetsim::ir
