#include "hetsim/synth.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "hetsim/error.hpp"
#include "hetsim/metrics.hpp"

namespace hetsim::synth {

using families::Family;
using ir::LayerDescriptor;
using ir::LayerKind;

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next() { return engine_(); }

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(next() % span);
}

std::int64_t Rng::uniform_step(std::int64_t lo, std::int64_t hi, std::int64_t step) {
  const std::int64_t first = (lo + step - 1) / step;
  const std::int64_t last = hi / step;
  return uniform(first, std::max(first, last)) * step;
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

SyntheticSuiteSpec SyntheticSuiteSpec::defaults(std::uint64_t seed) {
  SyntheticSuiteSpec s;
  s.seed = seed;
  const std::array<int, 5> counts = {2, 4, 1, 2, 4};
  for (std::size_t i = 0; i < 5; ++i)
    s.families[i] = {counts[i], families::nominal_ranges(families::kFamilies[i])};
  return s;
}

namespace {

bool in_box(const metrics::LayerMetrics& m, const families::FamilyRanges& r, bool check_macs) {
  return r.param_bytes.contains(static_cast<double>(m.param_bytes)) && r.param_reuse.contains(m.param_reuse) &&
         (!check_macs || r.macs.contains(static_cast<double>(m.macs)));
}

LayerDescriptor conv(LayerKind kind, std::int64_t ho, std::int64_t ci, std::int64_t co, std::int64_t k) {
  LayerDescriptor d;
  d.kind = kind;
  d.conv.ci = ci;
  d.conv.co = co;
  d.conv.kh = d.conv.kw = k;
  d.conv.hi = d.conv.wi = ho + k - 1;
  d.conv.ho = d.conv.wo = ho;
  return d;
}

LayerDescriptor fc(std::int64_t ci, std::int64_t co) {
  LayerDescriptor d;
  d.kind = LayerKind::FullyConnected;
  d.conv.ci = ci;
  d.conv.co = co;
  return d;
}

// One shape proposal for a family; acceptance is decided by the caller.
LayerDescriptor propose(Family f, Rng& rng) {
  switch (f) {
    case Family::F1:
      return conv(LayerKind::StandardConv, rng.uniform(56, 128), rng.uniform_step(8, 64, 8),
                  rng.uniform_step(8, 64, 8), 3);
    case Family::F2:
      if (rng.uniform(0, 1) == 0)
        return conv(LayerKind::PointwiseConv, rng.uniform(10, 20), rng.uniform_step(256, 768, 64),
                    rng.uniform_step(256, 768, 64), 1);
      return conv(LayerKind::StandardConv, rng.uniform(10, 20), rng.uniform_step(96, 224, 16),
                  rng.uniform_step(96, 224, 16), 3);
    case Family::F3:
      return fc(rng.uniform_step(1024, 2048, 64), rng.uniform(960, 1024));
    case Family::F4:
      if (rng.uniform(0, 1) == 0) {
        const std::int64_t c = rng.uniform_step(192, 320, 32);
        return conv(LayerKind::StandardConv, rng.uniform(5, 7), c, c, 3);
      }
      return conv(LayerKind::PointwiseConv, rng.uniform(5, 7), rng.uniform_step(768, 1280, 128),
                  rng.uniform_step(448, 640, 64), 1);
    case Family::F5: {
      const std::int64_t c = rng.uniform_step(128, 1024, 32);
      return conv(LayerKind::DepthwiseConv, rng.uniform(14, 24), c, c, 3);
    }
    case Family::Unclassified: break;
  }
  throw GenerationError("no layer template for Unclassified");
}

class Generator {
 public:
  explicit Generator(const SyntheticSuiteSpec& spec) : spec_(spec), rng_(spec.seed) { check_spec(); }

  std::vector<ir::ModelGraph> run() {
    std::vector<ir::ModelGraph> out;
    for (int i = 1; i <= spec_.cnn_models; ++i) out.push_back(cnn("cnn" + std::to_string(i)));
    for (int i = 1; i <= spec_.lstm_models; ++i) out.push_back(lstm("lstm" + std::to_string(i)));
    for (int i = 1; i <= spec_.transducer_models; ++i) out.push_back(transducer("transducer" + std::to_string(i)));
    for (int i = 1; i <= spec_.rcnn_models; ++i) out.push_back(rcnn("rcnn" + std::to_string(i)));
    return out;
  }

 private:
  void check_spec() const {
    for (int n : {spec_.cnn_models, spec_.lstm_models, spec_.transducer_models, spec_.rcnn_models})
      if (n < 0) throw GenerationError("model counts must be >= 0");
    for (const auto& f : spec_.families) {
      if (f.count < 0) throw GenerationError("family layer counts must be >= 0");
      for (const auto& r : {f.ranges.param_bytes, f.ranges.param_reuse, f.ranges.macs})
        if (!(r.lo <= r.hi)) throw GenerationError("family range with lo > hi");
    }
    for (const auto& r : {spec_.lstm_hidden, spec_.lstm_timesteps, spec_.lstm_depth})
      if (r.lo < 1 || r.lo > r.hi) throw GenerationError("LSTM ranges must satisfy 1 <= lo <= hi");
    if (spec_.max_attempts < 1) throw GenerationError("max_attempts must be >= 1");
  }

  const FamilySampling& sampling(Family f) const { return spec_.families[static_cast<std::size_t>(f)]; }

  LayerDescriptor sample(Family f, std::string id, std::vector<std::string> preds) {
    const auto& box = sampling(f).ranges;
    for (int attempt = 0; attempt < spec_.max_attempts; ++attempt) {
      LayerDescriptor d = propose(f, rng_);
      const auto m = metrics::layer_metrics(d);
      if (!in_box(m, box, true) || families::classify(m, d.kind) != f) continue;
      d.id = std::move(id);
      d.predecessors = std::move(preds);
      return d;
    }
    throw GenerationError("could not sample a " + std::string(families::to_string(f)) + " layer within " +
                          std::to_string(spec_.max_attempts) + " attempts");
  }

  ir::RecurrentShape sample_lstm(std::int64_t d) {
    const auto& box = sampling(Family::F3).ranges;
    for (int attempt = 0; attempt < spec_.max_attempts; ++attempt) {
      ir::RecurrentShape r;
      r.h = rng_.uniform_step(spec_.lstm_hidden.lo, spec_.lstm_hidden.hi, 256);
      r.d = d > 0 ? d : r.h;
      r.t = rng_.uniform(spec_.lstm_timesteps);
      r.c = 1;
      // Both MVMs of a gate have to land in the F3 box.
      bool ok = true;
      for (auto mvm : {ir::MvmRole::Input, ir::MvmRole::Hidden}) {
        LayerDescriptor g;
        g.kind = LayerKind::LstmGate;
        g.rec = r;
        g.mvm = mvm;
        ok = ok && in_box(metrics::layer_metrics(g), box, false);
      }
      if (ok) return r;
    }
    throw GenerationError("could not sample an LSTM layer inside the F3 footprint range");
  }

  // Stem + F1 + (F5 depthwise, F2 pointwise) blocks + F4 + F3 head. Returns
  // the layers and the id of the last feature layer before the head.
  std::vector<LayerDescriptor> cnn_body(const std::string& prefix, bool with_head) {
    std::vector<LayerDescriptor> layers;
    int n = 0;
    auto next_id = [&](const char* tag) { return prefix + tag + std::to_string(++n); };
    auto last = [&]() { return std::vector<std::string>{layers.back().id}; };

    LayerDescriptor stem = conv(LayerKind::StandardConv, 112, 3, 32, 3);
    stem.id = next_id("conv");
    layers.push_back(stem);
    for (int i = 0; i < sampling(Family::F1).count; ++i) layers.push_back(sample(Family::F1, next_id("conv"), last()));

    const int dw = sampling(Family::F5).count;
    const int pw = sampling(Family::F2).count;
    std::string prev_block_out;
    for (int i = 0; i < std::max(dw, pw); ++i) {
      if (i < dw) layers.push_back(sample(Family::F5, next_id("dw"), last()));
      if (i < pw) {
        auto preds = last();
        // Residual connection from the previous block's output.
        if (!prev_block_out.empty() && prev_block_out != preds.front()) preds.push_back(prev_block_out);
        layers.push_back(sample(Family::F2, next_id("pw"), preds));
        prev_block_out = layers.back().id;
      }
    }
    for (int i = 0; i < sampling(Family::F4).count; ++i) layers.push_back(sample(Family::F4, next_id("conv"), last()));
    if (with_head)
      for (int i = 0; i < sampling(Family::F3).count; ++i) layers.push_back(sample(Family::F3, next_id("fc"), last()));
    return layers;
  }

  bool diverse(const std::vector<LayerDescriptor>& layers) const {
    std::uint64_t mac_lo = UINT64_MAX, mac_hi = 0, fp_lo = UINT64_MAX, fp_hi = 0;
    for (const auto& l : layers) {
      const auto m = metrics::layer_metrics(l);
      if (m.param_bytes == 0) continue;
      mac_lo = std::min(mac_lo, m.macs);
      mac_hi = std::max(mac_hi, m.macs);
      fp_lo = std::min(fp_lo, m.param_bytes);
      fp_hi = std::max(fp_hi, m.param_bytes);
    }
    if (mac_hi == 0) return spec_.min_mac_spread <= 1 && spec_.min_footprint_spread <= 1;
    return static_cast<double>(mac_hi) >= spec_.min_mac_spread * static_cast<double>(mac_lo) &&
           static_cast<double>(fp_hi) >= spec_.min_footprint_spread * static_cast<double>(fp_lo);
  }

  ir::ModelGraph cnn(const std::string& name) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      auto layers = cnn_body("", true);
      if (diverse(layers)) return ir::ModelGraph::build(name, ir::ModelClass::CNN, std::move(layers));
    }
    throw GenerationError("CNN '" + name + "' never reached the requested MAC/footprint spread");
  }

  // Appends a stack of LSTM layers fed by `input` (may be empty).
  void lstm_stack(std::vector<LayerDescriptor>& layers, const std::string& prefix, std::string input,
                  std::int64_t input_dim, int depth) {
    std::string prev = std::move(input);
    std::int64_t prev_t = 0;
    std::int64_t d = input_dim;
    for (int k = 1; k <= depth; ++k) {
      ir::LstmLayerSpec spec{prefix + std::to_string(k), sample_lstm(d), 8};
      if (prev_t > 0) spec.shape.t = prev_t;
      std::vector<std::vector<std::string>> inputs;
      if (prev_t > 0) {
        for (std::int64_t t = 1; t <= spec.shape.t; ++t) inputs.push_back({ir::lstm_combine_id(prev, t)});
      } else if (!prev.empty()) {
        inputs.push_back({prev});
      }
      auto expanded = ir::expand_lstm(spec, inputs);
      layers.insert(layers.end(), expanded.begin(), expanded.end());
      prev = spec.id;
      prev_t = spec.shape.t;
      d = spec.shape.h;
    }
  }

  std::vector<LayerDescriptor> head(const std::string& input, const std::string& prefix) {
    std::vector<LayerDescriptor> out;
    std::vector<std::string> preds = {input};
    for (int i = 0; i < std::max(1, sampling(Family::F3).count); ++i) {
      out.push_back(sample(Family::F3, prefix + std::to_string(i + 1), preds));
      preds = {out.back().id};
    }
    return out;
  }

  ir::ModelGraph lstm(const std::string& name) {
    std::vector<LayerDescriptor> layers;
    const int depth = static_cast<int>(rng_.uniform(spec_.lstm_depth));
    lstm_stack(layers, "lstm", "", 0, depth);
    const auto& last = layers.back();
    auto h = head(ir::lstm_combine_id(last.group, last.rec.t), "fc");
    layers.insert(layers.end(), h.begin(), h.end());
    return ir::ModelGraph::build(name, ir::ModelClass::LSTM, std::move(layers));
  }

  ir::ModelGraph transducer(const std::string& name) {
    std::vector<ir::RecurrentShape> enc, pred;
    const int enc_depth = static_cast<int>(rng_.uniform(spec_.lstm_depth)) + 1;
    std::int64_t d = 0;
    for (int k = 0; k < enc_depth; ++k) {
      enc.push_back(sample_lstm(d));
      if (k > 0) enc.back().t = enc.front().t;
      d = enc.back().h;
    }
    pred.push_back(sample_lstm(0));
    pred.back().t = std::max<std::int64_t>(1, pred.back().t / 3);
    std::vector<ir::FcSpec> joint;
    for (int i = 0; i < std::max(1, sampling(Family::F3).count) + 1; ++i) {
      const auto l = sample(Family::F3, "", {});
      joint.push_back({"joint" + std::to_string(i + 1), l.conv.ci, l.conv.co, 8});
    }
    return ir::build_transducer(name, enc, pred, joint);
  }

  ir::ModelGraph rcnn(const std::string& name) {
    auto layers = cnn_body("", false);
    const std::string features = layers.back().id;
    lstm_stack(layers, "lstm", features, 0, 1);
    const auto& last = layers.back();
    auto h = head(ir::lstm_combine_id(last.group, last.rec.t), "fc");
    layers.insert(layers.end(), h.begin(), h.end());
    return ir::ModelGraph::build(name, ir::ModelClass::RCNN, std::move(layers));
  }

  const SyntheticSuiteSpec& spec_;
  Rng rng_;
};

}  // namespace

std::vector<ir::ModelGraph> generate_suite(const SyntheticSuiteSpec& spec) { return Generator(spec).run(); }

}  // namespace hetsim::synth
