#include "hetsim/scheduler.hpp"

#include <deque>
#include <map>
#include <set>

#include "hetsim/error.hpp"

namespace hetsim::sched {

using families::Family;

std::string_view to_string(Reason r) {
  switch (r) {
    case Reason::IdealSame: return "IdealSame";
    case Reason::MovedCondA: return "MovedCondA";
    case Reason::MovedCondB: return "MovedCondB";
    case Reason::StayedWithPrev: return "StayedWithPrev";
  }
  return "?";
}

void check_routing(const FamilyRouting& routing) {
  for (Family f : families::kFamilies) {
    auto it = routing.find(f);
    if (it == routing.end() || it->second.empty())
      throw ConfigError("routing has no accelerator for " + std::string(families::to_string(f)));
  }
}

std::vector<Assignment> phase1(const ir::ModelGraph& model, const metrics::ModelMetrics& m,
                               const FamilyRouting& routing) {
  check_routing(routing);
  std::vector<Assignment> out;
  out.reserve(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& layer = model.layer(i);
    const auto& lm = m.per_layer.at(i);
    Assignment a;
    a.layer_id = layer.id;
    a.family = families::classify(lm, layer.kind);
    if (auto f = families::routing_family(lm, layer.kind)) {
      a.nearest_routed = a.family == Family::Unclassified;
      a.ideal = routing.at(*f);
    } else {
      a.ideal = out.empty() ? routing.at(Family::F1) : out.back().ideal;
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<CommEvent> communication_events(const ir::ModelGraph& model, const metrics::ModelMetrics& m,
                                            const std::vector<std::string>& dest, const hw::HardwareSuite& suite) {
  std::vector<CommEvent> events;
  std::set<std::pair<std::size_t, std::string>> delivered;

  // FIFO of (producer, bytes) resident in each accelerator's activation buffer.
  struct Fifo {
    std::deque<std::pair<std::size_t, std::uint64_t>> entries;
    std::uint64_t used = 0;
  };
  std::map<std::string, Fifo> buffers;

  auto resident = [&](const std::string& accel, std::size_t producer) {
    for (const auto& [p, bytes] : buffers[accel].entries)
      if (p == producer) return true;
    return false;
  };

  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& layer = model.layer(i);
    for (std::size_t p : model.predecessor_indices(i)) {
      const auto& prod = model.layer(p);
      const bool crosses = dest[p] != dest[i];
      const bool skip = p + 1 != i && !ir::is_lstm_stage(prod.kind) && !ir::is_lstm_stage(layer.kind);
      // A skip source is only re-read when execution left the accelerator in
      // between; within one accelerator its own dataflow handles the reuse.
      bool left = false;
      for (std::size_t k = p + 1; k < i && !left; ++k) left = dest[k] != dest[i];
      const bool evicted = !crosses && skip && left && !resident(dest[i], p);
      if (!crosses && !evicted) continue;
      if (!delivered.emplace(p, dest[i]).second) continue;
      CommEvent e;
      e.producer = prod.id;
      e.consumer = layer.id;
      e.from_accelerator = dest[p];
      e.to_accelerator = dest[i];
      e.bytes = m.per_layer.at(p).output_act_bytes;
      e.reload = !crosses;
      events.push_back(std::move(e));
    }

    const auto& accel = suite.at(dest[i]);
    Fifo& fifo = buffers[dest[i]];
    fifo.entries.emplace_back(i, m.per_layer.at(i).output_act_bytes);
    fifo.used += m.per_layer.at(i).output_act_bytes;
    while (!fifo.entries.empty() && fifo.used > accel.act_buffer_bytes) {
      fifo.used -= fifo.entries.front().second;
      fifo.entries.pop_front();
    }
  }
  return events;
}

SchedulePlan phase2(const ir::ModelGraph& model, const metrics::ModelMetrics& m, std::vector<Assignment> ideal,
                    const hw::HardwareSuite& suite, const SchedulerOptions& opts) {
  if (ideal.size() != model.size()) throw ConfigError("phase-1 assignment does not cover the model");
  for (const auto& a : ideal) suite.at(a.ideal);

  SchedulePlan plan;
  plan.assignments = std::move(ideal);
  std::vector<std::string> dest;
  dest.reserve(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    Assignment& a = plan.assignments[i];
    if (i == 0 || a.ideal == dest.back()) {
      a.destination = a.ideal;
      a.reason = Reason::IdealSame;
      dest.push_back(a.destination);
      continue;
    }
    const auto& layer = model.layer(i);
    const auto& lm = m.per_layer[i];
    const auto& prev = suite.at(dest.back());
    const auto& target = suite.at(a.ideal);

    const double t_prev = cost::compute_bound_time(layer, lm, prev);
    const double t_ideal = cost::compute_bound_time(layer, lm, target);
    const bool cond_a = t_prev > 0 && t_prev >= opts.compute_ratio * t_ideal;

    const auto on_prev = cost::estimate(layer, lm, prev, opts.cost);
    const bool cond_b = on_prev.dram_param_bytes > m.per_layer[i - 1].output_act_bytes &&
                        lm.param_reuse < opts.reuse_threshold_macs_per_byte;

    if (cond_a) {
      a.destination = a.ideal;
      a.reason = Reason::MovedCondA;
    } else if (cond_b) {
      a.destination = a.ideal;
      a.reason = Reason::MovedCondB;
    } else {
      a.destination = dest.back();
      a.reason = Reason::StayedWithPrev;
    }
    dest.push_back(a.destination);
  }
  plan.events = communication_events(model, m, dest, suite);
  return plan;
}

SchedulePlan schedule(const ir::ModelGraph& model, const hw::HardwareSuite& suite, const FamilyRouting& routing,
                      const SchedulerOptions& opts) {
  const auto m = metrics::model_metrics(model);
  return phase2(model, m, phase1(model, m, routing), suite, opts);
}

}  // namespace hetsim::sched
