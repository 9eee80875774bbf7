#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hetsim/cost.hpp"
#include "hetsim/families.hpp"
#include "hetsim/hardware.hpp"
#include "hetsim/ir.hpp"
#include "hetsim/metrics.hpp"

namespace hetsim::sched {

using hw::FamilyRouting;

enum class Reason {
  // Ideal accelerator is where the previous layer ran; nothing to decide.
  IdealSame,
  // Previous accelerator would be at least 2x slower in compute.
  MovedCondA,
  // Fetching the weights on the previous accelerator moves more bytes than
  // shipping the previous layer's output, and the layer has low reuse.
  MovedCondB,
  StayedWithPrev,
};

std::string_view to_string(Reason r);

struct Assignment {
  std::string layer_id;
  // Strict classification; Unclassified layers are routed via nearest family.
  families::Family family = families::Family::Unclassified;
  bool nearest_routed = false;
  std::string ideal;
  std::string destination;
  Reason reason = Reason::IdealSame;
};

// Activations that travel through DRAM between two layers.
struct CommEvent {
  std::string producer;
  std::string consumer;
  std::string from_accelerator;
  std::string to_accelerator;
  std::uint64_t bytes = 0;
  bool via_dram = true;
  // Same accelerator, but the skip-connection source was evicted from the
  // activation buffer before the consumer ran.
  bool reload = false;
};

struct SchedulePlan {
  std::vector<Assignment> assignments;
  std::vector<CommEvent> events;
};

struct SchedulerOptions {
  // condA: previous accelerator's compute-bound time over the ideal's.
  double compute_ratio = 2.0;
  // condB reuse ceiling, MAC/byte (64 FLOP/byte).
  double reuse_threshold_macs_per_byte = 32.0;
  cost::EstimateOptions cost;
};

// Checks that every family F1..F5 is routed; ConfigError otherwise.
void check_routing(const FamilyRouting& routing);

// Ideal accelerator per layer, in model order. Destination and reason are
// left for phase2. Parameter-free stages inherit the previous layer's ideal.
std::vector<Assignment> phase1(const ir::ModelGraph& model, const metrics::ModelMetrics& m,
                               const FamilyRouting& routing);

SchedulePlan phase2(const ir::ModelGraph& model, const metrics::ModelMetrics& m, std::vector<Assignment> ideal,
                    const hw::HardwareSuite& suite, const SchedulerOptions& opts = {});

SchedulePlan schedule(const ir::ModelGraph& model, const hw::HardwareSuite& suite, const FamilyRouting& routing,
                      const SchedulerOptions& opts = {});

// Communication events implied by a set of destinations (one per layer).
std::vector<CommEvent> communication_events(const ir::ModelGraph& model, const metrics::ModelMetrics& m,
                                            const std::vector<std::string>& destinations,
                                            const hw::HardwareSuite& suite);

}  // namespace hetsim::sched
