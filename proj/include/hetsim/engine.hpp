#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetsim/cost.hpp"
#include "hetsim/energy.hpp"
#include "hetsim/hardware.hpp"
#include "hetsim/ir.hpp"
#include "hetsim/metrics.hpp"
#include "hetsim/scheduler.hpp"

namespace hetsim::engine {

struct SimOptions {
  cost::EstimateOptions cost;
  energy::EnergyOptions energy;
  sched::SchedulerOptions scheduler;
  // Charge static power of accelerators while they sit idle. Off by default.
  bool idle_leakage = false;
};

struct LayerRow {
  std::string layer_id;
  ir::LayerKind kind = ir::LayerKind::StandardConv;
  std::string accelerator;
  sched::Reason reason = sched::Reason::IdealSame;
  metrics::LayerMetrics metrics;
  cost::CostEstimate cost;
  energy::EnergyBreakdown energy;
};

struct CommRow {
  sched::CommEvent event;
  double latency_s = 0.0;
  double energy_j = 0.0;
};

struct AcceleratorTotals {
  std::string name;
  std::size_t layers = 0;
  std::uint64_t macs = 0;
  double latency_s = 0.0;
  energy::EnergyBreakdown energy;
};

struct SimReport {
  std::string model;
  std::vector<LayerRow> layers;
  std::vector<CommRow> comms;
  std::vector<AcceleratorTotals> per_accelerator;

  std::uint64_t total_macs = 0;
  double layer_latency_s = 0.0;
  double comm_latency_s = 0.0;
  double latency_s = 0.0;
  double comm_energy_j = 0.0;
  // Layer energies plus communication (booked under dram) plus idle leakage.
  energy::EnergyBreakdown energy;
  // MAC-weighted over layers.
  double mean_utilization = 0.0;
  double throughput_macs_per_s = 0.0;

  double energy_efficiency_macs_per_j() const;
};

// Latency/energy of moving one activation tensor through DRAM.
double comm_latency(const sched::CommEvent& e, const hw::HardwareSuite& suite);
double comm_energy(const sched::CommEvent& e, const hw::HardwareSuite& suite);

SimReport simulate(const ir::ModelGraph& model, const sched::SchedulePlan& plan, const hw::HardwareSuite& suite,
                   const SimOptions& opts = {});

// Schedules on the scenario's accelerators and simulates.
SimReport run_scenario(const ir::ModelGraph& model, const hw::HardwareSuite& suite, const hw::Scenario& scenario,
                       const SimOptions& opts = {});

struct ComparisonRow {
  std::string scenario;
  std::uint64_t macs = 0;
  double latency_s = 0.0;
  double energy_j = 0.0;
  double throughput_macs_per_s = 0.0;
  double efficiency_macs_per_j = 0.0;
  // Relative to the baseline: efficiency and throughput as speedups
  // (higher is better), latency as a normalized value (lower is better).
  double energy_efficiency_x = 1.0;
  double throughput_x = 1.0;
  double latency_x = 1.0;
};

struct Comparison {
  std::string model;
  std::string baseline;
  std::vector<ComparisonRow> rows;
};

Comparison compare_suites(const ir::ModelGraph& model, const hw::HardwareSuite& suite,
                          const std::vector<std::string>& scenarios, const std::string& baseline,
                          const SimOptions& opts = {});

// Aggregate over many models: totals per scenario (sum of MACs over sum of
// latency / energy), plus geometric means of the per-model ratios.
struct SuiteComparisonRow {
  ComparisonRow totals;
  double geomean_energy_efficiency_x = 1.0;
  double geomean_throughput_x = 1.0;
};

struct SuiteComparison {
  std::string baseline;
  std::vector<Comparison> per_model;
  std::vector<SuiteComparisonRow> rows;
};

SuiteComparison compare_suites(const std::vector<ir::ModelGraph>& models, const hw::HardwareSuite& suite,
                               const std::vector<std::string>& scenarios, const std::string& baseline,
                               const SimOptions& opts = {});

}  // namespace hetsim::engine
