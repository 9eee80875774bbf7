#include "hetsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hetsim/error.hpp"

namespace hetsim::engine {

namespace {

ComparisonRow totals_row(const std::string& name, std::uint64_t macs, double latency, double energy) {
  ComparisonRow r;
  r.scenario = name;
  r.macs = macs;
  r.latency_s = latency;
  r.energy_j = energy;
  r.throughput_macs_per_s = latency > 0 ? static_cast<double>(macs) / latency : 0.0;
  r.efficiency_macs_per_j = energy > 0 ? static_cast<double>(macs) / energy : 0.0;
  return r;
}

void normalize(std::vector<ComparisonRow>& rows, const ComparisonRow& base) {
  for (auto& r : rows) {
    r.energy_efficiency_x = r.energy_j > 0 ? base.energy_j / r.energy_j : 0.0;
    r.throughput_x = r.latency_s > 0 ? base.latency_s / r.latency_s : 0.0;
    r.latency_x = base.latency_s > 0 ? r.latency_s / base.latency_s : 0.0;
  }
}

void require_baseline(const std::vector<std::string>& scenarios, const std::string& baseline) {
  if (std::find(scenarios.begin(), scenarios.end(), baseline) == scenarios.end())
    throw ConfigError("baseline scenario '" + baseline + "' is not among the compared scenarios");
}

}  // namespace

double SimReport::energy_efficiency_macs_per_j() const {
  return energy.total > 0 ? static_cast<double>(total_macs) / energy.total : 0.0;
}

double comm_latency(const sched::CommEvent& e, const hw::HardwareSuite& suite) {
  const double bytes = static_cast<double>(e.bytes);
  // Written out over the external interface, read back at the consumer's rate.
  return bytes / suite.dram.ext_bandwidth_bytes_per_s() + bytes / suite.at(e.to_accelerator).bandwidth_bytes_per_s();
}

double comm_energy(const sched::CommEvent& e, const hw::HardwareSuite& suite) {
  const double bytes = static_cast<double>(e.bytes);
  return bytes * suite.at(e.from_accelerator).energy.e_dram() + bytes * suite.at(e.to_accelerator).energy.e_dram();
}

SimReport simulate(const ir::ModelGraph& model, const sched::SchedulePlan& plan, const hw::HardwareSuite& suite,
                   const SimOptions& opts) {
  if (plan.assignments.size() != model.size())
    throw ConfigError("schedule has " + std::to_string(plan.assignments.size()) + " assignments for " +
                      std::to_string(model.size()) + " layers");

  SimReport r;
  r.model = model.name();
  std::map<std::string, std::size_t> acc_index;
  auto totals_for = [&](const std::string& name) -> AcceleratorTotals& {
    auto [it, inserted] = acc_index.try_emplace(name, r.per_accelerator.size());
    if (inserted) r.per_accelerator.push_back(AcceleratorTotals{name, 0, 0, 0.0, {}});
    return r.per_accelerator[it->second];
  };

  double weighted_util = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& layer = model.layer(i);
    const auto& a = plan.assignments[i];
    if (a.layer_id != layer.id)
      throw ConfigError("schedule assigns '" + a.layer_id + "' where the model has '" + layer.id + "'");
    const auto& accel = suite.at(a.destination);

    LayerRow row;
    row.layer_id = layer.id;
    row.kind = layer.kind;
    row.accelerator = a.destination;
    row.reason = a.reason;
    row.metrics = metrics::layer_metrics(layer);
    row.cost = cost::estimate(layer, row.metrics, accel, opts.cost);
    row.energy = energy::layer_energy(row.cost, row.metrics, accel, opts.energy);

    r.total_macs += row.metrics.macs;
    r.layer_latency_s += row.cost.latency_s;
    r.energy += row.energy;
    weighted_util += static_cast<double>(row.metrics.macs) * row.cost.utilization;

    AcceleratorTotals& t = totals_for(a.destination);
    ++t.layers;
    t.macs += row.metrics.macs;
    t.latency_s += row.cost.latency_s;
    t.energy += row.energy;
    r.layers.push_back(std::move(row));
  }

  for (const auto& e : plan.events) {
    CommRow c{e, comm_latency(e, suite), comm_energy(e, suite)};
    r.comm_latency_s += c.latency_s;
    r.comm_energy_j += c.energy_j;
    r.comms.push_back(std::move(c));
  }
  r.energy.dram += r.comm_energy_j;
  r.energy.total += r.comm_energy_j;
  r.latency_s = r.layer_latency_s + r.comm_latency_s;

  if (opts.idle_leakage && opts.energy.include_static) {
    for (const auto& accel : suite.accelerators) {
      const double busy = acc_index.count(accel.name) ? totals_for(accel.name).latency_s : 0.0;
      const double idle = std::max(0.0, r.latency_s - busy);
      energy::EnergyBreakdown leak;
      leak.pe_static = accel.energy.p_static_pe() * static_cast<double>(accel.pe_count()) * idle;
      leak.buf_static = accel.energy.p_static_buf_per_kb() * accel.storage_kb() * idle;
      leak.total = leak.component_sum();
      r.energy += leak;
    }
  }

  r.mean_utilization = r.total_macs > 0 ? weighted_util / static_cast<double>(r.total_macs) : 0.0;
  r.throughput_macs_per_s = r.latency_s > 0 ? static_cast<double>(r.total_macs) / r.latency_s : 0.0;
  return r;
}

SimReport run_scenario(const ir::ModelGraph& model, const hw::HardwareSuite& suite, const hw::Scenario& scenario,
                       const SimOptions& opts) {
  const hw::HardwareSuite sub = suite.subset(scenario);
  return simulate(model, sched::schedule(model, sub, scenario.routing, opts.scheduler), sub, opts);
}

Comparison compare_suites(const ir::ModelGraph& model, const hw::HardwareSuite& suite,
                          const std::vector<std::string>& scenarios, const std::string& baseline,
                          const SimOptions& opts) {
  require_baseline(scenarios, baseline);
  Comparison out;
  out.model = model.name();
  out.baseline = baseline;
  ComparisonRow base;
  for (const auto& name : scenarios) {
    const SimReport rep = run_scenario(model, suite, suite.scenario(name), opts);
    out.rows.push_back(totals_row(name, rep.total_macs, rep.latency_s, rep.energy.total));
    if (name == baseline) base = out.rows.back();
  }
  normalize(out.rows, base);
  return out;
}

SuiteComparison compare_suites(const std::vector<ir::ModelGraph>& models, const hw::HardwareSuite& suite,
                               const std::vector<std::string>& scenarios, const std::string& baseline,
                               const SimOptions& opts) {
  require_baseline(scenarios, baseline);
  SuiteComparison out;
  out.baseline = baseline;
  for (const auto& m : models) out.per_model.push_back(compare_suites(m, suite, scenarios, baseline, opts));

  std::vector<ComparisonRow> totals;
  ComparisonRow base;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    std::uint64_t macs = 0;
    double latency = 0.0;
    double energy = 0.0;
    for (const auto& c : out.per_model) {
      macs += c.rows[s].macs;
      latency += c.rows[s].latency_s;
      energy += c.rows[s].energy_j;
    }
    totals.push_back(totals_row(scenarios[s], macs, latency, energy));
    if (scenarios[s] == baseline) base = totals.back();
  }
  normalize(totals, base);

  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    SuiteComparisonRow row;
    row.totals = totals[s];
    if (!out.per_model.empty()) {
      double log_e = 0.0;
      double log_t = 0.0;
      for (const auto& c : out.per_model) {
        log_e += std::log(c.rows[s].energy_efficiency_x);
        log_t += std::log(c.rows[s].throughput_x);
      }
      const double n = static_cast<double>(out.per_model.size());
      row.geomean_energy_efficiency_x = std::exp(log_e / n);
      row.geomean_throughput_x = std::exp(log_t / n);
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace hetsim::engine
