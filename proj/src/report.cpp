#include "hetsim/report.hpp"

#include <cmath>
#include <cstdio>

#include "hetsim/cost.hpp"
#include "hetsim/energy.hpp"
#include "hetsim/families.hpp"
#include "hetsim/metrics.hpp"
#include "hetsim/units.hpp"
#include "json.hpp"

namespace hetsim::report {

using nlohmann::ordered_json;

namespace {

std::string num(double v) { return format_number(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }
std::string str(std::string_view s) { return std::string(s); }

// JSON has no infinity; unbounded intensities are written as null.
ordered_json jnum(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json energy_json(const energy::EnergyBreakdown& e) {
  return {{"pe_dynamic_j", e.pe_dynamic}, {"pe_static_j", e.pe_static}, {"buf_dynamic_j", e.buf_dynamic},
          {"buf_static_j", e.buf_static}, {"noc_j", e.noc},                 {"dram_j", e.dram},
          {"total_j", e.total}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::string join_csv(const std::vector<Table>& tables) {
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) out += '\n';
    out += tables[i].to_csv();
  }
  return out;
}

// --- characterize ----------------------------------------------------------

std::string characterize_csv(const std::vector<ir::ModelGraph>& models) {
  Table t{{"layer_id", "kind", "macs", "param_bytes", "param_reuse", "input_act_bytes", "output_act_bytes",
           "act_reuse", "model"},
          {}};
  for (const auto& model : models)
    for (const auto& l : model.layers()) {
      const auto m = metrics::layer_metrics(l);
      t.rows.push_back({l.id, str(ir::to_string(l.kind)), num(m.macs), num(m.param_bytes), num(m.param_reuse),
                        num(m.input_act_bytes), num(m.output_act_bytes), num(m.act_reuse), model.name()});
    }
  return t.to_csv();
}

std::string characterize_json(const std::vector<ir::ModelGraph>& models) {
  ordered_json out = ordered_json::array();
  for (const auto& model : models) {
    const auto mm = metrics::model_metrics(model);
    ordered_json layers = ordered_json::array();
    for (std::size_t i = 0; i < model.size(); ++i) {
      const auto& l = model.layer(i);
      const auto& m = mm.per_layer[i];
      layers.push_back({{"layer_id", l.id},
                        {"kind", ir::to_string(l.kind)},
                        {"macs", m.macs},
                        {"param_bytes", m.param_bytes},
                        {"param_reuse", m.param_reuse},
                        {"input_act_bytes", m.input_act_bytes},
                        {"output_act_bytes", m.output_act_bytes},
                        {"act_reuse", m.act_reuse}});
    }
    ordered_json lstm = ordered_json::array();
    for (const auto& f : mm.lstm_layers)
      lstm.push_back({{"group", f.group}, {"per_gate_bytes", f.per_gate_bytes}, {"layer_bytes", f.layer_bytes}});
    out.push_back({{"model", model.name()},
                   {"class", ir::to_string(model.model_class())},
                   {"total_macs", mm.total_macs},
                   {"total_flops", units::to_flops(static_cast<double>(mm.total_macs))},
                   {"total_param_bytes", mm.total_param_bytes},
                   {"lstm_layers", std::move(lstm)},
                   {"layers", std::move(layers)}});
  }
  return dump({{"models", std::move(out)}});
}

// --- cluster ---------------------------------------------------------------

namespace {

struct ClusterRow {
  std::string model, layer_id;
  families::Family family;
  families::Family routed;
};

std::vector<ClusterRow> cluster_rows(const std::vector<ir::ModelGraph>& models, families::Histogram& hist) {
  std::vector<ClusterRow> rows;
  for (const auto& model : models) {
    hist += families::family_histogram(model);
    for (const auto& l : model.layers()) {
      if (!metrics::owns_weights(l)) continue;
      const auto m = metrics::layer_metrics(l);
      if (m.param_bytes == 0) continue;
      rows.push_back({model.name(), l.id, families::classify(m, l.kind), *families::routing_family(m, l.kind)});
    }
  }
  return rows;
}

constexpr std::array<families::Family, 6> kAllFamilies = {families::Family::F1, families::Family::F2,
                                                          families::Family::F3, families::Family::F4,
                                                          families::Family::F5, families::Family::Unclassified};

double fraction(const families::Histogram& h, families::Family f) {
  return h.total ? static_cast<double>(h.count(f)) / static_cast<double>(h.total) : 0.0;
}

}  // namespace

std::string cluster_csv(const std::vector<ir::ModelGraph>& models) {
  families::Histogram hist;
  Table layers{{"layer_id", "family", "routed_family", "model"}, {}};
  for (const auto& r : cluster_rows(models, hist))
    layers.rows.push_back({r.layer_id, str(families::to_string(r.family)), str(families::to_string(r.routed)), r.model});
  Table summary{{"family", "count", "fraction"}, {}};
  for (auto f : kAllFamilies)
    summary.rows.push_back({str(families::to_string(f)), num(static_cast<std::uint64_t>(hist.count(f))), num(fraction(hist, f))});
  summary.rows.push_back({"classified", num(static_cast<std::uint64_t>(hist.total - hist.count(families::Family::Unclassified))),
                          num(hist.classified_fraction())});
  return join_csv({layers, summary});
}

std::string cluster_json(const std::vector<ir::ModelGraph>& models) {
  families::Histogram hist;
  ordered_json layers = ordered_json::array();
  for (const auto& r : cluster_rows(models, hist))
    layers.push_back({{"model", r.model},
                      {"layer_id", r.layer_id},
                      {"family", families::to_string(r.family)},
                      {"routed_family", families::to_string(r.routed)}});
  ordered_json counts = ordered_json::object();
  for (auto f : kAllFamilies) counts[str(families::to_string(f))] = hist.count(f);
  return dump({{"layers", std::move(layers)},
               {"histogram", {{"counts", std::move(counts)},
                              {"total", hist.total},
                              {"classified_fraction", hist.classified_fraction()}}}});
}

// --- roofline --------------------------------------------------------------

std::vector<double> log_space(double lo, double hi, int points) {
  std::vector<double> out;
  if (points <= 0) return out;
  if (points == 1) return {lo};
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < points; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (points - 1)));
  return out;
}

namespace {

std::vector<const hw::AcceleratorConfig*> selected(const hw::HardwareSuite& suite, const RooflineRequest& req) {
  std::vector<const hw::AcceleratorConfig*> out;
  if (req.accelerators.empty())
    for (const auto& a : suite.accelerators) out.push_back(&a);
  else
    for (const auto& n : req.accelerators) out.push_back(&suite.at(n));
  return out;
}

struct Point {
  std::string model, layer_id, accelerator;
  double intensity, achieved_macs_per_s, achieved_macs_per_j;
};

std::vector<Point> scatter(const std::vector<engine::SimReport>& reports) {
  std::vector<Point> out;
  for (const auto& r : reports)
    for (const auto& l : r.layers) {
      if (l.metrics.macs == 0) continue;
      const double macs = static_cast<double>(l.metrics.macs);
      out.push_back({r.model, l.layer_id, l.accelerator, cost::operational_intensity(l.cost),
                     l.cost.latency_s > 0 ? macs / l.cost.latency_s : 0.0,
                     l.energy.total > 0 ? macs / l.energy.total : 0.0});
    }
  return out;
}

}  // namespace

std::string roofline_csv(const hw::HardwareSuite& suite, const RooflineRequest& req,
                         const std::vector<engine::SimReport>& reports) {
  Table curves{{"accelerator", "intensity_macs_per_byte", "intensity_flops_per_byte", "attainable_macs_per_s",
                "attainable_flops_per_s", "energy_roofline_macs_per_j"},
               {}};
  const auto xs = log_space(req.min_intensity, req.max_intensity, req.points);
  for (const auto* a : selected(suite, req))
    for (double x : xs) {
      const double att = cost::roofline_attainable(x, *a);
      curves.rows.push_back({a->name, num(x), num(units::to_flops(x)), num(att), num(units::to_flops(att)),
                             num(energy::energy_roofline(x, a->energy))});
    }
  Table ridges{{"accelerator", "ridge_macs_per_byte", "ridge_flops_per_byte", "peak_macs_per_s", "bandwidth_bytes_per_s"}, {}};
  for (const auto* a : selected(suite, req))
    ridges.rows.push_back({a->name, num(cost::ridge_point(*a)), num(units::to_flops(cost::ridge_point(*a))),
                           num(a->peak_macs_per_s()), num(a->bandwidth_bytes_per_s())});
  std::vector<Table> tables = {curves, ridges};
  if (!reports.empty()) {
    Table pts{{"model", "layer_id", "accelerator", "intensity_macs_per_byte", "achieved_macs_per_s", "achieved_macs_per_j"}, {}};
    for (const auto& p : scatter(reports))
      pts.rows.push_back({p.model, p.layer_id, p.accelerator, num(p.intensity), num(p.achieved_macs_per_s),
                          num(p.achieved_macs_per_j)});
    tables.push_back(pts);
  }
  return join_csv(tables);
}

std::string roofline_json(const hw::HardwareSuite& suite, const RooflineRequest& req,
                          const std::vector<engine::SimReport>& reports) {
  ordered_json accs = ordered_json::array();
  const auto xs = log_space(req.min_intensity, req.max_intensity, req.points);
  for (const auto* a : selected(suite, req)) {
    ordered_json curve = ordered_json::array();
    for (double x : xs)
      curve.push_back({{"intensity_macs_per_byte", x},
                       {"attainable_macs_per_s", cost::roofline_attainable(x, *a)},
                       {"energy_roofline_macs_per_j", energy::energy_roofline(x, a->energy)}});
    accs.push_back({{"accelerator", a->name},
                    {"ridge_macs_per_byte", cost::ridge_point(*a)},
                    {"ridge_flops_per_byte", units::to_flops(cost::ridge_point(*a))},
                    {"curve", std::move(curve)}});
  }
  ordered_json pts = ordered_json::array();
  for (const auto& p : scatter(reports))
    pts.push_back({{"model", p.model},
                   {"layer_id", p.layer_id},
                   {"accelerator", p.accelerator},
                   {"intensity_macs_per_byte", jnum(p.intensity)},
                   {"achieved_macs_per_s", p.achieved_macs_per_s},
                   {"achieved_macs_per_j", p.achieved_macs_per_j}});
  return dump({{"accelerators", std::move(accs)}, {"points", std::move(pts)}});
}

// --- schedule --------------------------------------------------------------

std::string schedule_csv(const std::vector<NamedPlan>& plans) {
  Table a{{"model", "scenario", "layer_id", "family", "nearest_routed", "ideal", "destination", "reason"}, {}};
  Table e{{"model", "scenario", "producer", "consumer", "from", "to", "bytes", "reload"}, {}};
  for (const auto& p : plans) {
    for (const auto& x : p.plan.assignments)
      a.rows.push_back({p.model, p.scenario, x.layer_id, str(families::to_string(x.family)),
                        x.nearest_routed ? "1" : "0", x.ideal, x.destination, str(sched::to_string(x.reason))});
    for (const auto& x : p.plan.events)
      e.rows.push_back({p.model, p.scenario, x.producer, x.consumer, x.from_accelerator, x.to_accelerator,
                        num(x.bytes), x.reload ? "1" : "0"});
  }
  return join_csv({a, e});
}

std::string schedule_json(const std::vector<NamedPlan>& plans) {
  ordered_json out = ordered_json::array();
  for (const auto& p : plans) {
    ordered_json as = ordered_json::array();
    for (const auto& x : p.plan.assignments)
      as.push_back({{"layer_id", x.layer_id},
                    {"family", families::to_string(x.family)},
                    {"nearest_routed", x.nearest_routed},
                    {"ideal", x.ideal},
                    {"destination", x.destination},
                    {"reason", sched::to_string(x.reason)}});
    ordered_json ev = ordered_json::array();
    for (const auto& x : p.plan.events)
      ev.push_back({{"producer", x.producer},
                    {"consumer", x.consumer},
                    {"from", x.from_accelerator},
                    {"to", x.to_accelerator},
                    {"bytes", x.bytes},
                    {"via_dram", x.via_dram},
                    {"reload", x.reload}});
    out.push_back({{"model", p.model}, {"scenario", p.scenario}, {"assignments", std::move(as)}, {"events", std::move(ev)}});
  }
  return dump({{"plans", std::move(out)}});
}

// --- simulate --------------------------------------------------------------

std::string simulate_csv(const std::vector<engine::SimReport>& reports) {
  Table layers{{"model", "layer_id", "kind", "accelerator", "reason", "macs", "compute_cycles", "dram_param_bytes",
                "dram_act_bytes", "noc_bytes", "param_buf_accesses", "act_buf_accesses", "latency_s", "utilization",
                "bottleneck", "pe_dynamic_j", "pe_static_j", "buf_dynamic_j", "buf_static_j", "noc_j", "dram_j",
                "total_j"},
               {}};
  Table totals{{"model", "macs", "latency_s", "layer_latency_s", "comm_latency_s", "energy_j", "comm_energy_j",
                "mean_utilization", "throughput_macs_per_s", "throughput_flops_per_s", "efficiency_macs_per_j",
                "comm_events"},
               {}};
  for (const auto& r : reports) {
    for (const auto& l : r.layers) {
      const auto& c = l.cost;
      const auto& e = l.energy;
      layers.rows.push_back({r.model, l.layer_id, str(ir::to_string(l.kind)), l.accelerator,
                             str(sched::to_string(l.reason)), num(c.macs), num(c.compute_cycles),
                             num(c.dram_param_bytes), num(c.dram_act_bytes), num(c.noc_bytes),
                             num(c.param_buf_accesses), num(c.act_buf_accesses), num(c.latency_s), num(c.utilization),
                             str(cost::to_string(c.bottleneck)), num(e.pe_dynamic), num(e.pe_static),
                             num(e.buf_dynamic), num(e.buf_static), num(e.noc), num(e.dram), num(e.total)});
    }
    totals.rows.push_back({r.model, num(r.total_macs), num(r.latency_s), num(r.layer_latency_s), num(r.comm_latency_s),
                           num(r.energy.total), num(r.comm_energy_j), num(r.mean_utilization),
                           num(r.throughput_macs_per_s), num(units::to_flops(r.throughput_macs_per_s)),
                           num(r.energy_efficiency_macs_per_j()), num(static_cast<std::uint64_t>(r.comms.size()))});
  }
  return join_csv({layers, totals});
}

std::string simulate_json(const std::vector<engine::SimReport>& reports, std::string_view scenario) {
  ordered_json out = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json layers = ordered_json::array();
    for (const auto& l : r.layers) {
      const auto& c = l.cost;
      layers.push_back({{"layer_id", l.layer_id},
                        {"kind", ir::to_string(l.kind)},
                        {"accelerator", l.accelerator},
                        {"reason", sched::to_string(l.reason)},
                        {"macs", c.macs},
                        {"parallelism", c.parallelism},
                        {"compute_cycles", c.compute_cycles},
                        {"dram_param_bytes", c.dram_param_bytes},
                        {"dram_act_bytes", c.dram_act_bytes},
                        {"noc_bytes", c.noc_bytes},
                        {"param_buf_accesses", c.param_buf_accesses},
                        {"act_buf_accesses", c.act_buf_accesses},
                        {"compute_time_s", c.compute_time_s},
                        {"memory_time_s", c.memory_time_s},
                        {"latency_s", c.latency_s},
                        {"utilization", c.utilization},
                        {"bottleneck", cost::to_string(c.bottleneck)},
                        {"energy", energy_json(l.energy)}});
    }
    ordered_json comms = ordered_json::array();
    for (const auto& c : r.comms)
      comms.push_back({{"producer", c.event.producer},
                       {"consumer", c.event.consumer},
                       {"from", c.event.from_accelerator},
                       {"to", c.event.to_accelerator},
                       {"bytes", c.event.bytes},
                       {"latency_s", c.latency_s},
                       {"energy_j", c.energy_j}});
    ordered_json accs = ordered_json::array();
    for (const auto& a : r.per_accelerator)
      accs.push_back({{"accelerator", a.name},
                      {"layers", a.layers},
                      {"macs", a.macs},
                      {"latency_s", a.latency_s},
                      {"energy", energy_json(a.energy)}});
    out.push_back({{"model", r.model},
                   {"scenario", scenario},
                   {"total_macs", r.total_macs},
                   {"latency_s", r.latency_s},
                   {"layer_latency_s", r.layer_latency_s},
                   {"comm_latency_s", r.comm_latency_s},
                   {"comm_energy_j", r.comm_energy_j},
                   {"mean_utilization", r.mean_utilization},
                   {"throughput_macs_per_s", r.throughput_macs_per_s},
                   {"throughput_flops_per_s", units::to_flops(r.throughput_macs_per_s)},
                   {"efficiency_macs_per_j", r.energy_efficiency_macs_per_j()},
                   {"energy", energy_json(r.energy)},
                   {"per_accelerator", std::move(accs)},
                   {"communication", std::move(comms)},
                   {"layers", std::move(layers)}});
  }
  return dump({{"reports", std::move(out)}});
}

// --- compare ---------------------------------------------------------------

namespace {

std::vector<std::string> compare_cells(const std::string& model, const engine::ComparisonRow& r) {
  return {model,
          r.scenario,
          num(r.macs),
          num(r.latency_s),
          num(r.energy_j),
          num(r.throughput_macs_per_s),
          num(r.efficiency_macs_per_j),
          num(r.energy_efficiency_x),
          num(r.throughput_x),
          num(r.latency_x)};
}

ordered_json compare_row_json(const engine::ComparisonRow& r) {
  return {{"scenario", r.scenario},
          {"macs", r.macs},
          {"latency_s", r.latency_s},
          {"energy_j", r.energy_j},
          {"throughput_macs_per_s", r.throughput_macs_per_s},
          {"efficiency_macs_per_j", r.efficiency_macs_per_j},
          {"energy_efficiency_x", r.energy_efficiency_x},
          {"throughput_x", r.throughput_x},
          {"latency_x", r.latency_x}};
}

}  // namespace

std::string compare_csv(const engine::SuiteComparison& cmp) {
  Table t{{"model", "scenario", "macs", "latency_s", "energy_j", "throughput_macs_per_s", "efficiency_macs_per_j",
           "energy_efficiency_x", "throughput_x", "latency_x"},
          {}};
  for (const auto& m : cmp.per_model)
    for (const auto& r : m.rows) t.rows.push_back(compare_cells(m.model, r));
  std::vector<Table> tables = {t};
  if (cmp.per_model.size() > 1) {
    Table s{{"scenario", "macs", "latency_s", "energy_j", "throughput_macs_per_s", "efficiency_macs_per_j",
             "energy_efficiency_x", "throughput_x", "latency_x", "geomean_energy_efficiency_x", "geomean_throughput_x"},
            {}};
    for (const auto& r : cmp.rows) {
      auto cells = compare_cells("", r.totals);
      cells.erase(cells.begin());
      cells.push_back(num(r.geomean_energy_efficiency_x));
      cells.push_back(num(r.geomean_throughput_x));
      s.rows.push_back(std::move(cells));
    }
    tables.push_back(s);
  }
  return join_csv(tables);
}

std::string compare_json(const engine::SuiteComparison& cmp) {
  ordered_json models = ordered_json::array();
  for (const auto& m : cmp.per_model) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : m.rows) rows.push_back(compare_row_json(r));
    models.push_back({{"model", m.model}, {"scenarios", std::move(rows)}});
  }
  ordered_json suite = ordered_json::array();
  for (const auto& r : cmp.rows) {
    ordered_json j = compare_row_json(r.totals);
    j["geomean_energy_efficiency_x"] = r.geomean_energy_efficiency_x;
    j["geomean_throughput_x"] = r.geomean_throughput_x;
    suite.push_back(std::move(j));
  }
  return dump({{"baseline", cmp.baseline}, {"models", std::move(models)}, {"suite", std::move(suite)}});
}

}  // namespace hetsim::report
