#include "hetsim/hardware.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hetsim/error.hpp"
#include "hetsim/units.hpp"
#include "json.hpp"

namespace hetsim::hw {

using nlohmann::json;
using nlohmann::ordered_json;
using families::Family;

namespace {

constexpr std::array<std::pair<std::string_view, DataflowKind>, 4> kDataflowNames = {{
    {"BaselineMonolithic", DataflowKind::BaselineMonolithic},
    {"PascalFlow", DataflowKind::PascalFlow},
    {"PavlovFlow", DataflowKind::PavlovFlow},
    {"JacquardFlow", DataflowKind::JacquardFlow},
}};

constexpr double kKB = static_cast<double>(units::kKiB);

double get_number(const json& obj, const char* field, const std::string& ctx) {
  if (!obj.contains(field)) throw ParseError(ctx + ": missing field '" + field + "'");
  if (!obj[field].is_number()) throw ParseError(ctx + ": field '" + field + "' must be a number");
  return obj[field].get<double>();
}

double get_number_or(const json& obj, const char* field, const std::string& ctx, double fallback) {
  return obj.contains(field) ? get_number(obj, field, ctx) : fallback;
}

std::string get_string(const json& obj, const char* field, const std::string& ctx) {
  if (!obj.contains(field)) throw ParseError(ctx + ": missing field '" + field + "'");
  if (!obj[field].is_string()) throw ParseError(ctx + ": field '" + field + "' must be a string");
  return obj[field].get<std::string>();
}

std::uint64_t kb_to_bytes(double kb, const std::string& ctx, const char* field) {
  if (!(kb >= 0.0)) throw ValidationError(ctx + ": field '" + field + "' must be >= 0");
  const double bytes = kb * kKB;
  if (bytes != std::floor(bytes)) throw ValidationError(ctx + ": field '" + field + "' is not a whole number of bytes");
  return static_cast<std::uint64_t>(bytes);
}

EnergyCoefficients parse_energy(const json& e, const std::string& ctx) {
  if (!e.is_object()) throw ParseError(ctx + ": field 'energy' must be an object");
  const std::string c = ctx + ".energy";
  EnergyCoefficients out;
  out.e_mac_pj = get_number(e, "e_mac_pj", c);
  out.e_param_buf_pj_per_b = get_number(e, "e_param_buf_pj_per_b", c);
  out.e_act_buf_pj_per_b = get_number(e, "e_act_buf_pj_per_b", c);
  out.e_noc_pj_per_b = get_number(e, "e_noc_pj_per_b", c);
  out.e_dram_pj_per_b = get_number(e, "e_dram_pj_per_b", c);
  out.p_static_pe_mw = get_number(e, "p_static_pe_mw", c);
  out.p_static_buf_mw_per_kb = get_number(e, "p_static_buf_mw_per_kb", c);
  return out;
}

FamilyRouting parse_routing(const json& r, const std::string& ctx) {
  if (!r.is_object()) throw ParseError(ctx + " must be an object of family -> accelerator");
  FamilyRouting out;
  for (const auto& [key, value] : r.items()) {
    const auto f = families::parse_family(key);
    if (!f || *f == Family::Unclassified) throw ValidationError(ctx + ": unknown family '" + key + "'");
    if (!value.is_string()) throw ParseError(ctx + "." + key + " must be an accelerator name");
    out[*f] = value.get<std::string>();
  }
  return out;
}

ordered_json routing_to_json(const FamilyRouting& r) {
  ordered_json out = ordered_json::object();
  for (const auto& [f, name] : r) out[std::string(families::to_string(f))] = name;
  return out;
}

void check_routing(const FamilyRouting& r, const std::vector<std::string>& allowed, const std::string& ctx) {
  for (Family f : families::kFamilies) {
    auto it = r.find(f);
    if (it == r.end())
      throw ValidationError(ctx + ": routing has no entry for " + std::string(families::to_string(f)));
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == it->second;
    if (!ok) throw ValidationError(ctx + ": routing sends " + std::string(families::to_string(f)) +
                                   " to '" + it->second + "', which is not available");
  }
}

}  // namespace

std::string_view to_string(DataflowKind d) {
  for (const auto& [name, v] : kDataflowNames)
    if (v == d) return name;
  return "?";
}

std::string_view to_string(Placement p) { return p == Placement::OnChip ? "OnChip" : "NearMemory"; }

std::optional<DataflowKind> parse_dataflow(std::string_view text) {
  for (const auto& [name, v] : kDataflowNames)
    if (name == text) return v;
  return std::nullopt;
}

std::optional<Placement> parse_placement(std::string_view text) {
  if (text == "OnChip") return Placement::OnChip;
  if (text == "NearMemory") return Placement::NearMemory;
  return std::nullopt;
}

double AcceleratorConfig::storage_kb() const {
  const double bytes = static_cast<double>(act_buffer_bytes) + static_cast<double>(param_buffer_bytes) +
                       static_cast<double>(per_pe_register_bytes) * static_cast<double>(pe_count());
  return bytes / kKB;
}

const AcceleratorConfig* HardwareSuite::find(std::string_view name) const {
  for (const auto& a : accelerators)
    if (a.name == name) return &a;
  return nullptr;
}

const AcceleratorConfig& HardwareSuite::at(std::string_view name) const {
  if (const auto* a = find(name)) return *a;
  throw ConfigError("accelerator '" + std::string(name) + "' is not in the hardware suite");
}

const Scenario& HardwareSuite::scenario(std::string_view name) const {
  for (const auto& s : scenarios)
    if (s.name == name) return s;
  throw ConfigError("scenario '" + std::string(name) + "' is not defined");
}

HardwareSuite HardwareSuite::subset(const Scenario& s) const {
  HardwareSuite out;
  out.dram = dram;
  for (const auto& name : s.accelerators) out.accelerators.push_back(at(name));
  out.routing = s.routing;
  out.scenarios.push_back(s);
  return out;
}

FamilyRouting canonical_routing() {
  return {{Family::F1, "Pascal"}, {Family::F2, "Pascal"}, {Family::F3, "Pavlov"},
          {Family::F4, "Jacquard"}, {Family::F5, "Jacquard"}};
}

FamilyRouting uniform_routing(const std::string& accelerator) {
  FamilyRouting r;
  for (Family f : families::kFamilies) r[f] = accelerator;
  return r;
}

namespace defaults {

double buffer_access_pj_per_b(std::uint64_t capacity_bytes) {
  if (capacity_bytes == 0) return 0.0;
  static constexpr std::array<std::pair<double, double>, 6> kTable = {{
      {16.0 * 1024, 0.3},
      {128.0 * 1024, 0.8},
      {512.0 * 1024, 1.6},
      {2.0 * 1024 * 1024, 3.2},
      {4.0 * 1024 * 1024, 4.5},
      {8.0 * 1024 * 1024, 6.4},
  }};
  const double c = static_cast<double>(capacity_bytes);
  if (c <= kTable.front().first) return kTable.front().second;
  if (c >= kTable.back().first) return kTable.back().second;
  for (std::size_t i = 1; i < kTable.size(); ++i) {
    const auto [c1, e1] = kTable[i];
    if (c > c1) continue;
    const auto [c0, e0] = kTable[i - 1];
    const double x = std::log(c / c0) / std::log(c1 / c0);
    return std::exp(std::log(e0) + x * (std::log(e1) - std::log(e0)));
  }
  return kTable.back().second;
}

EnergyCoefficients coefficients_for(Placement placement, std::uint64_t act_buffer_bytes,
                                    std::uint64_t param_buffer_bytes) {
  EnergyCoefficients e;
  e.e_mac_pj = kMacPj;
  e.e_param_buf_pj_per_b = buffer_access_pj_per_b(param_buffer_bytes);
  e.e_act_buf_pj_per_b = buffer_access_pj_per_b(act_buffer_bytes);
  e.e_noc_pj_per_b = kNocPjPerB;
  e.e_dram_pj_per_b = placement == Placement::OnChip ? kDramOnChipPjPerB : kDramNearMemoryPjPerB;
  e.p_static_pe_mw = kStaticPeMw;
  e.p_static_buf_mw_per_kb = kStaticBufMwPerKb;
  return e;
}

}  // namespace defaults

namespace {

AcceleratorConfig make(std::string name, std::int64_t pe, double peak_gmacs, std::uint64_t act, std::uint64_t param,
                       std::uint64_t regs, DataflowKind dataflow, double bw, Placement placement) {
  AcceleratorConfig a;
  a.name = std::move(name);
  a.pe_rows = pe;
  a.pe_cols = pe;
  a.peak_gmacs = peak_gmacs;
  a.act_buffer_bytes = act;
  a.param_buffer_bytes = param;
  a.per_pe_register_bytes = regs;
  a.dataflow = dataflow;
  a.bw_gbps = bw;
  a.placement = placement;
  a.energy = defaults::coefficients_for(placement, act, param);
  return a;
}

}  // namespace

HardwareSuite canonical_suite() {
  using units::kKiB;
  using units::kMiB;
  HardwareSuite s;
  s.dram = DramConfig{2.0, 32.0, 256.0};
  const AcceleratorConfig baseline = make("Baseline", 64, 1024, 2 * kMiB, 4 * kMiB, 0,
                                          DataflowKind::BaselineMonolithic, 32, Placement::OnChip);
  AcceleratorConfig hb = baseline;
  hb.name = "Base+HB";
  hb.bw_gbps = 256;
  s.accelerators = {
      baseline,
      hb,
      make("Pascal", 32, 1024, 256 * kKiB, 128 * kKiB, 0, DataflowKind::PascalFlow, 32, Placement::OnChip),
      make("Pavlov", 8, 64, 128 * kKiB, 0, 512, DataflowKind::PavlovFlow, 256, Placement::NearMemory),
      make("Jacquard", 16, 256, 128 * kKiB, 128 * kKiB, 0, DataflowKind::JacquardFlow, 256, Placement::NearMemory),
  };
  s.routing = canonical_routing();
  s.scenarios = {
      {"Baseline", {"Baseline"}, uniform_routing("Baseline")},
      {"Base+HB", {"Base+HB"}, uniform_routing("Base+HB")},
      {"Mensa-G", {"Pascal", "Pavlov", "Jacquard"}, canonical_routing()},
  };
  return s;
}

void validate(const HardwareSuite& suite) {
  if (suite.accelerators.empty()) throw ValidationError("hardware suite has no accelerators");
  const DramConfig& d = suite.dram;
  if (!(d.capacity_gb > 0)) throw ValidationError("dram.capacity_gb must be > 0");
  if (!(d.ext_bw_gbps > 0)) throw ValidationError("dram.ext_bw_gbps must be > 0");
  if (!(d.in_stack_bw_gbps > 0)) throw ValidationError("dram.in_stack_bw_gbps must be > 0");

  std::set<std::string> names;
  std::vector<std::string> all;
  for (const auto& a : suite.accelerators) {
    const std::string ctx = "accelerator '" + a.name + "'";
    if (a.name.empty()) throw ValidationError("accelerator with empty name");
    if (!names.insert(a.name).second) throw ValidationError("duplicate accelerator name '" + a.name + "'");
    all.push_back(a.name);
    if (a.pe_rows <= 0 || a.pe_cols <= 0) throw ValidationError(ctx + ": field 'pe' must be positive");
    if (!(a.peak_gmacs > 0)) throw ValidationError(ctx + ": field 'peak_gmacs' must be > 0");
    if (!(a.bw_gbps > 0)) throw ValidationError(ctx + ": field 'bw_gbps' must be > 0");
    if (!(a.clock_mhz >= 0)) throw ValidationError(ctx + ": field 'clock_mhz' must be >= 0");
    if (a.placement == Placement::NearMemory && a.bw_gbps != d.in_stack_bw_gbps)
      throw ValidationError(ctx + ": NearMemory placement requires bw_gbps == dram.in_stack_bw_gbps");
    const EnergyCoefficients& e = a.energy;
    for (double v : {e.e_mac_pj, e.e_param_buf_pj_per_b, e.e_act_buf_pj_per_b, e.e_noc_pj_per_b,
                     e.e_dram_pj_per_b, e.p_static_pe_mw, e.p_static_buf_mw_per_kb})
      if (!(v >= 0)) throw ValidationError(ctx + ": energy coefficients must be >= 0");
  }

  if (!suite.routing.empty()) check_routing(suite.routing, all, "routing");
  std::set<std::string> scen_names;
  for (const auto& s : suite.scenarios) {
    const std::string ctx = "scenario '" + s.name + "'";
    if (!scen_names.insert(s.name).second) throw ValidationError("duplicate scenario name '" + s.name + "'");
    if (s.accelerators.empty()) throw ValidationError(ctx + ": no accelerators");
    for (const auto& a : s.accelerators)
      if (!names.count(a)) throw ValidationError(ctx + ": unknown accelerator '" + a + "'");
    check_routing(s.routing, s.accelerators, ctx);
  }
}

HardwareSuite load_suite(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("hardware document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("hardware document must be a JSON object");

  HardwareSuite suite;
  if (doc.contains("dram")) {
    const json& d = doc["dram"];
    if (!d.is_object()) throw ParseError("field 'dram' must be an object");
    suite.dram.capacity_gb = get_number(d, "capacity_gb", "dram");
    suite.dram.ext_bw_gbps = get_number(d, "ext_bw_gbps", "dram");
    suite.dram.in_stack_bw_gbps = get_number_or(d, "in_stack_bw_gbps", "dram", suite.dram.in_stack_bw_gbps);
  }

  if (!doc.contains("accelerators") || !doc["accelerators"].is_array())
    throw ParseError("missing array field 'accelerators'");
  std::size_t i = 0;
  for (const json& a : doc["accelerators"]) {
    std::string ctx = "accelerators[" + std::to_string(i++) + "]";
    if (!a.is_object()) throw ParseError(ctx + " must be an object");
    AcceleratorConfig c;
    c.name = get_string(a, "name", ctx);
    ctx += " ('" + c.name + "')";
    if (!a.contains("pe") || !a["pe"].is_array() || a["pe"].size() != 2 || !a["pe"][0].is_number_integer() ||
        !a["pe"][1].is_number_integer())
      throw ParseError(ctx + ": field 'pe' must be [rows, cols]");
    c.pe_rows = a["pe"][0].get<std::int64_t>();
    c.pe_cols = a["pe"][1].get<std::int64_t>();
    c.clock_mhz = get_number_or(a, "clock_mhz", ctx, 0.0);
    c.peak_gmacs = get_number(a, "peak_gmacs", ctx);
    c.act_buffer_bytes = kb_to_bytes(get_number(a, "act_buf_kb", ctx), ctx, "act_buf_kb");
    c.param_buffer_bytes = kb_to_bytes(get_number(a, "param_buf_kb", ctx), ctx, "param_buf_kb");
    const double regs = get_number_or(a, "pe_reg_b", ctx, 0.0);
    if (!(regs >= 0) || regs != std::floor(regs)) throw ValidationError(ctx + ": field 'pe_reg_b' must be a whole number >= 0");
    c.per_pe_register_bytes = static_cast<std::uint64_t>(regs);
    const std::string df = get_string(a, "dataflow", ctx);
    const auto dataflow = parse_dataflow(df);
    if (!dataflow) throw ValidationError(ctx + ": unknown dataflow '" + df + "'");
    c.dataflow = *dataflow;
    c.bw_gbps = get_number(a, "bw_gbps", ctx);
    const std::string pl = get_string(a, "placement", ctx);
    const auto placement = parse_placement(pl);
    if (!placement) throw ValidationError(ctx + ": unknown placement '" + pl + "'");
    c.placement = *placement;
    c.energy = a.contains("energy") ? parse_energy(a["energy"], ctx)
                                    : defaults::coefficients_for(c.placement, c.act_buffer_bytes, c.param_buffer_bytes);
    suite.accelerators.push_back(std::move(c));
  }

  if (doc.contains("routing")) suite.routing = parse_routing(doc["routing"], "routing");
  if (doc.contains("scenarios")) {
    const json& s = doc["scenarios"];
    if (!s.is_array()) throw ParseError("field 'scenarios' must be an array");
    std::size_t k = 0;
    for (const json& e : s) {
      const std::string ctx = "scenarios[" + std::to_string(k++) + "]";
      if (!e.is_object()) throw ParseError(ctx + " must be an object");
      Scenario sc;
      sc.name = get_string(e, "name", ctx);
      if (!e.contains("accelerators") || !e["accelerators"].is_array())
        throw ParseError(ctx + ": missing array field 'accelerators'");
      for (const json& n : e["accelerators"]) {
        if (!n.is_string()) throw ParseError(ctx + ": accelerator names must be strings");
        sc.accelerators.push_back(n.get<std::string>());
      }
      if (e.contains("routing")) sc.routing = parse_routing(e["routing"], ctx + ".routing");
      else if (sc.accelerators.size() == 1) sc.routing = uniform_routing(sc.accelerators.front());
      else if (!suite.routing.empty()) sc.routing = suite.routing;
      else throw ValidationError(ctx + ": multi-accelerator scenario needs a routing");
      suite.scenarios.push_back(std::move(sc));
    }
  }

  validate(suite);
  return suite;
}

HardwareSuite load_suite_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open hardware file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_suite(ss.str());
}

std::string serialize_suite(const HardwareSuite& suite, int indent) {
  ordered_json doc;
  ordered_json accs = ordered_json::array();
  for (const auto& a : suite.accelerators) {
    ordered_json j;
    j["name"] = a.name;
    j["pe"] = {a.pe_rows, a.pe_cols};
    if (a.clock_mhz > 0) j["clock_mhz"] = a.clock_mhz;
    j["peak_gmacs"] = a.peak_gmacs;
    j["act_buf_kb"] = static_cast<double>(a.act_buffer_bytes) / kKB;
    j["param_buf_kb"] = static_cast<double>(a.param_buffer_bytes) / kKB;
    j["pe_reg_b"] = a.per_pe_register_bytes;
    j["dataflow"] = to_string(a.dataflow);
    j["bw_gbps"] = a.bw_gbps;
    j["placement"] = to_string(a.placement);
    const EnergyCoefficients& e = a.energy;
    j["energy"] = {{"e_mac_pj", e.e_mac_pj},
                   {"e_param_buf_pj_per_b", e.e_param_buf_pj_per_b},
                   {"e_act_buf_pj_per_b", e.e_act_buf_pj_per_b},
                   {"e_noc_pj_per_b", e.e_noc_pj_per_b},
                   {"e_dram_pj_per_b", e.e_dram_pj_per_b},
                   {"p_static_pe_mw", e.p_static_pe_mw},
                   {"p_static_buf_mw_per_kb", e.p_static_buf_mw_per_kb}};
    accs.push_back(std::move(j));
  }
  doc["accelerators"] = std::move(accs);
  doc["dram"] = {{"capacity_gb", suite.dram.capacity_gb},
                 {"ext_bw_gbps", suite.dram.ext_bw_gbps},
                 {"in_stack_bw_gbps", suite.dram.in_stack_bw_gbps}};
  if (!suite.routing.empty()) doc["routing"] = routing_to_json(suite.routing);
  if (!suite.scenarios.empty()) {
    ordered_json sc = ordered_json::array();
    for (const auto& s : suite.scenarios)
      sc.push_back({{"name", s.name}, {"accelerators", s.accelerators}, {"routing", routing_to_json(s.routing)}});
    doc["scenarios"] = std::move(sc);
  }
  return doc.dump(indent) + "\n";
}

}  // namespace hetsim::hw
