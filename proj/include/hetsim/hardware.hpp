#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetsim/families.hpp"

namespace hetsim::hw {

enum class DataflowKind {
  // One fixed dataflow; LSTM gates run one after another.
  BaselineMonolithic,
  // In-PE temporal reduction of outputs, spatial multicast of parameters.
  PascalFlow,
  // Temporal multicast of weights across timesteps/cells, spatial multicast
  // of inputs.
  PavlovFlow,
  // PavlovFlow plus spatial reduction of partial sums over the NoC.
  JacquardFlow,
};

enum class Placement { OnChip, NearMemory };

std::string_view to_string(DataflowKind d);
std::string_view to_string(Placement p);
std::optional<DataflowKind> parse_dataflow(std::string_view text);
std::optional<Placement> parse_placement(std::string_view text);

// Stored in the units of the hardware document (pJ, mW); the accessors
// return SI values.
struct EnergyCoefficients {
  double e_mac_pj = 0.0;
  double e_param_buf_pj_per_b = 0.0;
  double e_act_buf_pj_per_b = 0.0;
  double e_noc_pj_per_b = 0.0;
  double e_dram_pj_per_b = 0.0;
  double p_static_pe_mw = 0.0;
  double p_static_buf_mw_per_kb = 0.0;

  double e_mac() const { return e_mac_pj * 1e-12; }
  double e_param_buf() const { return e_param_buf_pj_per_b * 1e-12; }
  double e_act_buf() const { return e_act_buf_pj_per_b * 1e-12; }
  double e_noc() const { return e_noc_pj_per_b * 1e-12; }
  double e_dram() const { return e_dram_pj_per_b * 1e-12; }
  double p_static_pe() const { return p_static_pe_mw * 1e-3; }
  double p_static_buf_per_kb() const { return p_static_buf_mw_per_kb * 1e-3; }

  bool operator==(const EnergyCoefficients&) const = default;
};

struct AcceleratorConfig {
  std::string name;
  std::int64_t pe_rows = 1;
  std::int64_t pe_cols = 1;
  // Informational only; 0 when unknown. Cost math uses peak_gmacs.
  double clock_mhz = 0.0;
  double peak_gmacs = 0.0;
  std::uint64_t act_buffer_bytes = 0;
  std::uint64_t param_buffer_bytes = 0;
  std::uint64_t per_pe_register_bytes = 0;
  DataflowKind dataflow = DataflowKind::BaselineMonolithic;
  double bw_gbps = 0.0;
  Placement placement = Placement::OnChip;
  EnergyCoefficients energy;

  std::int64_t pe_count() const { return pe_rows * pe_cols; }
  double peak_macs_per_s() const { return peak_gmacs * 1e9; }
  double bandwidth_bytes_per_s() const { return bw_gbps * 1e9; }
  double clock_hz() const { return clock_mhz * 1e6; }
  // Buffers plus PE registers, in KiB; what static buffer power scales with.
  double storage_kb() const;

  bool operator==(const AcceleratorConfig&) const = default;
};

struct DramConfig {
  double capacity_gb = 2.0;
  double ext_bw_gbps = 32.0;
  double in_stack_bw_gbps = 256.0;

  double ext_bandwidth_bytes_per_s() const { return ext_bw_gbps * 1e9; }
  double in_stack_bandwidth_bytes_per_s() const { return in_stack_bw_gbps * 1e9; }

  bool operator==(const DramConfig&) const = default;
};

// Family -> accelerator name.
using FamilyRouting = std::map<families::Family, std::string>;

// A named subset of a suite's accelerators plus the routing used on it.
struct Scenario {
  std::string name;
  std::vector<std::string> accelerators;
  FamilyRouting routing;

  bool operator==(const Scenario&) const = default;
};

struct HardwareSuite {
  std::vector<AcceleratorConfig> accelerators;
  DramConfig dram;
  // Optional; when empty, canonical_routing() applies where meaningful.
  FamilyRouting routing;
  std::vector<Scenario> scenarios;

  const AcceleratorConfig* find(std::string_view name) const;
  const AcceleratorConfig& at(std::string_view name) const;  // ConfigError if absent
  const Scenario& scenario(std::string_view name) const;     // ConfigError if absent
  // Restricts the suite to one scenario's accelerators.
  HardwareSuite subset(const Scenario& s) const;

  bool operator==(const HardwareSuite&) const = default;
};

// F1, F2 -> Pascal; F3 -> Pavlov; F4, F5 -> Jacquard.
FamilyRouting canonical_routing();
// Every family routed to one accelerator.
FamilyRouting uniform_routing(const std::string& accelerator);

// Baseline, Base+HB, Pascal, Pavlov, Jacquard with the Baseline, Base+HB and
// Mensa-G scenarios.
HardwareSuite canonical_suite();

// --- Energy defaults -------------------------------------------------------
// Only e_mac is a published figure (0.2 pJ/bit at 8 bits). Everything else
// is a placeholder meant to be overridden by a hardware document.
namespace defaults {
inline constexpr double kMacPj = 0.2 * 8;
inline constexpr double kDramOnChipPjPerB = 32.0;
inline constexpr double kDramNearMemoryPjPerB = 16.0;
inline constexpr double kNocPjPerB = 0.5;
inline constexpr double kStaticPeMw = 0.1;
inline constexpr double kStaticBufMwPerKb = 0.05;

// Per-byte access energy of an SRAM buffer, log-log interpolated over a
// small capacity table and clamped at its ends. 0 for a 0-byte buffer.
double buffer_access_pj_per_b(std::uint64_t capacity_bytes);

EnergyCoefficients coefficients_for(Placement placement, std::uint64_t act_buffer_bytes,
                                    std::uint64_t param_buffer_bytes);
}  // namespace defaults

// Checks the value invariants; throws ValidationError naming the field.
void validate(const HardwareSuite& suite);

// Parses and validates a hardware document. Missing "energy" objects are
// filled from defaults::coefficients_for().
HardwareSuite load_suite(std::string_view document);
HardwareSuite load_suite_file(const std::filesystem::path& path);
std::string serialize_suite(const HardwareSuite& suite, int indent = 2);

}  // namespace hetsim::hw
