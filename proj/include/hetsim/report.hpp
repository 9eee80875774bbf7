#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hetsim/engine.hpp"
#include "hetsim/hardware.hpp"
#include "hetsim/ir.hpp"
#include "hetsim/scheduler.hpp"

// Text renderings of results. CSV: '.' decimal point, 9 significant digits,
// RFC 4180 quoting. JSON keys keep insertion order.
namespace hetsim::report {

std::string format_number(double v);
std::string csv_field(std::string_view s);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string to_csv() const;
};

// Joins several tables into one CSV document, separated by blank lines.
std::string join_csv(const std::vector<Table>& tables);

std::string characterize_csv(const std::vector<ir::ModelGraph>& models);
std::string characterize_json(const std::vector<ir::ModelGraph>& models);

std::string cluster_csv(const std::vector<ir::ModelGraph>& models);
std::string cluster_json(const std::vector<ir::ModelGraph>& models);

struct RooflineRequest {
  std::vector<std::string> accelerators;
  double min_intensity = 0.1;
  double max_intensity = 1e4;
  int points = 100;
};
std::vector<double> log_space(double lo, double hi, int points);
// Curves for each accelerator plus one scatter point per layer of each report.
std::string roofline_csv(const hw::HardwareSuite& suite, const RooflineRequest& req,
                         const std::vector<engine::SimReport>& reports);
std::string roofline_json(const hw::HardwareSuite& suite, const RooflineRequest& req,
                          const std::vector<engine::SimReport>& reports);

struct NamedPlan {
  std::string model;
  std::string scenario;
  sched::SchedulePlan plan;
};
std::string schedule_csv(const std::vector<NamedPlan>& plans);
std::string schedule_json(const std::vector<NamedPlan>& plans);

std::string simulate_csv(const std::vector<engine::SimReport>& reports);
std::string simulate_json(const std::vector<engine::SimReport>& reports, std::string_view scenario);

std::string compare_csv(const engine::SuiteComparison& cmp);
std::string compare_json(const engine::SuiteComparison& cmp);

}  // namespace hetsim::report
