#include "hetsim/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include "CLI11.hpp"
#include "hetsim/engine.hpp"
#include "hetsim/error.hpp"
#include "hetsim/hardware.hpp"
#include "hetsim/model_io.hpp"
#include "hetsim/report.hpp"
#include "hetsim/scheduler.hpp"
#include "hetsim/synth.hpp"

namespace hetsim::cli {

namespace {

// Raised for flag combinations CLI11 cannot express; maps to exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::vector<std::string> models;
  bool synthetic = false;
  std::uint64_t seed = 1;
  std::string hw = "canonical";
  std::string out = "-";
  std::string format;
  std::vector<std::string> scenarios;
  std::string baseline = "Baseline";

  bool additive_latency = false;
  bool no_gate_serialization = false;
  bool steady_state = false;
  bool no_static = false;
  bool idle_leakage = false;

  std::vector<std::string> accelerators;
  int points = 100;
  double min_intensity = 0.1;
  double max_intensity = 1e4;

  int cnn = -1, lstm = -1, transducer = -1, rcnn = -1;
};

hw::HardwareSuite load_hw(const std::string& spec) {
  if (spec == "canonical") return hw::canonical_suite();
  return hw::load_suite_file(spec);
}

std::vector<ir::ModelGraph> load_models(const Flags& f) {
  if (f.models.empty() && !f.synthetic) throw UsageError("--model is required (or --synthetic)");
  std::vector<ir::ModelGraph> out;
  for (const auto& path : f.models) out.push_back(ir::load_model_file(path));
  if (f.synthetic) {
    auto suite = synth::generate_suite(synth::SyntheticSuiteSpec::defaults(f.seed));
    out.insert(out.end(), std::make_move_iterator(suite.begin()), std::make_move_iterator(suite.end()));
  }
  return out;
}

// A named scenario, or a bare accelerator name (everything routed to it).
hw::Scenario resolve_scenario(const hw::HardwareSuite& suite, const std::string& name) {
  for (const auto& s : suite.scenarios)
    if (s.name == name) return s;
  if (suite.find(name)) return {name, {name}, hw::uniform_routing(name)};
  throw ConfigError("no scenario or accelerator named '" + name + "'");
}

std::string default_scenario(const hw::HardwareSuite& suite, const char* preferred) {
  for (const auto& s : suite.scenarios)
    if (s.name == preferred) return s.name;
  if (!suite.scenarios.empty()) return suite.scenarios.front().name;
  return suite.accelerators.front().name;
}

engine::SimOptions sim_options(const Flags& f) {
  engine::SimOptions o;
  o.cost.additive_latency = f.additive_latency;
  o.cost.gate_serialization = !f.no_gate_serialization;
  o.cost.steady_state_params = f.steady_state;
  o.energy.include_static = !f.no_static;
  o.idle_leakage = f.idle_leakage;
  o.scheduler.cost = o.cost;
  return o;
}

void emit(const Flags& f, const std::string& text, std::ostream& out) {
  if (f.out == "-") {
    out << text;
    return;
  }
  std::ofstream file(f.out, std::ios::binary);
  if (!file) throw Error("cannot write '" + f.out + "'");
  file << text;
  if (!file) throw Error("failed writing '" + f.out + "'");
}

bool json_format(const Flags& f, bool json_by_default = false) {
  return f.format.empty() ? json_by_default : f.format == "json";
}

std::vector<engine::SimReport> simulate_all(const std::vector<ir::ModelGraph>& models, const hw::HardwareSuite& suite,
                                            const hw::Scenario& sc, const engine::SimOptions& opts) {
  std::vector<engine::SimReport> out;
  for (const auto& m : models) out.push_back(engine::run_scenario(m, suite, sc, opts));
  return out;
}

void add_model_flags(CLI::App* c, Flags& f) {
  c->add_option("--model", f.models, "Model document (JSON); repeatable");
  c->add_flag("--synthetic", f.synthetic, "Add the seeded synthetic model suite");
  c->add_option("--seed", f.seed, "Seed for --synthetic")->capture_default_str();
}

void add_hw_flag(CLI::App* c, Flags& f) {
  c->add_option("--hw", f.hw, "Hardware document, or 'canonical'")->capture_default_str();
}

void add_output_flags(CLI::App* c, Flags& f, const char* default_format) {
  c->add_option("--out", f.out, "Output file, '-' for standard output")->capture_default_str();
  c->add_option("--format", f.format, std::string("Output format (default ") + default_format + ")")
      ->check(CLI::IsMember({"json", "csv"}));
}

void add_model_option_flags(CLI::App* c, Flags& f) {
  c->add_flag("--additive-latency", f.additive_latency, "Add compute and memory time instead of overlapping");
  c->add_flag("--no-gate-serialization", f.no_gate_serialization, "Let LSTM gate MVMs overlap on the baseline");
  c->add_flag("--steady-state", f.steady_state, "Keep buffer-resident parameters across inferences");
  c->add_flag("--no-static", f.no_static, "Drop static energy");
  c->add_flag("--idle-leakage", f.idle_leakage, "Charge static power of idle accelerators");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analytical simulator and scheduler for heterogeneous edge accelerators", "hetsim"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  Flags f;
  std::function<void()> action;

  auto* characterize = app.add_subcommand("characterize", "Per-layer MACs, footprint and reuse");
  add_model_flags(characterize, f);
  add_output_flags(characterize, f, "csv");
  characterize->callback([&] {
    action = [&] {
      const auto models = load_models(f);
      emit(f, json_format(f) ? report::characterize_json(models) : report::characterize_csv(models), out);
    };
  });

  auto* cluster = app.add_subcommand("cluster", "Assign layers to families and summarize");
  add_model_flags(cluster, f);
  add_output_flags(cluster, f, "csv");
  cluster->callback([&] {
    action = [&] {
      const auto models = load_models(f);
      emit(f, json_format(f) ? report::cluster_json(models) : report::cluster_csv(models), out);
    };
  });

  auto* roofline = app.add_subcommand("roofline", "Roofline curves, plus per-layer points for given models");
  add_hw_flag(roofline, f);
  add_output_flags(roofline, f, "csv");
  roofline->add_option("--model", f.models, "Model document (JSON); repeatable");
  roofline->add_flag("--synthetic", f.synthetic, "Add the seeded synthetic model suite");
  roofline->add_option("--seed", f.seed, "Seed for --synthetic")->capture_default_str();
  roofline->add_option("--scenario", f.scenarios, "Scenario used to place the model points")->expected(1);
  roofline->add_option("--accel", f.accelerators, "Restrict curves to these accelerators");
  roofline->add_option("--points", f.points, "Curve samples")->check(CLI::Range(2, 100000))->capture_default_str();
  roofline->add_option("--min-intensity", f.min_intensity, "MAC/byte")->check(CLI::PositiveNumber)->capture_default_str();
  roofline->add_option("--max-intensity", f.max_intensity, "MAC/byte")->check(CLI::PositiveNumber)->capture_default_str();
  add_model_option_flags(roofline, f);
  roofline->callback([&] {
    action = [&] {
      if (f.min_intensity >= f.max_intensity) throw UsageError("--min-intensity must be below --max-intensity");
      const auto suite = load_hw(f.hw);
      std::vector<engine::SimReport> reports;
      if (!f.models.empty() || f.synthetic) {
        const auto sc = resolve_scenario(suite, f.scenarios.empty() ? default_scenario(suite, "Baseline") : f.scenarios[0]);
        reports = simulate_all(load_models(f), suite, sc, sim_options(f));
      }
      report::RooflineRequest req{f.accelerators, f.min_intensity, f.max_intensity, f.points};
      emit(f, json_format(f) ? report::roofline_json(suite, req, reports) : report::roofline_csv(suite, req, reports),
           out);
    };
  });

  auto* schedule = app.add_subcommand("schedule", "Two-phase layer-to-accelerator mapping");
  add_model_flags(schedule, f);
  add_hw_flag(schedule, f);
  add_output_flags(schedule, f, "json");
  schedule->add_option("--scenario", f.scenarios, "Scenario (default Mensa-G when defined)")->expected(1);
  add_model_option_flags(schedule, f);
  schedule->callback([&] {
    action = [&] {
      const auto models = load_models(f);
      const auto suite = load_hw(f.hw);
      const auto sc = resolve_scenario(suite, f.scenarios.empty() ? default_scenario(suite, "Mensa-G") : f.scenarios[0]);
      const auto sub = suite.subset(sc);
      std::vector<report::NamedPlan> plans;
      for (const auto& m : models)
        plans.push_back({m.name(), sc.name, sched::schedule(m, sub, sc.routing, sim_options(f).scheduler)});
      emit(f, json_format(f, true) ? report::schedule_json(plans) : report::schedule_csv(plans), out);
    };
  });

  auto* simulate = app.add_subcommand("simulate", "Schedule and simulate; per-layer and total cost/energy");
  add_model_flags(simulate, f);
  add_hw_flag(simulate, f);
  add_output_flags(simulate, f, "csv");
  simulate->add_option("--scenario", f.scenarios, "Scenario (default Mensa-G when defined)")->expected(1);
  add_model_option_flags(simulate, f);
  simulate->callback([&] {
    action = [&] {
      const auto models = load_models(f);
      const auto suite = load_hw(f.hw);
      const auto sc = resolve_scenario(suite, f.scenarios.empty() ? default_scenario(suite, "Mensa-G") : f.scenarios[0]);
      const auto reports = simulate_all(models, suite, sc, sim_options(f));
      emit(f, json_format(f) ? report::simulate_json(reports, sc.name) : report::simulate_csv(reports), out);
    };
  });

  auto* compare = app.add_subcommand("compare", "Scenario comparison normalized to a baseline");
  add_model_flags(compare, f);
  add_hw_flag(compare, f);
  add_output_flags(compare, f, "csv");
  compare->add_option("--scenario", f.scenarios, "Scenarios to compare (default: all)");
  compare->add_option("--baseline", f.baseline, "Reference scenario")->capture_default_str();
  add_model_option_flags(compare, f);
  compare->callback([&] {
    action = [&] {
      const auto models = load_models(f);
      auto suite = load_hw(f.hw);
      std::vector<std::string> names = f.scenarios;
      if (names.empty()) {
        for (const auto& s : suite.scenarios) names.push_back(s.name);
        if (names.empty())
          for (const auto& a : suite.accelerators) names.push_back(a.name);
      }
      // Bare accelerator names become single-accelerator scenarios.
      for (const auto& n : names) {
        bool known = false;
        for (const auto& s : suite.scenarios) known = known || s.name == n;
        if (!known) suite.scenarios.push_back(resolve_scenario(suite, n));
      }
      const auto cmp = engine::compare_suites(models, suite, names, f.baseline, sim_options(f));
      emit(f, json_format(f) ? report::compare_json(cmp) : report::compare_csv(cmp), out);
    };
  });

  auto* generate = app.add_subcommand("generate", "Write the seeded synthetic model suite");
  generate->add_option("--seed", f.seed, "Generator seed")->capture_default_str();
  generate->add_option("--out", f.out, "Directory for <model>.json files, '-' for one JSON array on stdout")
      ->capture_default_str();
  generate->add_option("--cnn", f.cnn, "Number of CNN models");
  generate->add_option("--lstm", f.lstm, "Number of LSTM models");
  generate->add_option("--transducer", f.transducer, "Number of transducer models");
  generate->add_option("--rcnn", f.rcnn, "Number of RCNN models");
  generate->callback([&] {
    action = [&] {
      auto spec = synth::SyntheticSuiteSpec::defaults(f.seed);
      if (f.cnn >= 0) spec.cnn_models = f.cnn;
      if (f.lstm >= 0) spec.lstm_models = f.lstm;
      if (f.transducer >= 0) spec.transducer_models = f.transducer;
      if (f.rcnn >= 0) spec.rcnn_models = f.rcnn;
      const auto models = synth::generate_suite(spec);
      if (f.out == "-") {
        std::string text = "[\n";
        for (std::size_t i = 0; i < models.size(); ++i) {
          if (i) text += ",\n";
          std::string doc = ir::serialize_model(models[i]);
          doc.pop_back();
          text += doc;
        }
        out << text << "\n]\n";
        return;
      }
      std::filesystem::create_directories(f.out);
      for (const auto& m : models) {
        const auto path = std::filesystem::path(f.out) / (m.name() + ".json");
        std::ofstream file(path, std::ios::binary);
        if (!file) throw Error("cannot write '" + path.string() + "'");
        file << ir::serialize_model(m);
      }
    };
  });

  auto* hwcmd = app.add_subcommand("hw", "Print a hardware suite (default: the canonical one)");
  add_hw_flag(hwcmd, f);
  hwcmd->add_option("--out", f.out, "Output file, '-' for standard output")->capture_default_str();
  hwcmd->callback([&] { action = [&] { emit(f, hw::serialize_suite(load_hw(f.hw)), out); }; });

  std::vector<std::string> argv_storage = {"hetsim"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  auto usage_text = [&]() {
    for (auto* sub : app.get_subcommands()) return sub->help();
    return app.help();
  };

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << usage_text();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << usage_text();
    return kUsage;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << usage_text();
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace hetsim::cli
