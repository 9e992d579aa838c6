// navmine command line: detect anomalies in navigation event logs, generate
// labeled synthetic datasets, evaluate reports against labels, and export
// page models as Graphviz graphs.
//
// Exit codes: 0 success, 1 data error (unreadable/empty/degenerate input),
// 2 configuration or usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "navmine/navmine.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitConfigError = 2;

navmine::EventLogFormat parse_format(const std::string& name) {
  if (name == "jsonl") return navmine::EventLogFormat::jsonl;
  if (name == "csv") return navmine::EventLogFormat::csv;
  navmine::fail(navmine::Errc::invalid_config, "unknown event log format '" + name + "'");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    navmine::fail(navmine::Errc::unreadable_input, "cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out)
    navmine::fail(navmine::Errc::unreadable_input, "cannot write '" + path + "'");
  return out;
}

int report_error(const navmine::Error& e, int code) {
  std::cerr << "navmine: " << e.what() << "\n";
  return code;
}

// Parses, sessionizes and projects an event log; errors out when nothing
// usable remains.
navmine::ParseResult read_event_log(const std::string& path, navmine::EventLogFormat format) {
  std::ifstream in = open_input(path);
  return navmine::parse_events(in, format);
}

std::vector<navmine::UserTrace> build_traces(const std::string& path,
                                             navmine::EventLogFormat format,
                                             const navmine::TaskSpec& task,
                                             navmine::IngestStats* stats) {
  navmine::ParseResult parsed = read_event_log(path, format);
  if (stats) *stats = parsed.stats;
  std::vector<navmine::UserTrace> traces = navmine::sessionize(parsed.events);
  traces = navmine::project_traces(traces, task, stats);
  bool any_events = false;
  for (const auto& t : traces) any_events |= !t.empty();
  if (traces.empty() || !any_events)
    navmine::fail(navmine::Errc::empty_population, "no usable traces in '" + path + "'");
  return traces;
}

struct DetectArgs {
  std::string events_path;
  std::string config_path;
  std::string out_path;
  std::string format = "jsonl";
  std::optional<double> epsilon;
};

int run_detect(const DetectArgs& args, const navmine::AppConfig& config,
               navmine::EventLogFormat format) {
  try {
    navmine::IngestStats stats;
    const std::vector<navmine::UserTrace> traces =
        build_traces(args.events_path, format, config.task, &stats);
    const navmine::PageModel model =
        navmine::build_page_model(traces, config.task, config.model_config());
    const std::vector<navmine::AnomalyReport> reports =
        navmine::detect(traces, model, config.detection);

    std::ofstream out = open_output(args.out_path);
    navmine::write_reports(out, reports);

    std::int64_t flagged = 0;
    for (const auto& r : reports) flagged += r.flagged ? 1 : 0;
    std::cout << "traces=" << reports.size() << " flagged=" << flagged
              << " excluded_pages=" << model.excluded.size() << "\n";
  } catch (const navmine::Error& e) {
    return report_error(e, kExitDataError);
  }
  return kExitOk;
}

int cmd_detect(const DetectArgs& args) {
  try {
    navmine::AppConfig config = navmine::load_app_config_file(args.config_path);
    const navmine::EventLogFormat format = parse_format(args.format);
    if (args.epsilon) {
      config.detection.epsilon = *args.epsilon;
      config.detection.validate();
    }
    return run_detect(args, config, format);
  } catch (const navmine::Error& e) {
    return report_error(e, kExitConfigError);
  }
}

struct SimulateArgs {
  std::string config_path;
  std::string out_events;
  std::string out_labels;
  std::string format = "jsonl";
};

int run_simulate(const SimulateArgs& args, const navmine::SimConfig& config,
                 navmine::EventLogFormat format) {
  try {
    const navmine::LabeledDataset dataset = navmine::generate_dataset(config);

    std::vector<navmine::NavigationEvent> events;
    for (const auto& trace : dataset.traces)
      events.insert(events.end(), trace.events().begin(), trace.events().end());

    std::ofstream events_out = open_output(args.out_events);
    navmine::serialize_events(events_out, events, format);
    std::ofstream labels_out = open_output(args.out_labels);
    navmine::write_labels_csv(labels_out, dataset.labels);

    std::int64_t failures = 0;
    for (const auto& [user, positive] : dataset.labels) failures += positive ? 1 : 0;
    std::cout << "users=" << dataset.traces.size() << " failures=" << failures << "\n";
  } catch (const navmine::Error& e) {
    return report_error(e, kExitDataError);
  }
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& args) {
  try {
    const navmine::SimConfig config = navmine::load_sim_config_file(args.config_path);
    const navmine::EventLogFormat format = parse_format(args.format);
    return run_simulate(args, config, format);
  } catch (const navmine::Error& e) {
    return report_error(e, kExitConfigError);
  }
}

struct EvaluateArgs {
  std::string report_path;
  std::string labels_path;
};

int cmd_evaluate(const EvaluateArgs& args) {
  try {
    std::ifstream report_in = open_input(args.report_path);
    const std::vector<navmine::AnomalyReport> reports = navmine::read_reports(report_in);
    if (reports.empty())
      navmine::fail(navmine::Errc::empty_population,
                    "report '" + args.report_path + "' contains no entries");
    std::ifstream labels_in = open_input(args.labels_path);
    const auto labels = navmine::read_labels_csv(labels_in);
    const navmine::Metrics metrics = navmine::evaluate(reports, labels);
    std::cout << navmine::metrics_to_json(metrics).dump(2) << "\n";
  } catch (const navmine::Error& e) {
    return report_error(e, kExitDataError);
  }
  return kExitOk;
}

struct ExportDotArgs {
  std::string events_path;
  std::string config_path;
  std::string out_path;
  std::string format = "jsonl";
};

int run_export_dot(const ExportDotArgs& args, const navmine::AppConfig& config,
                   navmine::EventLogFormat format) {
  try {
    const std::vector<navmine::UserTrace> traces =
        build_traces(args.events_path, format, config.task, nullptr);
    const navmine::PageModel model =
        navmine::build_page_model(traces, config.task, config.model_config());
    std::ofstream out = open_output(args.out_path);
    out << navmine::to_dot(model);
  } catch (const navmine::Error& e) {
    return report_error(e, kExitDataError);
  }
  return kExitOk;
}

int cmd_export_dot(const ExportDotArgs& args) {
  try {
    const navmine::AppConfig config = navmine::load_app_config_file(args.config_path);
    const navmine::EventLogFormat format = parse_format(args.format);
    return run_export_dot(args, config, format);
  } catch (const navmine::Error& e) {
    return report_error(e, kExitConfigError);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mining user-perceived failure from navigation traces"};
  app.require_subcommand(1);

  DetectArgs detect_args;
  CLI::App* detect = app.add_subcommand("detect", "Score traces and write an anomaly report");
  detect->add_option("--events", detect_args.events_path, "Event log path")->required();
  detect->add_option("--config", detect_args.config_path, "TOML config path")->required();
  detect->add_option("--out", detect_args.out_path, "Report output path")->required();
  detect->add_option("--format", detect_args.format, "Event log format: jsonl or csv");
  detect->add_option("--epsilon", detect_args.epsilon, "Override the flagging threshold");

  SimulateArgs simulate_args;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate a labeled synthetic dataset");
  simulate->add_option("--config", simulate_args.config_path, "TOML config path")->required();
  simulate->add_option("--out", simulate_args.out_events, "Event log output path")->required();
  simulate->add_option("--labels", simulate_args.out_labels, "Labels CSV output path")->required();
  simulate->add_option("--format", simulate_args.format, "Event log format: jsonl or csv");

  EvaluateArgs evaluate_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Compare a report against labels");
  evaluate->add_option("--report", evaluate_args.report_path, "Report path")->required();
  evaluate->add_option("--labels", evaluate_args.labels_path, "Labels CSV path")->required();

  ExportDotArgs export_args;
  CLI::App* export_dot = app.add_subcommand("export-dot", "Export the page model as Graphviz");
  export_dot->add_option("--events", export_args.events_path, "Event log path")->required();
  export_dot->add_option("--config", export_args.config_path, "TOML config path")->required();
  export_dot->add_option("--out", export_args.out_path, "DOT output path")->required();
  export_dot->add_option("--format", export_args.format, "Event log format: jsonl or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (detect->parsed()) return cmd_detect(detect_args);
  if (simulate->parsed()) return cmd_simulate(simulate_args);
  if (evaluate->parsed()) return cmd_evaluate(evaluate_args);
  if (export_dot->parsed()) return cmd_export_dot(export_args);
  return kExitConfigError;
}
