// Command-line front end. The CLI stays a thin shell over the library:
// every command's semantics equal the corresponding library call, and
// repeated runs produce byte-identical outputs.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hetsim/hetsim.hpp"

namespace fs = std::filesystem;

namespace {

struct SimulateArgs {
  std::string cores, profile, system, out, trace;
};

struct ExploreArgs {
  std::string cores, profiles_dir, preset, query_file, out_dir, format = "both";
  unsigned jobs = 1;
  unsigned total_cores = 0;
};

struct ParetoArgs {
  std::string report, workload, out;
};

struct PlotArgs {
  std::string report, out_dir;
};

std::vector<fs::path> sorted_json_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw hetsim::ValidationError("'" + dir.string() + "' is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw hetsim::ValidationError("no .json profiles found in '" + dir.string() + "'");
  }
  return files;
}

int run_simulate(const SimulateArgs& args) {
  const hetsim::CoreRegistry registry = hetsim::load_cores(args.cores);
  const hetsim::WorkloadProfile profile = hetsim::load_profile(args.profile, &registry);
  const hetsim::SystemConfig system = hetsim::load_system(args.system, &registry);

  hetsim::SimOptions options;
  options.record_trace = !args.trace.empty();
  const hetsim::SimResult result = hetsim::simulate(profile, system, registry, options);

  hetsim::RunManifest manifest;
  manifest.command = "simulate";
  manifest.inputs = {args.cores, args.profile, args.system};
  manifest.outputs = {args.out};
  if (!args.trace.empty()) manifest.outputs.push_back(args.trace);

  hetsim::detail::write_text_file(args.out,
                                  hetsim::sim_result_to_json(result, &manifest).dump(2) + "\n");
  if (!args.trace.empty()) {
    hetsim::detail::write_text_file(args.trace, hetsim::trace_to_csv(result, &manifest));
  }
  std::cout << "wrote " << args.out << "  (delay " << hetsim::format_double(result.delay_s)
            << " s, energy " << hetsim::format_double(result.energy_j) << " J, edp "
            << hetsim::format_double(result.edp_js) << " Js)\n";
  return 0;
}

int run_explore(const ExploreArgs& args) {
  const hetsim::CoreRegistry registry = hetsim::load_cores(args.cores);
  for (const auto& d : hetsim::lint_cores(registry, args.cores)) {
    if (d.severity == hetsim::Severity::Warning) std::cerr << d.str() << "\n";
  }

  hetsim::DseQuery query;
  if (!args.query_file.empty()) {
    query = hetsim::load_query(args.query_file);
  } else {
    query = hetsim::preset_query(args.preset.empty() ? "full" : args.preset);
  }
  if (args.total_cores > 0) query.total_cores = args.total_cores;

  std::vector<hetsim::WorkloadProfile> profiles;
  std::vector<std::string> profile_paths;
  for (const auto& path : sorted_json_files(args.profiles_dir)) {
    profiles.push_back(hetsim::load_profile(path, &registry));
    profile_paths.push_back(path.string());
  }

  const hetsim::DseReport report = hetsim::run_dse(query, registry, profiles, args.jobs);

  fs::create_directories(args.out_dir);
  hetsim::RunManifest manifest;
  manifest.command = "explore";
  manifest.inputs = profile_paths;
  manifest.inputs.insert(manifest.inputs.begin(), args.cores);
  manifest.preset = args.query_file.empty() ? (args.preset.empty() ? "full" : args.preset) : "";
  const fs::path out_csv = fs::path(args.out_dir) / "report.csv";
  const fs::path out_json = fs::path(args.out_dir) / "report.json";
  if (args.format == "csv" || args.format == "both") manifest.outputs.push_back(out_csv.string());
  if (args.format == "json" || args.format == "both") manifest.outputs.push_back(out_json.string());
  for (const auto& wr : report.workloads) {
    manifest.outputs.push_back((fs::path(args.out_dir) / ("plot_" + wr.workload + ".csv")).string());
  }

  if (args.format == "csv" || args.format == "both") {
    hetsim::detail::write_text_file(out_csv, hetsim::report_to_csv(report, &manifest));
  }
  if (args.format == "json" || args.format == "both") {
    hetsim::detail::write_text_file(out_json,
                                    hetsim::report_to_json(report, &manifest).dump(2) + "\n");
  }
  for (const auto& wr : report.workloads) {
    const fs::path plot = fs::path(args.out_dir) / ("plot_" + wr.workload + ".csv");
    hetsim::detail::write_text_file(plot, hetsim::plot_csv_for_workload(wr, &manifest));
  }

  for (const auto& wr : report.workloads) {
    std::cout << wr.workload << ": best EDP " << wr.best_edp_config << " ("
              << hetsim::format_double(wr.best_edp_js) << " Js, "
              << hetsim::format_double(wr.impr_best_vs_baseline_pct)
              << "% vs baseline)\n";
  }
  std::cout << "wrote report to " << args.out_dir << "\n";
  return 0;
}

int run_pareto(const ParetoArgs& args) {
  const hetsim::json doc = hetsim::detail::read_json_file(args.report);
  const hetsim::DseReport report = hetsim::parse_report(doc, args.report);
  hetsim::RunManifest manifest;
  manifest.command = "pareto";
  manifest.inputs = {args.report};
  manifest.outputs = {args.out};
  std::string out = manifest.csv_comment();
  out += "workload,config,delay_s,energy_j,edp_js\n";
  for (const auto& wr : report.workloads) {
    if (!args.workload.empty() && wr.workload != args.workload) continue;
    std::vector<hetsim::TradePoint> points;
    for (const auto& row : wr.rows) points.push_back(row.point());
    for (const auto& p : hetsim::pareto_front(points)) {
      out += wr.workload + ',' + p.config + ',' + hetsim::format_double(p.delay_s) + ',' +
             hetsim::format_double(p.energy_j) + ',' + hetsim::format_double(p.edp_js) + '\n';
    }
  }
  hetsim::detail::write_text_file(args.out, out);
  std::cout << "wrote " << args.out << "\n";
  return 0;
}

int run_plot_data(const PlotArgs& args) {
  const hetsim::json doc = hetsim::detail::read_json_file(args.report);
  const hetsim::DseReport report = hetsim::parse_report(doc, args.report);
  fs::create_directories(args.out_dir);
  hetsim::RunManifest manifest;
  manifest.command = "plot-data";
  manifest.inputs = {args.report};
  for (const auto& wr : report.workloads) {
    const fs::path plot = fs::path(args.out_dir) / ("plot_" + wr.workload + ".csv");
    manifest.outputs.push_back(plot.string());
  }
  for (const auto& wr : report.workloads) {
    const fs::path plot = fs::path(args.out_dir) / ("plot_" + wr.workload + ".csv");
    hetsim::detail::write_text_file(plot, hetsim::plot_csv_for_workload(wr, &manifest));
  }
  std::cout << "wrote plot data to " << args.out_dir << "\n";
  return 0;
}

int run_validate(const std::vector<std::string>& files) {
  int errors = 0;
  std::optional<hetsim::CoreRegistry> registry;
  // First pass picks up a core file so profiles/systems can be checked
  // against it regardless of argument order.
  for (const auto& f : files) {
    try {
      hetsim::json doc = hetsim::detail::read_json_file(f);
      if (doc.is_object() && doc.contains("cores")) {
        registry = hetsim::parse_cores(doc, f);
      }
    } catch (const std::exception&) {
      // reported in the main pass
    }
  }
  for (const auto& f : files) {
    std::vector<hetsim::Diagnostic> diags;
    try {
      hetsim::json doc = hetsim::detail::read_json_file(f);
      if (!doc.is_object()) {
        throw hetsim::ValidationError(f + ": expected a JSON object");
      }
      if (doc.contains("cores")) {
        const hetsim::CoreRegistry r = hetsim::parse_cores(doc, f);
        diags = hetsim::lint_cores(r, f);
      } else if (doc.contains("phases")) {
        hetsim::parse_profile(doc, f, registry ? &*registry : nullptr);
      } else if (doc.contains("slots")) {
        const hetsim::SystemConfig cfg =
            hetsim::parse_system(doc, f, registry ? &*registry : nullptr);
        if (registry) diags = hetsim::lint_system(cfg, *registry, f);
      } else {
        throw hetsim::ValidationError(f + ": unrecognized document (expected cores, profile or "
                                          "system schema)");
      }
      std::cout << f << ": ok\n";
    } catch (const std::exception& e) {
      diags.push_back(hetsim::Diagnostic{hetsim::Severity::Error, "", e.what()});
    }
    for (const auto& d : diags) {
      std::cout << d.str() << "\n";
      if (d.severity == hetsim::Severity::Error) ++errors;
    }
  }
  return errors == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hetsim - performance/energy design-space explorer for heterogeneous multicores"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hetsim::kVersion));

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "Simulate one workload on one system");
  sim->add_option("--cores", sim_args.cores, "core type definition file")->required();
  sim->add_option("--profiles", sim_args.profile, "workload profile file")->required();
  sim->add_option("--system", sim_args.system, "system configuration file")->required();
  sim->add_option("--out", sim_args.out, "output SimResult JSON path")->required();
  sim->add_option("--trace", sim_args.trace, "optional schedule trace CSV path");

  ExploreArgs exp_args;
  CLI::App* exp = app.add_subcommand("explore", "Run the design-space exploration");
  exp->add_option("--cores", exp_args.cores, "core type definition file")->required();
  exp->add_option("--profiles", exp_args.profiles_dir, "directory of workload profiles")
      ->required();
  exp->add_option("--preset", exp_args.preset,
                  "configuration preset: full, paper-smp, paper-h2 or paper-h3");
  exp->add_option("--query", exp_args.query_file, "DSE query file (overrides --preset)");
  exp->add_option("--total-cores", exp_args.total_cores, "override the total core count");
  exp->add_option("--out", exp_args.out_dir, "output directory")->required();
  exp->add_option("--jobs", exp_args.jobs, "simulation threads (output is independent of this)");
  exp->add_option("--format", exp_args.format, "report format: csv, json or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));

  ParetoArgs par_args;
  CLI::App* par = app.add_subcommand("pareto", "Extract Pareto frontiers from a report");
  par->add_option("--report", par_args.report, "report JSON produced by explore")->required();
  par->add_option("--workload", par_args.workload, "restrict to one workload");
  par->add_option("--out", par_args.out, "output CSV path")->required();

  PlotArgs plot_args;
  CLI::App* plot = app.add_subcommand("plot-data", "Regenerate plot CSVs from a report");
  plot->add_option("--report", plot_args.report, "report JSON produced by explore")->required();
  plot->add_option("--out", plot_args.out_dir, "output directory")->required();

  std::vector<std::string> validate_files;
  CLI::App* val = app.add_subcommand("validate", "Schema-check and lint input files");
  val->add_option("files", validate_files, "files to validate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_args);
    if (exp->parsed()) return run_explore(exp_args);
    if (par->parsed()) return run_pareto(par_args);
    if (plot->parsed()) return run_plot_data(plot_args);
    if (val->parsed()) return run_validate(validate_files);
  } catch (const hetsim::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const hetsim::SimulationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
