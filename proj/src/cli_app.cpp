#include "pursuit/cli_app.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "pursuit/config.hpp"
#include "pursuit/manifest.hpp"
#include "pursuit/scenario.hpp"
#include "pursuit/simulator.hpp"
#include "pursuit/svg.hpp"
#include "text_util.hpp"

namespace fs = std::filesystem;

namespace pursuit {
namespace {

// ---------------------------------------------------------------------------
// Worker pool: PURSUIT_LAB_THREADS caps the number of parallel runs
// (default: available parallelism). Each job owns its output files, so no
// cross-thread synchronization beyond the final join is needed.

std::size_t worker_limit(std::size_t jobs) {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("PURSUIT_LAB_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed >= 1) {
      n = static_cast<std::size_t>(parsed);
    }
  }
  return std::min(n, jobs);
}

void run_parallel(std::size_t jobs,
                  const std::function<void(std::size_t)>& job) {
  const std::size_t workers = worker_limit(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < jobs;
           i = next.fetch_add(1)) {
        job(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Shared plumbing

std::string command_line(int argc, const char* const* argv) {
  std::string cmd = "pursuit_lab";
  for (int i = 1; i < argc; ++i) {
    cmd += ' ';
    cmd += argv[i];
  }
  return cmd;
}

struct ResolvedConfig {
  AppConfig config;
  std::optional<std::string> file;  // absent when built-in defaults are used
};

// Precedence: --config flag, then a config.ini beside the scenario file,
// then built-in defaults.
ResolvedConfig resolve_config(const std::string& scenario_file,
                              const std::string& config_flag) {
  if (!config_flag.empty()) {
    return {load_config(config_flag), config_flag};
  }
  const fs::path sidecar = fs::path(scenario_file).parent_path() / "config.ini";
  if (fs::exists(sidecar)) {
    return {load_config(sidecar.string()), sidecar.string()};
  }
  return {AppConfig{}, std::nullopt};
}

std::vector<std::pair<std::string, std::uint64_t>> digest_inputs(
    const std::string& scenario_file, const Scenario& scenario,
    const std::optional<std::string>& config_file) {
  std::vector<std::pair<std::string, std::uint64_t>> digests;
  digests.emplace_back(scenario_file, fnv1a64_file(scenario_file));
  digests.emplace_back(scenario.grid_file, fnv1a64_file(scenario.grid_file));
  digests.emplace_back(scenario.path_file, fnv1a64_file(scenario.path_file));
  if (config_file) {
    digests.emplace_back(*config_file, fnv1a64_file(*config_file));
  }
  return digests;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

// trajectory.csv + metrics.txt + plot.svg for one finished run.
void write_run_artifacts(const fs::path& dir, const RunResult& result,
                         const AppConfig& config) {
  write_text_file(dir / "trajectory.csv", trajectory_to_csv(result.log));
  write_text_file(dir / "metrics.txt", metrics_to_text(result.metrics));
  if (result.final_grid) {
    write_text_file(dir / "plot.svg",
                    render_plot_svg(*result.final_grid, result.reference,
                                    result.log, config.controller.v_max));
  }
}

std::string run_summary(const Scenario& scenario, const AppConfig& config,
                        const RunResult& result) {
  std::ostringstream out;
  out << scenario.name << ' ' << variant_name(config.controller.variant)
      << ": " << end_reason_name(result.end_reason)
      << " time=" << format_double(result.metrics.time)
      << " distance=" << format_double(result.metrics.distance_traveled)
      << " avg_path_dist="
      << format_double(result.metrics.average_distance_to_path);
  return out.str();
}

// ---------------------------------------------------------------------------
// run

int cmd_run(const std::string& scenario_file, const std::string& config_flag,
            const std::optional<Variant>& variant, const std::string& out_dir,
            const std::string& command) {
  Scenario scenario;
  ResolvedConfig resolved;
  std::vector<std::pair<std::string, std::uint64_t>> digests;
  try {
    scenario = load_scenario(scenario_file);
    resolved = resolve_config(scenario_file, config_flag);
    if (variant) resolved.config.controller.variant = *variant;
    digests = digest_inputs(scenario_file, scenario, resolved.file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    fs::create_directories(out_dir);
    RunManifest manifest;
    manifest.command = command;
    manifest.input_digests = std::move(digests);
    manifest.outputs = {"manifest.txt", "trajectory.csv", "metrics.txt",
                        "plot.svg"};
    manifest.config_text = config_to_text(resolved.config);
    write_manifest(manifest, (fs::path(out_dir) / "manifest.txt").string());

    const RunResult result = run_scenario(scenario, resolved.config);
    write_run_artifacts(out_dir, result, resolved.config);
    std::cout << run_summary(scenario, resolved.config, result) << "\n";
    return result.metrics.success ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

// ---------------------------------------------------------------------------
// compare

struct VariantOutcome {
  bool completed = false;
  std::string error;
  RunResult result;
};

constexpr std::array<Variant, 3> kAllVariants = {Variant::PP, Variant::APP,
                                                 Variant::RPP};

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string table_from_rows(
    const std::vector<std::pair<std::string, std::array<std::string, 3>>>&
        rows) {
  std::size_t label_width = std::string("metric").size();
  std::array<std::size_t, 3> cell_width = {2, 3, 3};  // pp app rpp
  for (const auto& [label, cells] : rows) {
    label_width = std::max(label_width, label.size());
    for (std::size_t c = 0; c < 3; ++c) {
      cell_width[c] = std::max(cell_width[c], cells[c].size());
    }
  }
  std::ostringstream out;
  out << pad("metric", label_width + 2) << pad("pp", cell_width[0] + 2)
      << pad("app", cell_width[1] + 2) << "rpp\n";
  for (const auto& [label, cells] : rows) {
    out << pad(label, label_width + 2) << pad(cells[0], cell_width[0] + 2)
        << pad(cells[1], cell_width[1] + 2) << cells[2] << "\n";
  }
  return out.str();
}

std::string comparison_text(const std::array<VariantOutcome, 3>& outcomes) {
  const auto metric_cells = [&](auto&& get) {
    std::array<std::string, 3> cells;
    for (std::size_t i = 0; i < 3; ++i) {
      cells[i] = outcomes[i].completed ? get(outcomes[i].result) : "failed";
    }
    return cells;
  };
  const auto num = [](double v) { return format_double(v); };

  // Benchmark metric rows, one column per variant.
  std::vector<std::pair<std::string, std::array<std::string, 3>>> rows;
  rows.emplace_back("time", metric_cells([&](const RunResult& r) {
                      return num(r.metrics.time);
                    }));
  rows.emplace_back("distance_traveled",
                    metric_cells([&](const RunResult& r) {
                      return num(r.metrics.distance_traveled);
                    }));
  rows.emplace_back("collisions", metric_cells([&](const RunResult& r) {
                      return std::to_string(r.metrics.collisions);
                    }));
  rows.emplace_back("average_speed", metric_cells([&](const RunResult& r) {
                      return num(r.metrics.average_speed);
                    }));
  rows.emplace_back("average_distance_to_obstacle",
                    metric_cells([&](const RunResult& r) {
                      return num(r.metrics.average_distance_to_obstacle);
                    }));
  rows.emplace_back("average_distance_to_path",
                    metric_cells([&](const RunResult& r) {
                      return num(r.metrics.average_distance_to_path);
                    }));
  std::string text = table_from_rows(rows);

  // Outcome details below the metric table.
  std::vector<std::pair<std::string, std::array<std::string, 3>>> status;
  status.emplace_back("end_reason", metric_cells([&](const RunResult& r) {
                        return end_reason_name(r.end_reason);
                      }));
  status.emplace_back("success", metric_cells([&](const RunResult& r) {
                        return std::string(r.metrics.success ? "true"
                                                             : "false");
                      }));
  status.emplace_back("min_distance_to_obstacle",
                      metric_cells([&](const RunResult& r) {
                        return num(r.metrics.min_distance_to_obstacle);
                      }));
  status.emplace_back("stopped_distance_to_obstacle",
                      metric_cells([&](const RunResult& r) {
                        return r.metrics.stopped_distance_to_obstacle
                                   ? num(*r.metrics.stopped_distance_to_obstacle)
                                   : std::string("-");
                      }));
  text += "\n" + table_from_rows(status);

  for (std::size_t i = 0; i < 3; ++i) {
    if (!outcomes[i].completed) {
      text += "\n" + variant_name(kAllVariants[i]) +
              " failed: " + outcomes[i].error + "\n";
    }
  }
  return text;
}

int cmd_compare(const std::string& scenario_file,
                const std::string& config_flag, const std::string& out_dir,
                const std::string& command) {
  Scenario scenario;
  ResolvedConfig resolved;
  std::vector<std::pair<std::string, std::uint64_t>> digests;
  try {
    scenario = load_scenario(scenario_file);
    resolved = resolve_config(scenario_file, config_flag);
    digests = digest_inputs(scenario_file, scenario, resolved.file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    RunManifest manifest;
    manifest.command = command;
    manifest.input_digests = std::move(digests);
    manifest.outputs = {"manifest.txt", "comparison.txt"};
    for (Variant v : kAllVariants) {
      const std::string name = variant_name(v);
      fs::create_directories(fs::path(out_dir) / name);
      manifest.outputs.push_back(name + "/trajectory.csv");
      manifest.outputs.push_back(name + "/metrics.txt");
      manifest.outputs.push_back(name + "/plot.svg");
    }
    manifest.config_text = config_to_text(resolved.config);
    write_manifest(manifest, (fs::path(out_dir) / "manifest.txt").string());

    std::array<VariantOutcome, 3> outcomes;
    run_parallel(kAllVariants.size(), [&](std::size_t i) {
      AppConfig cfg = resolved.config;
      cfg.controller.variant = kAllVariants[i];
      try {
        outcomes[i].result = run_scenario(scenario, cfg);
        write_run_artifacts(
            fs::path(out_dir) / variant_name(kAllVariants[i]),
            outcomes[i].result, cfg);
        outcomes[i].completed = true;
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    });

    const std::string table = comparison_text(outcomes);
    write_text_file(fs::path(out_dir) / "comparison.txt", table);
    std::cout << table;

    const bool any_success =
        std::any_of(outcomes.begin(), outcomes.end(), [](const auto& o) {
          return o.completed && o.result.metrics.success;
        });
    return any_success ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const std::string& scenario_file, const std::string& config_flag,
              const std::string& param, const std::vector<double>& values,
              const std::string& out_dir, const std::string& command) {
  Scenario scenario;
  ResolvedConfig resolved;
  std::vector<std::pair<std::string, std::uint64_t>> digests;
  try {
    scenario = load_scenario(scenario_file);
    resolved = resolve_config(scenario_file, config_flag);
    digests = digest_inputs(scenario_file, scenario, resolved.file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  {
    ControllerConfig probe = resolved.config.controller;
    if (!set_controller_field(probe, param, probe.v_desired)) {
      std::cerr << "error: unknown parameter '" << param
                << "'\nvalid parameters:";
      for (const auto& name : controller_field_names()) {
        std::cerr << ' ' << name;
      }
      std::cerr << "\n";
      return 1;
    }
  }

  try {
    std::vector<std::string> run_dirs;
    run_dirs.reserve(values.size());
    for (double v : values) {
      run_dirs.push_back(param + "_" + format_double(v));
    }

    RunManifest manifest;
    manifest.command = command;
    manifest.input_digests = std::move(digests);
    manifest.outputs = {"manifest.txt", "sweep.csv"};
    for (const auto& dir : run_dirs) {
      fs::create_directories(fs::path(out_dir) / dir);
      manifest.outputs.push_back(dir + "/trajectory.csv");
      manifest.outputs.push_back(dir + "/metrics.txt");
      manifest.outputs.push_back(dir + "/plot.svg");
    }
    manifest.config_text = config_to_text(resolved.config);
    write_manifest(manifest, (fs::path(out_dir) / "manifest.txt").string());

    struct SweepOutcome {
      bool completed = false;
      std::string error;
      MetricsReport metrics;
    };
    std::vector<SweepOutcome> outcomes(values.size());
    run_parallel(values.size(), [&](std::size_t i) {
      AppConfig cfg = resolved.config;
      try {
        set_controller_field(cfg.controller, param, values[i]);
        cfg.controller.validate();
        const RunResult result = run_scenario(scenario, cfg);
        write_run_artifacts(fs::path(out_dir) / run_dirs[i], result, cfg);
        outcomes[i].metrics = result.metrics;
        outcomes[i].completed = true;
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    });

    std::ostringstream csv;
    csv << "value,average_distance_to_path,time,success\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto& o = outcomes[i];
      csv << format_double(values[i]) << ',';
      if (o.completed) {
        csv << format_double(o.metrics.average_distance_to_path) << ','
            << format_double(o.metrics.time) << ','
            << (o.metrics.success ? "true" : "false") << "\n";
      } else {
        csv << "nan,nan,false\n";
      }
    }
    write_text_file(fs::path(out_dir) / "sweep.csv", csv.str());
    std::cout << csv.str();

    bool all_completed = true;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (!outcomes[i].completed) {
        all_completed = false;
        std::cerr << param << "=" << format_double(values[i])
                  << " failed: " << outcomes[i].error << "\n";
      }
    }
    return all_completed ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

// ---------------------------------------------------------------------------
// gen

int cmd_gen(const std::string& kind_str, const std::string& out_dir,
            const std::string& command) {
  try {
    const ScenarioKind kind = parse_scenario_kind(kind_str);
    fs::create_directories(out_dir);

    RunManifest manifest;
    manifest.command = command;
    manifest.outputs = {"manifest.txt", "grid.txt", "path.csv", "scenario.ini",
                        "config.ini"};
    manifest.config_text = config_to_text(AppConfig{});
    write_manifest(manifest, (fs::path(out_dir) / "manifest.txt").string());

    const std::string scenario_path =
        generate_scenario(kind, GeneratorParams{}, out_dir);
    std::cout << scenario_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "pursuit_lab: pure pursuit controller family (pp/app/rpp), kinematic "
      "simulator, and benchmark scenario tools"};
  app.require_subcommand(1);

  std::string run_scenario_file, run_config, run_variant, run_out;
  auto* run =
      app.add_subcommand("run", "Run one scenario with one controller variant");
  run->add_option("scenario", run_scenario_file, "Scenario file (.ini)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--variant", run_variant,
                  "Controller variant (overrides the config file)")
      ->check(CLI::IsMember({"pp", "app", "rpp"}, CLI::ignore_case));
  run->add_option("--config", run_config, "Configuration file")
      ->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Output directory")->required();

  std::string cmp_scenario_file, cmp_config, cmp_out;
  auto* compare = app.add_subcommand(
      "compare", "Run pp, app, and rpp on the same scenario and tabulate");
  compare->add_option("scenario", cmp_scenario_file, "Scenario file (.ini)")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--config", cmp_config, "Configuration file")
      ->check(CLI::ExistingFile);
  compare->add_option("--out", cmp_out, "Output directory")->required();

  std::string swp_scenario_file, swp_config, swp_param, swp_out;
  std::vector<double> swp_values;
  auto* sweep = app.add_subcommand(
      "sweep", "Run a scenario once per value of one controller parameter");
  sweep->add_option("scenario", swp_scenario_file, "Scenario file (.ini)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--param", swp_param, "Controller parameter to vary")
      ->required();
  sweep
      ->add_option("--values", swp_values,
                   "Comma-separated parameter values, one run each")
      ->required()
      ->delimiter(',');
  sweep->add_option("--config", swp_config, "Configuration file")
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", swp_out, "Output directory")->required();

  std::string gen_kind, gen_out;
  auto* gen = app.add_subcommand(
      "gen", "Generate a benchmark scenario (grid, path, scenario, config)");
  gen->add_option("kind", gen_kind, "Scenario kind")
      ->required()
      ->check(CLI::IsMember(
          {"step_path", "blind_corner", "slalom", "waypoint_route"}));
  gen->add_option("--out", gen_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string command = command_line(argc, argv);
  try {
    if (run->parsed()) {
      std::optional<Variant> variant;
      if (run->count("--variant") > 0) variant = parse_variant(run_variant);
      return cmd_run(run_scenario_file, run_config, variant, run_out, command);
    }
    if (compare->parsed()) {
      return cmd_compare(cmp_scenario_file, cmp_config, cmp_out, command);
    }
    if (sweep->parsed()) {
      return cmd_sweep(swp_scenario_file, swp_config, swp_param, swp_values,
                       swp_out, command);
    }
    if (gen->parsed()) {
      return cmd_gen(gen_kind, gen_out, command);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace pursuit
