// inspecsim: plan, simulate, analyze, serve.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "inspecsim/analysis.hpp"
#include "inspecsim/scenario.hpp"
#include "inspecsim/serve.hpp"

using namespace inspecsim;
namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted.store(true); }

int fail(const std::string& code, const std::string& message, int status) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << std::endl;
  return status;
}

std::string log_dir(const std::string& flag) {
  if (const char* env = std::getenv("INSPECSIM_LOG_DIR"); env && *env) return env;
  return flag;
}

json print_defaults() {
  return json{{"vehicle", VehicleParams{}.to_json()},
              {"noise", NoiseModel{}.to_json()},
              {"estimator", EstimatorParams{}.to_json()},
              {"disturbance", DisturbanceParams{}.to_json()},
              {"spiral", SpiralParams{}.to_json()},
              {"sampling", ViewpointParams{}.to_json()},
              {"mission",
               {{"takeoff_altitude", 0.3}, {"landing_rate", 0.2}, {"box_half_side", 0.075}, {"dwell_required", 0.5}}},
              {"safety_margin", WorldModel::kDefaultSafetyMargin}};
}

/// Planner flags. Set values override the --params file key by key.
struct PlanFlags {
  std::optional<double> standoff, z_min, z_max, vertical_interval;
  std::optional<int> points_per_ring;
  std::optional<std::string> direction;
  std::optional<double> d_min, d_max, max_incidence_deg, facet_size;
  std::optional<int> samples_per_facet, resample_rounds;
  std::optional<std::uint64_t> rng_seed;

  void apply(json& params) const {
    auto put = [&](const char* key, const auto& v) {
      if (v) params[key] = *v;
    };
    put("standoff", standoff);
    put("z_min", z_min);
    put("z_max", z_max);
    put("vertical_interval", vertical_interval);
    put("points_per_ring", points_per_ring);
    put("direction", direction);
    put("d_min", d_min);
    put("d_max", d_max);
    put("max_incidence_deg", max_incidence_deg);
    put("facet_size", facet_size);
    put("samples_per_facet", samples_per_facet);
    put("resample_rounds", resample_rounds);
    put("rng_seed", rng_seed);
  }
};

int cmd_plan(const std::string& planner, const std::string& world_file, const std::string& params_file,
             const PlanFlags& flags, const std::string& out) {
  const WorldModel world = WorldModel::load(world_file);
  json spec{{"planner", planner}, {"params", json::object()}};
  if (!params_file.empty()) spec["params"] = read_json_file(params_file);
  flags.apply(spec["params"]);
  const InspectionPath path = plan_from_spec(world, spec);
  write_text_file(out, path.to_json().dump(2) + "\n");
  std::cout << json{{"planner", planner}, {"waypoints", path.size()}, {"length", path.length()},
                    {"coverage", path.coverage}, {"out", out}}.dump()
            << std::endl;
  return 0;
}

int cmd_simulate(const std::string& scenario_file, const std::string& dir_flag, std::optional<std::uint64_t> seed) {
  Scenario sc = Scenario::load(scenario_file);
  if (seed) sc = sc.with_seed(*seed);
  const HeadlessResult res = run_headless(sc);

  const fs::path dir = log_dir(dir_flag);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create log directory '" + dir.string() + "': " + ec.message());
  const std::string log_path = (dir / (sc.name + ".ndjson")).string();
  const std::string report_path = (dir / (sc.name + ".report.json")).string();
  res.log.save(log_path);
  if (!res.report) throw Error(ErrorCode::NoAutonomousSegment, "mission never reached Autonomous; log written to " + log_path);
  export_report(*res.report, res.log, report_path);

  std::cout << json{{"scenario", sc.name},
                    {"mission_complete", res.mission_complete},
                    {"final_mode", to_string(res.final_mode)},
                    {"log", log_path},
                    {"report", report_path},
                    {"mae_xy", res.report->mae_xy},
                    {"mae_z", res.report->mae_z}}.dump()
            << std::endl;
  return res.mission_complete ? 0 : 1;
}

int cmd_analyze(const std::string& log_file, const std::string& out, double settle_skip) {
  const FlightLog log = FlightLog::load(log_file);
  const TrackingReport rep = compute_report(log, settle_skip);
  export_report(rep, log, out);
  std::cout << rep.to_json().dump() << std::endl;
  return 0;
}

int cmd_serve(const std::string& scenario_file, const ServeOptions& opts, double duration) {
  SimServer server(Scenario::load(scenario_file), opts);
  const unsigned short port = server.start();
  std::cout << json{{"listening", opts.address}, {"port", port}, {"speed", opts.speed}}.dump() << std::endl;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const auto t0 = std::chrono::steady_clock::now();
  while (!g_interrupted.load()) {
    if (duration > 0.0 && std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >= duration) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Indoor inspection-flight simulator"};
  app.require_subcommand(1);

  std::string planner, world_file, params_file, plan_out;
  auto* plan = app.add_subcommand("plan", "Plan an inspection path");
  plan->add_option("planner", planner, "spiral or sampling")->required()->check(CLI::IsMember({"spiral", "sampling"}));
  plan->add_option("--world", world_file, "World JSON")->required();
  plan->add_option("--params", params_file, "Planner parameters JSON");
  plan->add_option("--out", plan_out, "Output path JSON")->required();
  PlanFlags pf;
  plan->add_option("--standoff", pf.standoff, "spiral: ring distance beyond the footprint (m)");
  plan->add_option("--z-min", pf.z_min, "spiral: lowest ring (m)");
  plan->add_option("--z-max", pf.z_max, "spiral: highest ring (m)");
  plan->add_option("--vertical-interval", pf.vertical_interval, "spiral: ring spacing (m)");
  plan->add_option("--points-per-ring", pf.points_per_ring, "spiral: waypoints per ring");
  plan->add_option("--direction", pf.direction, "spiral: ccw or cw")->check(CLI::IsMember({"ccw", "cw"}));
  plan->add_option("--d-min", pf.d_min, "sampling: minimum viewing distance (m)");
  plan->add_option("--d-max", pf.d_max, "sampling: maximum viewing distance (m)");
  plan->add_option("--max-incidence-deg", pf.max_incidence_deg, "sampling: incidence limit (deg)");
  plan->add_option("--facet-size", pf.facet_size, "sampling: facet edge length (m)");
  plan->add_option("--samples-per-facet", pf.samples_per_facet, "sampling: candidate draws per facet");
  plan->add_option("--resample-rounds", pf.resample_rounds, "sampling: improvement rounds");
  plan->add_option("--rng-seed", pf.rng_seed, "sampling: random seed");

  std::string scenario_file, dir_flag = "logs";
  std::optional<std::uint64_t> seed;
  auto* sim = app.add_subcommand("simulate", "Run a scenario headless");
  sim->add_option("--scenario", scenario_file, "Scenario JSON")->required();
  sim->add_option("--log-dir", dir_flag, "Output directory (INSPECSIM_LOG_DIR overrides)");
  sim->add_option("--seed", seed, "Reseed noise and disturbance");

  std::string log_file, report_out;
  double settle_skip = 0.0;
  auto* analyze = app.add_subcommand("analyze", "Score a flight log");
  analyze->add_option("--log", log_file, "NDJSON flight log")->required();
  analyze->add_option("--out", report_out, "Report JSON (CSVs written alongside)")->required();
  analyze->add_option("--settle-skip", settle_skip, "Seconds skipped after each advance");

  ServeOptions serve_opts;
  double duration = 0.0;
  auto* serve = app.add_subcommand("serve", "Live simulation over WebSocket");
  serve->add_option("--scenario", scenario_file, "Scenario JSON")->required();
  serve->add_option("--port", serve_opts.port, "TCP port, 0 for any");
  serve->add_option("--address", serve_opts.address, "Bind address");
  serve->add_option("--speed", serve_opts.speed, "Real-time multiplier, 0 unpaced");
  serve->add_option("--duration", duration, "Stop after this many wall seconds (0 = until signalled)");

  auto* defaults = app.add_subcommand("print-defaults", "Print default parameters");
  auto* sim_alias = app.add_subcommand("sim", "Alias group: sim print-defaults");
  auto* sim_defaults = sim_alias->add_subcommand("print-defaults", "Print default parameters");
  sim_alias->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*plan) return cmd_plan(planner, world_file, params_file, pf, plan_out);
    if (*sim) return cmd_simulate(scenario_file, dir_flag, seed);
    if (*analyze) return cmd_analyze(log_file, report_out, settle_skip);
    if (*serve) return cmd_serve(scenario_file, serve_opts, duration);
    if (*defaults || *sim_defaults) {
      std::cout << print_defaults().dump(2) << std::endl;
      return 0;
    }
  } catch (const Error& e) {
    return fail(std::string(to_string(e.code())), e.what(), exit_code(e.code()));
  } catch (const std::exception& e) {
    return fail("Internal", e.what(), 70);
  }
  return 2;
}
