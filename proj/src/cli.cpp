#include "vischase/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vischase/io.hpp"
#include "vischase/mission.hpp"

namespace vischase::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stages whose errors describe the request rather than the planning problem.
bool is_input_stage(const std::string& stage) {
  static const char* const stages[] = {"cli", "scenario", "voxelize", "metrics", "fields", "compare"};
  return std::any_of(std::begin(stages), std::end(stages), [&](const char* s) { return stage == s; });
}

struct Common {
  std::string scenario;
  std::string out = ".";
  std::vector<std::string> overrides;
};

double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
    throw Error(ErrorKind::InvalidInput, "cli", what + ": '" + text + "' is not a finite number");
  return v;
}

Vec3 parse_triple(const std::string& text, const std::string& what) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(parse_number(item, what));
  if (parts.size() != 3) throw Error(ErrorKind::InvalidInput, "cli", what + ": expected x,y,z");
  return Vec3(parts[0], parts[1], parts[2]);
}

// --set values are written into the config object, then parsed like file values.
Scenario load_with_overrides(const Common& c) {
  json doc = load_scenario_document(c.scenario);
  if (!doc.is_object()) throw Error(ErrorKind::InvalidInput, "scenario", "top level must be an object");
  if (!doc.contains("config")) doc["config"] = json::object();
  const auto& keys = config_keys();
  for (const auto& o : c.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorKind::InvalidInput, "cli", "override '" + o + "' must look like key=value");
    const std::string key = o.substr(0, eq);
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw Error(ErrorKind::InvalidInput, "cli", "unknown config key '" + key + "'");
    doc["config"][key] = parse_number(o.substr(eq + 1), "override " + key);
  }
  return parse_scenario(doc);
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorKind::Io, "output", "cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

void write_effective_config(const fs::path& out, const Scenario& s, const Common& c) {
  write_json(out / "effective_config.json", {{"config", config_to_json(s.config)}, {"overrides", c.overrides}});
}

void add_common(CLI::App* sub, Common& c, bool with_scenario = true) {
  if (with_scenario) sub->add_option("--scenario", c.scenario, "Scenario JSON file")->required();
  sub->add_option("--out", c.out, "Output directory (created if missing)")->capture_default_str();
  if (with_scenario)
    sub->add_option("--set", c.overrides, "Config override key=value (repeatable)")->allow_extra_args(false);
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// ---------------------------------------------------------------------------
// Subcommands

int run_plan(const Common& c, std::optional<double> t_opt, std::optional<double> rate_opt, std::ostream& out) {
  const Scenario s = load_with_overrides(c);
  const fs::path dir = prepare_out(c.out);
  write_effective_config(dir, s, c);

  const auto t_edf = std::chrono::steady_clock::now();
  const DistanceField field = compute_edf(voxelize(s));
  const double edf_seconds = seconds_since(t_edf);

  ChaserState state;
  state.position = s.chaser_init.pos;
  state.velocity = s.chaser_init.vel;
  state.acceleration = s.chaser_init.acc;
  state.stamp = t_opt.value_or(s.target_path.start_time());

  ReplanRecord rec = replan_once(field, s.target_path, state, s.config);
  const double rate = rate_opt.value_or(s.config.log_rate);
  if (!(rate > 0)) throw Error(ErrorKind::InvalidInput, "cli", "--rate must be positive");

  write_json(dir / "plan_0.json", replan_to_json(rec));
  write_json(dir / "trajectory.json", trajectory_to_json(rec.trajectory));
  write_text(dir / "trajectory.csv", trajectory_to_csv(rec.trajectory, s.target_path, rate));
  write_json(dir / "timings.json", {{"edf", edf_seconds}, {"replan", timings_to_json(rec.timings)}});

  out << "plan at t=" << state.stamp << ": " << rec.plan.N() << " segments, cost " << rec.plan.total_cost
      << ", " << rec.corridors.entries.size() << " corridor boxes"
      << (rec.relaxed_corridors ? " (relaxed)" : "") << ", replan " << rec.timings.total() << " s\n";
  return kOk;
}

void write_mission(const fs::path& dir, const MissionLog& log) {
  write_text(dir / "log.csv", log_to_csv(log.samples));
  json pieces = json::array();
  json triggers = json::array();
  for (const auto& r : log.replans) {
    write_json(dir / ("plan_" + std::to_string(r.index) + ".json"), replan_to_json(r));
    pieces.push_back({{"trigger_time", r.trigger_time},
                      {"execute_until", r.execute_until},
                      {"trajectory", trajectory_to_json(r.trajectory)}});
    triggers.push_back(r.trigger_time);
  }
  write_json(dir / "trajectory.json", {{"pieces", pieces}});
  write_json(dir / "replans.json", {{"trigger_times", triggers}});
  json timings = timing_summary_to_json(summarize_timings(log));
  timings["per_replan"] = json::array();
  for (const auto& r : log.replans)
    timings["per_replan"].push_back({{"trigger_time", r.trigger_time}, {"stages", timings_to_json(r.timings)}});
  write_json(dir / "timings.json", timings);
}

int run_simulate(const Common& c, std::ostream& out) {
  const Scenario s = load_with_overrides(c);
  const fs::path dir = prepare_out(c.out);
  write_effective_config(dir, s, c);
  try {
    const MissionResult r = run_mission(s);
    write_mission(dir, r.log);
    write_json(dir / "metrics.json", metrics_to_json(r.metrics));
    const auto& m = r.metrics;
    out << "mission: " << r.log.replans.size() << " replans, " << m.samples << " samples, travel "
        << m.travel_distance << " m, occlusion " << m.occlusion_duration << " s, min phi " << m.min_phi_chaser
        << " m, unsafe samples " << m.unsafe_samples << "\n";
  } catch (const MissionAborted& e) {
    write_mission(dir, e.partial_log());
    throw;
  }
  return kOk;
}

int run_compare(const Common& c, const std::vector<double>& weights, std::ostream& out) {
  const Scenario s = load_with_overrides(c);
  const fs::path dir = prepare_out(c.out);
  write_effective_config(dir, s, c);
  const auto rows = compare_runs(s, weights);
  write_json(dir / "comparison.json", comparison_to_json(rows));
  bool any = false;
  for (const auto& r : rows) {
    out << "w_v=" << r.w_v << ": ";
    if (r.metrics) {
      any = true;
      out << "occlusion " << r.metrics->occlusion_duration << " s, avg psi " << r.metrics->average_psi
          << " m, travel " << r.metrics->travel_distance << " m\n";
    } else {
      out << "failed in " << r.error_stage << ": " << r.error << "\n";
    }
  }
  return any ? kOk : kInfeasible;
}

int run_fields(const Common& c, double z, const std::string& target_text, std::ostream& out) {
  const Scenario s = load_with_overrides(c);
  const Vec3 target = parse_triple(target_text, "--target");
  const fs::path dir = prepare_out(c.out);
  write_effective_config(dir, s, c);
  const DistanceField field = compute_edf(voxelize(s));
  if (!field.contains(target)) throw Error(ErrorKind::OutOfRange, "fields", "--target lies outside the map");
  const Vec3 lo = field.origin();
  const Vec3 hi = field.upper();
  if (!(z >= lo.z() && z <= hi.z())) throw Error(ErrorKind::OutOfRange, "fields", "--slice-z lies outside the map");

  const double step = effective_step(field, s.config);
  const auto& d = field.dims();
  auto dump = [&](bool with_psi) {
    std::ostringstream hdr;
    hdr << "# origin_x=" << format_double(field.center({0, 0, 0}).x())
        << " origin_y=" << format_double(field.center({0, 0, 0}).y()) << " z=" << format_double(z)
        << " resolution=" << format_double(field.resolution()) << " nx=" << d[0] << " ny=" << d[1];
    if (with_psi)
      hdr << " target=" << format_double(target.x()) << "," << format_double(target.y()) << ","
          << format_double(target.z());
    std::string text = hdr.str() + "\n";
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        Vec3 x = field.center({i, j, 0});
        x.z() = z;
        if (i) text += ',';
        text += format_double(with_psi ? psi(field, {x, target, step}) : field.phi(x));
      }
      text += '\n';
    }
    return text;
  };
  write_text(dir / "phi_slice.csv", dump(false));
  write_text(dir / "psi_slice.csv", dump(true));
  out << "wrote " << d[0] << "x" << d[1] << " slices at z=" << z << "\n";
  return kOk;
}

int run_metrics(const std::string& log_path, const std::string& out_dir, std::ostream& out) {
  const auto samples = parse_log_csv(read_text(log_path));
  const fs::path dir = prepare_out(out_dir);
  const MissionMetrics m = compute_metrics(samples);
  write_json(dir / "metrics.json", metrics_to_json(m));
  out << "metrics over " << m.samples << " samples: travel " << m.travel_distance << " m, occlusion "
      << m.occlusion_duration << " s\n";
  return kOk;
}

void report(std::ostream& err, int code, const std::string& kind, const std::string& stage,
            const std::string& message, const json& extra = json::object()) {
  json e = {{"kind", kind}, {"stage", stage}, {"message", message}, {"exit_code", code}};
  for (auto it = extra.begin(); it != extra.end(); ++it) e[it.key()] = it.value();
  err << json{{"error", e}}.dump() << "\n";
}

}  // namespace

int exit_code_for(const Error& e) {
  if (e.kind() == ErrorKind::Io) return kIo;
  if ((e.kind() == ErrorKind::InvalidInput || e.kind() == ErrorKind::OutOfRange) && is_input_stage(e.stage()))
    return kUsage;
  return kInfeasible;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Visibility-aware target chasing planner"};
  app.name("vischase");
  app.require_subcommand(1);

  Common common;

  auto* plan = app.add_subcommand("plan", "Single replanning session; writes plan_0.json and the trajectory");
  add_common(plan, common);
  std::optional<double> plan_t;
  std::optional<double> plan_rate;
  plan->add_option("--t", plan_t, "Replan time (default: first target timestamp)");
  plan->add_option("--rate", plan_rate, "trajectory.csv sample rate in Hz (default: log_rate)");

  auto* sim = app.add_subcommand("simulate", "Receding-horizon mission; writes log.csv, metrics.json, plans");
  add_common(sim, common);

  auto* cmp = app.add_subcommand("compare", "One mission per visibility weight; writes comparison.json");
  add_common(cmp, common);
  std::vector<double> weights;
  cmp->add_option("--wv", weights, "Comma-separated visibility weights, e.g. 1.0,7.5")->required()->delimiter(',');

  auto* fld = app.add_subcommand("fields", "Horizontal slices of phi and psi; writes phi_slice.csv, psi_slice.csv");
  add_common(fld, common);
  double slice_z = 0.0;
  std::string target;
  fld->add_option("--slice-z", slice_z, "Slice height in metres")->required();
  fld->add_option("--target", target, "Target position x,y,z for the psi slice")->required();

  auto* met = app.add_subcommand("metrics", "Recompute metrics.json from a log.csv");
  Common met_common;
  std::string log_path;
  met->add_option("--log", log_path, "Mission log CSV")->required();
  add_common(met, met_common, false);

  std::vector<std::string> argv_store;
  argv_store.push_back("vischase");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report(err, kUsage, "usage", "cli", e.what());
    return kUsage;
  }

  try {
    if (*plan) return run_plan(common, plan_t, plan_rate, out);
    if (*sim) return run_simulate(common, out);
    if (*cmp) return run_compare(common, weights, out);
    if (*fld) return run_fields(common, slice_z, target, out);
    if (*met) return run_metrics(log_path, met_common.out, out);
  } catch (const MissionAborted& e) {
    const int code = exit_code_for(e);
    report(err, code, to_string(e.kind()), e.stage(), e.what(), {{"trigger_time", e.trigger_time()}});
    return code;
  } catch (const Error& e) {
    const int code = exit_code_for(e);
    report(err, code, to_string(e.kind()), e.stage(), e.what());
    return code;
  } catch (const nlohmann::json::exception& e) {
    report(err, kUsage, "invalid_input", "scenario", e.what());
    return kUsage;
  }
  return kUsage;
}

}  // namespace vischase::cli
