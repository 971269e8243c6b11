#include "vischase/mission.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace vischase {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

MissionAborted::MissionAborted(const Error& cause, double trigger_time, MissionLog partial)
    : Error(cause.kind(), cause.stage(),
            [&] {
              std::ostringstream msg;
              msg << "stage '" << cause.stage() << "' failed at replan time " << trigger_time << ": " << cause.what();
              return msg.str();
            }()),
      trigger_time_(trigger_time),
      partial_(std::move(partial)) {}

std::vector<double> MissionLog::trigger_times() const {
  std::vector<double> out;
  for (const auto& r : replans) out.push_back(r.trigger_time);
  return out;
}

// ---------------------------------------------------------------------------
// Replanning session

ReplanRecord replan_once(const DistanceField& field, const TargetPath& target, const ChaserState& state,
                         const PlannerConfig& cfg) {
  ReplanRecord rec;
  rec.trigger_time = state.stamp;
  rec.state = state;

  auto t = Clock::now();
  rec.forecast = forecast_window(target, state.stamp, cfg.H, cfg.N);
  rec.timings.forecast = seconds_since(t);

  t = Clock::now();
  const std::vector<CandidateSet> layers = generate_layers(field, rec.forecast, cfg);
  rec.timings.candidates = seconds_since(t);

  t = Clock::now();
  const LayeredGraph graph = connect_layers(field, state.position, rec.forecast, layers, cfg);
  rec.plan = shortest_path(graph);
  rec.timings.graph = seconds_since(t);

  t = Clock::now();
  const CorridorSequence corridors =
      build_corridors(field, rec.plan, cfg.M, cfg.corridor_shrink, CorridorLimits::defaults(field, cfg));
  rec.timings.corridor = seconds_since(t);

  t = Clock::now();
  TrajectoryResult traj = generate_trajectory(state, rec.plan, corridors, cfg, &field);
  rec.timings.qp = seconds_since(t);

  rec.trajectory = std::move(traj.trajectory);
  rec.corridors = std::move(traj.corridors);
  rec.relaxed_corridors = traj.relaxed;
  return rec;
}

// ---------------------------------------------------------------------------
// Mission loop

MissionResult run_mission(const Scenario& scenario) {
  const auto t = Clock::now();
  const DistanceField field = compute_edf(voxelize(scenario));
  return run_mission(scenario, field, seconds_since(t));
}

MissionResult run_mission(const Scenario& scenario, const DistanceField& field, double edf_seconds) {
  const PlannerConfig& cfg = scenario.config;
  const TargetPath& target = scenario.target_path;
  const double t_start = target.start_time();
  const double t_end = target.end_time();
  const double period = cfg.H - cfg.replan_slack;
  const double step = effective_step(field, cfg);

  MissionLog log;
  log.edf_seconds = edf_seconds;

  ChaserState state;
  state.position = scenario.chaser_init.pos;
  state.velocity = scenario.chaser_init.vel;
  state.acceleration = scenario.chaser_init.acc;
  state.stamp = t_start;

  auto sample_time = [&](long i) { return t_start + static_cast<double>(i) / cfg.log_rate; };
  long sample = 0;
  double yaw = 0.0;

  for (int k = 0;; ++k) {
    const double trigger = t_start + k * period;
    if (k > 0 && !(trigger < t_end)) break;
    state.stamp = trigger;
    const double next_trigger = t_start + (k + 1) * period;
    const bool last = !(next_trigger < t_end);
    const double until = last ? t_end : next_trigger;

    try {
      ReplanRecord rec = replan_once(field, target, state, cfg);
      rec.index = k;
      rec.execute_until = until;

      bool first = true;
      for (;; ++sample) {
        const double ts = sample_time(sample);
        if (last ? ts > t_end : !(ts < next_trigger)) break;
        LogSample s;
        s.t = ts;
        s.chaser_position = rec.trajectory.eval(ts, 0);
        s.chaser_velocity = rec.trajectory.eval(ts, 1);
        s.target_position = target.position(ts);
        if (!field.contains(s.chaser_position))
          throw Error(ErrorKind::OutOfRange, "execution", "chaser left the map");
        yaw = yaw_reference(rec.trajectory, target, ts, yaw);
        s.yaw = yaw;
        s.phi_chaser = field.phi(s.chaser_position);
        s.phi_target = field.phi(s.target_position);
        s.psi = psi(field, {s.chaser_position, s.target_position, step});
        s.below_safe = s.phi_chaser < cfg.r_safe;
        s.replan = first;
        first = false;
        log.samples.push_back(s);
      }

      state.position = rec.trajectory.eval(until, 0);
      state.velocity = rec.trajectory.eval(until, 1);
      state.acceleration = rec.trajectory.eval(until, 2);
      log.replans.push_back(std::move(rec));
    } catch (const MissionAborted&) {
      throw;
    } catch (const Error& e) {
      throw MissionAborted(e, trigger, std::move(log));
    }
    if (last) break;
  }

  MissionResult result;
  result.metrics = compute_metrics(log);
  result.log = std::move(log);
  return result;
}

// ---------------------------------------------------------------------------
// Metrics

MissionMetrics compute_metrics(const std::vector<LogSample>& samples) {
  MissionMetrics m;
  m.samples = samples.size();
  if (samples.empty()) return m;

  m.min_phi_chaser = std::numeric_limits<double>::infinity();
  double speed_int = 0.0, psi_int = 0.0, phi_p_int = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const LogSample& s = samples[i];
    m.min_phi_chaser = std::min(m.min_phi_chaser, s.phi_chaser);
    if (s.below_safe) ++m.unsafe_samples;
    if (i == 0) continue;
    const LogSample& p = samples[i - 1];
    const double dt = s.t - p.t;
    m.travel_distance += (s.chaser_position - p.chaser_position).norm();
    speed_int += 0.5 * dt * (p.chaser_velocity.norm() + s.chaser_velocity.norm());
    psi_int += 0.5 * dt * (p.psi + s.psi);
    phi_p_int += 0.5 * dt * (p.phi_target + s.phi_target);
    if (p.psi <= 0.0 && s.psi <= 0.0) m.occlusion_duration += dt;
  }
  m.duration = samples.back().t - samples.front().t;
  if (m.duration > 0) {
    m.average_speed = speed_int / m.duration;
    m.average_psi = psi_int / m.duration;
    m.average_phi_target = phi_p_int / m.duration;
  } else {
    m.average_speed = samples.front().chaser_velocity.norm();
    m.average_psi = samples.front().psi;
    m.average_phi_target = samples.front().phi_target;
  }
  return m;
}

TimingSummary summarize_timings(const MissionLog& log) {
  TimingSummary s;
  s.edf = log.edf_seconds;
  s.replans = log.replans.size();
  if (log.replans.empty()) return s;
  auto accumulate = [](StageTimings& sum, StageTimings& mx, const StageTimings& t) {
    sum.forecast += t.forecast;
    sum.candidates += t.candidates;
    sum.graph += t.graph;
    sum.corridor += t.corridor;
    sum.qp += t.qp;
    mx.forecast = std::max(mx.forecast, t.forecast);
    mx.candidates = std::max(mx.candidates, t.candidates);
    mx.graph = std::max(mx.graph, t.graph);
    mx.corridor = std::max(mx.corridor, t.corridor);
    mx.qp = std::max(mx.qp, t.qp);
  };
  for (const auto& r : log.replans) accumulate(s.mean, s.max, r.timings);
  const double n = static_cast<double>(log.replans.size());
  s.mean.forecast /= n;
  s.mean.candidates /= n;
  s.mean.graph /= n;
  s.mean.corridor /= n;
  s.mean.qp /= n;
  return s;
}

std::vector<ComparisonRow> compare_runs(const Scenario& scenario, const std::vector<double>& weights) {
  if (weights.empty()) throw Error(ErrorKind::InvalidInput, "compare", "at least one visibility weight is required");
  const DistanceField field = compute_edf(voxelize(scenario));
  std::vector<ComparisonRow> rows;
  for (double w : weights) {
    ComparisonRow row;
    row.w_v = w;
    Scenario variant = scenario;
    variant.config.w_v = w;
    try {
      variant.config.validate();
      row.metrics = run_mission(variant, field).metrics;
    } catch (const Error& e) {
      row.error = e.what();
      row.error_stage = e.stage();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace vischase
