#include "vischase/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vischase/error.hpp"

namespace vischase {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

namespace {

// JSON has no infinity; emit a string so readers can tell it from a number.
json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

json edge_cost_to_json(const EdgeCost& e) {
  return {{"interval", e.interval},
          {"visibility", number_or_inf(e.visibility)},
          {"tracking", e.tracking},
          {"integral_prev", e.integral_prev},
          {"integral_next", e.integral_next},
          {"total", number_or_inf(e.total)}};
}

json plan_to_json(const WaypointPlan& plan) {
  json wps = json::array();
  for (const auto& w : plan.waypoints) wps.push_back(vec_to_json(w));
  json edges = json::array();
  for (const auto& e : plan.edges) edges.push_back(edge_cost_to_json(e));
  return {{"times", plan.times},
          {"waypoints", wps},
          {"candidate_index", plan.candidate_index},
          {"edges", edges},
          {"total_cost", plan.total_cost},
          {"candidate_counts", plan.candidate_counts},
          {"edge_count", plan.edge_count}};
}

json corridors_to_json(const CorridorSequence& corridors) {
  json boxes = json::array();
  for (const auto& b : corridors.entries)
    boxes.push_back({{"tau", b.tau},
                     {"segment", b.segment},
                     {"center", vec_to_json(b.center)},
                     {"half_extent", vec_to_json(b.half_extent)},
                     {"lower", vec_to_json(b.lower())},
                     {"upper", vec_to_json(b.upper())}});
  return {{"shrink", corridors.shrink}, {"boxes", boxes}};
}

json trajectory_to_json(const PiecewisePolynomial& traj) {
  json segs = json::array();
  for (const auto& c : traj.coefficients()) {
    json rows = json::array();
    for (int a = 0; a < 3; ++a) {
      json row = json::array();
      for (int k = 0; k < c.cols(); ++k) row.push_back(c(a, k));
      rows.push_back(row);
    }
    segs.push_back(rows);
  }
  return {{"knots", traj.knots()}, {"order", traj.order()}, {"basis", "local monomial"}, {"coefficients", segs}};
}

json replan_to_json(const ReplanRecord& rec) {
  json forecast = json::array();
  for (const auto& p : rec.forecast.samples) forecast.push_back(vec_to_json(p));
  return {{"index", rec.index},
          {"trigger_time", rec.trigger_time},
          {"execute_until", rec.execute_until},
          {"state",
           {{"position", vec_to_json(rec.state.position)},
            {"velocity", vec_to_json(rec.state.velocity)},
            {"acceleration", vec_to_json(rec.state.acceleration)}}},
          {"target_forecast", forecast},
          {"plan", plan_to_json(rec.plan)},
          {"corridors", corridors_to_json(rec.corridors)},
          {"relaxed_corridors", rec.relaxed_corridors},
          {"trajectory", trajectory_to_json(rec.trajectory)}};
}

json metrics_to_json(const MissionMetrics& m) {
  return {{"duration", m.duration},
          {"travel_distance", m.travel_distance},
          {"average_speed", m.average_speed},
          {"average_psi", m.average_psi},
          {"occlusion_duration", m.occlusion_duration},
          {"min_phi_chaser", m.min_phi_chaser},
          {"average_phi_target", m.average_phi_target},
          {"samples", m.samples},
          {"unsafe_samples", m.unsafe_samples}};
}

json timings_to_json(const StageTimings& t) {
  return {{"forecast", t.forecast}, {"candidates", t.candidates}, {"graph", t.graph},
          {"corridor", t.corridor}, {"qp", t.qp},                 {"total", t.total()}};
}

json timing_summary_to_json(const TimingSummary& s) {
  return {{"edf", s.edf}, {"replans", s.replans}, {"mean", timings_to_json(s.mean)}, {"max", timings_to_json(s.max)}};
}

json comparison_to_json(const std::vector<ComparisonRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json row = {{"w_v", r.w_v}};
    if (r.metrics) {
      row["metrics"] = metrics_to_json(*r.metrics);
    } else {
      row["metrics"] = nullptr;
      row["error"] = {{"stage", r.error_stage}, {"message", r.error}};
    }
    out.push_back(row);
  }
  return {{"runs", out}};
}

// ---------------------------------------------------------------------------
// CSV

const std::string& log_csv_header() {
  static const std::string h =
      "t,x,y,z,vx,vy,vz,target_x,target_y,target_z,yaw,psi,phi_chaser,phi_target,below_safe,replan";
  return h;
}

std::string log_to_csv(const std::vector<LogSample>& samples) {
  std::string out = log_csv_header() + "\n";
  for (const auto& s : samples) {
    const double cols[] = {s.t,
                           s.chaser_position.x(),
                           s.chaser_position.y(),
                           s.chaser_position.z(),
                           s.chaser_velocity.x(),
                           s.chaser_velocity.y(),
                           s.chaser_velocity.z(),
                           s.target_position.x(),
                           s.target_position.y(),
                           s.target_position.z(),
                           s.yaw,
                           s.psi,
                           s.phi_chaser,
                           s.phi_target};
    for (double c : cols) {
      out += format_double(c);
      out += ',';
    }
    out += s.below_safe ? '1' : '0';
    out += ',';
    out += s.replan ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::vector<LogSample> parse_log_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != log_csv_header())
    throw Error(ErrorKind::InvalidInput, "metrics", "log header does not match the mission log format");
  std::vector<LogSample> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v[16];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int c = 0; c < 16; ++c) {
      const auto res = std::from_chars(p, end, v[c]);
      const bool last = c == 15;
      if (res.ec != std::errc() || (last ? res.ptr != end : (res.ptr == end || *res.ptr != ',')))
        throw Error(ErrorKind::InvalidInput, "metrics",
                    "malformed log row at line " + std::to_string(lineno) + ", column " + std::to_string(c + 1));
      p = res.ptr + (last ? 0 : 1);
    }
    LogSample s;
    s.t = v[0];
    s.chaser_position = Vec3(v[1], v[2], v[3]);
    s.chaser_velocity = Vec3(v[4], v[5], v[6]);
    s.target_position = Vec3(v[7], v[8], v[9]);
    s.yaw = v[10];
    s.psi = v[11];
    s.phi_chaser = v[12];
    s.phi_target = v[13];
    s.below_safe = v[14] != 0.0;
    s.replan = v[15] != 0.0;
    if (!out.empty() && !(s.t > out.back().t))
      throw Error(ErrorKind::InvalidInput, "metrics",
                  "log timestamps must increase strictly (line " + std::to_string(lineno) + ")");
    out.push_back(s);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidInput, "metrics", "log has no samples");
  return out;
}

std::string trajectory_to_csv(const PiecewisePolynomial& traj, const TargetPath& target, double rate) {
  std::string out = "t,x,y,z,vx,vy,vz,ax,ay,az,yaw,speed\n";
  double yaw = 0.0;
  const double t0 = traj.start_time();
  const double t1 = traj.end_time();
  const long count = static_cast<long>(std::floor((t1 - t0) * rate + 1e-9));
  auto row = [&](double t) {
    out += format_double(t);
    for (int d = 0; d < 3; ++d) {
      const Vec3 v = traj.eval(t, d);
      for (int a = 0; a < 3; ++a) {
        out += ',';
        out += format_double(v[a]);
      }
    }
    yaw = yaw_reference(traj, target, t, yaw);
    out += ',';
    out += format_double(yaw);
    out += ',';
    out += format_double(traj.eval(t, 1).norm());
    out += '\n';
  };
  for (long i = 0; i <= count; ++i) row(std::min(t1, t0 + static_cast<double>(i) / rate));
  if (t0 + static_cast<double>(count) / rate < t1) row(t1);
  return out;
}

// ---------------------------------------------------------------------------
// Files

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "output", "cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error(ErrorKind::Io, "output", "failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "input", "cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace vischase
