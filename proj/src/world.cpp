#include "vischase/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vischase/error.hpp"

namespace vischase {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

[[noreturn]] void fail(const std::string& msg) {
  throw Error(ErrorKind::InvalidInput, "scenario", msg);
}

Vec3 read_vec3(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where + ": expected an array of 3 numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) fail(where + "[" + std::to_string(i) + "]: expected a number");
    out[i] = v[i].get<double>();
  }
  return out;
}

double read_number(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail(where + ": missing field '" + key + "'");
  if (!obj[key].is_number()) fail(where + "." + key + ": expected a number");
  return obj[key].get<double>();
}

bool all_finite(const Vec3& v) { return v.allFinite(); }

Index3 grid_dims(const Scenario& s) {
  Index3 dims;
  for (int a = 0; a < 3; ++a) {
    const double extent = s.bounds_max[a] - s.bounds_min[a];
    dims[a] = std::max(1, static_cast<int>(std::ceil(extent / s.resolution - 1e-9)));
  }
  return dims;
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Io: return "io";
    case ErrorKind::Numerical: return "numerical";
  }
  return "unknown";
}

bool Box::contains(const Vec3& x) const {
  return ((x - center).cwiseAbs().array() <= half_extent.array()).all();
}

// ---------------------------------------------------------------------------
// TargetPath

TargetPath::TargetPath(std::vector<TargetKnot> knots) : knots_(std::move(knots)) {}

Vec3 TargetPath::position(double t) const {
  if (knots_.empty()) throw Error(ErrorKind::InvalidInput, "forecast", "empty target path");
  if (t <= knots_.front().t) return knots_.front().pos;
  if (t >= knots_.back().t) return knots_.back().pos;
  auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double v, const TargetKnot& k) { return v < k.t; });
  auto lo = hi - 1;
  const double s = (t - lo->t) / (hi->t - lo->t);
  return lo->pos + s * (hi->pos - lo->pos);
}

double TargetPath::start_time() const { return knots_.empty() ? 0.0 : knots_.front().t; }
double TargetPath::end_time() const { return knots_.empty() ? 0.0 : knots_.back().t; }

// ---------------------------------------------------------------------------
// PlannerConfig

void PlannerConfig::validate() const {
  auto bad = [](const std::string& m) { fail("config: " + m); };
  if (!(H > 0)) bad("H must be positive");
  if (N < 1) bad("N must be at least 1");
  if (!(w_v >= 0) || !(w_d >= 0)) bad("weights w_v, w_d must be nonnegative");
  if (!(lambda >= 0)) bad("lambda must be nonnegative");
  if (!(0 < d_lower && d_lower <= d_des && d_des <= d_upper))
    bad("tracking distances must satisfy 0 < d_lower <= d_des <= d_upper");
  if (!(d_max > 0)) bad("d_max must be positive");
  if (!(r_safe >= 0)) bad("r_safe must be nonnegative");
  constexpr double half_pi = 3.14159265358979323846 / 2.0;
  if (!(0 < theta_min && theta_min < theta_max && theta_max < half_pi))
    bad("elevation bounds must satisfy 0 < theta_min < theta_max < 90 deg");
  if (K < 5) bad("polynomial order K must be at least 5");
  if (M < 1) bad("corridor count M must be at least 1");
  if (!(omega_res > 0)) bad("omega_res must be positive");
  if (!(0 < replan_slack && replan_slack < H)) bad("replan_slack must lie in (0, H)");
  if (!(0 < corridor_shrink && corridor_shrink <= 1)) bad("corridor_shrink must lie in (0, 1]");
  if (!(log_rate > 0)) bad("log_rate must be positive");
  if (!(psi_step >= 0)) bad("psi_step must be nonnegative");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "w_v",  "w_d",           "lambda",        "d_des", "d_lower", "d_upper",
      "d_max", "r_safe",       "theta_min_deg", "theta_max_deg", "H", "N",
      "K",    "M",             "omega_res",     "replan_slack", "corridor_shrink",
      "log_rate", "psi_step"};
  return keys;
}

void apply_config_value(PlannerConfig& cfg, const std::string& key, double value) {
  auto as_int = [&](int& dst) {
    if (std::floor(value) != value) fail("config." + key + ": expected an integer");
    dst = static_cast<int>(value);
  };
  if (key == "w_v") cfg.w_v = value;
  else if (key == "w_d") cfg.w_d = value;
  else if (key == "lambda") cfg.lambda = value;
  else if (key == "d_des") cfg.d_des = value;
  else if (key == "d_lower") cfg.d_lower = value;
  else if (key == "d_upper") cfg.d_upper = value;
  else if (key == "d_max") cfg.d_max = value;
  else if (key == "r_safe") cfg.r_safe = value;
  else if (key == "theta_min_deg") cfg.theta_min = value * kDegToRad;
  else if (key == "theta_max_deg") cfg.theta_max = value * kDegToRad;
  else if (key == "H") cfg.H = value;
  else if (key == "N") as_int(cfg.N);
  else if (key == "K") as_int(cfg.K);
  else if (key == "M") as_int(cfg.M);
  else if (key == "omega_res") cfg.omega_res = value;
  else if (key == "replan_slack") cfg.replan_slack = value;
  else if (key == "corridor_shrink") cfg.corridor_shrink = value;
  else if (key == "log_rate") cfg.log_rate = value;
  else if (key == "psi_step") cfg.psi_step = value;
  else fail("config: unknown key '" + key + "'");
}

nlohmann::json config_to_json(const PlannerConfig& cfg) {
  return {
      {"w_v", cfg.w_v},
      {"w_d", cfg.w_d},
      {"lambda", cfg.lambda},
      {"d_des", cfg.d_des},
      {"d_lower", cfg.d_lower},
      {"d_upper", cfg.d_upper},
      {"d_max", cfg.d_max},
      {"r_safe", cfg.r_safe},
      {"theta_min_deg", cfg.theta_min / kDegToRad},
      {"theta_max_deg", cfg.theta_max / kDegToRad},
      {"H", cfg.H},
      {"N", cfg.N},
      {"K", cfg.K},
      {"M", cfg.M},
      {"omega_res", cfg.omega_res},
      {"replan_slack", cfg.replan_slack},
      {"corridor_shrink", cfg.corridor_shrink},
      {"log_rate", cfg.log_rate},
      {"psi_step", cfg.psi_step},
  };
}

// ---------------------------------------------------------------------------
// Scenario

void Scenario::validate() const {
  if (!all_finite(bounds_min) || !all_finite(bounds_max)) fail("bounds must be finite");
  if (!(bounds_min.array() < bounds_max.array()).all())
    fail("bounds: min must be below max on every axis");
  if (!(resolution > 0) || !std::isfinite(resolution)) fail("resolution must be positive");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const Box& b = obstacles[i];
    const std::string where = "obstacles[" + std::to_string(i) + "]";
    if (!all_finite(b.center) || !all_finite(b.half_extent)) fail(where + ": non-finite geometry");
    if ((b.half_extent.array() < 0).any()) fail(where + ": negative half_extent");
    if ((b.upper().array() < bounds_min.array()).any() ||
        (b.lower().array() > bounds_max.array()).any())
      fail(where + ": box does not intersect the scenario bounds");
  }
  const auto& knots = target_path.knots();
  if (knots.empty()) fail("target_path: at least one knot is required");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i].t > knots[i - 1].t)) fail("nonmonotonic target times");
  for (const auto& k : knots)
    if (!((k.pos.array() >= bounds_min.array()).all() && (k.pos.array() <= bounds_max.array()).all()))
      fail("target_path: knot at t=" + std::to_string(k.t) + " lies outside the bounds");
  const Vec3& p = chaser_init.pos;
  if (!all_finite(p) || !all_finite(chaser_init.vel) || !all_finite(chaser_init.acc))
    fail("chaser_init: non-finite state");
  if (!((p.array() >= bounds_min.array()).all() && (p.array() <= bounds_max.array()).all()))
    fail("chaser_init: position outside the bounds");
  for (const auto& b : obstacles)
    if (b.contains(p)) fail("chaser starts in occupied space");
  config.validate();
}

Scenario parse_scenario(const nlohmann::json& doc) {
  if (!doc.is_object()) fail("document root must be an object");
  Scenario s;

  if (!doc.contains("bounds")) fail("missing field 'bounds'");
  const auto& bounds = doc["bounds"];
  if (!bounds.is_object()) fail("bounds: expected {min, max}");
  if (!bounds.contains("min") || !bounds.contains("max")) fail("bounds: expected {min, max}");
  s.bounds_min = read_vec3(bounds["min"], "bounds.min");
  s.bounds_max = read_vec3(bounds["max"], "bounds.max");
  s.resolution = read_number(doc, "resolution", "scenario");

  if (doc.contains("obstacles")) {
    const auto& obs = doc["obstacles"];
    if (!obs.is_array()) fail("obstacles: expected an array");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string where = "obstacles[" + std::to_string(i) + "]";
      if (!obs[i].is_object() || !obs[i].contains("center") || !obs[i].contains("half_extent"))
        fail(where + ": expected {center, half_extent}");
      s.obstacles.push_back(Box{read_vec3(obs[i]["center"], where + ".center"),
                                read_vec3(obs[i]["half_extent"], where + ".half_extent")});
    }
  }

  if (!doc.contains("target_path") || !doc["target_path"].is_array())
    fail("missing field 'target_path' (array of {t, pos})");
  std::vector<TargetKnot> knots;
  const auto& tp = doc["target_path"];
  for (std::size_t i = 0; i < tp.size(); ++i) {
    const std::string where = "target_path[" + std::to_string(i) + "]";
    if (!tp[i].is_object() || !tp[i].contains("pos")) fail(where + ": expected {t, pos}");
    knots.push_back({read_number(tp[i], "t", where), read_vec3(tp[i]["pos"], where + ".pos")});
  }
  s.target_path = TargetPath(std::move(knots));

  if (!doc.contains("chaser_init") || !doc["chaser_init"].is_object())
    fail("missing field 'chaser_init'");
  const auto& ci = doc["chaser_init"];
  if (!ci.contains("pos")) fail("chaser_init: missing field 'pos'");
  s.chaser_init.pos = read_vec3(ci["pos"], "chaser_init.pos");
  if (ci.contains("vel")) s.chaser_init.vel = read_vec3(ci["vel"], "chaser_init.vel");
  if (ci.contains("acc")) s.chaser_init.acc = read_vec3(ci["acc"], "chaser_init.acc");

  bool slack_given = false;
  if (doc.contains("config")) {
    const auto& cfg = doc["config"];
    if (!cfg.is_object()) fail("config: expected an object");
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      if (!it.value().is_number()) fail("config." + it.key() + ": expected a number");
      apply_config_value(s.config, it.key(), it.value().get<double>());
      slack_given = slack_given || it.key() == "replan_slack";
    }
  }
  if (!slack_given) s.config.replan_slack = s.config.H - 1.0;

  s.validate();

  // The chaser must also sit in a free voxel of the grid the planner will use.
  const VoxelGrid geom(s.bounds_min, s.resolution, grid_dims(s));
  if (geom.contains(s.chaser_init.pos)) {
    const Vec3 c = geom.index_to_center(geom.world_to_index(s.chaser_init.pos));
    for (const auto& b : s.obstacles)
      if (b.contains(c)) fail("chaser starts in occupied space");
  }
  return s;
}

nlohmann::json load_scenario_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "scenario", "cannot open scenario file '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    std::ostringstream msg;
    msg << "parse error in '" << path.string() << "' at byte " << e.byte << ": " << e.what();
    throw Error(ErrorKind::InvalidInput, "scenario", msg.str());
  }
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(load_scenario_document(path)); }

// ---------------------------------------------------------------------------
// VoxelGrid

VoxelGrid::VoxelGrid(const Vec3& origin, double resolution, const Index3& dims)
    : origin_(origin), resolution_(resolution), dims_(dims) {
  if (!(resolution > 0)) throw Error(ErrorKind::InvalidInput, "grid", "resolution must be positive");
  for (int d : dims)
    if (d <= 0) throw Error(ErrorKind::InvalidInput, "grid", "grid dimensions must be positive");
  occupancy_.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], 0);
}

Vec3 VoxelGrid::upper() const {
  return origin_ + resolution_ * Vec3(dims_[0], dims_[1], dims_[2]);
}

std::size_t VoxelGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupancy_.begin(), occupancy_.end(), std::uint8_t{1}));
}

bool VoxelGrid::contains(const Vec3& x) const {
  const Vec3 hi = upper();
  return (x.array() >= origin_.array()).all() && (x.array() <= hi.array()).all();
}

bool VoxelGrid::in_range(const Index3& idx) const {
  for (int a = 0; a < 3; ++a)
    if (idx[a] < 0 || idx[a] >= dims_[a]) return false;
  return true;
}

Index3 VoxelGrid::world_to_index(const Vec3& x) const {
  if (!contains(x)) {
    std::ostringstream msg;
    msg << "point (" << x.x() << ", " << x.y() << ", " << x.z() << ") is outside the grid";
    throw Error(ErrorKind::OutOfRange, "grid", msg.str());
  }
  Index3 idx;
  for (int a = 0; a < 3; ++a) {
    const int i = static_cast<int>(std::floor((x[a] - origin_[a]) / resolution_));
    idx[a] = std::clamp(i, 0, dims_[a] - 1);
  }
  return idx;
}

Vec3 VoxelGrid::index_to_center(const Index3& idx) const {
  if (!in_range(idx)) {
    std::ostringstream msg;
    msg << "index (" << idx[0] << ", " << idx[1] << ", " << idx[2] << ") is outside the grid";
    throw Error(ErrorKind::OutOfRange, "grid", msg.str());
  }
  return origin_ + resolution_ * Vec3(idx[0] + 0.5, idx[1] + 0.5, idx[2] + 0.5);
}

VoxelGrid voxelize(const Scenario& scenario, std::size_t voxel_budget) {
  const Index3 dims = grid_dims(scenario);
  const double count = static_cast<double>(dims[0]) * dims[1] * dims[2];
  if (count > static_cast<double>(voxel_budget)) {
    std::ostringstream msg;
    msg << "grid of " << static_cast<std::size_t>(count) << " voxels exceeds the voxel budget of "
        << voxel_budget;
    throw Error(ErrorKind::InvalidInput, "voxelize", msg.str());
  }
  VoxelGrid grid(scenario.bounds_min, scenario.resolution, dims);

  const double res = scenario.resolution;
  for (const Box& box : scenario.obstacles) {
    // Candidate index range with a one-voxel margin; the exact closed-box
    // test on the voxel center decides.
    Index3 lo, hi;
    for (int a = 0; a < 3; ++a) {
      const double l = (box.lower()[a] - grid.origin()[a]) / res - 0.5;
      const double h = (box.upper()[a] - grid.origin()[a]) / res - 0.5;
      lo[a] = std::max(0, static_cast<int>(std::ceil(l)) - 1);
      hi[a] = std::min(dims[a] - 1, static_cast<int>(std::floor(h)) + 1);
    }
    for (int k = lo[2]; k <= hi[2]; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) {
          const Index3 idx{i, j, k};
          if (box.contains(grid.index_to_center(idx))) grid.set_occupied(idx, true);
        }
  }
  return grid;
}

}  // namespace vischase
