#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace vischase {

using Vec3 = Eigen::Vector3d;
using Index3 = std::array<int, 3>;

/// Closed axis-aligned box {x : center - half_extent <= x <= center + half_extent}.
struct Box {
  Vec3 center = Vec3::Zero();
  Vec3 half_extent = Vec3::Zero();

  Vec3 lower() const { return center - half_extent; }
  Vec3 upper() const { return center + half_extent; }
  bool contains(const Vec3& x) const;
};

struct TargetKnot {
  double t = 0.0;
  Vec3 pos = Vec3::Zero();
};

/// Scripted target trajectory, linear between knots and clamped outside.
class TargetPath {
 public:
  TargetPath() = default;
  explicit TargetPath(std::vector<TargetKnot> knots);

  Vec3 position(double t) const;
  double start_time() const;
  double end_time() const;
  const std::vector<TargetKnot>& knots() const { return knots_; }
  bool empty() const { return knots_.empty(); }

 private:
  std::vector<TargetKnot> knots_;
};

struct ChaserInit {
  Vec3 pos = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
  Vec3 acc = Vec3::Zero();
};

/// Kinematic chaser state at a replanning instant.
struct ChaserState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  double stamp = 0.0;
};

/// Planner parameters. Defaults are the common simulation parameters used
/// for the garden/city experiments; `N` and `w_v` default to the city
/// column, `replan_slack` to H - 1 s.
struct PlannerConfig {
  double H = 5.0;
  int N = 4;
  double w_v = 1.0;
  double w_d = 3.4;
  double lambda = 2.0;
  double d_des = 2.5;
  double d_lower = 1.0;
  double d_upper = 4.0;
  double d_max = 2.0;
  double r_safe = 0.3;
  double theta_min = 20.0 * 3.14159265358979323846 / 180.0;
  double theta_max = 70.0 * 3.14159265358979323846 / 180.0;
  int K = 6;
  int M = 2;
  double omega_res = 0.8;
  double replan_slack = 4.0;

  // Implementation knobs.
  double corridor_shrink = 0.9;
  double log_rate = 50.0;
  double psi_step = 0.0;  // 0 selects resolution / 2

  double dt() const { return H / N; }
  void validate() const;
};

/// Names accepted in the scenario `config` object and by CLI overrides.
const std::vector<std::string>& config_keys();
void apply_config_value(PlannerConfig& cfg, const std::string& key, double value);
nlohmann::json config_to_json(const PlannerConfig& cfg);

struct Scenario {
  Vec3 bounds_min = Vec3::Zero();
  Vec3 bounds_max = Vec3::Zero();
  double resolution = 0.4;
  std::vector<Box> obstacles;
  TargetPath target_path;
  ChaserInit chaser_init;
  PlannerConfig config;

  void validate() const;
};

Scenario parse_scenario(const nlohmann::json& doc);
/// Raw JSON of a scenario file; Io when unreadable, InvalidInput on syntax errors.
nlohmann::json load_scenario_document(const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

/// Boolean occupancy over a regular grid; voxel (i,j,k) has center
/// origin + (idx + 0.5) * resolution. Storage is x-fastest.
class VoxelGrid {
 public:
  VoxelGrid(const Vec3& origin, double resolution, const Index3& dims);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const Index3& dims() const { return dims_; }
  std::size_t size() const { return occupancy_.size(); }
  Vec3 upper() const;

  std::size_t linear(const Index3& idx) const {
    return (static_cast<std::size_t>(idx[2]) * dims_[1] + idx[1]) * dims_[0] + idx[0];
  }
  bool occupied(const Index3& idx) const { return occupancy_[linear(idx)] != 0; }
  void set_occupied(const Index3& idx, bool value) { occupancy_[linear(idx)] = value ? 1 : 0; }
  const std::vector<std::uint8_t>& occupancy() const { return occupancy_; }
  std::size_t occupied_count() const;

  bool contains(const Vec3& x) const;
  bool in_range(const Index3& idx) const;

  Index3 world_to_index(const Vec3& x) const;
  Vec3 index_to_center(const Index3& idx) const;

 private:
  Vec3 origin_;
  double resolution_;
  Index3 dims_;
  std::vector<std::uint8_t> occupancy_;
};

constexpr std::size_t kDefaultVoxelBudget = 64u * 1024u * 1024u;

VoxelGrid voxelize(const Scenario& scenario, std::size_t voxel_budget = kDefaultVoxelBudget);

}  // namespace vischase
