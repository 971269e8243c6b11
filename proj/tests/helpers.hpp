#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "vischase/world.hpp"

namespace testutil {

inline nlohmann::json box_json(const vischase::Vec3& lo, const vischase::Vec3& hi) {
  const vischase::Vec3 c = 0.5 * (lo + hi);
  const vischase::Vec3 h = 0.5 * (hi - lo);
  return {{"center", {c.x(), c.y(), c.z()}}, {"half_extent", {h.x(), h.y(), h.z()}}};
}

/// Small valid scenario document: a 12 x 12 x 6 m map with one pillar.
inline nlohmann::json minimal_doc() {
  return {{"bounds", {{"min", {0, 0, 0}}, {"max", {12, 12, 6}}}},
          {"resolution", 0.4},
          {"obstacles", {box_json({5, 8.4, 0}, {7, 9.6, 3})}},
          {"target_path", {{{"t", 0}, {"pos", {4, 4, 1}}}, {{"t", 8}, {"pos", {8, 5, 1}}}}},
          {"chaser_init", {{"pos", {2, 3, 2.5}}}}};
}

inline std::filesystem::path source_dir() { return std::filesystem::path(VISCHASE_SOURCE_DIR); }

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("vischase_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testutil
