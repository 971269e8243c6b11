#include "vischase/preplan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <tuple>

#include "vischase/error.hpp"

namespace vischase {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double effective_step(const DistanceField& field, const PlannerConfig& cfg) {
  return cfg.psi_step > 0 ? cfg.psi_step : field.default_step();
}

// ---------------------------------------------------------------------------
// Forecast

TargetForecast forecast_window(const TargetPath& path, double t, double H, int N) {
  if (path.empty()) throw Error(ErrorKind::InvalidInput, "forecast", "empty target path");
  if (N < 1 || !(H > 0)) throw Error(ErrorKind::InvalidInput, "forecast", "horizon and segment count must be positive");
  TargetForecast f;
  f.t0 = t;
  f.dt = H / N;
  f.samples.reserve(N + 1);
  for (int n = 0; n <= N; ++n) f.samples.push_back(path.position(f.time(n)));
  return f;
}

// ---------------------------------------------------------------------------
// Candidates

double elevation(const Vec3& viewpoint, const Vec3& target) {
  const Vec3 d = viewpoint - target;
  const double horizontal = std::hypot(d.x(), d.y());
  return std::atan2(d.z(), horizontal);
}

CandidateSet generate_candidates(const DistanceField& field, const Vec3& target, int layer,
                                 const PlannerConfig& cfg) {
  if (!field.contains(target)) {
    std::ostringstream msg;
    msg << "target sample of layer " << layer << " lies outside the map";
    throw Error(ErrorKind::OutOfRange, "candidates", msg.str());
  }
  const double step = effective_step(field, cfg);
  const int reach = static_cast<int>(std::floor(cfg.d_upper / cfg.omega_res + 1e-9));

  CandidateSet set;
  set.layer = layer;
  for (int k = -reach; k <= reach; ++k)
    for (int j = -reach; j <= reach; ++j)
      for (int i = -reach; i <= reach; ++i) {
        const Vec3 offset = cfg.omega_res * Vec3(i, j, k);
        if (offset.cwiseAbs().maxCoeff() <= cfg.d_lower) continue;  // inner box removed
        const double dist = offset.norm();
        if (dist < cfg.d_lower || dist > cfg.d_upper) continue;
        const Vec3 x = target + offset;
        const double elev = elevation(x, target);
        if (elev < cfg.theta_min || elev > cfg.theta_max) continue;
        if (!field.contains(x)) continue;
        if (field.phi(x) < cfg.r_safe) continue;
        if (!(psi(field, {x, target, step}) > 0.0)) continue;
        set.points.push_back(x);
      }
  if (set.points.empty()) {
    std::ostringstream msg;
    msg << "no viewpoint candidates at layer " << layer;
    throw Error(ErrorKind::Infeasible, "candidates", msg.str());
  }
  return set;
}

// ---------------------------------------------------------------------------
// Edge cost

EdgeCost compose_edge_cost(double interval, double visibility, double tracking, double w_v, double w_d) {
  EdgeCost c;
  c.interval = interval;
  c.visibility = visibility;
  c.tracking = tracking;
  c.total = std::isinf(visibility) ? kInf : interval + w_v * visibility + w_d * tracking;
  return c;
}

EdgeCost edge_cost(const DistanceField& field, const Vec3& x_prev, const Vec3& x_next,
                   const Vec3& x_p_prev, const Vec3& x_p_next, const PlannerConfig& cfg) {
  const TransitionVisibility tv =
      transitional_visibility(field, x_prev, x_next, x_p_prev, x_p_next, effective_step(field, cfg));
  const double residual = (x_p_next - x_next).norm() - cfg.d_des;
  EdgeCost c = compose_edge_cost((x_prev - x_next).squaredNorm(), tv.cost, residual * residual, cfg.w_v, cfg.w_d);
  c.integral_prev = tv.integral_prev;
  c.integral_next = tv.integral_next;
  return c;
}

// ---------------------------------------------------------------------------
// Graph

std::size_t LayeredGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& e : edges) n += e.size();
  return n;
}

std::vector<CandidateSet> generate_layers(const DistanceField& field, const TargetForecast& forecast,
                                          const PlannerConfig& cfg) {
  std::vector<CandidateSet> out;
  for (int n = 1; n <= forecast.N(); ++n) out.push_back(generate_candidates(field, forecast.samples[n], n, cfg));
  return out;
}

LayeredGraph build_graph(const DistanceField& field, const Vec3& chaser_pos, const TargetForecast& forecast,
                         const PlannerConfig& cfg) {
  return connect_layers(field, chaser_pos, forecast, generate_layers(field, forecast, cfg), cfg);
}

LayeredGraph connect_layers(const DistanceField& field, const Vec3& chaser_pos, const TargetForecast& forecast,
                            const std::vector<CandidateSet>& candidates, const PlannerConfig& cfg) {
  const int N = forecast.N();
  if (N < 1) throw Error(ErrorKind::InvalidInput, "graph", "forecast must hold at least two samples");
  if (static_cast<int>(candidates.size()) != N)
    throw Error(ErrorKind::InvalidInput, "graph", "one candidate set per forecast layer is required");
  if (!field.contains(chaser_pos)) throw Error(ErrorKind::OutOfRange, "graph", "chaser position lies outside the map");
  const double step = effective_step(field, cfg);

  LayeredGraph g;
  g.layers.resize(N + 1);
  g.edges.resize(N + 1);
  g.times.resize(N + 1);
  g.layers[0] = {chaser_pos};
  for (int n = 0; n <= N; ++n) g.times[n] = forecast.time(n);
  for (int n = 1; n <= N; ++n) g.layers[n] = candidates[n - 1].points;

  for (int n = 1; n <= N; ++n) {
    const auto& prev = g.layers[n - 1];
    const auto& next = g.layers[n];
    // Candidates already passed the visibility filter against their own
    // target sample; the source is the current chaser position and is taken
    // as given.
    for (int a = 0; a < static_cast<int>(prev.size()); ++a)
      for (int b = 0; b < static_cast<int>(next.size()); ++b) {
        const Vec3& xa = prev[a];
        const Vec3& xb = next[b];
        if (!((xa - xb).norm() < cfg.d_max)) continue;
        if (!(segment_min_phi(field, xa, xb, step) >= cfg.r_safe)) continue;
        const EdgeCost c = edge_cost(field, xa, xb, forecast.samples[n - 1], forecast.samples[n], cfg);
        if (std::isinf(c.total)) continue;
        g.edges[n].push_back({a, b, c});
      }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Search

namespace {

WaypointPlan extract(const LayeredGraph& g, const std::vector<std::vector<int>>& pred_edge, int last) {
  const int N = g.N();
  WaypointPlan plan;
  plan.times = g.times;
  plan.waypoints.resize(N + 1);
  plan.candidate_index.resize(N + 1, 0);
  plan.edges.resize(N);
  int node = last;
  for (int n = N; n >= 1; --n) {
    const GraphEdge& e = g.edges[n][pred_edge[n][node]];
    plan.waypoints[n] = g.layers[n][node];
    plan.candidate_index[n] = node;
    plan.edges[n - 1] = e.cost;
    node = e.from;
  }
  plan.waypoints[0] = g.layers[0][0];
  plan.total_cost = 0.0;
  for (const auto& e : plan.edges) plan.total_cost += e.total;
  for (int n = 1; n <= N; ++n) plan.candidate_counts.push_back(static_cast<int>(g.layers[n].size()));
  plan.edge_count = g.edge_count();
  return plan;
}

[[noreturn]] void infeasible() {
  throw Error(ErrorKind::Infeasible, "graph_search", "preplanning infeasible: no path reaches the final layer");
}

// Pick the final-layer vertex: costs tie-broken by index. The virtual goal
// edge is constant, so it never changes the choice.
int best_terminal(const std::vector<double>& dist) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(dist.size()); ++i)
    if (dist[i] < kInf && (best < 0 || dist[i] < dist[best])) best = i;
  return best;
}

}  // namespace

WaypointPlan shortest_path(const LayeredGraph& g) {
  const int N = g.N();
  if (N < 1 || g.layers[0].size() != 1) throw Error(ErrorKind::InvalidInput, "graph_search", "malformed layered graph");

  // Outgoing adjacency per layer.
  std::vector<std::vector<std::vector<int>>> out(N + 1);
  for (int n = 1; n <= N; ++n) {
    out[n - 1].resize(g.layers[n - 1].size());
    for (int e = 0; e < static_cast<int>(g.edges[n].size()); ++e) out[n - 1][g.edges[n][e].from].push_back(e);
  }

  std::vector<std::vector<double>> dist(N + 1);
  std::vector<std::vector<int>> pred(N + 1);
  std::vector<std::vector<char>> settled(N + 1);
  for (int n = 0; n <= N; ++n) {
    dist[n].assign(g.layers[n].size(), kInf);
    pred[n].assign(g.layers[n].size(), -1);
    settled[n].assign(g.layers[n].size(), 0);
  }
  dist[0][0] = 0.0;

  using Item = std::tuple<double, int, int>;  // (distance, layer, index)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  queue.emplace(0.0, 0, 0);
  while (!queue.empty()) {
    const auto [d, n, v] = queue.top();
    queue.pop();
    if (settled[n][v]) continue;
    settled[n][v] = 1;
    if (n == N) continue;  // only the constant virtual goal edge leaves layer N
    for (int e : out[n][v]) {
      const GraphEdge& edge = g.edges[n + 1][e];
      const double nd = d + edge.cost.total;
      double& cur = dist[n + 1][edge.to];
      int& p = pred[n + 1][edge.to];
      if (nd < cur) {
        cur = nd;
        p = e;
        queue.emplace(nd, n + 1, edge.to);
      } else if (nd == cur && edge.from < g.edges[n + 1][p].from) {
        p = e;
      }
    }
  }
  // Settling the goal adds the same dummy weight to every terminal, so the
  // cheapest terminal (lowest index on ties) is the goal's predecessor.
  const int last = best_terminal(dist[N]);
  if (last < 0) infeasible();
  return extract(g, pred, last);
}

WaypointPlan shortest_path_dp(const LayeredGraph& g) {
  const int N = g.N();
  if (N < 1 || g.layers[0].size() != 1) throw Error(ErrorKind::InvalidInput, "graph_search", "malformed layered graph");
  std::vector<std::vector<double>> dist(N + 1);
  std::vector<std::vector<int>> pred(N + 1);
  for (int n = 0; n <= N; ++n) {
    dist[n].assign(g.layers[n].size(), kInf);
    pred[n].assign(g.layers[n].size(), -1);
  }
  dist[0][0] = 0.0;
  for (int n = 1; n <= N; ++n)
    for (int e = 0; e < static_cast<int>(g.edges[n].size()); ++e) {
      const GraphEdge& edge = g.edges[n][e];
      if (dist[n - 1][edge.from] == kInf) continue;
      const double nd = dist[n - 1][edge.from] + edge.cost.total;
      double& cur = dist[n][edge.to];
      int& p = pred[n][edge.to];
      if (nd < cur || (nd == cur && edge.from < g.edges[n][p].from)) {
        cur = nd;
        p = e;
      }
    }
  const int last = best_terminal(dist[N]);
  if (last < 0) infeasible();
  return extract(g, pred, last);
}

WaypointPlan preplan(const DistanceField& field, const ChaserState& chaser, const TargetForecast& forecast,
                     const PlannerConfig& cfg) {
  return shortest_path(build_graph(field, chaser.position, forecast, cfg));
}

std::vector<std::string> plan_violations(const DistanceField& field, const WaypointPlan& plan,
                                         const Vec3& chaser_pos, const TargetForecast& forecast,
                                         const PlannerConfig& cfg) {
  std::vector<std::string> out;
  const double step = effective_step(field, cfg);
  auto report = [&](int n, const std::string& what) {
    std::ostringstream msg;
    msg << "waypoint " << n << ": " << what;
    out.push_back(msg.str());
  };
  if (plan.N() != forecast.N()) {
    out.push_back("plan length does not match the forecast");
    return out;
  }
  if (plan.waypoints[0] != chaser_pos) report(0, "does not equal the chaser position");
  for (int n = 1; n <= plan.N(); ++n) {
    const Vec3& x = plan.waypoints[n];
    const Vec3& prev = plan.waypoints[n - 1];
    const Vec3& target = forecast.samples[n];
    const double d = (x - target).norm();
    if (d < cfg.d_lower || d > cfg.d_upper) report(n, "outside the tracking-distance shell");
    const double elev = elevation(x, target);
    if (elev < cfg.theta_min || elev > cfg.theta_max) report(n, "outside the elevation bounds");
    if (!(psi(field, {x, target, step}) > 0.0)) report(n, "target not visible");
    if (field.phi(x) < cfg.r_safe) report(n, "insufficient clearance");
    if ((x - prev).norm() > cfg.d_max) report(n, "spacing exceeds d_max");
    if (segment_min_phi(field, prev, x, step) < cfg.r_safe) report(n, "segment clearance below r_safe");
  }
  return out;
}

}  // namespace vischase
