#include "coloc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace coloc {

using nlohmann::json;

std::vector<double> SensorSpec::beam_angles() const {
  std::vector<double> out(beams);
  const double step = fov / static_cast<double>(beams);
  for (std::size_t i = 0; i < beams; ++i) {
    out[i] = normalize_angle(-0.5 * fov + (static_cast<double>(i) + 0.5) * step);
  }
  return out;
}

Pose2D AgentSpec::truth_at(double t) const {
  if (t <= trajectory.front().t) return trajectory.front().pose;
  if (t >= trajectory.back().t) return trajectory.back().pose;
  std::size_t i = 1;
  while (trajectory[i].t < t) ++i;
  const Waypoint& a = trajectory[i - 1];
  const Waypoint& b = trajectory[i];
  const double s = (t - a.t) / (b.t - a.t);
  return {a.pose.x() + s * (b.pose.x() - a.pose.x()),
          a.pose.y() + s * (b.pose.y() - a.pose.y()),
          a.pose.theta() + s * angle_diff(b.pose.theta(), a.pose.theta())};
}

std::size_t Scenario::tick_count() const {
  return static_cast<std::size_t>(std::llround(std::floor(duration / dt + 1e-9)));
}

const AgentSpec& Scenario::agent(AgentId id) const {
  for (const auto& a : agents) {
    if (a.id == id) return a;
  }
  throw ScenarioError("no agent with id " + std::to_string(id));
}

namespace {

// A JSON object plus the path used to report errors inside it.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ScenarioError((path_.empty() ? std::string("<root>") : path_) + ": " + msg);
  }
  [[noreturn]] void fail_field(const std::string& key, const std::string& msg) const {
    throw ScenarioError(child_path(key) + ": " + msg);
  }

  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  Node object(const std::string& key) const {
    if (!has(key)) fail_field(key, "missing required field");
    return Node(j_.at(key), child_path(key));
  }

  const json& raw(const std::string& key) const {
    if (!has(key)) fail_field(key, "missing required field");
    return j_.at(key);
  }

  double number(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number()) fail_field(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail_field(key, "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  double positive(const std::string& key, double fallback) const {
    const double v = number(key, fallback);
    if (!(v > 0.0)) fail_field(key, "must be > 0");
    return v;
  }
  double non_negative(const std::string& key, double fallback) const {
    const double v = number(key, fallback);
    if (!(v >= 0.0)) fail_field(key, "must be >= 0");
    return v;
  }

  std::uint64_t unsigned_int(const std::string& key) const {
    const json& v = raw(key);
    // The parser stores every non-negative integer literal as unsigned.
    if (!v.is_number_unsigned()) fail_field(key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? unsigned_int(key) : fallback;
  }

  std::string string(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_string()) fail_field(key, "expected a string");
    return v.get<std::string>();
  }

  const json& array(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_array()) fail_field(key, "expected an array");
    return v;
  }

  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
};

Pose2D parse_pose(const Node& n) {
  return {n.number("x"), n.number("y"), n.number("theta", 0.0)};
}

MotionNoiseParams parse_alpha(const Node& parent, const std::string& key) {
  const json& arr = parent.array(key);
  if (arr.size() != 4) parent.fail_field(key, "expected exactly 4 noise gains");
  MotionNoiseParams p;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!arr[i].is_number() || !(arr[i].get<double>() >= 0.0)) {
      parent.fail_field(key + "[" + std::to_string(i) + "]", "expected a number >= 0");
    }
    p.alpha[i] = arr[i].get<double>();
  }
  return p;
}

FilterConfig parse_filter(const Node& n) {
  FilterConfig cfg;
  cfg.particles = n.unsigned_int("particles", cfg.particles);
  if (cfg.particles < 1) n.fail_field("particles", "must be >= 1");
  if (n.has("alpha")) cfg.motion = parse_alpha(n, "alpha");
  cfg.range.z_hit = n.non_negative("z_hit", cfg.range.z_hit);
  cfg.range.z_rand = n.non_negative("z_rand", cfg.range.z_rand);
  cfg.range.z_max = n.non_negative("z_max", cfg.range.z_max);
  cfg.range.sigma_hit = n.positive("sigma_hit", cfg.range.sigma_hit);
  if (std::abs(cfg.range.z_hit + cfg.range.z_rand + cfg.range.z_max - 1.0) > 1e-9) {
    n.fail("z_hit + z_rand + z_max must equal 1");
  }
  cfg.resample_threshold = n.non_negative("resample_threshold", cfg.resample_threshold);
  if (cfg.resample_threshold > 1.0) n.fail_field("resample_threshold", "must lie in [0, 1]");
  cfg.update_min_distance = n.non_negative("update_min_distance", cfg.update_min_distance);
  cfg.update_min_angle = n.non_negative("update_min_angle", cfg.update_min_angle);
  return cfg;
}

AgentSpec parse_agent(const Node& n) {
  AgentSpec a;
  a.id = static_cast<AgentId>(n.unsigned_int("id"));

  const json& traj = n.array("trajectory");
  if (traj.empty()) n.fail_field("trajectory", "needs at least one waypoint");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    Node w(traj[i], n.child_path("trajectory") + "[" + std::to_string(i) + "]");
    Waypoint wp{w.number("t", 0.0), parse_pose(w)};
    if (!a.trajectory.empty() && !(wp.t > a.trajectory.back().t)) {
      w.fail_field("t", "waypoint times must be strictly increasing");
    }
    a.trajectory.push_back(wp);
  }

  if (n.has("filter")) a.filter = parse_filter(n.object("filter"));

  if (n.has("sensor")) {
    Node s = n.object("sensor");
    a.sensor.beams = s.unsigned_int("beams", a.sensor.beams);
    if (a.sensor.beams < 1) s.fail_field("beams", "must be >= 1");
    a.sensor.fov = s.positive("fov", a.sensor.fov);
    if (a.sensor.fov > kTwoPi + 1e-9) s.fail_field("fov", "must be <= 2*pi");
    a.sensor.max_range = s.positive("max_range", a.sensor.max_range);
    if (s.has("range_noise")) a.sensor.range_noise = s.non_negative("range_noise", 0.0);
    if (s.has("odometry_alpha")) a.sensor.odometry_noise = parse_alpha(s, "odometry_alpha");
  }

  if (n.has("detection")) {
    Node d = n.object("detection");
    a.detection.range = d.non_negative("range", a.detection.range);
    a.detection.fov = d.positive("fov", a.detection.fov);
    a.detection.sigma_range = d.positive("sigma_range", a.detection.sigma_range);
    if (d.has("sigma_bearing_deg")) {
      a.detection.sigma_bearing = deg_to_rad(d.positive("sigma_bearing_deg", 10.0));
    }
    a.detection.sigma_bearing = d.positive("sigma_bearing", a.detection.sigma_bearing);
  }

  if (n.has("init")) {
    Node i = n.object("init");
    auto parse_box = [](const Node& r) {
      Box b{r.number("x_min"), r.number("y_min"), r.number("x_max"), r.number("y_max")};
      if (!(b.x_min < b.x_max && b.y_min < b.y_max)) r.fail("empty region");
      return b;
    };
    if (i.has("region") && i.has("regions")) i.fail("give either region or regions, not both");
    if (i.has("region")) a.init.regions.push_back(parse_box(i.object("region")));
    if (i.has("regions")) {
      const json& list = i.array("regions");
      if (list.empty()) i.fail_field("regions", "must not be empty");
      for (std::size_t k = 0; k < list.size(); ++k) {
        a.init.regions.push_back(parse_box(Node(list[k], i.child_path("regions") + "[" +
                                                              std::to_string(k) + "]")));
      }
    }
    if (i.has("pose")) a.init.pose = parse_pose(i.object("pose"));
    if (!a.init.regions.empty() && a.init.pose) i.fail("give either a region or a pose, not both");
    a.init.sigma_xy = i.non_negative("sigma_xy", a.init.sigma_xy);
    a.init.sigma_theta = i.non_negative("sigma_theta", a.init.sigma_theta);
  }
  return a;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }

  Node root(j, "");
  Scenario sc;
  Node map = root.object("map");
  sc.map_image = base_dir / map.string("image");
  sc.map_meta = base_dir / map.string("meta");
  sc.seed = root.unsigned_int("seed", 0);
  sc.dt = root.positive("dt", sc.dt);
  sc.duration = root.positive("duration", sc.duration);
  sc.encounter_cooldown = root.non_negative("encounter_cooldown", sc.encounter_cooldown);
  if (root.has("channel")) {
    Node c = root.object("channel");
    sc.channel.latency = c.non_negative("latency", 0.0);
    sc.channel.drop_probability = c.non_negative("drop_probability", 0.0);
    if (sc.channel.drop_probability > 1.0) c.fail_field("drop_probability", "must be <= 1");
  }

  const json& agents = root.array("agents");
  if (agents.empty()) root.fail_field("agents", "needs at least one agent");
  std::set<AgentId> ids;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    Node a(agents[i], "agents[" + std::to_string(i) + "]");
    sc.agents.push_back(parse_agent(a));
    if (!ids.insert(sc.agents.back().id).second) a.fail_field("id", "duplicate agent id");
  }
  sc.evaluated_agent =
      static_cast<AgentId>(root.unsigned_int("evaluated_agent", sc.agents.front().id));
  if (!ids.count(sc.evaluated_agent)) {
    root.fail_field("evaluated_agent", "does not name an agent");
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string() + ": cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str(), path.parent_path());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

}  // namespace coloc
