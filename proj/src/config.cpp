#include "ipp/config.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace ipp {
namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config field '" + display() + "': expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [key, _] : j_.items()) {
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) throw ConfigError("unknown config field '" + field(key) + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  Section child(const char* key) const { return Section(j_.at(key), field(key)); }

  void get(const char* key, double& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(key, "a number");
    out = v.get<double>();
  }
  void get(const char* key, int& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(key, "an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(key, "a 32-bit integer");
    out = static_cast<int>(x);
  }
  void get(const char* key, std::uint64_t& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) fail(key, "a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void get(const char* key, std::size_t& out, int) const {
    std::uint64_t v = out;
    get(key, v);
    out = static_cast<std::size_t>(v);
  }
  void get(const char* key, bool& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(key, "true or false");
    out = v.get<bool>();
  }
  void get(const char* key, std::string& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(key, "a string");
    out = v.get<std::string>();
  }
  void get(const char* key, std::vector<double>& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) fail(key, "an array of numbers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "an array of numbers");
      out.push_back(e.get<double>());
    }
  }
  void get(const char* key, Interval& out) const {
    if (!has(key)) return;
    std::vector<double> v;
    get(key, v);
    if (v.size() != 2 || v[0] > v[1]) fail(key, "[lo, hi] with lo <= hi");
    out = {v[0], v[1]};
  }
  void get(const char* key, Vec3& out) const {
    if (!has(key)) return;
    std::vector<double> v;
    get(key, v);
    if (v.size() != 3) fail(key, "three numbers");
    out = Vec3(v[0], v[1], v[2]);
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("config field '" + field(key) + "': expected " + what);
  }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }
  const json& j_;
  std::string path_;
};

ScenarioKind scenario_kind(const std::string& s, const Section& sec) {
  if (s == "gaussian") return ScenarioKind::Gaussian;
  if (s == "split") return ScenarioKind::Split;
  if (s == "binary") return ScenarioKind::Binary;
  sec.fail("kind", "one of gaussian, split, binary");
}

std::string scenario_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Gaussian: return "gaussian";
    case ScenarioKind::Split: return "split";
    case ScenarioKind::Binary: return "binary";
  }
  return "gaussian";
}

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }
json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

void resolve(ExperimentConfig& c) {
  auto& pc = c.mission.planning;
  pc.workspace.lo = Vec3(0.0, 0.0, c.z_min);
  pc.workspace.hi = Vec3(c.scenario.width, c.scenario.height, c.z_max);
  pc.mode = c.scenario.kind == ScenarioKind::Binary ? UtilityMode::DiscreteEntropy : UtilityMode::ContinuousTrace;
  pc.adaptive.mu_th = c.adaptive_mu_th * c.value_scale;
  c.mission.value_scale = c.value_scale;
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  c.source = text;
  const Section top(root, "");
  top.allow({"name", "trials", "seed", "planner", "budget", "start", "scenario", "workspace", "camera", "sensor",
             "classifier", "map", "planning", "lawnmower", "spiral", "metrics"});
  top.get("name", c.name);
  top.get("trials", c.trials);
  if (c.trials < 1) top.fail("trials", "a positive integer");
  top.get("seed", c.seed);
  if (top.has("planner")) {
    std::string p;
    top.get("planner", p);
    try {
      c.mission.planner = planner_kind_from_string(p);
    } catch (const std::invalid_argument&) {
      top.fail("planner", "one of cmaes, lattice, lawnmower, spiral, random");
    }
  }
  auto& pc = c.mission.planning;
  top.get("budget", pc.budget);
  if (!(pc.budget > 0.0)) top.fail("budget", "a positive number of seconds");
  top.get("start", c.mission.start);

  if (top.has("scenario")) {
    const auto s = top.child("scenario");
    s.allow({"kind", "width", "height", "resolution", "cluster_radius", "value_range", "split_threshold",
             "occupancy_fraction"});
    if (s.has("kind")) {
      std::string k;
      s.get("kind", k);
      c.scenario.kind = scenario_kind(k, s);
    }
    s.get("width", c.scenario.width);
    s.get("height", c.scenario.height);
    s.get("resolution", c.scenario.resolution);
    s.get("cluster_radius", c.scenario.cluster_radius);
    s.get("value_range", c.scenario.value_range);
    s.get("split_threshold", c.scenario.split_threshold);
    s.get("occupancy_fraction", c.scenario.occupancy_fraction);
    if (!(c.scenario.width > 0.0)) s.fail("width", "a positive number");
    if (!(c.scenario.height > 0.0)) s.fail("height", "a positive number");
    if (!(c.scenario.resolution > 0.0)) s.fail("resolution", "a positive number");
  }
  if (top.has("workspace")) {
    const auto s = top.child("workspace");
    s.allow({"z_min", "z_max"});
    s.get("z_min", c.z_min);
    s.get("z_max", c.z_max);
    if (!(c.z_min > 0.0)) s.fail("z_min", "a positive altitude");
    if (c.z_max < c.z_min) s.fail("z_max", "an altitude >= z_min");
  }
  if (top.has("camera")) {
    const auto s = top.child("camera");
    s.allow({"fov_x_deg", "fov_y_deg", "frequency_hz"});
    s.get("fov_x_deg", pc.camera.fov_x_deg);
    s.get("fov_y_deg", pc.camera.fov_y_deg);
    s.get("frequency_hz", pc.camera.frequency_hz);
  }
  if (top.has("sensor")) {
    const auto s = top.child("sensor");
    s.allow({"a", "b", "bands"});
    s.get("a", pc.sensor.a);
    s.get("b", pc.sensor.b);
    if (s.has("bands")) {
      const json& arr = root.at("sensor").at("bands");
      if (!arr.is_array() || arr.empty()) s.fail("bands", "a non-empty array of {upper_altitude, scale}");
      pc.sensor.bands.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const Section b(arr[i], s.field("bands[" + std::to_string(i) + "]"));
        b.allow({"upper_altitude", "scale"});
        ResolutionBand band{std::numeric_limits<double>::infinity(), 1.0};
        if (b.has("upper_altitude") && !arr[i].at("upper_altitude").is_null()) b.get("upper_altitude", band.upper_altitude);
        b.get("scale", band.scale);
        pc.sensor.bands.push_back(band);
      }
    }
  }
  if (top.has("classifier")) {
    const auto s = top.child("classifier");
    s.allow({"altitudes", "true_positive", "false_positive"});
    s.get("altitudes", pc.classifier.altitudes);
    s.get("true_positive", pc.classifier.true_positive);
    s.get("false_positive", pc.classifier.false_positive);
  }
  if (top.has("map")) {
    const auto s = top.child("map");
    s.allow({"sigma_f2", "length_scale", "sigma_n2", "prior_mean", "value_scale", "prior_probability", "log_odds_clamp"});
    s.get("sigma_f2", c.map.kernel.sigma_f2);
    s.get("length_scale", c.map.kernel.length_scale);
    s.get("sigma_n2", c.map.kernel.sigma_n2);
    s.get("prior_mean", c.map.prior_mean);
    s.get("value_scale", c.value_scale);
    s.get("prior_probability", c.map.prior_probability);
    if (s.has("log_odds_clamp") && !root.at("map").at("log_odds_clamp").is_null()) {
      double v = 0.0;
      s.get("log_odds_clamp", v);
      c.map.log_odds_clamp = v;
    }
    if (!(c.value_scale > 0.0)) s.fail("value_scale", "a positive number");
  }
  if (top.has("planning")) {
    const auto s = top.child("planning");
    s.allow({"waypoints", "lattice_points", "max_measurements", "v_max", "a_max", "order", "step_sizes",
             "cma_population", "cma_iterations", "min_travel_time", "adaptive"});
    s.get("waypoints", pc.waypoints);
    s.get("lattice_points", pc.lattice_points);
    s.get("max_measurements", pc.max_measurements, 0);
    s.get("v_max", pc.limits.v_max);
    s.get("a_max", pc.limits.a_max);
    s.get("order", pc.limits.order);
    s.get("step_sizes", pc.step_sizes);
    s.get("cma_population", pc.cma_population);
    s.get("cma_iterations", pc.cma_iterations);
    s.get("min_travel_time", pc.min_travel_time);
    if (pc.waypoints < 2) s.fail("waypoints", "an integer >= 2");
    if (s.has("adaptive")) {
      const auto a = s.child("adaptive");
      a.allow({"enabled", "mu_th", "beta", "p_th"});
      a.get("enabled", pc.adaptive.enabled);
      a.get("mu_th", c.adaptive_mu_th);
      a.get("beta", pc.adaptive.beta);
      a.get("p_th", pc.adaptive.p_th);
      if (pc.adaptive.beta < 0.0) a.fail("beta", "a non-negative number");
    }
  }
  if (top.has("lawnmower")) {
    const auto s = top.child("lawnmower");
    s.allow({"altitude"});
    s.get("altitude", c.mission.lawnmower_altitude);
  }
  if (top.has("spiral")) {
    const auto s = top.child("spiral");
    s.allow({"z_start", "z_end"});
    s.get("z_start", c.mission.spiral_z_start);
    s.get("z_end", c.mission.spiral_z_end);
  }
  if (top.has("metrics")) {
    const auto s = top.child("metrics");
    s.allow({"truth_threshold"});
    s.get("truth_threshold", c.mission.truth_threshold);
  }
  resolve(c);
  try {
    pc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid planning configuration: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  const auto& pc = c.mission.planning;
  json bands = json::array();
  for (const auto& b : pc.sensor.bands)
    bands.push_back({{"upper_altitude", std::isinf(b.upper_altitude) ? json(nullptr) : json(b.upper_altitude)},
                     {"scale", b.scale}});
  json j = {
      {"name", c.name},
      {"trials", c.trials},
      {"seed", c.seed},
      {"planner", to_string(c.mission.planner)},
      {"budget", pc.budget},
      {"start", vec_json(c.mission.start)},
      {"scenario",
       {{"kind", scenario_name(c.scenario.kind)},
        {"width", c.scenario.width},
        {"height", c.scenario.height},
        {"resolution", c.scenario.resolution},
        {"cluster_radius", interval_json(c.scenario.cluster_radius)},
        {"value_range", interval_json(c.scenario.value_range)},
        {"split_threshold", c.scenario.split_threshold},
        {"occupancy_fraction", c.scenario.occupancy_fraction}}},
      {"workspace", {{"z_min", c.z_min}, {"z_max", c.z_max}}},
      {"camera",
       {{"fov_x_deg", pc.camera.fov_x_deg}, {"fov_y_deg", pc.camera.fov_y_deg}, {"frequency_hz", pc.camera.frequency_hz}}},
      {"sensor", {{"a", pc.sensor.a}, {"b", pc.sensor.b}, {"bands", bands}}},
      {"classifier",
       {{"altitudes", pc.classifier.altitudes},
        {"true_positive", pc.classifier.true_positive},
        {"false_positive", pc.classifier.false_positive}}},
      {"map",
       {{"sigma_f2", c.map.kernel.sigma_f2},
        {"length_scale", c.map.kernel.length_scale},
        {"sigma_n2", c.map.kernel.sigma_n2},
        {"prior_mean", c.map.prior_mean},
        {"value_scale", c.value_scale},
        {"prior_probability", c.map.prior_probability},
        {"log_odds_clamp", c.map.log_odds_clamp ? json(*c.map.log_odds_clamp) : json(nullptr)}}},
      {"planning",
       {{"waypoints", pc.waypoints},
        {"lattice_points", pc.lattice_points},
        {"max_measurements", pc.max_measurements},
        {"v_max", pc.limits.v_max},
        {"a_max", pc.limits.a_max},
        {"order", pc.limits.order},
        {"step_sizes", vec_json(pc.step_sizes)},
        {"cma_population", pc.cma_population},
        {"cma_iterations", pc.cma_iterations},
        {"min_travel_time", pc.min_travel_time},
        {"adaptive",
         {{"enabled", pc.adaptive.enabled},
          {"mu_th", c.adaptive_mu_th},
          {"beta", pc.adaptive.beta},
          {"p_th", pc.adaptive.p_th}}}}},
      {"lawnmower", {{"altitude", c.mission.lawnmower_altitude}}},
      {"spiral", {{"z_start", c.mission.spiral_z_start}, {"z_end", c.mission.spiral_z_end}}},
      {"metrics", {{"truth_threshold", c.mission.truth_threshold}}},
  };
  return j.dump(2) + "\n";
}

}  // namespace ipp
