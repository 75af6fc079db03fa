#include "softnash/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "softnash/format.hpp"

#ifndef SOFTNASH_DEFAULT_CONFIG
#define SOFTNASH_DEFAULT_CONFIG "config/default.json"
#endif

namespace softnash {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  Reader child(const std::string& key) const {
    return Reader(at(key), path_ + "." + key);
  }

  const json& at(const std::string& key) const {
    if (!node_.is_object() || !node_.contains(key))
      throw std::invalid_argument("config: missing key " + path_ + "." + key);
    return node_.at(key);
  }

  bool has(const std::string& key) const {
    return node_.is_object() && node_.contains(key);
  }

  double number(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number())
      throw std::invalid_argument("config: " + path_ + "." + key + " must be a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number_integer())
      throw std::invalid_argument("config: " + path_ + "." + key + " must be an integer");
    return v.get<std::int64_t>();
  }

  std::string string(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string())
      throw std::invalid_argument("config: " + path_ + "." + key + " must be a string");
    return v.get<std::string>();
  }

  // Scalar s -> s I, or a dim x dim nested array.
  MatrixXd matrix(const std::string& key, int dim) const {
    const auto& v = at(key);
    if (v.is_number()) return v.get<double>() * MatrixXd::Identity(dim, dim);
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
      throw std::invalid_argument("config: " + path_ + "." + key +
                                  " must be a scalar or a square array");
    MatrixXd M(dim, dim);
    for (int i = 0; i < dim; ++i) {
      if (!v[i].is_array() || static_cast<int>(v[i].size()) != dim)
        throw std::invalid_argument("config: " + path_ + "." + key + " row size");
      for (int j = 0; j < dim; ++j) M(i, j) = v[i][j].get<double>();
    }
    return M;
  }

  Vec3 vec3(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_array() || v.size() != 3)
      throw std::invalid_argument("config: " + path_ + "." + key + " must be a 3-vector");
    return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }

  const std::string& path() const { return path_; }

 private:
  const json& node_;
  std::string path_;
};

// Comment keys are dropped before hashing so annotations do not change the
// identity of a configuration.
json strip_comments(const json& j) {
  if (j.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : j.items()) {
      if (!k.empty() && k.front() == '_') continue;
      out[k] = strip_comments(v);
    }
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(strip_comments(v));
    return out;
  }
  return j;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (modes.empty()) throw std::invalid_argument("experiment needs at least one mode");
  if (seeds.empty()) throw std::invalid_argument("experiment needs at least one seed");
  if (parallel < 0) throw std::invalid_argument("parallel must be >= 0");
  TrialConfig probe = trial;
  for (const auto& m : modes) {
    probe.mode = m;
    probe.validate();
  }
}

namespace {

ExperimentConfig parse_document(const json& doc) {
  const Reader root(doc, "$");
  ExperimentConfig cfg;
  TrialConfig& trial = cfg.trial;

  const auto plant = root.child("plant");
  const PlantParams params{plant.number("mass_kg"), plant.number("damping_Ns_per_m"),
                           plant.number("period_s"),
                           plant.number("workspace_halfwidth_m")};
  trial.dynamics = params.dynamics();
  trial.workspace = params.workspace();

  const auto w = root.child("weights");
  trial.weights.Q_r = w.matrix("Q_r", 3);
  trial.weights.R_r = w.matrix("R_r", 3);
  trial.weights.S = w.matrix("S", 3);
  trial.weights.alpha = w.number("alpha");
  trial.weights.Q_h = w.matrix("Q_h", 3);
  trial.weights.R_h = w.matrix("R_h", 3);
  trial.weights.velocity_weight = w.number("velocity_weight");
  trial.weights.validate();

  const auto classic = root.child("classic");
  trial.classic = {classic.number("kp_N_per_m"), classic.number("kd_Ns_per_m")};

  const auto human = root.child("human");
  trial.human.kp = human.number("kp_N_per_m");
  trial.human.kd = human.number("kd_Ns_per_m");
  trial.human.delay_steps = static_cast<int>(human.integer("delay_steps"));
  trial.human.noise_sigma = human.number("noise_sigma_N");
  const auto& devs = human.at("deviations");
  if (!devs.is_array())
    throw std::invalid_argument("config: $.human.deviations must be an array");
  for (std::size_t i = 0; i < devs.size(); ++i) {
    const Reader ep(devs[i], human.path() + ".deviations[" + std::to_string(i) + "]");
    trial.human.deviations.push_back(
        {ep.number("start_s"), ep.number("end_s"), ep.vec3("offset_m")});
  }

  const auto traj = root.child("trajectory");
  trial.trajectory.filter = traj.number("filter");
  trial.trajectory.amplitude = traj.number("amplitude_m_per_s");
  trial.trajectory.period_s = trial.dynamics.period;
  trial.trajectory.box = trial.workspace;

  const auto t = root.child("trial");
  trial.duration_s = t.number("duration_s");
  trial.fade_s = t.number("fade_s");
  trial.force_cap_N = t.number("force_cap_N");
  trial.trajectory.duration_s = trial.duration_s;

  const auto exp = root.child("experiment");
  for (const auto& m : exp.at("modes")) cfg.modes.push_back(parse_mode(m.get<std::string>()));
  for (const auto& s : exp.at("seeds")) cfg.seeds.push_back(s.get<std::uint64_t>());
  cfg.output_dir = exp.string("output_dir");
  cfg.formats.clear();
  for (const auto& f : exp.at("formats")) cfg.formats.push_back(f.get<std::string>());
  cfg.parallel = static_cast<int>(exp.integer("parallel"));

  const auto session = root.child("session");
  cfg.session.coupling_kp = session.number("coupling_kp_N_per_m");
  cfg.session.coupling_kd = session.number("coupling_kd_Ns_per_m");
  cfg.session.rms_window_s = session.number("rms_window_s");
  cfg.session.decimation = static_cast<int>(session.integer("decimation"));
  cfg.session.min_duration_s = session.number("min_duration_s");
  cfg.session.initial_mode = parse_mode(session.string("mode"));
  cfg.session.seed = session.at("seed").get<std::uint64_t>();

  if (cfg.modes.empty() || cfg.seeds.empty())
    throw std::invalid_argument("config: experiment needs at least one mode and one seed");
  trial.mode = cfg.modes.front();
  trial.seed = cfg.seeds.front();
  trial.config_hash = fnv1a_hex(strip_comments(doc).dump());
  cfg.validate();
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  try {
    return parse_document(doc);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::filesystem::path default_config_path() {
  if (const char* env = std::getenv("SOFTNASH_DEFAULT_CONFIG"); env && *env)
    return env;
  return SOFTNASH_DEFAULT_CONFIG;
}

}  // namespace softnash
