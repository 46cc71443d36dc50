#include "hrc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

namespace hrc {

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw std::invalid_argument(std::string("unknown key '") + key + "' in " + what);
  }
}

template <class T>
void read_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_vec(const Json& j, const char* key, Vec3& out) {
  if (j.contains(key)) out = vec_from_json(j.at(key));
}

Json joints_to_json(const JointVector& q) {
  Json a = Json::array();
  for (std::size_t i = 0; i < kArmDof; ++i) a.push_back(q[i]);
  return a;
}

JointVector joints_from_json(const Json& j) {
  if (!j.is_array() || j.size() != kArmDof) throw std::invalid_argument("joint vector must have 7 entries");
  JointVector q;
  for (std::size_t i = 0; i < kArmDof; ++i) q[i] = j.at(i).get<double>();
  return q;
}

Json quat_to_json(const Eigen::Quaterniond& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }

Eigen::Quaterniond quat_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("quaternion must be [w, x, y, z]");
  Eigen::Quaterniond q(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
  if (!(q.norm() > 0.0)) throw std::invalid_argument("zero quaternion");
  return q.normalized();
}

Json pose_to_json(const RigidPose& p) {
  Json j;
  j["position"] = vec_to_json(p.position);
  j["orientation"] = quat_to_json(p.orientation);
  return j;
}

RigidPose pose_from_json(const Json& j) {
  reject_unknown(j, {"position", "orientation"}, "pose");
  RigidPose p;
  read_vec(j, "position", p.position);
  if (j.contains("orientation")) p.orientation = quat_from_json(j.at("orientation"));
  return p;
}

// Non-finite values serialize as null.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double finite_number(const Json& j) {
  if (!j.is_number()) throw std::invalid_argument("expected a finite number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw std::invalid_argument("expected a finite number");
  return v;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  j["data"] = std::move(data);
  return j;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const Json& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw std::invalid_argument("matrix data does not match its shape");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = finite_number(data[static_cast<std::size_t>(r * cols + c)]);
  return m;
}

}  // namespace

Json vec_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("point must be [x, y, z]");
  return {finite_number(j[0]), finite_number(j[1]), finite_number(j[2])};
}

void to_json(Json& j, const GenConfig& c) {
  j = Json::object();
  j["seed"] = c.seed;
  j["fps"] = c.fps;
  j["episode_len_s"] = c.episode_len_s;
  j["n_interactions"] = c.n_interactions;
  j["jitter_sigma"] = c.jitter_sigma;
  j["pot_position"] = vec_to_json(c.pot_position);
  j["rest_wrist"] = vec_to_json(c.rest_wrist);
  j["reach_duration_s"] = c.reach_duration_s;
  j["hold_duration_s"] = c.hold_duration_s;
  j["dwell_duration_s"] = c.dwell_duration_s;
}

void from_json(const Json& j, GenConfig& c) {
  reject_unknown(j, {"seed", "fps", "episode_len_s", "n_interactions", "jitter_sigma", "pot_position", "rest_wrist",
                     "reach_duration_s", "hold_duration_s", "dwell_duration_s"},
                 "gen config");
  read_opt(j, "seed", c.seed);
  read_opt(j, "fps", c.fps);
  read_opt(j, "episode_len_s", c.episode_len_s);
  read_opt(j, "n_interactions", c.n_interactions);
  read_opt(j, "jitter_sigma", c.jitter_sigma);
  read_vec(j, "pot_position", c.pot_position);
  read_vec(j, "rest_wrist", c.rest_wrist);
  read_opt(j, "reach_duration_s", c.reach_duration_s);
  read_opt(j, "hold_duration_s", c.hold_duration_s);
  read_opt(j, "dwell_duration_s", c.dwell_duration_s);
}

void to_json(Json& j, const TrainConfig& c) {
  j = Json::object();
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["momentum"] = c.momentum;
  j["transition_mix"] = c.transition_mix;
  j["wrist_weight"] = c.wrist_weight;
  j["wrist_only"] = c.wrist_only;
  j["seed"] = c.seed;
  j["preset"] = c.preset;
}

void from_json(const Json& j, TrainConfig& c) {
  reject_unknown(j, {"epochs", "batch_size", "learning_rate", "momentum", "transition_mix", "wrist_weight",
                     "wrist_only", "seed", "preset"},
                 "train config");
  read_opt(j, "epochs", c.epochs);
  read_opt(j, "batch_size", c.batch_size);
  read_opt(j, "learning_rate", c.learning_rate);
  read_opt(j, "momentum", c.momentum);
  read_opt(j, "transition_mix", c.transition_mix);
  read_opt(j, "wrist_weight", c.wrist_weight);
  read_opt(j, "wrist_only", c.wrist_only);
  read_opt(j, "seed", c.seed);
  read_opt(j, "preset", c.preset);
}

void to_json(Json& j, const MppiConfig& c) {
  j = Json::object();
  j["n_samples"] = c.n_samples;
  j["horizon"] = c.horizon;
  j["dt"] = c.dt;
  j["temperature"] = c.temperature;
  j["noise_sigma"] = c.noise_sigma;
  j["n_iterations"] = c.n_iterations;
  j["seed"] = c.seed;
}

void from_json(const Json& j, MppiConfig& c) {
  reject_unknown(j, {"n_samples", "horizon", "dt", "temperature", "noise_sigma", "n_iterations", "seed"},
                 "planner config");
  read_opt(j, "n_samples", c.n_samples);
  read_opt(j, "horizon", c.horizon);
  read_opt(j, "dt", c.dt);
  read_opt(j, "temperature", c.temperature);
  read_opt(j, "noise_sigma", c.noise_sigma);
  read_opt(j, "n_iterations", c.n_iterations);
  read_opt(j, "seed", c.seed);
}

void to_json(Json& j, const CostWeights& c) {
  j = Json::object();
  j["alpha_s"] = c.alpha_s;
  j["alpha_j"] = c.alpha_j;
  j["alpha_m"] = c.alpha_m;
  j["alpha_c"] = c.alpha_c;
  j["alpha_t"] = c.alpha_t;
  j["beta"] = c.beta;
  j["eps_pot"] = c.eps_pot;
  j["manip_floor"] = c.manip_floor;
  j["d_safe"] = c.d_safe;
}

void from_json(const Json& j, CostWeights& c) {
  reject_unknown(j, {"alpha_s", "alpha_j", "alpha_m", "alpha_c", "alpha_t", "beta", "eps_pot", "manip_floor", "d_safe"},
                 "cost weights");
  read_opt(j, "alpha_s", c.alpha_s);
  read_opt(j, "alpha_j", c.alpha_j);
  read_opt(j, "alpha_m", c.alpha_m);
  read_opt(j, "alpha_c", c.alpha_c);
  read_opt(j, "alpha_t", c.alpha_t);
  read_opt(j, "beta", c.beta);
  read_opt(j, "eps_pot", c.eps_pot);
  read_opt(j, "manip_floor", c.manip_floor);
  read_opt(j, "d_safe", c.d_safe);
}

void to_json(Json& j, const TaskSpec& c) {
  j = Json::object();
  j["task"] = std::string(to_string(c.task));
  j["pot_position"] = vec_to_json(c.pot_position);
  j["rest_config"] = joints_to_json(c.rest_config);
  j["stir_center"] = vec_to_json(c.stir_center);
  j["stir_radius"] = c.stir_radius;
  j["stir_period"] = c.stir_period;
  j["handover_wrist"] = c.handover_wrist;
  j["table_goal"] = pose_to_json(c.table_goal);
}

void from_json(const Json& j, TaskSpec& c) {
  reject_unknown(j, {"task", "pot_position", "rest_config", "stir_center", "stir_radius", "stir_period",
                     "handover_wrist", "table_goal"},
                 "task spec");
  if (j.contains("task")) c.task = task_from_string(j.at("task").get<std::string>());
  read_vec(j, "pot_position", c.pot_position);
  if (j.contains("rest_config")) c.rest_config = joints_from_json(j.at("rest_config"));
  read_vec(j, "stir_center", c.stir_center);
  read_opt(j, "stir_radius", c.stir_radius);
  read_opt(j, "stir_period", c.stir_period);
  read_opt(j, "handover_wrist", c.handover_wrist);
  if (c.handover_wrist != kLeftWrist && c.handover_wrist != kRightWrist)
    throw std::invalid_argument("handover_wrist must name a wrist joint");
  if (j.contains("table_goal")) c.table_goal = pose_from_json(j.at("table_goal"));
}

void to_json(Json& j, const ArmModel& m) {
  j = Json::object();
  Json dh = Json::array();
  for (const auto& r : m.dh) dh.push_back({{"a", r.a}, {"d", r.d}, {"alpha", r.alpha}});
  j["dh"] = std::move(dh);
  j["flange_offset"] = m.flange_offset;
  Json lim = Json::array();
  for (const auto& l : m.joint_limits) lim.push_back(Json::array({l.lo, l.hi}));
  j["joint_limits"] = std::move(lim);
  j["vel_limits"] = joints_to_json(m.vel_limits);
  Json spheres = Json::array();
  for (const auto& s : m.collision_spheres)
    spheres.push_back({{"link", s.link}, {"offset", vec_to_json(s.offset)}, {"radius", s.radius}});
  j["collision_spheres"] = std::move(spheres);
  j["base"] = pose_to_json(m.base);
}

void from_json(const Json& j, ArmModel& m) {
  reject_unknown(j, {"dh", "flange_offset", "joint_limits", "vel_limits", "collision_spheres", "sphere_radius", "base"},
                 "arm model");
  if (j.contains("dh")) {
    const Json& dh = j.at("dh");
    if (!dh.is_array() || dh.size() != kArmDof) throw std::invalid_argument("dh must have 7 rows");
    for (std::size_t i = 0; i < kArmDof; ++i)
      m.dh[i] = {dh[i].at("a").get<double>(), dh[i].at("d").get<double>(), dh[i].at("alpha").get<double>()};
  }
  read_opt(j, "flange_offset", m.flange_offset);
  if (j.contains("joint_limits")) {
    const Json& lim = j.at("joint_limits");
    if (!lim.is_array() || lim.size() != kArmDof) throw std::invalid_argument("joint_limits must have 7 entries");
    for (std::size_t i = 0; i < kArmDof; ++i) m.joint_limits[i] = {lim[i].at(0).get<double>(), lim[i].at(1).get<double>()};
  }
  if (j.contains("vel_limits")) m.vel_limits = joints_from_json(j.at("vel_limits"));
  if (j.contains("base")) m.base = pose_from_json(j.at("base"));
  if (j.contains("collision_spheres")) {
    m.collision_spheres.clear();
    for (const auto& s : j.at("collision_spheres"))
      m.collision_spheres.push_back({s.at("link").get<std::size_t>(), vec_from_json(s.at("offset")), s.at("radius").get<double>()});
  } else if (j.contains("sphere_radius")) {
    m.place_link_spheres(j.at("sphere_radius").get<double>());
  }
  m.validate();
}

Json episode_to_json(const Episode& ep) {
  Json j;
  j["fps"] = ep.fps;
  Json names = Json::array();
  for (auto n : kJointNames) names.push_back(std::string(n));
  j["joint_names"] = std::move(names);
  Json frames = Json::array();
  for (const auto& p : ep.frames) {
    Json f = Json::array();
    for (const auto& v : p.joints) f.push_back(vec_to_json(v));
    frames.push_back(std::move(f));
  }
  j["frames"] = std::move(frames);
  Json tr = Json::array();
  for (const auto& iv : ep.transitions) tr.push_back(Json::array({iv.start, iv.end}));
  j["transitions"] = std::move(tr);
  j["task"] = std::string(to_string(ep.task));
  Json extras = Json::object();
  if (ep.extras.pot_position) extras["pot_position"] = vec_to_json(*ep.extras.pot_position);
  if (!ep.extras.handover_goals.empty()) {
    Json goals = Json::array();
    for (const auto& g : ep.extras.handover_goals) goals.push_back(vec_to_json(g));
    extras["handover_goals"] = std::move(goals);
  }
  if (!ep.extras.object_in_hand.empty()) {
    Json held = Json::array();
    for (bool b : ep.extras.object_in_hand) held.push_back(b);
    extras["object_in_hand"] = std::move(held);
  }
  if (!ep.extras.waypoints.empty()) {
    Json wp = Json::array();
    for (const auto& w : ep.extras.waypoints) wp.push_back(vec_to_json(w));
    extras["waypoints"] = std::move(wp);
  }
  if (ep.extras.seed) extras["seed"] = *ep.extras.seed;
  j["extras"] = std::move(extras);
  return j;
}

Episode episode_from_json(const Json& j) {
  try {
    Episode ep;
    ep.fps = finite_number(j.at("fps"));
    if (j.contains("joint_names")) {
      const Json& names = j.at("joint_names");
      if (!names.is_array() || names.size() != kNumJoints) throw std::invalid_argument("expected 7 joint names");
    }
    for (const auto& f : j.at("frames")) {
      if (!f.is_array() || f.size() != kNumJoints) throw std::invalid_argument("every frame must have 7 joints");
      Pose p;
      for (std::size_t i = 0; i < kNumJoints; ++i) p[i] = vec_from_json(f[i]);
      ep.frames.push_back(p);
    }
    for (const auto& iv : j.at("transitions")) {
      if (!iv.is_array() || iv.size() != 2) throw std::invalid_argument("transition must be [start, end]");
      ep.transitions.push_back({iv[0].get<int>(), iv[1].get<int>()});
    }
    ep.task = task_from_string(j.at("task").get<std::string>());
    if (j.contains("extras")) {
      const Json& x = j.at("extras");
      if (x.contains("pot_position")) ep.extras.pot_position = vec_from_json(x.at("pot_position"));
      if (x.contains("handover_goals"))
        for (const auto& g : x.at("handover_goals")) ep.extras.handover_goals.push_back(vec_from_json(g));
      if (x.contains("object_in_hand"))
        for (const auto& b : x.at("object_in_hand")) ep.extras.object_in_hand.push_back(b.get<bool>());
      if (x.contains("waypoints"))
        for (const auto& w : x.at("waypoints")) ep.extras.waypoints.push_back(vec_from_json(w));
      if (x.contains("seed")) ep.extras.seed = x.at("seed").get<long long>();
    }
    ep.validate();
    return ep;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed episode: ") + e.what());
  }
}

Json checkpoint_to_json(const ForecastModel& model) {
  Json j;
  j["k"] = model.context_length();
  j["T"] = model.horizon();
  j["J"] = static_cast<std::size_t>(model.S.rows());
  j["preset"] = model.preset;
  j["seed"] = model.seed;
  j["trained"] = model.trained;
  j["wrist_only"] = model.wrist_only;
  j["S"] = matrix_to_json(model.S);
  j["M"] = matrix_to_json(model.M);
  j["w"] = matrix_to_json(model.w);
  return j;
}

ForecastModel checkpoint_from_json(const Json& j) {
  try {
    ForecastModel m;
    m.S = matrix_from_json(j.at("S"));
    m.M = matrix_from_json(j.at("M"));
    const Eigen::MatrixXd w = matrix_from_json(j.at("w"));
    if (w.cols() != 1) throw std::invalid_argument("joint weights must be a column");
    m.w = w.col(0);
    m.preset = j.at("preset").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.trained = j.at("trained").get<bool>();
    m.wrist_only = j.at("wrist_only").get<bool>();
    if (j.at("k").get<std::size_t>() != m.context_length() || j.at("T").get<std::size_t>() != m.horizon() ||
        j.at("J").get<std::size_t>() != static_cast<std::size_t>(m.S.rows()))
      throw std::invalid_argument("checkpoint shape tags disagree with its matrices");
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed checkpoint: ") + e.what());
  }
}

Json sim_step_to_json(const SimStep& s, const SimLog& log) {
  Json j;
  j["frame"] = s.frame;
  j["forecaster"] = log.forecaster;
  j["task"] = std::string(to_string(log.task));
  j["volume_forecast"] = log.volume_forecast;
  j["dt"] = log.dt;
  j["horizon"] = log.horizon;
  j["q"] = joints_to_json(s.state.q);
  j["qd"] = joints_to_json(s.state.qd);
  j["command"] = joints_to_json(s.command);
  j["ee"] = pose_to_json(s.ee);
  j["best_cost"] = number_or_null(s.best_cost);
  j["min_separation"] = s.min_separation;
  j["pot_distance"] = s.pot_distance ? Json(*s.pot_distance) : Json(nullptr);
  j["retract"] = s.retract;
  j["forecast_wrist"] = s.forecast_wrist ? vec_to_json(*s.forecast_wrist) : Json(nullptr);
  j["wrist_error"] = s.wrist_error ? Json(*s.wrist_error) : Json(nullptr);
  j["object_in_hand"] = s.object_in_hand;
  return j;
}

std::string sim_log_to_jsonl(const SimLog& log) {
  std::string out;
  for (const auto& s : log.steps) {
    out += sim_step_to_json(s, log).dump();
    out += '\n';
  }
  return out;
}

SimLog sim_log_from_jsonl(const std::string& text) {
  SimLog log;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line);
    if (first) {
      log.forecaster = j.at("forecaster").get<std::string>();
      log.task = task_from_string(j.at("task").get<std::string>());
      log.volume_forecast = j.at("volume_forecast").get<bool>();
      log.dt = j.at("dt").get<double>();
      log.horizon = j.at("horizon").get<std::size_t>();
      first = false;
    }
    SimStep s;
    s.frame = j.at("frame").get<int>();
    s.state.q = joints_from_json(j.at("q"));
    s.state.qd = joints_from_json(j.at("qd"));
    s.command = joints_from_json(j.at("command"));
    s.ee = pose_from_json(j.at("ee"));
    s.best_cost = j.at("best_cost").is_null() ? std::numeric_limits<double>::infinity() : j.at("best_cost").get<double>();
    s.min_separation = j.at("min_separation").get<double>();
    if (!j.at("pot_distance").is_null()) s.pot_distance = j.at("pot_distance").get<double>();
    s.retract = j.at("retract").get<bool>();
    if (!j.at("forecast_wrist").is_null()) s.forecast_wrist = vec_from_json(j.at("forecast_wrist"));
    if (!j.at("wrist_error").is_null()) s.wrist_error = j.at("wrist_error").get<double>();
    s.object_in_hand = j.at("object_in_hand").get<bool>();
    log.steps.push_back(s);
  }
  return log;
}

Json as_json(const Stat& s) { return {{"mean", s.mean}, {"se", s.se}, {"n", s.n}}; }

Json as_json(const ForecastMetrics& m) {
  Json j;
  j["ade"] = as_json(m.ade);
  j["fde"] = as_json(m.fde);
  j["wrist_ade"] = as_json(m.wrist_ade);
  j["wrist_fde"] = as_json(m.wrist_fde);
  j["t_ade"] = as_json(m.t_ade);
  j["t_fde"] = as_json(m.t_fde);
  j["t_wrist_ade"] = as_json(m.t_wrist_ade);
  j["t_wrist_fde"] = as_json(m.t_wrist_fde);
  return j;
}

Json as_json(const StopRestart& s) {
  Json j;
  j["stop_time_ms"] = as_json(s.stop_ms);
  j["restart_time_ms"] = s.restart_ms ? as_json(*s.restart_ms) : Json(nullptr);
  j["fdr"] = s.fdr;
  j["incursions"] = s.incursions;
  j["missed"] = s.missed;
  j["activations"] = s.activations;
  j["false_activations"] = s.false_activations;
  return j;
}

Json as_json(const HandoverMetrics& h) {
  Json j;
  j["goal_detection_ms"] = as_json(h.goal_detection_ms);
  j["correct_goal_rate"] = h.correct_goal_rate;
  j["path_length_mm"] = as_json(h.path_length_mm);
  j["time_to_goal_s"] = as_json(h.time_to_goal_s);
  j["handovers"] = h.handovers;
  j["detected"] = h.detected;
  j["arrived"] = h.arrived;
  return j;
}

Json as_json(const MetricReport& r) {
  Json j;
  Json f = Json::object();
  for (const auto& [name, m] : r.forecasting) f[name] = as_json(m);
  j["forecasting"] = std::move(f);
  Json p = Json::object();
  for (const auto& [name, m] : r.planning) {
    Json e = Json::object();
    if (m.stop_restart) e["stirring"] = as_json(*m.stop_restart);
    if (m.handover) e["handover"] = as_json(*m.handover);
    p[name] = std::move(e);
  }
  j["planning"] = std::move(p);
  return j;
}

Json as_json(const Lemma1Report& r) {
  Json j;
  j["eps_P"] = r.eps_p;
  j["eps_Q"] = r.eps_q;
  j["ell_theta"] = r.ell;
  j["c_max"] = r.c_max;
  j["transition_mass"] = r.transition_mass;
  j["bound_P"] = r.bound_p;
  j["bound_Q"] = r.bound_q;
  j["holds_P"] = r.holds_p;
  j["holds_Q"] = r.holds_q;
  return j;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hrc
