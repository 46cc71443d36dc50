#include "hrc/cli.hpp"

#include "hrc/metrics.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace hrc::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::array<Task, 3> kTasks = {Task::Stir, Task::Handover, Task::TableSet};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int task_index(Task t) { return static_cast<int>(t); }

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

template <class T>
T sub_config(const Json& j, const char* key, std::uint64_t seed, bool seeded) {
  T out{};
  Json body = j.contains(key) ? j.at(key) : Json::object();
  if (seeded && !body.contains("seed")) body["seed"] = seed;
  from_json(body, out);
  return out;
}

int dataset_size(const RunConfig& c, Task t) {
  switch (t) {
    case Task::Stir: return c.dataset.stir;
    case Task::Handover: return c.dataset.handover;
    case Task::TableSet: return c.dataset.tableset;
  }
  return 0;
}

bool task_selected(const RunConfig& c, Task t) { return !c.task || *c.task == t; }

std::string episode_file_name(Task t, int i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03d.json", std::string(to_string(t)).c_str(), i);
  return buf;
}

fs::path manifest_path(const RunConfig& c) { return run_dir(c) / c.data_dir / "manifest.json"; }

std::vector<Window> windows_of(const std::vector<DatasetEntry>& data, const RunConfig& c, const std::string& split,
                               std::size_t stride, std::optional<Task> only = std::nullopt) {
  std::vector<Window> out;
  for (const auto& e : data) {
    if (e.split != split || !task_selected(c, e.task) || (only && e.task != *only)) continue;
    auto w = slide_windows(e.episode, kContextLength, kHorizon, stride);
    out.insert(out.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  return out;
}

bool is_baseline(const std::string& name) {
  return name == "cur" || name == "cvm" || name == "worst" || name == "fut";
}

bool is_preset(const std::string& name) {
  const auto& p = preset_names();
  return std::find(p.begin(), p.end(), name) != p.end();
}

// Log files are named <episode>__<model>.jsonl.
std::pair<std::string, std::string> split_log_name(const fs::path& p) {
  const std::string stem = p.stem().string();
  const auto pos = stem.rfind("__");
  if (pos == std::string::npos) throw std::runtime_error("unrecognized log name " + p.string());
  return {stem.substr(0, pos), stem.substr(pos + 2)};
}

std::string model_label(const std::string& model) { return fs::path(model).stem().string(); }

}  // namespace

RunConfig parse_run_config(const Json& j) {
  try {
    static const std::vector<std::string> keys{"seed", "preset", "task", "paths", "dataset", "gen", "train",
                                               "mppi", "weights", "task_spec", "arm", "eval"};
    if (!j.is_object()) throw UsageError("run config must be a JSON object");
    for (const auto& [key, value] : j.items())
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw UsageError("unknown key '" + key + "' in run config");

    RunConfig c;
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("preset")) c.preset = j.at("preset").get<std::string>();
    if (!is_preset(c.preset)) throw UsageError("unknown preset '" + c.preset + "'");
    if (j.contains("task") && !j.at("task").is_null()) c.task = task_from_string(j.at("task").get<std::string>());
    if (j.contains("paths")) {
      const Json& p = j.at("paths");
      for (const auto& [key, value] : p.items())
        if (key != "data_dir" && key != "checkpoint_dir" && key != "output_dir")
          throw UsageError("unknown key '" + key + "' in paths");
      if (p.contains("data_dir")) c.data_dir = p.at("data_dir").get<std::string>();
      if (p.contains("checkpoint_dir")) c.checkpoint_dir = p.at("checkpoint_dir").get<std::string>();
      if (p.contains("output_dir")) c.output_dir = p.at("output_dir").get<std::string>();
    }
    if (j.contains("dataset")) {
      const Json& d = j.at("dataset");
      for (const auto& [key, value] : d.items())
        if (key != "stir" && key != "handover" && key != "tableset" && key != "window_stride")
          throw UsageError("unknown key '" + key + "' in dataset");
      if (d.contains("stir")) c.dataset.stir = d.at("stir").get<int>();
      if (d.contains("handover")) c.dataset.handover = d.at("handover").get<int>();
      if (d.contains("tableset")) c.dataset.tableset = d.at("tableset").get<int>();
      if (d.contains("window_stride")) c.dataset.window_stride = d.at("window_stride").get<std::size_t>();
    }
    if (c.dataset.window_stride == 0) throw UsageError("window_stride must be >= 1");
    if (j.contains("eval")) {
      const Json& e = j.at("eval");
      for (const auto& [key, value] : e.items())
        if (key != "models" && key != "max_episodes") throw UsageError("unknown key '" + key + "' in eval");
      if (e.contains("models")) c.eval.models = e.at("models").get<std::vector<std::string>>();
      if (e.contains("max_episodes")) c.eval.max_episodes = e.at("max_episodes").get<int>();
    }
    c.gen = sub_config<GenConfig>(j, "gen", c.seed, true);
    c.train = sub_config<TrainConfig>(j, "train", c.seed, true);
    c.mppi = sub_config<MppiConfig>(j, "mppi", c.seed, true);
    c.weights = sub_config<CostWeights>(j, "weights", c.seed, false);
    c.task_spec = sub_config<TaskSpec>(j, "task_spec", c.seed, false);
    if (j.contains("arm")) from_json(j.at("arm"), c.arm);
    c.gen.validate();
    c.train.validate();
    c.mppi.validate();
    c.weights.validate();
    c.arm.validate();
    return c;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(std::string("invalid run config: ") + e.what());
  }
}

Json run_config_to_json(const RunConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["preset"] = c.preset;
  j["task"] = c.task ? Json(std::string(to_string(*c.task))) : Json(nullptr);
  j["paths"] = {{"data_dir", c.data_dir.string()},
                {"checkpoint_dir", c.checkpoint_dir.string()},
                {"output_dir", c.output_dir.string()}};
  j["dataset"] = {{"stir", c.dataset.stir},
                  {"handover", c.dataset.handover},
                  {"tableset", c.dataset.tableset},
                  {"window_stride", c.dataset.window_stride}};
  j["gen"] = c.gen;
  j["train"] = c.train;
  j["mppi"] = c.mppi;
  j["weights"] = c.weights;
  j["task_spec"] = c.task_spec;
  j["arm"] = c.arm;
  j["eval"] = {{"models", c.eval.models}, {"max_episodes", c.eval.max_episodes}};
  return j;
}

std::string config_hash(const RunConfig& c) {
  Json j = run_config_to_json(c);
  j.erase("preset");
  j.erase("task");
  j["paths"].erase("output_dir");
  return fnv1a_hex(j.dump());
}

fs::path run_dir(const RunConfig& c) { return c.output_dir / ("run-" + config_hash(c)); }

std::uint64_t episode_seed(std::uint64_t seed, Task task, int index) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(task_index(task)) * 1000003ULL +
                                      static_cast<std::uint64_t>(index)));
}

fs::path cmd_gen(const RunConfig& c, std::ostream& out) {
  const fs::path dir = run_dir(c) / c.data_dir;
  fs::create_directories(dir);
  write_json(run_dir(c) / "run_config.json", run_config_to_json(c));
  Json entries = Json::array();
  for (Task t : kTasks) {
    if (!task_selected(c, t)) continue;
    const int n = dataset_size(c, t);
    if (n < 10) throw UsageError("each task needs at least 10 episodes for an 8:1:1 split");
    const DatasetSplit split = split_dataset(static_cast<std::size_t>(n), splitmix64(c.gen.seed ^ (0xa5a5ULL + task_index(t))));
    std::vector<std::string> label(static_cast<std::size_t>(n));
    for (auto i : split.train) label[i] = "train";
    for (auto i : split.val) label[i] = "val";
    for (auto i : split.test) label[i] = "test";
    for (int i = 0; i < n; ++i) {
      GenConfig g = c.gen;
      g.seed = episode_seed(c.gen.seed, t, i);
      const Episode ep = generate(t, g);
      const std::string text = episode_to_json(ep).dump() + "\n";
      const std::string file = episode_file_name(t, i);
      write_text(dir / file, text);
      entries.push_back({{"file", file},
                         {"task", std::string(to_string(t))},
                         {"seed", g.seed},
                         {"split", label[static_cast<std::size_t>(i)]},
                         {"fnv1a", fnv1a_hex(text)}});
    }
  }
  Json manifest;
  manifest["config_hash"] = config_hash(c);
  manifest["episodes"] = std::move(entries);
  const fs::path path = manifest_path(c);
  write_json(path, manifest);
  out << "manifest " << path.string() << " episodes " << manifest["episodes"].size() << " fnv1a "
      << fnv1a_hex(manifest.dump(2) + "\n") << "\n";
  return path;
}

std::vector<DatasetEntry> load_dataset(const RunConfig& c) {
  const fs::path path = manifest_path(c);
  if (!fs::exists(path)) throw std::runtime_error("no dataset at " + path.string() + "; run gen first");
  const Json manifest = read_json(path);
  std::vector<DatasetEntry> data;
  for (const auto& e : manifest.at("episodes")) {
    DatasetEntry d;
    d.file = e.at("file").get<std::string>();
    d.task = task_from_string(e.at("task").get<std::string>());
    d.seed = e.at("seed").get<std::uint64_t>();
    d.split = e.at("split").get<std::string>();
    const std::string text = read_text(path.parent_path() / d.file);
    if (fnv1a_hex(text) != e.at("fnv1a").get<std::string>())
      throw std::runtime_error("episode file " + d.file + " does not match the manifest");
    d.episode = episode_from_json(Json::parse(text));
    data.push_back(std::move(d));
  }
  return data;
}

fs::path cmd_train(const RunConfig& c, std::ostream& out) {
  const auto data = load_dataset(c);
  TrainConfig cfg = preset_config(c.preset);
  cfg.epochs = c.train.epochs;
  cfg.batch_size = c.train.batch_size;
  cfg.learning_rate = c.train.learning_rate;
  cfg.momentum = c.train.momentum;
  cfg.seed = c.train.seed;
  const auto train_w = windows_of(data, c, "train", c.dataset.window_stride);
  const auto val_w = windows_of(data, c, "val", c.dataset.window_stride);
  const TrainResult res = train(ForecastModel::identity(), train_w, val_w, cfg);

  const fs::path dir = run_dir(c) / c.checkpoint_dir;
  const fs::path ckpt = dir / (c.preset + ".json");
  write_json(ckpt, checkpoint_to_json(res.model));
  std::string csv = "epoch,train_loss,val_loss\n";
  for (const auto& r : res.history) csv += std::to_string(r.epoch) + "," + num(r.train_loss) + "," + num(r.val_loss) + "\n";
  write_text(dir / (c.preset + "_history.csv"), csv);
  const auto& best = res.history[static_cast<std::size_t>(res.best_epoch)];
  out << "checkpoint " << ckpt.string() << " preset " << c.preset << " best_epoch " << res.best_epoch << " val_loss "
      << fixed(best.val_loss, 6) << " windows " << train_w.size() << "/" << val_w.size() << "\n";
  return ckpt;
}

Forecaster resolve_forecaster(const RunConfig& c, const std::string& name) {
  if (is_baseline(name)) return baseline_forecaster(name);
  fs::path path;
  if (is_preset(name)) {
    path = run_dir(c) / c.checkpoint_dir / (name + ".json");
    if (!fs::exists(path)) throw std::runtime_error("no checkpoint for preset '" + name + "'; run train first");
  } else if (fs::exists(name)) {
    path = name;
  } else {
    throw UsageError("unknown model '" + name + "'");
  }
  Forecaster f = model_forecaster(checkpoint_from_json(read_json(path)));
  f.name = model_label(name);
  return f;
}

fs::path cmd_eval_forecast(const RunConfig& c, std::ostream& out) {
  const auto data = load_dataset(c);
  MetricReport report;
  for (const auto& name : c.eval.models) {
    const Forecaster f = resolve_forecaster(c, name);
    for (Task t : kTasks) {
      if (!task_selected(c, t)) continue;
      const auto windows = windows_of(data, c, "test", 1, t);
      if (windows.empty()) continue;
      std::vector<Trajectory> preds;
      preds.reserve(windows.size());
      bool point = true;
      for (const auto& w : windows) {
        const Forecast fc = f.predict(w.context, f.uses_future ? &w.future : nullptr);
        if (!fc.is_point()) {
          point = false;
          break;
        }
        preds.push_back(*fc.trajectory);
      }
      if (!point) {
        out << "skip " << f.name << ": safety volumes have no displacement error\n";
        break;
      }
      const ForecastMetrics m = forecast_metrics(windows, preds);
      const std::string key = std::string(to_string(t)) + "/" + f.name;
      report.forecasting[key] = m;
      out << key << " ade " << fixed(m.ade.mean) << " fde " << fixed(m.fde.mean) << " wrist_fde "
          << fixed(m.wrist_fde.mean) << " t_wrist_fde " << fixed(m.t_wrist_fde.mean) << "\n";
    }
  }
  const fs::path path = run_dir(c) / "reports" / "forecast_report.json";
  write_json(path, as_json(report));
  out << "report " << path.string() << "\n";
  return path;
}

fs::path cmd_simulate(const RunConfig& c, const fs::path& episode_file, const std::string& model,
                      const std::optional<fs::path>& task_spec_file, const std::optional<fs::path>& mppi_file,
                      const std::optional<fs::path>& out_file, std::ostream& out) {
  const Episode ep = episode_from_json(read_json(episode_file));
  TaskSpec spec = c.task_spec;
  if (task_spec_file) {
    spec = TaskSpec{};
    try {
      from_json(read_json(*task_spec_file), spec);
    } catch (const std::exception& e) {
      throw UsageError(std::string("invalid task spec: ") + e.what());
    }
    if (spec.task != ep.task) throw UsageError("task spec does not match the episode task");
  } else {
    spec.task = ep.task;
  }
  MppiConfig mppi = c.mppi;
  if (mppi_file) {
    mppi = MppiConfig{};
    try {
      Json j = read_json(*mppi_file);
      if (!j.contains("seed")) j["seed"] = c.seed;
      from_json(j, mppi);
      mppi.validate();
    } catch (const std::exception& e) {
      throw UsageError(std::string("invalid planner config: ") + e.what());
    }
  }
  const Forecaster f = resolve_forecaster(c, model);
  const SimLog log = run_episode(c.arm, ep, f, spec, c.weights, mppi);
  const fs::path path = out_file ? *out_file
                                 : run_dir(c) / "sim" / (episode_file.stem().string() + "__" + f.name + ".jsonl");
  const std::string text = sim_log_to_jsonl(log);
  write_text(path, text);
  out << "simlog " << path.string() << " steps " << log.steps.size() << " fnv1a " << fnv1a_hex(text) << "\n";
  return path;
}

fs::path cmd_eval_plan(const RunConfig& c, std::ostream& out) {
  const auto data = load_dataset(c);
  std::vector<std::string> models = c.eval.models;
  if (std::find(models.begin(), models.end(), "cur") == models.end()) models.insert(models.begin(), "cur");
  const fs::path sim_dir = run_dir(c) / "sim";
  for (Task t : {Task::Stir, Task::Handover}) {
    if (!task_selected(c, t)) continue;
    int used = 0;
    for (const auto& e : data) {
      if (e.task != t || e.split != "test") continue;
      if (c.eval.max_episodes > 0 && used >= c.eval.max_episodes) break;
      ++used;
      TaskSpec spec = c.task_spec;
      spec.task = t;
      for (const auto& name : models) {
        const Forecaster f = resolve_forecaster(c, name);
        if (t == Task::Handover && f.produces_volume) {
          out << "skip " << f.name << " on handover: safety volumes carry no wrist\n";
          continue;
        }
        const SimLog log = run_episode(c.arm, e.episode, f, spec, c.weights, c.mppi);
        const fs::path path = sim_dir / (fs::path(e.file).stem().string() + "__" + f.name + ".jsonl");
        write_text(path, sim_log_to_jsonl(log));
        out << "simlog " << path.string() << " steps " << log.steps.size() << "\n";
      }
    }
  }
  return cmd_report(c, sim_dir, out);
}

fs::path cmd_report(const RunConfig& c, const std::optional<fs::path>& log_dir, std::ostream& out) {
  const fs::path dir = log_dir ? *log_dir : run_dir(c) / "sim";
  if (!fs::is_directory(dir)) throw std::runtime_error("no simulation logs at " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no simulation logs at " + dir.string());

  std::map<std::string, Episode> episodes;
  for (auto& e : load_dataset(c)) episodes.emplace(fs::path(e.file).stem().string(), std::move(e.episode));

  // logs[model][episode]
  std::map<std::string, std::map<std::string, SimLog>> logs;
  std::string csv = "episode,model,frame,wrist_error,retract,min_separation\n";
  for (const auto& p : files) {
    const auto [episode, model] = split_log_name(p);
    SimLog log = sim_log_from_jsonl(read_text(p));
    for (const auto& s : log.steps)
      csv += episode + "," + model + "," + std::to_string(s.frame) + "," + (s.wrist_error ? num(*s.wrist_error) : "") +
             "," + (s.retract ? "1" : "0") + "," + num(s.min_separation) + "\n";
    logs[model].emplace(episode, std::move(log));
  }
  if (!logs.count("cur")) throw std::runtime_error("report needs current-pose baseline logs");

  MetricReport report;
  const fs::path forecast_report = run_dir(c) / "reports" / "forecast_report.json";
  Json report_json;
  for (const auto& [model, by_episode] : logs) {
    std::vector<SimLog> stir_model, stir_cur, ho_model, ho_cur;
    std::vector<Episode> ho_eps;
    for (const auto& [episode, log] : by_episode) {
      const auto cur = logs["cur"].find(episode);
      if (cur == logs["cur"].end()) continue;
      if (log.task == Task::Stir) {
        stir_model.push_back(log);
        stir_cur.push_back(cur->second);
      } else if (log.task == Task::Handover) {
        const auto ep = episodes.find(episode);
        if (ep == episodes.end()) throw std::runtime_error("no episode '" + episode + "' in the dataset");
        ho_model.push_back(log);
        ho_cur.push_back(cur->second);
        ho_eps.push_back(ep->second);
      }
    }
    PlanningMetrics pm;
    if (!stir_model.empty()) pm.stop_restart = stop_restart_times(stir_model, stir_cur);
    if (!ho_model.empty()) pm.handover = handover_metrics(ho_model, ho_cur, ho_eps);
    report.planning[model] = pm;
    out << model;
    if (pm.stop_restart)
      out << " stop_ms " << fixed(pm.stop_restart->stop_ms.mean, 1) << " restart_ms "
          << (pm.stop_restart->restart_ms ? fixed(pm.stop_restart->restart_ms->mean, 1) : std::string("n/a")) << " fdr "
          << fixed(pm.stop_restart->fdr);
    if (pm.handover)
      out << " detect_ms " << fixed(pm.handover->goal_detection_ms.mean, 1) << " correct_goal_rate "
          << fixed(pm.handover->correct_goal_rate);
    out << "\n";
  }
  report_json = as_json(report);
  if (fs::exists(forecast_report)) report_json["forecasting"] = read_json(forecast_report).at("forecasting");

  const fs::path path = run_dir(c) / "reports" / "report.json";
  write_json(path, report_json);
  write_text(run_dir(c) / "reports" / "timeseries.csv", csv);
  out << "report " << path.string() << "\n";
  return path;
}

int cmd_lemma(int n_instances, std::uint64_t seed, std::ostream& out) {
  if (n_instances < 0) throw UsageError("instance count must be >= 0");
  int violations = 0;
  const Lemma1Report fixed_report = lemma1_check(worked_toy_cmdp());
  out << "fixed eps_P " << num(fixed_report.eps_p) << " eps_Q " << num(fixed_report.eps_q) << " ell "
      << num(fixed_report.ell) << " bound_P " << num(fixed_report.bound_p) << " bound_Q " << num(fixed_report.bound_q)
      << " holds_P " << fixed_report.holds_p << " holds_Q " << fixed_report.holds_q << "\n";
  violations += !fixed_report.holds_p + !fixed_report.holds_q;
  std::mt19937_64 rng(seed);
  int pass = 0;
  for (int i = 0; i < n_instances; ++i) {
    const Lemma1Report r = lemma1_check(random_toy_cmdp(rng));
    if (r.holds_p && r.holds_q)
      ++pass;
    else
      ++violations;
  }
  out << "random " << pass << "/" << n_instances << " pass\n";
  return violations;
}

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string preset;
  std::string task;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "Run-config JSON file")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "Global seed override");
  app->add_option("--preset", f.preset, "Training preset override");
  app->add_option("--task", f.task, "Task filter: stir, handover or tableset");
}

RunConfig load(const CommonFlags& f) {
  Json j = Json::object();
  if (!f.config.empty()) {
    try {
      j = read_json(f.config);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  if (f.seed) j["seed"] = *f.seed;
  if (!f.preset.empty()) j["preset"] = f.preset;
  if (!f.task.empty()) j["task"] = f.task;
  return parse_run_config(j);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cost-aware human motion forecasting and MPPI planning"};
  app.require_subcommand(1);

  CommonFlags gen_f, train_f, evalf_f, sim_f, evalp_f, report_f;
  auto* gen = app.add_subcommand("gen", "Generate episodes and a manifest");
  add_common(gen, gen_f);
  auto* tr = app.add_subcommand("train", "Train a forecaster preset");
  add_common(tr, train_f);
  auto* evf = app.add_subcommand("eval-forecast", "Forecasting metrics on the test split");
  add_common(evf, evalf_f);

  auto* sim = app.add_subcommand("simulate", "Play back one episode against the planner");
  add_common(sim, sim_f);
  std::string sim_episode, sim_model = "cur", sim_spec, sim_mppi, sim_out;
  sim->add_option("--episode", sim_episode, "Episode JSON file")->required()->check(CLI::ExistingFile);
  sim->add_option("--model", sim_model, "Baseline name, preset or checkpoint file");
  sim->add_option("--task-spec", sim_spec, "Task spec JSON file")->check(CLI::ExistingFile);
  sim->add_option("--mppi", sim_mppi, "Planner config JSON file")->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out, "Output JSON-lines file");

  auto* evp = app.add_subcommand("eval-plan", "Planning runs and metrics on the test split");
  add_common(evp, evalp_f);

  auto* lemma = app.add_subcommand("lemma-check", "Verify both cost-gap bounds on random instances");
  int n_instances = 1000;
  std::uint64_t lemma_seed = 0;
  lemma->add_option("--instances", n_instances, "Random instance count");
  lemma->add_option("--seed", lemma_seed, "Instance generator seed");

  auto* rep = app.add_subcommand("report", "Metric report from simulation logs");
  add_common(rep, report_f);
  std::string report_logs;
  rep->add_option("--logs", report_logs, "Directory of JSON-lines logs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      cmd_gen(load(gen_f), out);
    } else if (tr->parsed()) {
      cmd_train(load(train_f), out);
    } else if (evf->parsed()) {
      cmd_eval_forecast(load(evalf_f), out);
    } else if (sim->parsed()) {
      auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<fs::path>(s); };
      cmd_simulate(load(sim_f), sim_episode, sim_model, opt(sim_spec), opt(sim_mppi), opt(sim_out), out);
    } else if (evp->parsed()) {
      cmd_eval_plan(load(evalp_f), out);
    } else if (lemma->parsed()) {
      if (cmd_lemma(n_instances, lemma_seed, out) > 0) {
        err << "error: bound violated\n";
        return kExitRuntime;
      }
    } else if (rep->parsed()) {
      cmd_report(load(report_f), report_logs.empty() ? std::nullopt : std::optional<fs::path>(report_logs), out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace hrc::cli
