#include "hrc/cli.hpp"
#include "hrc/metrics.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <sstream>

using namespace hrc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("hrc_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hrc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

/// Small dataset, short training and a light planner.
Json small_config(const fs::path& out_dir) {
  Json j;
  j["seed"] = 3;
  j["paths"] = {{"output_dir", out_dir.string()}};
  j["dataset"] = {{"stir", 10}, {"handover", 10}, {"tableset", 10}, {"window_stride", 5}};
  j["train"] = {{"epochs", 2}};
  j["mppi"] = {{"n_samples", 4}, {"n_iterations", 1}};
  j["eval"] = {{"models", {"cur", "fut"}}, {"max_episodes", 1}};
  return j;
}

fs::path write_config(const TempDir& dir, const Json& j) {
  const fs::path p = dir.path / "config.json";
  write_json(p, j);
  return p;
}

fs::path run_dir_of(const Json& j) { return cli::run_dir(cli::parse_run_config(j)); }

}  // namespace

TEST(CliConfig, SeedPropagatesUnlessOverridden) {
  Json j;
  j["seed"] = 5;
  j["gen"] = {{"seed", 9}};
  const auto c = cli::parse_run_config(j);
  EXPECT_EQ(c.gen.seed, 9u);
  EXPECT_EQ(c.train.seed, 5u);
  EXPECT_EQ(c.mppi.seed, 5u);
}

TEST(CliConfig, DefaultsAndRoundTrip) {
  const auto c = cli::parse_run_config(Json::object());
  EXPECT_EQ(c.dataset.stir, 19);
  EXPECT_EQ(c.dataset.handover, 27);
  EXPECT_EQ(c.dataset.tableset, 15);
  EXPECT_EQ(c.preset, "manicast");
  const auto back = cli::parse_run_config(cli::run_config_to_json(c));
  EXPECT_EQ(cli::run_config_to_json(back).dump(), cli::run_config_to_json(c).dump());
}

TEST(CliConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(cli::parse_run_config(Json::parse(R"({"sead": 1})")), cli::UsageError);
  EXPECT_THROW(cli::parse_run_config(Json::parse(R"({"mppi": {"n_samples": 1}})")), cli::UsageError);
  EXPECT_THROW(cli::parse_run_config(Json::parse(R"({"task": "cooking"})")), cli::UsageError);
  EXPECT_THROW(cli::parse_run_config(Json::parse(R"({"preset": "nope"})")), cli::UsageError);
}

TEST(CliConfig, RunDirIgnoresPresetTaskAndOutputDir) {
  Json a = small_config("/tmp/a"), b = small_config("/tmp/b");
  b["preset"] = "finetuned";
  b["task"] = "stir";
  EXPECT_EQ(cli::config_hash(cli::parse_run_config(a)), cli::config_hash(cli::parse_run_config(b)));
  b["seed"] = 4;
  EXPECT_NE(cli::config_hash(cli::parse_run_config(a)), cli::config_hash(cli::parse_run_config(b)));
}

TEST(CliGen, DefaultConfigGeneratesDefaultCounts) {
  TempDir dir("gen_default");
  Json j;
  j["paths"] = {{"output_dir", dir.path.string()}};
  const auto r = run_cli({"gen", "--config", write_config(dir, j).string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json manifest = read_json(run_dir_of(j) / "data" / "manifest.json");
  std::map<std::string, int> count;
  std::map<std::string, std::map<std::string, int>> split;
  for (const auto& e : manifest["episodes"]) {
    ++count[e["task"].get<std::string>()];
    ++split[e["task"].get<std::string>()][e["split"].get<std::string>()];
  }
  EXPECT_EQ(count["stir"], 19);
  EXPECT_EQ(count["handover"], 27);
  EXPECT_EQ(count["tableset"], 15);
  for (auto& [task, parts] : split) {
    const auto expected = split_dataset(static_cast<std::size_t>(count[task]), 0);
    EXPECT_EQ(parts["train"], static_cast<int>(expected.train.size())) << task;
    EXPECT_EQ(parts["val"], static_cast<int>(expected.val.size())) << task;
    EXPECT_EQ(parts["test"], static_cast<int>(expected.test.size())) << task;
  }
}

TEST(CliGen, SameSeedSameManifest) {
  TempDir a("gen_a"), b("gen_b");
  const Json ja = small_config(a.path), jb = small_config(b.path);
  const auto ra = run_cli({"gen", "--config", write_config(a, ja).string()});
  const auto rb = run_cli({"gen", "--config", write_config(b, jb).string()});
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_EQ(read_text(run_dir_of(ja) / "data" / "manifest.json"), read_text(run_dir_of(jb) / "data" / "manifest.json"));
  EXPECT_EQ(ra.out.substr(ra.out.find("fnv1a")), rb.out.substr(rb.out.find("fnv1a")));

  const auto rc = run_cli({"gen", "--config", write_config(b, jb).string(), "--seed", "4"});
  ASSERT_EQ(rc.code, 0) << rc.err;
  EXPECT_NE(ra.out.substr(ra.out.find("fnv1a")), rc.out.substr(rc.out.find("fnv1a")));
}

TEST(CliGen, TaskFilterAndInvalidTask) {
  TempDir dir("gen_task");
  const Json j = small_config(dir.path);
  const auto cfg = write_config(dir, j).string();
  EXPECT_EQ(run_cli({"gen", "--config", cfg, "--task", "cooking"}).code, cli::kExitUsage);
  ASSERT_EQ(run_cli({"gen", "--config", cfg, "--task", "handover"}).code, 0);
  Json with_task = j;
  with_task["task"] = "handover";
  const Json manifest = read_json(run_dir_of(with_task) / "data" / "manifest.json");
  EXPECT_EQ(manifest["episodes"].size(), 10u);
  for (const auto& e : manifest["episodes"]) EXPECT_EQ(e["task"], "handover");
}

TEST(CliGen, TooFewEpisodesIsUsageError) {
  TempDir dir("gen_few");
  Json j = small_config(dir.path);
  j["dataset"]["stir"] = 5;
  EXPECT_EQ(run_cli({"gen", "--config", write_config(dir, j).string()}).code, cli::kExitUsage);
}

TEST(CliUsage, ExitCodes) {
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(run_cli({"gen", "--config", "/nonexistent/config.json"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"train", "--preset", "nope"}).code, cli::kExitUsage);
  TempDir dir("usage");
  // Training before generation is a runtime error.
  EXPECT_EQ(run_cli({"train", "--config", write_config(dir, small_config(dir.path)).string()}).code,
            cli::kExitRuntime);
}

TEST(CliTrain, PresetCheckpointAndHistory) {
  EXPECT_EQ(preset_config("finetuned").transition_mix, 0.0);
  EXPECT_EQ(preset_config("finetuned").wrist_weight, 1.0);
  EXPECT_EQ(preset_config("manicast-w").wrist_weight, 5.0);
  TempDir dir("train");
  const Json j = small_config(dir.path);
  const auto cfg = write_config(dir, j).string();
  ASSERT_EQ(run_cli({"gen", "--config", cfg, "--task", "stir"}).code, 0);
  Json stir = j;
  stir["task"] = "stir";
  const auto r = run_cli({"train", "--config", cfg, "--task", "stir", "--preset", "manicast-w"});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path ckpt = run_dir_of(stir) / "checkpoints" / "manicast-w.json";
  const ForecastModel m = checkpoint_from_json(read_json(ckpt));
  EXPECT_EQ(m.preset, "manicast-w");
  EXPECT_EQ(m.w, joint_weights(5.0));
  const std::string history = read_text(run_dir_of(stir) / "checkpoints" / "manicast-w_history.csv");
  EXPECT_EQ(std::count(history.begin(), history.end(), '\n'), 1 + 3);
}

TEST(CliEval, ForecastReportRows) {
  TempDir dir("eval_forecast");
  Json j = small_config(dir.path);
  j["task"] = "stir";
  j["eval"]["models"] = {"fut", "cur", "worst"};
  const auto cfg = write_config(dir, j).string();
  ASSERT_EQ(run_cli({"gen", "--config", cfg}).code, 0);
  const auto r = run_cli({"eval-forecast", "--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json report = read_json(run_dir_of(j) / "reports" / "forecast_report.json");
  const Json& fut = report["forecasting"]["stir/fut"];
  EXPECT_EQ(fut["ade"]["mean"], 0.0);
  EXPECT_EQ(fut["fde"]["mean"], 0.0);
  const Json& cur = report["forecasting"]["stir/cur"];
  for (const char* key : {"ade", "fde", "wrist_ade", "wrist_fde", "t_ade", "t_fde", "t_wrist_ade", "t_wrist_fde"})
    EXPECT_TRUE(cur.contains(key)) << key;
  EXPECT_EQ(cur.size(), 8u);
  EXPECT_FALSE(report["forecasting"].contains("stir/worst"));
}

TEST(CliEval, PlanReportAnchorsAndDeterminism) {
  TempDir a("plan_a"), b("plan_b");
  const Json ja = small_config(a.path), jb = small_config(b.path);
  for (const auto& [dir, j] : {std::pair{&a, ja}, std::pair{&b, jb}}) {
    const auto cfg = write_config(*dir, j).string();
    ASSERT_EQ(run_cli({"gen", "--config", cfg}).code, 0);
    const auto r = run_cli({"eval-plan", "--config", cfg});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const std::string text = read_text(run_dir_of(ja) / "reports" / "report.json");
  EXPECT_EQ(text, read_text(run_dir_of(jb) / "reports" / "report.json"));
  EXPECT_EQ(read_text(run_dir_of(ja) / "reports" / "timeseries.csv"),
            read_text(run_dir_of(jb) / "reports" / "timeseries.csv"));

  const Json report = Json::parse(text);
  const Json& cur = report["planning"]["cur"];
  EXPECT_EQ(cur["stirring"]["stop_time_ms"]["mean"], 0.0);
  EXPECT_EQ(cur["stirring"]["restart_time_ms"]["mean"], 0.0);
  const Json& fut = report["planning"]["fut"];
  EXPECT_NEAR(fut["stirring"]["stop_time_ms"]["mean"].get<double>(), 1000.0, 40.0);
  EXPECT_EQ(fut["stirring"]["fdr"], 0.0);
  EXPECT_EQ(fut["handover"]["correct_goal_rate"], 1.0);
}

TEST(CliSimulate, WritesDeterministicLog) {
  TempDir dir("simulate");
  Json j = small_config(dir.path);
  j["task"] = "stir";
  const auto cfg = write_config(dir, j).string();
  ASSERT_EQ(run_cli({"gen", "--config", cfg}).code, 0);
  const fs::path episode = run_dir_of(j) / "data" / "stir_000.json";
  ASSERT_TRUE(fs::exists(episode));
  const fs::path one = dir.path / "one.jsonl", two = dir.path / "two.jsonl";
  for (const auto& out : {one, two}) {
    const auto r = run_cli({"simulate", "--config", cfg, "--episode", episode.string(), "--model", "cvm", "--out",
                            out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(read_text(one), read_text(two));
  const SimLog log = sim_log_from_jsonl(read_text(one));
  EXPECT_EQ(log.forecaster, "cvm");
  EXPECT_EQ(log.steps.size(), 1000u - kContextLength - kHorizon + 1);
  EXPECT_EQ(run_cli({"simulate", "--config", cfg, "--episode", episode.string(), "--model", "nope"}).code,
            cli::kExitUsage);
}

TEST(CliLemma, ZeroInstancesRunsFixedOnly) {
  const auto r = run_cli({"lemma-check", "--instances", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("random 0/0 pass"), std::string::npos);
  const auto rep = lemma1_check(worked_toy_cmdp());
  std::ostringstream expected;
  expected.precision(17);
  expected << "eps_P " << rep.eps_p;
  EXPECT_NE(r.out.find(expected.str()), std::string::npos) << r.out;
}

TEST(CliLemma, DefaultSweepPasses) {
  const auto r = run_cli({"lemma-check"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("random 1000/1000 pass"), std::string::npos);
  EXPECT_EQ(run_cli({"lemma-check", "--instances", "-1"}).code, cli::kExitUsage);
}
