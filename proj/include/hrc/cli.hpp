#pragma once

#include "hrc/cost.hpp"
#include "hrc/datagen.hpp"
#include "hrc/forecast.hpp"
#include "hrc/io.hpp"
#include "hrc/planner.hpp"
#include "hrc/robot.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hrc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Raised for invalid configs, flags or names; maps to exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DatasetSizes {
  int stir = 19;
  int handover = 27;
  int tableset = 15;
  std::size_t window_stride = 1;
};

struct EvalOptions {
  /// Forecasters to evaluate: baselines (cur, cvm, worst, fut) or preset names
  /// resolved to checkpoints.
  std::vector<std::string> models{"cur", "cvm", "worst", "fut"};
  /// Caps the test episodes per task used in planning runs; 0 means all.
  int max_episodes = 0;
};

struct RunConfig {
  std::filesystem::path data_dir = "data";
  std::filesystem::path checkpoint_dir = "checkpoints";
  std::filesystem::path output_dir = "runs";
  GenConfig gen;
  TrainConfig train;
  MppiConfig mppi;
  CostWeights weights;
  TaskSpec task_spec;
  ArmModel arm = ArmModel::franka_like();
  DatasetSizes dataset;
  EvalOptions eval;
  std::string preset = "manicast";
  std::optional<Task> task;
  std::uint64_t seed = 0;
};

/// Sub-config seeds default to the global seed when absent.
RunConfig parse_run_config(const Json& j);
Json run_config_to_json(const RunConfig& c);

/// Hash of the config with preset, task and output directory left out.
std::string config_hash(const RunConfig& c);
std::filesystem::path run_dir(const RunConfig& c);

std::uint64_t episode_seed(std::uint64_t seed, Task task, int index);

struct DatasetEntry {
  std::string file;
  Task task = Task::Stir;
  std::uint64_t seed = 0;
  std::string split;
  Episode episode;
};

/// Generates every task's episodes and writes them with a manifest.
std::filesystem::path cmd_gen(const RunConfig& c, std::ostream& out);
std::vector<DatasetEntry> load_dataset(const RunConfig& c);

std::filesystem::path cmd_train(const RunConfig& c, std::ostream& out);
std::filesystem::path cmd_eval_forecast(const RunConfig& c, std::ostream& out);
std::filesystem::path cmd_simulate(const RunConfig& c, const std::filesystem::path& episode_file,
                                   const std::string& model, const std::optional<std::filesystem::path>& task_spec_file,
                                   const std::optional<std::filesystem::path>& mppi_file,
                                   const std::optional<std::filesystem::path>& out_file, std::ostream& out);
std::filesystem::path cmd_eval_plan(const RunConfig& c, std::ostream& out);
std::filesystem::path cmd_report(const RunConfig& c, const std::optional<std::filesystem::path>& log_dir,
                                 std::ostream& out);
/// Returns the number of bound violations.
int cmd_lemma(int n_instances, std::uint64_t seed, std::ostream& out);

/// Resolves a baseline name, preset name or checkpoint path.
Forecaster resolve_forecaster(const RunConfig& c, const std::string& name);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hrc::cli
