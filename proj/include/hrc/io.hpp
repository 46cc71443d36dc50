#pragma once

#include "hrc/cost.hpp"
#include "hrc/datagen.hpp"
#include "hrc/forecast.hpp"
#include "hrc/metrics.hpp"
#include "hrc/motion.hpp"
#include "hrc/planner.hpp"
#include "hrc/robot.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace hrc {

using Json = nlohmann::ordered_json;

// Config objects read missing keys as defaults and reject unknown keys.
void to_json(Json& j, const GenConfig& c);
void from_json(const Json& j, GenConfig& c);
void to_json(Json& j, const TrainConfig& c);
void from_json(const Json& j, TrainConfig& c);
void to_json(Json& j, const MppiConfig& c);
void from_json(const Json& j, MppiConfig& c);
void to_json(Json& j, const CostWeights& c);
void from_json(const Json& j, CostWeights& c);
/// The stirring reference is derived data and is not serialized.
void to_json(Json& j, const TaskSpec& c);
void from_json(const Json& j, TaskSpec& c);
void to_json(Json& j, const ArmModel& m);
void from_json(const Json& j, ArmModel& m);

Json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const Json& j);

Json episode_to_json(const Episode& ep);
/// Rejects a wrong joint count or non-finite coordinates.
Episode episode_from_json(const Json& j);

/// Row-major matrices tagged with their shape.
Json checkpoint_to_json(const ForecastModel& model);
ForecastModel checkpoint_from_json(const Json& j);

Json sim_step_to_json(const SimStep& s, const SimLog& log);
std::string sim_log_to_jsonl(const SimLog& log);
SimLog sim_log_from_jsonl(const std::string& text);

Json as_json(const Stat& s);
Json as_json(const ForecastMetrics& m);
Json as_json(const StopRestart& s);
Json as_json(const HandoverMetrics& h);
Json as_json(const MetricReport& r);
Json as_json(const Lemma1Report& r);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);
/// Two-space indented with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

}  // namespace hrc
