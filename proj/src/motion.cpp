#include "hrc/motion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hrc {

bool Pose::all_finite() const {
  return std::all_of(joints.begin(), joints.end(),
                     [](const Vec3& p) { return p.allFinite(); });
}

Pose Pose::translated(const Vec3& offset) const {
  Pose out = *this;
  for (auto& p : out.joints) p += offset;
  return out;
}

std::string_view to_string(Task task) {
  switch (task) {
    case Task::Stir: return "stir";
    case Task::Handover: return "handover";
    case Task::TableSet: return "tableset";
  }
  return "unknown";
}

Task task_from_string(std::string_view name) {
  if (name == "stir") return Task::Stir;
  if (name == "handover") return Task::Handover;
  if (name == "tableset") return Task::TableSet;
  throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

bool Episode::in_transition(int frame) const {
  return std::any_of(transitions.begin(), transitions.end(),
                     [frame](const Interval& iv) { return iv.contains(frame); });
}

void Episode::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps)) throw std::invalid_argument("episode fps must be positive");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!frames[i].all_finite())
      throw std::invalid_argument("non-finite coordinate in frame " + std::to_string(i));
  }
  const int n = static_cast<int>(frames.size());
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const auto& iv = transitions[i];
    if (iv.start < 0 || iv.end >= n || iv.start > iv.end)
      throw std::invalid_argument("transition interval out of frame range");
    if (i > 0 && transitions[i - 1].end >= iv.start)
      throw std::invalid_argument("transition intervals must be sorted and non-overlapping");
  }
  if (!extras.object_in_hand.empty() && extras.object_in_hand.size() != frames.size())
    throw std::invalid_argument("object_in_hand must have one flag per frame");
}

std::vector<Window> slide_windows(const Episode& episode, std::size_t k, std::size_t horizon,
                                  std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be >= 1");
  if (k == 0 || horizon == 0) throw std::invalid_argument("window lengths must be positive");
  const std::size_t len = episode.size();
  if (len < k + horizon) {
    throw std::length_error("episode has " + std::to_string(len) + " frames, windows need " +
                            std::to_string(k + horizon));
  }
  const std::size_t count = (len - k - horizon) / stride + 1;
  const double dt = episode.dt();

  std::vector<Window> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t s = w * stride;
    Window win;
    win.start = s;
    win.context.dt = dt;
    win.future.dt = dt;
    win.context.frames.assign(episode.frames.begin() + s, episode.frames.begin() + s + k);
    win.future.frames.assign(episode.frames.begin() + s + k,
                             episode.frames.begin() + s + k + horizon);
    const int f0 = static_cast<int>(s + k);
    const int f1 = static_cast<int>(s + k + horizon - 1);
    win.is_transition = std::any_of(
        episode.transitions.begin(), episode.transitions.end(),
        [&](const Interval& iv) { return iv.start <= f1 && iv.end >= f0; });
    out.push_back(std::move(win));
  }
  return out;
}

double pose_distance(const Pose& a, const Pose& b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < kNumJoints; ++j) sum += (a[j] - b[j]).norm();
  return sum / static_cast<double>(kNumJoints);
}

namespace {

Pose lerp(const Pose& a, const Pose& b, double alpha) {
  Pose out;
  for (std::size_t j = 0; j < kNumJoints; ++j) out[j] = (1.0 - alpha) * a[j] + alpha * b[j];
  return out;
}

}  // namespace

Episode resample(const Episode& episode, double target_fps) {
  if (!(target_fps > 0.0)) throw std::invalid_argument("target_fps must be positive");
  if (episode.frames.empty()) throw std::invalid_argument("cannot resample an empty episode");

  const std::size_t n = episode.size();
  const double src_fps = episode.fps;
  const double ratio = target_fps / src_fps;
  const auto n_out =
      static_cast<std::size_t>(std::floor(static_cast<double>(n - 1) * ratio + 1e-9)) + 1;

  Episode out;
  out.fps = target_fps;
  out.task = episode.task;
  out.extras = episode.extras;
  out.extras.object_in_hand.clear();
  out.frames.reserve(n_out);

  const bool has_flags = !episode.extras.object_in_hand.empty();
  for (std::size_t j = 0; j < n_out; ++j) {
    const double u = static_cast<double>(j) * src_fps / target_fps;
    const auto i0 = std::min(static_cast<std::size_t>(std::floor(u)), n - 1);
    const auto i1 = std::min(i0 + 1, n - 1);
    const double alpha = u - static_cast<double>(i0);
    out.frames.push_back(alpha == 0.0 ? episode.frames[i0]
                                      : lerp(episode.frames[i0], episode.frames[i1], alpha));
    if (has_flags) {
      const auto& f = episode.extras.object_in_hand;
      out.extras.object_in_hand.push_back(alpha == 0.0 ? bool(f[i0]) : (f[i0] || f[i1]));
    }
  }

  const int last = static_cast<int>(n_out) - 1;
  for (const auto& iv : episode.transitions) {
    Interval r;
    r.start = std::clamp(static_cast<int>(std::floor(iv.start * ratio + 1e-9)), 0, last);
    r.end = std::clamp(static_cast<int>(std::ceil(iv.end * ratio - 1e-9)), 0, last);
    if (!out.transitions.empty() && out.transitions.back().end >= r.start) {
      out.transitions.back().end = std::max(out.transitions.back().end, r.end);
    } else {
      out.transitions.push_back(r);
    }
  }
  return out;
}

}  // namespace hrc
