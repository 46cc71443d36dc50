#include "hrc/forecast.hpp"
#include "hrc/metrics.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace hrc;
using namespace hrc::test;

namespace {

Context random_context(std::mt19937_64& rng) {
  std::vector<Pose> frames;
  for (std::size_t t = 0; t < kContextLength; ++t) frames.push_back(random_pose(rng));
  return context_of(frames);
}

Trajectory random_trajectory(std::mt19937_64& rng) {
  Trajectory t;
  for (std::size_t i = 0; i < kHorizon; ++i) t.frames.push_back(random_pose(rng));
  return t;
}

ForecastModel random_model(std::mt19937_64& rng, double scale = 0.3) {
  std::normal_distribution<double> n(0.0, scale);
  ForecastModel m = ForecastModel::identity();
  for (Eigen::Index i = 0; i < m.S.size(); ++i) m.S.data()[i] += n(rng);
  for (Eigen::Index i = 0; i < m.M.size(); ++i) m.M.data()[i] = n(rng);
  return m;
}

double batch_loss(const ForecastModel& m, std::span<const Window> batch, const Eigen::VectorXd& w) {
  double sum = 0.0;
  for (const auto& win : batch) sum += weighted_loss(m, win.context, win.future, w);
  return sum / static_cast<double>(batch.size());
}

// A window whose context is the affine ramp ending at t = 0 and whose future continues it.
Window affine_window(const Pose& base, const Vec3& vel) {
  Window w;
  w.context = context_of(affine_frames(base, vel, -static_cast<int>(kContextLength) + 1, kContextLength));
  w.future.frames = affine_frames(base, vel, 1, kHorizon);
  return w;
}

}  // namespace

TEST(Cur, HoldsLastFrame) {
  std::mt19937_64 rng(1);
  const Context ctx = random_context(rng);
  const Forecast f = forecast_cur(ctx);
  ASSERT_TRUE(f.is_point());
  ASSERT_EQ(f.horizon(), kHorizon);
  for (const auto& p : f.trajectory->frames)
    for (std::size_t j = 0; j < kNumJoints; ++j) EXPECT_EQ(p[j], ctx.current()[j]);
}

TEST(Cur, FdeOnLinearMotion) {
  const Vec3 vel(0.004, 0.0, 0.0);  // m per frame
  const Window w = affine_window(standing_human(), vel);
  const auto e = ade_fde(*forecast_cur(w.context).trajectory, w.future);
  EXPECT_NEAR(e.fde, 1000.0 * kHorizon * vel.norm(), 1e-9);
  const Window still = affine_window(standing_human(), Vec3::Zero());
  EXPECT_EQ(ade_fde(*forecast_cur(still.context).trajectory, still.future).ade, 0.0);
}

TEST(Cvm, ExactOnLinearMotion) {
  const Window w = affine_window(Pose{}, Vec3(0.01, 0, 0));
  const auto& f = forecast_cvm(w.context).trajectory->frames;
  for (std::size_t t = 0; t < kHorizon; ++t) {
    EXPECT_NEAR(f[t][0].x(), 0.01 * static_cast<double>(t + 1), 1e-12);
    EXPECT_NEAR(pose_distance(f[t], w.future.frames[t]), 0.0, 1e-12);
  }
}

TEST(Cvm, ExactOnRandomAffineMotion) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Window w = affine_window(random_pose(rng), random_vec(rng, -0.05, 0.05));
    const auto& f = forecast_cvm(w.context).trajectory->frames;
    for (std::size_t t = 0; t < kHorizon; ++t)
      for (std::size_t j = 0; j < kNumJoints; ++j) ASSERT_LT((f[t][j] - w.future.frames[t][j]).norm(), 1e-12);
  }
}

TEST(Cvm, StationaryEqualsCur) {
  const Context ctx = context_of(std::vector<Pose>(kContextLength, standing_human()));
  const auto& a = forecast_cvm(ctx).trajectory->frames;
  const auto& b = forecast_cur(ctx).trajectory->frames;
  for (std::size_t t = 0; t < kHorizon; ++t) EXPECT_EQ(pose_distance(a[t], b[t]), 0.0);
}

TEST(Cvm, SinusoidAdeMatchesFormula) {
  const double amp = 0.1, omega = 2.0 * M_PI / 2.0, dt = kFrameDt;
  auto pose_at = [&](int t) {
    Pose p = standing_human();
    p[kRightWrist].x() += amp * std::sin(omega * t * dt);
    return p;
  };
  Window w;
  for (int t = -9; t <= 0; ++t) w.context.frames.push_back(pose_at(t));
  for (int t = 1; t <= 25; ++t) w.future.frames.push_back(pose_at(t));
  const double v = (amp * std::sin(0.0) - amp * std::sin(-9 * omega * dt)) / (9 * dt);
  double ade = 0.0;
  for (int t = 1; t <= 25; ++t) ade += std::abs(amp * std::sin(omega * t * dt) - t * dt * v) / 7.0;
  ade = ade / 25.0 * 1000.0;
  EXPECT_NEAR(ade_fde(*forecast_cvm(w.context).trajectory, w.future).ade, ade, 1e-9);
}

TEST(Worst, SymmetricTPoseEqualRadii) {
  Pose p;
  p[kLeftShoulder] = Vec3(-0.2, 0, 1.4);
  p[kRightShoulder] = Vec3(0.2, 0, 1.4);
  p[kLeftElbow] = Vec3(-0.5, 0, 1.4);
  p[kRightElbow] = Vec3(0.5, 0, 1.4);
  p[kLeftWrist] = Vec3(-0.8, 0, 1.4);
  p[kRightWrist] = Vec3(0.8, 0, 1.4);
  const Forecast f = forecast_worst(context_of(std::vector<Pose>(kContextLength, p)));
  ASSERT_FALSE(f.is_point());
  ASSERT_EQ(f.horizon(), kHorizon);
  for (const auto& frame : *f.volumes) {
    ASSERT_EQ(frame.size(), 2u);
    EXPECT_NEAR(frame[0].radius, 0.6, 1e-12);
    EXPECT_EQ(frame[0].radius, frame[1].radius);
    EXPECT_EQ(frame[0].center, p[kLeftShoulder]);
  }
}

TEST(Worst, ContainsGeneratedFutureWrists) {
  for (Task task : {Task::Stir, Task::Handover, Task::TableSet}) {
    GenConfig cfg;
    cfg.seed = 3;
    for (const auto& w : slide_windows(generate(task, cfg), kContextLength, kHorizon, 5)) {
      const Forecast f = forecast_worst(w.context);
      for (std::size_t t = 0; t < kHorizon; ++t) {
        const auto& s = (*f.volumes)[t];
        for (std::size_t side = 0; side < 2; ++side) {
          const Vec3& wrist = w.future.frames[t][side == 0 ? kLeftWrist : kRightWrist];
          const bool inside = (wrist - s[0].center).norm() <= s[0].radius + 1e-9 ||
                              (wrist - s[1].center).norm() <= s[1].radius + 1e-9;
          ASSERT_TRUE(inside);
        }
      }
    }
  }
}

TEST(Oracle, ReturnsFutureOrThrows) {
  std::mt19937_64 rng(3);
  const Trajectory fut = random_trajectory(rng);
  const auto e = ade_fde(*forecast_oracle(&fut).trajectory, fut);
  EXPECT_EQ(e.ade, 0.0);
  EXPECT_EQ(e.fde, 0.0);
  EXPECT_THROW(forecast_oracle(nullptr), std::logic_error);
}

TEST(Model, UntrainedEqualsCur) {
  std::mt19937_64 rng(4);
  const ForecastModel m = ForecastModel::identity();
  for (int i = 0; i < 1000; ++i) {
    const Context ctx = random_context(rng);
    const auto& a = model_forward(m, ctx).trajectory->frames;
    const auto& b = forecast_cur(ctx).trajectory->frames;
    for (std::size_t t = 0; t < kHorizon; ++t)
      for (std::size_t j = 0; j < kNumJoints; ++j) ASSERT_EQ(a[t][j], b[t][j]);
  }
}

TEST(Model, CvmStencilEqualsCvm) {
  ForecastModel m = ForecastModel::identity();
  // Displacement of the oldest frame carries the whole velocity estimate.
  for (std::size_t t = 0; t < kHorizon; ++t)
    m.M(0, static_cast<Eigen::Index>(t)) = -static_cast<double>(t + 1) / static_cast<double>(kContextLength - 1);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Context ctx = random_context(rng);
    const auto& a = model_forward(m, ctx).trajectory->frames;
    const auto& b = forecast_cvm(ctx).trajectory->frames;
    for (std::size_t t = 0; t < kHorizon; ++t)
      for (std::size_t j = 0; j < kNumJoints; ++j) ASSERT_LT((a[t][j] - b[t][j]).norm(), 1e-12);
  }
}

TEST(Model, MatchesDoubleSum) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20; ++i) {
    const ForecastModel m = random_model(rng);
    const Context ctx = random_context(rng);
    const auto& out = model_forward(m, ctx).trajectory->frames;
    const Pose& now = ctx.current();
    for (std::size_t t = 0; t < kHorizon; ++t)
      for (std::size_t j = 0; j < kNumJoints; ++j)
        for (int c = 0; c < 3; ++c) {
          double v = now[j][c];
          for (std::size_t jj = 0; jj < kNumJoints; ++jj) {
            double inner = 0.0;
            for (std::size_t tt = 0; tt < kContextLength; ++tt)
              inner += m.M(static_cast<Eigen::Index>(tt), static_cast<Eigen::Index>(t)) * (ctx.frames[tt][jj][c] - now[jj][c]);
            v += m.S(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(jj)) * inner;
          }
          ASSERT_NEAR(out[t][j][c], v, 1e-12);
        }
  }
}

TEST(Model, RejectsNonFinite) {
  ForecastModel m = ForecastModel::identity();
  m.M(2, 3) = std::nan("");
  std::mt19937_64 rng(7);
  EXPECT_THROW(model_forward(m, random_context(rng)), std::invalid_argument);
}

TEST(Loss, PerfectAndSingleResidual) {
  const Pose p = standing_human();
  const Context ctx = context_of(std::vector<Pose>(kContextLength, p));
  Trajectory truth = constant_trajectory(p);
  const ForecastModel m = ForecastModel::identity();
  EXPECT_EQ(weighted_loss(m, ctx, truth, joint_weights(1.0)), 0.0);
  truth.frames[7][kLeftElbow].y() += 0.003;
  EXPECT_NEAR(weighted_loss(m, ctx, truth, joint_weights(1.0)), 9e-6, 1e-18);
}

TEST(Loss, WristWeightScalesWristTerms) {
  std::mt19937_64 rng(8);
  const ForecastModel m = random_model(rng);
  const Context ctx = random_context(rng);
  const Trajectory truth = random_trajectory(rng);
  const auto pred = *model_forward(m, ctx).trajectory;
  double wrist = 0.0, rest = 0.0;
  for (std::size_t t = 0; t < kHorizon; ++t)
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const double sq = (pred.frames[t][j] - truth.frames[t][j]).squaredNorm();
      (j == kLeftWrist || j == kRightWrist ? wrist : rest) += sq;
    }
  EXPECT_NEAR(weighted_loss(m, ctx, truth, joint_weights(1.0)), wrist + rest, 1e-9);
  EXPECT_NEAR(weighted_loss(m, ctx, truth, joint_weights(5.0)), 5.0 * wrist + rest, 1e-9);
}

TEST(Loss, ScalingWeightsScalesLossAndGradient) {
  std::mt19937_64 rng(9);
  const ForecastModel m = random_model(rng);
  std::vector<Window> batch(4);
  for (auto& w : batch) {
    w.context = random_context(rng);
    w.future = random_trajectory(rng);
  }
  const Eigen::VectorXd w = joint_weights(5.0);
  EXPECT_NEAR(batch_loss(m, batch, 3.0 * w), 3.0 * batch_loss(m, batch, w), 1e-9);
  const auto g1 = loss_gradient(m, batch, w), g3 = loss_gradient(m, batch, 3.0 * w);
  EXPECT_LT((g3.dS - 3.0 * g1.dS).norm(), 1e-9 * g1.dS.norm());
  EXPECT_LT((g3.dM - 3.0 * g1.dM).norm(), 1e-9 * g1.dM.norm());
}

TEST(Gradient, ZeroAtZeroResidual) {
  const Pose p = standing_human();
  std::vector<Window> batch(3);
  for (auto& w : batch) {
    w.context = context_of(affine_frames(p, Vec3(0.01, 0, 0), -9, 10));
    w.future = constant_trajectory(w.context.current());
  }
  const auto g = loss_gradient(ForecastModel::identity(), batch, joint_weights(1.0));
  EXPECT_EQ(g.dS.norm(), 0.0);
  EXPECT_EQ(g.dM.norm(), 0.0);
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(10);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    ForecastModel m = random_model(rng);
    m.wrist_only = trial % 3 == 2;
    std::vector<Window> batch(1 + trial % 4);
    for (auto& w : batch) {
      w.context = random_context(rng);
      w.future = random_trajectory(rng);
    }
    const Eigen::VectorXd w = joint_weights(trial % 2 ? 5.0 : 1.0);
    const auto g = loss_gradient(m, batch, w);
    auto check = [&](Eigen::MatrixXd& param, const Eigen::MatrixXd& analytic) {
      for (Eigen::Index i = 0; i < param.size(); ++i) {
        const double keep = param.data()[i];
        param.data()[i] = keep + h;
        const double up = batch_loss(m, batch, w);
        param.data()[i] = keep - h;
        const double down = batch_loss(m, batch, w);
        param.data()[i] = keep;
        const double fd = (up - down) / (2.0 * h);
        const double a = analytic.data()[i];
        ASSERT_LE(std::abs(fd - a), 1e-4 * std::max(1.0, std::abs(a))) << "entry " << i;
      }
    };
    check(m.S, g.dS);
    check(m.M, g.dM);
  }
}

TEST(Gradient, LinearInWeights) {
  std::mt19937_64 rng(11);
  const ForecastModel m = random_model(rng);
  std::vector<Window> one(1);
  one[0].context = random_context(rng);
  one[0].future = random_trajectory(rng);
  const Eigen::VectorXd a = joint_weights(1.0), b = joint_weights(5.0);
  const auto ga = loss_gradient(m, one, a), gb = loss_gradient(m, one, b), gab = loss_gradient(m, one, a + b);
  EXPECT_LT((gab.dM - ga.dM - gb.dM).norm(), 1e-9 * gab.dM.norm());
  EXPECT_LT((gab.dS - ga.dS - gb.dS).norm(), 1e-9 * gab.dS.norm());
}

TEST(TransitionSet, AllFlagged) {
  std::vector<Window> w(7);
  for (auto& x : w) x.is_transition = true;
  EXPECT_EQ(build_transition_set(w, TransitionMode::Annotated).size(), 7u);
  for (auto& x : w) x.is_transition = false;
  EXPECT_THROW(build_transition_set(w, TransitionMode::Annotated), std::runtime_error);
  EXPECT_THROW(build_transition_set(w, TransitionMode::CostPercentile), std::invalid_argument);
}

TEST(TransitionSet, PercentileThreshold) {
  std::vector<double> values;
  for (int i = 100; i >= 1; --i) values.push_back(i);
  const auto top = top_percentile(values, 0.10);
  ASSERT_EQ(top.size(), 10u);
  for (auto i : top) EXPECT_GE(values[i], 91.0);

  std::vector<Window> w(100);
  for (std::size_t i = 0; i < w.size(); ++i) w[i].start = i;
  const auto set = build_transition_set(w, TransitionMode::CostPercentile, 0.10,
                                        [](const Window& x) { return static_cast<double>(x.start + 1); });
  EXPECT_EQ(set, (std::vector<std::size_t>{90, 91, 92, 93, 94, 95, 96, 97, 98, 99}));
}

TEST(SampleBatch, MixZeroIsUniform) {
  std::mt19937_64 rng(12);
  const std::vector<std::size_t> set{0, 1};
  std::vector<int> counts(10, 0);
  for (int r = 0; r < 2000; ++r)
    for (auto i : sample_batch(10, set, 0.0, 50, rng)) ++counts[i];
  for (int c : counts) EXPECT_NEAR(c / 100000.0, 0.1, 0.005);
}

TEST(SampleBatch, MixOneDrawsOnlyTransitions) {
  std::mt19937_64 rng(13);
  const std::vector<std::size_t> set{3, 8, 9};
  for (auto i : sample_batch(20, set, 1.0, 500, rng)) EXPECT_TRUE(i == 3 || i == 8 || i == 9);
  EXPECT_THROW(sample_batch(20, {}, 0.5, 10, rng), std::invalid_argument);
  EXPECT_EQ(sample_batch(20, {}, 0.0, 10, rng).size(), 10u);
}

TEST(SampleBatch, HalfMixFrequency) {
  std::mt19937_64 rng(14);
  const std::size_t n = 100;
  std::vector<std::size_t> set;
  for (std::size_t i = 0; i < 20; ++i) set.push_back(i);
  const double base = 20.0 / n;
  std::size_t in_set = 0, total = 0;
  for (int r = 0; r < 1000; ++r)
    for (auto i : sample_batch(n, set, 0.5, 100, rng)) {
      in_set += i < 20;
      ++total;
    }
  const double expected = 0.5 + 0.5 * base;
  const double sigma = std::sqrt(0.5 * base * (1 - base) / static_cast<double>(total));
  EXPECT_NEAR(static_cast<double>(in_set) / total, expected, std::max(3.0 * sigma, 1e-12));
  EXPECT_GE(static_cast<double>(in_set) / total, 0.5);
}

TEST(SampleBatch, CeilOfMixTimesBatch) {
  std::mt19937_64 rng(15);
  const std::vector<std::size_t> set{0};
  // ceil(0.3 * 7) = 3 forced transition draws, all index 0 here.
  const auto b = sample_batch(1000, set, 0.3, 7, rng);
  EXPECT_EQ(b[0], 0u);
  EXPECT_EQ(b[1], 0u);
  EXPECT_EQ(b[2], 0u);
}

TEST(Train, ZeroLearningRateKeepsInit) {
  GenConfig cfg;
  cfg.seed = 1;
  const auto windows = slide_windows(gen_stirring(cfg), kContextLength, kHorizon, 8);
  TrainConfig tc = preset_config("manicast");
  tc.learning_rate = 0.0;
  tc.epochs = 3;
  const auto res = train(ForecastModel::identity(), windows, windows, tc);
  EXPECT_EQ(res.model.S, ForecastModel::identity().S);
  EXPECT_EQ(res.model.M, ForecastModel::identity().M);
  EXPECT_FALSE(res.model.trained);
}

TEST(Train, CurPerfectDataStaysAtZero) {
  std::mt19937_64 rng(16);
  std::vector<Window> windows(30);
  for (auto& w : windows) {
    w.context = context_of(affine_frames(random_pose(rng), random_vec(rng, -0.02, 0.02), -9, 10));
    w.future = constant_trajectory(w.context.current());
    w.is_transition = true;
  }
  TrainConfig tc = preset_config("manicast");
  tc.epochs = 5;
  const auto res = train(ForecastModel::identity(), windows, windows, tc);
  for (const auto& r : res.history) EXPECT_EQ(r.val_loss, 0.0);
}

TEST(Train, LossDecreasesOnStirData) {
  std::vector<Window> train_w, val_w;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    auto w = slide_windows(gen_stirring(cfg), kContextLength, kHorizon, 3);
    (seed == 3 ? val_w : train_w).insert((seed == 3 ? val_w : train_w).end(), w.begin(), w.end());
  }
  TrainConfig tc = preset_config("manicast");
  tc.epochs = 50;
  const auto res = train(ForecastModel::identity(), train_w, val_w, tc);
  ASSERT_EQ(res.history.size(), 51u);
  EXPECT_LT(res.history.back().train_loss, res.history.front().train_loss);
  EXPECT_LE(res.history[static_cast<std::size_t>(res.best_epoch)].val_loss, res.history.front().val_loss);
  EXPECT_TRUE(res.model.trained);
}

TEST(Train, DeterministicGivenSeed) {
  GenConfig cfg;
  const auto windows = slide_windows(gen_handover(cfg), kContextLength, kHorizon, 6);
  TrainConfig tc = preset_config("manicast-w");
  tc.epochs = 4;
  const auto a = train(ForecastModel::identity(), windows, windows, tc);
  const auto b = train(ForecastModel::identity(), windows, windows, tc);
  EXPECT_EQ(a.model.S, b.model.S);
  EXPECT_EQ(a.model.M, b.model.M);
}

TEST(Train, DivergenceNamesEpoch) {
  GenConfig cfg;
  const auto windows = slide_windows(gen_stirring(cfg), kContextLength, kHorizon, 6);
  TrainConfig tc = preset_config("finetuned");
  tc.learning_rate = 1e6;
  tc.epochs = 20;
  try {
    train(ForecastModel::identity(), windows, windows, tc);
    FAIL() << "expected divergence";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(Presets, Definitions) {
  EXPECT_EQ(preset_config("finetuned").transition_mix, 0.0);
  EXPECT_EQ(preset_config("finetuned").wrist_weight, 1.0);
  EXPECT_EQ(preset_config("manicast").transition_mix, 0.5);
  EXPECT_EQ(preset_config("manicast-t").transition_mix, 1.0);
  EXPECT_EQ(preset_config("manicast-w").wrist_weight, 5.0);
  EXPECT_EQ(preset_config("manicast-w").transition_mix, 0.5);
  EXPECT_TRUE(preset_config("wristonly").wrist_only);
  EXPECT_THROW(preset_config("base"), std::invalid_argument);
}

TEST(Forecaster, WristOnlyMovesOnlyWrists) {
  std::mt19937_64 rng(17);
  ForecastModel m = random_model(rng);
  m.wrist_only = true;
  const Context ctx = random_context(rng);
  const auto& f = model_forward(m, ctx).trajectory->frames;
  for (const auto& p : f)
    for (std::size_t j = 2; j < kNumJoints; ++j) EXPECT_EQ(p[j], ctx.current()[j]);
}
