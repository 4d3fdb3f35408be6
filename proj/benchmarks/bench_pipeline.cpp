#include <benchmark/benchmark.h>

#include "speccam/calibration.hpp"
#include "speccam/evaluation.hpp"
#include "speccam/phantom.hpp"
#include "speccam/reconstruction.hpp"
#include "speccam/rng.hpp"

using namespace speccam;

namespace {

RgbImage random_image(std::size_t side, std::uint64_t seed) {
  Rng rng(seed);
  RgbImage image(side, side);
  for (auto& px : image.pixels)
    px = {rng.uniform(0.0, 255.0), rng.uniform(0.0, 255.0),
          rng.uniform(0.0, 255.0)};
  return image;
}

TransformationMatrix random_tm(std::uint64_t seed) {
  Rng rng(seed);
  TransformationMatrix tm;
  for (auto& row : tm.rows)
    row = {rng.uniform(-0.005, 0.01), rng.uniform(-0.005, 0.01),
           rng.uniform(-0.005, 0.01)};
  return tm;
}

void BM_ReconstructImage(benchmark::State& state) {
  const std::size_t side = static_cast<std::size_t>(state.range(0));
  const RgbImage image = random_image(side, 401);
  const TransformationMatrix tm = random_tm(402);
  for (auto _ : state) {
    SpectralCube cube = reconstruct_image(tm, image);
    benchmark::DoNotOptimize(cube.data().data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_ReconstructImage)->Arg(128)->Arg(512)->Arg(1000);

void BM_WienerCalibration(benchmark::State& state) {
  const std::size_t blocks = static_cast<std::size_t>(state.range(0));
  const ColorChart chart = make_synthetic_chart("bench", blocks, 403);
  CameraModel camera;
  camera.noise_sigma = 1.5;
  camera.seed = 404;
  const ChartScene scene = generate_chart_scene(chart, camera);
  const ChartSamples samples =
      sample_chart(scene.image, scene.layout, 0.25, chart.name);
  for (auto _ : state) {
    TransformationMatrix tm = wiener_tm(samples, chart);
    benchmark::DoNotOptimize(tm.rows.data());
  }
}
BENCHMARK(BM_WienerCalibration)->Arg(24)->Arg(96);

void BM_AgreementStatistics(benchmark::State& state) {
  Rng rng(405);
  PredictionPairs pairs;
  for (int i = 0; i < 320; ++i) {
    const double truth = rng.uniform(2.0, 450.0);
    pairs.emplace_back(truth, truth + rng.normal() * 30.0);
  }
  for (auto _ : state) {
    AgreementReport rep = bland_altman(pairs);
    RocReport r = roc(pairs, 17.1);
    benchmark::DoNotOptimize(rep.r);
    benchmark::DoNotOptimize(r.auroc);
  }
}
BENCHMARK(BM_AgreementStatistics);

}  // namespace

BENCHMARK_MAIN();
