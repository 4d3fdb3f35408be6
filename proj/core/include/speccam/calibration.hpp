#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "speccam/spectral.hpp"

namespace speccam {

struct ColorChart {
  struct Block {
    std::string id;
    Spectrum reflectance;
  };
  std::string name;
  std::vector<Block> blocks;
};

// Averaged RGB per block, same order as the referenced chart.
struct ChartSamples {
  struct Sample {
    std::string block_id;
    RgbTriple rgb;
  };
  std::string chart_name;
  std::vector<Sample> samples;
};

// The 27x3 linear map from RGB to reflectance (rows = bands, cols = R,G,B).
struct TransformationMatrix {
  WavelengthGrid grid;
  std::vector<std::array<double, 3>> rows;

  TransformationMatrix() : grid(WavelengthGrid::default_grid()),
                           rows(grid.size(), {0.0, 0.0, 0.0}) {}
  explicit TransformationMatrix(WavelengthGrid g)
      : grid(std::move(g)), rows(grid.size(), {0.0, 0.0, 0.0}) {}
};

struct DeviceProfile {
  std::string device_model;
  std::string illuminant;
  std::string chart_name;
  TransformationMatrix tm;
  std::string created_at;  // ISO-8601
};

enum class ExposureVerdict { Ok, Overexposed, Underexposed };

// Per-block verdict from max(r,g,b): Overexposed at >= 255 (saturation),
// Underexposed below 100.
std::vector<std::pair<std::string, ExposureVerdict>> validate_exposure(
    const ChartSamples& samples);

struct WienerOptions {
  // Ridge added to <VVt> is ridge_scale * trace(<VVt>)/3; 0 disables.
  double ridge_scale = 1e-8;
};

// W = <V'Vt><VVt>^-1 over the chart blocks (raw second moments, matched by
// position). Throws ChartMismatch on block-count mismatch and
// SingularCalibration when <VVt> stays ill-conditioned after the ridge.
TransformationMatrix wiener_tm(const ChartSamples& samples,
                               const ColorChart& chart,
                               const WienerOptions& options = {});

struct ChartLayout {
  std::size_t cols = 6;
  std::size_t rows = 4;
};

// Divide the image into rows x cols cells and average the central
// (1 - 2*margin) fraction of each, row-major from the top left.
ChartSamples sample_chart(const RgbImage& image, ChartLayout layout,
                          double margin_fraction,
                          const std::string& chart_name = "");

// Profile store: <store_dir>/<device_model>.profile.json, written via
// temp-file-then-rename.
void save_profile(const DeviceProfile& profile,
                  const std::filesystem::path& store_dir);
DeviceProfile load_profile(const std::string& device_model,
                           const std::filesystem::path& store_dir);

}  // namespace speccam
