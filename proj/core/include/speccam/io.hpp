#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "speccam/calibration.hpp"
#include "speccam/evaluation.hpp"
#include "speccam/phantom.hpp"
#include "speccam/spectral.hpp"

namespace speccam {

// Binary PPM (P6, 8-bit). Channel values round to the nearest integer and
// clamp to [0, 255] on write.
RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const RgbImage& image, const std::filesystem::path& path);

// Cube file: magic "MSC1"; width, height, band count as u32 LE; band
// centers then band-sequential planes (row-major) as f32 LE.
SpectralCube read_cube(const std::filesystem::path& path);
void write_cube(const SpectralCube& cube, const std::filesystem::path& path);

// Chart reference CSV: header block_id,420,430,...,680.
ColorChart read_chart_csv(const std::filesystem::path& path);
void write_chart_csv(const ColorChart& chart, const std::filesystem::path& path);

// Dataset CSV: id,r,g,b,s420,...,s680,bbl_umol_l (header mandatory).
SyntheticDataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const SyntheticDataset& dataset,
                       const std::filesystem::path& path);

// ROI CSV: snapshot_id,x,y,side.
struct RoiEntry {
  std::string snapshot_id;
  Roi roi;
};
std::vector<RoiEntry> read_roi_csv(const std::filesystem::path& path);

// Report and curve outputs.
std::string report_json(const AgreementReport& agreement, const RocReport& roc,
                        const std::string& mode, const std::string& model,
                        std::size_t folds, std::uint64_t seed, std::size_t n);
void write_curve_csv(const LearningCurve& curve,
                     const std::filesystem::path& path);
std::string stability_json(const StabilitySummary& summary);

}  // namespace speccam
