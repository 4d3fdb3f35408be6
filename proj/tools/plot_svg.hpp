#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "speccam/evaluation.hpp"

namespace speccam::plot {

// Self-contained single-file SVGs, fixed 800x600 viewBox.
void scatter_with_band(const PredictionPairs& pairs,
                       const std::string& title,
                       const std::filesystem::path& path);

void bland_altman_plot(const PredictionPairs& pairs,
                       const AgreementReport& report,
                       const std::filesystem::path& path);

void roc_plot(const RocReport& report, const std::filesystem::path& path);

void curve_plot(const LearningCurve& curve, const std::filesystem::path& path);

}  // namespace speccam::plot
