#pragma once

#include <array>
#include <string_view>

#include "patterndyn/analysis.hpp"
#include "patterndyn/config.hpp"

namespace patterndyn {

inline constexpr std::array<std::string_view, 10> kCheckIds = {
    "prop1", "prop2", "thm1_opposite", "thm1_obtuse", "thm1_sharp", "thm2", "thm3", "thm4", "thm5", "fig2"};

/// Thresholds a check's report is judged against.
namespace thresholds {
inline constexpr double kPhiTolerance = 1e-12;
inline constexpr double kRateLo = -0.75;
inline constexpr double kRateHiClean = -0.30;
inline constexpr double kRateHiNoisy = -0.25;
inline constexpr double kRateFractionClean = 0.85;
inline constexpr double kRateFractionNoisy = 0.80;
inline constexpr double kAccuracyFraction = 0.90;
inline constexpr double kMonotoneSlack = 1e-9;
inline constexpr double kAlignCos = 0.9;
inline constexpr double kAlignFraction = 0.80;
inline constexpr double kMuStandardErrors = 3.0;
inline constexpr double kEmpiricalAccuracyFraction = 0.85;
inline constexpr double kSignKeptFraction = 0.95;
inline constexpr double kJointFraction = 0.90;
inline constexpr double kNormRatio = 3.0;
inline constexpr double kDominationFraction = 0.8;
inline constexpr double kFig2Accuracy = 0.99;
}  // namespace thresholds

/// Runs one check. Reports carry named statistics, the per-part "*_ok" flags
/// and pass = all parts ok. Throws regime-mismatch / invalid-config before any
/// training when the config does not fit the check.
TheoremReport run_check(std::string_view id, const ExperimentConfig& config);

}  // namespace patterndyn
