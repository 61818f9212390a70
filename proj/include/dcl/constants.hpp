#pragma once

// Published anchors of the reference experiment, kept in one place and used
// as defaults across the toolkit. Values not listed here (motor constants,
// cam dimensions, lattice cell size) were never published and are ordinary
// config defaults.

namespace dcl::reference {

// standardized squat height shared by every trial group
inline constexpr double kSquatHeight_mm = 283.1;

// mean effective jump heights (N = 5 trials per group)
inline constexpr double kBaselineDeltaH_mm = 373.1;
inline constexpr double kStowedDeltaH_mm = 371.7;
inline constexpr double kDeployedDeltaH_mm = 437.1;

// mean peak trunk heights per group
inline constexpr double kBaselineHmax_mm = 656.3;
inline constexpr double kStowedHmax_mm = 654.9;
inline constexpr double kDeployedHmax_mm = 720.3;

// reported relative performance change of the deployed group
inline constexpr double kDeployedDeltaPercent = 17.1;

// torque-law anchors: peak torque at the end of the operating region,
// safety margin up to the design limit, characterization sweep end
inline constexpr double kModulePeakTorque_nm = 6.8;
inline constexpr double kOperatingMax_deg = 29.0;
inline constexpr double kDesignLimit_deg = 39.0;
inline constexpr double kSweepEnd_deg = 45.0;

// capture rig: 3 trunk markers + 3 per thigh, 0.1 mm point tracking
inline constexpr int kMarkerCount = 15;
inline constexpr double kTrackingNoise_mm = 0.1;
inline constexpr int kTrialsPerGroup = 5;

}  // namespace dcl::reference
