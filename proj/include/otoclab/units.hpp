#pragma once

#include <numbers>

namespace otoclab {

// Internal units are SI: seconds and angular frequency in rad/s.
// The boundary (CLI, JSON, CSV) speaks MHz, ns and us.
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double mhz_to_rad_per_s(double mhz) { return kTwoPi * mhz * 1e6; }
constexpr double rad_per_s_to_mhz(double w) { return w / (kTwoPi * 1e6); }
constexpr double ghz_to_rad_per_s(double ghz) { return kTwoPi * ghz * 1e9; }
constexpr double ns_to_s(double ns) { return ns * 1e-9; }
constexpr double s_to_ns(double s) { return s * 1e9; }
constexpr double us_to_s(double us) { return us * 1e-6; }

/// Nominal device parameters of the 3x3 transmon lattice.
namespace device {
inline constexpr double kHoppingMHz = 8.1;
inline constexpr double kAnharmonicityMHz = -244.0;
inline constexpr double kZzStrengthMHz = 0.54;
inline constexpr double kReferenceFrequencyGHz = 5.3;
inline constexpr double kCouplingCalibrationGHz = 5.5;
inline constexpr double kT2EffUs = 0.884;
}  // namespace device

}  // namespace otoclab
