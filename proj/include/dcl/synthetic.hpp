#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dcl/common.hpp"
#include "dcl/constants.hpp"
#include "dcl/mocap.hpp"
#include "dcl/rng.hpp"

namespace dcl::mocap {

// Synthetic capture data for the standard 15-marker rig (3 trunk + 3 per thigh).
// The trunk rides a squat-hold / constant-acceleration launch / ballistic arc
// trajectory whose apex is exact by construction, so analysis output can be
// checked against ground truth.

struct SyntheticTrialSpec {
    double h_base = reference::kSquatHeight_mm;  // mm, squat plateau
    double apex = reference::kBaselineHmax_mm;   // mm, true peak trunk height
    double rate_hz = 240.0;       // capture rate
    double hold_s = 0.5;          // squat hold before launch
    double tail_s = 0.3;          // hold after landing
    double launch_accel = 3.0;    // launch acceleration, in g units
    double noise_mm = reference::kTrackingNoise_mm;  // isotropic marker noise sigma
    std::uint64_t seed = 42;
    int trial_index = 0;

    double true_delta_h() const { return apex - h_base; }
};

inline BodyMap standard_body_map() {
    BodyMap m;
    m["trunk"] = {"trunk_front", "trunk_left", "trunk_right"};
    const char* legs[4] = {"fl", "fr", "rl", "rr"};
    for (const char* leg : legs)
        m[std::string("thigh_") + leg] = {std::string("thigh_") + leg + "_prox",
                                          std::string("thigh_") + leg + "_mid",
                                          std::string("thigh_") + leg + "_dist"};
    return m;
}

/// True trunk height (mm) at time t for the trial's piecewise trajectory.
inline double synthetic_trunk_z(const SyntheticTrialSpec& s, double t) {
    const double g = 9810.0;  // mm/s^2
    const double a = s.launch_accel * g;
    const double rise = s.apex - s.h_base;
    const double t_launch = std::sqrt(2.0 * rise / (a * (1.0 + a / g)));
    const double v_lo = a * t_launch;
    const double z_lo = s.h_base + 0.5 * a * t_launch * t_launch;
    const double t_up = v_lo / g;                            // ballistic rise time
    const double t_down = std::sqrt(2.0 * (s.apex - s.h_base) / g);  // fall back to base

    if (t < s.hold_s) return s.h_base;
    double u = t - s.hold_s;
    if (u < t_launch) return s.h_base + 0.5 * a * u * u;
    u -= t_launch;
    if (u < t_up + t_down) return z_lo + v_lo * u - 0.5 * g * u * u;
    return s.h_base;
}

inline double synthetic_trial_duration(const SyntheticTrialSpec& s) {
    const double g = 9810.0;
    const double a = s.launch_accel * g;
    const double rise = s.apex - s.h_base;
    const double t_launch = std::sqrt(2.0 * rise / (a * (1.0 + a / g)));
    const double v_lo = a * t_launch;
    const double t_up = v_lo / g;
    const double t_down = std::sqrt(2.0 * (s.apex - s.h_base) / g);
    return s.hold_s + t_launch + t_up + t_down + s.tail_s;
}

inline std::vector<MarkerFrame> generate_trial(const SyntheticTrialSpec& spec) {
    // marker offsets in each body frame (mm); trunk offsets average to zero in z
    // so the resolved body height equals the trunk origin height
    const std::array<Vec3, 3> trunk_local{{{0.0, 80.0, 20.0}, {-60.0, -40.0, -10.0},
                                           {60.0, -40.0, -10.0}}};
    const std::array<Vec3, 3> thigh_local{{{0.0, 0.0, 0.0}, {15.0, 0.0, -60.0},
                                           {30.0, 0.0, -120.0}}};
    const Vec3 hip_offset[4] = {{120.0, 90.0, -40.0},
                                {120.0, -90.0, -40.0},
                                {-120.0, 90.0, -40.0},
                                {-120.0, -90.0, -40.0}};
    const BodyMap bodies = standard_body_map();

    const double duration = synthetic_trial_duration(spec);
    const int n_frames = int(duration * spec.rate_hz) + 1;
    const std::uint64_t seed = hash_combine(spec.seed, std::uint64_t(spec.trial_index));

    std::vector<MarkerFrame> frames;
    frames.reserve(std::size_t(n_frames));
    std::uint64_t counter = 0;
    for (int fi = 0; fi < n_frames; ++fi) {
        MarkerFrame frame;
        frame.t = double(fi) / spec.rate_hz;
        const double z = synthetic_trunk_z(spec, frame.t);

        auto place = [&](const std::string& id, const Vec3& p) {
            Vec3 noisy = p;
            if (spec.noise_mm > 0.0) {
                noisy.x += spec.noise_mm * gaussian(seed, counter++);
                noisy.y += spec.noise_mm * gaussian(seed, counter++);
                noisy.z += spec.noise_mm * gaussian(seed, counter++);
            }
            frame.markers[id] = noisy;
        };

        const auto& trunk_ids = bodies.at("trunk");
        for (int m = 0; m < 3; ++m)
            place(trunk_ids[std::size_t(m)],
                  {trunk_local[std::size_t(m)].x, trunk_local[std::size_t(m)].y,
                   z + trunk_local[std::size_t(m)].z});

        // thighs swing with the jump; exact shape is irrelevant to trunk analysis
        const double swing = 0.4 * std::sin(8.0 * frame.t);
        const char* legs[4] = {"fl", "fr", "rl", "rr"};
        for (int leg = 0; leg < 4; ++leg) {
            const auto& ids = bodies.at(std::string("thigh_") + legs[leg]);
            for (int m = 0; m < 3; ++m) {
                const Vec3& l = thigh_local[std::size_t(m)];
                const Vec3 rotated{l.x * std::cos(swing) - l.z * std::sin(swing), l.y,
                                   l.x * std::sin(swing) + l.z * std::cos(swing)};
                place(ids[std::size_t(m)],
                      {hip_offset[leg].x + rotated.x, hip_offset[leg].y + rotated.y,
                       z + hip_offset[leg].z + rotated.z});
            }
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

}  // namespace dcl::mocap
