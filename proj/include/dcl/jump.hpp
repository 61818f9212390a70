#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dcl/common.hpp"
#include "dcl/constants.hpp"
#include "dcl/stiffness.hpp"

namespace dcl::dynamics {

/// Planar symmetric-leg jumper: massless two-link legs acting in unison, torque
/// only at the knee, body modeled as a point mass riding the hip.
struct RobotParams {
    double body_mass = 15.0;        // kg
    double module_mass = 0.05;      // kg per compliant module
    int n_modules = 4;
    double thigh_length = 0.213;    // m
    double shank_length = 0.213;    // m
    double knee_torque_max = 45.0;  // N*m per leg
    // effective saturation constant of the linear torque-speed envelope; high
    // by default so stance ends at (near) full extension. The knee-only
    // transmission sends qdot to infinity at liftoff, so the physical joint
    // speed limit would end every jump artificially early.
    double knee_speed_max = 900.0;  // rad/s
    int n_legs = 4;
    double gravity = 9.81;          // m/s^2

    void validate() const {
        if (!(body_mass > 0.0 && thigh_length > 0.0 && shank_length > 0.0 &&
              knee_torque_max >= 0.0 && knee_speed_max > 0.0 && gravity > 0.0))
            throw ValidationError("RobotParams: non-positive parameter");
        if (module_mass < 0.0) throw ValidationError("RobotParams: module_mass must be >= 0");
        if (n_legs < 1 || n_modules < 0 || n_modules > n_legs)
            throw ValidationError("RobotParams: need 1 <= n_legs and 0 <= n_modules <= n_legs");
    }

    double max_leg_length() const { return thigh_length + shank_length; }
};

enum class JumpMode { Baseline, Stowed, Deployed };

inline const char* to_string(JumpMode m) {
    switch (m) {
        case JumpMode::Baseline: return "baseline";
        case JumpMode::Stowed: return "stowed";
        case JumpMode::Deployed: return "deployed";
    }
    return "?";
}

inline JumpMode jump_mode_from_string(const std::string& s) {
    if (s == "baseline") return JumpMode::Baseline;
    if (s == "stowed") return JumpMode::Stowed;
    if (s == "deployed") return JumpMode::Deployed;
    throw ValidationError("unknown jump mode '" + s + "' (baseline|stowed|deployed)");
}

/// Hip-to-foot distance by the law of cosines; strictly increasing on (0, pi].
inline double leg_length(double knee_angle, const RobotParams& p) {
    if (!(knee_angle > 0.0 && knee_angle <= kPi))
        throw ValidationError("leg_length: knee angle must be in (0, pi]");
    return std::sqrt(p.thigh_length * p.thigh_length + p.shank_length * p.shank_length -
                     2.0 * p.thigh_length * p.shank_length * std::cos(knee_angle));
}

inline double knee_angle_for_length(double length, const RobotParams& p) {
    const double c = (p.thigh_length * p.thigh_length + p.shank_length * p.shank_length -
                      length * length) /
                     (2.0 * p.thigh_length * p.shank_length);
    return std::acos(std::min(1.0, std::max(-1.0, c)));
}

inline double dlength_dq(double knee_angle, const RobotParams& p) {
    return p.thigh_length * p.shank_length * std::sin(knee_angle) /
           leg_length(knee_angle, p);
}

struct JumpScenario {
    JumpMode mode = JumpMode::Baseline;
    double squat_height = reference::kSquatHeight_mm * 1e-3;  // m, standardized squat
    std::optional<stiffness::StiffnessModel> stiffness;  // required when Deployed
    // knee flexion (pi - q) at which module contact begins; unset = chosen so the
    // module sees its full operating-region compression at the squat depth
    std::optional<double> engagement_flexion;
};

struct TrajectoryPoint {
    double t = 0.0;          // s
    double z = 0.0;          // m
    double zdot = 0.0;       // m/s
    double knee_angle = 0.0; // rad
    double tau_motor = 0.0;  // N*m per leg
    double tau_exo = 0.0;    // N*m per module
};

struct JumpResult {
    double h_max = 0.0;            // m, apex of the center of mass
    double delta_h = 0.0;          // m, h_max - squat_height
    double liftoff_velocity = 0.0; // m/s
    double liftoff_height = 0.0;   // m
    double energy_motor = 0.0;     // J, stance work by the motors
    double energy_elastic = 0.0;   // J, stance work released by the modules
    bool bottomed_out = false;     // true when the leg folded instead of lifting off
    std::vector<TrajectoryPoint> trajectory;
};

/// Relative performance change in percent against a baseline effective jump height.
inline double relative_change(double delta_h, double delta_h_baseline) {
    if (!(delta_h_baseline > 0.0))
        throw ValidationError("relative_change: baseline delta_h must be > 0");
    return (delta_h - delta_h_baseline) / delta_h_baseline * 100.0;
}

namespace detail {

struct SimState {
    double z, v, w_motor, w_elastic;
};

struct SimContext {
    const RobotParams& p;
    double m_total;
    bool deployed;
    const stiffness::StiffnessModel* model;
    double engagement_flexion;

    double theta_module(double q) const {
        return std::max(0.0, (kPi - q) - engagement_flexion);
    }

    struct Forces {
        double q, qdot, tau_motor, tau_exo, f_z;
    };

    Forces forces(double z, double v) const {
        Forces f;
        f.q = knee_angle_for_length(std::min(z, p.max_leg_length()), p);
        const double dldq = dlength_dq(f.q, p);
        double tau_exo = 0.0;
        if (deployed) {
            // contact torque only under compression; a fitted a0 offset must not
            // leak force once the module has disengaged
            const double theta = theta_module(f.q);
            if (theta > 0.0) tau_exo = stiffness::torque_at(*model, theta, true);
        }
        f.tau_exo = tau_exo;
        if (dldq < 1e-12) {
            // at full extension the transmission ratio vanishes; no torque can
            // produce ground force or do work through the leg
            f.qdot = v >= 0.0 ? 1e30 : -1e30;
            f.tau_motor = 0.0;
            f.tau_exo = 0.0;
            f.f_z = 0.0;
            return f;
        }
        f.qdot = v / dldq;
        f.tau_motor =
            p.knee_torque_max * std::max(0.0, 1.0 - std::fabs(f.qdot) / p.knee_speed_max);
        f.f_z = (p.n_legs * f.tau_motor + p.n_modules * f.tau_exo) / dldq;
        return f;
    }

    void derivative(const SimState& s, SimState& ds) const {
        const Forces f = forces(s.z, s.v);
        ds.z = s.v;
        ds.v = f.f_z / m_total - p.gravity;
        ds.w_motor = p.n_legs * f.tau_motor * f.qdot;
        ds.w_elastic = p.n_modules * f.tau_exo * f.qdot;
    }

    SimState rk4_step(const SimState& s, double h) const {
        SimState k1, k2, k3, k4;
        derivative(s, k1);
        SimState s2{s.z + 0.5 * h * k1.z, s.v + 0.5 * h * k1.v, 0, 0};
        derivative(s2, k2);
        SimState s3{s.z + 0.5 * h * k2.z, s.v + 0.5 * h * k2.v, 0, 0};
        derivative(s3, k3);
        SimState s4{s.z + h * k3.z, s.v + h * k3.v, 0, 0};
        derivative(s4, k4);
        return {s.z + h / 6.0 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z),
                s.v + h / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v),
                s.w_motor + h / 6.0 * (k1.w_motor + 2 * k2.w_motor + 2 * k3.w_motor +
                                       k4.w_motor),
                s.w_elastic + h / 6.0 * (k1.w_elastic + 2 * k2.w_elastic +
                                         2 * k3.w_elastic + k4.w_elastic)};
    }

    /// One nominal step of size h. The torque-speed rolloff near liftoff is a
    /// thin boundary layer (transmission ratio collapsing while qdot runs into
    /// the envelope); once the state enters it the step is integrated as 64
    /// fixed sub-steps. The rule looks only at the start state, so the event
    /// bisection sees the exact same flow map for any h.
    SimState integrate_step(const SimState& s, double h) const {
        const Forces f0 = forces(s.z, s.v);
        const bool in_layer = std::fabs(f0.qdot) > 0.25 * p.knee_speed_max ||
                              s.z > p.max_leg_length() - 0.002;
        if (!in_layer) return rk4_step(s, h);
        SimState cur = s;
        const double hs = h / 64.0;
        for (int i = 0; i < 64; ++i) cur = rk4_step(cur, hs);
        return cur;
    }
};

}  // namespace detail

/// Fixed-step RK4 stance integration from the squat to liftoff, then a closed
/// form flight phase. Liftoff is the first of: ground force crossing zero, or
/// full leg extension; when both happen inside one step, full extension wins.
/// The event time is located by bisection inside the step, so results converge
/// with dt like the integrator itself.
inline JumpResult simulate_jump(const JumpScenario& scenario, const RobotParams& params,
                                double dt) {
    params.validate();
    if (!(dt > 1e-5 && dt <= 1e-3))
        throw ValidationError("simulate_jump: dt must be in (1e-5, 1e-3] s");
    const double z0 = scenario.squat_height;
    const double l_max = params.max_leg_length();
    const double l_min = std::fabs(params.thigh_length - params.shank_length);
    if (!(z0 > l_min + 1e-9 && z0 < l_max - 1e-9))
        throw ValidationError("simulate_jump: squat height unreachable by leg geometry");
    if (scenario.mode == JumpMode::Deployed && !scenario.stiffness)
        throw ValidationError("simulate_jump: Deployed mode requires a stiffness model");
    if (scenario.stiffness) scenario.stiffness->validate();

    detail::SimContext ctx{
        params,
        params.body_mass +
            (scenario.mode == JumpMode::Baseline ? 0.0
                                                 : params.n_modules * params.module_mass),
        scenario.mode == JumpMode::Deployed,
        scenario.stiffness ? &*scenario.stiffness : nullptr,
        0.0};

    const double q0 = knee_angle_for_length(z0, params);
    const double squat_flexion = kPi - q0;
    if (scenario.engagement_flexion) {
        ctx.engagement_flexion = *scenario.engagement_flexion;
    } else {
        const double full_compression =
            scenario.stiffness ? scenario.stiffness->operating_max
                               : deg_to_rad(reference::kOperatingMax_deg);
        ctx.engagement_flexion = squat_flexion - full_compression;
    }

    JumpResult res;
    detail::SimState s{z0, 0.0, 0.0, 0.0};
    double t = 0.0;

    auto record = [&](double time, const detail::SimState& st) {
        const auto f = ctx.forces(st.z, st.v);
        res.trajectory.push_back({time, st.z, st.v, f.q, f.tau_motor, f.tau_exo});
    };
    record(t, s);

    auto finish = [&](const detail::SimState& lo, double t_lo) {
        if (res.trajectory.empty() || res.trajectory.back().t != t_lo) record(t_lo, lo);
        res.liftoff_height = std::min(lo.z, l_max);
        res.liftoff_velocity = std::max(0.0, lo.v);
        res.energy_motor = lo.w_motor;
        res.energy_elastic = lo.w_elastic;
        res.h_max = res.liftoff_height +
                    res.liftoff_velocity * res.liftoff_velocity / (2.0 * params.gravity);
        res.delta_h = res.h_max - scenario.squat_height;
        return res;
    };

    if (ctx.forces(s.z, s.v).f_z <= 0.0) return finish(s, t);  // cannot even hold the squat

    const double t_max = 5.0;
    while (t < t_max) {
        const detail::SimState s_end = ctx.integrate_step(s, dt);

        if (s_end.z >= l_max) {
            // full-extension event: locate z(h) = l_max inside the step
            double h_lo = 0.0, h_hi = dt;
            detail::SimState hit = s_end;
            for (int it = 0; it < 60; ++it) {
                const double h = 0.5 * (h_lo + h_hi);
                const detail::SimState sh = ctx.integrate_step(s, h);
                if (sh.z >= l_max) {
                    h_hi = h;
                    hit = sh;
                } else {
                    h_lo = h;
                }
            }
            return finish(hit, t + h_hi);
        }

        if (ctx.forces(s_end.z, s_end.v).f_z <= 0.0) {
            // ground-force event: first h with F_z(state(h)) <= 0
            double h_lo = 0.0, h_hi = dt;
            detail::SimState hit = s_end;
            for (int it = 0; it < 60; ++it) {
                const double h = 0.5 * (h_lo + h_hi);
                const detail::SimState sh = ctx.integrate_step(s, h);
                if (ctx.forces(sh.z, sh.v).f_z <= 0.0) {
                    h_hi = h;
                    hit = sh;
                } else {
                    h_lo = h;
                }
            }
            return finish(hit, t + h_hi);
        }

        if (s_end.z <= l_min + 1e-6 ||
            knee_angle_for_length(s_end.z, params) < 0.02) {
            // leg folded: count as a failed jump with zero effective height
            res.bottomed_out = true;
            detail::SimState folded{z0, 0.0, s_end.w_motor, s_end.w_elastic};
            return finish(folded, t + dt);
        }

        s = s_end;
        t += dt;
        record(t, s);
    }
    res.bottomed_out = true;  // never lifted off; report as a zero-height jump
    detail::SimState stuck{z0, 0.0, s.w_motor, s.w_elastic};
    return finish(stuck, t);
}

// ---------------------------------------------------------------------------
// Calibration against measured effective jump heights
// ---------------------------------------------------------------------------

struct CalibrationTargets {
    double baseline_delta_h = reference::kBaselineDeltaH_mm * 1e-3;  // m
    double stowed_delta_h = reference::kStowedDeltaH_mm * 1e-3;      // m
    double tolerance = 0.0005;                                       // m
};

struct CalibrationResult {
    RobotParams params;
    double achieved_baseline = 0.0;  // m
    double achieved_stowed = 0.0;    // m
};

namespace detail {

template <typename Response>
double bisect_monotone(Response&& response, double lo, double hi, double target,
                       double tol, const char* label) {
    double f_lo = response(lo);
    double f_hi = response(hi);
    std::vector<std::pair<double, double>> probes{{lo, f_lo}, {hi, f_hi}};
    const bool increasing = f_hi >= f_lo;
    // expand the upper end until the target is bracketed
    for (int grow = 0; grow < 16 && ((increasing && f_hi < target) ||
                                     (!increasing && f_hi > target));
         ++grow) {
        hi *= 2.0;
        f_hi = response(hi);
        probes.emplace_back(hi, f_hi);
    }
    const bool bracketed = increasing ? (f_lo <= target && target <= f_hi)
                                      : (f_hi <= target && target <= f_lo);
    if (!bracketed) {
        std::ostringstream ss;
        ss << "calibrate: cannot bracket " << label << " target " << target
           << "; response curve:";
        for (auto& [x, y] : probes) ss << " (" << x << " -> " << y << ")";
        throw ValidationError(ss.str());
    }
    double x_lo = lo, x_hi = hi;
    for (int it = 0; it < 80; ++it) {
        const double x = 0.5 * (x_lo + x_hi);
        const double f = response(x);
        if (std::fabs(f - target) <= tol) return x;
        const bool go_up = increasing ? f < target : f > target;
        (go_up ? x_lo : x_hi) = x;
    }
    return 0.5 * (x_lo + x_hi);
}

}  // namespace detail

/// Two-stage fit to the measured Baseline and Stowed effective jump heights:
/// knee_torque_max from the Baseline (module mass plays no role there), then
/// module_mass from the Stowed penalty. Deployed remains a pure prediction.
inline CalibrationResult calibrate(const CalibrationTargets& targets, RobotParams params,
                                   const JumpScenario& scenario_template,
                                   double dt = 1e-4) {
    if (!(targets.baseline_delta_h > 0.0 && targets.stowed_delta_h > 0.0))
        throw ValidationError("calibrate: targets must be positive");

    JumpScenario base = scenario_template;
    base.mode = JumpMode::Baseline;
    base.stiffness.reset();
    auto baseline_response = [&](double tau) {
        RobotParams p = params;
        p.knee_torque_max = tau;
        return simulate_jump(base, p, dt).delta_h;
    };
    params.knee_torque_max = detail::bisect_monotone(
        baseline_response, 0.0, 64.0, targets.baseline_delta_h, targets.tolerance * 0.02,
        "baseline knee_torque_max");

    JumpScenario stow = scenario_template;
    stow.mode = JumpMode::Stowed;
    stow.stiffness.reset();
    auto stowed_response = [&](double m) {
        RobotParams p = params;
        p.module_mass = m;
        return simulate_jump(stow, p, dt).delta_h;
    };
    params.module_mass = detail::bisect_monotone(
        stowed_response, 0.0, 0.5, targets.stowed_delta_h, targets.tolerance * 0.02,
        "stowed module_mass");

    CalibrationResult out;
    out.params = params;
    out.achieved_baseline = simulate_jump(base, params, dt).delta_h;
    out.achieved_stowed = simulate_jump(stow, params, dt).delta_h;
    return out;
}

}  // namespace dcl::dynamics
