#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dcl/common.hpp"

namespace dcl::mechanism {

/// Detent well in the toggle's energy landscape, modeled as a smooth negative
/// Gaussian so the landscape stays differentiable. `width` is the capture
/// window: locked states live within +-width/2 of the center, and the Gaussian
/// sigma is width/2.
struct Detent {
    double s = 0.0;        // m, well center along the stroke
    double depth = 0.005;  // J
    double width = 0.0006; // m
};

/// Helical-cam toggle: push-rod travel s in [0, stroke] maps to sleeve rotation
/// phi in [0, total_rotation] through a strictly increasing profile (a power law
/// in s/stroke; exponent 1 is the plain linear helix), against a return spring
/// plus two detent wells that make the stowed and deployed ends bistable.
struct CamProfile {
    double stroke = 0.010;               // m
    double total_rotation = kPi / 2.0;   // rad
    double profile_exponent = 1.0;       // phi = total * (s/stroke)^exponent
    double spring_rate = 500.0;          // N/m
    double spring_preload = 2.0;         // N
    std::vector<Detent> detents{{0.0, 0.005, 0.0006}, {0.010, 0.005, 0.0006}};

    void validate() const {
        if (!(stroke > 0.0)) throw ValidationError("CamProfile: stroke must be > 0");
        if (!(total_rotation > 0.0))
            throw ValidationError("CamProfile: total_rotation must be > 0");
        if (!(profile_exponent > 0.0))
            throw ValidationError("CamProfile: profile_exponent must be > 0");
        if (spring_rate < 0.0 || spring_preload < 0.0)
            throw ValidationError("CamProfile: spring parameters must be >= 0");
        if (detents.size() != 2)
            throw ValidationError("CamProfile: bistability needs exactly 2 detents");
        if (std::fabs(detents[0].s) > 1e-12 || std::fabs(detents[1].s - stroke) > 1e-12)
            throw ValidationError("CamProfile: detents must sit at s = 0 and s = stroke");
        for (const auto& d : detents)
            if (!(d.depth > 0.0 && d.width > 0.0))
                throw ValidationError("CamProfile: detent depth and width must be > 0");
    }
};

enum class LockState { StowedLock, DeployedLock, Transit };

inline const char* to_string(LockState s) {
    switch (s) {
        case LockState::StowedLock: return "stowed_lock";
        case LockState::DeployedLock: return "deployed_lock";
        case LockState::Transit: return "transit";
    }
    return "?";
}

/// Sleeve rotation for a push-rod position; rotation_of(stroke) is exactly the
/// full rotation for any exponent.
inline double rotation_of(double s, const CamProfile& cam) {
    cam.validate();
    if (s < 0.0 || s > cam.stroke)
        throw ValidationError("rotation_of: push-rod position outside [0, stroke]");
    const double u = s / cam.stroke;
    return cam.total_rotation * (cam.profile_exponent == 1.0
                                     ? u
                                     : std::pow(u, cam.profile_exponent));
}

struct MechanismState {
    double s = 0.0;    // m
    double phi = 0.0;  // rad, always profile(s)
    LockState locked = LockState::StowedLock;
};

inline MechanismState state_at(double s, const CamProfile& cam) {
    MechanismState st;
    st.s = s;
    st.phi = rotation_of(s, cam);
    st.locked = LockState::Transit;
    if (std::fabs(s - cam.detents[0].s) <= cam.detents[0].width / 2.0)
        st.locked = LockState::StowedLock;
    else if (std::fabs(s - cam.detents[1].s) <= cam.detents[1].width / 2.0)
        st.locked = LockState::DeployedLock;
    return st;
}

/// Quasi-static energy landscape: spring + preload + detent wells.
inline double potential_energy(double s, const CamProfile& cam) {
    if (s < 0.0 || s > cam.stroke)
        throw ValidationError("potential_energy: position outside [0, stroke]");
    double u = 0.5 * cam.spring_rate * s * s + cam.spring_preload * s;
    for (const auto& d : cam.detents) {
        const double sig = d.width / 2.0;
        const double x = s - d.s;
        u -= d.depth * std::exp(-x * x / (2.0 * sig * sig));
    }
    return u;
}

/// Analytic dU/ds: the quasi-static force a linear actuator must overcome.
inline double actuation_force(double s, const CamProfile& cam) {
    if (s < 0.0 || s > cam.stroke)
        throw ValidationError("actuation_force: position outside [0, stroke]");
    double f = cam.spring_rate * s + cam.spring_preload;
    for (const auto& d : cam.detents) {
        const double sig = d.width / 2.0;
        const double x = s - d.s;
        f += d.depth * x / (sig * sig) * std::exp(-x * x / (2.0 * sig * sig));
    }
    return f;
}

/// Peak |dU/ds| over the transit region (outside both detent windows): the
/// actuator sizing number.
inline double required_force(const CamProfile& cam, int n_grid = 4096) {
    cam.validate();
    const double lo = cam.detents[0].s + cam.detents[0].width / 2.0;
    const double hi = cam.detents[1].s - cam.detents[1].width / 2.0;
    double f_max = 0.0;
    for (int i = 0; i <= n_grid; ++i) {
        const double s = lo + (hi - lo) * double(i) / n_grid;
        f_max = std::max(f_max, std::fabs(actuation_force(s, cam)));
    }
    return f_max;
}

/// Projected gradient descent on U over [0, stroke]. Deterministic; used for the
/// bistability analysis and for resolving detent equilibria.
inline double descend_potential(double s0, const CamProfile& cam) {
    double s = std::min(cam.stroke, std::max(0.0, s0));
    double step = cam.stroke / 64.0;
    for (int it = 0; it < 20000 && step > 1e-15; ++it) {
        const double f = actuation_force(s, cam);
        double cand = s - (f > 0.0 ? step : -step);
        cand = std::min(cam.stroke, std::max(0.0, cand));
        if (potential_energy(cand, cam) < potential_energy(s, cam)) {
            s = cand;
        } else {
            step *= 0.5;
        }
    }
    return s;
}

/// Toggle between the bistable ends: from either lock the mechanism settles in
/// the opposite detent's equilibrium.
inline MechanismState toggle(const MechanismState& from, const CamProfile& cam) {
    cam.validate();
    if (from.locked == LockState::Transit)
        throw ValidationError("toggle: mechanism is not in a locked state");
    const Detent& target =
        from.locked == LockState::StowedLock ? cam.detents[1] : cam.detents[0];
    // seed the descent just inside the target window so it falls into that well
    const double seed = target.s == 0.0 ? target.s + target.width / 4.0
                                        : target.s - target.width / 4.0;
    const double s_eq = descend_potential(seed, cam);
    return state_at(s_eq, cam);
}

}  // namespace dcl::mechanism
