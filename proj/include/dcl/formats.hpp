#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "dcl/common.hpp"
#include "dcl/jump.hpp"
#include "dcl/mechanism.hpp"
#include "dcl/mocap.hpp"
#include "dcl/stiffness.hpp"
#include "dcl/tpms.hpp"

// JSON schemas for every file interface. Angles are degrees and lengths carry
// an explicit unit suffix in key names; internally everything is rad / m / SI.

namespace dcl::formats {

using nlohmann::json;

namespace detail {

inline const json& require(const json& j, const std::string& key, const char* where) {
    auto it = j.find(key);
    if (it == j.end())
        throw ValidationError(std::string(where) + ": missing key '" + key + "'");
    return *it;
}

inline double require_num(const json& j, const std::string& key, const char* where) {
    const json& v = require(j, key, where);
    if (!v.is_number())
        throw ValidationError(std::string(where) + ": key '" + key + "' must be a number");
    return v.get<double>();
}

inline double num_or(const json& j, const std::string& key, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ValidationError("key '" + key + "' must be a number");
    return it->get<double>();
}

}  // namespace detail

// --- stiffness -------------------------------------------------------------

inline json stiffness_model_to_json(const stiffness::StiffnessModel& m) {
    return json{{"alpha", {m.alpha[0], m.alpha[1], m.alpha[2], m.alpha[3]}},
                {"operating_max_deg", rad_to_deg(m.operating_max)},
                {"safety_max_deg", rad_to_deg(m.safety_max)},
                {"r_squared", m.r_squared}};
}

inline stiffness::StiffnessModel stiffness_model_from_json(const json& j) {
    stiffness::StiffnessModel m;
    const json& a = detail::require(j, "alpha", "stiffness model");
    if (!a.is_array() || a.size() != 4)
        throw ValidationError("stiffness model: 'alpha' must be an array of 4 numbers");
    for (int i = 0; i < 4; ++i) m.alpha[std::size_t(i)] = a[std::size_t(i)].get<double>();
    m.operating_max = deg_to_rad(detail::require_num(j, "operating_max_deg", "stiffness model"));
    m.safety_max = deg_to_rad(detail::require_num(j, "safety_max_deg", "stiffness model"));
    m.r_squared = detail::require_num(j, "r_squared", "stiffness model");
    m.validate();
    return m;
}

inline stiffness::SurrogateSpec surrogate_spec_from_json(const json& j) {
    stiffness::SurrogateSpec s;
    s.peak_torque = detail::num_or(j, "peak_torque_nm", s.peak_torque);
    s.operating_max = deg_to_rad(detail::num_or(j, "operating_max_deg", rad_to_deg(s.operating_max)));
    s.densification_onset =
        deg_to_rad(detail::num_or(j, "densification_onset_deg", rad_to_deg(s.densification_onset)));
    s.max_theta = deg_to_rad(detail::num_or(j, "max_theta_deg", rad_to_deg(s.max_theta)));
    s.cubic_share = detail::num_or(j, "cubic_share", s.cubic_share);
    s.stiffening_rate = detail::num_or(j, "stiffening_rate", s.stiffening_rate);
    s.noise_sigma_frac = detail::num_or(j, "noise_sigma_frac", s.noise_sigma_frac);
    s.n_samples = int(detail::num_or(j, "n_samples", s.n_samples));
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    s.validate();
    return s;
}

// --- lattice ---------------------------------------------------------------

struct LatticeSpec {
    lattice::TpmsField field;
    lattice::SectorDomain domain;
    int resolution = 24;
    std::optional<double> target_density;  // when set, shell_halfwidth is solved
};

inline LatticeSpec lattice_spec_from_json(const json& j) {
    LatticeSpec s;
    if (j.contains("kind")) s.field.kind = lattice::tpms_kind_from_string(j["kind"].get<std::string>());
    s.field.cell_size = detail::num_or(j, "cell_size_mm", s.field.cell_size * 1e3) * 1e-3;
    s.field.level = detail::num_or(j, "level", s.field.level);
    s.field.shell_halfwidth = detail::num_or(j, "shell_halfwidth", s.field.shell_halfwidth);
    if (j.contains("domain")) {
        const json& d = j["domain"];
        s.domain.inner_radius = detail::num_or(d, "inner_radius_mm", s.domain.inner_radius * 1e3) * 1e-3;
        s.domain.outer_radius = detail::num_or(d, "outer_radius_mm", s.domain.outer_radius * 1e3) * 1e-3;
        if (d.contains("angular_span_deg")) {
            const json& a = d["angular_span_deg"];
            if (!a.is_array() || a.size() != 2)
                throw ValidationError("lattice spec: domain.angular_span_deg must be [start, end]");
            s.domain.angle_start = deg_to_rad(a[0].get<double>());
            s.domain.angle_end = deg_to_rad(a[1].get<double>());
        }
        s.domain.thickness = detail::num_or(d, "thickness_mm", s.domain.thickness * 1e3) * 1e-3;
    }
    s.resolution = int(detail::num_or(j, "resolution", s.resolution));
    if (j.contains("target_density")) {
        const double td = j["target_density"].get<double>();
        if (!(td > 0.0 && td < 1.0))
            throw ValidationError("lattice spec: target_density must be in (0, 1)");
        s.target_density = td;
    }
    s.field.validate();
    s.domain.validate();
    return s;
}

inline json lattice_spec_to_json(const LatticeSpec& s) {
    json j{{"kind", lattice::to_string(s.field.kind)},
           {"cell_size_mm", s.field.cell_size * 1e3},
           {"level", s.field.level},
           {"shell_halfwidth", s.field.shell_halfwidth},
           {"domain",
            {{"inner_radius_mm", s.domain.inner_radius * 1e3},
             {"outer_radius_mm", s.domain.outer_radius * 1e3},
             {"angular_span_deg",
              {rad_to_deg(s.domain.angle_start), rad_to_deg(s.domain.angle_end)}},
             {"thickness_mm", s.domain.thickness * 1e3}}},
           {"resolution", s.resolution}};
    if (s.target_density) j["target_density"] = *s.target_density;
    return j;
}

// --- dynamics --------------------------------------------------------------

inline dynamics::RobotParams robot_params_from_json(const json& j) {
    dynamics::RobotParams p;
    p.body_mass = detail::num_or(j, "body_mass_kg", p.body_mass);
    p.module_mass = detail::num_or(j, "module_mass_kg", p.module_mass);
    p.n_modules = int(detail::num_or(j, "n_modules", p.n_modules));
    p.thigh_length = detail::num_or(j, "thigh_m", p.thigh_length);
    p.shank_length = detail::num_or(j, "shank_m", p.shank_length);
    p.knee_torque_max = detail::num_or(j, "knee_torque_max_nm", p.knee_torque_max);
    p.knee_speed_max = detail::num_or(j, "knee_speed_max_rad_s", p.knee_speed_max);
    p.n_legs = int(detail::num_or(j, "n_legs", p.n_legs));
    p.gravity = detail::num_or(j, "gravity_m_s2", p.gravity);
    p.validate();
    return p;
}

inline json robot_params_to_json(const dynamics::RobotParams& p) {
    return json{{"body_mass_kg", p.body_mass},
                {"module_mass_kg", p.module_mass},
                {"n_modules", p.n_modules},
                {"thigh_m", p.thigh_length},
                {"shank_m", p.shank_length},
                {"knee_torque_max_nm", p.knee_torque_max},
                {"knee_speed_max_rad_s", p.knee_speed_max},
                {"n_legs", p.n_legs},
                {"gravity_m_s2", p.gravity}};
}

/// Scenario block; the stiffness model is attached by the caller.
inline dynamics::JumpScenario scenario_from_json(const json& j) {
    dynamics::JumpScenario s;
    if (j.contains("mode")) s.mode = dynamics::jump_mode_from_string(j["mode"].get<std::string>());
    s.squat_height = detail::num_or(j, "squat_height_mm", s.squat_height * 1e3) * 1e-3;
    if (j.contains("engagement_flexion_deg"))
        s.engagement_flexion = deg_to_rad(j["engagement_flexion_deg"].get<double>());
    return s;
}

// --- mechanism ---------------------------------------------------------

inline mechanism::CamProfile cam_from_json(const json& j) {
    mechanism::CamProfile cam;
    cam.stroke = detail::num_or(j, "stroke_mm", cam.stroke * 1e3) * 1e-3;
    cam.total_rotation =
        deg_to_rad(detail::num_or(j, "total_rotation_deg", rad_to_deg(cam.total_rotation)));
    cam.profile_exponent = detail::num_or(j, "profile_exponent", cam.profile_exponent);
    cam.spring_rate = detail::num_or(j, "spring_rate_n_per_m", cam.spring_rate);
    cam.spring_preload = detail::num_or(j, "spring_preload_n", cam.spring_preload);
    if (j.contains("detents")) {
        const json& ds = j["detents"];
        if (!ds.is_array()) throw ValidationError("cam: 'detents' must be an array");
        cam.detents.clear();
        for (const auto& d : ds)
            cam.detents.push_back({detail::require_num(d, "s_mm", "cam detent") * 1e-3,
                                   detail::require_num(d, "depth_mj", "cam detent") * 1e-3,
                                   detail::require_num(d, "width_mm", "cam detent") * 1e-3});
    } else {
        // keep default depths/widths but follow a non-default stroke
        cam.detents[1].s = cam.stroke;
    }
    cam.validate();
    return cam;
}

// --- mocap -------------------------------------------------------------

inline mocap::BodyMap body_map_from_json(const json& j) {
    mocap::BodyMap m;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const json& ids = it.value();
        if (!ids.is_array() || ids.size() != 3)
            throw ValidationError("body map: body '" + it.key() +
                                  "' must list exactly 3 marker ids");
        m[it.key()] = {ids[0].get<std::string>(), ids[1].get<std::string>(),
                       ids[2].get<std::string>()};
    }
    if (m.empty()) throw ValidationError("body map: no bodies");
    return m;
}

inline json body_map_to_json(const mocap::BodyMap& m) {
    json j = json::object();
    for (const auto& [body, ids] : m) j[body] = {ids[0], ids[1], ids[2]};
    return j;
}

inline json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError(what + ": invalid JSON");
    return j;
}

}  // namespace dcl::formats
