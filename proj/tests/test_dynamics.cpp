#include <catch2/catch.hpp>
#include <cmath>

#include "dcl/jump.hpp"
#include "dcl/rng.hpp"
#include "dcl/stiffness.hpp"

using namespace dcl;
using namespace dcl::dynamics;

namespace {

stiffness::StiffnessModel paper_model() {
    stiffness::SurrogateSpec spec;  // published anchors, default split
    spec.noise_sigma_frac = 0.0;
    return stiffness::fit_operating_region(stiffness::generate_surrogate_fea(spec),
                                           deg_to_rad(29.0), deg_to_rad(39.0));
}

stiffness::StiffnessModel zero_model() {
    stiffness::StiffnessModel m;
    m.alpha = {0.0, 0.0, 0.0, 0.0};
    m.operating_max = 1.0;
    m.safety_max = kPi;  // wide bounds so the zero spring never trips the region gate
    m.r_squared = 1.0;
    return m;
}

}  // namespace

TEST_CASE("leg length follows the law of cosines") {
    RobotParams p;
    CHECK(leg_length(kPi, p) == Approx(0.426).margin(1e-12));
    CHECK(leg_length(kPi / 2.0, p) == Approx(0.213 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(leg_length(0.0, p), ValidationError);
    CHECK_THROWS_AS(leg_length(3.3, p), ValidationError);

    // strictly increasing on (0, pi]
    double prev = 0.0;
    for (int i = 1; i <= 64; ++i) {
        const double l = leg_length(kPi * i / 64.0, p);
        CHECK(l > prev);
        prev = l;
    }
}

TEST_CASE("dl/dq matches a central finite difference") {
    RobotParams p;
    const double h = 1e-6;
    for (double q : {0.4, kPi / 2.0, 1.9, 2.7}) {
        const double fd = (leg_length(q + h, p) - leg_length(q - h, p)) / (2.0 * h);
        CHECK(dlength_dq(q, p) == Approx(fd).margin(1e-8));
    }
}

TEST_CASE("knee angle inverts leg length") {
    RobotParams p;
    for (double q : {0.3, 1.0, 1.4538, 2.2, 3.0}) {
        CHECK(knee_angle_for_length(leg_length(q, p), p) == Approx(q).margin(1e-12));
    }
}

TEST_CASE("zero motor torque gives a zero-height jump") {
    RobotParams p;
    p.knee_torque_max = 0.0;
    for (JumpMode mode : {JumpMode::Baseline, JumpMode::Stowed}) {
        JumpScenario s;
        s.mode = mode;
        JumpResult r = simulate_jump(s, p, 1e-4);
        CHECK(r.delta_h == 0.0);
        CHECK(r.liftoff_velocity == 0.0);
    }
}

TEST_CASE("flight phase is closed form") {
    // rise for 1 m/s at liftoff
    CHECK(1.0 / (2.0 * 9.81) == Approx(0.05097).margin(5e-6));

    RobotParams p;
    p.knee_torque_max = 20.0;
    JumpScenario s;
    JumpResult r = simulate_jump(s, p, 1e-4);
    CHECK(r.h_max == r.liftoff_height + r.liftoff_velocity * r.liftoff_velocity /
                         (2.0 * p.gravity));  // exact, same arithmetic
    CHECK(r.delta_h == r.h_max - s.squat_height);
    CHECK(r.h_max >= r.liftoff_height);
}

TEST_CASE("relative change reproduces the published comparison") {
    CHECK(relative_change(437.1, 373.1) == Approx(17.153578).margin(1e-5));
    CHECK(relative_change(371.7, 373.1) == Approx(-0.375234).margin(1e-5));
    CHECK(relative_change(373.1, 373.1) == 0.0);
    // published one-decimal values, with input/output rounding slack
    CHECK(std::fabs(relative_change(437.1, 373.1) - 17.1) < 0.06);
    CHECK(std::fabs(relative_change(371.7, 373.1) - (-0.4)) < 0.06);
    CHECK_THROWS_AS(relative_change(100.0, 0.0), ValidationError);
}

TEST_CASE("stance work balances energy at dt = 1e-4") {
    RobotParams p;
    p.knee_torque_max = 18.0;
    JumpScenario s;
    s.mode = JumpMode::Deployed;
    s.stiffness = paper_model();
    JumpResult r = simulate_jump(s, p, 1e-4);
    const double m_total = p.body_mass + p.n_modules * p.module_mass;
    const double work = r.energy_motor + r.energy_elastic;
    const double d_ke = 0.5 * m_total * r.liftoff_velocity * r.liftoff_velocity;
    const double d_pe = m_total * p.gravity * (r.liftoff_height - s.squat_height);
    CHECK(std::fabs(work - d_ke - d_pe) < 1e-3 * work);
}

TEST_CASE("halving dt moves delta_h by less than 0.1 mm") {
    RobotParams p;
    p.knee_torque_max = 14.0;
    for (JumpMode mode : {JumpMode::Baseline, JumpMode::Deployed}) {
        JumpScenario s;
        s.mode = mode;
        if (mode == JumpMode::Deployed) s.stiffness = paper_model();
        const double coarse = simulate_jump(s, p, 1e-4).delta_h;
        const double fine = simulate_jump(s, p, 5e-5).delta_h;
        CHECK(std::fabs(coarse - fine) * 1e3 < 0.1);
    }
}

TEST_CASE("delta_h is monotone in knee torque") {
    for (std::uint64_t i = 0; i < 10; ++i) {
        RobotParams p;
        p.body_mass = 10.0 + 10.0 * uniform01(61, 3 * i);
        double t1 = 10.0 + 50.0 * uniform01(61, 3 * i + 1);
        double t2 = 10.0 + 50.0 * uniform01(61, 3 * i + 2);
        if (t1 > t2) std::swap(t1, t2);
        JumpScenario s;
        p.knee_torque_max = t1;
        const double low = simulate_jump(s, p, 1e-4).delta_h;
        p.knee_torque_max = t2;
        const double high = simulate_jump(s, p, 1e-4).delta_h;
        CHECK(high >= low);
    }
}

TEST_CASE("added stowed mass always costs height") {
    for (std::uint64_t i = 0; i < 8; ++i) {
        RobotParams p;
        p.knee_torque_max = 12.0 + 40.0 * uniform01(62, 2 * i);
        p.module_mass = 0.02 + 0.3 * uniform01(62, 2 * i + 1);
        JumpScenario s;
        s.mode = JumpMode::Baseline;
        const double base = simulate_jump(s, p, 1e-4).delta_h;
        s.mode = JumpMode::Stowed;
        const double stowed = simulate_jump(s, p, 1e-4).delta_h;
        CHECK(stowed < base);
    }
}

TEST_CASE("deployment never hurts against stowed") {
    stiffness::StiffnessModel model = paper_model();
    for (std::uint64_t i = 0; i < 8; ++i) {
        RobotParams p;
        p.knee_torque_max = 12.0 + 40.0 * uniform01(63, i);
        JumpScenario s;
        s.mode = JumpMode::Stowed;
        const double stowed = simulate_jump(s, p, 1e-4).delta_h;
        s.mode = JumpMode::Deployed;
        s.stiffness = model;
        const double deployed = simulate_jump(s, p, 1e-4).delta_h;
        CHECK(deployed >= stowed);
    }
}

TEST_CASE("deployed with an all-zero model reproduces stowed bit for bit") {
    RobotParams p;
    p.knee_torque_max = 16.0;
    JumpScenario stow;
    stow.mode = JumpMode::Stowed;
    JumpResult a = simulate_jump(stow, p, 1e-4);

    JumpScenario dep;
    dep.mode = JumpMode::Deployed;
    dep.stiffness = zero_model();
    JumpResult b = simulate_jump(dep, p, 1e-4);

    CHECK(a.delta_h == b.delta_h);
    CHECK(a.liftoff_velocity == b.liftoff_velocity);
    CHECK(a.liftoff_height == b.liftoff_height);
    CHECK(a.energy_motor == b.energy_motor);
    CHECK(b.energy_elastic == 0.0);
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    for (std::size_t i = 0; i < a.trajectory.size(); i += 37) {
        CHECK(a.trajectory[i].z == b.trajectory[i].z);
        CHECK(a.trajectory[i].zdot == b.trajectory[i].zdot);
    }
}

TEST_CASE("default engagement releases the full operating-region energy") {
    stiffness::StiffnessModel model = paper_model();
    RobotParams p;
    p.knee_torque_max = 16.0;
    JumpScenario s;
    s.mode = JumpMode::Deployed;
    s.stiffness = model;
    JumpResult r = simulate_jump(s, p, 1e-4);
    const double expected =
        p.n_modules * stiffness::stored_energy(model, deg_to_rad(29.0));
    CHECK(r.energy_elastic == Approx(expected).epsilon(1e-4));
}

TEST_CASE("simulation input validation") {
    RobotParams p;
    JumpScenario s;

    s.squat_height = 0.45;  // beyond full extension 0.426
    CHECK_THROWS_WITH(simulate_jump(s, p, 1e-4), Catch::Contains("unreachable"));

    s.squat_height = 0.2831;
    CHECK_THROWS_AS(simulate_jump(s, p, 2e-3), ValidationError);
    CHECK_THROWS_AS(simulate_jump(s, p, 1e-5), ValidationError);

    s.mode = JumpMode::Deployed;  // no stiffness model attached
    CHECK_THROWS_WITH(simulate_jump(s, p, 1e-4), Catch::Contains("stiffness"));

    RobotParams bad;
    bad.n_modules = 5;  // exceeds n_legs
    CHECK_THROWS_AS(simulate_jump(JumpScenario{}, bad, 1e-4), ValidationError);
}

TEST_CASE("over-compression aborts with a densification error") {
    RobotParams p;
    p.knee_torque_max = 16.0;
    JumpScenario s;
    s.mode = JumpMode::Deployed;
    s.stiffness = paper_model();
    // engagement far below the squat flexion: the module would start 50 deg deep
    s.engagement_flexion = deg_to_rad(96.7 - 50.0);
    CHECK_THROWS_AS(simulate_jump(s, p, 1e-4), stiffness::DensificationError);
}

TEST_CASE("calibration hits the published targets") {
    RobotParams p;
    JumpScenario tmpl;
    CalibrationTargets t;  // 373.1 / 371.7 mm
    CalibrationResult cal = calibrate(t, p, tmpl);
    CHECK(std::fabs(cal.achieved_baseline - 0.3731) * 1e3 < 0.5);
    CHECK(std::fabs(cal.achieved_stowed - 0.3717) * 1e3 < 0.5);
    CHECK(cal.params.module_mass > 0.0);
}

TEST_CASE("calibration is a fixed point on its own outputs") {
    RobotParams p;
    JumpScenario tmpl;
    CalibrationTargets t;
    CalibrationResult first = calibrate(t, p, tmpl);

    CalibrationTargets self{first.achieved_baseline, first.achieved_stowed, t.tolerance};
    CalibrationResult second = calibrate(self, first.params, tmpl);
    CHECK(second.params.knee_torque_max ==
          Approx(first.params.knee_torque_max).margin(0.05));
    CHECK(second.params.module_mass == Approx(first.params.module_mass).margin(0.005));
}

TEST_CASE("calibration reports bracket failure with the response curve") {
    RobotParams p;
    JumpScenario tmpl;
    CalibrationTargets t;
    t.stowed_delta_h = 0.380;  // above the baseline target: no mass can achieve it
    CHECK_THROWS_WITH(calibrate(t, p, tmpl), Catch::Contains("response curve"));
}
