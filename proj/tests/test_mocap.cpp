#include <catch2/catch.hpp>
#include <cmath>

#include "dcl/mocap.hpp"
#include "dcl/rng.hpp"
#include "dcl/synthetic.hpp"

using namespace dcl;
using namespace dcl::mocap;

namespace {

std::array<Vec3, 3> reference_triangle() {
    return {{{0.0, 0.0, 0.0}, {100.0, 0.0, 0.0}, {0.0, 80.0, 30.0}}};
}

std::array<Vec3, 3> apply_rigid(const std::array<Vec3, 3>& pts, const Eigen::Matrix3d& r,
                                const Eigen::Vector3d& t) {
    std::array<Vec3, 3> out;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d p(pts[std::size_t(i)].x, pts[std::size_t(i)].y, pts[std::size_t(i)].z);
        Eigen::Vector3d q = r * p + t;
        out[std::size_t(i)] = {q.x(), q.y(), q.z()};
    }
    return out;
}

Eigen::Matrix3d rot_z(double a) {
    Eigen::Matrix3d r;
    r << std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0, 0.0, 1.0;
    return r;
}

}  // namespace

TEST_CASE("solve_pose on identical point sets is the identity") {
    auto ref = reference_triangle();
    RigidBodyPose pose = solve_pose(ref, ref);
    CHECK((pose.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(pose.translation.norm() < 1e-12);
    CHECK(pose.rmsd < 1e-12);
}

TEST_CASE("solve_pose recovers a known rigid transform") {
    auto ref = reference_triangle();
    const Eigen::Matrix3d r = rot_z(kPi / 2.0);
    const Eigen::Vector3d t(10.0, 0.0, 0.0);
    RigidBodyPose pose = solve_pose(ref, apply_rigid(ref, r, t));
    CHECK((pose.rotation - r).norm() < 1e-9);
    CHECK((pose.translation - t).norm() < 1e-9);
    CHECK(pose.rmsd < 1e-9);
    CHECK(pose.rotation.determinant() == Approx(1.0).margin(1e-9));
    CHECK((pose.rotation.transpose() * pose.rotation - Eigen::Matrix3d::Identity()).norm() <
          1e-9);
}

TEST_CASE("solve_pose rmsd under 0.1 mm marker noise stays below 0.3 mm") {
    auto ref = reference_triangle();
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        auto obs = apply_rigid(ref, rot_z(0.3), Eigen::Vector3d(5.0, -2.0, 40.0));
        for (int m = 0; m < 3; ++m) {
            obs[std::size_t(m)].x += 0.1 * gaussian(81, 9 * trial + 3 * std::uint64_t(m));
            obs[std::size_t(m)].y += 0.1 * gaussian(81, 9 * trial + 3 * std::uint64_t(m) + 1);
            obs[std::size_t(m)].z += 0.1 * gaussian(81, 9 * trial + 3 * std::uint64_t(m) + 2);
        }
        CHECK(solve_pose(ref, obs).rmsd <= 0.3);
    }
}

TEST_CASE("solve_pose rejects collinear references") {
    std::array<Vec3, 3> line{{{0, 0, 0}, {50, 0, 0}, {100, 0, 0}}};
    CHECK_THROWS_AS(solve_pose(line, line), ValidationError);
}

TEST_CASE("solve_pose rmsd is invariant under a common rigid pre-transform") {
    auto ref = reference_triangle();
    auto obs = apply_rigid(ref, rot_z(0.8), Eigen::Vector3d(3.0, 7.0, -2.0));
    for (int m = 0; m < 3; ++m) obs[std::size_t(m)].z += 0.4 * (m - 1);  // deform a bit
    const double base_rmsd = solve_pose(ref, obs).rmsd;

    const Eigen::Matrix3d r = rot_z(-1.1);
    const Eigen::Vector3d t(-20.0, 4.0, 11.0);
    const double moved_rmsd = solve_pose(apply_rigid(ref, r, t), apply_rigid(obs, r, t)).rmsd;
    CHECK(moved_rmsd == Approx(base_rmsd).margin(1e-9));
}

TEST_CASE("standard rig carries 15 markers across 5 bodies") {
    const BodyMap bodies = standard_body_map();
    CHECK(bodies.size() == 5);
    SyntheticTrialSpec spec;
    auto frames = generate_trial(spec);
    REQUIRE(!frames.empty());
    for (std::size_t i = 0; i < frames.size(); i += 101)
        CHECK(frames[i].markers.size() == 15);
}

TEST_CASE("static trunk gives a constant height series") {
    SyntheticTrialSpec spec;
    spec.noise_mm = 0.0;
    spec.apex = spec.h_base + 50.0;  // content irrelevant, just keep it valid
    auto frames = generate_trial(spec);
    auto series = trunk_height_series(frames, standard_body_map());
    REQUIRE(series.size() == frames.size());
    // squat hold phase: exactly the configured base height
    for (std::size_t i = 0; i < series.size() && frames[i].t < spec.hold_s - 1e-9; ++i)
        CHECK(series[i].z == Approx(283.1).margin(1e-9));
}

TEST_CASE("noise-free synthetic trajectory is reproduced exactly") {
    SyntheticTrialSpec spec;
    spec.noise_mm = 0.0;
    auto frames = generate_trial(spec);
    auto series = trunk_height_series(frames, standard_body_map());
    for (std::size_t i = 0; i < series.size(); i += 17)
        CHECK(series[i].z == Approx(synthetic_trunk_z(spec, series[i].t)).margin(1e-6));
}

TEST_CASE("missing thigh markers do not disturb the trunk series") {
    SyntheticTrialSpec spec;
    spec.noise_mm = 0.0;
    auto frames = generate_trial(spec);
    auto damaged = frames;
    for (std::size_t i = 10; i < damaged.size(); i += 3)
        damaged[i].markers.erase("thigh_fl_prox");
    auto a = trunk_height_series(frames, standard_body_map());
    auto b = trunk_height_series(damaged, standard_body_map());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].z == b[i].z);
}

TEST_CASE("trunk gaps interpolate up to 5 frames and fail beyond") {
    SyntheticTrialSpec spec;
    spec.noise_mm = 0.0;
    auto frames = generate_trial(spec);

    auto short_gap = frames;
    for (std::size_t i = 40; i < 44; ++i) short_gap[i].markers.erase("trunk_front");
    auto series = trunk_height_series(short_gap, standard_body_map());
    for (std::size_t i = 40; i < 44; ++i) {
        // linear interpolation across the squat plateau is exact
        CHECK(series[i].z == Approx(283.1).margin(1e-9));
    }

    auto long_gap = frames;
    for (std::size_t i = 40; i < 47; ++i) long_gap[i].markers.erase("trunk_left");
    CHECK_THROWS_WITH(trunk_height_series(long_gap, standard_body_map()),
                      Catch::Contains("gap"));

    auto leading_gap = frames;
    leading_gap[0].markers.erase("trunk_right");
    CHECK_THROWS_AS(trunk_height_series(leading_gap, standard_body_map()), ValidationError);

    CHECK_THROWS_AS(trunk_height_series(frames, BodyMap{}), ValidationError);
}

TEST_CASE("trial analysis peak detection") {
    std::vector<HeightSample> dec;
    for (int i = 0; i < 50; ++i) dec.push_back({i / 120.0, 500.0 - 3.0 * i});
    TrialResult r = analyze_trial(dec, 283.1, 5);
    CHECK(r.h_max == 500.0);  // adaptive edge window keeps the first sample raw
    CHECK(r.delta_h == r.h_max - r.h_base);

    std::vector<HeightSample> noisy;
    for (int i = 0; i < 200; ++i)
        noisy.push_back({i / 120.0, 400.0 + 0.5 * ((i * 2654435761u) % 7)});
    TrialResult raw = analyze_trial(noisy, 0.0, 1);
    double true_max = -1e300;
    for (const auto& s : noisy) true_max = std::max(true_max, s.z);
    CHECK(raw.h_max == true_max);  // window 1 is the raw maximum

    CHECK_THROWS_AS(analyze_trial({}, 283.1, 5), ValidationError);
    CHECK_THROWS_AS(analyze_trial(dec, 283.1, 4), ValidationError);
    CHECK_THROWS_AS(analyze_trial(dec, 283.1, -1), ValidationError);
}

TEST_CASE("aggregate statistics mirror the published comparison") {
    std::vector<TrialResult> deployed(5, TrialResult{720.3, 283.1, 437.1});
    TrialStats st = aggregate_trials(deployed, 373.1);
    CHECK(st.mean_delta_h == Approx(437.1).margin(1e-12));
    CHECK(st.std_delta_h == 0.0);
    CHECK(std::fabs(st.delta_percent - 17.1) < 0.06);

    std::vector<TrialResult> stowed(5, TrialResult{654.9, 283.1, 371.7});
    TrialStats st2 = aggregate_trials(stowed, 373.1);
    CHECK(std::fabs(st2.delta_percent - (-0.4)) < 0.06);

    CHECK_THROWS_AS(aggregate_trials({TrialResult{700, 283.1, 416.9}}, 373.1),
                    ValidationError);
}

TEST_CASE("aggregate mean is exactly permutation invariant") {
    std::vector<TrialResult> trials{{0, 0, 373.13}, {0, 0, 371.92}, {0, 0, 374.01},
                                    {0, 0, 372.55}, {0, 0, 373.48}};
    TrialStats a = aggregate_trials(trials, 373.1);
    std::vector<TrialResult> shuffled{trials[3], trials[0], trials[4], trials[2], trials[1]};
    TrialStats b = aggregate_trials(shuffled, 373.1);
    CHECK(a.mean_delta_h == b.mean_delta_h);  // bitwise
    CHECK(a.std_delta_h == b.std_delta_h);
}

TEST_CASE("marker CSV round trip and validation") {
    SyntheticTrialSpec spec;
    spec.tail_s = 0.0;
    spec.hold_s = 0.1;
    auto frames = generate_trial(spec);
    auto back = frames_from_csv(frames_to_csv(frames));
    REQUIRE(back.size() == frames.size());
    for (std::size_t i = 0; i < frames.size(); i += 13) {
        REQUIRE(back[i].markers.size() == frames[i].markers.size());
        for (const auto& [id, p] : frames[i].markers) {
            const Vec3& q = back[i].markers.at(id);
            CHECK(norm(q - p) < 1e-6);
        }
    }

    CHECK_THROWS_AS(frames_from_csv(""), ValidationError);
    CHECK_THROWS_AS(frames_from_csv("time,id,x,y,z\n"), ValidationError);
    CHECK_THROWS_AS(frames_from_csv("t_s,marker_id,x_mm,y_mm,z_mm\n0.1,m1,bad,0,0\n"),
                    ValidationError);
    CHECK_THROWS_AS(
        frames_from_csv("t_s,marker_id,x_mm,y_mm,z_mm\n0.2,m1,0,0,0\n0.1,m1,0,0,0\n"),
        ValidationError);
}

TEST_CASE("end-to-end synthetic pipeline recovers the effective jump height") {
    std::vector<TrialResult> trials;
    for (int trial = 0; trial < 5; ++trial) {
        SyntheticTrialSpec spec;  // apex 656.3, base 283.1, 0.1 mm noise, 240 Hz
        spec.trial_index = trial;
        auto frames = generate_trial(spec);
        auto reread = frames_from_csv(frames_to_csv(frames));
        auto series = trunk_height_series(reread, standard_body_map());
        TrialResult r = analyze_trial(series, spec.h_base, 5);
        CHECK(std::fabs(r.delta_h - spec.true_delta_h()) <= 0.5);
        trials.push_back(r);
    }
    TrialStats st = aggregate_trials(trials, 373.1);
    CHECK(std::fabs(st.mean_delta_h - 373.2) <= 0.5);
    CHECK(st.n_trials == 5);
}

TEST_CASE("analysis is stable under frame-rate reparameterization") {
    SyntheticTrialSpec at240;
    at240.noise_mm = 0.0;
    SyntheticTrialSpec at120 = at240;
    at120.rate_hz = 120.0;

    auto r240 = analyze_trial(trunk_height_series(generate_trial(at240), standard_body_map()),
                              at240.h_base, 9);
    auto r120 = analyze_trial(trunk_height_series(generate_trial(at120), standard_body_map()),
                              at120.h_base, 5);
    // same time-domain smoothing span at both rates
    CHECK(std::fabs(r240.delta_h - r120.delta_h) < 0.3);
}
