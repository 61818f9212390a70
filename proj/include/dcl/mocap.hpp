#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dcl/common.hpp"
#include "dcl/io.hpp"
#include "dcl/jump.hpp"

namespace dcl::mocap {

// Millimeters and seconds end to end; z is vertical.

/// One capture frame: marker positions by id plus the rig's body map
/// (each tracked segment is a rigid triple of markers).
struct MarkerFrame {
    double t = 0.0;
    std::map<std::string, Vec3> markers;
};

using BodyMap = std::map<std::string, std::array<std::string, 3>>;

struct RigidBodyPose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    double rmsd = 0.0;  // mm
};

/// Kabsch / least-squares rigid registration of an observed marker triple onto
/// its reference triple: argmin_{R,t} sum |R*ref_i + t - obs_i|^2 with the
/// reflection branch excluded by determinant correction.
inline RigidBodyPose solve_pose(const std::array<Vec3, 3>& reference,
                                const std::array<Vec3, 3>& observed) {
    const Vec3 e1 = reference[1] - reference[0];
    const Vec3 e2 = reference[2] - reference[0];
    if (0.5 * norm(cross(e1, e2)) <= 1e-6)
        throw ValidationError("solve_pose: reference markers are collinear");

    Eigen::Vector3d rc = Eigen::Vector3d::Zero(), oc = Eigen::Vector3d::Zero();
    auto to_eigen = [](const Vec3& v) { return Eigen::Vector3d(v.x, v.y, v.z); };
    for (int i = 0; i < 3; ++i) {
        rc += to_eigen(reference[std::size_t(i)]);
        oc += to_eigen(observed[std::size_t(i)]);
    }
    rc /= 3.0;
    oc /= 3.0;

    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i)
        h += (to_eigen(reference[std::size_t(i)]) - rc) *
             (to_eigen(observed[std::size_t(i)]) - oc).transpose();

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;

    RigidBodyPose pose;
    pose.rotation = svd.matrixV() * d * svd.matrixU().transpose();
    pose.translation = oc - pose.rotation * rc;

    double ss = 0.0;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d r =
            pose.rotation * to_eigen(reference[std::size_t(i)]) + pose.translation -
            to_eigen(observed[std::size_t(i)]);
        ss += r.squaredNorm();
    }
    pose.rmsd = std::sqrt(ss / 3.0);
    return pose;
}

struct HeightSample {
    double t = 0.0;  // s
    double z = 0.0;  // mm
};

namespace detail {

inline std::optional<std::array<Vec3, 3>> body_markers(const MarkerFrame& frame,
                                                       const std::array<std::string, 3>& ids) {
    std::array<Vec3, 3> pts;
    for (int i = 0; i < 3; ++i) {
        auto it = frame.markers.find(ids[std::size_t(i)]);
        if (it == frame.markers.end()) return std::nullopt;
        pts[std::size_t(i)] = it->second;
    }
    return pts;
}

}  // namespace detail

/// Trunk height per frame, from the trunk rigid body's resolved translation.
/// The reference geometry is the first complete observation of the body,
/// centered at its centroid, so the pose translation is the marker-centroid
/// position in capture coordinates. Frames with missing trunk markers are
/// linearly interpolated up to `max_gap` consecutive frames; longer gaps (or
/// gaps touching either end) are unresolvable.
inline std::vector<HeightSample> trunk_height_series(const std::vector<MarkerFrame>& frames,
                                                     const BodyMap& bodies,
                                                     const std::string& trunk_body = "trunk",
                                                     int max_gap = 5) {
    auto body_it = bodies.find(trunk_body);
    if (body_it == bodies.end())
        throw ValidationError("trunk_height_series: body map has no '" + trunk_body + "'");
    if (frames.empty()) throw ValidationError("trunk_height_series: no frames");
    const auto& ids = body_it->second;

    std::optional<std::array<Vec3, 3>> reference;
    for (const auto& f : frames) {
        if (auto pts = detail::body_markers(f, ids)) {
            Vec3 c = ((*pts)[0] + (*pts)[1] + (*pts)[2]) / 3.0;
            reference = std::array<Vec3, 3>{(*pts)[0] - c, (*pts)[1] - c, (*pts)[2] - c};
            break;
        }
    }
    if (!reference)
        throw ValidationError("trunk_height_series: trunk body never fully visible");

    std::vector<HeightSample> series(frames.size());
    std::vector<bool> resolved(frames.size(), false);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        series[i].t = frames[i].t;
        if (auto pts = detail::body_markers(frames[i], ids)) {
            series[i].z = solve_pose(*reference, *pts).translation.z();
            resolved[i] = true;
        }
    }

    // close gaps by linear interpolation in time
    std::size_t i = 0;
    while (i < frames.size()) {
        if (resolved[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < frames.size() && !resolved[j]) ++j;
        const std::size_t gap = j - i;
        if (i == 0 || j == frames.size() || gap > std::size_t(max_gap)) {
            std::ostringstream ss;
            ss << "trunk_height_series: unresolvable gap of " << gap
               << " frame(s) starting at t = " << frames[i].t << " s";
            throw ValidationError(ss.str());
        }
        const HeightSample& a = series[i - 1];
        const HeightSample& b = series[j];
        for (std::size_t k = i; k < j; ++k) {
            const double u = (series[k].t - a.t) / (b.t - a.t);
            series[k].z = a.z + u * (b.z - a.z);
        }
        i = j;
    }
    return series;
}

struct TrialResult {
    double h_max = 0.0;    // mm
    double h_base = 0.0;   // mm
    double delta_h = 0.0;  // mm, h_max - h_base
};

/// Peak detection on a moving-average-smoothed series. The window is centered
/// and shrinks symmetrically near the ends (half-width min(w/2, i, n-1-i)), so
/// window = 1 reproduces the raw series exactly.
inline TrialResult analyze_trial(const std::vector<HeightSample>& series, double h_base,
                                 int smoothing_window = 5) {
    if (series.empty()) throw ValidationError("analyze_trial: empty series");
    if (smoothing_window < 1 || smoothing_window % 2 == 0)
        throw ValidationError("analyze_trial: smoothing window must be a positive odd count");
    const std::size_t n = series.size();
    const long r_max = (smoothing_window - 1) / 2;
    double h_max = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
        const long r = std::min<long>({r_max, long(i), long(n - 1 - i)});
        double acc = 0.0;
        for (long k = -r; k <= r; ++k) acc += series[std::size_t(long(i) + k)].z;
        h_max = std::max(h_max, acc / double(2 * r + 1));
    }
    TrialResult res;
    res.h_max = h_max;
    res.h_base = h_base;
    res.delta_h = h_max - h_base;
    return res;
}

struct TrialStats {
    double mean_delta_h = 0.0;  // mm
    double std_delta_h = 0.0;   // mm, sample standard deviation (N-1)
    double delta_percent = 0.0; // vs. baseline mean
    std::size_t n_trials = 0;
};

/// Mean/σ of per-trial effective jump heights plus the relative change against a
/// baseline mean. Values are summed in sorted order so the result is exactly
/// permutation-invariant.
inline TrialStats aggregate_trials(const std::vector<TrialResult>& trials,
                                   double baseline_mean) {
    if (trials.size() < 2) throw ValidationError("aggregate_trials: need >= 2 trials");
    std::vector<double> dh;
    dh.reserve(trials.size());
    for (const auto& t : trials) dh.push_back(t.delta_h);
    std::sort(dh.begin(), dh.end());

    TrialStats st;
    st.n_trials = trials.size();
    double acc = 0.0;
    for (double v : dh) acc += v;
    st.mean_delta_h = acc / double(dh.size());
    double ss = 0.0;
    for (double v : dh) ss += (v - st.mean_delta_h) * (v - st.mean_delta_h);
    st.std_delta_h = std::sqrt(ss / double(dh.size() - 1));
    st.delta_percent = dynamics::relative_change(st.mean_delta_h, baseline_mean);
    return st;
}

// ---------------------------------------------------------------------------
// Marker CSV: long format `t_s,marker_id,x_mm,y_mm,z_mm`, one marker per row.
// Rows sharing a timestamp form one frame; a marker missing from a frame is
// simply absent.
// ---------------------------------------------------------------------------

inline std::vector<MarkerFrame> frames_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("marker CSV: empty input");
    auto header = split_csv_line(line);
    if (header.size() < 5 || header[0] != "t_s" || header[1] != "marker_id" ||
        header[2] != "x_mm" || header[3] != "y_mm" || header[4] != "z_mm")
        throw ValidationError("marker CSV: expected header 't_s,marker_id,x_mm,y_mm,z_mm'");

    std::vector<MarkerFrame> frames;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() < 5)
            throw ValidationError("marker CSV: bad row at line " + std::to_string(line_no));
        double t, x, y, z;
        try {
            t = std::stod(f[0]);
            x = std::stod(f[2]);
            y = std::stod(f[3]);
            z = std::stod(f[4]);
        } catch (const std::exception&) {
            throw ValidationError("marker CSV: unparsable number at line " +
                                  std::to_string(line_no));
        }
        if (frames.empty() || frames.back().t != t) {
            if (!frames.empty() && t < frames.back().t)
                throw ValidationError("marker CSV: timestamps must be non-decreasing (line " +
                                      std::to_string(line_no) + ")");
            frames.push_back({t, {}});
        }
        frames.back().markers[f[1]] = {x, y, z};
    }
    return frames;
}

inline std::string frames_to_csv(const std::vector<MarkerFrame>& frames) {
    std::ostringstream out;
    out << "t_s,marker_id,x_mm,y_mm,z_mm\n";
    out.precision(10);
    for (const auto& fr : frames)
        for (const auto& [id, p] : fr.markers)
            out << fr.t << "," << id << "," << p.x << "," << p.y << "," << p.z << "\n";
    return out.str();
}

}  // namespace dcl::mocap
