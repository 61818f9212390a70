#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dcl/common.hpp"
#include "dcl/constants.hpp"
#include "dcl/io.hpp"
#include "dcl/rng.hpp"

namespace dcl::stiffness {

/// One torque-angle characterization point (compression angle in rad, torque in N*m).
struct TorqueAngleSample {
    double theta = 0.0;
    double torque = 0.0;
};

class DensificationError : public ValidationError {
public:
    explicit DensificationError(const std::string& what) : ValidationError(what) {}
};

/// Identified cubic torque law tau(theta) = a0 + a1*theta + a2*theta^2 + a3*theta^3
/// with its region bounds. Valid models are non-negative and non-decreasing up to
/// safety_max; torque queries beyond safety_max refuse to extrapolate into
/// densification.
struct StiffnessModel {
    std::array<double, 4> alpha{0.0, 0.0, 0.0, 0.0};  // N*m / rad^k
    double operating_max = deg_to_rad(reference::kOperatingMax_deg);
    double safety_max = deg_to_rad(reference::kDesignLimit_deg);
    double r_squared = 0.0;

    double poly(double theta) const {
        return ((alpha[3] * theta + alpha[2]) * theta + alpha[1]) * theta + alpha[0];
    }
    double poly_derivative(double theta) const {
        return (3.0 * alpha[3] * theta + 2.0 * alpha[2]) * theta + alpha[1];
    }

    void validate() const {
        if (!(operating_max > 0.0 && operating_max < safety_max))
            throw ValidationError("StiffnessModel: need 0 < operating_max < safety_max");
        if (!(r_squared >= 0.0 && r_squared <= 1.0))
            throw ValidationError("StiffnessModel: r_squared out of [0,1]");
    }
};

/// Engaged torque: polynomial clamped at zero (contact cannot pull). Stowed
/// modules transmit exactly zero torque at any angle. Past safety_max the model
/// has no validity and the call refuses with a densification error.
inline double torque_at(const StiffnessModel& model, double theta, bool deployed) {
    if (theta < 0.0) throw ValidationError("torque_at: theta must be >= 0");
    if (!deployed) return 0.0;
    if (theta > model.safety_max) {
        std::ostringstream ss;
        ss << "densification region entered: theta = " << rad_to_deg(theta)
           << " deg exceeds design limit " << rad_to_deg(model.safety_max) << " deg";
        throw DensificationError(ss.str());
    }
    return std::max(0.0, model.poly(theta));
}

/// Closed-form elastic energy integral of the cubic law on [0, theta].
inline double stored_energy(const StiffnessModel& model, double theta) {
    if (theta < 0.0 || theta > model.safety_max)
        throw ValidationError("stored_energy: theta outside [0, safety_max]");
    const double t2 = theta * theta;
    return model.alpha[3] * t2 * t2 / 4.0 + model.alpha[2] * t2 * theta / 3.0 +
           model.alpha[1] * t2 / 2.0 + model.alpha[0] * theta;
}

// ---------------------------------------------------------------------------
// Surrogate characterization data
//
// Stand-in for the external FEA sweep: a monotone cubic through the published
// anchors (zero torque at zero compression, peak torque at the operating-region
// end) with exponential stiffening past the densification onset and optional
// zero-mean Gaussian noise. All sampled values are reproducible from the seed.
// ---------------------------------------------------------------------------

struct SurrogateSpec {
    double peak_torque = reference::kModulePeakTorque_nm;               // N*m at operating_max
    double operating_max = deg_to_rad(reference::kOperatingMax_deg);    // rad
    double densification_onset = deg_to_rad(reference::kDesignLimit_deg);  // rad
    double max_theta = deg_to_rad(reference::kSweepEnd_deg);            // rad, end of the sweep
    double cubic_share = 0.05;    // fraction of the peak carried by the theta^3 term
    double stiffening_rate = 30.0;  // 1/rad, exponential growth past onset
    double noise_sigma_frac = 0.02; // sigma as a fraction of peak_torque; 0 = noise off
    int n_samples = 200;
    std::uint64_t seed = 7;

    void validate() const {
        if (!(peak_torque > 0.0)) throw ValidationError("surrogate: peak_torque must be > 0");
        if (!(operating_max > 0.0 && operating_max < densification_onset &&
              densification_onset <= max_theta))
            throw ValidationError(
                "surrogate: need 0 < operating_max < densification_onset <= max_theta");
        if (!(cubic_share >= 0.0 && cubic_share <= 1.0))
            throw ValidationError("surrogate: cubic_share must be in [0,1]");
        if (n_samples < 2) throw ValidationError("surrogate: n_samples must be >= 2");
    }
};

/// Noise-free surrogate torque curve.
inline double surrogate_torque(const SurrogateSpec& s, double theta) {
    const double a = (1.0 - s.cubic_share) * s.peak_torque / s.operating_max;
    const double b = s.cubic_share * s.peak_torque /
                     (s.operating_max * s.operating_max * s.operating_max);
    if (theta <= s.densification_onset) return a * theta + b * theta * theta * theta;
    const double o = s.densification_onset;
    const double slope_o = a + 3.0 * b * o * o;
    const double k = s.stiffening_rate;
    return a * o + b * o * o * o + slope_o * (std::exp(k * (theta - o)) - 1.0) / k;
}

inline std::vector<TorqueAngleSample> generate_surrogate_fea(const SurrogateSpec& spec) {
    spec.validate();
    const double sigma = spec.noise_sigma_frac * spec.peak_torque;
    std::vector<TorqueAngleSample> out;
    out.reserve(spec.n_samples);
    for (int i = 0; i < spec.n_samples; ++i) {
        const double theta = spec.max_theta * double(i) / double(spec.n_samples - 1);
        double tau = surrogate_torque(spec, theta);
        if (sigma > 0.0) tau += sigma * gaussian(spec.seed, std::uint64_t(i));
        out.push_back({theta, std::max(0.0, tau)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Identification
// ---------------------------------------------------------------------------

namespace detail {

/// Least squares min ||A x - b|| via Householder QR, A is n x 4 row-major.
inline std::array<double, 4> solve_least_squares_4(std::vector<double>& A,
                                                   std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t j = 0; j < 4; ++j) {
        double sigma = 0.0;
        for (std::size_t i = j; i < n; ++i) sigma += A[i * 4 + j] * A[i * 4 + j];
        sigma = std::sqrt(sigma);
        if (sigma < 1e-13)
            throw ValidationError("fit: rank-deficient design matrix (column " +
                                  std::to_string(j) + ")");
        if (A[j * 4 + j] < 0.0) sigma = -sigma;
        std::vector<double> w(n - j);
        w[0] = A[j * 4 + j] + sigma;
        for (std::size_t i = j + 1; i < n; ++i) w[i - j] = A[i * 4 + j];
        double wtw = 0.0;
        for (double v : w) wtw += v * v;
        for (std::size_t c = j; c < 4; ++c) {
            double s = 0.0;
            for (std::size_t i = j; i < n; ++i) s += w[i - j] * A[i * 4 + c];
            const double f = 2.0 * s / wtw;
            for (std::size_t i = j; i < n; ++i) A[i * 4 + c] -= f * w[i - j];
        }
        double s = 0.0;
        for (std::size_t i = j; i < n; ++i) s += w[i - j] * b[i];
        const double f = 2.0 * s / wtw;
        for (std::size_t i = j; i < n; ++i) b[i] -= f * w[i - j];
    }
    std::array<double, 4> x{};
    for (int j = 3; j >= 0; --j) {
        double s = b[std::size_t(j)];
        for (int c = j + 1; c < 4; ++c) s -= A[std::size_t(j) * 4 + c] * x[std::size_t(c)];
        x[std::size_t(j)] = s / A[std::size_t(j) * 4 + j];
    }
    return x;
}

}  // namespace detail

/// Densification onset: the smallest angle where local secant stiffness exceeds
/// 3x the mean secant stiffness of the operating region. Secants are taken over
/// a stride of samples to keep the detector usable on noisy sweeps. Returns the
/// largest sample angle when the threshold is never crossed.
inline double detect_densification_onset(std::vector<TorqueAngleSample> samples,
                                         double operating_max) {
    if (samples.size() < 4)
        throw ValidationError("detect_densification_onset: need at least 4 samples");
    std::sort(samples.begin(), samples.end(),
              [](const auto& a, const auto& b) { return a.theta < b.theta; });
    const std::size_t stride = std::max<std::size_t>(1, samples.size() / 32);

    double mean_secant = 0.0;
    std::size_t n_op = 0;
    for (std::size_t i = 0; i + stride < samples.size(); ++i) {
        const auto& a = samples[i];
        const auto& b = samples[i + stride];
        if (b.theta > operating_max || b.theta <= a.theta) continue;
        mean_secant += (b.torque - a.torque) / (b.theta - a.theta);
        ++n_op;
    }
    if (n_op == 0)
        throw ValidationError("detect_densification_onset: no secant inside operating region");
    mean_secant /= double(n_op);

    for (std::size_t i = 0; i + stride < samples.size(); ++i) {
        const auto& a = samples[i];
        const auto& b = samples[i + stride];
        if (a.theta < operating_max || b.theta <= a.theta) continue;
        const double secant = (b.torque - a.torque) / (b.theta - a.theta);
        if (secant > 3.0 * mean_secant) return a.theta;
    }
    return samples.back().theta;
}

/// Least-squares cubic restricted to theta <= operating_max. R^2 is reported on
/// the same restricted domain. safety_max comes from the caller (e.g. a design
/// limit) or, when absent, from densification detection on the sweep itself.
/// Fits that are not monotone non-decreasing over the operating region are
/// rejected.
inline StiffnessModel fit_operating_region(const std::vector<TorqueAngleSample>& samples,
                                           double operating_max,
                                           std::optional<double> safety_max = std::nullopt) {
    std::vector<TorqueAngleSample> region;
    for (const auto& s : samples)
        if (s.theta <= operating_max) region.push_back(s);
    if (region.size() < 8)
        throw ValidationError("fit_operating_region: need >= 8 samples inside the region, got " +
                              std::to_string(region.size()));

    std::vector<double> A(region.size() * 4), b(region.size());
    for (std::size_t i = 0; i < region.size(); ++i) {
        const double t = region[i].theta;
        A[i * 4 + 0] = 1.0;
        A[i * 4 + 1] = t;
        A[i * 4 + 2] = t * t;
        A[i * 4 + 3] = t * t * t;
        b[i] = region[i].torque;
    }
    StiffnessModel model;
    model.alpha = detail::solve_least_squares_4(A, b);
    model.operating_max = operating_max;

    if (safety_max) {
        model.safety_max = *safety_max;
    } else {
        const double detected = detect_densification_onset(samples, operating_max);
        if (detected <= operating_max)
            throw ValidationError(
                "fit_operating_region: no densification onset beyond the operating region; "
                "pass safety_max explicitly");
        model.safety_max = detected;
    }

    // R^2 over the restricted domain
    double mean = 0.0;
    for (const auto& s : region) mean += s.torque;
    mean /= double(region.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& s : region) {
        const double r = s.torque - model.poly(s.theta);
        ss_res += r * r;
        ss_tot += (s.torque - mean) * (s.torque - mean);
    }
    if (ss_tot < 1e-24)
        model.r_squared = ss_res < 1e-24 ? 1.0 : 0.0;
    else
        model.r_squared = std::min(1.0, std::max(0.0, 1.0 - ss_res / ss_tot));

    // monotonicity over the fit region, with slack for roundoff
    double scale = std::max(1.0, std::fabs(model.poly(operating_max)));
    for (int i = 0; i <= 512; ++i) {
        const double t = operating_max * double(i) / 512.0;
        if (model.poly_derivative(t) < -1e-9 * scale) {
            std::ostringstream ss;
            ss << "fit_operating_region: fitted law not monotone at theta = "
               << rad_to_deg(t) << " deg (dtau/dtheta = " << model.poly_derivative(t) << ")";
            throw ValidationError(ss.str());
        }
    }
    model.validate();
    return model;
}

// ---------------------------------------------------------------------------
// File formats: CSV samples `theta_deg,torque_nm`, one sample per row
// ---------------------------------------------------------------------------

inline std::vector<TorqueAngleSample> samples_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("stiffness CSV: empty input");
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "theta_deg" || header[1] != "torque_nm")
        throw ValidationError("stiffness CSV: expected header 'theta_deg,torque_nm'");
    std::vector<TorqueAngleSample> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() < 2)
            throw ValidationError("stiffness CSV: bad row at line " + std::to_string(line_no));
        try {
            out.push_back({deg_to_rad(std::stod(f[0])), std::stod(f[1])});
        } catch (const std::exception&) {
            throw ValidationError("stiffness CSV: unparsable number at line " +
                                  std::to_string(line_no));
        }
    }
    return out;
}

inline std::string samples_to_csv(const std::vector<TorqueAngleSample>& samples) {
    std::ostringstream out;
    out << "theta_deg,torque_nm\n";
    out.precision(12);
    for (const auto& s : samples) out << rad_to_deg(s.theta) << "," << s.torque << "\n";
    return out.str();
}

}  // namespace dcl::stiffness
