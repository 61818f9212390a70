#pragma once

#include <cstdint>
#include <vector>

#include "dcl/common.hpp"
#include "dcl/parallel.hpp"
#include "dcl/rng.hpp"
#include "dcl/tpms.hpp"

namespace dcl::lattice {

inline constexpr std::uint64_t kDefaultSampleSeed = 0x5c73a9u;

/// Solid volume fraction of a lattice phase inside a domain.
///
/// Stratified jittered sampling: one point per stratum of an n^3 grid over the
/// domain AABB, jitter drawn from a counter-based hash of (seed, stratum), so the
/// estimate is bit-reproducible for a fixed seed and independent of worker count.
/// Returns (#solid & in-domain) / (#in-domain).
template <typename Domain>
double volume_fraction(const TpmsField& field, const Domain& domain, int samples_per_axis,
                       std::uint64_t seed = kDefaultSampleSeed) {
    field.validate();
    domain.validate();
    if (samples_per_axis < 8)
        throw ValidationError("volume_fraction: samples_per_axis must be >= 8");

    const Aabb box = domain.aabb();
    const Vec3 lo = box.lo;
    const Vec3 step = box.extent() / double(samples_per_axis);
    const std::size_t n = std::size_t(samples_per_axis);
    const std::size_t n_slabs = n;

    std::vector<std::uint64_t> in_domain(n_slabs, 0), solid(n_slabs, 0);
    parallel_chunks(n_slabs, 1, [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            std::uint64_t in_count = 0, solid_count = 0;
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i < n; ++i) {
                    const std::uint64_t stratum = (k * n + j) * n + i;
                    const Vec3 p{lo.x + step.x * (double(i) + uniform01(seed, 3 * stratum)),
                                 lo.y + step.y * (double(j) + uniform01(seed, 3 * stratum + 1)),
                                 lo.z + step.z * (double(k) + uniform01(seed, 3 * stratum + 2))};
                    if (!domain.contains(p)) continue;
                    ++in_count;
                    if (shell_value(field, p) <= 0.0) ++solid_count;
                }
            }
            in_domain[k] = in_count;
            solid[k] = solid_count;
        }
    });

    std::uint64_t in_total = 0, solid_total = 0;
    for (std::size_t k = 0; k < n_slabs; ++k) {
        in_total += in_domain[k];
        solid_total += solid[k];
    }
    if (in_total == 0) throw ValidationError("volume_fraction: no sample fell inside the domain");
    return double(solid_total) / double(in_total);
}

/// Inverse design: shell halfwidth w with volume_fraction(w) = target_density +- 0.005.
/// Bisection on the monotone map w -> fraction. `field` supplies kind/cell_size/level;
/// its own shell_halfwidth is ignored.
template <typename Domain>
double solve_level_for_density(const TpmsField& field, double target_density,
                               const Domain& domain, int samples_per_axis = 48,
                               std::uint64_t seed = kDefaultSampleSeed) {
    if (!(target_density > 0.0 && target_density < 1.0))
        throw ValidationError("solve_level_for_density: target density must be in (0, 1)");

    TpmsField f = field;
    auto frac_at = [&](double w) {
        f.shell_halfwidth = w;
        return volume_fraction(f, domain, samples_per_axis, seed);
    };

    // |g - t| never exceeds max|g| + |t|; 4.0 + |t| saturates every supported kind
    // (schwarz primitive has the widest range, +-3)
    double w_lo = 0.0, w_hi = 4.0 + std::fabs(field.level);
    if (target_density > frac_at(w_hi))
        throw ValidationError("solve_level_for_density: target above saturation fraction");

    // narrow onto the crossing; among bracket midpoints inside the tolerance
    // keep the last one, which is the closest to the true crossing width
    const double tol = 0.005;
    double best = -1.0;
    for (int step = 0; step < 60; ++step) {
        const double w_mid = 0.5 * (w_lo + w_hi);
        const double f_mid = frac_at(w_mid);
        if (std::fabs(f_mid - target_density) <= tol) best = w_mid;
        (f_mid < target_density ? w_lo : w_hi) = w_mid;
        if (w_hi - w_lo < 1e-6 && best >= 0.0) break;
    }
    if (best < 0.0)
        throw ValidationError(
            "solve_level_for_density: no convergence after 60 bisection steps");
    return best;
}

}  // namespace dcl::lattice
