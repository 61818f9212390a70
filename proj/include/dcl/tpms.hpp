#pragma once

#include <cmath>
#include <string>

#include "dcl/common.hpp"

namespace dcl::lattice {

enum class TpmsKind { Gyroid, SchwarzPrimitive, Diamond, Lidinoid };

inline const char* to_string(TpmsKind k) {
    switch (k) {
        case TpmsKind::Gyroid: return "gyroid";
        case TpmsKind::SchwarzPrimitive: return "schwarz_primitive";
        case TpmsKind::Diamond: return "diamond";
        case TpmsKind::Lidinoid: return "lidinoid";
    }
    return "?";
}

inline TpmsKind tpms_kind_from_string(const std::string& s) {
    if (s == "gyroid") return TpmsKind::Gyroid;
    if (s == "schwarz_primitive") return TpmsKind::SchwarzPrimitive;
    if (s == "diamond") return TpmsKind::Diamond;
    if (s == "lidinoid") return TpmsKind::Lidinoid;
    throw ValidationError("unknown TPMS kind '" + s +
                          "' (expected gyroid|schwarz_primitive|diamond|lidinoid)");
}

/// Implicit TPMS lattice phase: solid where |g(2*pi*p/cell_size) - level| <= shell_halfwidth.
struct TpmsField {
    TpmsKind kind = TpmsKind::Gyroid;
    double cell_size = 0.008;      // m, period of one unit cell
    double level = 0.0;            // level-set offset t
    double shell_halfwidth = 0.3;  // dimensionless shell half-thickness w

    void validate() const {
        if (!(cell_size > 0.0)) throw ValidationError("TpmsField: cell_size must be > 0");
        if (shell_halfwidth < 0.0)
            throw ValidationError("TpmsField: shell_halfwidth must be >= 0");
    }
};

/// Raw level-set value at normalized coordinates (2*pi-periodic in each axis).
/// Gyroid:            sin x cos y + sin y cos z + sin z cos x
/// Schwarz Primitive: cos x + cos y + cos z
/// Diamond:           sin x sin y sin z + sin x cos y cos z
///                    + cos x sin y cos z + cos x cos y sin z
/// Lidinoid:          0.5 (sin 2x cos y sin z + sin 2y cos z sin x + sin 2z cos x sin y)
///                    - 0.5 (cos 2x cos 2y + cos 2y cos 2z + cos 2z cos 2x) + 0.15
/// The non-gyroid forms are the usual trigonometric level-set approximations from
/// the TPMS literature.
inline double tpms_value(TpmsKind kind, double x, double y, double z) {
    switch (kind) {
        case TpmsKind::Gyroid:
            return std::sin(x) * std::cos(y) + std::sin(y) * std::cos(z) +
                   std::sin(z) * std::cos(x);
        case TpmsKind::SchwarzPrimitive:
            return std::cos(x) + std::cos(y) + std::cos(z);
        case TpmsKind::Diamond:
            return std::sin(x) * std::sin(y) * std::sin(z) +
                   std::sin(x) * std::cos(y) * std::cos(z) +
                   std::cos(x) * std::sin(y) * std::cos(z) +
                   std::cos(x) * std::cos(y) * std::sin(z);
        case TpmsKind::Lidinoid:
            return 0.5 * (std::sin(2 * x) * std::cos(y) * std::sin(z) +
                          std::sin(2 * y) * std::cos(z) * std::sin(x) +
                          std::sin(2 * z) * std::cos(x) * std::sin(y)) -
                   0.5 * (std::cos(2 * x) * std::cos(2 * y) +
                          std::cos(2 * y) * std::cos(2 * z) +
                          std::cos(2 * z) * std::cos(2 * x)) +
                   0.15;
    }
    return 0.0;
}

/// g(2*pi*p/cell_size) - level at a point in meters. Total function.
inline double eval_field(const TpmsField& field, const Vec3& p) {
    const double s = kTwoPi / field.cell_size;
    return tpms_value(field.kind, p.x * s, p.y * s, p.z * s) - field.level;
}

/// Shell signed value: negative inside the solid {|g - t| <= w}.
inline double shell_value(const TpmsField& field, const Vec3& p) {
    return std::fabs(eval_field(field, p)) - field.shell_halfwidth;
}

/// Sector-shaped module region: annulus x wedge x slab, all centered on the z axis
/// with the slab spanning z in [0, thickness]. Realized as a max() of per-part
/// signed functions; sign-correct everywhere, exact distance only near faces.
struct SectorDomain {
    double inner_radius = 0.030;             // m
    double outer_radius = 0.060;             // m
    double angle_start = deg_to_rad(30.0);   // rad
    double angle_end = deg_to_rad(90.0);     // rad
    double thickness = 0.020;                // m

    void validate() const {
        if (!(inner_radius > 0.0 && inner_radius < outer_radius))
            throw ValidationError("SectorDomain: need 0 < inner_radius < outer_radius");
        double span = angle_end - angle_start;
        if (!(span > 0.0 && span < kTwoPi))
            throw ValidationError("SectorDomain: need 0 < angular span < 2*pi");
        if (!(thickness > 0.0)) throw ValidationError("SectorDomain: thickness must be > 0");
    }

    double signed_distance(const Vec3& p) const {
        const double r = std::hypot(p.x, p.y);
        const double annulus = std::max(inner_radius - r, r - outer_radius);
        // wedge as two half-planes; intersection below pi span, union above
        const double ha = std::sin(angle_start) * p.x - std::cos(angle_start) * p.y;
        const double hb = -std::sin(angle_end) * p.x + std::cos(angle_end) * p.y;
        const double span = angle_end - angle_start;
        const double wedge = span <= kPi ? std::max(ha, hb) : std::min(ha, hb);
        const double slab = std::max(-p.z, p.z - thickness);
        return std::max({annulus, wedge, slab});
    }

    bool contains(const Vec3& p) const { return signed_distance(p) <= 0.0; }

    Aabb aabb() const {
        return {{-outer_radius, -outer_radius, 0.0}, {outer_radius, outer_radius, thickness}};
    }
};

/// Axis-aligned box domain. Mainly a test/oracle vehicle (e.g. one full unit cell).
struct BoxDomain {
    Aabb box;

    void validate() const {
        Vec3 e = box.extent();
        if (!(e.x > 0.0 && e.y > 0.0 && e.z > 0.0))
            throw ValidationError("BoxDomain: empty box");
    }

    double signed_distance(const Vec3& p) const {
        double d = box.lo.x - p.x;
        d = std::max(d, p.x - box.hi.x);
        d = std::max(d, box.lo.y - p.y);
        d = std::max(d, p.y - box.hi.y);
        d = std::max(d, box.lo.z - p.z);
        d = std::max(d, p.z - box.hi.z);
        return d;
    }

    bool contains(const Vec3& p) const { return signed_distance(p) <= 0.0; }

    Aabb aabb() const { return box; }
};

}  // namespace dcl::lattice
