#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace reachcloud {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Truncated-cone geometry of the manipulator. All lengths are in units of
/// the undeformed length, i.e. length == 1 for normalized computations; the
/// CLI rescales on output. Radii are the values at Z = 0, the outer radius
/// decays linearly with the taper angle and the inner radius follows
/// proportionally.
struct TaperedGeometry {
    double length = 1.0;
    double outer_radius = 1.0 / 16.0;   // R2 at Z = 0
    double inner_radius = 3.0 / 64.0;   // R1 at Z = 0
    double taper_angle = 0.0;           // radians

    /// Normalized taper profile f(Z) with R2(Z) = R2(0) * f(Z).
    double taper_fraction(double z) const {
        return 1.0 - z * std::tan(taper_angle) / outer_radius;
    }
};

struct TaperRadii {
    double inner;     // R1(Z)
    double outer;     // R2(Z)
    double fraction;  // f(Z)
};

/// Radii at height Z. Throws std::domain_error outside [0, L].
inline TaperRadii taper_radii(const TaperedGeometry& g, double z) {
    if (!(z >= 0.0 && z <= g.length)) {
        throw std::domain_error("taper_radii: Z outside [0, L]");
    }
    const double f = g.taper_fraction(z);
    return {g.inner_radius * f, g.outer_radius * f, f};
}

/// One family of helically wound fiber bundles. The helical angle is the
/// (signed) angle of the fiber against the longitudinal direction, measured
/// at the outer radius; zero means a straight longitudinal fiber. A family
/// holds `bundle_count` independently activated bundles, equally spaced in
/// the cross-sectional polar angle starting at `angular_offset`, each
/// spanning `angular_extent`.
struct FiberArchitecture {
    double helical_angle = 0.0;   // radians, signed
    double angular_extent = 0.0;  // radians
    double angular_offset = 0.0;  // radians
    int bundle_count = 1;
};

struct ManipulatorDesign {
    TaperedGeometry geometry;
    double poisson_ratio = 0.5;
    std::vector<FiberArchitecture> architectures;

    int total_bundles() const {
        int n = 0;
        for (const auto& a : architectures) n += a.bundle_count;
        return n;
    }
};

/// Per-bundle activation values, grouped per architecture. Values are
/// dimensionless; contraction is negative.
struct ActivationState {
    std::vector<std::vector<double>> gamma;

    static ActivationState zeros(const ManipulatorDesign& d) {
        ActivationState s;
        s.gamma.reserve(d.architectures.size());
        for (const auto& a : d.architectures) {
            s.gamma.emplace_back(static_cast<std::size_t>(a.bundle_count), 0.0);
        }
        return s;
    }

    /// Unpacks a flat vector ordered architecture-major.
    static ActivationState from_flat(const ManipulatorDesign& d, std::span<const double> flat) {
        if (static_cast<int>(flat.size()) != d.total_bundles()) {
            throw std::invalid_argument("ActivationState::from_flat: size mismatch");
        }
        ActivationState s;
        std::size_t k = 0;
        for (const auto& a : d.architectures) {
            auto& v = s.gamma.emplace_back();
            for (int j = 0; j < a.bundle_count; ++j) v.push_back(flat[k++]);
        }
        return s;
    }

    std::vector<double> to_flat() const {
        std::vector<double> flat;
        for (const auto& v : gamma) flat.insert(flat.end(), v.begin(), v.end());
        return flat;
    }

    bool matches(const ManipulatorDesign& d) const {
        if (gamma.size() != d.architectures.size()) return false;
        for (std::size_t i = 0; i < gamma.size(); ++i) {
            if (static_cast<int>(gamma[i].size()) != d.architectures[i].bundle_count) return false;
        }
        return true;
    }
};

struct Violation {
    std::string field;
    std::string constraint;
};

/// Checks every structural invariant of a design. Violations are data, not
/// errors; an empty result means the design is admissible.
inline std::vector<Violation> validate_design(const ManipulatorDesign& d) {
    std::vector<Violation> v;
    const auto& g = d.geometry;
    if (!(g.length > 0.0)) v.push_back({"geometry.length", "must be positive"});
    if (!(g.inner_radius > 0.0)) v.push_back({"geometry.inner_radius", "must be positive"});
    if (!(g.inner_radius < g.outer_radius)) {
        v.push_back({"geometry.inner_radius", "must be smaller than outer_radius"});
    }
    if (!(g.outer_radius < g.length)) {
        v.push_back({"geometry.outer_radius", "must be smaller than length (slenderness)"});
    }
    if (!(g.taper_angle >= 0.0)) v.push_back({"geometry.taper_angle", "must be nonnegative"});
    if (!(g.length * std::tan(g.taper_angle) < g.outer_radius)) {
        v.push_back({"geometry.taper_angle", "tip radius nonpositive: L*tan(phi) must stay below R2(0)"});
    }
    if (!(d.poisson_ratio > 0.0 && d.poisson_ratio <= 0.5)) {
        v.push_back({"poisson_ratio", "must be in (0, 0.5]"});
    }
    if (d.architectures.empty()) {
        v.push_back({"architectures", "at least one fiber architecture required"});
    }
    for (std::size_t i = 0; i < d.architectures.size(); ++i) {
        const auto& a = d.architectures[i];
        const std::string base = "architectures[" + std::to_string(i) + "].";
        if (!(std::abs(a.helical_angle) < kPi / 2.0)) {
            v.push_back({base + "helical_angle", "must satisfy |alpha| < pi/2"});
        }
        if (!(a.angular_extent > 0.0)) {
            v.push_back({base + "angular_extent", "must be positive"});
        }
        if (a.bundle_count < 1) {
            v.push_back({base + "bundle_count", "must be >= 1"});
        }
        if (!(a.bundle_count * a.angular_extent <= 2.0 * kPi + 1e-12)) {
            v.push_back({base + "angular_extent", "bundles overlap: n*sigma must not exceed 2*pi"});
        }
    }
    if (d.total_bundles() < 1) {
        v.push_back({"architectures", "total bundle count must be >= 1"});
    }
    return v;
}

/// Thrown when an operation requires an admissible design and gets one that
/// fails validate_design.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::vector<Violation>& violations)
        : std::runtime_error(format(violations)), violations_(violations) {}

    const std::vector<Violation>& violations() const { return violations_; }

  private:
    static std::string format(const std::vector<Violation>& vs) {
        std::string msg = "design validation failed:";
        for (const auto& v : vs) msg += "\n  " + v.field + ": " + v.constraint;
        return msg;
    }
    std::vector<Violation> violations_;
};

inline void require_valid(const ManipulatorDesign& d) {
    auto v = validate_design(d);
    if (!v.empty()) throw ValidationError(v);
}

}  // namespace reachcloud
