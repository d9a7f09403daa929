#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Geometry>

#include "reachcloud/fields.hpp"

namespace reachcloud {

using Quat = Eigen::Quaterniond;

/// Discretized deformed state of the rod: centerline points, director frames
/// as unit quaternions, and the local fields at every station. Station 0 is
/// the clamped base: r(0) = 0, frame(0) = identity (d1 = x, d2 = y, d3 = z).
struct RodConfiguration {
    std::vector<double> z_grid;
    std::vector<Vec3> centerline;
    std::vector<Quat> frames;
    std::vector<LocalFields> fields;

    /// Geometric arclength of the reconstructed centerline. Uses cubic
    /// Hermite segments with the exact tangents zeta*d3 and 3-point
    /// Gauss-Legendre per segment, so the estimate converges at high order.
    double arclength() const;
};

namespace detail {

/// Per-design evaluation tables on the half-step grid Z_j = j*h/2. Field
/// evaluation per activation sample reduces to a few multiply-adds per
/// architecture, and the same code path serves both the cloud engine and the
/// public integrator so re-integration is bit-identical.
class FieldTable {
  public:
    FieldTable(const ManipulatorDesign& d, int steps) : steps_(steps), arch_count_(0) {
        if (steps < 2) throw std::invalid_argument("integrate: steps must be >= 2");
        require_valid(d);
        nu_ = d.poisson_ratio;
        arch_count_ = static_cast<int>(d.architectures.size());
        const int nodes = 2 * steps + 1;
        const double h = d.geometry.length / steps;
        k0_.resize(static_cast<std::size_t>(nodes) * arch_count_);
        k1_.resize(k0_.size());
        k3_.resize(k0_.size());
        cos_rot_.resize(k0_.size());
        sin_rot_.resize(k0_.size());
        z_nodes_.resize(nodes);
        for (int j = 0; j < nodes; ++j) {
            const double z = std::min(0.5 * h * j, d.geometry.length);
            z_nodes_[j] = z;
            const auto rr = taper_radii(d.geometry, z);
            const double r2sq = rr.outer * rr.outer;
            const double r2quad = r2sq * r2sq;
            for (int i = 0; i < arch_count_; ++i) {
                const auto& arch = d.architectures[i];
                const auto delta =
                    delta_coefficients(d.geometry, arch.helical_angle, nu_, z);
                const double rot = fiber_rotation(d.geometry, arch.helical_angle, z);
                const std::size_t at = idx(j, i);
                k0_[at] = delta.delta0 / (4.0 * r2sq);
                k1_[at] = -2.0 * delta.delta1 / (3.0 * r2quad);
                k3_[at] = 2.0 * (1.0 + nu_) * delta.delta3 / (3.0 * r2quad);
                cos_rot_[at] = std::cos(rot);
                sin_rot_[at] = std::sin(rot);
            }
        }
    }

    int steps() const { return steps_; }
    int arch_count() const { return arch_count_; }
    double z_node(int j) const { return z_nodes_[j]; }

    /// Per-sample activation summary: one entry per architecture.
    struct ArchActivation {
        double a0, amp, sin_phase, cos_phase;
    };

    std::vector<ArchActivation> prepare(const ManipulatorDesign& d,
                                        const ActivationState& act) const {
        if (!act.matches(d)) {
            throw std::invalid_argument("integrate: activation shape does not match design");
        }
        std::vector<ArchActivation> out(arch_count_);
        for (int i = 0; i < arch_count_; ++i) {
            const auto c = activation_coefficients(d.architectures[i], act.gamma[i]);
            out[i] = {c.a0, c.amplitude, std::sin(c.phase), std::cos(c.phase)};
        }
        return out;
    }

    LocalFields eval(int node, const std::vector<ArchActivation>& a) const {
        LocalFields f;
        for (int i = 0; i < arch_count_; ++i) {
            const std::size_t at = idx(node, i);
            const double s = a[i].sin_phase * cos_rot_[at] - a[i].cos_phase * sin_rot_[at];
            const double c = a[i].cos_phase * cos_rot_[at] + a[i].sin_phase * sin_rot_[at];
            f.zeta += k0_[at] * a[i].a0;
            f.u[0] += k1_[at] * a[i].amp * s;
            f.u[1] += k1_[at] * a[i].amp * c;
            f.u[2] += k3_[at] * a[i].a0;
        }
        return f;
    }

  private:
    std::size_t idx(int node, int arch) const {
        return static_cast<std::size_t>(node) * arch_count_ + arch;
    }
    int steps_;
    int arch_count_;
    double nu_ = 0.5;
    std::vector<double> z_nodes_;
    std::vector<double> k0_, k1_, k3_, cos_rot_, sin_rot_;
};

struct RodState {
    Vec3 r;
    Quat q;
};

inline RodState rk4_step(const RodState& s, double h, const LocalFields& f0,
                         const LocalFields& fm, const LocalFields& f1) {
    auto deriv = [](const RodState& st, const LocalFields& f) {
        // r' = zeta d3,  q' = q (0, zeta u) / 2  (body-frame curvature)
        const Vec3 w = f.zeta * f.u;
        RodState d;
        d.r = f.zeta * (st.q * Vec3::UnitZ());
        const Quat omega(0.0, w.x(), w.y(), w.z());
        const Quat qd = st.q * omega;
        d.q = Quat(0.5 * qd.w(), 0.5 * qd.x(), 0.5 * qd.y(), 0.5 * qd.z());
        return d;
    };
    auto advance = [](const RodState& st, const RodState& d, double dt) {
        RodState n;
        n.r = st.r + dt * d.r;
        n.q = Quat(st.q.w() + dt * d.q.w(), st.q.x() + dt * d.q.x(), st.q.y() + dt * d.q.y(),
                   st.q.z() + dt * d.q.z());
        return n;
    };
    const RodState k1 = deriv(s, f0);
    const RodState k2 = deriv(advance(s, k1, 0.5 * h), fm);
    const RodState k3 = deriv(advance(s, k2, 0.5 * h), fm);
    const RodState k4 = deriv(advance(s, k3, h), f1);
    RodState out;
    out.r = s.r + (h / 6.0) * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
    out.q = Quat(s.q.w() + (h / 6.0) * (k1.q.w() + 2.0 * k2.q.w() + 2.0 * k3.q.w() + k4.q.w()),
                 s.q.x() + (h / 6.0) * (k1.q.x() + 2.0 * k2.q.x() + 2.0 * k3.q.x() + k4.q.x()),
                 s.q.y() + (h / 6.0) * (k1.q.y() + 2.0 * k2.q.y() + 2.0 * k3.q.y() + k4.q.y()),
                 s.q.z() + (h / 6.0) * (k1.q.z() + 2.0 * k2.q.z() + 2.0 * k3.q.z() + k4.q.z()));
    out.q.normalize();
    return out;
}

/// Endpoint-only integration: the hot path for cloud generation.
inline Vec3 integrate_endpoint(const FieldTable& t, const std::vector<FieldTable::ArchActivation>& a,
                               double length) {
    const int n = t.steps();
    const double h = length / n;
    RodState s{Vec3::Zero(), Quat::Identity()};
    LocalFields f0 = t.eval(0, a);
    for (int j = 0; j < n; ++j) {
        const LocalFields fm = t.eval(2 * j + 1, a);
        const LocalFields f1 = t.eval(2 * j + 2, a);
        s = rk4_step(s, h, f0, fm, f1);
        f0 = f1;
    }
    return s.r;
}

}  // namespace detail

/// Integrates the rod state over [0, L] with a fixed-step 4th-order scheme.
/// Frames are stored as unit quaternions and renormalized every step.
inline RodConfiguration integrate(const ManipulatorDesign& d, const ActivationState& act,
                                  int steps = 200) {
    detail::FieldTable table(d, steps);
    const auto a = table.prepare(d, act);
    const double h = d.geometry.length / steps;

    RodConfiguration cfg;
    cfg.z_grid.reserve(steps + 1);
    cfg.centerline.reserve(steps + 1);
    cfg.frames.reserve(steps + 1);
    cfg.fields.reserve(steps + 1);

    detail::RodState s{Vec3::Zero(), Quat::Identity()};
    LocalFields f0 = table.eval(0, a);
    cfg.z_grid.push_back(0.0);
    cfg.centerline.push_back(s.r);
    cfg.frames.push_back(s.q);
    cfg.fields.push_back(f0);
    for (int j = 0; j < steps; ++j) {
        const LocalFields fm = table.eval(2 * j + 1, a);
        const LocalFields f1 = table.eval(2 * j + 2, a);
        s = detail::rk4_step(s, h, f0, fm, f1);
        f0 = f1;
        cfg.z_grid.push_back(table.z_node(2 * j + 2));
        cfg.centerline.push_back(s.r);
        cfg.frames.push_back(s.q);
        cfg.fields.push_back(f1);
    }
    return cfg;
}

/// Position of the distal tip r(L).
inline Vec3 end_effector(const RodConfiguration& cfg) {
    if (cfg.centerline.empty()) throw std::invalid_argument("end_effector: empty configuration");
    return cfg.centerline.back();
}

/// Bending curvature magnitude, twist excluded.
inline double bending_curvature(const LocalFields& f) { return std::hypot(f.u[0], f.u[1]); }

inline double RodConfiguration::arclength() const {
    // 3-point Gauss-Legendre nodes on [0, 1]
    static constexpr double kNodes[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
    static constexpr double kWeights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < centerline.size(); ++j) {
        const double dz = z_grid[j + 1] - z_grid[j];
        const Vec3& p0 = centerline[j];
        const Vec3& p1 = centerline[j + 1];
        const Vec3 m0 = fields[j].zeta * (frames[j] * Vec3::UnitZ()) * dz;
        const Vec3 m1 = fields[j + 1].zeta * (frames[j + 1] * Vec3::UnitZ()) * dz;
        for (int k = 0; k < 3; ++k) {
            const double t = kNodes[k];
            // derivative of the cubic Hermite segment at parameter t
            const double h00 = 6.0 * t * t - 6.0 * t;
            const double h10 = 3.0 * t * t - 4.0 * t + 1.0;
            const double h01 = -6.0 * t * t + 6.0 * t;
            const double h11 = 3.0 * t * t - 2.0 * t;
            const Vec3 dp = h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1;
            total += kWeights[k] * dp.norm();
        }
    }
    return total;
}

struct ConvergenceRow {
    int steps;
    double error;  // |r(L) - r_ref(L)|
};

/// Endpoint error against a reference at twice the finest requested
/// resolution. steps_list must be ascending.
inline std::vector<ConvergenceRow> convergence_report(const ManipulatorDesign& d,
                                                      const ActivationState& act,
                                                      const std::vector<int>& steps_list) {
    if (steps_list.empty()) return {};
    for (std::size_t i = 1; i < steps_list.size(); ++i) {
        if (steps_list[i] <= steps_list[i - 1]) {
            throw std::invalid_argument("convergence_report: steps_list must be ascending");
        }
    }
    const Vec3 ref = end_effector(integrate(d, act, 2 * steps_list.back()));
    std::vector<ConvergenceRow> rows;
    rows.reserve(steps_list.size());
    for (int n : steps_list) {
        rows.push_back({n, (end_effector(integrate(d, act, n)) - ref).norm()});
    }
    return rows;
}

}  // namespace reachcloud
