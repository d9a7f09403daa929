#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "reachcloud/core.hpp"

namespace reachcloud {

/// Geometry/material coefficients of the reduced-order fields at one height.
/// delta1 == delta2 by construction. im_residue is |Im|/|Re| of the complex
/// evaluation path of delta3 (zero when a series branch was taken).
struct DeltaSet {
    double delta0 = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
    double c_phi = 0.0;    // tan(phi) / R2(Z)
    double c_alpha = 0.0;  // tan(alpha) / R2(Z)
    double im_residue = 0.0;
};

struct ActivationCoefficients {
    double a0 = 0.0;
    double a1 = 0.0;
    double b1 = 0.0;
    double amplitude = 0.0;  // sqrt(a1^2 + b1^2)
    double phase = 0.0;      // -atan2(b1, a1), defined as 0 at zero amplitude
};

struct LocalFields {
    double zeta = 1.0;  // axial extension
    Vec3 u = Vec3::Zero();  // curvature/twist components in the director frame
};

namespace detail {

inline constexpr double kPhiTol = 1e-6;        // taper-angle branch switch (radians)
inline constexpr double kSmallSq = 3e-3;       // (c*R2)^2 threshold for series branches
inline constexpr double kDiagTolI2 = 1e-4;     // |x-y|/max for the delta1 midpoint branch
inline constexpr double kDiagTolI3 = 1e-6;     // |x-y|/max for the delta3 midpoint branch

/// log1p(q)/q, continuous through q = 0.
inline double log1p_over(double q) {
    if (std::abs(q) < 1e-5) {
        return 1.0 - q * (0.5 - q * (1.0 / 3.0 - q * 0.25));
    }
    return std::log1p(q) / q;
}

/// atan(u)/u, continuous through u = 0.
inline double atan_over(double u) {
    const double u2 = u * u;
    if (u2 < 1e-5) {
        return 1.0 - u2 * (1.0 / 3.0 - u2 * (0.2 - u2 / 7.0));
    }
    return std::atan(u) / u;
}

/// (atan(u) - u)/u^3, continuous through u = 0.
inline double atan_minus(double u) {
    const double u2 = u * u;
    if (u2 < 0.01) {
        return -1.0 / 3.0 + u2 * (0.2 - u2 * (1.0 / 7.0 - u2 * (1.0 / 9.0 - u2 / 11.0)));
    }
    return (std::atan(u) - u) / (u2 * u);
}

/// I1 = int_{r1}^{r2} R / ((1+x R^2)(1+y R^2)) dR, exact for all x, y >= 0.
inline double seg_I1(double r1, double r2, double x, double y) {
    const double d2 = r2 * r2 - r1 * r1;
    const double den = (1.0 + x * r1 * r1) * (1.0 + y * r2 * r2);
    const double q = (x - y) * d2 / den;
    return 0.5 * log1p_over(q) * d2 / den;
}

/// Q(t) = int_{r1}^{r2} dR / (1+t R^2), stable for all t >= 0.
inline double seg_Q(double r1, double r2, double t) {
    const double g = (r2 - r1) / (1.0 + t * r1 * r2);
    return g * atan_over(std::sqrt(t) * g);
}

/// dQ/dt = -int R^2/(1+tR^2)^2 dR via the antiderivative
/// A(R) = R^3 (atan_minus(u) + atan_over(u)) / (2 (1+u^2)), u = R sqrt(t).
inline double seg_Qp(double r1, double r2, double t) {
    const double st = std::sqrt(t);
    auto A = [&](double r) {
        const double u = r * st;
        return r * r * r * (atan_minus(u) + atan_over(u)) / (2.0 * (1.0 + u * u));
    };
    return -(A(r2) - A(r1));
}

/// d^3Q/dt^3 = -6 int R^6/(1+tR^2)^4 dR. Accuracy requirement is mild: this
/// only enters the midpoint branch weighted by (x-y)^2/24.
inline double seg_Qppp(double r1, double r2, double t) {
    const double st = std::sqrt(t);
    auto B = [&](double r) {
        const double u = r * st;
        const double u2 = u * u;
        double m7;  // [15 (1+u^2)^3 atan(u) - u(33u^4+40u^2+15)] / u^7
        if (u2 < 0.0625) {
            m7 = 48.0 / 7.0 - u2 * (16.0 / 21.0 - u2 * (16.0 / 77.0 - u2 * 80.0 / 1001.0));
        } else {
            const double D = 1.0 + u2;
            m7 = (15.0 * D * D * D * std::atan(u) - u * (33.0 * u2 * u2 + 40.0 * u2 + 15.0)) /
                 (u2 * u2 * u2 * u);
        }
        const double D = 1.0 + u2;
        const double r7 = r * r * r * r * r * r * r;
        return r7 * m7 / (48.0 * D * D * D);
    };
    return -6.0 * (B(r2) - B(r1));
}

/// I2 = int_{r1}^{r2} R^2 / ((1+x R^2)(1+y R^2)) dR.
inline double seg_I2(double r1, double r2, double x, double y) {
    // scale in the natural dimensionless variable (c R2)^2, floored at 1 so
    // the midpoint branch also covers the both-parameters-tiny region
    const double mx = std::max({x, y, 1.0 / (r2 * r2)});
    if (std::abs(x - y) <= kDiagTolI2 * mx) {
        const double m = 0.5 * (x + y);
        const double dd = x - y;
        return -(seg_Qp(r1, r2, m) + seg_Qppp(r1, r2, m) * dd * dd / 24.0);
    }
    return (seg_Q(r1, r2, y) - seg_Q(r1, r2, x)) / (x - y);
}

/// J_k = int R^k / sqrt(1+x R^2) dR for odd k, cancellation-free for all x.
inline double seg_J(int k, double r1, double r2, double x) {
    auto G = [&](double r) {
        const double w = std::sqrt(1.0 + x * r * r);
        const double wp = w + 1.0;
        const double r2_ = r * r;
        const double r4 = r2_ * r2_;
        switch (k) {
            case 3:
                return r4 * (w + 2.0) / (3.0 * wp * wp);
            case 5:
                return r4 * r2_ * (3.0 * w * w + 9.0 * w + 8.0) / (15.0 * wp * wp * wp);
            case 7:
                return r4 * r4 * (w * (w * (5.0 * w + 20.0) + 29.0) + 16.0) /
                       (35.0 * wp * wp * wp * wp);
            case 9:
                return r4 * r4 * r2_ *
                       (w * (w * (w * (35.0 * w + 175.0) + 345.0) + 325.0) + 128.0) /
                       (315.0 * wp * wp * wp * wp * wp);
            case 11:
                return r4 * r4 * r4 *
                       (w * (w * (w * (w * (63.0 * w + 378.0) + 938.0) + 1218.0) + 843.0) +
                        256.0) /
                       (693.0 * wp * wp * wp * wp * wp * wp);
            default:
                throw std::logic_error("seg_J: unsupported power");
        }
    };
    return G(r2) - G(r1);
}

/// K_k = int R^k / (1+y R^2) dR for odd k; y must not be tiny (the series
/// branches take over before cancellation matters).
inline double seg_K(int k, double r1, double r2, double y) {
    const double p2 = r2 * r2 - r1 * r1;
    const double p4 = r2 * r2 * r2 * r2 - r1 * r1 * r1 * r1;
    const double p6 = std::pow(r2, 6) - std::pow(r1, 6);
    const double p8 = std::pow(r2, 8) - std::pow(r1, 8);
    const double p10 = std::pow(r2, 10) - std::pow(r1, 10);
    const double lg = std::log1p(y * p2 / (1.0 + y * r1 * r1));
    const double y2 = y * y;
    switch (k) {
        case 3:
            return (y * p2 - lg) / (2.0 * y2);
        case 5:
            return (y2 * p4 - 2.0 * y * p2 + 2.0 * lg) / (4.0 * y2 * y);
        case 7:
            return (y * y2 * p6 / 6.0 - y2 * p4 / 4.0 + y * p2 / 2.0 - lg / 2.0) / (y2 * y2);
        case 9:
            return (y2 * y2 * p8 / 8.0 - y * y2 * p6 / 6.0 + y2 * p4 / 4.0 - y * p2 / 2.0 +
                    lg / 2.0) /
                   (y2 * y2 * y);
        case 11:
            return (y * y2 * y2 * p10 / 10.0 - y2 * y2 * p8 / 8.0 + y * y2 * p6 / 6.0 -
                    y2 * p4 / 4.0 + y * p2 / 2.0 - lg / 2.0) /
                   (y2 * y2 * y2);
        default:
            throw std::logic_error("seg_K: unsupported power");
    }
}

/// int R^3/(1+tR^2)^{3/2} dR, cancellation-free for all t >= 0.
inline double seg_I3_diag(double r1, double r2, double t) {
    auto G = [&](double r) {
        const double w = std::sqrt(1.0 + t * r * r);
        const double wp = w + 1.0;
        return r * r * r * r / (wp * wp * w);
    };
    return G(r2) - G(r1);
}

/// int R^5/(1+tR^2)^{5/2} dR (first-order off-diagonal correction).
inline double seg_V5(double r1, double r2, double t) {
    auto G = [&](double r) {
        const double u2 = t * r * r;
        const double D = 1.0 + u2;
        double h;  // (u^4 + 4u^2 + 8/3 - (8/3) D^{3/2}) / u^6
        if (u2 < 0.09) {
            h = 1.0 / 6.0 - u2 / 16.0 + u2 * u2 / 32.0;
        } else {
            h = (u2 * u2 + 4.0 * u2 + 8.0 / 3.0 - (8.0 / 3.0) * D * std::sqrt(D)) /
                (u2 * u2 * u2);
        }
        const double r6 = r * r * r * r * r * r;
        return r6 * h / (D * std::sqrt(D));
    };
    return G(r2) - G(r1);
}

struct Delta3Result {
    double value;
    double im_residue;
};

/// delta3 = 6 c_alpha int R^3 / ((1+c_alpha^2 R^2) sqrt(1+c_phi^2 R^2)) dR,
/// evaluated through the closed form with complex intermediates away from the
/// removable singularities and through explicit series branches near them.
inline Delta3Result delta3_eval(double r1, double r2, double c_phi, double c_alpha) {
    const double x = c_phi * c_phi;    // (taper rate)^2
    const double y = c_alpha * c_alpha;  // (helix rate)^2
    const double sx = x * r2 * r2;
    const double sy = y * r2 * r2;

    if (sy < kSmallSq) {
        // straight-fiber limit: series in y with closed J coefficients
        const double i3 = seg_J(3, r1, r2, x) - y * seg_J(5, r1, r2, x) +
                          y * y * seg_J(7, r1, r2, x) - y * y * y * seg_J(9, r1, r2, x) +
                          y * y * y * y * seg_J(11, r1, r2, x);
        return {6.0 * c_alpha * i3, 0.0};
    }
    if (sx < kSmallSq) {
        // untapered limit: series in x with closed K coefficients
        const double i3 = seg_K(3, r1, r2, y) - 0.5 * x * seg_K(5, r1, r2, y) +
                          0.375 * x * x * seg_K(7, r1, r2, y) -
                          0.3125 * x * x * x * seg_K(9, r1, r2, y) +
                          0.2734375 * x * x * x * x * seg_K(11, r1, r2, y);
        return {6.0 * c_alpha * i3, 0.0};
    }
    const double mx = std::max({x, y, 1.0 / (r2 * r2)});
    if (std::abs(x - y) <= kDiagTolI3 * mx) {
        const double m = 0.5 * (x + y);
        const double i3 = seg_I3_diag(r1, r2, m) + 0.25 * (x - y) * seg_V5(r1, r2, m);
        return {6.0 * c_alpha * i3, 0.0};
    }

    using C = std::complex<double>;
    const double d = (c_phi - c_alpha) * (c_phi + c_alpha);
    const C W = std::sqrt(C(d, 0.0));
    auto S = [&](double r) { return std::sqrt(C(d * (1.0 + x * r * r), 0.0)); };
    auto T = [&](double r) { return std::atan(C(c_alpha, x * r) / S(r)); };
    const C bracket =
        x * (T(-r1) + T(r1) - T(-r2) - T(r2)) + 2.0 * c_alpha * (S(r2) - S(r1));
    const C v = 3.0 * bracket / (x * y * W);
    const double re = v.real();
    const double im = std::abs(v.imag());
    return {re, im / std::max(std::abs(re), 1e-300)};
}

}  // namespace detail

/// Field coefficients delta0..delta3 at height Z for one fiber architecture
/// angle. |alpha| < pi/2 required.
inline DeltaSet delta_coefficients(const TaperedGeometry& g, double alpha, double nu, double z) {
    if (!(std::abs(alpha) < kPi / 2.0)) {
        throw std::invalid_argument("delta_coefficients: |alpha| must be < pi/2");
    }
    const auto rr = taper_radii(g, z);
    const double r1 = rr.inner;
    const double r2 = rr.outer;
    const double c_phi = std::tan(g.taper_angle) / r2;
    const double c_alpha = std::tan(alpha) / r2;
    const double x = c_phi * c_phi;
    const double y = c_alpha * c_alpha;

    DeltaSet out;
    out.c_phi = c_phi;
    out.c_alpha = c_alpha;
    out.delta0 = 2.0 * nu * (r1 * r1 - r2 * r2) +
                 4.0 * (1.0 + nu) * detail::seg_I1(r1, r2, x, y);
    out.delta1 = 2.0 * nu * (r1 * r1 * r1 - r2 * r2 * r2) +
                 6.0 * (1.0 + nu) * detail::seg_I2(r1, r2, x, y);
    out.delta2 = out.delta1;
    const auto d3 = detail::delta3_eval(r1, r2, c_phi, c_alpha);
    out.delta3 = d3.value;
    out.im_residue = d3.im_residue;
    return out;
}

/// Total azimuthal rotation of a helical fiber at the outer surface over
/// [0, Z]. Continuous through the untapered limit.
inline double fiber_rotation(const TaperedGeometry& g, double alpha, double z) {
    const double t_alpha = std::tan(alpha);
    const double s = z * std::tan(g.taper_angle) / g.outer_radius;  // 1 - f(Z)
    if (g.taper_angle > detail::kPhiTol) {
        return -(t_alpha / std::sin(g.taper_angle)) * std::log1p(-s);
    }
    return z * t_alpha / (g.outer_radius * std::cos(g.taper_angle)) * detail::log1p_over(-s);
}

/// Helical angle that produces a total fiber revolution `omega` over the full
/// length; exact inverse of fiber_rotation(g, alpha, L).
inline double helical_angle_from_revolution(const TaperedGeometry& g, double omega) {
    if (omega < 0.0) throw std::invalid_argument("helical_angle_from_revolution: omega < 0");
    if (omega == 0.0) return 0.0;
    const double s = g.length * std::tan(g.taper_angle) / g.outer_radius;
    if (g.taper_angle > detail::kPhiTol) {
        return std::atan(-omega * std::sin(g.taper_angle) / std::log1p(-s));
    }
    return std::atan(omega * g.outer_radius * std::cos(g.taper_angle) /
                     (g.length * detail::log1p_over(-s)));
}

/// Fourier coefficients of one architecture's bundle activation pattern.
inline ActivationCoefficients activation_coefficients(const FiberArchitecture& arch,
                                                      std::span<const double> gammas) {
    if (static_cast<int>(gammas.size()) != arch.bundle_count) {
        throw std::invalid_argument("activation_coefficients: gamma count != bundle count");
    }
    ActivationCoefficients c;
    const double scale = 2.0 * std::sin(0.5 * arch.angular_extent) / kPi;
    for (int j = 0; j < arch.bundle_count; ++j) {
        const double theta = arch.angular_offset + 2.0 * kPi * j / arch.bundle_count;
        c.a0 += gammas[j];
        c.a1 += scale * gammas[j] * std::cos(theta);
        c.b1 += scale * gammas[j] * std::sin(theta);
    }
    c.a0 *= arch.angular_extent / kPi;
    c.amplitude = std::hypot(c.a1, c.b1);
    c.phase = (c.amplitude == 0.0) ? 0.0 : -std::atan2(c.b1, c.a1);
    return c;
}

/// Axial extension and curvatures at height Z for a design under a given
/// activation. Pure function of its inputs.
inline LocalFields local_fields(const ManipulatorDesign& d, const ActivationState& act,
                                double z) {
    if (!act.matches(d)) {
        throw std::invalid_argument("local_fields: activation shape does not match design");
    }
    const auto rr = taper_radii(d.geometry, z);
    const double r2sq = rr.outer * rr.outer;
    const double r2quad = r2sq * r2sq;
    LocalFields f;
    for (std::size_t i = 0; i < d.architectures.size(); ++i) {
        const auto& arch = d.architectures[i];
        const auto coef = activation_coefficients(arch, act.gamma[i]);
        const auto delta = delta_coefficients(d.geometry, arch.helical_angle, d.poisson_ratio, z);
        const double rot = fiber_rotation(d.geometry, arch.helical_angle, z);
        const double angle = coef.phase - rot;
        f.zeta += delta.delta0 * coef.a0 / (4.0 * r2sq);
        f.u[0] += -2.0 / (3.0 * r2quad) * delta.delta1 * coef.amplitude * std::sin(angle);
        f.u[1] += -2.0 / (3.0 * r2quad) * delta.delta2 * coef.amplitude * std::cos(angle);
        f.u[2] += 2.0 * (1.0 + d.poisson_ratio) / (3.0 * r2quad) * delta.delta3 * coef.a0;
    }
    return f;
}

}  // namespace reachcloud
