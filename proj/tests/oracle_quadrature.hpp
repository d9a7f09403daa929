#pragma once

// Test-only oracle: evaluates the field coefficients through their smooth
// integral representations with composite Gauss-Legendre quadrature. This
// route shares no code with the branchy closed-form implementation.

#include <array>
#include <cmath>
#include <functional>

namespace reachcloud::testing {

// 20-point Gauss-Legendre nodes/weights on [-1, 1]
inline constexpr std::array<double, 10> kGlNodes = {
    0.0765265211334973, 0.2277858511416451, 0.3737060887154195, 0.5108670019508271,
    0.6360536807265150, 0.7463319064601508, 0.8391169718222188, 0.9122344282513259,
    0.9639719272779138, 0.9931285991850949};
inline constexpr std::array<double, 10> kGlWeights = {
    0.1527533871307258, 0.1491729864726037, 0.1420961093183820, 0.1316886384491766,
    0.1181945319615184, 0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
    0.0406014298003869, 0.0176140071391521};

inline double gauss20(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
        s += kGlWeights[i] * (f(c + h * kGlNodes[i]) + f(c - h * kGlNodes[i]));
    }
    return s * h;
}

/// Composite quadrature with enough panels to resolve sharp integrands.
inline double integrate_smooth(const std::function<double(double)>& f, double a, double b,
                               int panels = 8) {
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double x0 = a + (b - a) * p / panels;
        const double x1 = a + (b - a) * (p + 1) / panels;
        s += gauss20(f, x0, x1);
    }
    return s;
}

struct DeltaOracle {
    double delta0, delta1, delta3;
};

/// delta0 = 2 nu (R1^2-R2^2) + 4(1+nu) int R/(Dp Da)
/// delta1 = 2 nu (R1^3-R2^3) + 6(1+nu) int R^2/(Dp Da)
/// delta3 = 6 c_alpha int R^3/(Da sqrt(Dp)),  Dc = 1 + c^2 R^2
inline DeltaOracle delta_by_quadrature(double r1_0, double r2_0, double nu, double tan_alpha,
                                       double tan_phi, double z) {
    const double f = 1.0 - z * tan_phi / r2_0;
    const double r1 = r1_0 * f, r2 = r2_0 * f;
    const double cp = tan_phi / r2, ca = tan_alpha / r2;
    auto dp = [&](double r) { return 1.0 + cp * cp * r * r; };
    auto da = [&](double r) { return 1.0 + ca * ca * r * r; };
    DeltaOracle o;
    o.delta0 = 2.0 * nu * (r1 * r1 - r2 * r2) +
               4.0 * (1.0 + nu) * integrate_smooth([&](double r) { return r / (dp(r) * da(r)); }, r1, r2);
    o.delta1 = 2.0 * nu * (r1 * r1 * r1 - r2 * r2 * r2) +
               6.0 * (1.0 + nu) *
                   integrate_smooth([&](double r) { return r * r / (dp(r) * da(r)); }, r1, r2);
    o.delta3 = 6.0 * ca * integrate_smooth(
                              [&](double r) { return r * r * r / (da(r) * std::sqrt(dp(r))); }, r1, r2);
    return o;
}

}  // namespace reachcloud::testing
