#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "reachcloud/design_io.hpp"
#include "reachcloud/parallel.hpp"
#include "reachcloud/rng.hpp"
#include "reachcloud/rod.hpp"
#include "reachcloud/stats.hpp"

namespace reachcloud {

struct SamplerConfig {
    std::int64_t n_samples = 1000;
    double gamma_min = -5.0 / 3.0;
    double gamma_max = 0.0;
    std::uint64_t seed = 0;
    int steps = 200;
};

inline void require_valid(const SamplerConfig& s) {
    if (s.n_samples < 1) throw std::invalid_argument("sampler: n_samples must be >= 1");
    if (!(s.gamma_min <= s.gamma_max)) {
        throw std::invalid_argument("sampler: gamma_min must not exceed gamma_max");
    }
    if (s.steps < 2) throw std::invalid_argument("sampler: steps must be >= 2");
}

inline std::string sampler_digest(const SamplerConfig& s) {
    Digest d;
    d.update_value(s.n_samples);
    d.update_value(s.gamma_min);
    d.update_value(s.gamma_max);
    d.update_value(s.seed);
    d.update_value(s.steps);
    return d.hex();
}

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void expand(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
};

/// Activation magnitude that saturates a color channel.
inline constexpr double kColorScale = 5.0 / 3.0;

/// RGB encoding of an activation vector: the first three bundles feed the
/// red, green and blue channels with |gamma|/kColorScale, round half up.
inline std::array<unsigned char, 3> color_map(std::span<const double> activation) {
    std::array<unsigned char, 3> rgb{0, 0, 0};
    for (std::size_t c = 0; c < 3 && c < activation.size(); ++c) {
        const double v = std::min(std::abs(activation[c]) / kColorScale, 1.0);
        rgb[c] = static_cast<unsigned char>(std::floor(255.0 * v + 0.5));
    }
    return rgb;
}

inline std::array<unsigned char, 3> color_map(std::span<const float> activation) {
    std::vector<double> widened(activation.begin(), activation.end());
    return color_map(std::span<const double>(widened));
}

/// Coordinate j of activation sample k; pure function of (seed, k, j).
/// Values are quantized to float precision up front: that is the storage
/// precision of cloud activations, and integrating the quantized value keeps
/// stored activations and stored positions exactly consistent.
inline double sample_coordinate(const SamplerConfig& s, std::int64_t k, int bundle_count, int j) {
    const std::uint64_t counter =
        static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(bundle_count) +
        static_cast<std::uint64_t>(j);
    return static_cast<double>(
        static_cast<float>(rng::uniform_in(s.seed, counter, s.gamma_min, s.gamma_max)));
}

/// Full activation vector of sample k (architecture-major flat layout).
inline std::vector<double> sample_activation(const ManipulatorDesign& d, const SamplerConfig& s,
                                             std::int64_t k) {
    const int bundles = d.total_bundles();
    std::vector<double> g(static_cast<std::size_t>(bundles));
    for (int j = 0; j < bundles; ++j) g[static_cast<std::size_t>(j)] = sample_coordinate(s, k, bundles, j);
    return g;
}

/// End-effector cloud with per-point activations (float32) and colors.
/// Point order equals sample order regardless of worker count.
struct ReachCloud {
    std::string design_digest;
    SamplerConfig sampler;
    int bundle_count = 0;
    std::vector<Vec3> positions;
    std::vector<float> activations;  // size() * bundle_count, sample-major
    std::vector<std::array<unsigned char, 3>> colors;
    Aabb bounds;
    std::string integrity_warning;  // set by the reader on digest mismatch

    std::int64_t size() const { return static_cast<std::int64_t>(positions.size()); }

    std::span<const float> activation(std::int64_t i) const {
        return {activations.data() + i * bundle_count, static_cast<std::size_t>(bundle_count)};
    }

    void recompute_bounds() {
        bounds = Aabb{};
        for (const auto& p : positions) bounds.expand(p);
    }
};

/// Integrates one configuration per activation sample and records the tip.
/// Deterministic: bit-identical output for any worker count.
inline ReachCloud generate_cloud(const ManipulatorDesign& d, const SamplerConfig& s,
                                 int workers = default_workers()) {
    require_valid(d);
    require_valid(s);
    const detail::FieldTable table(d, s.steps);
    const int bundles = d.total_bundles();
    const std::int64_t n = s.n_samples;

    ReachCloud cloud;
    cloud.design_digest = design_digest(d);
    cloud.sampler = s;
    cloud.bundle_count = bundles;
    cloud.positions.resize(static_cast<std::size_t>(n));
    cloud.activations.resize(static_cast<std::size_t>(n) * bundles);
    cloud.colors.resize(static_cast<std::size_t>(n));

    parallel_chunks(n, workers, [&](std::int64_t b, std::int64_t e) {
        std::vector<double> flat(static_cast<std::size_t>(bundles));
        for (std::int64_t k = b; k < e; ++k) {
            for (int j = 0; j < bundles; ++j) {
                flat[static_cast<std::size_t>(j)] = sample_coordinate(s, k, bundles, j);
            }
            const auto act = ActivationState::from_flat(d, flat);
            const auto arch = table.prepare(d, act);
            cloud.positions[static_cast<std::size_t>(k)] =
                detail::integrate_endpoint(table, arch, d.geometry.length);
            float* dst = cloud.activations.data() + k * bundles;
            for (int j = 0; j < bundles; ++j) dst[j] = static_cast<float>(flat[static_cast<std::size_t>(j)]);
            cloud.colors[static_cast<std::size_t>(k)] = color_map(cloud.activation(k));
        }
    });
    cloud.recompute_bounds();
    return cloud;
}

/// Re-runs the integration for a stored cloud point through the same code
/// path the generator used.
inline Vec3 reintegrate_point(const ManipulatorDesign& d, const SamplerConfig& s,
                              std::span<const float> activation) {
    const detail::FieldTable table(d, s.steps);
    std::vector<double> flat(activation.begin(), activation.end());
    const auto act = ActivationState::from_flat(d, flat);
    return detail::integrate_endpoint(table, table.prepare(d, act), d.geometry.length);
}

struct StationStats {
    double z = 0.0;
    Histogram hist;                      // of kappa * L
    std::array<double, 5> quantiles{};   // 5/25/50/75/95 percentiles of kappa * L
    std::int64_t count = 0;
};

struct CurvatureStats {
    std::vector<StationStats> stations;
};

/// Samples the activation space and evaluates the bending curvature at the
/// requested stations directly from the local fields (no integration
/// needed). Histograms are 100 fixed bins over the per-station data range.
inline CurvatureStats curvature_statistics(const ManipulatorDesign& d, const SamplerConfig& s,
                                           const std::vector<double>& stations,
                                           int workers = default_workers()) {
    require_valid(d);
    require_valid(s);
    for (double z : stations) {
        if (!(z >= 0.0 && z <= d.geometry.length)) {
            throw std::domain_error("curvature_statistics: station outside [0, L]");
        }
    }
    const int bundles = d.total_bundles();
    const std::size_t ns = stations.size();

    // per-station, per-architecture curvature prefactors
    struct Node {
        double k1, cos_rot, sin_rot;
    };
    const std::size_t arch_count = d.architectures.size();
    std::vector<Node> nodes(ns * arch_count);
    for (std::size_t t = 0; t < ns; ++t) {
        const auto rr = taper_radii(d.geometry, stations[t]);
        const double r2quad = rr.outer * rr.outer * rr.outer * rr.outer;
        for (std::size_t i = 0; i < arch_count; ++i) {
            const auto& arch = d.architectures[i];
            const auto delta = delta_coefficients(d.geometry, arch.helical_angle,
                                                  d.poisson_ratio, stations[t]);
            const double rot = fiber_rotation(d.geometry, arch.helical_angle, stations[t]);
            nodes[t * arch_count + i] = {-2.0 * delta.delta1 / (3.0 * r2quad), std::cos(rot),
                                         std::sin(rot)};
        }
    }

    std::vector<std::vector<double>> kappa(ns);
    for (auto& v : kappa) v.resize(static_cast<std::size_t>(s.n_samples));

    parallel_chunks(s.n_samples, workers, [&](std::int64_t b, std::int64_t e) {
        std::vector<double> flat(static_cast<std::size_t>(bundles));
        std::vector<detail::FieldTable::ArchActivation> coef(arch_count);
        for (std::int64_t k = b; k < e; ++k) {
            for (int j = 0; j < bundles; ++j) {
                flat[static_cast<std::size_t>(j)] = sample_coordinate(s, k, bundles, j);
            }
            std::size_t off = 0;
            for (std::size_t i = 0; i < arch_count; ++i) {
                const auto& arch = d.architectures[i];
                const auto c = activation_coefficients(
                    arch, std::span<const double>(flat).subspan(off, arch.bundle_count));
                off += static_cast<std::size_t>(arch.bundle_count);
                coef[i] = {c.a0, c.amplitude, std::sin(c.phase), std::cos(c.phase)};
            }
            for (std::size_t t = 0; t < ns; ++t) {
                double u1 = 0.0, u2 = 0.0;
                for (std::size_t i = 0; i < arch_count; ++i) {
                    const Node& nd = nodes[t * arch_count + i];
                    const double sn = coef[i].sin_phase * nd.cos_rot - coef[i].cos_phase * nd.sin_rot;
                    const double cs = coef[i].cos_phase * nd.cos_rot + coef[i].sin_phase * nd.sin_rot;
                    u1 += nd.k1 * coef[i].amp * sn;
                    u2 += nd.k1 * coef[i].amp * cs;
                }
                kappa[t][static_cast<std::size_t>(k)] = std::hypot(u1, u2) * d.geometry.length;
            }
        }
    });

    CurvatureStats out;
    out.stations.resize(ns);
    for (std::size_t t = 0; t < ns; ++t) {
        auto& st = out.stations[t];
        st.z = stations[t];
        st.count = s.n_samples;
        st.hist = histogram(kappa[t], 100);
        const double ps[5] = {0.05, 0.25, 0.5, 0.75, 0.95};
        for (int i = 0; i < 5; ++i) st.quantiles[static_cast<std::size_t>(i)] = quantile(kappa[t], ps[i]);
    }
    return out;
}

/// Default statistics stations: six uniformly spaced points in the distal
/// half, Z/L in {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}.
inline std::vector<double> default_stations(double length) {
    return {0.5 * length, 0.6 * length, 0.7 * length, 0.8 * length, 0.9 * length, length};
}

}  // namespace reachcloud
