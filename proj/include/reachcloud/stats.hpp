#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "reachcloud/parallel.hpp"
#include "reachcloud/rng.hpp"

#include <Eigen/Dense>

namespace reachcloud {

/// Linear-interpolation quantile (numpy type 7). p in [0, 1]. Sorts a copy.
inline double quantile(std::vector<double> v, double p) {
    if (v.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(v.begin(), v.end());
    const double h = p * (static_cast<double>(v.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Spearman rank correlation; ties get average ranks. Returns 0 for constant
/// input (flagged by *inconclusive when provided).
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys,
                       bool* inconclusive = nullptr) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::invalid_argument("spearman: need two samples of equal size >= 2");
    }
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(xs);
    const auto ry = ranks(ys);
    const double n = static_cast<double>(xs.size());
    const double mean = (n + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (sxx == 0.0 || syy == 0.0) {
        if (inconclusive) *inconclusive = true;
        return 0.0;
    }
    if (inconclusive) *inconclusive = false;
    return sxy / std::sqrt(sxx * syy);
}

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::int64_t> counts;

    std::int64_t total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }
};

/// Fixed-bin histogram with the range taken from the data. The last bin is
/// closed so max lands inside.
inline Histogram histogram(const std::vector<double>& v, int bins = 100) {
    if (v.empty() || bins < 1) throw std::invalid_argument("histogram: empty data or bins < 1");
    Histogram h;
    auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    h.lo = *mn;
    h.hi = *mx;
    h.counts.assign(bins, 0);
    const double width = (h.hi - h.lo) / bins;
    for (double x : v) {
        int b = width > 0.0 ? static_cast<int>((x - h.lo) / width) : 0;
        if (b >= bins) b = bins - 1;
        if (b < 0) b = 0;
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

struct EnergyTestResult {
    double statistic = 0.0;   // two-sample energy distance of the observed split
    double p_value = 1.0;     // permutation p-value
    int permutations = 0;
    bool reject = false;      // true when p < significance
};

/// Two-sample energy-distance permutation test on 3D point sets. The pooled
/// distance matrix is cached (float), so one permutation costs a pass over
/// the pairs. Deterministic for a fixed seed.
inline EnergyTestResult energy_two_sample_test(const std::vector<Eigen::Vector3d>& xs,
                                               const std::vector<Eigen::Vector3d>& ys,
                                               double significance = 0.01,
                                               int permutations = 199,
                                               std::uint64_t seed = 0x5eed,
                                               int workers = 1) {
    const std::size_t n = xs.size(), m = ys.size();
    if (n < 2 || m < 2) throw std::invalid_argument("energy test: need >= 2 points per sample");
    const std::size_t total = n + m;
    std::vector<Eigen::Vector3d> pool;
    pool.reserve(total);
    pool.insert(pool.end(), xs.begin(), xs.end());
    pool.insert(pool.end(), ys.begin(), ys.end());

    std::vector<float> dist(total * (total - 1) / 2);
    auto pair_index = [total](std::size_t i, std::size_t j) {
        // i < j
        return i * (2 * total - i - 1) / 2 + (j - i - 1);
    };
    parallel_chunks(static_cast<std::int64_t>(total), workers, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            for (std::size_t j = static_cast<std::size_t>(i) + 1; j < total; ++j) {
                dist[pair_index(static_cast<std::size_t>(i), j)] =
                    static_cast<float>((pool[static_cast<std::size_t>(i)] - pool[j]).norm());
            }
        }
    });

    // label[i] = true marks membership in the first sample
    auto statistic = [&](const std::vector<char>& label) {
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < total; ++i) {
            const char li = label[i];
            const std::size_t base = i * (2 * total - i - 1) / 2;
            for (std::size_t j = i + 1; j < total; ++j) {
                const double d = dist[base + (j - i - 1)];
                if (li != label[j]) sxy += d;
                else if (li) sxx += d;
                else syy += d;
            }
        }
        const double nn = static_cast<double>(n), mm = static_cast<double>(m);
        return 2.0 * sxy / (nn * mm) - 2.0 * sxx / (nn * nn) - 2.0 * syy / (mm * mm);
    };

    std::vector<char> obs(total, 0);
    for (std::size_t i = 0; i < n; ++i) obs[i] = 1;
    EnergyTestResult r;
    r.statistic = statistic(obs);
    r.permutations = permutations;

    std::vector<double> null_stats(static_cast<std::size_t>(permutations));
    parallel_chunks(permutations, workers, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t p = b; p < e; ++p) {
            // deterministic Fisher-Yates keyed on (seed, permutation index)
            std::vector<std::uint32_t> perm(total);
            std::iota(perm.begin(), perm.end(), 0u);
            for (std::size_t i = total - 1; i > 0; --i) {
                const std::uint64_t ctr =
                    static_cast<std::uint64_t>(p) * total + static_cast<std::uint64_t>(i);
                const std::size_t j = static_cast<std::size_t>(rng::at(seed, ctr) % (i + 1));
                std::swap(perm[i], perm[j]);
            }
            std::vector<char> label(total, 0);
            for (std::size_t i = 0; i < n; ++i) label[perm[i]] = 1;
            null_stats[static_cast<std::size_t>(p)] = statistic(label);
        }
    });

    int ge = 0;
    for (double s : null_stats) {
        if (s >= r.statistic) ++ge;
    }
    r.p_value = (1.0 + ge) / (1.0 + permutations);
    r.reject = r.p_value < significance;
    return r;
}

}  // namespace reachcloud
