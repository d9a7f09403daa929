#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "reachcloud/redundancy.hpp"
#include "reachcloud/rng.hpp"

using namespace reachcloud;

namespace {

ReachCloud synthetic_cloud(const std::vector<Vec3>& pts, const std::vector<std::vector<float>>& acts) {
    ReachCloud c;
    c.bundle_count = static_cast<int>(acts.at(0).size());
    c.positions = pts;
    for (const auto& a : acts) c.activations.insert(c.activations.end(), a.begin(), a.end());
    c.colors.resize(pts.size());
    c.sampler.n_samples = static_cast<std::int64_t>(pts.size());
    c.recompute_bounds();
    return c;
}

std::vector<Vec3> random_points(std::size_t n, std::uint64_t seed) {
    std::vector<Vec3> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = Vec3(rng::uniform(seed, 3 * i), rng::uniform(seed, 3 * i + 1),
                      rng::uniform(seed, 3 * i + 2));
    }
    return pts;
}

}  // namespace

TEST_CASE("spatial index equals brute force") {
    const auto pts = random_points(100, 31);
    const double r = 0.18;
    SpatialIndex index(pts, r);
    for (int q = 0; q < 50; ++q) {
        const Vec3 query(rng::uniform(77, 3 * static_cast<std::uint64_t>(q)),
                         rng::uniform(77, 3 * static_cast<std::uint64_t>(q) + 1),
                         rng::uniform(77, 3 * static_cast<std::uint64_t>(q) + 2));
        std::set<std::uint32_t> brute;
        for (std::uint32_t i = 0; i < pts.size(); ++i) {
            if ((pts[i] - query).norm() <= r) brute.insert(i);
        }
        const auto got = index.query(query, r);
        CHECK(std::set<std::uint32_t>(got.begin(), got.end()) == brute);
    }
}

TEST_CASE("spatial index edge cases") {
    SECTION("single point finds itself") {
        std::vector<Vec3> one{{0.5, 0.5, 0.5}};
        SpatialIndex index(one, 0.1);
        const auto got = index.query(one[0], 0.05);
        REQUIRE(got.size() == 1);
        CHECK(got[0] == 0);
    }
    SECTION("radius zero returns only exact coincidences") {
        std::vector<Vec3> pts{{0, 0, 0}, {0, 0, 0}, {1e-12, 0, 0}};
        SpatialIndex index(pts, 0.5);
        const auto got = index.query(Vec3(0, 0, 0), 0.0);
        CHECK(got == std::vector<std::uint32_t>{0, 1});
    }
}

TEST_CASE("mean activation distance") {
    SECTION("singleton cloud is isolated") {
        auto cloud = synthetic_cloud({{0, 0, 0}}, {{-1.f, 0.f, 0.f}});
        const auto index = build_index(cloud, 0.1);
        const auto m = mean_activation_distance(cloud, index, 0, 0.1);
        CHECK(m.isolated());
        CHECK(m.k == 0);
    }
    SECTION("coincident pair reports the exact activation distance") {
        auto cloud = synthetic_cloud({{0.2, 0.3, 0.4}, {0.2, 0.3, 0.4}},
                                     {{-1.f, 0.f, 0.f}, {0.f, -1.f, 0.f}});
        const auto index = build_index(cloud, 1.0 / 60.0);
        for (std::int64_t i : {0, 1}) {
            const auto m = mean_activation_distance(cloud, index, i, 1.0 / 60.0);
            CHECK(m.k == 1);
            CHECK_THAT(m.d_bar, Catch::Matchers::WithinRel(std::sqrt(2.0), 1e-12));
        }
    }
    SECTION("matches the brute-force double loop") {
        const auto pts = random_points(1000, 8);
        std::vector<std::vector<float>> acts(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            acts[i] = {static_cast<float>(rng::uniform(9, 4 * i)),
                       static_cast<float>(rng::uniform(9, 4 * i + 1)),
                       static_cast<float>(rng::uniform(9, 4 * i + 2)),
                       static_cast<float>(rng::uniform(9, 4 * i + 3))};
        }
        auto cloud = synthetic_cloud(pts, acts);
        const double r = 0.15;
        const auto index = build_index(cloud, r);
        for (std::int64_t q = 0; q < 1000; q += 50) {
            double sum = 0.0;
            int k = 0;
            for (std::int64_t j = 0; j < cloud.size(); ++j) {
                if (j == q) continue;
                if ((pts[static_cast<std::size_t>(j)] - pts[static_cast<std::size_t>(q)]).norm() > r) continue;
                double d2 = 0.0;
                for (int b = 0; b < 4; ++b) {
                    const double d =
                        static_cast<double>(acts[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)]) -
                        static_cast<double>(acts[static_cast<std::size_t>(q)][static_cast<std::size_t>(b)]);
                    d2 += d * d;
                }
                sum += std::sqrt(d2);
                ++k;
            }
            const auto m = mean_activation_distance(cloud, index, q, r);
            CHECK(m.k == k);
            if (k > 0) CHECK_THAT(m.d_bar, Catch::Matchers::WithinAbs(sum / k, 1e-12));
        }
    }
}

TEST_CASE("distance field") {
    SECTION("duplicated-position pairs give exact pairwise distances") {
        std::vector<Vec3> pts;
        std::vector<std::vector<float>> acts;
        for (int i = 0; i < 20; ++i) {
            const Vec3 p(0.1 * i, 0.0, 0.0);
            pts.push_back(p);
            pts.push_back(p);
            const float a = static_cast<float>(i) * 0.1f;
            acts.push_back({a, 0.f});
            acts.push_back({a + 0.5f, 0.f});
        }
        auto cloud = synthetic_cloud(pts, acts);
        const auto field = distance_field(cloud, cloud.size(), 0.01, 123, 2);
        CHECK(field.isolated_count == 0);
        for (std::size_t k = 0; k < field.subset_indices.size(); ++k) {
            CHECK(field.k_neighbors[k] == 1);
            CHECK_THAT(field.d_bar[k], Catch::Matchers::WithinRel(0.5, 1e-6));
        }
    }
    SECTION("subset selection is deterministic and without replacement") {
        const auto pts = random_points(500, 3);
        std::vector<std::vector<float>> acts(pts.size(), {0.f});
        auto cloud = synthetic_cloud(pts, acts);
        const auto f1 = distance_field(cloud, 100, 0.2, 77, 1);
        const auto f2 = distance_field(cloud, 100, 0.2, 77, 4);
        CHECK(f1.subset_indices == f2.subset_indices);
        CHECK(f1.d_bar == f2.d_bar);
        std::set<std::int64_t> unique(f1.subset_indices.begin(), f1.subset_indices.end());
        CHECK(unique.size() == f1.subset_indices.size());
    }
    SECTION("d_bar is invariant under rigid motion of the positions") {
        const auto pts = random_points(400, 21);
        std::vector<std::vector<float>> acts(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            acts[i] = {static_cast<float>(rng::uniform(5, 2 * i)),
                       static_cast<float>(rng::uniform(5, 2 * i + 1))};
        }
        auto cloud = synthetic_cloud(pts, acts);
        const auto f1 = distance_field(cloud, 400, 0.15, 9, 1);

        Eigen::AngleAxisd rot(1.1, Vec3(0.3, -0.5, 0.8).normalized());
        auto moved = pts;
        for (auto& p : moved) p = rot * p + Vec3(3, 4, -5);
        auto cloud2 = synthetic_cloud(moved, acts);
        const auto f2 = distance_field(cloud2, 400, 0.15, 9, 1);
        REQUIRE(f1.subset_indices == f2.subset_indices);
        for (std::size_t k = 0; k < f1.d_bar.size(); ++k) {
            CHECK(f1.k_neighbors[k] == f2.k_neighbors[k]);
            CHECK_THAT(f1.d_bar[k], Catch::Matchers::WithinAbs(f2.d_bar[k], 1e-9));
        }
    }
}
