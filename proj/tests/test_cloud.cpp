#include <catch2/catch_amalgamated.hpp>

#include "reachcloud/cloud.hpp"
#include "reachcloud/rod.hpp"

using namespace reachcloud;

TEST_CASE("activation sampling") {
    const auto design = minimal_design(deg2rad(108.0), 0.0);
    SamplerConfig s;
    s.seed = 42;
    SECTION("same (seed, index) gives identical vectors, in any order") {
        const auto a = sample_activation(design, s, 17);
        const auto b = sample_activation(design, s, 5);
        const auto a2 = sample_activation(design, s, 17);
        CHECK(a == a2);
        CHECK(a != b);
    }
    SECTION("per-coordinate mean matches the uniform law") {
        double sum = 0.0;
        const std::int64_t n = 1000000;
        for (std::int64_t k = 0; k < n; ++k) sum += sample_coordinate(s, k, 3, static_cast<int>(k % 3));
        CHECK_THAT(sum / static_cast<double>(n), Catch::Matchers::WithinAbs(-5.0 / 6.0, 0.002));
    }
    SECTION("degenerate bounds give the constant") {
        SamplerConfig c = s;
        c.gamma_min = c.gamma_max = -0.75;
        for (std::int64_t k : {0, 3, 1000}) {
            for (double g : sample_activation(design, c, k)) CHECK(g == -0.75);
        }
    }
}

TEST_CASE("color map") {
    CHECK(color_map(std::vector<double>{0.0, 0.0, 0.0}) == std::array<unsigned char, 3>{0, 0, 0});
    CHECK(color_map(std::vector<double>{-5.0 / 3.0, 0.0, 0.0}) ==
          std::array<unsigned char, 3>{255, 0, 0});
    const double g = -5.0 / 6.0;  // midpoint: rounds half up
    CHECK(color_map(std::vector<double>{g, g, g}) == std::array<unsigned char, 3>{128, 128, 128});
    // four bundles map the first three channels
    CHECK(color_map(std::vector<double>{0.0, 0.0, -5.0 / 3.0, -1.0}) ==
          std::array<unsigned char, 3>{0, 0, 255});
}

TEST_CASE("cloud generation") {
    const auto design = minimal_design(deg2rad(108.0), deg2rad(2.0));
    SECTION("single zero sample lands on the straight tip") {
        SamplerConfig s;
        s.n_samples = 1;
        s.gamma_min = s.gamma_max = 0.0;
        s.steps = 50;
        const auto cloud = generate_cloud(design, s, 1);
        REQUIRE(cloud.size() == 1);
        CHECK((cloud.positions[0] - Vec3(0, 0, 1)).norm() < 1e-9);
        CHECK(cloud.bounds.lo == cloud.positions[0]);
        CHECK(cloud.bounds.hi == cloud.positions[0]);
    }
    SECTION("worker count never changes the output") {
        SamplerConfig s;
        s.n_samples = 400;
        s.seed = 7;
        s.steps = 60;
        const auto one = generate_cloud(design, s, 1);
        const auto many = generate_cloud(design, s, 5);
        REQUIRE(one.size() == many.size());
        for (std::int64_t i = 0; i < one.size(); ++i) {
            CHECK(one.positions[static_cast<std::size_t>(i)] ==
                  many.positions[static_cast<std::size_t>(i)]);
        }
        CHECK(one.activations == many.activations);
        CHECK(one.colors == many.colors);
        for (float g : one.activations) {
            CHECK(g >= s.gamma_min);
            CHECK(g <= s.gamma_max);
        }
        // bounding box is tight
        Aabb box;
        for (const auto& p : one.positions) box.expand(p);
        CHECK(box.lo == one.bounds.lo);
        CHECK(box.hi == one.bounds.hi);
    }
    SECTION("invalid design aborts before sampling") {
        auto bad = design;
        bad.geometry.inner_radius = bad.geometry.outer_radius * 2.0;
        SamplerConfig s;
        s.n_samples = 10;
        CHECK_THROWS_AS(generate_cloud(bad, s, 1), ValidationError);
    }
    SECTION("stored activations reproduce stored positions") {
        SamplerConfig s;
        s.n_samples = 50;
        s.seed = 3;
        s.steps = 80;
        const auto cloud = generate_cloud(design, s, 2);
        for (std::int64_t i = 0; i < cloud.size(); i += 7) {
            const Vec3 again = reintegrate_point(design, s, cloud.activation(i));
            CHECK((again - cloud.positions[static_cast<std::size_t>(i)]).norm() <= 1e-12);
        }
    }
}

TEST_CASE("cloud symmetry for the symmetric design") {
    const auto design = minimal_design(0.0, 0.0);
    SECTION("pinned equal helical activation stays in the plane") {
        SamplerConfig s;
        s.steps = 100;
        for (int k = 0; k < 40; ++k) {
            auto act = ActivationState::zeros(design);
            const double g1 = -rng::uniform(11, 2 * static_cast<std::uint64_t>(k)) * 5.0 / 3.0;
            const double g3 = -rng::uniform(11, 2 * static_cast<std::uint64_t>(k) + 1) * 5.0 / 3.0;
            act.gamma[0][0] = g1;
            act.gamma[1][0] = g1;
            act.gamma[2][0] = g3;
            const Vec3 tip = end_effector(integrate(design, act, s.steps));
            CHECK(std::abs(tip.x()) < 1e-6);
        }
    }
    SECTION("full cloud is statistically mirror symmetric") {
        SamplerConfig s;
        s.n_samples = 1500;
        s.seed = 99;
        s.steps = 60;
        const auto cloud = generate_cloud(design, s);
        std::vector<Vec3> mirrored(cloud.positions);
        for (auto& p : mirrored) p.x() = -p.x();
        const auto res = energy_two_sample_test(cloud.positions, mirrored, 0.01, 199, 1234,
                                                default_workers());
        INFO("energy statistic " << res.statistic << " p = " << res.p_value);
        CHECK_FALSE(res.reject);
    }
}

TEST_CASE("curvature statistics") {
    const auto stations = default_stations(1.0);
    SECTION("zero-width bounds put all mass at zero curvature") {
        const auto design = minimal_design(deg2rad(108.0), deg2rad(2.0));
        SamplerConfig s;
        s.n_samples = 500;
        s.gamma_min = s.gamma_max = 0.0;
        const auto stats = curvature_statistics(design, s, stations, 1);
        for (const auto& st : stats.stations) {
            CHECK(st.hist.lo == 0.0);
            CHECK(st.hist.hi == 0.0);
            CHECK(st.quantiles[4] == 0.0);
            CHECK(st.hist.total() == s.n_samples);
        }
    }
    SECTION("tapering widens and raises the distal distribution") {
        SamplerConfig s;
        s.n_samples = 4000;
        s.seed = 5;
        const auto tapered =
            curvature_statistics(minimal_design(deg2rad(108.0), deg2rad(3.0)), s, {0.9}, 1);
        const auto straight =
            curvature_statistics(minimal_design(deg2rad(108.0), 0.0), s, {0.9}, 1);
        CHECK(tapered.stations[0].quantiles[4] > straight.stations[0].quantiles[4]);
        CHECK(tapered.stations[0].hist.hi - tapered.stations[0].hist.lo >
              straight.stations[0].hist.hi - straight.stations[0].hist.lo);
    }
    SECTION("histogram mass is conserved at every station") {
        const auto design = minimal_design(deg2rad(54.0), deg2rad(1.0));
        SamplerConfig s;
        s.n_samples = 2500;
        s.seed = 17;
        const auto stats = curvature_statistics(design, s, stations, 2);
        REQUIRE(stats.stations.size() == stations.size());
        for (const auto& st : stats.stations) CHECK(st.hist.total() == s.n_samples);
    }
}
