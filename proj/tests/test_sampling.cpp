#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "manifold_gfdm/kdtree.hpp"
#include "manifold_gfdm/sampling.hpp"

using namespace mgfdm;

TEST_CASE("sphere cloud sits on the sphere with unit normals", "[sampling]") {
    const SurfaceCloud cloud = sample_sphere(500);
    for (int i = 0; i < cloud.size(); ++i) {
        CHECK(std::abs(cloud.positions[i].norm() - 1.0) <= 1e-12);
        CHECK(std::abs(cloud.normals[i].norm() - 1.0) <= 1e-12);
        CHECK(cloud.boundary[i] == Boundary::Interior);
    }
}

TEST_CASE("sphere cloud spacing stays above the equal-area heuristic", "[sampling]") {
    const int n = 2500;
    const SurfaceCloud cloud = sample_sphere(n);
    const KdTree tree(cloud.positions);
    double min_nn = 1e30;
    for (int i = 0; i < n; ++i)
        min_nn = std::min(min_nn, std::sqrt(tree.knn(cloud.positions[i], 1, i)[0].dist2));
    CHECK(min_nn >= 0.6 * std::sqrt(4.0 * std::numbers::pi / n));
}

TEST_CASE("four relaxed sphere nodes form a regular tetrahedron", "[sampling]") {
    const SurfaceCloud cloud = sample_sphere(4, 20000);
    const double expected = std::sqrt(8.0 / 3.0);  // tetrahedron edge on the unit sphere
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const double d = (cloud.positions[i] - cloud.positions[j]).norm();
            CHECK(d == Catch::Approx(expected).margin(1e-6));
        }
}

TEST_CASE("cylinder patch node counts track the reference densities", "[sampling]") {
    const SurfaceCloud coarse = sample_cylinder_patch(1.0, std::numbers::pi, 1.5, 0.061);
    CHECK(std::abs(coarse.size() - 2597.0) <= 0.05 * 2597.0);
    const SurfaceCloud fine = sample_cylinder_patch(1.0, std::numbers::pi, 1.5, 0.031);
    CHECK(std::abs(fine.size() - 10197.0) <= 0.05 * 10197.0);
}

TEST_CASE("cylinder patch geometry and edge tagging", "[sampling]") {
    const double R = 1.0, theta = std::numbers::pi, lambda = 1.5;
    const SurfaceCloud cloud = sample_cylinder_patch(R, theta, lambda, 0.1);

    int on_edge[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.positions[i];
        CHECK(std::abs(p[0] * p[0] + p[2] * p[2] - R * R) <= 1e-12);
        REQUIRE(cloud.edge[i] >= 0);
        REQUIRE(cloud.edge[i] <= 4);
        ++on_edge[cloud.edge[i]];
        if (cloud.edge[i] != 0) {
            CHECK(std::abs(cloud.conormals[i].norm() - 1.0) <= 1e-12);
            CHECK(std::abs(cloud.conormals[i].dot(cloud.normals[i])) <= 1e-10);
        }
        if (cloud.edge[i] == 1) CHECK(p[0] == Catch::Approx(-R).margin(1e-12));
        if (cloud.edge[i] == 3) CHECK(p[0] == Catch::Approx(R).margin(1e-12));
        if (cloud.edge[i] == 2) CHECK(p[1] == -lambda);
        if (cloud.edge[i] == 4) CHECK(p[1] == lambda);
    }
    for (int e = 1; e <= 4; ++e) CHECK(on_edge[e] > 0);

    // corners belong to the arc-end edges
    for (int i = 0; i < cloud.size(); ++i)
        if (std::abs(std::abs(cloud.positions[i][0]) - R) < 1e-12 &&
            std::abs(std::abs(cloud.positions[i][1]) - lambda) < 1e-12)
            CHECK((cloud.edge[i] == 1 || cloud.edge[i] == 3));
}

TEST_CASE("invalid patch parameters are rejected", "[sampling]") {
    CHECK_THROWS_AS(sample_cylinder_patch(1.0, 0.0, 1.5, 0.05), InvalidPatch);
    CHECK_THROWS_AS(sample_cylinder_patch(1.0, 4.0, 1.5, 0.05), InvalidPatch);
    CHECK_THROWS_AS(sample_cylinder_patch(-1.0, 1.0, 1.5, 0.05), InvalidPatch);
    CHECK_THROWS_AS(sample_cylinder_patch(1.0, 1.0, 1.5, -0.1), InvalidPatch);
    CHECK_THROWS_AS(sample_flat_strip(0.0, 0.5, 0.05), InvalidPatch);
}

TEST_CASE("flat strip is the zero-curvature limit", "[sampling]") {
    const SurfaceCloud cloud = sample_flat_strip(16.0, 0.5, 0.25);
    for (int i = 0; i < cloud.size(); ++i) {
        CHECK(cloud.positions[i][2] == 0.0);
        CHECK(cloud.normals[i] == Vec3(0, 0, 1));
        CHECK(cloud.hs_values[i] == 0.0);
    }
}

TEST_CASE("level-set sampler covers the product-distance surface", "[sampling]") {
    const ImplicitSurface s = cdp_surface();
    LevelSetSampleOptions opt;
    opt.target_n = 800;
    opt.box_lo = Vec3(-1.32, -1.32, -0.34);
    opt.box_hi = Vec3(1.32, 1.32, 0.34);

    const SurfaceCloud cloud = sample_level_set(s, opt);
    CHECK(std::abs(cloud.size() - opt.target_n) <= 0.1 * opt.target_n);
    for (int i = 0; i < cloud.size(); ++i) {
        CHECK(std::abs(s.level_set(cloud.positions[i])) <= 1e-10);
        CHECK(std::abs(cloud.normals[i].norm() - 1.0) <= 1e-12);
    }

    // quasi-uniformity: nearest-neighbor spread within a factor of the median
    const KdTree tree(cloud.positions);
    std::vector<double> nn(cloud.size());
    for (int i = 0; i < cloud.size(); ++i)
        nn[i] = std::sqrt(tree.knn(cloud.positions[i], 1, i)[0].dist2);
    std::sort(nn.begin(), nn.end());
    const double median = nn[nn.size() / 2];
    CHECK(nn.front() >= 0.3 * median);
    CHECK(nn.back() <= 3.0 * median);
}
