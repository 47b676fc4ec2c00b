#include "doctest.h"

#include <algorithm>

#include "oracles.hpp"
#include "phconn/filtration.hpp"
#include "phconn/rng.hpp"

using namespace phconn;

namespace {

PointCloud path_cloud() {
    PointCloud cloud;
    cloud.points = {{0.0}, {1.0}, {3.0}};
    return cloud;
}

}  // namespace

TEST_CASE("single point builds a vertex-only complex") {
    PointCloud cloud;
    cloud.points = {{4.0, 2.0}};
    const auto complex = build_vr(cloud);
    CHECK(complex.vertex_count == 1);
    CHECK(complex.edges.empty());
}

TEST_CASE("edges come out in filtration order with radius eps/2") {
    const auto complex = build_vr(path_cloud());
    REQUIRE(complex.edge_count() == 3);
    CHECK(complex.edges[0].i == 0);
    CHECK(complex.edges[0].j == 1);
    CHECK(complex.edges[0].eps == 1.0);
    CHECK(complex.edges[0].radius() == 0.5);
    CHECK(complex.edges[1].i == 1);
    CHECK(complex.edges[1].j == 2);
    CHECK(complex.edges[1].eps == 2.0);
    CHECK(complex.edges[1].radius() == 1.0);
    CHECK(complex.edges[2].i == 0);
    CHECK(complex.edges[2].j == 2);
    CHECK(complex.edges[2].eps == 3.0);
    CHECK(complex.edges[2].radius() == 1.5);
}

TEST_CASE("complex_at_radius thresholds the sorted edges") {
    const auto complex = build_vr(path_cloud());
    CHECK(complex_at_radius(complex, 0.0).edges.empty());
    const auto mid = complex_at_radius(complex, 1.0);
    CHECK(mid.edges == std::vector<IndexPair>{{0, 1}, {1, 2}});
    const auto full = complex_at_radius(complex, complex.edges.back().radius());
    CHECK(static_cast<int>(full.edges.size()) == 3);
    CHECK_THROWS_AS(complex_at_radius(complex, -0.1), std::invalid_argument);
}

TEST_CASE("nesting: edge sets grow monotonically with the radius") {
    Rng rng(7);
    const auto cloud = oracles::gaussian_cloud(12, 3, Norm::L1, rng);
    const auto complex = build_vr(cloud);
    CHECK(complex.edge_count() == 12 * 11 / 2);
    size_t previous = 0;
    for (double r = 0.0; r <= complex.edges.back().radius() + 0.1; r += 0.05) {
        const auto slice = complex_at_radius(complex, r);
        CHECK(slice.edges.size() >= previous);
        previous = slice.edges.size();
    }
}

TEST_CASE("permuted cloud yields the same multiset of edge values") {
    Rng rng(8);
    auto cloud = oracles::gaussian_cloud(10, 2, Norm::L2, rng);
    auto values = [](const FilteredComplex& c) {
        std::vector<double> eps;
        for (const auto& edge : c.edges) {
            eps.push_back(edge.eps);
        }
        std::sort(eps.begin(), eps.end());
        return eps;
    };
    const auto reference = values(build_vr(cloud));
    rng.shuffle(cloud.points);
    CHECK(values(build_vr(cloud)) == reference);
}

TEST_CASE("tied distances order lexicographically") {
    PointCloud cloud;
    cloud.points = {{0.0}, {1.0}, {2.0}};  // {0,1} and {1,2} both at distance 1
    const auto complex = build_vr(cloud);
    CHECK(complex.edges[0].i == 0);
    CHECK(complex.edges[0].j == 1);
    CHECK(complex.edges[1].i == 1);
    CHECK(complex.edges[1].j == 2);
}

TEST_CASE("json dump lists edges in filtration order") {
    const auto complex = build_vr(path_cloud());
    CHECK(complex_to_json(complex) ==
          "{\"vertices\": 3, \"edges\": [[0, 1, 1], [1, 2, 2], [0, 2, 3]]}");
}
