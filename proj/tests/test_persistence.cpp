#include "doctest.h"

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "phconn/persistence.hpp"
#include "phconn/rng.hpp"

using namespace phconn;

namespace {

PointCloud path_cloud() {
    PointCloud cloud;
    cloud.points = {{0.0}, {1.0}, {3.0}};
    return cloud;
}

std::vector<double> event_distances(const Barcode& barcode) {
    std::vector<double> values;
    for (const auto& event : barcode.events) {
        values.push_back(event.eps);
    }
    std::sort(values.begin(), values.end());
    return values;
}

bool same_pairing(const Barcode& a, const Barcode& b) {
    if (a.events.size() != b.events.size()) {
        return false;
    }
    for (size_t k = 0; k < a.events.size(); ++k) {
        if (a.events[k].i != b.events[k].i || a.events[k].j != b.events[k].j ||
            a.events[k].eps != b.events[k].eps ||
            a.events[k].killed_vertex != b.events[k].killed_vertex) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("two points merge once at their distance") {
    PointCloud cloud;
    cloud.points = {{0.0}, {0.75}};
    const auto barcode = persistence_unionfind(build_vr(cloud));
    REQUIRE(barcode.events.size() == 1);
    CHECK(barcode.events[0].eps == 0.75);
    CHECK(barcode.events[0].i == 0);
    CHECK(barcode.events[0].j == 1);
    CHECK(barcode.events[0].death() == 0.375);
    CHECK(barcode.essential_count == 1);
}

TEST_CASE("1-D path: the long edge causes no event") {
    const auto barcode = persistence_unionfind(build_vr(path_cloud()));
    REQUIRE(barcode.events.size() == 2);
    CHECK(barcode.events[0].eps == 1.0);
    CHECK(barcode.events[0].i == 0);
    CHECK(barcode.events[0].j == 1);
    CHECK(barcode.events[0].killed_vertex == 1);
    CHECK(barcode.events[1].eps == 2.0);
    CHECK(barcode.events[1].i == 1);
    CHECK(barcode.events[1].j == 2);
    CHECK(barcode.events[1].killed_vertex == 2);
}

TEST_CASE("merge_set equals the MST weights of random clouds") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const Norm norm = trial % 2 == 0 ? Norm::L1 : Norm::L2;
        const auto cloud = oracles::gaussian_cloud(3 + trial, 1 + trial % 5, norm, rng);
        const auto barcode = persistence_unionfind(build_vr(cloud));
        CHECK(static_cast<int>(barcode.events.size()) == cloud.size() - 1);
        CHECK(event_distances(barcode) == oracles::kruskal_mst_weights(cloud));
    }
}

TEST_CASE("uniform grid spacing h merges b-1 times at h") {
    PointCloud cloud;
    for (int k = 0; k < 6; ++k) {
        cloud.points.push_back({0.25 * k});
    }
    const auto events = merge_set(persistence_unionfind(build_vr(cloud)));
    REQUIRE(events.size() == 5);
    for (const auto& event : events) {
        CHECK(event.eps == 0.25);
    }
}

TEST_CASE("boundary matrix has zero vertex columns and two-entry edge columns") {
    const auto complex = build_vr(path_cloud());
    const auto matrix = boundary_matrix(complex);
    REQUIRE(matrix.column_count() == 6);
    for (int col = 0; col < 3; ++col) {
        CHECK(matrix.columns[static_cast<size_t>(col)].empty());
    }
    CHECK(matrix.columns[3] == std::vector<int>{0, 1});
    CHECK(matrix.columns[4] == std::vector<int>{1, 2});
    CHECK(matrix.columns[5] == std::vector<int>{0, 2});
}

TEST_CASE("standard reduction of the path example") {
    const auto complex = build_vr(path_cloud());
    const auto reduced = reduce_standard(boundary_matrix(complex));
    CHECK(reduced.is_reduced());
    CHECK(reduced.low(3) == 1);
    CHECK(reduced.low(4) == 2);
    CHECK(reduced.columns[5].empty());
    CHECK(low_pairs(reduced) == std::vector<std::pair<int, int>>{{1, 3}, {2, 4}});
}

TEST_CASE("an all-zero matrix is already reduced") {
    ReductionMatrix matrix;
    matrix.vertex_count = 4;
    matrix.columns.assign(4, {});
    CHECK(matrix.is_reduced());
    const auto reduced = reduce_standard(matrix);
    for (const auto& column : reduced.columns) {
        CHECK(column.empty());
    }
    const auto parallel = reduce_parallel(matrix);
    CHECK(parallel.iterations == 0);
}

TEST_CASE("parallel reduction matches the standard engine on the path example") {
    const auto complex = build_vr(path_cloud());
    const auto standard = reduce_standard(boundary_matrix(complex));
    const auto parallel = reduce_parallel(boundary_matrix(complex));
    CHECK(parallel.matrix.is_reduced());
    CHECK(low_pairs(parallel.matrix) == low_pairs(standard));
    CHECK(parallel.iterations > 0);
}

TEST_CASE("reduction_moves never reuses a column as origin and target") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const auto cloud = oracles::gaussian_cloud(16, 3, Norm::L1, rng);
        auto matrix = boundary_matrix(build_vr(cloud));
        while (true) {
            const auto moves = reduction_moves(matrix);
            if (moves.empty()) {
                break;
            }
            std::set<int> origins;
            std::set<int> targets;
            for (const auto& [origin, target] : moves) {
                origins.insert(origin);
                CHECK(targets.insert(target).second);  // each target exactly once
            }
            for (const int target : targets) {
                CHECK(origins.count(target) == 0);
            }
            // Monotone progress: every targeted column drops its low or zeroes out.
            std::vector<int> lows_before;
            for (const auto& [origin, target] : moves) {
                lows_before.push_back(matrix.low(target));
            }
            for (const auto& [origin, target] : moves) {
                add_column(matrix, origin, target);
            }
            size_t move_index = 0;
            for (const auto& [origin, target] : moves) {
                const int low_after = matrix.low(target);
                CHECK((low_after == -1 || low_after < lows_before[move_index]));
                ++move_index;
            }
        }
        CHECK(matrix.is_reduced());
    }
}

TEST_CASE("three engines agree on random and tie-degenerate clouds") {
    Rng rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const Norm norm = trial % 2 == 0 ? Norm::L1 : Norm::L2;
        const PointCloud cloud =
            trial % 3 == 0 ? oracles::lattice_cloud(3 + trial % 20, 1 + trial % 4, norm, rng)
                           : oracles::gaussian_cloud(3 + trial % 20, 1 + trial % 4, norm, rng);
        const auto complex = build_vr(cloud);
        const auto from_unionfind = persistence_unionfind(complex);
        const auto standard = reduce_standard(boundary_matrix(complex));
        const auto parallel = reduce_parallel(boundary_matrix(complex), 1 + trial % 3);
        CHECK(standard.is_reduced());
        CHECK(parallel.matrix.is_reduced());
        CHECK(same_pairing(from_unionfind, barcode_from_reduced(standard, complex)));
        CHECK(same_pairing(from_unionfind, barcode_from_reduced(parallel.matrix, complex)));
    }
}

TEST_CASE("thread count does not change the reduced matrix") {
    Rng rng(19);
    const auto cloud = oracles::gaussian_cloud(24, 4, Norm::L1, rng);
    const auto matrix = boundary_matrix(build_vr(cloud));
    const auto serial = reduce_parallel(matrix, 1);
    const auto threaded = reduce_parallel(matrix, 8);
    CHECK(serial.iterations == threaded.iterations);
    CHECK(serial.matrix.columns == threaded.matrix.columns);
}

TEST_CASE("barcode wire format") {
    PointCloud cloud;
    cloud.points = {{0.0}, {1.0}};
    const auto barcode = persistence_unionfind(build_vr(cloud));
    CHECK(format_barcode(barcode) == "0\t0.5\t0\t1\nessential\n");
}

TEST_CASE("bench_reduction cross-checks engines and honors repetitions") {
    const auto rows = bench_reduction({8, 12}, 3, 2, 99);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.engines_agree);
        CHECK(row.standard_mean_s >= 0.0);
        CHECK(row.parallel_mean_s >= 0.0);
        CHECK(row.parallel_mean_iterations >= 0.0);
    }
    CHECK(bench_reduction({8}, 3, 0, 99).empty());
    // A single point has no events; the engines still agree.
    const auto degenerate = bench_reduction({1}, 3, 1, 99);
    REQUIRE(degenerate.size() == 1);
    CHECK(degenerate.front().engines_agree);
}
