#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "phconn/filtration.hpp"

namespace phconn {

/// One merging event of 0-dimensional persistence: two components join at
/// distance eps, caused by the edge {i, j}. The barcode tuple is (0, eps/2).
struct MergeEvent {
    double eps = 0.0;
    int i = 0, j = 0;        // causing edge, i < j
    int killed_vertex = 0;   // component representative that dies here

    double death() const { return 0.5 * eps; }
};

struct Barcode {
    int vertex_count = 0;
    std::vector<MergeEvent> events;  // ascending eps; exactly vertex_count - 1 entries
    int essential_count = 1;         // the one component that never dies
};

/// Single-linkage engine: processes edges in filtration order with union-find
/// (path compression, union by rank). An edge joining two distinct components
/// emits a MergeEvent; the dying representative is the larger of the two
/// component elders, matching the pairing of boundary-matrix reduction.
Barcode persistence_unionfind(const FilteredComplex& complex);

/// The merging multiset: (distance, causing edge) for every event.
inline const std::vector<MergeEvent>& merge_set(const Barcode& barcode) {
    return barcode.events;
}

/// Sparse Z2 boundary matrix in filtration order: vertex columns first (all
/// zero), then one column per edge holding its two endpoint rows. Columns are
/// sorted ascending, so the low entry of a nonzero column is its back().
struct ReductionMatrix {
    int vertex_count = 0;
    std::vector<std::vector<int>> columns;

    int column_count() const { return static_cast<int>(columns.size()); }
    int low(int col) const {
        const auto& column = columns[static_cast<size_t>(col)];
        return column.empty() ? -1 : column.back();
    }
    /// No two nonzero columns share a low entry.
    bool is_reduced() const;
};

ReductionMatrix boundary_matrix(const FilteredComplex& complex);

/// Z2 column addition: target += origin (sorted symmetric difference).
void add_column(ReductionMatrix& matrix, int origin, int target);

/// Left-to-right column additions until no two nonzero columns share a low.
ReductionMatrix reduce_standard(ReductionMatrix matrix);

/// One round of conflict-free additions: for every row owned as low by two or
/// more columns, the lowest-indexed owner is the origin and every other owner
/// a target. Origins and targets are disjoint and each target appears once,
/// so all returned additions are data-independent.
std::vector<std::pair<int, int>> reduction_moves(const ReductionMatrix& matrix);

struct ParallelReduction {
    ReductionMatrix matrix;
    int iterations = 0;
};

/// Applies reduction_moves rounds until none remain. Additions within a round
/// may run concurrently (threads > 1) or serially; the output is identical
/// either way.
ParallelReduction reduce_parallel(ReductionMatrix matrix, int threads = 1);

/// (low, column) of every nonzero column, ascending by column.
std::vector<std::pair<int, int>> low_pairs(const ReductionMatrix& reduced);

/// Reads the merge events off a reduced matrix: each nonzero edge column kills
/// the vertex at its low entry.
Barcode barcode_from_reduced(const ReductionMatrix& reduced, const FilteredComplex& complex);

/// Wire format: one `birth<TAB>death<TAB>i<TAB>j` line per event (birth is
/// always 0, death printed with 17 significant digits), then one `essential`
/// line for the surviving component.
std::string format_barcode(const Barcode& barcode);

std::string reduced_to_json(const ReductionMatrix& matrix);

struct BenchRow {
    int batch_size = 0;
    int dim = 0;
    int repetitions = 0;
    double standard_mean_s = 0.0;
    double parallel_mean_s = 0.0;
    double parallel_mean_iterations = 0.0;
    bool engines_agree = true;
};

/// Times both reduction engines on standard-normal clouds in R^dim and cross
/// checks their pairings on every trial. repetitions == 0 yields no rows.
std::vector<BenchRow> bench_reduction(const std::vector<int>& sizes, int dim, int repetitions,
                                      uint64_t seed, int threads = 1);

std::string bench_to_csv(const std::vector<BenchRow>& rows);

}  // namespace phconn
