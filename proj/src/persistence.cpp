#include "phconn/persistence.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "phconn/io.hpp"
#include "phconn/parallel.hpp"
#include "phconn/rng.hpp"

namespace phconn {

namespace {

// Union-find over vertex indices; each root also tracks its elder, the
// smallest vertex index in the component.
struct DisjointSet {
    std::vector<int> parent;
    std::vector<int> rank;
    std::vector<int> elder;

    explicit DisjointSet(int count)
        : parent(static_cast<size_t>(count)), rank(static_cast<size_t>(count), 0),
          elder(static_cast<size_t>(count)) {
        std::iota(parent.begin(), parent.end(), 0);
        std::iota(elder.begin(), elder.end(), 0);
    }

    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }

    // Returns the elder of the component that dies; -1 if already joined.
    int unite(int a, int b) {
        int ra = find(a);
        int rb = find(b);
        if (ra == rb) {
            return -1;
        }
        const int elder_a = elder[static_cast<size_t>(ra)];
        const int elder_b = elder[static_cast<size_t>(rb)];
        if (rank[static_cast<size_t>(ra)] < rank[static_cast<size_t>(rb)]) {
            std::swap(ra, rb);
        }
        parent[static_cast<size_t>(rb)] = ra;
        if (rank[static_cast<size_t>(ra)] == rank[static_cast<size_t>(rb)]) {
            ++rank[static_cast<size_t>(ra)];
        }
        elder[static_cast<size_t>(ra)] = std::min(elder_a, elder_b);
        return std::max(elder_a, elder_b);
    }
};

}  // namespace

Barcode persistence_unionfind(const FilteredComplex& complex) {
    if (complex.vertex_count < 1) {
        throw std::invalid_argument("persistence_unionfind: complex has no vertices");
    }
    Barcode barcode;
    barcode.vertex_count = complex.vertex_count;
    DisjointSet components(complex.vertex_count);
    for (const auto& edge : complex.edges) {
        const int killed = components.unite(edge.i, edge.j);
        if (killed >= 0) {
            barcode.events.push_back({edge.eps, edge.i, edge.j, killed});
        }
    }
    return barcode;
}

bool ReductionMatrix::is_reduced() const {
    std::unordered_set<int> seen;
    for (int col = 0; col < column_count(); ++col) {
        const int l = low(col);
        if (l >= 0 && !seen.insert(l).second) {
            return false;
        }
    }
    return true;
}

ReductionMatrix boundary_matrix(const FilteredComplex& complex) {
    ReductionMatrix matrix;
    matrix.vertex_count = complex.vertex_count;
    matrix.columns.resize(static_cast<size_t>(complex.vertex_count) + complex.edges.size());
    for (size_t k = 0; k < complex.edges.size(); ++k) {
        const auto& edge = complex.edges[k];
        matrix.columns[static_cast<size_t>(complex.vertex_count) + k] = {edge.i, edge.j};
    }
    return matrix;
}

void add_column(ReductionMatrix& matrix, int origin, int target) {
    const auto& src = matrix.columns[static_cast<size_t>(origin)];
    auto& dst = matrix.columns[static_cast<size_t>(target)];
    std::vector<int> sum;
    sum.reserve(src.size() + dst.size());
    std::set_symmetric_difference(src.begin(), src.end(), dst.begin(), dst.end(),
                                  std::back_inserter(sum));
    dst = std::move(sum);
}

ReductionMatrix reduce_standard(ReductionMatrix matrix) {
    // pivot_owner[row] = column whose low is row, -1 if unclaimed.
    std::vector<int> pivot_owner(static_cast<size_t>(matrix.vertex_count), -1);
    for (int col = 0; col < matrix.column_count(); ++col) {
        int l = matrix.low(col);
        while (l >= 0 && pivot_owner[static_cast<size_t>(l)] >= 0) {
            add_column(matrix, pivot_owner[static_cast<size_t>(l)], col);
            l = matrix.low(col);
        }
        if (l >= 0) {
            pivot_owner[static_cast<size_t>(l)] = col;
        }
    }
    return matrix;
}

std::vector<std::pair<int, int>> reduction_moves(const ReductionMatrix& matrix) {
    // owners[row] = columns with low == row, in ascending column order.
    std::vector<std::vector<int>> owners(static_cast<size_t>(matrix.vertex_count));
    for (int col = 0; col < matrix.column_count(); ++col) {
        const int l = matrix.low(col);
        if (l >= 0) {
            owners[static_cast<size_t>(l)].push_back(col);
        }
    }
    std::vector<std::pair<int, int>> moves;
    for (const auto& columns : owners) {
        if (columns.size() < 2) {
            continue;
        }
        const int origin = columns.front();
        for (size_t k = 1; k < columns.size(); ++k) {
            moves.emplace_back(origin, columns[k]);
        }
    }
    return moves;
}

ParallelReduction reduce_parallel(ReductionMatrix matrix, int threads) {
    ParallelReduction result;
    while (true) {
        const auto moves = reduction_moves(matrix);
        if (moves.empty()) {
            break;
        }
        ++result.iterations;
        // Each move writes only its target and reads only its origin; origins
        // are never targets within a round, so the additions commute.
        parallel_for(moves.size(), threads, [&matrix, &moves](size_t begin, size_t end) {
            for (size_t k = begin; k < end; ++k) {
                add_column(matrix, moves[k].first, moves[k].second);
            }
        });
    }
    result.matrix = std::move(matrix);
    return result;
}

std::vector<std::pair<int, int>> low_pairs(const ReductionMatrix& reduced) {
    std::vector<std::pair<int, int>> pairs;
    for (int col = 0; col < reduced.column_count(); ++col) {
        const int l = reduced.low(col);
        if (l >= 0) {
            pairs.emplace_back(l, col);
        }
    }
    return pairs;
}

Barcode barcode_from_reduced(const ReductionMatrix& reduced, const FilteredComplex& complex) {
    Barcode barcode;
    barcode.vertex_count = complex.vertex_count;
    for (int col = complex.vertex_count; col < reduced.column_count(); ++col) {
        const int l = reduced.low(col);
        if (l < 0) {
            continue;
        }
        const auto& edge = complex.edges[static_cast<size_t>(col - complex.vertex_count)];
        barcode.events.push_back({edge.eps, edge.i, edge.j, l});
    }
    return barcode;
}

std::string format_barcode(const Barcode& barcode) {
    std::ostringstream out;
    for (const auto& event : barcode.events) {
        out << "0\t" << format_double(event.death()) << '\t' << event.i << '\t' << event.j
            << '\n';
    }
    for (int k = 0; k < barcode.essential_count; ++k) {
        out << "essential\n";
    }
    return out.str();
}

std::string reduced_to_json(const ReductionMatrix& matrix) {
    std::ostringstream out;
    out << "{\"vertices\": " << matrix.vertex_count << ", \"columns\": [";
    for (int col = 0; col < matrix.column_count(); ++col) {
        if (col > 0) {
            out << ", ";
        }
        out << "[";
        const auto& column = matrix.columns[static_cast<size_t>(col)];
        for (size_t k = 0; k < column.size(); ++k) {
            if (k > 0) {
                out << ", ";
            }
            out << column[k];
        }
        out << "]";
    }
    out << "]}";
    return out.str();
}

namespace {

PointCloud gaussian_cloud(int batch_size, int dim, Rng& rng) {
    PointCloud cloud;
    cloud.norm = Norm::L1;
    cloud.points.resize(static_cast<size_t>(batch_size));
    for (auto& point : cloud.points) {
        point.resize(static_cast<size_t>(dim));
        for (auto& coordinate : point) {
            coordinate = rng.normal();
        }
    }
    return cloud;
}

bool pairings_match(const Barcode& a, const Barcode& b) {
    if (a.events.size() != b.events.size()) {
        return false;
    }
    for (size_t k = 0; k < a.events.size(); ++k) {
        const auto& ea = a.events[k];
        const auto& eb = b.events[k];
        if (ea.i != eb.i || ea.j != eb.j || ea.eps != eb.eps ||
            ea.killed_vertex != eb.killed_vertex) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<BenchRow> bench_reduction(const std::vector<int>& sizes, int dim, int repetitions,
                                      uint64_t seed, int threads) {
    using Clock = std::chrono::steady_clock;
    std::vector<BenchRow> rows;
    if (repetitions <= 0) {
        return rows;
    }
    for (size_t s = 0; s < sizes.size(); ++s) {
        const int batch_size = sizes[s];
        if (batch_size < 1) {
            throw std::invalid_argument("bench_reduction: sizes must be >= 1");
        }
        BenchRow row;
        row.batch_size = batch_size;
        row.dim = dim;
        row.repetitions = repetitions;
        Rng rng(Rng::derive(seed, s));
        double standard_total = 0.0;
        double parallel_total = 0.0;
        double iteration_total = 0.0;
        for (int rep = 0; rep < repetitions; ++rep) {
            const auto cloud = gaussian_cloud(batch_size, dim, rng);
            const auto complex = build_vr(cloud);
            const auto boundary = boundary_matrix(complex);

            const auto t0 = Clock::now();
            const auto standard = reduce_standard(boundary);
            const auto t1 = Clock::now();
            const auto parallel = reduce_parallel(boundary, threads);
            const auto t2 = Clock::now();

            standard_total += std::chrono::duration<double>(t1 - t0).count();
            parallel_total += std::chrono::duration<double>(t2 - t1).count();
            iteration_total += parallel.iterations;

            const auto from_standard = barcode_from_reduced(standard, complex);
            const auto from_parallel = barcode_from_reduced(parallel.matrix, complex);
            const auto from_unionfind = persistence_unionfind(complex);
            if (!standard.is_reduced() || !parallel.matrix.is_reduced() ||
                !pairings_match(from_standard, from_parallel) ||
                !pairings_match(from_standard, from_unionfind)) {
                row.engines_agree = false;
            }
        }
        row.standard_mean_s = standard_total / repetitions;
        row.parallel_mean_s = parallel_total / repetitions;
        row.parallel_mean_iterations = iteration_total / repetitions;
        rows.push_back(row);
    }
    return rows;
}

std::string bench_to_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "b,n,repetitions,engine,mean_wall_s,mean_iterations,engines_agree\n";
    for (const auto& row : rows) {
        out << row.batch_size << ',' << row.dim << ',' << row.repetitions << ",standard,"
            << format_double(row.standard_mean_s) << ",," << (row.engines_agree ? 1 : 0)
            << '\n';
        out << row.batch_size << ',' << row.dim << ',' << row.repetitions << ",parallel,"
            << format_double(row.parallel_mean_s) << ','
            << format_double(row.parallel_mean_iterations) << ','
            << (row.engines_agree ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace phconn
