#pragma once

#include <string>
#include <vector>

#include "phconn/geometry.hpp"

namespace phconn {

struct FilteredEdge {
    int i = 0, j = 0;  // i < j
    double eps = 0.0;  // pairwise distance; the edge enters at radius eps/2

    double radius() const { return 0.5 * eps; }
};

/// Vertices and edges of the Vietoris-Rips filtration restricted to dimension
/// <= 1. All vertices enter at radius 0; edges are sorted ascending by eps
/// with ties broken lexicographically by (i, j), which makes the filtration a
/// total order even for degenerate distance sets.
struct FilteredComplex {
    int vertex_count = 0;
    std::vector<FilteredEdge> edges;

    int edge_count() const { return static_cast<int>(edges.size()); }
};

FilteredComplex build_vr(const PointCloud& cloud);

struct ComplexSlice {
    int vertex_count = 0;
    std::vector<IndexPair> edges;
};

/// All vertices plus exactly the edges with eps/2 <= r. Throws on negative r.
ComplexSlice complex_at_radius(const FilteredComplex& complex, double r);

/// Debug/test dump: {"vertices": b, "edges": [[i, j, eps], ...]} in filtration order.
std::string complex_to_json(const FilteredComplex& complex);

}  // namespace phconn
