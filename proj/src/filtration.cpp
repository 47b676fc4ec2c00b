#include "phconn/filtration.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "phconn/io.hpp"

namespace phconn {

FilteredComplex build_vr(const PointCloud& cloud) {
    cloud.validate();
    FilteredComplex complex;
    complex.vertex_count = cloud.size();
    const int b = cloud.size();
    complex.edges.reserve(static_cast<size_t>(b) * static_cast<size_t>(b - 1) / 2);
    for (int i = 0; i < b; ++i) {
        for (int j = i + 1; j < b; ++j) {
            complex.edges.push_back({i, j, cloud.dist(i, j)});
        }
    }
    std::sort(complex.edges.begin(), complex.edges.end(),
              [](const FilteredEdge& a, const FilteredEdge& b) {
                  return std::tie(a.eps, a.i, a.j) < std::tie(b.eps, b.i, b.j);
              });
    return complex;
}

ComplexSlice complex_at_radius(const FilteredComplex& complex, double r) {
    if (r < 0.0) {
        throw std::invalid_argument("complex_at_radius: radius must be nonnegative");
    }
    ComplexSlice slice;
    slice.vertex_count = complex.vertex_count;
    for (const auto& edge : complex.edges) {
        if (edge.radius() > r) {
            break;  // edges are sorted by eps
        }
        slice.edges.emplace_back(edge.i, edge.j);
    }
    return slice;
}

std::string complex_to_json(const FilteredComplex& complex) {
    std::ostringstream out;
    out << "{\"vertices\": " << complex.vertex_count << ", \"edges\": [";
    for (size_t k = 0; k < complex.edges.size(); ++k) {
        const auto& edge = complex.edges[k];
        if (k > 0) {
            out << ", ";
        }
        out << "[" << edge.i << ", " << edge.j << ", " << format_double(edge.eps) << "]";
    }
    out << "]}";
    return out.str();
}

}  // namespace phconn
