#pragma once

// Test-side oracles, kept independent of the library paths they check:
// Kruskal on an explicit edge list with its own disjoint-set code, a scalar
// distance re-evaluation, exhaustive AUC pair counting, and an exact greedy
// packing for 1-D annuli.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <vector>

#include "phconn/geometry.hpp"
#include "phconn/rng.hpp"

namespace oracles {

inline double naive_distance(const std::vector<double>& a, const std::vector<double>& b,
                             phconn::Norm norm) {
    double total = 0.0;
    for (size_t v = 0; v < a.size(); ++v) {
        const double diff = a[v] >= b[v] ? a[v] - b[v] : b[v] - a[v];
        total += norm == phconn::Norm::L1 ? diff : diff * diff;
    }
    return norm == phconn::Norm::L1 ? total : std::sqrt(total);
}

/// Sorted multiset of MST edge weights via Kruskal with plain parent-chasing.
inline std::vector<double> kruskal_mst_weights(const phconn::PointCloud& cloud) {
    const int b = cloud.size();
    struct Edge {
        double w;
        int i, j;
    };
    std::vector<Edge> edges;
    for (int i = 0; i < b; ++i) {
        for (int j = i + 1; j < b; ++j) {
            edges.push_back({cloud.dist(i, j), i, j});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.w, a.i, a.j) < std::tie(b.w, b.i, b.j);
    });
    std::vector<int> parent(static_cast<size_t>(b));
    std::iota(parent.begin(), parent.end(), 0);
    const auto root = [&parent](int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    std::vector<double> weights;
    for (const auto& edge : edges) {
        const int ri = root(edge.i);
        const int rj = root(edge.j);
        if (ri != rj) {
            parent[static_cast<size_t>(ri)] = rj;
            weights.push_back(edge.w);
        }
    }
    std::sort(weights.begin(), weights.end());
    return weights;
}

/// AUC as wins + half-ties over all positive x negative pairs.
inline double auc_pair_count(const std::vector<double>& positives,
                             const std::vector<double>& negatives) {
    double wins = 0.0;
    for (const double p : positives) {
        for (const double n : negatives) {
            if (p > n) {
                wins += 1.0;
            } else if (p == n) {
                wins += 0.5;
            }
        }
    }
    return wins / (static_cast<double>(positives.size()) * static_cast<double>(negatives.size()));
}

/// Exact size of the largest eps-separated subset of [-beta,-alpha] u [alpha,beta]
/// (the 1-D L1 annulus), by leftmost greedy placement.
inline int packing_1d(double alpha, double beta, double eps) {
    const double intervals[2][2] = {{-beta, -alpha}, {alpha, beta}};
    int count = 0;
    bool placed = false;
    double last = 0.0;
    for (const auto& interval : intervals) {
        double next = placed ? std::max(interval[0], last + eps) : interval[0];
        while (next <= interval[1]) {
            ++count;
            last = next;
            placed = true;
            next = last + eps;
        }
    }
    return count;
}

/// Greedy L1 packing of the 2-D annulus over a fine candidate grid: a lower
/// bound on the eps-metric entropy.
inline int greedy_packing_2d(double alpha, double beta, double eps, double step = 0.05) {
    std::vector<std::pair<double, double>> chosen;
    for (double x = -beta; x <= beta + 1e-12; x += step) {
        for (double y = -beta; y <= beta + 1e-12; y += step) {
            const double radius = std::abs(x) + std::abs(y);
            if (radius < alpha || radius > beta) {
                continue;
            }
            bool fits = true;
            for (const auto& [cx, cy] : chosen) {
                if (std::abs(x - cx) + std::abs(y - cy) < eps) {
                    fits = false;
                    break;
                }
            }
            if (fits) {
                chosen.emplace_back(x, y);
            }
        }
    }
    return static_cast<int>(chosen.size());
}

inline phconn::PointCloud gaussian_cloud(int batch_size, int dim, phconn::Norm norm,
                                         phconn::Rng& rng, double scale = 1.0) {
    phconn::PointCloud cloud;
    cloud.norm = norm;
    cloud.points.resize(static_cast<size_t>(batch_size));
    for (auto& point : cloud.points) {
        point.resize(static_cast<size_t>(dim));
        for (auto& coordinate : point) {
            coordinate = scale * rng.normal();
        }
    }
    return cloud;
}

/// Integer-lattice cloud with distinct points: many exactly repeated pairwise
/// distances but no zero-length edges.
inline phconn::PointCloud lattice_cloud(int batch_size, int dim, phconn::Norm norm,
                                        phconn::Rng& rng) {
    int side = 3;
    double capacity = 0.0;
    while ((capacity = std::pow(static_cast<double>(side + 1), dim)) < 2.0 * batch_size) {
        ++side;
    }
    phconn::PointCloud cloud;
    cloud.norm = norm;
    while (cloud.size() < batch_size) {
        std::vector<double> candidate(static_cast<size_t>(dim));
        for (auto& coordinate : candidate) {
            coordinate = static_cast<double>(rng.uniform_int(0, side));
        }
        if (std::find(cloud.points.begin(), cloud.points.end(), candidate) ==
            cloud.points.end()) {
            cloud.points.push_back(std::move(candidate));
        }
    }
    return cloud;
}

}  // namespace oracles
