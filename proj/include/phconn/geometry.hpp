#pragma once

#include <string>
#include <utility>
#include <vector>

namespace phconn {

enum class Norm { L1, L2 };

Norm norm_from_string(const std::string& name);
std::string to_string(Norm norm);

double distance(const std::vector<double>& a, const std::vector<double>& b, Norm norm);

/// Ordered finite set of points in R^n with a chosen p-norm. Point i keeps
/// index i across every operation built on top of the cloud.
struct PointCloud {
    std::vector<std::vector<double>> points;
    Norm norm = Norm::L1;

    int size() const { return static_cast<int>(points.size()); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }

    /// Throws std::invalid_argument on an empty cloud or mismatched dimensions.
    void validate() const;

    double dist(int i, int j) const {
        return distance(points[static_cast<size_t>(i)], points[static_cast<size_t>(j)], norm);
    }
};

/// Unordered index pair stored with first < second.
using IndexPair = std::pair<int, int>;

/// Distinct pairwise distance values in strictly increasing order; every
/// unordered pair appears under exactly one value.
struct DistanceSequence {
    std::vector<double> values;
    std::vector<std::vector<IndexPair>> pairs_by_value;

    int pair_count() const;
};

/// All pairwise distances of the cloud, grouped by exact value. Empty for
/// clouds with fewer than two points.
DistanceSequence pairwise_distances(const PointCloud& cloud);

struct UniquenessReport {
    bool unique = true;
    /// Pairs whose distance lies within tolerance of another pair's distance,
    /// ordered by (distance, i, j).
    std::vector<IndexPair> colliding_pairs;
};

/// Diagnoses whether all pairwise distances are pairwise distinct at the given
/// absolute tolerance.
UniquenessReport distances_unique(const PointCloud& cloud, double tolerance = 1e-12);

inline constexpr double kDistanceTieTolerance = 1e-12;

}  // namespace phconn
