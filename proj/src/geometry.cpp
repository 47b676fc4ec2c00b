#include "phconn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace phconn {

Norm norm_from_string(const std::string& name) {
    if (name == "l1" || name == "L1") {
        return Norm::L1;
    }
    if (name == "l2" || name == "L2") {
        return Norm::L2;
    }
    throw std::invalid_argument("unknown norm '" + name + "' (expected l1 or l2)");
}

std::string to_string(Norm norm) {
    return norm == Norm::L1 ? "l1" : "l2";
}

double distance(const std::vector<double>& a, const std::vector<double>& b, Norm norm) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("distance: dimension mismatch");
    }
    double acc = 0.0;
    if (norm == Norm::L1) {
        for (size_t v = 0; v < a.size(); ++v) {
            acc += std::abs(a[v] - b[v]);
        }
        return acc;
    }
    for (size_t v = 0; v < a.size(); ++v) {
        const double diff = a[v] - b[v];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

void PointCloud::validate() const {
    if (points.empty()) {
        throw std::invalid_argument("point cloud is empty");
    }
    const size_t expected = points.front().size();
    if (expected == 0) {
        throw std::invalid_argument("point cloud has zero-dimensional points");
    }
    for (const auto& point : points) {
        if (point.size() != expected) {
            throw std::invalid_argument("point cloud has mismatched point dimensions");
        }
    }
}

int DistanceSequence::pair_count() const {
    int count = 0;
    for (const auto& pairs : pairs_by_value) {
        count += static_cast<int>(pairs.size());
    }
    return count;
}

namespace {

struct DistEntry {
    double value;
    int i, j;
};

std::vector<DistEntry> sorted_pair_distances(const PointCloud& cloud) {
    const int b = cloud.size();
    std::vector<DistEntry> entries;
    entries.reserve(static_cast<size_t>(b) * static_cast<size_t>(b - 1) / 2);
    for (int i = 0; i < b; ++i) {
        for (int j = i + 1; j < b; ++j) {
            entries.push_back({cloud.dist(i, j), i, j});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const DistEntry& a, const DistEntry& b) {
        return std::tie(a.value, a.i, a.j) < std::tie(b.value, b.i, b.j);
    });
    return entries;
}

}  // namespace

DistanceSequence pairwise_distances(const PointCloud& cloud) {
    cloud.validate();
    DistanceSequence sequence;
    if (cloud.size() < 2) {
        return sequence;
    }
    const auto entries = sorted_pair_distances(cloud);
    for (const auto& entry : entries) {
        if (sequence.values.empty() || sequence.values.back() != entry.value) {
            sequence.values.push_back(entry.value);
            sequence.pairs_by_value.emplace_back();
        }
        sequence.pairs_by_value.back().emplace_back(entry.i, entry.j);
    }
    return sequence;
}

UniquenessReport distances_unique(const PointCloud& cloud, double tolerance) {
    cloud.validate();
    if (tolerance < 0.0) {
        throw std::invalid_argument("distances_unique: tolerance must be nonnegative");
    }
    UniquenessReport report;
    if (cloud.size() < 3) {
        // Fewer than two pairs cannot collide.
        return report;
    }
    const auto entries = sorted_pair_distances(cloud);
    std::vector<bool> collides(entries.size(), false);
    for (size_t k = 0; k + 1 < entries.size(); ++k) {
        if (entries[k + 1].value - entries[k].value <= tolerance) {
            collides[k] = true;
            collides[k + 1] = true;
        }
    }
    for (size_t k = 0; k < entries.size(); ++k) {
        if (collides[k]) {
            report.colliding_pairs.emplace_back(entries[k].i, entries[k].j);
        }
    }
    report.unique = report.colliding_pairs.empty();
    return report;
}

}  // namespace phconn
