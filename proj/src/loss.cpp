#include "phconn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace phconn {

namespace {

double sign(double value) {
    if (value > 0.0) {
        return 1.0;
    }
    if (value < 0.0) {
        return -1.0;
    }
    return 0.0;
}

void check_loss_inputs(const PointCloud& cloud, double eta) {
    cloud.validate();
    if (cloud.size() < 2) {
        throw std::invalid_argument("connectivity loss needs at least two points");
    }
    if (!(eta > 0.0)) {
        throw std::invalid_argument("connectivity loss needs eta > 0");
    }
}

Barcode merge_events(const PointCloud& cloud) {
    return persistence_unionfind(build_vr(cloud));
}

}  // namespace

LossResult connectivity_loss(const PointCloud& cloud, double eta) {
    check_loss_inputs(cloud, eta);
    LossResult result;
    const auto barcode = merge_events(cloud);
    result.per_event.reserve(barcode.events.size());
    for (const auto& event : barcode.events) {
        const double contribution = std::abs(eta - event.eps);
        result.per_event.push_back({event.eps, event.i, event.j, contribution});
        result.value += contribution;
    }
    return result;
}

int IndicatorTable::pair_index(int i, int j, int point_count) {
    // Lexicographic rank of (i, j), i < j, among all pairs of [point_count].
    return i * (2 * point_count - i - 1) / 2 + (j - i - 1);
}

bool IndicatorTable::bit(int i, int j) const {
    if (i > j) {
        std::swap(i, j);
    }
    return bits[static_cast<size_t>(pair_index(i, j, point_count))] != 0;
}

int IndicatorTable::popcount() const {
    int count = 0;
    for (const auto bit : bits) {
        count += bit;
    }
    return count;
}

IndicatorTable indicator_table(const PointCloud& cloud, bool* tie_warning) {
    cloud.validate();
    if (cloud.size() < 2) {
        throw std::invalid_argument("indicator_table needs at least two points");
    }
    const bool tied = !distances_unique(cloud, kDistanceTieTolerance).unique;
    if (tie_warning != nullptr) {
        *tie_warning = tied;
    }

    const int b = cloud.size();
    IndicatorTable table;
    table.point_count = b;
    table.bits.assign(static_cast<size_t>(b) * static_cast<size_t>(b - 1) / 2, 0);

    const auto barcode = merge_events(cloud);
    if (tied) {
        // Degenerate distances: mark the causing edges themselves so the
        // table stays consistent with the lexicographic filtration order.
        for (const auto& event : barcode.events) {
            table.bits[static_cast<size_t>(
                IndicatorTable::pair_index(event.i, event.j, b))] = 1;
        }
        return table;
    }
    std::unordered_set<double> merge_distances;
    merge_distances.reserve(barcode.events.size());
    for (const auto& event : barcode.events) {
        merge_distances.insert(event.eps);
    }
    for (int i = 0; i < b; ++i) {
        for (int j = i + 1; j < b; ++j) {
            if (merge_distances.count(cloud.dist(i, j)) > 0) {
                table.bits[static_cast<size_t>(IndicatorTable::pair_index(i, j, b))] = 1;
            }
        }
    }
    return table;
}

double loss_via_indicator(const PointCloud& cloud, double eta, bool* tie_warning) {
    check_loss_inputs(cloud, eta);
    const auto table = indicator_table(cloud, tie_warning);
    const auto sequence = pairwise_distances(cloud);
    double value = 0.0;
    // Fixed summation order: ascending distance, then lexicographic pair.
    for (size_t k = 0; k < sequence.values.size(); ++k) {
        for (const auto& [i, j] : sequence.pairs_by_value[k]) {
            if (table.bit(i, j)) {
                value += std::abs(eta - sequence.values[k]);
            }
        }
    }
    return value;
}

LossResult connectivity_grad(const PointCloud& cloud, double eta) {
    LossResult result = connectivity_loss(cloud, eta);
    const int b = cloud.size();
    const int n = cloud.dim();
    result.gradient.assign(static_cast<size_t>(b), std::vector<double>(static_cast<size_t>(n), 0.0));
    for (const auto& event : result.per_event) {
        const double outer = sign(event.eps - eta);
        if (outer == 0.0) {
            continue;  // event at the kink of |.|: subgradient 0
        }
        const auto& zi = cloud.points[static_cast<size_t>(event.i)];
        const auto& zj = cloud.points[static_cast<size_t>(event.j)];
        auto& grad_i = result.gradient[static_cast<size_t>(event.i)];
        auto& grad_j = result.gradient[static_cast<size_t>(event.j)];
        for (int v = 0; v < n; ++v) {
            double norm_derivative = 0.0;
            if (cloud.norm == Norm::L1) {
                norm_derivative = sign(zi[static_cast<size_t>(v)] - zj[static_cast<size_t>(v)]);
            } else {
                norm_derivative = (zi[static_cast<size_t>(v)] - zj[static_cast<size_t>(v)]) / event.eps;
            }
            grad_i[static_cast<size_t>(v)] += outer * norm_derivative;
            grad_j[static_cast<size_t>(v)] -= outer * norm_derivative;
        }
    }
    return result;
}

}  // namespace phconn
