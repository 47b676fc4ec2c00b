#pragma once

#include <cstdint>
#include <vector>

#include "phconn/geometry.hpp"
#include "phconn/persistence.hpp"

namespace phconn {

struct LossEvent {
    double eps = 0.0;
    int i = 0, j = 0;            // causing edge
    double contribution = 0.0;   // |eta - eps|
};

struct LossResult {
    double value = 0.0;
    std::vector<LossEvent> per_event;             // ascending (eps, i, j)
    std::vector<std::vector<double>> gradient;    // b x n, empty unless requested
};

/// Sum of |eta - eps| over the merging events of the cloud. Requires at least
/// two points and eta > 0.
LossResult connectivity_loss(const PointCloud& cloud, double eta);

/// One bit per unordered pair, lexicographic order: bit(i, j) == 1 iff the
/// pair's distance equals a merging distance of the cloud. With unique
/// pairwise distances exactly b - 1 bits are set.
struct IndicatorTable {
    int point_count = 0;
    std::vector<uint8_t> bits;

    static int pair_index(int i, int j, int point_count);
    bool bit(int i, int j) const;
    int popcount() const;
    bool operator==(const IndicatorTable&) const = default;
};

/// tie_warning (optional) is set when pairwise distances are not unique at the
/// default tolerance; the table is then built from the causing edges, i.e.
/// the lexicographic tie-break of the filtration decides.
IndicatorTable indicator_table(const PointCloud& cloud, bool* tie_warning = nullptr);

/// The loss through the pair-sum formulation sum_{i<j} |eta - d(i,j)| * bit(i,j),
/// accumulated in ascending (distance, i, j) order. Equals connectivity_loss
/// bit for bit when pairwise distances are unique.
double loss_via_indicator(const PointCloud& cloud, double eta, bool* tie_warning = nullptr);

/// Loss plus its exact gradient with respect to every point. The indicator is
/// locally constant, so each event contributes only through the norm factor:
/// sign(eps - eta) times the norm derivative at the causing edge, with
/// sign(0) = 0 at every kink.
LossResult connectivity_grad(const PointCloud& cloud, double eta);

}  // namespace phconn
