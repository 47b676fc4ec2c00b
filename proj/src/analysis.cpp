#include "phconn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "phconn/parallel.hpp"
#include "phconn/persistence.hpp"
#include "phconn/rng.hpp"

namespace phconn {

namespace {

double ipow(double base, int exponent) {
    double result = 1.0;
    for (int k = 0; k < exponent; ++k) {
        result *= base;
    }
    return result;
}

}  // namespace

ConnectivityStats batch_stats(const std::vector<PointCloud>& clouds) {
    if (clouds.empty()) {
        throw std::invalid_argument("batch_stats: no batches given");
    }
    ConnectivityStats stats;
    stats.batch_count = static_cast<int>(clouds.size());
    stats.batch_size = clouds.front().size();
    for (const auto& cloud : clouds) {
        const auto barcode = persistence_unionfind(build_vr(cloud));
        if (barcode.events.empty()) {
            throw std::invalid_argument("batch_stats: every batch needs at least two points");
        }
        double batch_min = std::numeric_limits<double>::infinity();
        double batch_max = 0.0;
        double batch_sum = 0.0;
        for (const auto& event : barcode.events) {
            batch_min = std::min(batch_min, event.eps);
            batch_max = std::max(batch_max, event.eps);
            batch_sum += event.eps;
        }
        stats.mean_min += batch_min;
        stats.mean_avg += batch_sum / static_cast<double>(barcode.events.size());
        stats.mean_max += batch_max;
    }
    stats.mean_min /= stats.batch_count;
    stats.mean_avg /= stats.batch_count;
    stats.mean_max /= stats.batch_count;
    return stats;
}

std::pair<double, double> connectivity_range(const PointCloud& cloud) {
    cloud.validate();
    if (cloud.size() < 2) {
        throw std::invalid_argument("connectivity_range needs at least two points");
    }
    const auto barcode = persistence_unionfind(build_vr(cloud));
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& event : barcode.events) {
        lo = std::min(lo, event.eps);
        hi = std::max(hi, event.eps);
    }
    return {lo, hi};
}

bool is_d_eps_dense(const PointCloud& cloud, int d, double eps) {
    cloud.validate();
    if (d < 1) {
        throw std::invalid_argument("is_d_eps_dense: d must be >= 1");
    }
    const int b = cloud.size();
    for (int i = 0; i < b; ++i) {
        int neighbors = 0;
        for (int j = 0; j < b && neighbors < d; ++j) {
            if (j != i && cloud.dist(i, j) <= eps) {
                ++neighbors;
            }
        }
        if (neighbors < d) {
            return false;
        }
    }
    return true;
}

bool is_eps_separated(const PointCloud& cloud, double eps) {
    cloud.validate();
    const int b = cloud.size();
    for (int i = 0; i < b; ++i) {
        for (int j = i + 1; j < b; ++j) {
            if (cloud.dist(i, j) < eps) {
                return false;
            }
        }
    }
    return true;
}

double entropy_bound(const AnnulusSpec& spec, double eps) {
    if (!(eps > 0.0) || !(spec.alpha > 0.0) || spec.alpha > spec.beta || spec.dim < 1) {
        throw std::invalid_argument("entropy_bound: need 0 < alpha <= beta, eps > 0, dim >= 1");
    }
    return ipow(2.0 * spec.beta / eps + 1.0, spec.dim) -
           ipow(2.0 * spec.alpha / eps - 1.0, spec.dim);
}

long long separation_threshold(int batch_size, double alpha, double beta, double eta, int dim) {
    if (batch_size < 1 || !(eta > 0.0)) {
        throw std::invalid_argument("separation_threshold: need batch_size >= 1 and eta > 0");
    }
    const double bound = entropy_bound({alpha, beta, dim}, eta);
    if (!(bound < 9.0e18)) {
        throw std::overflow_error("separation_threshold exceeds integer range");
    }
    long long m = static_cast<long long>(std::floor(bound)) + batch_size - 1;
    if (m < batch_size) {
        m = batch_size;
    }
    while (static_cast<double>(m - batch_size + 1) <= bound) {
        ++m;
    }
    return m;
}

double batch_size_condition(double alpha, double beta, int dim) {
    if (!(alpha > 0.0) || alpha > beta || dim < 1) {
        throw std::invalid_argument("batch_size_condition: need 0 < alpha <= beta, dim >= 1");
    }
    return std::floor(ipow(2.0 * beta / alpha + 1.0, dim) - 1.0);
}

namespace {

long long binomial_guarded(int m, int b, long long limit) {
    long long result = 1;
    for (int k = 1; k <= b; ++k) {
        result = result * (m - b + k) / k;  // exact: product of k consecutive integers
        if (result > limit) {
            return limit + 1;
        }
    }
    return result;
}

struct TrialOutcome {
    bool premise = false;
    bool violation = false;
    int min_annulus_count = std::numeric_limits<int>::max();
};

TrialOutcome run_lemma1_trial(int m, int b, int dim, uint64_t trial_seed) {
    Rng rng(trial_seed);
    PointCloud cloud;
    cloud.norm = Norm::L1;
    cloud.points.resize(static_cast<size_t>(m));
    for (auto& point : cloud.points) {
        point.resize(static_cast<size_t>(dim));
        for (auto& coordinate : point) {
            coordinate = rng.normal();
        }
    }

    // Extremal merging distances over every b-subset: the tightest (alpha,
    // beta) for which the premise "every b-subset is alpha-beta connected"
    // holds for this cloud.
    double alpha = std::numeric_limits<double>::infinity();
    double beta = 0.0;
    std::vector<int> subset(static_cast<size_t>(b));
    for (int k = 0; k < b; ++k) {
        subset[static_cast<size_t>(k)] = k;
    }
    while (true) {
        PointCloud sub;
        sub.norm = cloud.norm;
        sub.points.reserve(static_cast<size_t>(b));
        for (const int index : subset) {
            sub.points.push_back(cloud.points[static_cast<size_t>(index)]);
        }
        const auto [lo, hi] = connectivity_range(sub);
        alpha = std::min(alpha, lo);
        beta = std::max(beta, hi);

        // next combination in lexicographic order
        int pos = b - 1;
        while (pos >= 0 && subset[static_cast<size_t>(pos)] == m - b + pos) {
            --pos;
        }
        if (pos < 0) {
            break;
        }
        ++subset[static_cast<size_t>(pos)];
        for (int k = pos + 1; k < b; ++k) {
            subset[static_cast<size_t>(k)] = subset[static_cast<size_t>(k - 1)] + 1;
        }
    }

    TrialOutcome outcome;
    outcome.premise = true;  // measured extremes instantiate the premise by construction
    const int required = m - b + 1;
    for (int i = 0; i < m; ++i) {
        int annulus_count = 0;
        int ball_count = 0;
        for (int j = 0; j < m; ++j) {
            if (j == i) {
                continue;
            }
            const double dist = cloud.dist(i, j);
            if (dist <= beta) {
                ++ball_count;
                if (dist >= alpha) {
                    ++annulus_count;
                }
            }
        }
        outcome.min_annulus_count = std::min(outcome.min_annulus_count, annulus_count);
        if (annulus_count < required || ball_count < required) {
            outcome.violation = true;
        }
    }
    return outcome;
}

}  // namespace

Lemma1Report verify_lemma1(int m, int batch_size, int dim, int trials, uint64_t seed,
                           int threads) {
    if (batch_size < 2 || m < batch_size || dim < 1 || trials < 0) {
        throw std::invalid_argument("verify_lemma1: need 2 <= b <= m, dim >= 1, trials >= 0");
    }
    constexpr long long kSubsetLimit = 1000000;
    const long long subsets = binomial_guarded(m, batch_size, kSubsetLimit);
    if (subsets > kSubsetLimit) {
        throw std::invalid_argument(
            "verify_lemma1: C(m, b) exceeds 10^6 subsets; exhaustive "
            "enumeration is not feasible for these parameters");
    }

    Lemma1Report report;
    report.m = m;
    report.batch_size = batch_size;
    report.dim = dim;
    report.trials = trials;
    report.subsets_per_trial = subsets;
    report.min_annulus_count = std::numeric_limits<int>::max();

    std::vector<TrialOutcome> outcomes(static_cast<size_t>(trials));
    parallel_for(static_cast<size_t>(trials), threads,
                 [&outcomes, m, batch_size, dim, seed](size_t begin, size_t end) {
                     for (size_t t = begin; t < end; ++t) {
                         outcomes[t] = run_lemma1_trial(m, batch_size, dim,
                                                        Rng::derive(seed, t));
                     }
                 });
    for (const auto& outcome : outcomes) {
        if (!outcome.premise) {
            continue;
        }
        ++report.premise_hits;
        if (outcome.violation) {
            ++report.conclusion_violations;
        }
        report.min_annulus_count = std::min(report.min_annulus_count, outcome.min_annulus_count);
    }
    if (report.premise_hits == 0) {
        report.min_annulus_count = 0;
    }
    return report;
}

std::string lemma1_report_text(const Lemma1Report& report) {
    std::ostringstream out;
    out << "m=" << report.m << " b=" << report.batch_size << " n=" << report.dim
        << " trials=" << report.trials << " subsets_per_trial=" << report.subsets_per_trial
        << '\n';
    out << "premise_hits=" << report.premise_hits
        << " conclusion_violations=" << report.conclusion_violations
        << " required_annulus_count=" << (report.m - report.batch_size + 1)
        << " min_annulus_count=" << report.min_annulus_count << '\n';
    return out.str();
}

}  // namespace phconn
