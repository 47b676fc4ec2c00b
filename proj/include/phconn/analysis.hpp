#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "phconn/geometry.hpp"

namespace phconn {

/// Mean minimum / average / maximum merging distance over a set of evaluation
/// batches.
struct ConnectivityStats {
    double mean_min = 0.0;
    double mean_avg = 0.0;
    double mean_max = 0.0;
    int batch_size = 0;
    int batch_count = 0;
};

ConnectivityStats batch_stats(const std::vector<PointCloud>& clouds);

/// (alpha, beta): the smallest and largest merging distance of the cloud.
std::pair<double, double> connectivity_range(const PointCloud& cloud);

/// Every point has at least d other points within distance eps (closed ball).
bool is_d_eps_dense(const PointCloud& cloud, int d, double eps);

/// All pairwise distances are >= eps.
bool is_eps_separated(const PointCloud& cloud, double eps);

/// Closed L1 annulus B(0, alpha, beta) in R^dim.
struct AnnulusSpec {
    double alpha = 0.0;
    double beta = 0.0;
    int dim = 1;
};

/// Closed-form upper bound (2 beta / eps + 1)^n - (2 alpha / eps - 1)^n on the
/// largest eps-separated set inside the annulus. The second base may be
/// negative; the formula is evaluated as stated.
double entropy_bound(const AnnulusSpec& spec, double eps);

/// Smallest integer m with m - b + 1 > entropy_bound(alpha, beta, n; eta).
/// Any set of that size meeting the annulus-density premise is provably not
/// eta-separated.
long long separation_threshold(int batch_size, double alpha, double beta, double eta, int dim);

/// Largest admissible batch size floor((2 beta / alpha + 1)^n - 1) for the
/// density premise to be satisfiable at all.
double batch_size_condition(double alpha, double beta, int dim);

struct Lemma1Report {
    int m = 0;
    int batch_size = 0;
    int dim = 0;
    int trials = 0;
    long long subsets_per_trial = 0;
    int premise_hits = 0;
    int conclusion_violations = 0;
    /// Smallest per-point annulus count seen across premise-satisfying trials;
    /// the conclusion requires this to stay >= m - b + 1.
    int min_annulus_count = 0;
};

/// Randomized oracle for the annulus-density result: samples Gaussian clouds
/// of size m, measures (alpha, beta) as the extremal merging distances over
/// every b-subset, and checks that each point then has at least m - b + 1
/// neighbors inside the closed annulus [alpha, beta] (hence within beta).
/// Refuses when C(m, b) exceeds 10^6.
Lemma1Report verify_lemma1(int m, int batch_size, int dim, int trials, uint64_t seed,
                           int threads = 1);

std::string lemma1_report_text(const Lemma1Report& report);

}  // namespace phconn
