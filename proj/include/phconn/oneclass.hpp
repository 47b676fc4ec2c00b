#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phconn/geometry.hpp"
#include "phconn/neural.hpp"

namespace phconn {

/// Count-based one-class model: per branch, the stored latent slices of the
/// fitted samples plus the scoring radius eta. No optimization happens at fit
/// time.
struct OneClassModel {
    int branches = 0;
    int branch_dim = 0;
    double eta = 2.0;
    Norm norm = Norm::L1;
    std::vector<std::vector<std::vector<double>>> stored;  // [branch][sample][coordinate]

    int sample_count() const {
        return stored.empty() ? 0 : static_cast<int>(stored.front().size());
    }
};

OneClassModel fit_oneclass(const BranchedAutoencoder& encoder, const Batch& samples,
                           double eta, Norm norm = Norm::L1);

/// Number of stored slices within distance eta of the query's slices, summed
/// over branches; an integer in [0, branches * sample_count]. A nonnegative
/// eta_override replaces the model's radius.
int oneclass_score_latent(const OneClassModel& model, const std::vector<double>& latent,
                          double eta_override = -1.0);
int oneclass_score(const OneClassModel& model, const BranchedAutoencoder& encoder,
                   const std::vector<double>& sample, double eta_override = -1.0);

/// Rank-based (Mann-Whitney) AUC with midrank tie handling.
double evaluate_auc(const std::vector<double>& positive_scores,
                    const std::vector<double>& negative_scores);

struct ClassAucRow {
    int label = 0;
    double mean_auc = 0.0;
    int completed_runs = 0;
    int skipped_runs = 0;
};

struct OneVsAllReport {
    std::vector<ClassAucRow> per_class;
    double mean_auc = 0.0;
    std::vector<std::string> warnings;
};

/// For every class: fit on fit_count seeded-random samples of that class,
/// score the whole dataset, label that class 1 against everything else, and
/// average the AUC over classes and runs. Classes with fewer than fit_count
/// samples are skipped with a warning.
OneVsAllReport one_vs_all(const BranchedAutoencoder& encoder, const Batch& samples,
                          const std::vector<int>& labels, int fit_count, double eta,
                          uint64_t seed, int runs);

std::string one_vs_all_csv(const OneVsAllReport& report);

}  // namespace phconn
