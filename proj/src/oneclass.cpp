#include "phconn/oneclass.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "phconn/io.hpp"
#include "phconn/rng.hpp"

namespace phconn {

OneClassModel fit_oneclass(const BranchedAutoencoder& encoder, const Batch& samples,
                           double eta, Norm norm) {
    if (samples.empty()) {
        throw std::invalid_argument("fit_oneclass: no samples");
    }
    if (!(eta > 0.0)) {
        throw std::invalid_argument("fit_oneclass: eta must be positive");
    }
    OneClassModel model;
    model.branches = encoder.spec().branches;
    model.branch_dim = encoder.spec().branch_dim;
    model.eta = eta;
    model.norm = norm;
    const Batch latent = encoder.encode(samples);
    model.stored.resize(static_cast<size_t>(model.branches));
    for (int branch = 0; branch < model.branches; ++branch) {
        auto& slices = model.stored[static_cast<size_t>(branch)];
        slices.reserve(latent.size());
        for (const auto& z : latent) {
            slices.push_back(encoder.latent_slice(z, branch));
        }
    }
    return model;
}

int oneclass_score_latent(const OneClassModel& model, const std::vector<double>& latent,
                          double eta_override) {
    if (static_cast<int>(latent.size()) != model.branches * model.branch_dim) {
        throw std::invalid_argument("oneclass_score_latent: latent dimension mismatch");
    }
    const double radius = eta_override >= 0.0 ? eta_override : model.eta;
    int score = 0;
    for (int branch = 0; branch < model.branches; ++branch) {
        const int offset = branch * model.branch_dim;
        const std::vector<double> query(latent.begin() + offset,
                                        latent.begin() + offset + model.branch_dim);
        for (const auto& stored : model.stored[static_cast<size_t>(branch)]) {
            if (distance(query, stored, model.norm) <= radius) {
                ++score;
            }
        }
    }
    return score;
}

int oneclass_score(const OneClassModel& model, const BranchedAutoencoder& encoder,
                   const std::vector<double>& sample, double eta_override) {
    const Batch latent = encoder.encode({sample});
    return oneclass_score_latent(model, latent.front(), eta_override);
}

double evaluate_auc(const std::vector<double>& positive_scores,
                    const std::vector<double>& negative_scores) {
    if (positive_scores.empty() || negative_scores.empty()) {
        throw std::invalid_argument("evaluate_auc: both score lists must be nonempty");
    }
    // Midranks over the pooled scores, then the Mann-Whitney statistic.
    struct Entry {
        double score;
        bool positive;
    };
    std::vector<Entry> pooled;
    pooled.reserve(positive_scores.size() + negative_scores.size());
    for (const double s : positive_scores) {
        pooled.push_back({s, true});
    }
    for (const double s : negative_scores) {
        pooled.push_back({s, false});
    }
    std::sort(pooled.begin(), pooled.end(),
              [](const Entry& a, const Entry& b) { return a.score < b.score; });

    double positive_rank_sum = 0.0;
    size_t k = 0;
    while (k < pooled.size()) {
        size_t tie_end = k;
        while (tie_end + 1 < pooled.size() && pooled[tie_end + 1].score == pooled[k].score) {
            ++tie_end;
        }
        const double midrank = 0.5 * (static_cast<double>(k + 1) + static_cast<double>(tie_end + 1));
        for (size_t t = k; t <= tie_end; ++t) {
            if (pooled[t].positive) {
                positive_rank_sum += midrank;
            }
        }
        k = tie_end + 1;
    }
    const double p = static_cast<double>(positive_scores.size());
    const double n = static_cast<double>(negative_scores.size());
    return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

OneVsAllReport one_vs_all(const BranchedAutoencoder& encoder, const Batch& samples,
                          const std::vector<int>& labels, int fit_count, double eta,
                          uint64_t seed, int runs) {
    if (samples.size() != labels.size()) {
        throw std::invalid_argument("one_vs_all: samples/labels size mismatch");
    }
    if (fit_count < 1 || runs < 1) {
        throw std::invalid_argument("one_vs_all: fit_count and runs must be >= 1");
    }
    std::map<int, std::vector<int>> by_class;
    for (size_t r = 0; r < labels.size(); ++r) {
        by_class[labels[r]].push_back(static_cast<int>(r));
    }

    // Latent slices are fixed per encoder, so encode the dataset once.
    const Batch latent = encoder.encode(samples);

    OneVsAllReport report;
    double auc_total = 0.0;
    int auc_count = 0;
    for (const auto& [label, indices] : by_class) {
        ClassAucRow row;
        row.label = label;
        if (static_cast<int>(indices.size()) < fit_count) {
            row.skipped_runs = runs;
            report.warnings.push_back("class " + std::to_string(label) + " has only " +
                                      std::to_string(indices.size()) +
                                      " samples; skipped (needs " +
                                      std::to_string(fit_count) + ")");
            report.per_class.push_back(row);
            continue;
        }
        double class_total = 0.0;
        for (int run = 0; run < runs; ++run) {
            Rng rng(Rng::derive(seed, (static_cast<uint64_t>(run) << 32) ^
                                          static_cast<uint64_t>(static_cast<uint32_t>(label))));
            const auto picks =
                rng.sample_indices(static_cast<int>(indices.size()), fit_count);
            Batch fit_samples;
            fit_samples.reserve(static_cast<size_t>(fit_count));
            for (const int pick : picks) {
                fit_samples.push_back(samples[static_cast<size_t>(indices[static_cast<size_t>(pick)])]);
            }
            const auto model = fit_oneclass(encoder, fit_samples, eta);
            std::vector<double> positives;
            std::vector<double> negatives;
            for (size_t r = 0; r < samples.size(); ++r) {
                const double score =
                    static_cast<double>(oneclass_score_latent(model, latent[r]));
                if (labels[r] == label) {
                    positives.push_back(score);
                } else {
                    negatives.push_back(score);
                }
            }
            class_total += evaluate_auc(positives, negatives);
            ++row.completed_runs;
        }
        row.mean_auc = class_total / runs;
        auc_total += row.mean_auc;
        ++auc_count;
        report.per_class.push_back(row);
    }
    report.mean_auc = auc_count > 0 ? auc_total / auc_count : 0.0;
    return report;
}

std::string one_vs_all_csv(const OneVsAllReport& report) {
    std::ostringstream out;
    out << "class,mean_auc,completed_runs,skipped_runs\n";
    for (const auto& row : report.per_class) {
        out << row.label << ',' << format_double(row.mean_auc) << ',' << row.completed_runs
            << ',' << row.skipped_runs << '\n';
    }
    out << "mean," << format_double(report.mean_auc) << ",,\n";
    return out.str();
}

}  // namespace phconn
