#include "phconn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phconn/loss.hpp"
#include "phconn/neural.hpp"
#include "phconn/rng.hpp"

namespace phconn {

namespace {

constexpr double kFdStep = 1e-6;

PointCloud random_cloud(int batch_size, int dim, Norm norm, double scale, Rng& rng) {
    PointCloud cloud;
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

// True when every merge distance keeps kink_margin distance from eta, from the
// neighboring distance values, and (L1) from zero coordinate differences.
bool away_from_kinks(const PointCloud& cloud, double eta, double kink_margin) {
    const auto sequence = pairwise_distances(cloud);
    for (size_t k = 0; k + 1 < sequence.values.size(); ++k) {
        if (sequence.values[k + 1] - sequence.values[k] < kink_margin) {
            return false;
        }
    }
    if (sequence.pair_count() != static_cast<int>(sequence.values.size())) {
        return false;  // exact tie
    }
    const auto loss = connectivity_loss(cloud, eta);
    for (const auto& event : loss.per_event) {
        if (std::abs(event.eps - eta) < kink_margin) {
            return false;
        }
        if (cloud.norm == Norm::L1) {
            const auto& zi = cloud.points[static_cast<size_t>(event.i)];
            const auto& zj = cloud.points[static_cast<size_t>(event.j)];
            for (size_t v = 0; v < zi.size(); ++v) {
                if (std::abs(zi[v] - zj[v]) < kink_margin) {
                    return false;
                }
            }
        }
    }
    return true;
}

double max_abs(const std::vector<std::vector<double>>& rows) {
    double result = 0.0;
    for (const auto& row : rows) {
        for (const double value : row) {
            result = std::max(result, std::abs(value));
        }
    }
    return result;
}

}  // namespace

GradCheckReport point_gradient_check(int batch_size, int dim, Norm norm, double eta,
                                     int trials, uint64_t seed, double kink_margin) {
    GradCheckReport report;
    report.trials_requested = trials;
    // Kink configurations are excluded and resampled so that `trials` valid
    // clouds are always checked.
    for (int attempt = 0; report.trials_accepted < trials && attempt < 40 * trials; ++attempt) {
        Rng rng(Rng::derive(seed, static_cast<uint64_t>(attempt)));
        PointCloud cloud = random_cloud(batch_size, dim, norm, 1.5, rng);
        if (!away_from_kinks(cloud, eta, kink_margin)) {
            ++report.trials_skipped;
            continue;
        }
        const auto analytic = connectivity_grad(cloud, eta);
        std::vector<std::vector<double>> fd(
            static_cast<size_t>(batch_size),
            std::vector<double>(static_cast<size_t>(dim), 0.0));
        double max_error = 0.0;
        for (int p = 0; p < batch_size; ++p) {
            for (int v = 0; v < dim; ++v) {
                const double saved = cloud.points[static_cast<size_t>(p)][static_cast<size_t>(v)];
                cloud.points[static_cast<size_t>(p)][static_cast<size_t>(v)] = saved + kFdStep;
                const double up = connectivity_loss(cloud, eta).value;
                cloud.points[static_cast<size_t>(p)][static_cast<size_t>(v)] = saved - kFdStep;
                const double down = connectivity_loss(cloud, eta).value;
                cloud.points[static_cast<size_t>(p)][static_cast<size_t>(v)] = saved;
                fd[static_cast<size_t>(p)][static_cast<size_t>(v)] = (up - down) / (2.0 * kFdStep);
                max_error = std::max(
                    max_error,
                    std::abs(analytic.gradient[static_cast<size_t>(p)][static_cast<size_t>(v)] -
                             fd[static_cast<size_t>(p)][static_cast<size_t>(v)]));
            }
        }
        const double scale = std::max(max_abs(fd), 1e-12);
        report.max_rel_error = std::max(report.max_rel_error, max_error / scale);
        ++report.trials_accepted;
    }
    return report;
}

namespace {

// Kink margins for the combined objective: activation inputs, reconstruction
// residuals, and the per-branch connectivity configuration.
bool net_away_from_kinks(const BranchedAutoencoder& net, const Batch& batch,
                         const TrainConfig& config, double kink_margin) {
    Mlp::Cache encoder_cache;
    const Batch pre_latent = net.encoder().forward(batch, &encoder_cache);
    const Batch latent = net.head().forward(pre_latent);
    Mlp::Cache decoder_cache;
    const Batch recon = net.decoder().forward(latent, &decoder_cache);

    for (const auto& layer_pre : encoder_cache.pre) {
        for (const auto& row : layer_pre) {
            for (const double value : row) {
                if (std::abs(value) < kink_margin) {
                    return false;
                }
            }
        }
    }
    // Decoder hidden layers carry activations; the final linear layer does not.
    for (size_t l = 0; l + 1 < decoder_cache.pre.size(); ++l) {
        for (const auto& row : decoder_cache.pre[l]) {
            for (const double value : row) {
                if (std::abs(value) < kink_margin) {
                    return false;
                }
            }
        }
    }
    for (size_t r = 0; r < batch.size(); ++r) {
        for (size_t c = 0; c < batch[r].size(); ++c) {
            if (std::abs(recon[r][c] - batch[r][c]) < kink_margin) {
                return false;
            }
        }
    }
    for (int branch = 0; branch < net.spec().branches; ++branch) {
        PointCloud cloud;
        cloud.norm = config.norm;
        const int offset = branch * net.spec().branch_dim;
        for (const auto& row : latent) {
            cloud.points.emplace_back(row.begin() + offset,
                                      row.begin() + offset + net.spec().branch_dim);
        }
        if (!away_from_kinks(cloud, config.eta, kink_margin)) {
            return false;
        }
    }
    return true;
}

}  // namespace

GradCheckReport parameter_gradient_check(int trials, uint64_t seed, double kink_margin) {
    GradCheckReport report;
    report.trials_requested = trials;
    for (int attempt = 0; report.trials_accepted < trials && attempt < 40 * trials; ++attempt) {
        Rng rng(Rng::derive(seed, 0x5e7ULL + static_cast<uint64_t>(attempt)));

        AutoencoderSpec spec;
        spec.input_dim = 2 + (attempt % 2);
        spec.encoder_hidden = {3};
        spec.branches = 1 + (attempt % 2);
        spec.branch_dim = 2;
        spec.seed = rng.next_u64();
        BranchedAutoencoder net(spec);

        TrainConfig config;
        config.eta = 1.0;
        config.lambda = 0.5;
        config.norm = attempt % 2 == 0 ? Norm::L1 : Norm::L2;
        config.batch_size = 4;

        Batch batch(4, std::vector<double>(static_cast<size_t>(spec.input_dim)));
        for (auto& row : batch) {
            for (auto& value : row) {
                value = 1.2 * rng.normal();
            }
        }
        if (!net_away_from_kinks(net, batch, config, kink_margin)) {
            ++report.trials_skipped;
            continue;
        }

        AeGradients grads;
        backward_combined(net, batch, config, grads);
        const auto analytic_spans = gradient_spans(grads);
        const auto param_spans = parameter_spans(net);

        double max_error = 0.0;
        double fd_scale = 0.0;
        for (size_t s = 0; s < param_spans.size(); ++s) {
            for (size_t k = 0; k < param_spans[s].size(); ++k) {
                double& parameter = param_spans[s][k];
                const double saved = parameter;
                parameter = saved + kFdStep;
                const double up = combined_objective(net, batch, config).total;
                parameter = saved - kFdStep;
                const double down = combined_objective(net, batch, config).total;
                parameter = saved;
                const double fd = (up - down) / (2.0 * kFdStep);
                fd_scale = std::max(fd_scale, std::abs(fd));
                max_error = std::max(max_error, std::abs(analytic_spans[s][k] - fd));
            }
        }
        report.max_rel_error =
            std::max(report.max_rel_error, max_error / std::max(fd_scale, 1e-12));
        ++report.trials_accepted;
    }
    return report;
}

std::string grad_check_text(const GradCheckReport& report) {
    std::ostringstream out;
    out << "trials=" << report.trials_requested << " accepted=" << report.trials_accepted
        << " skipped_near_kinks=" << report.trials_skipped << " max_rel_error=";
    out.precision(3);
    out << std::scientific << report.max_rel_error << '\n';
    return out.str();
}

}  // namespace phconn
