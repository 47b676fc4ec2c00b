#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phconn/analysis.hpp"
#include "phconn/geometry.hpp"

namespace phconn {

using Batch = std::vector<std::vector<double>>;

struct LinearLayer {
    int in = 0, out = 0;
    std::vector<double> weight;  // row-major, out x in
    std::vector<double> bias;    // out
};

struct MlpSpec {
    std::vector<int> widths;     // at least two entries, all positive
    double leaky_slope = 0.01;
    uint64_t seed = 0;
    bool activate_final = false;
};

/// Fully connected net with leaky ReLU between layers. Weights initialize
/// uniformly in +-sqrt(1/fan_in) from the seeded generator.
class Mlp {
public:
    Mlp() = default;
    explicit Mlp(const MlpSpec& spec);

    const MlpSpec& spec() const { return spec_; }
    std::vector<LinearLayer>& layers() { return layers_; }
    const std::vector<LinearLayer>& layers() const { return layers_; }
    int input_dim() const { return spec_.widths.front(); }
    int output_dim() const { return spec_.widths.back(); }

    struct Cache {
        Batch input;
        std::vector<Batch> pre;   // pre-activation per layer
        std::vector<Batch> post;  // layer output (activated where applicable)
    };

    Batch forward(const Batch& input, Cache* cache = nullptr) const;

    struct Grads {
        std::vector<LinearLayer> layers;  // same shapes as the net's layers
        Batch input;
    };

    Grads backward(const Cache& cache, const Batch& output_grad) const;

private:
    MlpSpec spec_;
    std::vector<LinearLayer> layers_;
};

/// Latent head whose weight matrix is block-diagonal: branch j reads the j-th
/// slice of the pre-latent vector and writes the j-th slice of the latent
/// vector through its own branch_dim x branch_dim block. Off-block weights are
/// never materialized.
struct BlockLinear {
    int branches = 0;
    int branch_dim = 0;
    std::vector<std::vector<double>> blocks;  // branches entries, branch_dim^2 row-major
    std::vector<double> bias;                 // branches * branch_dim

    int dim() const { return branches * branch_dim; }
    Batch forward(const Batch& input) const;

    struct Grads {
        std::vector<std::vector<double>> blocks;
        std::vector<double> bias;
        Batch input;
    };

    Grads backward(const Batch& input, const Batch& output_grad) const;
};

struct AutoencoderSpec {
    int input_dim = 0;
    std::vector<int> encoder_hidden;  // widths between input and pre-latent
    int branches = 1;
    int branch_dim = 2;
    double leaky_slope = 0.01;
    uint64_t seed = 0;

    int latent_dim() const { return branches * branch_dim; }
};

struct AeGradients {
    std::vector<LinearLayer> encoder_layers;
    BlockLinear::Grads head;
    std::vector<LinearLayer> decoder_layers;
};

/// Encoder MLP (activated output) -> block-diagonal latent head -> mirrored
/// decoder MLP.
class BranchedAutoencoder {
public:
    BranchedAutoencoder() = default;
    explicit BranchedAutoencoder(const AutoencoderSpec& spec);

    const AutoencoderSpec& spec() const { return spec_; }
    Mlp& encoder() { return encoder_; }
    const Mlp& encoder() const { return encoder_; }
    BlockLinear& head() { return head_; }
    const BlockLinear& head() const { return head_; }
    Mlp& decoder() { return decoder_; }
    const Mlp& decoder() const { return decoder_; }

    Batch encode(const Batch& input) const;
    Batch reconstruct(const Batch& input) const;
    std::vector<double> latent_slice(const std::vector<double>& latent, int branch) const;

private:
    AutoencoderSpec spec_;
    Mlp encoder_;
    BlockLinear head_;
    Mlp decoder_;
};

/// All trainable parameters in a fixed order (encoder, head, decoder).
std::vector<std::span<double>> parameter_spans(Mlp& net);
std::vector<std::span<double>> parameter_spans(BranchedAutoencoder& net);
std::vector<std::span<const double>> gradient_spans(const Mlp::Grads& grads);
std::vector<std::span<const double>> gradient_spans(const AeGradients& grads);

class Adam {
public:
    Adam(double learning_rate = 0.001, double beta1 = 0.9, double beta2 = 0.999,
         double epsilon = 1e-8);

    void step(const std::vector<std::span<double>>& params,
              const std::vector<std::span<const double>>& grads);

private:
    double learning_rate_, beta1_, beta2_, epsilon_;
    long long step_count_ = 0;
    std::vector<std::vector<double>> first_moment_;
    std::vector<std::vector<double>> second_moment_;
};

struct TrainConfig {
    double eta = 2.0;
    double lambda = 1.0;
    int batch_size = 100;
    int epochs = 50;
    double learning_rate = 0.001;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    Norm norm = Norm::L1;
    uint64_t seed = 0;
};

struct LossBreakdown {
    double total = 0.0;
    double reconstruction = 0.0;  // mean L1 over the batch
    double connectivity = 0.0;    // sum over branches, unweighted
};

/// Forward-only evaluation of mean-L1 reconstruction + lambda * per-branch
/// connectivity loss.
LossBreakdown combined_objective(const BranchedAutoencoder& net, const Batch& batch,
                                 const TrainConfig& config);

/// Gradients of the combined objective for every parameter. The connectivity
/// term reaches the encoder and head only; decoder gradients carry pure
/// reconstruction signal.
LossBreakdown backward_combined(const BranchedAutoencoder& net, const Batch& batch,
                                const TrainConfig& config, AeGradients& grads);

struct TrainRecord {
    int iteration = 0;
    int epoch = 0;
    double reconstruction = 0.0;
    double connectivity = 0.0;
};

using EpochCallback = std::function<void(int completed_epochs, const BranchedAutoencoder&)>;

/// Seeded shuffle per epoch, final partial batch dropped, Adam updates.
/// The callback fires once before training (epoch 0) and after every epoch.
std::vector<TrainRecord> train_autoencoder(BranchedAutoencoder& net, const Batch& data,
                                           const TrainConfig& config,
                                           const EpochCallback& callback = {});

std::string autoencoder_to_json(const BranchedAutoencoder& net, double trained_eta, Norm norm);

struct SavedAutoencoder {
    BranchedAutoencoder net;
    double trained_eta = 2.0;
    Norm norm = Norm::L1;
};

SavedAutoencoder autoencoder_from_json(const std::string& json_text);
void save_autoencoder(const std::string& path, const BranchedAutoencoder& net,
                      double trained_eta, Norm norm);
SavedAutoencoder load_autoencoder(const std::string& path);

struct ToyConfig {
    uint64_t seed = 0;
    double eta = 2.0;
    int epochs = 60;
    int batch_size = 50;
    double learning_rate = 0.002;
    Norm norm = Norm::L1;
    int sample_count = 1500;
    int cluster_count = 3;
    int eval_batches = 3000;
    int hidden_width = 20;
    std::string out_dir;  // empty: nothing written
};

struct ToyResult {
    Mlp net;
    Batch samples;                                            // the generated inputs
    std::vector<TrainRecord> curve;                           // reconstruction stays 0
    std::vector<std::pair<int, ConnectivityStats>> stats_by_epoch;

    const ConnectivityStats& initial_stats() const { return stats_by_epoch.front().second; }
    const ConnectivityStats& final_stats() const { return stats_by_epoch.back().second; }
};

/// Samples a seeded Gaussian mixture, trains the two-hidden-layer map on the
/// connectivity loss alone, and measures merge-distance statistics over
/// random evaluation batches at the dump epochs (0, 20 and the final epoch).
/// With out_dir set, writes loss_curve.csv, stats.csv, input.csv and
/// output_epoch<k>.csv files.
ToyResult run_toy_experiment(const ToyConfig& config);

}  // namespace phconn
