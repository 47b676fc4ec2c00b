#include "phconn/neural.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "phconn/io.hpp"
#include "phconn/loss.hpp"
#include "phconn/rng.hpp"

namespace phconn {

namespace {

void check_batch(const Batch& batch, int expected_dim, const char* what) {
    if (batch.empty()) {
        throw std::invalid_argument(std::string(what) + ": empty batch");
    }
    for (const auto& row : batch) {
        if (static_cast<int>(row.size()) != expected_dim) {
            throw std::invalid_argument(std::string(what) + ": input dimension mismatch");
        }
    }
}

LinearLayer init_layer(int in, int out, Rng& rng) {
    LinearLayer layer;
    layer.in = in;
    layer.out = out;
    const double bound = std::sqrt(1.0 / in);
    layer.weight.resize(static_cast<size_t>(in) * static_cast<size_t>(out));
    layer.bias.resize(static_cast<size_t>(out));
    for (auto& w : layer.weight) {
        w = rng.uniform(-bound, bound);
    }
    for (auto& b : layer.bias) {
        b = rng.uniform(-bound, bound);
    }
    return layer;
}

double leaky_relu(double x, double slope) {
    return x >= 0.0 ? x : slope * x;
}

double leaky_relu_grad(double x, double slope) {
    return x >= 0.0 ? 1.0 : slope;
}

}  // namespace

Mlp::Mlp(const MlpSpec& spec) : spec_(spec) {
    if (spec.widths.size() < 2) {
        throw std::invalid_argument("MlpSpec needs at least two widths");
    }
    for (const int width : spec.widths) {
        if (width < 1) {
            throw std::invalid_argument("MlpSpec widths must be positive");
        }
    }
    Rng rng(spec.seed);
    layers_.reserve(spec.widths.size() - 1);
    for (size_t l = 0; l + 1 < spec.widths.size(); ++l) {
        layers_.push_back(init_layer(spec.widths[l], spec.widths[l + 1], rng));
    }
}

Batch Mlp::forward(const Batch& input, Cache* cache) const {
    check_batch(input, input_dim(), "Mlp::forward");
    if (cache != nullptr) {
        cache->input = input;
        cache->pre.assign(layers_.size(), {});
        cache->post.assign(layers_.size(), {});
    }
    Batch current = input;
    for (size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        const bool activated = l + 1 < layers_.size() || spec_.activate_final;
        Batch pre(current.size(), std::vector<double>(static_cast<size_t>(layer.out)));
        for (size_t r = 0; r < current.size(); ++r) {
            for (int o = 0; o < layer.out; ++o) {
                double acc = layer.bias[static_cast<size_t>(o)];
                const double* row = layer.weight.data() + static_cast<size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) {
                    acc += row[i] * current[r][static_cast<size_t>(i)];
                }
                pre[r][static_cast<size_t>(o)] = acc;
            }
        }
        if (cache != nullptr) {
            cache->pre[l] = pre;
        }
        if (activated) {
            for (auto& row : pre) {
                for (auto& x : row) {
                    x = leaky_relu(x, spec_.leaky_slope);
                }
            }
        }
        if (cache != nullptr) {
            cache->post[l] = pre;
        }
        current = std::move(pre);
    }
    return current;
}

Mlp::Grads Mlp::backward(const Cache& cache, const Batch& output_grad) const {
    Grads grads;
    grads.layers.resize(layers_.size());
    Batch upstream = output_grad;
    for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
        const auto& layer = layers_[static_cast<size_t>(l)];
        const bool activated = static_cast<size_t>(l) + 1 < layers_.size() || spec_.activate_final;
        const Batch& layer_input =
            l == 0 ? cache.input : cache.post[static_cast<size_t>(l - 1)];
        const Batch& pre = cache.pre[static_cast<size_t>(l)];

        Batch d_pre = std::move(upstream);
        if (activated) {
            for (size_t r = 0; r < d_pre.size(); ++r) {
                for (int o = 0; o < layer.out; ++o) {
                    d_pre[r][static_cast<size_t>(o)] *=
                        leaky_relu_grad(pre[r][static_cast<size_t>(o)], spec_.leaky_slope);
                }
            }
        }

        auto& layer_grads = grads.layers[static_cast<size_t>(l)];
        layer_grads.in = layer.in;
        layer_grads.out = layer.out;
        layer_grads.weight.assign(layer.weight.size(), 0.0);
        layer_grads.bias.assign(layer.bias.size(), 0.0);
        for (size_t r = 0; r < d_pre.size(); ++r) {
            for (int o = 0; o < layer.out; ++o) {
                const double g = d_pre[r][static_cast<size_t>(o)];
                layer_grads.bias[static_cast<size_t>(o)] += g;
                double* weight_row =
                    layer_grads.weight.data() + static_cast<size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) {
                    weight_row[i] += g * layer_input[r][static_cast<size_t>(i)];
                }
            }
        }

        Batch d_input(d_pre.size(), std::vector<double>(static_cast<size_t>(layer.in), 0.0));
        for (size_t r = 0; r < d_pre.size(); ++r) {
            for (int o = 0; o < layer.out; ++o) {
                const double g = d_pre[r][static_cast<size_t>(o)];
                const double* weight_row =
                    layer.weight.data() + static_cast<size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) {
                    d_input[r][static_cast<size_t>(i)] += g * weight_row[i];
                }
            }
        }
        upstream = std::move(d_input);
    }
    grads.input = std::move(upstream);
    return grads;
}

Batch BlockLinear::forward(const Batch& input) const {
    check_batch(input, dim(), "BlockLinear::forward");
    Batch output(input.size(), std::vector<double>(static_cast<size_t>(dim())));
    for (size_t r = 0; r < input.size(); ++r) {
        for (int branch = 0; branch < branches; ++branch) {
            const int offset = branch * branch_dim;
            const auto& block = blocks[static_cast<size_t>(branch)];
            for (int o = 0; o < branch_dim; ++o) {
                double acc = bias[static_cast<size_t>(offset + o)];
                for (int i = 0; i < branch_dim; ++i) {
                    acc += block[static_cast<size_t>(o) * branch_dim + i] *
                           input[r][static_cast<size_t>(offset + i)];
                }
                output[r][static_cast<size_t>(offset + o)] = acc;
            }
        }
    }
    return output;
}

BlockLinear::Grads BlockLinear::backward(const Batch& input, const Batch& output_grad) const {
    Grads grads;
    grads.blocks.assign(static_cast<size_t>(branches),
                        std::vector<double>(static_cast<size_t>(branch_dim) * branch_dim, 0.0));
    grads.bias.assign(bias.size(), 0.0);
    grads.input.assign(input.size(), std::vector<double>(static_cast<size_t>(dim()), 0.0));
    for (size_t r = 0; r < input.size(); ++r) {
        for (int branch = 0; branch < branches; ++branch) {
            const int offset = branch * branch_dim;
            const auto& block = blocks[static_cast<size_t>(branch)];
            auto& block_grad = grads.blocks[static_cast<size_t>(branch)];
            for (int o = 0; o < branch_dim; ++o) {
                const double g = output_grad[r][static_cast<size_t>(offset + o)];
                grads.bias[static_cast<size_t>(offset + o)] += g;
                for (int i = 0; i < branch_dim; ++i) {
                    block_grad[static_cast<size_t>(o) * branch_dim + i] +=
                        g * input[r][static_cast<size_t>(offset + i)];
                    grads.input[r][static_cast<size_t>(offset + i)] +=
                        g * block[static_cast<size_t>(o) * branch_dim + i];
                }
            }
        }
    }
    return grads;
}

BranchedAutoencoder::BranchedAutoencoder(const AutoencoderSpec& spec) : spec_(spec) {
    if (spec.input_dim < 1 || spec.branches < 1 || spec.branch_dim < 1) {
        throw std::invalid_argument("AutoencoderSpec: dimensions must be positive");
    }
    MlpSpec encoder_spec;
    encoder_spec.widths.push_back(spec.input_dim);
    encoder_spec.widths.insert(encoder_spec.widths.end(), spec.encoder_hidden.begin(),
                               spec.encoder_hidden.end());
    encoder_spec.widths.push_back(spec.latent_dim());
    encoder_spec.leaky_slope = spec.leaky_slope;
    encoder_spec.seed = Rng::derive(spec.seed, 1);
    encoder_spec.activate_final = true;
    encoder_ = Mlp(encoder_spec);

    head_.branches = spec.branches;
    head_.branch_dim = spec.branch_dim;
    Rng head_rng(Rng::derive(spec.seed, 2));
    const double bound = std::sqrt(1.0 / spec.branch_dim);
    head_.blocks.assign(static_cast<size_t>(spec.branches),
                        std::vector<double>(static_cast<size_t>(spec.branch_dim) * spec.branch_dim));
    for (auto& block : head_.blocks) {
        for (auto& w : block) {
            w = head_rng.uniform(-bound, bound);
        }
    }
    head_.bias.resize(static_cast<size_t>(spec.latent_dim()));
    for (auto& b : head_.bias) {
        b = head_rng.uniform(-bound, bound);
    }

    MlpSpec decoder_spec;
    decoder_spec.widths.push_back(spec.latent_dim());
    decoder_spec.widths.insert(decoder_spec.widths.end(), spec.encoder_hidden.rbegin(),
                               spec.encoder_hidden.rend());
    decoder_spec.widths.push_back(spec.input_dim);
    decoder_spec.leaky_slope = spec.leaky_slope;
    decoder_spec.seed = Rng::derive(spec.seed, 3);
    decoder_spec.activate_final = false;
    decoder_ = Mlp(decoder_spec);
}

Batch BranchedAutoencoder::encode(const Batch& input) const {
    return head_.forward(encoder_.forward(input));
}

Batch BranchedAutoencoder::reconstruct(const Batch& input) const {
    return decoder_.forward(encode(input));
}

std::vector<double> BranchedAutoencoder::latent_slice(const std::vector<double>& latent,
                                                      int branch) const {
    const int offset = branch * spec_.branch_dim;
    return {latent.begin() + offset, latent.begin() + offset + spec_.branch_dim};
}

std::vector<std::span<double>> parameter_spans(Mlp& net) {
    std::vector<std::span<double>> spans;
    for (auto& layer : net.layers()) {
        spans.emplace_back(layer.weight);
        spans.emplace_back(layer.bias);
    }
    return spans;
}

std::vector<std::span<double>> parameter_spans(BranchedAutoencoder& net) {
    std::vector<std::span<double>> spans = parameter_spans(net.encoder());
    for (auto& block : net.head().blocks) {
        spans.emplace_back(block);
    }
    spans.emplace_back(net.head().bias);
    const auto decoder_spans = parameter_spans(net.decoder());
    spans.insert(spans.end(), decoder_spans.begin(), decoder_spans.end());
    return spans;
}

std::vector<std::span<const double>> gradient_spans(const Mlp::Grads& grads) {
    std::vector<std::span<const double>> spans;
    for (const auto& layer : grads.layers) {
        spans.emplace_back(layer.weight);
        spans.emplace_back(layer.bias);
    }
    return spans;
}

std::vector<std::span<const double>> gradient_spans(const AeGradients& grads) {
    std::vector<std::span<const double>> spans;
    for (const auto& layer : grads.encoder_layers) {
        spans.emplace_back(layer.weight);
        spans.emplace_back(layer.bias);
    }
    for (const auto& block : grads.head.blocks) {
        spans.emplace_back(block);
    }
    spans.emplace_back(grads.head.bias);
    for (const auto& layer : grads.decoder_layers) {
        spans.emplace_back(layer.weight);
        spans.emplace_back(layer.bias);
    }
    return spans;
}

Adam::Adam(double learning_rate, double beta1, double beta2, double epsilon)
    : learning_rate_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

void Adam::step(const std::vector<std::span<double>>& params,
                const std::vector<std::span<const double>>& grads) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("Adam::step: parameter/gradient span mismatch");
    }
    if (first_moment_.empty()) {
        first_moment_.resize(params.size());
        second_moment_.resize(params.size());
        for (size_t s = 0; s < params.size(); ++s) {
            first_moment_[s].assign(params[s].size(), 0.0);
            second_moment_[s].assign(params[s].size(), 0.0);
        }
    }
    ++step_count_;
    const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
    const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
    for (size_t s = 0; s < params.size(); ++s) {
        if (params[s].size() != grads[s].size()) {
            throw std::invalid_argument("Adam::step: span size mismatch");
        }
        auto& m = first_moment_[s];
        auto& v = second_moment_[s];
        for (size_t k = 0; k < params[s].size(); ++k) {
            const double g = grads[s][k];
            m[k] = beta1_ * m[k] + (1.0 - beta1_) * g;
            v[k] = beta2_ * v[k] + (1.0 - beta2_) * g * g;
            const double m_hat = m[k] / bias1;
            const double v_hat = v[k] / bias2;
            params[s][k] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
        }
    }
}

namespace {

void check_train_batch(const Batch& batch, const TrainConfig& config) {
    if (config.lambda < 0.0) {
        throw std::invalid_argument("lambda must be nonnegative");
    }
    if (config.lambda > 0.0 && batch.size() < 2) {
        throw std::invalid_argument(
            "connectivity loss needs batches of at least two samples");
    }
}

double reconstruction_l1(const Batch& batch, const Batch& recon) {
    double total = 0.0;
    for (size_t r = 0; r < batch.size(); ++r) {
        for (size_t c = 0; c < batch[r].size(); ++c) {
            total += std::abs(batch[r][c] - recon[r][c]);
        }
    }
    return total / static_cast<double>(batch.size());
}

PointCloud branch_cloud(const Batch& latent, int branch, int branch_dim, Norm norm) {
    PointCloud cloud;
    cloud.norm = norm;
    cloud.points.reserve(latent.size());
    const int offset = branch * branch_dim;
    for (const auto& row : latent) {
        cloud.points.emplace_back(row.begin() + offset, row.begin() + offset + branch_dim);
    }
    return cloud;
}

}  // namespace

LossBreakdown combined_objective(const BranchedAutoencoder& net, const Batch& batch,
                                 const TrainConfig& config) {
    check_train_batch(batch, config);
    LossBreakdown breakdown;
    const Batch latent = net.encode(batch);
    const Batch recon = net.decoder().forward(latent);
    breakdown.reconstruction = reconstruction_l1(batch, recon);
    if (config.lambda > 0.0) {
        for (int branch = 0; branch < net.spec().branches; ++branch) {
            const auto cloud = branch_cloud(latent, branch, net.spec().branch_dim, config.norm);
            breakdown.connectivity += connectivity_loss(cloud, config.eta).value;
        }
    }
    breakdown.total = breakdown.reconstruction + config.lambda * breakdown.connectivity;
    return breakdown;
}

LossBreakdown backward_combined(const BranchedAutoencoder& net, const Batch& batch,
                                const TrainConfig& config, AeGradients& grads) {
    check_train_batch(batch, config);
    LossBreakdown breakdown;
    const size_t batch_size = batch.size();

    Mlp::Cache encoder_cache;
    const Batch pre_latent = net.encoder().forward(batch, &encoder_cache);
    const Batch latent = net.head().forward(pre_latent);
    Mlp::Cache decoder_cache;
    const Batch recon = net.decoder().forward(latent, &decoder_cache);

    breakdown.reconstruction = reconstruction_l1(batch, recon);

    // d(mean L1)/d(recon): sign of the residual, scaled by 1/b.
    Batch d_recon(batch_size, std::vector<double>(batch.front().size(), 0.0));
    const double inv_b = 1.0 / static_cast<double>(batch_size);
    for (size_t r = 0; r < batch_size; ++r) {
        for (size_t c = 0; c < batch[r].size(); ++c) {
            const double diff = recon[r][c] - batch[r][c];
            d_recon[r][c] = diff > 0.0 ? inv_b : (diff < 0.0 ? -inv_b : 0.0);
        }
    }
    auto decoder_grads = net.decoder().backward(decoder_cache, d_recon);

    Batch d_latent = std::move(decoder_grads.input);
    if (config.lambda > 0.0) {
        for (int branch = 0; branch < net.spec().branches; ++branch) {
            const auto cloud = branch_cloud(latent, branch, net.spec().branch_dim, config.norm);
            const auto branch_loss = connectivity_grad(cloud, config.eta);
            breakdown.connectivity += branch_loss.value;
            const int offset = branch * net.spec().branch_dim;
            for (size_t r = 0; r < batch_size; ++r) {
                for (int v = 0; v < net.spec().branch_dim; ++v) {
                    d_latent[r][static_cast<size_t>(offset + v)] +=
                        config.lambda * branch_loss.gradient[r][static_cast<size_t>(v)];
                }
            }
        }
    }

    auto head_grads = net.head().backward(pre_latent, d_latent);
    auto encoder_grads = net.encoder().backward(encoder_cache, head_grads.input);

    grads.encoder_layers = std::move(encoder_grads.layers);
    grads.head = std::move(head_grads);
    grads.decoder_layers = std::move(decoder_grads.layers);

    breakdown.total = breakdown.reconstruction + config.lambda * breakdown.connectivity;
    return breakdown;
}

std::vector<TrainRecord> train_autoencoder(BranchedAutoencoder& net, const Batch& data,
                                           const TrainConfig& config,
                                           const EpochCallback& callback) {
    if (data.empty()) {
        throw std::invalid_argument("train_autoencoder: empty dataset");
    }
    if (config.batch_size < 2) {
        throw std::invalid_argument("train_autoencoder: batch_size must be >= 2");
    }
    check_batch(data, net.spec().input_dim, "train_autoencoder");

    std::vector<TrainRecord> records;
    Adam optimizer(config.learning_rate, config.adam_beta1, config.adam_beta2,
                   config.adam_epsilon);
    Rng shuffle_rng(Rng::derive(config.seed, 17));
    std::vector<int> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    const auto params = parameter_spans(net);
    if (callback) {
        callback(0, net);
    }
    int iteration = 0;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        const size_t batch_count = data.size() / static_cast<size_t>(config.batch_size);
        for (size_t batch_index = 0; batch_index < batch_count; ++batch_index) {
            Batch batch;
            batch.reserve(static_cast<size_t>(config.batch_size));
            for (int k = 0; k < config.batch_size; ++k) {
                batch.push_back(
                    data[static_cast<size_t>(order[batch_index * config.batch_size + k])]);
            }
            AeGradients grads;
            const auto breakdown = backward_combined(net, batch, config, grads);
            optimizer.step(params, gradient_spans(grads));
            ++iteration;
            records.push_back({iteration, epoch, breakdown.reconstruction,
                               breakdown.connectivity});
        }
        if (callback) {
            callback(epoch, net);
        }
    }
    return records;
}

namespace {

using nlohmann::json;

json layer_to_json(const LinearLayer& layer) {
    return json{{"in", layer.in}, {"out", layer.out}, {"weight", layer.weight},
                {"bias", layer.bias}};
}

void layer_from_json(const json& j, LinearLayer& layer) {
    if (j.at("in").get<int>() != layer.in || j.at("out").get<int>() != layer.out) {
        throw std::runtime_error("model file: layer shape mismatch");
    }
    j.at("weight").get_to(layer.weight);
    j.at("bias").get_to(layer.bias);
    if (layer.weight.size() != static_cast<size_t>(layer.in) * static_cast<size_t>(layer.out) ||
        layer.bias.size() != static_cast<size_t>(layer.out)) {
        throw std::runtime_error("model file: layer payload size mismatch");
    }
}

}  // namespace

std::string autoencoder_to_json(const BranchedAutoencoder& net, double trained_eta, Norm norm) {
    const auto& spec = net.spec();
    json j;
    j["format"] = "phconn-autoencoder";
    j["version"] = 1;
    j["input_dim"] = spec.input_dim;
    j["encoder_hidden"] = spec.encoder_hidden;
    j["branches"] = spec.branches;
    j["branch_dim"] = spec.branch_dim;
    j["leaky_slope"] = spec.leaky_slope;
    j["seed"] = spec.seed;
    j["trained_eta"] = trained_eta;
    j["norm"] = to_string(norm);
    j["encoder"] = json::array();
    for (const auto& layer : net.encoder().layers()) {
        j["encoder"].push_back(layer_to_json(layer));
    }
    j["head"] = json{{"blocks", net.head().blocks}, {"bias", net.head().bias}};
    j["decoder"] = json::array();
    for (const auto& layer : net.decoder().layers()) {
        j["decoder"].push_back(layer_to_json(layer));
    }
    return j.dump(2);
}

SavedAutoencoder autoencoder_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    if (j.value("format", "") != "phconn-autoencoder") {
        throw std::runtime_error("model file: unknown format tag");
    }
    if (j.value("version", 0) != 1) {
        throw std::runtime_error("model file: unsupported version");
    }
    AutoencoderSpec spec;
    spec.input_dim = j.at("input_dim").get<int>();
    j.at("encoder_hidden").get_to(spec.encoder_hidden);
    spec.branches = j.at("branches").get<int>();
    spec.branch_dim = j.at("branch_dim").get<int>();
    spec.leaky_slope = j.at("leaky_slope").get<double>();
    spec.seed = j.at("seed").get<uint64_t>();

    SavedAutoencoder saved;
    saved.net = BranchedAutoencoder(spec);
    saved.trained_eta = j.at("trained_eta").get<double>();
    saved.norm = norm_from_string(j.at("norm").get<std::string>());

    const auto& encoder_json = j.at("encoder");
    auto& encoder_layers = saved.net.encoder().layers();
    if (encoder_json.size() != encoder_layers.size()) {
        throw std::runtime_error("model file: encoder layer count mismatch");
    }
    for (size_t l = 0; l < encoder_layers.size(); ++l) {
        layer_from_json(encoder_json[l], encoder_layers[l]);
    }

    auto& head = saved.net.head();
    j.at("head").at("blocks").get_to(head.blocks);
    j.at("head").at("bias").get_to(head.bias);
    if (head.blocks.size() != static_cast<size_t>(spec.branches) ||
        head.bias.size() != static_cast<size_t>(spec.latent_dim())) {
        throw std::runtime_error("model file: head payload size mismatch");
    }
    for (const auto& block : head.blocks) {
        if (block.size() != static_cast<size_t>(spec.branch_dim) * spec.branch_dim) {
            throw std::runtime_error("model file: head block size mismatch");
        }
    }

    const auto& decoder_json = j.at("decoder");
    auto& decoder_layers = saved.net.decoder().layers();
    if (decoder_json.size() != decoder_layers.size()) {
        throw std::runtime_error("model file: decoder layer count mismatch");
    }
    for (size_t l = 0; l < decoder_layers.size(); ++l) {
        layer_from_json(decoder_json[l], decoder_layers[l]);
    }
    return saved;
}

void save_autoencoder(const std::string& path, const BranchedAutoencoder& net,
                      double trained_eta, Norm norm) {
    std::ofstream output(path);
    if (!output) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    output << autoencoder_to_json(net, trained_eta, norm) << '\n';
}

SavedAutoencoder load_autoencoder(const std::string& path) {
    std::ifstream input(path);
    if (!input) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    std::stringstream buffer;
    buffer << input.rdbuf();
    return autoencoder_from_json(buffer.str());
}

namespace {

Batch sample_gaussian_mixture(int sample_count, int cluster_count, Rng& rng) {
    // Cluster means and mixing matrices are drawn once, then samples round-robin.
    struct Cluster {
        double mean[2];
        double mix[4];
    };
    std::vector<Cluster> clusters(static_cast<size_t>(cluster_count));
    for (auto& cluster : clusters) {
        cluster.mean[0] = rng.uniform(-4.0, 4.0);
        cluster.mean[1] = rng.uniform(-4.0, 4.0);
        for (auto& entry : cluster.mix) {
            entry = 0.9 * rng.normal();
        }
    }
    Batch samples;
    samples.reserve(static_cast<size_t>(sample_count));
    for (int s = 0; s < sample_count; ++s) {
        const auto& cluster = clusters[static_cast<size_t>(s % cluster_count)];
        const double g0 = rng.normal();
        const double g1 = rng.normal();
        samples.push_back({cluster.mean[0] + cluster.mix[0] * g0 + cluster.mix[1] * g1,
                           cluster.mean[1] + cluster.mix[2] * g0 + cluster.mix[3] * g1});
    }
    return samples;
}

ConnectivityStats toy_eval_stats(const Mlp& net, const Batch& samples, const ToyConfig& config,
                                 uint64_t stream) {
    Rng rng(Rng::derive(config.seed, stream));
    std::vector<PointCloud> clouds;
    clouds.reserve(static_cast<size_t>(config.eval_batches));
    for (int batch = 0; batch < config.eval_batches; ++batch) {
        const auto indices =
            rng.sample_indices(static_cast<int>(samples.size()), config.batch_size);
        Batch inputs;
        inputs.reserve(indices.size());
        for (const int index : indices) {
            inputs.push_back(samples[static_cast<size_t>(index)]);
        }
        PointCloud cloud;
        cloud.norm = config.norm;
        cloud.points = net.forward(inputs);
        clouds.push_back(std::move(cloud));
    }
    return batch_stats(clouds);
}

}  // namespace

ToyResult run_toy_experiment(const ToyConfig& config) {
    if (config.sample_count < config.batch_size || config.batch_size < 2) {
        throw std::invalid_argument("run_toy_experiment: need sample_count >= batch_size >= 2");
    }
    namespace fs = std::filesystem;
    const bool write_files = !config.out_dir.empty();
    if (write_files) {
        fs::create_directories(config.out_dir);
    }

    ToyResult result;
    Rng data_rng(Rng::derive(config.seed, 11));
    result.samples = sample_gaussian_mixture(config.sample_count, config.cluster_count, data_rng);

    MlpSpec net_spec;
    net_spec.widths = {2, config.hidden_width, config.hidden_width, 2};
    net_spec.leaky_slope = 0.01;
    net_spec.seed = Rng::derive(config.seed, 12);
    result.net = Mlp(net_spec);

    std::vector<int> dump_epochs = {0};
    if (config.epochs > 20) {
        dump_epochs.push_back(20);
    }
    if (config.epochs > 0) {
        dump_epochs.push_back(config.epochs);
    }

    const auto dump = [&](int epoch) {
        const auto stats = toy_eval_stats(result.net, result.samples, config,
                                          1000 + static_cast<uint64_t>(epoch));
        result.stats_by_epoch.emplace_back(epoch, stats);
        if (write_files) {
            write_csv_rows(
                (fs::path(config.out_dir) / ("output_epoch" + std::to_string(epoch) + ".csv"))
                    .string(),
                result.net.forward(result.samples));
        }
    };

    if (write_files) {
        write_csv_rows((fs::path(config.out_dir) / "input.csv").string(), result.samples);
    }

    Adam optimizer(config.learning_rate);
    Rng shuffle_rng(Rng::derive(config.seed, 13));
    std::vector<int> order(result.samples.size());
    std::iota(order.begin(), order.end(), 0);
    const auto params = parameter_spans(result.net);

    int iteration = 0;
    for (int epoch = 0; epoch <= config.epochs; ++epoch) {
        if (std::find(dump_epochs.begin(), dump_epochs.end(), epoch) != dump_epochs.end()) {
            dump(epoch);
        }
        if (epoch == config.epochs) {
            break;
        }
        shuffle_rng.shuffle(order);
        const size_t batch_count = result.samples.size() / static_cast<size_t>(config.batch_size);
        for (size_t batch_index = 0; batch_index < batch_count; ++batch_index) {
            Batch inputs;
            inputs.reserve(static_cast<size_t>(config.batch_size));
            for (int k = 0; k < config.batch_size; ++k) {
                inputs.push_back(result.samples[static_cast<size_t>(
                    order[batch_index * config.batch_size + k])]);
            }
            Mlp::Cache cache;
            PointCloud outputs;
            outputs.norm = config.norm;
            outputs.points = result.net.forward(inputs, &cache);
            const auto loss = connectivity_grad(outputs, config.eta);
            const auto grads = result.net.backward(cache, loss.gradient);
            optimizer.step(params, gradient_spans(grads));
            ++iteration;
            result.curve.push_back({iteration, epoch + 1, 0.0, loss.value});
        }
    }

    if (write_files) {
        std::ofstream curve((fs::path(config.out_dir) / "loss_curve.csv").string());
        curve << "iteration,epoch,connectivity_loss\n";
        for (const auto& record : result.curve) {
            curve << record.iteration << ',' << record.epoch << ','
                  << format_double(record.connectivity) << '\n';
        }
        std::ofstream stats((fs::path(config.out_dir) / "stats.csv").string());
        stats << "epoch,mean_min,mean_avg,mean_max\n";
        for (const auto& [epoch, value] : result.stats_by_epoch) {
            stats << epoch << ',' << format_double(value.mean_min) << ','
                  << format_double(value.mean_avg) << ',' << format_double(value.mean_max)
                  << '\n';
        }
    }
    return result;
}

}  // namespace phconn
