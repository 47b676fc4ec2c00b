#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "phconn/gradcheck.hpp"
#include "phconn/io.hpp"
#include "phconn/neural.hpp"
#include "phconn/rng.hpp"

using namespace phconn;

namespace {

Batch random_batch(int rows, int cols, Rng& rng, double scale = 1.0) {
    Batch batch(static_cast<size_t>(rows), std::vector<double>(static_cast<size_t>(cols)));
    for (auto& row : batch) {
        for (auto& value : row) {
            value = scale * rng.normal();
        }
    }
    return batch;
}

// Independent scalar re-evaluation of an MLP forward pass.
std::vector<double> naive_forward(const Mlp& net, const std::vector<double>& input) {
    std::vector<double> current = input;
    const auto& layers = net.layers();
    for (size_t l = 0; l < layers.size(); ++l) {
        std::vector<double> next(static_cast<size_t>(layers[l].out));
        for (int o = 0; o < layers[l].out; ++o) {
            double acc = layers[l].bias[static_cast<size_t>(o)];
            for (int i = 0; i < layers[l].in; ++i) {
                acc += layers[l].weight[static_cast<size_t>(o) * layers[l].in + i] *
                       current[static_cast<size_t>(i)];
            }
            next[static_cast<size_t>(o)] = acc;
        }
        const bool activated = l + 1 < layers.size() || net.spec().activate_final;
        if (activated) {
            for (auto& value : next) {
                value = value >= 0.0 ? value : net.spec().leaky_slope * value;
            }
        }
        current = std::move(next);
    }
    return current;
}

BranchedAutoencoder small_net(uint64_t seed, int branches = 1) {
    AutoencoderSpec spec;
    spec.input_dim = 2;
    spec.encoder_hidden = {3};
    spec.branches = branches;
    spec.branch_dim = 2;
    spec.seed = seed;
    return BranchedAutoencoder(spec);
}

}  // namespace

TEST_CASE("zero parameters give zero outputs") {
    Mlp net(MlpSpec{{2, 4, 3}, 0.01, 5, false});
    for (auto span : parameter_spans(net)) {
        for (auto& value : span) {
            value = 0.0;
        }
    }
    const auto out = net.forward({{1.0, -2.0}});
    for (const double value : out.front()) {
        CHECK(value == 0.0);
    }
}

TEST_CASE("identity-initialized linear layer passes inputs through") {
    Mlp net(MlpSpec{{2, 2}, 0.01, 5, false});
    auto& layer = net.layers().front();
    layer.weight = {1.0, 0.0, 0.0, 1.0};
    layer.bias = {0.0, 0.0};
    const Batch input = {{3.25, -1.5}, {0.0, 7.0}};
    CHECK(net.forward(input) == input);
}

TEST_CASE("forward matches a scalar re-evaluation") {
    Rng rng(71);
    Mlp net(MlpSpec{{3, 5, 4, 2}, 0.01, 99, false});
    const auto batch = random_batch(6, 3, rng);
    const auto out = net.forward(batch);
    for (size_t r = 0; r < batch.size(); ++r) {
        CHECK(out[r] == naive_forward(net, batch[r]));
    }
}

TEST_CASE("shape mismatch is rejected") {
    Mlp net(MlpSpec{{3, 2}, 0.01, 0, false});
    CHECK_THROWS_AS(net.forward({{1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("block head touches only its own slice") {
    auto net = small_net(123, 2);
    const int latent = net.spec().latent_dim();
    const Batch zero = {std::vector<double>(static_cast<size_t>(latent), 0.0)};
    const auto base = net.head().forward(zero);
    for (int p = 0; p < latent; ++p) {
        Batch basis = zero;
        basis[0][static_cast<size_t>(p)] = 1.0;
        const auto out = net.head().forward(basis);
        const int branch = p / net.spec().branch_dim;
        for (int o = 0; o < latent; ++o) {
            if (o / net.spec().branch_dim != branch) {
                CHECK(out[0][static_cast<size_t>(o)] == base[0][static_cast<size_t>(o)]);
            }
        }
    }
}

TEST_CASE("block-diagonality survives Adam updates") {
    auto net = small_net(31, 2);
    Rng rng(32);
    TrainConfig config;
    config.batch_size = 4;
    config.epochs = 3;
    config.lambda = 1.0;
    config.eta = 1.0;
    config.seed = 9;
    const auto data = random_batch(24, 2, rng);
    train_autoencoder(net, data, config);
    // Off-block weights are structurally absent; the head must still route
    // slices independently after training.
    const int latent = net.spec().latent_dim();
    const Batch zero = {std::vector<double>(static_cast<size_t>(latent), 0.0)};
    const auto base = net.head().forward(zero);
    Batch basis = zero;
    basis[0][0] = 1.0;  // branch 0 input
    const auto out = net.head().forward(basis);
    for (int o = net.spec().branch_dim; o < latent; ++o) {
        CHECK(out[0][static_cast<size_t>(o)] == base[0][static_cast<size_t>(o)]);
    }
}

TEST_CASE("lambda = 0 leaves pure reconstruction gradients") {
    auto net = small_net(17);
    Rng rng(18);
    const auto batch = random_batch(4, 2, rng);
    TrainConfig with_conn;
    with_conn.lambda = 2.0;
    with_conn.eta = 1.0;
    TrainConfig without_conn = with_conn;
    without_conn.lambda = 0.0;

    AeGradients grads_with;
    AeGradients grads_without;
    const auto breakdown_with = backward_combined(net, batch, with_conn, grads_with);
    const auto breakdown_without = backward_combined(net, batch, without_conn, grads_without);

    CHECK(breakdown_with.connectivity > 0.0);
    CHECK(breakdown_with.reconstruction == breakdown_without.reconstruction);
    CHECK(breakdown_without.connectivity == 0.0);
    CHECK(breakdown_without.total == breakdown_without.reconstruction);
    // The connectivity term never reaches the decoder.
    for (size_t l = 0; l < grads_with.decoder_layers.size(); ++l) {
        CHECK(grads_with.decoder_layers[l].weight == grads_without.decoder_layers[l].weight);
        CHECK(grads_with.decoder_layers[l].bias == grads_without.decoder_layers[l].bias);
    }
    // It does reach the encoder.
    bool encoder_differs = false;
    for (size_t l = 0; l < grads_with.encoder_layers.size(); ++l) {
        if (grads_with.encoder_layers[l].weight != grads_without.encoder_layers[l].weight) {
            encoder_differs = true;
        }
    }
    CHECK(encoder_differs);
}

TEST_CASE("combined-objective gradients match finite differences") {
    const auto report = parameter_gradient_check(25, 2024);
    CHECK(report.trials_accepted >= 15);
    CHECK(report.max_rel_error <= 1e-4);
}

TEST_CASE("connectivity loss needs batches of two or more") {
    auto net = small_net(55);
    TrainConfig config;
    config.lambda = 1.0;
    AeGradients grads;
    CHECK_THROWS_AS(backward_combined(net, {{0.5, 0.5}}, config, grads),
                    std::invalid_argument);
}

TEST_CASE("training is deterministic and improves reconstruction") {
    Rng rng(81);
    const auto data = random_batch(60, 2, rng, 2.0);
    TrainConfig config;
    config.lambda = 0.0;
    config.batch_size = 10;
    config.epochs = 20;
    config.learning_rate = 0.01;
    config.seed = 4;

    auto first = small_net(3);
    const auto records_first = train_autoencoder(first, data, config);
    auto second = small_net(3);
    const auto records_second = train_autoencoder(second, data, config);

    REQUIRE(records_first.size() == records_second.size());
    for (size_t k = 0; k < records_first.size(); ++k) {
        CHECK(records_first[k].reconstruction == records_second[k].reconstruction);
        CHECK(records_first[k].connectivity == records_second[k].connectivity);
    }
    CHECK(first.reconstruct(data) == second.reconstruct(data));

    const auto start = combined_objective(first, data, config);
    CHECK(records_first.back().reconstruction < records_first.front().reconstruction);
    (void)start;
}

TEST_CASE("zero epochs leave the net untouched") {
    auto net = small_net(91);
    const auto before = net.reconstruct({{0.5, -0.5}, {1.0, 2.0}});
    TrainConfig config;
    config.epochs = 0;
    config.batch_size = 2;
    Rng rng(92);
    const auto records = train_autoencoder(net, random_batch(8, 2, rng), config);
    CHECK(records.empty());
    CHECK(net.reconstruct({{0.5, -0.5}, {1.0, 2.0}}) == before);
}

TEST_CASE("model files round-trip exactly") {
    auto net = small_net(2718, 2);
    const auto path = std::filesystem::temp_directory_path() / "phconn_model_roundtrip.json";
    save_autoencoder(path.string(), net, 1.5, Norm::L2);
    const auto loaded = load_autoencoder(path.string());
    std::filesystem::remove(path);
    CHECK(loaded.trained_eta == 1.5);
    CHECK(loaded.norm == Norm::L2);
    Rng rng(5);
    const auto batch = random_batch(5, 2, rng);
    CHECK(loaded.net.encode(batch) == net.encode(batch));
    CHECK(loaded.net.reconstruct(batch) == net.reconstruct(batch));
}

TEST_CASE("toy experiment cloud dumps round-trip through the CSV reader") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "phconn_toy_roundtrip";
    fs::remove_all(dir);
    ToyConfig config;
    config.seed = 6;
    config.epochs = 2;
    config.sample_count = 60;
    config.batch_size = 15;
    config.eval_batches = 10;
    config.out_dir = dir.string();
    const auto result = run_toy_experiment(config);

    const auto inputs = read_cloud_csv((dir / "input.csv").string(), Norm::L1);
    CHECK(inputs.points == result.samples);
    const auto outputs = read_cloud_csv((dir / "output_epoch2.csv").string(), Norm::L1);
    CHECK(outputs.points == result.net.forward(result.samples));
    fs::remove_all(dir);
}

TEST_CASE("toy experiment at reduced scale keeps its invariants") {
    ToyConfig config;
    config.seed = 12;
    config.epochs = 3;
    config.sample_count = 120;
    config.batch_size = 20;
    config.eval_batches = 40;
    const auto result = run_toy_experiment(config);
    CHECK(result.curve.size() == static_cast<size_t>(3 * (120 / 20)));
    REQUIRE(result.stats_by_epoch.size() == 2);  // epochs 0 and 3
    for (const auto& [epoch, stats] : result.stats_by_epoch) {
        CHECK(stats.mean_min <= stats.mean_avg);
        CHECK(stats.mean_avg <= stats.mean_max);
        CHECK(stats.mean_min > 0.0);
    }

    const auto repeat = run_toy_experiment(config);
    REQUIRE(repeat.curve.size() == result.curve.size());
    for (size_t k = 0; k < result.curve.size(); ++k) {
        CHECK(repeat.curve[k].connectivity == result.curve[k].connectivity);
    }
}
