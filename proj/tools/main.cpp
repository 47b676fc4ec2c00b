#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "phconn/analysis.hpp"
#include "phconn/filtration.hpp"
#include "phconn/geometry.hpp"
#include "phconn/gradcheck.hpp"
#include "phconn/io.hpp"
#include "phconn/loss.hpp"
#include "phconn/neural.hpp"
#include "phconn/oneclass.hpp"
#include "phconn/parallel.hpp"
#include "phconn/persistence.hpp"

namespace {

using namespace phconn;

struct Options {
    int threads = default_thread_count();
    uint64_t seed = 0;
    std::string norm = "l1";
    bool header = false;

    std::string in_path;
    std::string out_path;
    std::string out_dir;
    std::string data_path;
    std::string model_path;
    std::string model_out;
    std::string fit_path;
    std::string positive_path;
    std::string negative_path;
    std::string dump_reduced;
    std::string dump_complex;
    std::string sizes = "32,64,128";
    std::string hidden = "32";
    std::string curve_out;

    double eta = 2.0;
    double lambda = 1.0;
    double alpha = 2.0;
    double beta = 2.0;
    double eps = 2.0;
    double ae_learning_rate = 0.001;
    double toy_learning_rate = 0.002;
    double eta_override = -1.0;
    int m = 5;
    int fit_count = 120;
    int runs = 5;
    int repetitions = 5;
    int branches = 1;
    int branch_dim = 2;
    bool grad = false;

    // Per-subcommand knobs whose defaults differ.
    int gc_trials = 200, gc_batch = 12, gc_dim = 4;
    int toy_epochs = 60, toy_batch = 50;
    int ae_epochs = 50, ae_batch = 100;
    int bounds_b = 100, bounds_dim = 2;
    int lemma_b = 3, lemma_dim = 2, lemma_trials = 1000;
    int bench_dim = 10;
};

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        values.push_back(std::stoi(item));
    }
    if (values.empty()) {
        throw std::runtime_error("expected a comma-separated list of integers");
    }
    return values;
}

void write_resolved_config(const CLI::App& app, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << app.config_to_str(true, true);
}

int run_barcode(const Options& opt, const CLI::App& app) {
    const auto cloud = read_cloud_csv(opt.in_path, norm_from_string(opt.norm), opt.header);
    const auto complex = build_vr(cloud);
    const auto reduction = reduce_parallel(boundary_matrix(complex), opt.threads);
    const auto barcode = barcode_from_reduced(reduction.matrix, complex);

    // Cross-check against the union-find engine before emitting anything.
    const auto reference = persistence_unionfind(complex);
    if (reference.events.size() != barcode.events.size()) {
        throw std::runtime_error("internal error: persistence engines disagree");
    }
    for (size_t k = 0; k < barcode.events.size(); ++k) {
        if (reference.events[k].i != barcode.events[k].i ||
            reference.events[k].j != barcode.events[k].j ||
            reference.events[k].killed_vertex != barcode.events[k].killed_vertex) {
            throw std::runtime_error("internal error: persistence engines disagree");
        }
    }

    std::cout << format_barcode(barcode);
    if (!opt.dump_reduced.empty()) {
        std::ofstream out(opt.dump_reduced);
        out << reduced_to_json(reduction.matrix) << '\n';
        write_resolved_config(app, opt.dump_reduced + ".config.ini");
    }
    if (!opt.dump_complex.empty()) {
        std::ofstream out(opt.dump_complex);
        out << complex_to_json(complex) << '\n';
    }
    return 0;
}

int run_loss(const Options& opt) {
    const auto cloud = read_cloud_csv(opt.in_path, norm_from_string(opt.norm), opt.header);
    if (opt.grad) {
        const auto result = connectivity_grad(cloud, opt.eta);
        std::cout << format_double(result.value) << '\n';
        for (const auto& row : result.gradient) {
            for (size_t c = 0; c < row.size(); ++c) {
                std::cout << (c > 0 ? "," : "") << format_double(row[c]);
            }
            std::cout << '\n';
        }
    } else {
        std::cout << format_double(connectivity_loss(cloud, opt.eta).value) << '\n';
    }
    return 0;
}

int run_grad_check(const Options& opt) {
    const auto point_report = point_gradient_check(
        opt.gc_batch, opt.gc_dim, norm_from_string(opt.norm), opt.eta, opt.gc_trials, opt.seed);
    std::cout << "point_gradients: " << grad_check_text(point_report);
    const auto param_report = parameter_gradient_check(opt.gc_trials, opt.seed);
    std::cout << "parameter_gradients: " << grad_check_text(param_report);
    return 0;
}

int run_train_toy(const Options& opt, const CLI::App& app) {
    ToyConfig config;
    config.seed = opt.seed;
    config.eta = opt.eta;
    config.epochs = opt.toy_epochs;
    config.batch_size = opt.toy_batch;
    config.learning_rate = opt.toy_learning_rate;
    config.norm = norm_from_string(opt.norm);
    config.out_dir = opt.out_dir;
    const auto result = run_toy_experiment(config);
    if (!opt.out_dir.empty()) {
        write_resolved_config(app, (std::filesystem::path(opt.out_dir) / "config.ini").string());
    }
    for (const auto& [epoch, stats] : result.stats_by_epoch) {
        std::cout << "epoch " << epoch << ": mean_min=" << format_double(stats.mean_min)
                  << " mean_avg=" << format_double(stats.mean_avg)
                  << " mean_max=" << format_double(stats.mean_max) << '\n';
    }
    return 0;
}

int run_train_ae(const Options& opt, const CLI::App& app) {
    const auto data = read_csv_rows(opt.data_path, opt.header);
    if (data.empty()) {
        throw std::runtime_error("'" + opt.data_path + "' contains no samples");
    }
    AutoencoderSpec spec;
    spec.input_dim = static_cast<int>(data.front().size());
    for (const int width : parse_int_list(opt.hidden)) {
        spec.encoder_hidden.push_back(width);
    }
    spec.branches = opt.branches;
    spec.branch_dim = opt.branch_dim;
    spec.seed = opt.seed;
    BranchedAutoencoder net(spec);

    TrainConfig config;
    config.eta = opt.eta;
    config.lambda = opt.lambda;
    config.batch_size = opt.ae_batch;
    config.epochs = opt.ae_epochs;
    config.learning_rate = opt.ae_learning_rate;
    config.norm = norm_from_string(opt.norm);
    config.seed = opt.seed;

    const auto records = train_autoencoder(net, data, config);
    if (records.empty() && config.epochs > 0) {
        std::cerr << "warning: dataset smaller than one batch; no updates were applied\n";
    }
    save_autoencoder(opt.model_out, net, config.eta, config.norm);
    write_resolved_config(app, opt.model_out + ".config.ini");
    if (!opt.curve_out.empty()) {
        std::ofstream out(opt.curve_out);
        out << "iteration,epoch,reconstruction_loss,connectivity_loss\n";
        for (const auto& record : records) {
            out << record.iteration << ',' << record.epoch << ','
                << format_double(record.reconstruction) << ','
                << format_double(record.connectivity) << '\n';
        }
    }
    if (!records.empty()) {
        std::cout << "final reconstruction=" << format_double(records.back().reconstruction)
                  << " connectivity=" << format_double(records.back().connectivity) << '\n';
    }
    return 0;
}

int run_score(const Options& opt, const CLI::App& app) {
    const auto saved = load_autoencoder(opt.model_path);
    const auto fit_samples = read_csv_rows(opt.fit_path, opt.header);
    const auto queries = read_csv_rows(opt.in_path, opt.header);
    const double eta = opt.eta_override >= 0.0 ? opt.eta_override : saved.trained_eta;
    const auto model = fit_oneclass(saved.net, fit_samples, eta);
    std::ostringstream out;
    for (const auto& query : queries) {
        out << oneclass_score(model, saved.net, query) << '\n';
    }
    if (opt.out_path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream file(opt.out_path);
        file << out.str();
        write_resolved_config(app, opt.out_path + ".config.ini");
    }
    return 0;
}

int run_eval_auc(const Options& opt) {
    const auto positives = read_score_csv(opt.positive_path);
    const auto negatives = read_score_csv(opt.negative_path);
    std::cout << format_double(evaluate_auc(positives, negatives)) << '\n';
    return 0;
}

int run_oneclass_eval(const Options& opt, const CLI::App& app) {
    const auto saved = load_autoencoder(opt.model_path);
    const auto dataset = read_labeled_csv(opt.data_path, opt.header);
    const double eta = opt.eta_override >= 0.0 ? opt.eta_override : saved.trained_eta;
    const auto report = one_vs_all(saved.net, dataset.samples, dataset.labels, opt.fit_count,
                                   eta, opt.seed, opt.runs);
    for (const auto& warning : report.warnings) {
        std::cerr << "warning: " << warning << '\n';
    }
    const std::string csv = one_vs_all_csv(report);
    if (opt.out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream file(opt.out_path);
        file << csv;
        write_resolved_config(app, opt.out_path + ".config.ini");
    }
    return 0;
}

int run_bounds(const Options& opt) {
    const AnnulusSpec annulus{opt.alpha, opt.beta, opt.bounds_dim};
    std::cout << "entropy_bound\t" << format_double(entropy_bound(annulus, opt.eps)) << '\n';
    std::cout << "separation_threshold\t"
              << separation_threshold(opt.bounds_b, opt.alpha, opt.beta, opt.eta, opt.bounds_dim)
              << '\n';
    std::cout << "batch_size_condition\t"
              << format_double(batch_size_condition(opt.alpha, opt.beta, opt.bounds_dim)) << '\n';
    return 0;
}

int run_verify_lemma1(const Options& opt) {
    const auto report =
        verify_lemma1(opt.m, opt.lemma_b, opt.lemma_dim, opt.lemma_trials, opt.seed, opt.threads);
    std::cout << lemma1_report_text(report);
    return report.conclusion_violations == 0 ? 0 : 2;
}

int run_bench_reduce(const Options& opt) {
    const auto rows =
        bench_reduction(parse_int_list(opt.sizes), opt.bench_dim, opt.repetitions, opt.seed,
                        opt.threads);
    std::cout << bench_to_csv(rows);
    for (const auto& row : rows) {
        if (!row.engines_agree) {
            throw std::runtime_error("bench-reduce: engines disagreed on at least one trial");
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Persistent-homology connectivity control for learned representations"};
    app.require_subcommand(1);
    app.set_config("--config");
    app.allow_config_extras(CLI::config_extras_mode::error);

    Options opt;
    app.add_option("--threads", opt.threads,
                   "worker threads for parallel sections (PHCONN_THREADS overrides the default)");

    const auto add_seed = [&opt](CLI::App* cmd) {
        cmd->add_option("--seed", opt.seed, "random seed");
    };
    const auto add_norm = [&opt](CLI::App* cmd) {
        cmd->add_option("--norm", opt.norm, "distance norm: l1 or l2")
            ->check(CLI::IsMember({"l1", "l2"}));
    };
    const auto add_header = [&opt](CLI::App* cmd) {
        cmd->add_flag("--header", opt.header, "skip one CSV header line");
    };

    auto* barcode = app.add_subcommand("barcode", "persistence barcode of a point-cloud CSV");
    barcode->add_option("--in", opt.in_path, "point cloud CSV")->required();
    add_norm(barcode);
    add_header(barcode);
    add_seed(barcode);
    barcode->add_option("--dump-reduced", opt.dump_reduced, "write the reduced matrix as JSON");
    barcode->add_option("--dump-complex", opt.dump_complex, "write the filtered complex as JSON");

    auto* loss = app.add_subcommand("loss", "connectivity loss of a point-cloud CSV");
    loss->add_option("--in", opt.in_path, "point cloud CSV")->required();
    loss->add_option("--eta", opt.eta, "target merge distance");
    add_norm(loss);
    add_header(loss);
    add_seed(loss);
    loss->add_flag("--grad", opt.grad, "also print the gradient as CSV rows");

    auto* grad_check = app.add_subcommand("grad-check", "finite-difference gradient harness");
    grad_check->add_option("--trials", opt.gc_trials, "random trials per check");
    grad_check->add_option("--batch-size", opt.gc_batch, "points per cloud");
    grad_check->add_option("--n", opt.gc_dim, "point dimension");
    grad_check->add_option("--eta", opt.eta, "target merge distance");
    add_norm(grad_check);
    add_seed(grad_check);

    auto* train_toy = app.add_subcommand("train-toy", "Gaussian-mixture connectivity training");
    add_seed(train_toy);
    train_toy->add_option("--eta", opt.eta, "target merge distance");
    train_toy->add_option("--epochs", opt.toy_epochs, "training epochs");
    train_toy->add_option("--batch-size", opt.toy_batch, "training batch size");
    train_toy->add_option("--lr", opt.toy_learning_rate, "Adam learning rate");
    add_norm(train_toy);
    train_toy->add_option("--out-dir", opt.out_dir, "output directory")->required();

    auto* train_ae = app.add_subcommand("train-ae", "train a branched autoencoder");
    train_ae->add_option("--data", opt.data_path, "training samples CSV")->required();
    train_ae->add_option("--branches", opt.branches, "latent branches");
    train_ae->add_option("--branch-dim", opt.branch_dim, "dimension per branch");
    train_ae->add_option("--lambda", opt.lambda, "connectivity loss weight");
    train_ae->add_option("--eta", opt.eta, "target merge distance");
    train_ae->add_option("--epochs", opt.ae_epochs, "training epochs");
    train_ae->add_option("--batch-size", opt.ae_batch, "training batch size");
    train_ae->add_option("--lr", opt.ae_learning_rate, "Adam learning rate");
    train_ae->add_option("--hidden", opt.hidden, "encoder hidden widths, comma separated");
    add_norm(train_ae);
    add_header(train_ae);
    add_seed(train_ae);
    train_ae->add_option("--model-out", opt.model_out, "model JSON path")->required();
    train_ae->add_option("--curve-out", opt.curve_out, "loss curve CSV path");

    auto* score = app.add_subcommand("score", "one-class scores for query samples");
    score->add_option("--model", opt.model_path, "autoencoder model JSON")->required();
    score->add_option("--fit", opt.fit_path, "in-class samples CSV")->required();
    score->add_option("--in", opt.in_path, "query samples CSV")->required();
    score->add_option("--out", opt.out_path, "scores CSV (default: stdout)");
    score->add_option("--eta", opt.eta_override, "scoring radius (default: the model's)")
        ->check(CLI::NonNegativeNumber);
    add_header(score);
    add_seed(score);

    auto* eval_auc = app.add_subcommand("eval-auc", "AUC from two score files");
    eval_auc->add_option("--positive", opt.positive_path, "positive scores CSV")->required();
    eval_auc->add_option("--negative", opt.negative_path, "negative scores CSV")->required();
    add_seed(eval_auc);

    auto* oneclass_eval =
        app.add_subcommand("oneclass-eval", "one-vs-all AUC table over a labeled CSV");
    oneclass_eval->add_option("--model", opt.model_path, "autoencoder model JSON")->required();
    oneclass_eval->add_option("--data", opt.data_path, "labeled CSV, last column class label")
        ->required();
    oneclass_eval->add_option("--m", opt.fit_count, "samples per one-class model");
    oneclass_eval->add_option("--runs", opt.runs, "independent sample draws");
    oneclass_eval->add_option("--eta", opt.eta_override, "scoring radius (default: the model's)")
        ->check(CLI::NonNegativeNumber);
    oneclass_eval->add_option("--out", opt.out_path, "AUC table CSV (default: stdout)");
    add_header(oneclass_eval);
    add_seed(oneclass_eval);

    auto* bounds = app.add_subcommand("bounds", "entropy bound, separation threshold, batch-size condition");
    bounds->add_option("--alpha", opt.alpha, "inner radius / smallest merge distance")->required();
    bounds->add_option("--beta", opt.beta, "outer radius / largest merge distance")->required();
    bounds->add_option("--eta", opt.eta, "target merge distance");
    bounds->add_option("--eps", opt.eps, "separation scale");
    bounds->add_option("--n", opt.bounds_dim, "latent dimension")->required();
    bounds->add_option("--b", opt.bounds_b, "batch size");
    add_seed(bounds);

    auto* lemma1 = app.add_subcommand("verify-lemma1", "randomized annulus-density oracle");
    lemma1->add_option("--m", opt.m, "cloud size")->required();
    lemma1->add_option("--b", opt.lemma_b, "subset size")->required();
    lemma1->add_option("--n", opt.lemma_dim, "point dimension");
    lemma1->add_option("--trials", opt.lemma_trials, "random clouds");
    add_seed(lemma1);

    auto* bench = app.add_subcommand("bench-reduce", "reduction engine benchmark");
    bench->add_option("--sizes", opt.sizes, "batch sizes, comma separated");
    bench->add_option("--n", opt.bench_dim, "point dimension");
    bench->add_option("--reps", opt.repetitions, "repetitions per size");
    add_seed(bench);

    for (auto* subcommand : app.get_subcommands([](const CLI::App*) { return true; })) {
        subcommand->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& error) {
        app.exit(error);
        return 1;
    }

    try {
        if (app.got_subcommand(barcode)) {
            return run_barcode(opt, app);
        }
        if (app.got_subcommand(loss)) {
            return run_loss(opt);
        }
        if (app.got_subcommand(grad_check)) {
            return run_grad_check(opt);
        }
        if (app.got_subcommand(train_toy)) {
            return run_train_toy(opt, app);
        }
        if (app.got_subcommand(train_ae)) {
            return run_train_ae(opt, app);
        }
        if (app.got_subcommand(score)) {
            return run_score(opt, app);
        }
        if (app.got_subcommand(eval_auc)) {
            return run_eval_auc(opt);
        }
        if (app.got_subcommand(oneclass_eval)) {
            return run_oneclass_eval(opt, app);
        }
        if (app.got_subcommand(bounds)) {
            return run_bounds(opt);
        }
        if (app.got_subcommand(lemma1)) {
            return run_verify_lemma1(opt);
        }
        if (app.got_subcommand(bench)) {
            return run_bench_reduce(opt);
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 2;
    }
    return 1;
}
