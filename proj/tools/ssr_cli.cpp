// Command-line experiment runner for the sparse support recovery toolkit.
//
// Subcommands: gen, train, calibrate, eval, sweep, time. See README.md.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ssr/autoencoder.hpp"
#include "ssr/baselines.hpp"
#include "ssr/checkpoint.hpp"
#include "ssr/datagen.hpp"
#include "ssr/harness.hpp"
#include "ssr/threshold.hpp"

namespace {

struct ScenarioFlags {
    std::string case_name = "iid";
    int n = 40;
    int l = 12;
    double p = 0.1;
    double ratio = 1.0;
    double p_u = 1.0;
    int group_count = 1;
    double sigma2 = 0.1;
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--case", case_name, "activity case: iid, two_group, group_corr");
        cmd->add_option("--n", n, "number of devices N");
        cmd->add_option("--l", l, "pilot length L");
        cmd->add_option("--p", p, "access probability p");
        cmd->add_option("--ratio", ratio, "p1/p2 ratio (two_group)");
        cmd->add_option("--pu", p_u, "conditional access probability (group_corr)");
        cmd->add_option("--groups", group_count, "group count (group_corr)");
        cmd->add_option("--sigma2", sigma2, "noise variance");
        cmd->add_option("--seed", seed, "experiment seed");
    }

    ssr::ScenarioConfig to_config() const {
        ssr::ScenarioConfig cfg;
        cfg.activity_case = ssr::activity_case_from_string(case_name);
        cfg.num_devices = n;
        cfg.pilot_length = l;
        cfg.p = p;
        cfg.ratio_p1_p2 = ratio;
        cfg.p_u = p_u;
        cfg.group_count = group_count;
        cfg.sigma2 = sigma2;
        cfg.seed = seed;
        return cfg;
    }
};

struct TrainFlags {
    int q = 0;
    double lr = 1e-3;
    int batch = 128;
    int epochs = 50;
    int patience = 5;
    double loss_tol = 1e-5;
    bool freeze_matrix = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--q", q, "decoder hidden width (0 = 8*L)");
        cmd->add_option("--lr", lr, "ADAM learning rate");
        cmd->add_option("--batch", batch, "mini-batch size");
        cmd->add_option("--epochs", epochs, "max epochs");
        cmd->add_option("--patience", patience, "early-stopping patience (epochs)");
        cmd->add_option("--loss-tol", loss_tol, "validation improvement tolerance");
        cmd->add_flag("--freeze-matrix", freeze_matrix,
                      "train the decoder only, on fixed CN(0,1) pilots");
    }

    ssr::TrainConfig to_config(std::uint64_t seed) const {
        ssr::TrainConfig cfg;
        cfg.hidden_width = q;
        cfg.learning_rate = lr;
        cfg.batch_size = batch;
        cfg.max_epochs = epochs;
        cfg.patience = patience;
        cfg.loss_change_tol = loss_tol;
        cfg.freeze_matrix = freeze_matrix;
        cfg.seed = seed;
        return cfg;
    }
};

void write_training_log(const std::string& path, const ssr::TrainLog& log) {
    std::ofstream os(path);
    os << "epoch,train_loss,val_loss,best_val_loss\n";
    for (const auto& e : log.epochs) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g\n", e.epoch, e.train_loss,
                      e.val_loss, e.best_val_loss);
        os << buf;
    }
}

std::vector<ssr::SplitComplexVector> measurements_for(const ssr::MeasurementMatrix& A,
                                                      const ssr::Dataset& ds, double sigma2,
                                                      std::uint64_t seed,
                                                      const std::string& tag) {
    std::vector<ssr::SplitComplexVector> out;
    out.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        ssr::Rng rng = ssr::Rng::from_stream(seed, tag, i);
        out.push_back(ssr::encoder_forward(A, ds.samples[i].x, sigma2, rng));
    }
    return out;
}

std::vector<ssr::BinaryVec> dataset_labels(const ssr::Dataset& ds) {
    std::vector<ssr::BinaryVec> out;
    out.reserve(ds.size());
    for (const auto& s : ds.samples) out.push_back(s.alpha);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measurement-matrix + decoder design for sparse support recovery"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate train/validation/test datasets");
    ScenarioFlags gen_scenario;
    gen_scenario.attach(gen);
    std::string gen_out = "data";
    std::string gen_profile = "desk";
    std::size_t gen_train = 0, gen_val = 0, gen_test = 0;
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--profile", gen_profile, "size profile: desk or paper");
    gen->add_option("--train-size", gen_train, "override train sample count");
    gen->add_option("--val-size", gen_val, "override validation sample count");
    gen->add_option("--test-size", gen_test, "override test sample count");

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "train the auto-encoder");
    ScenarioFlags train_scenario;
    TrainFlags train_flags;
    train_scenario.attach(train_cmd);
    train_flags.attach(train_cmd);
    std::string train_out = "out";
    std::string train_profile = "desk";
    train_cmd->add_option("--out", train_out, "output directory");
    train_cmd->add_option("--profile", train_profile, "size profile: desk or paper");

    // ---- calibrate ----
    auto* cal = app.add_subcommand("calibrate", "calibrate the hard threshold of a checkpoint");
    std::string cal_model, cal_data, cal_out = "calibration.csv";
    double cal_sigma2 = 0.1;
    std::uint64_t cal_seed = 0;
    cal->add_option("--model", cal_model, "checkpoint (.ssae)")->required();
    cal->add_option("--data", cal_data, "calibration dataset (.ssup)")->required();
    cal->add_option("--sigma2", cal_sigma2, "noise variance");
    cal->add_option("--seed", cal_seed, "noise seed");
    cal->add_option("--out", cal_out, "calibration CSV path");

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a test dataset");
    std::string eval_model, eval_data;
    double eval_sigma2 = 0.1;
    std::uint64_t eval_seed = 0;
    eval->add_option("--model", eval_model, "checkpoint (.ssae)")->required();
    eval->add_option("--data", eval_data, "test dataset (.ssup)")->required();
    eval->add_option("--sigma2", eval_sigma2, "noise variance");
    eval->add_option("--seed", eval_seed, "noise seed");

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "run a full experiment plan");
    std::string sweep_plan;
    std::string sweep_out;
    sweep->add_option("--plan", sweep_plan, "plan file (key = value)")->required();
    sweep->add_option("--out", sweep_out, "override the plan's output directory");

    // ---- time ----
    auto* time_cmd = app.add_subcommand("time", "per-sample inference timing");
    ScenarioFlags time_scenario;
    time_scenario.attach(time_cmd);
    std::string time_model;
    std::vector<std::string> time_methods{"proposed", "lasso", "amp"};
    int time_samples = 200;
    time_cmd->add_option("--model", time_model, "checkpoint for the proposed method")
        ->required();
    time_cmd->add_option("--methods", time_methods, "methods to time")->delimiter(',');
    time_cmd->add_option("--samples", time_samples, "timed samples per method");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            ssr::ScenarioConfig cfg = gen_scenario.to_config();
            cfg.validate();
            ssr::DatasetSizes sizes;
            if (gen_profile == "paper") {
                sizes = cfg.activity_case == ssr::ActivityCase::GroupCorrelated
                            ? ssr::DatasetSizes{90000, 10000, 100000}
                            : ssr::DatasetSizes{450000, 50000, 10000};
            } else if (gen_profile != "desk") {
                throw std::runtime_error("unknown profile '" + gen_profile + "'");
            }
            if (gen_train) sizes.train = gen_train;
            if (gen_val) sizes.validation = gen_val;
            if (gen_test) sizes.test = gen_test;
            std::filesystem::create_directories(gen_out);
            const ssr::DatasetBundle bundle = ssr::build_datasets(cfg, sizes);
            ssr::write_dataset(gen_out + "/train.ssup", bundle.train, cfg.activity_case);
            ssr::write_dataset(gen_out + "/validation.ssup", bundle.validation,
                               cfg.activity_case);
            ssr::write_dataset(gen_out + "/test.ssup", bundle.test, cfg.activity_case);
            std::cout << "wrote " << sizes.train << "/" << sizes.validation << "/" << sizes.test
                      << " samples to " << gen_out << "\n";
        } else if (*train_cmd) {
            ssr::ScenarioConfig cfg = train_scenario.to_config();
            cfg.validate();
            ssr::DatasetSizes sizes;
            if (train_profile == "paper") {
                sizes = cfg.activity_case == ssr::ActivityCase::GroupCorrelated
                            ? ssr::DatasetSizes{90000, 10000, 100000}
                            : ssr::DatasetSizes{450000, 50000, 10000};
            }
            const ssr::DatasetBundle bundle = ssr::build_datasets(cfg, sizes);
            ssr::TrainConfig tc = train_flags.to_config(cfg.seed);
            if (train_profile == "paper") tc.max_epochs = 100000;
            std::optional<ssr::MeasurementMatrix> init;
            if (tc.freeze_matrix) {
                ssr::Rng pilot_rng = ssr::Rng::from_stream(cfg.seed, "pilots");
                init = ssr::random_pilot_matrix(cfg.pilot_length, cfg.num_devices, pilot_rng);
            }
            const ssr::TrainedModel model = ssr::train(bundle.train, bundle.validation, tc, cfg, init);
            std::filesystem::create_directories(train_out);
            ssr::save_checkpoint(train_out + "/model.ssae",
                                 ssr::Checkpoint{model.matrix, model.decoder, 0.5});
            write_training_log(train_out + "/training_log.csv", model.log);
            std::cout << "trained " << model.log.epochs.size() << " epochs, best epoch "
                      << model.log.best_epoch << "\n";
            if (!model.log.epochs.empty()) {
                std::printf("final val loss %.6g (best %.6g), %.1f s\n",
                            model.log.epochs.back().val_loss,
                            model.log.epochs[model.log.best_epoch - 1].val_loss,
                            model.log.train_seconds);
            }
            std::cout << "checkpoint: " << train_out << "/model.ssae\n";
        } else if (*cal) {
            ssr::Checkpoint ckpt = ssr::load_checkpoint(cal_model);
            const ssr::LoadedDataset data = ssr::read_dataset(cal_data);
            if (data.dataset.signal_dim() != ckpt.num_devices()) {
                throw std::runtime_error("dataset N does not match checkpoint N");
            }
            const auto ys = measurements_for(ckpt.matrix, data.dataset, cal_sigma2, cal_seed,
                                             "calib_noise");
            std::vector<ssr::Vec> outputs;
            outputs.reserve(ys.size());
            for (const auto& y : ys) outputs.push_back(ssr::decoder_forward(ckpt.decoder, y));
            const ssr::ThresholdCalibration calib =
                ssr::calibrate_threshold(outputs, dataset_labels(data.dataset));
            ssr::write_calibration_csv(cal_out, calib);
            ckpt.r_star = calib.r_star;
            ssr::save_checkpoint(cal_model, ckpt);
            std::printf("r* = %.2f, P_E* = %.6g (checkpoint updated, report: %s)\n",
                        calib.r_star, calib.pe_star, cal_out.c_str());
        } else if (*eval) {
            const ssr::Checkpoint ckpt = ssr::load_checkpoint(eval_model);
            const ssr::LoadedDataset data = ssr::read_dataset(eval_data);
            if (data.dataset.signal_dim() != ckpt.num_devices()) {
                throw std::runtime_error("dataset N does not match checkpoint N");
            }
            const auto ys = measurements_for(ckpt.matrix, data.dataset, eval_sigma2, eval_seed,
                                             "test_noise");
            std::vector<ssr::BinaryVec> predictions;
            predictions.reserve(ys.size());
            for (const auto& y : ys) {
                predictions.push_back(ssr::detect(ckpt.decoder, y, ckpt.r_star));
            }
            const double pe = ssr::error_rate(predictions, dataset_labels(data.dataset));
            std::printf("samples: %zu  r*: %.2f  error rate: %.6g\n", ys.size(), ckpt.r_star,
                        pe);
        } else if (*sweep) {
            ssr::ExperimentPlan plan = ssr::parse_plan_file(sweep_plan);
            if (!sweep_out.empty()) plan.output_dir = sweep_out;
            const auto rows = ssr::run_plan(plan);
            for (const auto& row : rows) {
                std::printf("%-20s %s=%-8g error=%-10.6g [%s]\n", row.method.c_str(),
                            ssr::to_string(plan.sweep_axis).c_str(), row.sweep_value,
                            row.error_rate, row.status.c_str());
            }
            std::cout << "results: " << plan.output_dir << "/results.csv\n";
        } else if (*time_cmd) {
            ssr::ScenarioConfig cfg = time_scenario.to_config();
            cfg.validate();
            const ssr::Checkpoint ckpt = ssr::load_checkpoint(time_model);
            if (ckpt.num_devices() != cfg.num_devices ||
                ckpt.pilot_length() != cfg.pilot_length) {
                throw std::runtime_error("checkpoint shape does not match scenario (N, L)");
            }
            const ssr::Dataset test = ssr::build_dataset(cfg, ssr::DatasetRole::Test,
                                                         static_cast<std::size_t>(time_samples));
            ssr::Rng pilot_rng = ssr::Rng::from_stream(cfg.seed, "pilots");
            const ssr::MeasurementMatrix pilots =
                ssr::random_pilot_matrix(cfg.pilot_length, cfg.num_devices, pilot_rng);
            for (const std::string& name : time_methods) {
                const ssr::Method m = ssr::method_from_string(name);
                const ssr::MeasurementMatrix& matrix =
                    (m == ssr::Method::Proposed) ? ckpt.matrix : pilots;
                const auto ys =
                    measurements_for(matrix, test, cfg.sigma2, cfg.seed, "test_noise");
                std::size_t cursor = 0;
                double seconds = 0.0;
                if (m == ssr::Method::Proposed || m == ssr::Method::DlFixedMatrix) {
                    seconds = ssr::time_per_call(
                        [&] {
                            (void)ssr::detect(ckpt.decoder, ys[cursor], ckpt.r_star);
                            cursor = (cursor + 1) % ys.size();
                        },
                        10, time_samples);
                } else if (m == ssr::Method::Lasso) {
                    const auto grid = ssr::default_lambda_grid(pilots, ys);
                    ssr::LassoConfig lc;
                    lc.lambda = grid[grid.size() / 2];
                    seconds = ssr::time_per_call(
                        [&] {
                            (void)ssr::magnitude_support(
                                ssr::lasso_solve(pilots, ys[cursor], lc).x, 0.1);
                            cursor = (cursor + 1) % ys.size();
                        },
                        10, time_samples);
                } else if (m == ssr::Method::Amp) {
                    ssr::AmpConfig ac;
                    ac.sparsity_prior = cfg.p;
                    ac.sigma2 = cfg.sigma2;
                    seconds = ssr::time_per_call(
                        [&] {
                            (void)ssr::magnitude_support(
                                ssr::amp_solve(pilots, ys[cursor], ac).x, 0.1);
                            cursor = (cursor + 1) % ys.size();
                        },
                        10, time_samples);
                } else {
                    std::printf("%-20s (timing not supported)\n", name.c_str());
                    continue;
                }
                std::printf("%-20s %.3e s/sample\n", name.c_str(), seconds);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
