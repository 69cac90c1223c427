#include "ssr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace ssr {

std::string to_string(Method m) {
    switch (m) {
        case Method::Proposed: return "proposed";
        case Method::DlFixedMatrix: return "dl_fixed_matrix";
        case Method::Lasso: return "lasso";
        case Method::GroupLasso: return "group_lasso";
        case Method::SparseGroupLasso: return "sparse_group_lasso";
        case Method::Amp: return "amp";
    }
    throw std::invalid_argument("unknown method");
}

Method method_from_string(const std::string& s) {
    if (s == "proposed") return Method::Proposed;
    if (s == "dl_fixed_matrix") return Method::DlFixedMatrix;
    if (s == "lasso") return Method::Lasso;
    if (s == "group_lasso") return Method::GroupLasso;
    if (s == "sparse_group_lasso") return Method::SparseGroupLasso;
    if (s == "amp") return Method::Amp;
    throw std::invalid_argument("unknown method '" + s + "'");
}

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::LOverN: return "L_over_N";
        case SweepAxis::AccessProbability: return "p";
        case SweepAxis::RatioP1P2: return "ratio_p1_p2";
        case SweepAxis::ConditionalAccess: return "p_u";
    }
    throw std::invalid_argument("unknown sweep axis");
}

SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "L_over_N") return SweepAxis::LOverN;
    if (s == "p") return SweepAxis::AccessProbability;
    if (s == "ratio_p1_p2") return SweepAxis::RatioP1P2;
    if (s == "p_u") return SweepAxis::ConditionalAccess;
    throw std::invalid_argument("unknown sweep axis '" + s + "'");
}

void ExperimentPlan::validate() const {
    train.validate();
    if (methods.empty()) throw std::invalid_argument("ExperimentPlan: no methods");
    if (sweep_values.empty()) throw std::invalid_argument("ExperimentPlan: no sweep values");
    if (output_dir.empty()) throw std::invalid_argument("ExperimentPlan: empty output_dir");
    if (sweep_axis == SweepAxis::RatioP1P2 && scenario.activity_case != ActivityCase::TwoGroup) {
        throw std::invalid_argument("ExperimentPlan: ratio sweep requires the two_group case");
    }
    if (sweep_axis == SweepAxis::ConditionalAccess &&
        scenario.activity_case != ActivityCase::GroupCorrelated) {
        throw std::invalid_argument("ExperimentPlan: p_u sweep requires the group_corr case");
    }
    if (!(sparse_group_mix >= 0.0 && sparse_group_mix <= 1.0)) {
        throw std::invalid_argument("ExperimentPlan: sparse_group_mix outside [0,1]");
    }
    if (lambda_calibration_samples < 1) {
        throw std::invalid_argument("ExperimentPlan: lambda_calibration_samples < 1");
    }
}

void apply_profile(ExperimentPlan& plan, const std::string& profile) {
    if (profile == "desk") {
        plan.sizes = DatasetSizes{50000, 5000, 10000};
        plan.train.max_epochs = 50;
    } else if (profile == "paper") {
        if (plan.scenario.activity_case == ActivityCase::GroupCorrelated) {
            plan.sizes = DatasetSizes{90000, 10000, 100000};
        } else {
            plan.sizes = DatasetSizes{450000, 50000, 10000};
        }
        plan.train.max_epochs = 100000;
        plan.train.learning_rate = 1e-3;
        plan.train.batch_size = 128;
        plan.train.patience = 5;
    } else {
        throw std::invalid_argument("unknown profile '" + profile + "' (expected desk or paper)");
    }
}

double time_per_call(const std::function<void()>& fn, int warmup, int count) {
    if (count < 1) throw std::invalid_argument("time_per_call: count < 1");
    for (int i = 0; i < warmup; ++i) fn();
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < count; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / static_cast<double>(count);
}

double time_per_call_stable(const std::function<void()>& fn, int warmup, int min_calls,
                            double min_total_seconds) {
    if (min_calls < 1) throw std::invalid_argument("time_per_call_stable: min_calls < 1");
    int count = min_calls;
    for (;;) {
        const double per_call = time_per_call(fn, warmup, count);
        if (per_call * count >= min_total_seconds || count >= 1 << 22) return per_call;
        const double needed = min_total_seconds / std::max(per_call, 1e-9);
        count = static_cast<int>(std::min<double>(1 << 22, std::max(needed * 1.2, count * 2.0)));
        warmup = 0;
    }
}

namespace {

ScenarioConfig scenario_for_value(const ExperimentPlan& plan, double value) {
    ScenarioConfig cfg = plan.scenario;
    switch (plan.sweep_axis) {
        case SweepAxis::LOverN:
            cfg.pilot_length = std::max<int>(
                1, static_cast<int>(std::llround(value * cfg.num_devices)));
            break;
        case SweepAxis::AccessProbability:
            cfg.p = value;
            break;
        case SweepAxis::RatioP1P2:
            cfg.ratio_p1_p2 = value;
            break;
        case SweepAxis::ConditionalAccess:
            cfg.p_u = value;
            break;
    }
    return cfg;
}

std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string sweep_tag(const ExperimentPlan& plan, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%g", to_string(plan.sweep_axis).c_str(), value);
    return buf;
}

// Measurements y = A x + z with a per-sample noise stream, so every method
// at one sweep value sees identical samples and identical noise.
std::vector<SplitComplexVector> measure_dataset(const MeasurementMatrix& A, const Dataset& ds,
                                                double sigma2, std::uint64_t seed,
                                                std::string_view noise_tag,
                                                std::size_t limit = 0) {
    const std::size_t count = limit == 0 ? ds.size() : std::min(limit, ds.size());
    std::vector<SplitComplexVector> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = Rng::from_stream(seed, noise_tag, i);
        out.push_back(encoder_forward(A, ds.samples[i].x, sigma2, rng));
    }
    return out;
}

std::vector<BinaryVec> labels_of(const Dataset& ds, std::size_t limit = 0) {
    const std::size_t count = limit == 0 ? ds.size() : std::min(limit, ds.size());
    std::vector<BinaryVec> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(ds.samples[i].alpha);
    return out;
}

// FNV-1a over the sample bytes; logged per sweep value so it is checkable
// that every method saw the same test set.
std::uint64_t dataset_hash(const Dataset& ds) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix_bytes = [&h](const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const Sample& s : ds.samples) {
        mix_bytes(s.x.re.data(), sizeof(double) * static_cast<std::size_t>(s.x.re.size()));
        mix_bytes(s.x.im.data(), sizeof(double) * static_cast<std::size_t>(s.x.im.size()));
        mix_bytes(s.alpha.data(), s.alpha.size());
    }
    return h;
}

struct DecoderEval {
    double error_rate = 1.0;
    double r_star = 0.5;
    double infer_seconds = 0.0;
};

DecoderEval evaluate_decoder_method(const TrainedModel& model, const ScenarioConfig& cfg,
                                    const Dataset& validation, const Dataset& test,
                                    int timing_samples, const std::string& calibration_csv) {
    // Calibrate the hard threshold on validation outputs.
    const auto val_y = measure_dataset(model.matrix, validation, cfg.sigma2, cfg.seed,
                                       "calib_noise");
    std::vector<Vec> outputs;
    outputs.reserve(val_y.size());
    for (const auto& y : val_y) outputs.push_back(decoder_forward(model.decoder, y));
    const ThresholdCalibration calib = calibrate_threshold(outputs, labels_of(validation));
    if (!calibration_csv.empty()) write_calibration_csv(calibration_csv, calib);

    const auto test_y = measure_dataset(model.matrix, test, cfg.sigma2, cfg.seed, "test_noise");
    std::vector<BinaryVec> predictions;
    predictions.reserve(test_y.size());
    for (const auto& y : test_y) predictions.push_back(detect(model.decoder, y, calib.r_star));

    DecoderEval eval;
    eval.r_star = calib.r_star;
    eval.error_rate = error_rate(predictions, labels_of(test));
    if (timing_samples > 0 && !test_y.empty()) {
        std::size_t cursor = 0;
        eval.infer_seconds = time_per_call_stable(
            [&] {
                const BinaryVec hat =
                    detect(model.decoder, test_y[cursor], calib.r_star);
                (void)hat;
                cursor = (cursor + 1) % test_y.size();
            },
            10, std::min<int>(timing_samples, static_cast<int>(test_y.size())));
    }
    return eval;
}

using PerSampleSolver = std::function<SplitComplexVector(const SplitComplexVector& y)>;

struct SolverEval {
    double error_rate = 1.0;
    double tau_star = 0.0;
    double infer_seconds = 0.0;
};

SolverEval evaluate_solver_method(const PerSampleSolver& solver,
                                  const std::vector<SplitComplexVector>& cal_y,
                                  const std::vector<BinaryVec>& cal_labels,
                                  const std::vector<SplitComplexVector>& test_y,
                                  const std::vector<BinaryVec>& test_labels,
                                  int timing_samples, double preset_tau = -1.0) {
    double tau = preset_tau;
    if (tau < 0.0) {
        std::vector<SplitComplexVector> estimates;
        estimates.reserve(cal_y.size());
        for (const auto& y : cal_y) estimates.push_back(solver(y));
        tau = calibrate_magnitude_threshold(estimates, cal_labels).tau_star;
    }
    std::vector<BinaryVec> predictions;
    predictions.reserve(test_y.size());
    for (const auto& y : test_y) predictions.push_back(support_extract(solver(y), tau));

    SolverEval eval;
    eval.tau_star = tau;
    eval.error_rate = error_rate(predictions, test_labels);
    if (timing_samples > 0 && !test_y.empty()) {
        std::size_t cursor = 0;
        eval.infer_seconds = time_per_call_stable(
            [&] {
                const BinaryVec hat = support_extract(solver(test_y[cursor]), tau);
                (void)hat;
                cursor = (cursor + 1) % test_y.size();
            },
            10, std::min<int>(timing_samples, static_cast<int>(test_y.size())));
    }
    return eval;
}

bool method_applicable(Method m, const ScenarioConfig& cfg, std::string& why) {
    if (m == Method::GroupLasso) {
        if (cfg.activity_case != ActivityCase::GroupCorrelated || cfg.p_u != 1.0) {
            why = "group_lasso applies to the group_corr case with p_u = 1";
            return false;
        }
    }
    if (m == Method::SparseGroupLasso) {
        if (cfg.activity_case != ActivityCase::GroupCorrelated || cfg.p_u >= 1.0 ||
            cfg.p_u <= 0.0) {
            why = "sparse_group_lasso applies to the group_corr case with p_u in (0,1)";
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<ResultRow> run_plan(const ExperimentPlan& plan) {
    plan.validate();
    fs::create_directories(plan.output_dir);
    write_plan_file(plan.output_dir + "/plan.txt", plan);

    std::ofstream baseline_csv(plan.output_dir + "/baselines.csv");
    baseline_csv << "method,case,n,l,p,ratio_p1_p2,p_u,group_count,sigma2,"
                    "lambda1,lambda2,threshold,error_rate,mean_solve_seconds\n";

    std::vector<ResultRow> rows;
    for (const double value : plan.sweep_values) {
        const std::string tag = sweep_tag(plan, value);
        const std::string dir = plan.output_dir + "/" + tag;

        ScenarioConfig cfg;
        DatasetBundle data;
        try {
            cfg = scenario_for_value(plan, value);
            cfg.validate();
            fs::create_directories(dir);
            data = build_datasets(cfg, plan.sizes);
        } catch (const std::exception& e) {
            for (const Method m : plan.methods) {
                ResultRow row;
                row.method = to_string(m);
                row.sweep_value = value;
                row.seed = plan.scenario.seed;
                row.status = std::string("failed: ") + e.what();
                rows.push_back(row);
            }
            continue;
        }

        // Shared CN(0,1) pilots: one draw per sweep value, used by every
        // baseline solver and by the frozen-matrix decoder ablation.
        Rng pilot_rng = Rng::from_stream(cfg.seed, "pilots");
        const MeasurementMatrix fixed_pilots =
            random_pilot_matrix(cfg.pilot_length, cfg.num_devices, pilot_rng);

        const std::size_t cal_count =
            std::min<std::size_t>(data.validation.size(),
                                  static_cast<std::size_t>(plan.lambda_calibration_samples));
        const auto cal_y = measure_dataset(fixed_pilots, data.validation, cfg.sigma2, cfg.seed,
                                           "calib_noise", cal_count);
        const auto cal_labels = labels_of(data.validation, cal_count);
        const auto test_y =
            measure_dataset(fixed_pilots, data.test, cfg.sigma2, cfg.seed, "test_noise");
        const auto test_labels = labels_of(data.test);

        {
            std::ofstream manifest(dir + "/manifest.txt");
            manifest << "n = " << cfg.num_devices << "\n"
                     << "l = " << cfg.pilot_length << "\n"
                     << "test_count = " << data.test.size() << "\n"
                     << "test_set_hash = " << std::hex << dataset_hash(data.test) << std::dec
                     << "\n";
        }

        const GroupSpec group_spec{cfg.group_size(), cfg.group_count};

        for (const Method m : plan.methods) {
            ResultRow row;
            row.method = to_string(m);
            row.sweep_value = value;
            row.seed = cfg.seed;
            std::string why;
            if (!method_applicable(m, cfg, why)) {
                row.status = "skipped: " + why;
                rows.push_back(row);
                continue;
            }
            try {
                switch (m) {
                    case Method::Proposed:
                    case Method::DlFixedMatrix: {
                        TrainConfig tc = plan.train;
                        tc.freeze_matrix = (m == Method::DlFixedMatrix);
                        const TrainedModel model =
                            tc.freeze_matrix
                                ? train(data.train, data.validation, tc, cfg, fixed_pilots)
                                : train(data.train, data.validation, tc, cfg);
                        const DecoderEval eval = evaluate_decoder_method(
                            model, cfg, data.validation, data.test, plan.timing_samples,
                            dir + "/" + row.method + "_calibration.csv");
                        save_checkpoint(dir + "/" + row.method + ".ssae",
                                        Checkpoint{model.matrix, model.decoder, eval.r_star});
                        row.error_rate = eval.error_rate;
                        row.threshold = eval.r_star;
                        row.train_seconds = model.log.train_seconds;
                        row.infer_seconds_per_sample = eval.infer_seconds;
                        break;
                    }
                    case Method::Lasso: {
                        const auto grid = default_lambda_grid(fixed_pilots, cal_y);
                        const LambdaSelection sel = select_lambda(
                            [&](const SplitComplexVector& y, double lambda) {
                                LassoConfig lc;
                                lc.lambda = lambda;
                                return lasso_solve(fixed_pilots, y, lc).x;
                            },
                            grid, cal_y, cal_labels);
                        const SolverEval eval = evaluate_solver_method(
                            [&](const SplitComplexVector& y) {
                                LassoConfig lc;
                                lc.lambda = sel.lambda_star;
                                return lasso_solve(fixed_pilots, y, lc).x;
                            },
                            cal_y, cal_labels, test_y, test_labels, plan.timing_samples,
                            sel.tau_star);
                        row.error_rate = eval.error_rate;
                        row.threshold = eval.tau_star;
                        row.infer_seconds_per_sample = eval.infer_seconds;
                        baseline_csv << row.method << "," << to_string(cfg.activity_case) << ","
                                     << cfg.num_devices << "," << cfg.pilot_length << ","
                                     << format_double(cfg.p) << ","
                                     << format_double(cfg.ratio_p1_p2) << ","
                                     << format_double(cfg.p_u) << "," << cfg.group_count << ","
                                     << format_double(cfg.sigma2) << ","
                                     << format_double(sel.lambda_star) << ",0,"
                                     << format_double(eval.tau_star) << ","
                                     << format_double(eval.error_rate) << ","
                                     << format_double(eval.infer_seconds) << "\n";
                        break;
                    }
                    case Method::GroupLasso:
                    case Method::SparseGroupLasso: {
                        const bool sparse = (m == Method::SparseGroupLasso);
                        const auto grid = default_lambda_grid(fixed_pilots, cal_y);
                        auto solve_at = [&](const SplitComplexVector& y, double lambda) {
                            if (sparse) {
                                return sparse_group_lasso_solve(
                                           fixed_pilots, y, group_spec,
                                           plan.sparse_group_mix * lambda,
                                           (1.0 - plan.sparse_group_mix) * lambda)
                                    .x;
                            }
                            return group_lasso_solve(fixed_pilots, y, group_spec, lambda).x;
                        };
                        const LambdaSelection sel =
                            select_lambda(solve_at, grid, cal_y, cal_labels);
                        const SolverEval eval = evaluate_solver_method(
                            [&](const SplitComplexVector& y) {
                                return solve_at(y, sel.lambda_star);
                            },
                            cal_y, cal_labels, test_y, test_labels, plan.timing_samples,
                            sel.tau_star);
                        row.error_rate = eval.error_rate;
                        row.threshold = eval.tau_star;
                        row.infer_seconds_per_sample = eval.infer_seconds;
                        const double l1 = sparse ? plan.sparse_group_mix * sel.lambda_star : 0.0;
                        const double l2 = sparse
                                              ? (1.0 - plan.sparse_group_mix) * sel.lambda_star
                                              : sel.lambda_star;
                        baseline_csv << row.method << "," << to_string(cfg.activity_case) << ","
                                     << cfg.num_devices << "," << cfg.pilot_length << ","
                                     << format_double(cfg.p) << ","
                                     << format_double(cfg.ratio_p1_p2) << ","
                                     << format_double(cfg.p_u) << "," << cfg.group_count << ","
                                     << format_double(cfg.sigma2) << ","
                                     << format_double(l1) << "," << format_double(l2) << ","
                                     << format_double(eval.tau_star) << ","
                                     << format_double(eval.error_rate) << ","
                                     << format_double(eval.infer_seconds) << "\n";
                        break;
                    }
                    case Method::Amp: {
                        AmpConfig ac;
                        ac.sparsity_prior = cfg.p;
                        ac.sigma2 = cfg.sigma2;
                        const SolverEval eval = evaluate_solver_method(
                            [&](const SplitComplexVector& y) {
                                return amp_solve(fixed_pilots, y, ac).x;
                            },
                            cal_y, cal_labels, test_y, test_labels, plan.timing_samples);
                        row.error_rate = eval.error_rate;
                        row.threshold = eval.tau_star;
                        row.infer_seconds_per_sample = eval.infer_seconds;
                        baseline_csv << row.method << "," << to_string(cfg.activity_case) << ","
                                     << cfg.num_devices << "," << cfg.pilot_length << ","
                                     << format_double(cfg.p) << ","
                                     << format_double(cfg.ratio_p1_p2) << ","
                                     << format_double(cfg.p_u) << "," << cfg.group_count << ","
                                     << format_double(cfg.sigma2) << ",0,0,"
                                     << format_double(eval.tau_star) << ","
                                     << format_double(eval.error_rate) << ","
                                     << format_double(eval.infer_seconds) << "\n";
                        break;
                    }
                }
            } catch (const std::exception& e) {
                row.status = std::string("failed: ") + e.what();
            }
            rows.push_back(row);
        }
    }
    write_results_csv(plan.output_dir + "/results.csv", rows);
    return rows;
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << "method,sweep_value,error_rate,threshold,train_seconds,"
          "infer_seconds_per_sample,seed,status\n";
    for (const ResultRow& r : rows) {
        os << r.method << "," << format_double(r.sweep_value) << ","
           << format_double(r.error_rate) << "," << format_double(r.threshold) << ","
           << format_double(r.train_seconds) << ","
           << format_double(r.infer_seconds_per_sample) << "," << r.seed << "," << r.status
           << "\n";
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

ExperimentPlan parse_plan_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open plan file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("plan file line " + std::to_string(lineno) +
                                     ": expected key = value");
        }
        pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    ExperimentPlan plan;
    // The case must be known before a profile can pick Table-style sizes.
    for (const auto& [key, val] : pairs) {
        if (key == "case") plan.scenario.activity_case = activity_case_from_string(val);
    }
    for (const auto& [key, val] : pairs) {
        if (key == "profile") apply_profile(plan, val);
    }
    for (const auto& [key, val] : pairs) {
        if (key == "case" || key == "profile") continue;
        if (key == "n") plan.scenario.num_devices = std::stoi(val);
        else if (key == "l") plan.scenario.pilot_length = std::stoi(val);
        else if (key == "p") plan.scenario.p = std::stod(val);
        else if (key == "ratio_p1_p2") plan.scenario.ratio_p1_p2 = std::stod(val);
        else if (key == "p_u") plan.scenario.p_u = std::stod(val);
        else if (key == "group_count") plan.scenario.group_count = std::stoi(val);
        else if (key == "sigma2") plan.scenario.sigma2 = std::stod(val);
        else if (key == "seed") {
            plan.scenario.seed = std::stoull(val);
            plan.train.seed = plan.scenario.seed;
        } else if (key == "train") plan.sizes.train = std::stoull(val);
        else if (key == "validation") plan.sizes.validation = std::stoull(val);
        else if (key == "test") plan.sizes.test = std::stoull(val);
        else if (key == "q") plan.train.hidden_width = std::stoi(val);
        else if (key == "lr") plan.train.learning_rate = std::stod(val);
        else if (key == "batch") plan.train.batch_size = std::stoi(val);
        else if (key == "epochs") plan.train.max_epochs = std::stoi(val);
        else if (key == "patience") plan.train.patience = std::stoi(val);
        else if (key == "loss_tol") plan.train.loss_change_tol = std::stod(val);
        else if (key == "methods") {
            plan.methods.clear();
            for (const auto& name : split_list(val)) {
                plan.methods.push_back(method_from_string(name));
            }
        } else if (key == "sweep_axis") plan.sweep_axis = sweep_axis_from_string(val);
        else if (key == "sweep_values") {
            plan.sweep_values.clear();
            for (const auto& item : split_list(val)) plan.sweep_values.push_back(std::stod(item));
        } else if (key == "out") plan.output_dir = val;
        else if (key == "lambda_cal_samples") plan.lambda_calibration_samples = std::stoi(val);
        else if (key == "timing_samples") plan.timing_samples = std::stoi(val);
        else if (key == "sparse_group_mix") plan.sparse_group_mix = std::stod(val);
        else throw std::runtime_error("plan file: unknown key '" + key + "'");
    }
    return plan;
}

void write_plan_file(const std::string& path, const ExperimentPlan& plan) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << "case = " << to_string(plan.scenario.activity_case) << "\n";
    os << "n = " << plan.scenario.num_devices << "\n";
    os << "l = " << plan.scenario.pilot_length << "\n";
    os << "p = " << format_double(plan.scenario.p) << "\n";
    os << "ratio_p1_p2 = " << format_double(plan.scenario.ratio_p1_p2) << "\n";
    os << "p_u = " << format_double(plan.scenario.p_u) << "\n";
    os << "group_count = " << plan.scenario.group_count << "\n";
    os << "sigma2 = " << format_double(plan.scenario.sigma2) << "\n";
    os << "seed = " << plan.scenario.seed << "\n";
    os << "train = " << plan.sizes.train << "\n";
    os << "validation = " << plan.sizes.validation << "\n";
    os << "test = " << plan.sizes.test << "\n";
    os << "q = " << plan.train.hidden_width << "\n";
    os << "lr = " << format_double(plan.train.learning_rate) << "\n";
    os << "batch = " << plan.train.batch_size << "\n";
    os << "epochs = " << plan.train.max_epochs << "\n";
    os << "patience = " << plan.train.patience << "\n";
    os << "loss_tol = " << format_double(plan.train.loss_change_tol) << "\n";
    os << "methods = ";
    for (std::size_t i = 0; i < plan.methods.size(); ++i) {
        os << (i ? "," : "") << to_string(plan.methods[i]);
    }
    os << "\n";
    os << "sweep_axis = " << to_string(plan.sweep_axis) << "\n";
    os << "sweep_values = ";
    for (std::size_t i = 0; i < plan.sweep_values.size(); ++i) {
        os << (i ? "," : "") << format_double(plan.sweep_values[i]);
    }
    os << "\n";
    os << "out = " << plan.output_dir << "\n";
    os << "lambda_cal_samples = " << plan.lambda_calibration_samples << "\n";
    os << "timing_samples = " << plan.timing_samples << "\n";
    os << "sparse_group_mix = " << format_double(plan.sparse_group_mix) << "\n";
}

}  // namespace ssr
