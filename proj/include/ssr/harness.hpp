#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ssr/autoencoder.hpp"
#include "ssr/baselines.hpp"
#include "ssr/checkpoint.hpp"
#include "ssr/datagen.hpp"
#include "ssr/threshold.hpp"
#include "ssr/types.hpp"

namespace ssr {

enum class Method {
    Proposed,
    DlFixedMatrix,
    Lasso,
    GroupLasso,
    SparseGroupLasso,
    Amp,
};

std::string to_string(Method m);
Method method_from_string(const std::string& s);

enum class SweepAxis { LOverN, AccessProbability, RatioP1P2, ConditionalAccess };

std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

struct ExperimentPlan {
    ScenarioConfig scenario;
    TrainConfig train;
    DatasetSizes sizes;
    std::vector<Method> methods{Method::Proposed, Method::Lasso, Method::Amp};
    SweepAxis sweep_axis = SweepAxis::LOverN;
    std::vector<double> sweep_values{0.3};
    std::string output_dir = "out";
    // Validation subset used for lambda/threshold search on the slow solvers.
    int lambda_calibration_samples = 500;
    // Test samples used for per-sample timing (0 disables timing).
    int timing_samples = 200;
    // Equal split of the overall lambda between the l1 and group penalties.
    double sparse_group_mix = 0.5;

    void validate() const;
};

struct ResultRow {
    std::string method;
    double sweep_value = 0.0;
    double error_rate = 1.0;
    double threshold = 0.0;  // r* for decoder methods, tau* for solvers
    double train_seconds = 0.0;
    double infer_seconds_per_sample = 0.0;
    std::uint64_t seed = 0;
    std::string status = "ok";  // "ok", "skipped: ...", or "failed: ..."
};

// Named size/epoch presets: "desk" (default) and "paper" (Table-style scale).
void apply_profile(ExperimentPlan& plan, const std::string& profile);

// Execute the full plan: per sweep value, build datasets, train the requested
// decoder methods, calibrate thresholds, run the solver baselines on shared
// CN(0,1) pilots, evaluate everything on the same test measurements, and write
// results.csv plus checkpoints and calibration reports under output_dir.
std::vector<ResultRow> run_plan(const ExperimentPlan& plan);

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);

// Average seconds per call of fn over `count` calls after `warmup` calls.
double time_per_call(const std::function<void()>& fn, int warmup, int count);

// As above, but grows the call count until the timed window covers at least
// `min_total_seconds`, so microsecond-scale paths measure reliably.
double time_per_call_stable(const std::function<void()>& fn, int warmup, int min_calls,
                            double min_total_seconds = 0.05);

// Key-value plan file ("key = value", '#' comments); see README for the schema.
ExperimentPlan parse_plan_file(const std::string& path);
void write_plan_file(const std::string& path, const ExperimentPlan& plan);

}  // namespace ssr
