#pragma once

#include <cstdint>
#include <string>

#include "ssr/rng.hpp"
#include "ssr/types.hpp"

namespace ssr {

enum class ActivityCase : std::uint32_t {
    Iid = 0,             // each device active i.i.d. with probability p
    TwoGroup = 1,        // two equal halves with probabilities p1, p2
    GroupCorrelated = 2  // Bernoulli(p_g) per group, then Bernoulli(p_u) per device
};

std::string to_string(ActivityCase c);
ActivityCase activity_case_from_string(const std::string& s);

struct ScenarioConfig {
    int num_devices = 40;  // N
    int pilot_length = 12; // L
    ActivityCase activity_case = ActivityCase::Iid;
    double p = 0.1;            // marginal access probability
    double ratio_p1_p2 = 1.0;  // TwoGroup: p1/p2
    double p_u = 1.0;          // GroupCorrelated: conditional access probability
    int group_count = 1;       // GroupCorrelated
    double sigma2 = 0.1;       // complex noise variance
    std::uint64_t seed = 0;

    // TwoGroup: p1 = 2p*ratio/(1+ratio), p2 = 2p/(1+ratio), so (p1+p2)/2 = p.
    double p1() const { return 2.0 * p * ratio_p1_p2 / (1.0 + ratio_p1_p2); }
    double p2() const { return 2.0 * p / (1.0 + ratio_p1_p2); }
    // GroupCorrelated: p = p_u * p_g.
    double p_g() const { return p / p_u; }
    int group_size() const { return num_devices / group_count; }

    // Throws std::invalid_argument when the case invariants are violated.
    void validate() const;
};

struct NoiseDraw {
    SplitComplexVector z;
};

struct DatasetSizes {
    std::size_t train = 50000;
    std::size_t validation = 5000;
    std::size_t test = 10000;
};

// Binary activity vector for one slot, per the scenario's case.
BinaryVec gen_activity(const ScenarioConfig& cfg, Rng& rng);

// Rayleigh fading: each entry CN(0,1), i.e. re/im ~ N(0, 1/2).
SplitComplexVector gen_channel(int n, Rng& rng);

// x_n = alpha_n * h_n with the drawn alpha as label.
Sample gen_sample(const ScenarioConfig& cfg, Rng& rng);

// AWGN: complex entries CN(0, sigma2), i.e. re/im ~ N(0, sigma2/2).
NoiseDraw gen_noise(int len, double sigma2, Rng& rng);

struct DatasetBundle {
    Dataset train;
    Dataset validation;
    Dataset test;
};

// Three datasets drawn from disjoint hash-derived streams of cfg.seed.
DatasetBundle build_datasets(const ScenarioConfig& cfg, const DatasetSizes& sizes);

// Single dataset for one role (used for streaming generation / CLI `gen`).
Dataset build_dataset(const ScenarioConfig& cfg, DatasetRole role, std::size_t count);

// Flat binary dataset file, little-endian:
//   "SSUP1" | u32 N | u32 count | u32 case | per sample: N x (f64 re, f64 im), N x u8 alpha
void write_dataset(const std::string& path, const Dataset& ds, ActivityCase activity_case);
struct LoadedDataset {
    Dataset dataset;
    ActivityCase activity_case;
};
LoadedDataset read_dataset(const std::string& path);

}  // namespace ssr
