#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ssr/autoencoder.hpp"
#include "ssr/types.hpp"

namespace ssr {

struct ThresholdCalibration {
    double r_star = 0.5;
    double pe_star = 1.0;
    std::vector<std::pair<double, double>> grid;  // (r, P_E(r))
};

// Elementwise indicator alpha_hat[n] = 1 iff alpha_tilde[n] >= r.
BinaryVec hard_threshold(const Vec& alpha_tilde, double r);

// Mean per-entry disagreement between two batches of binary vectors.
double error_rate(const std::vector<BinaryVec>& alpha_hat,
                  const std::vector<BinaryVec>& alpha);

// Evaluate P_E(r) on the grid r in {0.01, ..., 0.99}; ties pick the smallest r.
ThresholdCalibration calibrate_threshold(const std::vector<Vec>& outputs,
                                         const std::vector<BinaryVec>& labels);

// End-to-end detection: hard_threshold(decoder_forward(w, y), r).
BinaryVec detect(const DecoderParams& w, const SplitComplexVector& y, double r);

// CSV with one (r, P_E) row per grid point and a trailing summary row.
void write_calibration_csv(const std::string& path, const ThresholdCalibration& calib);

}  // namespace ssr
