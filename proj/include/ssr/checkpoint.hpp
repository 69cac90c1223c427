#pragma once

#include <string>

#include "ssr/autoencoder.hpp"
#include "ssr/types.hpp"

namespace ssr {

struct Checkpoint {
    MeasurementMatrix matrix;
    DecoderParams decoder;
    double r_star = 0.5;  // 0.5 placeholder until calibration runs

    Eigen::Index num_devices() const { return matrix.cols(); }
    Eigen::Index pilot_length() const { return matrix.rows(); }
    Eigen::Index hidden_width() const { return decoder.hidden_width(); }
};

// Binary checkpoint, little-endian:
//   "SSAE1" | u32 version | u32 N | u32 L | u32 Q
//   | a_re, a_im, theta1, b1, theta2, b2, theta3, b3 row-major f64
//   | f64 r_star
// Round-trips are bitwise exact.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Thrown on malformed files; the message names the offending field.
class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ssr
