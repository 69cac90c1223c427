#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssr/datagen.hpp"
#include "ssr/rng.hpp"
#include "ssr/types.hpp"

namespace ssr {

// Soft outputs are clipped to [kOutputClip, 1 - kOutputClip] before the
// cross-entropy so the loss stays finite; the backward pass treats clipped
// entries as flat (zero gradient).
inline constexpr double kOutputClip = 1e-7;

// Weights/biases of the 4-layer decoder:
//   u in R^{2L} -> ReLU(theta1 u + b1) -> ReLU(theta2 h1 + b2)
//   -> Sigmoid(theta3 h2 + b3) in (0,1)^N
struct DecoderParams {
    Mat theta1;  // Q x 2L
    Vec b1;      // Q
    Mat theta2;  // Q x Q
    Vec b2;      // Q
    Mat theta3;  // N x Q
    Vec b3;      // N

    Eigen::Index hidden_width() const { return theta1.rows(); }
    Eigen::Index input_dim() const { return theta1.cols(); }  // 2L
    Eigen::Index output_dim() const { return theta3.rows(); } // N

    static DecoderParams zeros(int n, int pilot_len, int q);
    // Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases.
    static DecoderParams glorot(int n, int pilot_len, int q, Rng& rng);
};

// Batched forward state kept for backprop. Columns are samples.
struct ForwardCache {
    Mat u;   // 2L x B  (rows 0..L-1 = Re(y), rows L..2L-1 = Im(y))
    Mat z1;  // Q x B
    Mat h1;  // Q x B
    Mat z2;  // Q x B
    Mat h2;  // Q x B
    Mat z3;  // N x B
    Mat alpha_tilde;  // N x B, clipped sigmoid outputs
};

struct Gradients {
    Mat a_re;  // L x N
    Mat a_im;  // L x N
    Mat theta1;
    Vec b1;
    Mat theta2;
    Vec b2;
    Mat theta3;
    Vec b3;

    static Gradients zeros(int n, int pilot_len, int q);
    double squared_norm() const;
};

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    Gradients m;
    Gradients v;
    std::int64_t t = 0;
    AdamConfig config;

    static AdamState init(int n, int pilot_len, int q, const AdamConfig& config = {});
};

struct TrainConfig {
    int hidden_width = 0;  // Q; 0 picks the default 8*L
    double learning_rate = 1e-3;
    int batch_size = 128;
    int max_epochs = 100000;
    int patience = 5;
    double loss_change_tol = 1e-5;
    bool freeze_matrix = false;
    std::uint64_t seed = 0;

    void validate() const;
    int resolved_hidden_width(int pilot_len) const {
        return hidden_width > 0 ? hidden_width : 8 * pilot_len;
    }
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double best_val_loss = 0.0;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    double train_seconds = 0.0;
};

struct TrainedModel {
    MeasurementMatrix matrix;
    DecoderParams decoder;
    TrainLog log;
};

// Thrown when the loss becomes non-finite; carries the last finite log.
class TrainingFailure : public std::runtime_error {
public:
    TrainingFailure(const std::string& what, TrainLog log)
        : std::runtime_error(what), log_(std::move(log)) {}
    const TrainLog& log() const { return log_; }

private:
    TrainLog log_;
};

// --- forward / loss / backward -------------------------------------------

// Noisy linear measurement y = A x + z; sigma2 == 0 returns the noiseless product.
SplitComplexVector encoder_forward(const MeasurementMatrix& A, const SplitComplexVector& x,
                                   double sigma2, Rng& rng);

// Batched encoder: columns of x_re/x_im are samples; returns (y_re, y_im) stacked
// into the decoder input layout u = [Re(y); Im(y)].
Mat encoder_forward_batch(const MeasurementMatrix& A, const Mat& x_re, const Mat& x_im,
                          double sigma2, Rng& rng);

// Per-sample decoder pass; returns clipped soft scores in (0,1)^N.
Vec decoder_forward(const DecoderParams& w, const SplitComplexVector& y);

// Reusable buffers for the per-sample pass; lets the detection path run
// allocation-free (this is the code that gets timed per sample).
struct DecoderWorkspace {
    Vec u;
    Vec h1;
    Vec h2;
    Vec scores;
};
const Vec& decoder_forward(const DecoderParams& w, const SplitComplexVector& y,
                           DecoderWorkspace& ws);

// Pre-sigmoid outputs of the final layer (monotone in alpha_tilde).
const Vec& decoder_logits(const DecoderParams& w, const SplitComplexVector& y,
                          DecoderWorkspace& ws);

// Batched decoder pass with cache for backprop.
ForwardCache decoder_forward_batch(const DecoderParams& w, Mat u);

// Mean binary cross-entropy over all N*B entries. Inputs are clipped scores.
double cross_entropy_loss(const Mat& alpha_tilde, const Mat& alpha);

// Analytic gradients of cross_entropy_loss w.r.t. every entry of (A, W).
// x_re/x_im are the batch inputs that produced the cache; the noise realizations
// inside cache.u are treated as constants. freeze_matrix zeroes the A gradients.
Gradients backward(const DecoderParams& w, const Mat& x_re, const Mat& x_im,
                   const ForwardCache& cache, const Mat& alpha, bool freeze_matrix = false);

// One ADAM update on (A, W) in place, with bias correction.
void adam_step(AdamState& state, MeasurementMatrix& A, DecoderParams& w,
               const Gradients& grads);

// Rescale every complex column of A to Euclidean norm sqrt(L).
MeasurementMatrix project_pilot_power(const MeasurementMatrix& A);

// Draw an L x N matrix with i.i.d. CN(0,1) entries (baseline pilot distribution).
MeasurementMatrix random_pilot_matrix(int pilot_len, int n, Rng& rng);

// Mini-batch training with early stopping on the validation loss. When
// initial_matrix is given it seeds A (and in freeze_matrix mode is returned
// untouched); otherwise A is drawn CN(0,1) from the config seed.
TrainedModel train(const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg,
                   const ScenarioConfig& scenario,
                   const std::optional<MeasurementMatrix>& initial_matrix = std::nullopt);

}  // namespace ssr
