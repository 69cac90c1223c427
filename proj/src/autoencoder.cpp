#include "ssr/autoencoder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace ssr {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

Mat clip_scores(Mat s) {
    return s.array().min(1.0 - kOutputClip).max(kOutputClip).matrix();
}

void check_same_shape(const Mat& a, const Mat& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }
}

}  // namespace

DecoderParams DecoderParams::zeros(int n, int pilot_len, int q) {
    DecoderParams w;
    w.theta1 = Mat::Zero(q, 2 * pilot_len);
    w.b1 = Vec::Zero(q);
    w.theta2 = Mat::Zero(q, q);
    w.b2 = Vec::Zero(q);
    w.theta3 = Mat::Zero(n, q);
    w.b3 = Vec::Zero(n);
    return w;
}

DecoderParams DecoderParams::glorot(int n, int pilot_len, int q, Rng& rng) {
    DecoderParams w = DecoderParams::zeros(n, pilot_len, q);
    auto fill = [&rng](Mat& m) {
        const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                m(r, c) = (2.0 * rng.uniform() - 1.0) * bound;
            }
        }
    };
    fill(w.theta1);
    fill(w.theta2);
    fill(w.theta3);
    return w;
}

Gradients Gradients::zeros(int n, int pilot_len, int q) {
    Gradients g;
    g.a_re = Mat::Zero(pilot_len, n);
    g.a_im = Mat::Zero(pilot_len, n);
    g.theta1 = Mat::Zero(q, 2 * pilot_len);
    g.b1 = Vec::Zero(q);
    g.theta2 = Mat::Zero(q, q);
    g.b2 = Vec::Zero(q);
    g.theta3 = Mat::Zero(n, q);
    g.b3 = Vec::Zero(n);
    return g;
}

double Gradients::squared_norm() const {
    return a_re.squaredNorm() + a_im.squaredNorm() + theta1.squaredNorm() + b1.squaredNorm() +
           theta2.squaredNorm() + b2.squaredNorm() + theta3.squaredNorm() + b3.squaredNorm();
}

AdamState AdamState::init(int n, int pilot_len, int q, const AdamConfig& config) {
    AdamState st;
    st.m = Gradients::zeros(n, pilot_len, q);
    st.v = Gradients::zeros(n, pilot_len, q);
    st.t = 0;
    st.config = config;
    return st;
}

void TrainConfig::validate() const {
    if (hidden_width < 0) throw std::invalid_argument("TrainConfig: hidden_width < 0");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate <= 0");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size < 1");
    if (max_epochs < 1) throw std::invalid_argument("TrainConfig: max_epochs < 1");
    if (patience < 1) throw std::invalid_argument("TrainConfig: patience < 1");
    if (loss_change_tol < 0.0) throw std::invalid_argument("TrainConfig: loss_change_tol < 0");
}

SplitComplexVector encoder_forward(const MeasurementMatrix& A, const SplitComplexVector& x,
                                   double sigma2, Rng& rng) {
    if (sigma2 < 0.0) throw std::invalid_argument("encoder_forward: negative sigma2");
    SplitComplexVector y = complex_matvec(A, x);
    if (sigma2 > 0.0) {
        const NoiseDraw noise = gen_noise(static_cast<int>(A.rows()), sigma2, rng);
        y.re += noise.z.re;
        y.im += noise.z.im;
    }
    return y;
}

Mat encoder_forward_batch(const MeasurementMatrix& A, const Mat& x_re, const Mat& x_im,
                          double sigma2, Rng& rng) {
    if (sigma2 < 0.0) throw std::invalid_argument("encoder_forward_batch: negative sigma2");
    check_same_shape(x_re, x_im, "encoder_forward_batch");
    if (x_re.rows() != A.cols()) {
        throw std::invalid_argument("encoder_forward_batch: signal dim mismatch");
    }
    const Eigen::Index pilot_len = A.rows();
    const Eigen::Index batch = x_re.cols();
    Mat u(2 * pilot_len, batch);
    u.topRows(pilot_len) = A.re * x_re - A.im * x_im;
    u.bottomRows(pilot_len) = A.im * x_re + A.re * x_im;
    if (sigma2 > 0.0) {
        const double scale = std::sqrt(sigma2 / 2.0);
        for (Eigen::Index b = 0; b < batch; ++b) {
            for (Eigen::Index l = 0; l < pilot_len; ++l) {
                auto [zr, zi] = rng.normal_pair();
                u(l, b) += zr * scale;
                u(pilot_len + l, b) += zi * scale;
            }
        }
    }
    return u;
}

Vec decoder_forward(const DecoderParams& w, const SplitComplexVector& y) {
    DecoderWorkspace ws;
    return decoder_forward(w, y, ws);
}

const Vec& decoder_logits(const DecoderParams& w, const SplitComplexVector& y,
                          DecoderWorkspace& ws) {
    if (2 * y.size() != w.input_dim()) {
        throw std::invalid_argument("decoder_forward: measurement length mismatch");
    }
    const Eigen::Index pilot_len = y.size();
    ws.u.resize(2 * pilot_len);
    ws.u.head(pilot_len) = y.re;
    ws.u.tail(pilot_len) = y.im;
    ws.h1.resize(w.hidden_width());
    ws.h1.noalias() = w.theta1 * ws.u;
    ws.h1 += w.b1;
    ws.h1 = ws.h1.cwiseMax(0.0);
    ws.h2.resize(w.hidden_width());
    ws.h2.noalias() = w.theta2 * ws.h1;
    ws.h2 += w.b2;
    ws.h2 = ws.h2.cwiseMax(0.0);
    ws.scores.resize(w.output_dim());
    ws.scores.noalias() = w.theta3 * ws.h2;
    ws.scores += w.b3;
    return ws.scores;
}

const Vec& decoder_forward(const DecoderParams& w, const SplitComplexVector& y,
                           DecoderWorkspace& ws) {
    decoder_logits(w, y, ws);
    double* s = ws.scores.data();
    for (Eigen::Index k = 0; k < ws.scores.size(); ++k) {
        const double v = 1.0 / (1.0 + std::exp(-s[k]));
        s[k] = v < kOutputClip ? kOutputClip : (v > 1.0 - kOutputClip ? 1.0 - kOutputClip : v);
    }
    return ws.scores;
}

ForwardCache decoder_forward_batch(const DecoderParams& w, Mat u) {
    if (u.rows() != w.input_dim()) {
        throw std::invalid_argument("decoder_forward_batch: input dim mismatch");
    }
    ForwardCache c;
    c.u = std::move(u);
    c.z1 = (w.theta1 * c.u).colwise() + w.b1;
    c.h1 = c.z1.array().max(0.0).matrix();
    c.z2 = (w.theta2 * c.h1).colwise() + w.b2;
    c.h2 = c.z2.array().max(0.0).matrix();
    c.z3 = (w.theta3 * c.h2).colwise() + w.b3;
    c.alpha_tilde = clip_scores((1.0 / (1.0 + (-c.z3.array()).exp())).matrix());
    return c;
}

double cross_entropy_loss(const Mat& alpha_tilde, const Mat& alpha) {
    check_same_shape(alpha_tilde, alpha, "cross_entropy_loss");
    const auto p = alpha_tilde.array();
    const auto a = alpha.array();
    const double total = -(a * p.log() + (1.0 - a) * (1.0 - p).log()).sum();
    return total / static_cast<double>(alpha_tilde.size());
}

Gradients backward(const DecoderParams& w, const Mat& x_re, const Mat& x_im,
                   const ForwardCache& cache, const Mat& alpha, bool freeze_matrix) {
    check_same_shape(cache.alpha_tilde, alpha, "backward");
    const Eigen::Index n = w.output_dim();
    const Eigen::Index pilot_len = w.input_dim() / 2;
    const Eigen::Index q = w.hidden_width();
    const double scale = 1.0 / static_cast<double>(alpha.size());

    Gradients g = Gradients::zeros(static_cast<int>(n), static_cast<int>(pilot_len),
                                   static_cast<int>(q));

    // Sigmoid + cross-entropy collapse to (p - alpha) on unclipped entries;
    // clipped entries sit on the flat part of the clip and get zero gradient.
    const auto p = cache.alpha_tilde.array();
    const auto interior =
        (p > kOutputClip && p < 1.0 - kOutputClip).cast<double>();
    Mat g3 = (interior * (p - alpha.array()) * scale).matrix();

    g.theta3 = g3 * cache.h2.transpose();
    g.b3 = g3.rowwise().sum();

    Mat g2 = (w.theta3.transpose() * g3).array() * (cache.z2.array() > 0.0).cast<double>();
    g.theta2 = g2 * cache.h1.transpose();
    g.b2 = g2.rowwise().sum();

    Mat g1 = (w.theta2.transpose() * g2).array() * (cache.z1.array() > 0.0).cast<double>();
    g.theta1 = g1 * cache.u.transpose();
    g.b1 = g1.rowwise().sum();

    if (!freeze_matrix) {
        const Mat gu = w.theta1.transpose() * g1;  // 2L x B
        const auto gy_re = gu.topRows(pilot_len);
        const auto gy_im = gu.bottomRows(pilot_len);
        // Re(y) = Ar xr - Ai xi, Im(y) = Ai xr + Ar xi (noise is constant).
        g.a_re = gy_re * x_re.transpose() + gy_im * x_im.transpose();
        g.a_im = gy_im * x_re.transpose() - gy_re * x_im.transpose();
    }
    return g;
}

namespace {

template <typename Block>
void adam_update_block(Block& param, Block& m, Block& v, const Block& grad,
                       const AdamConfig& cfg, double bias1, double bias2) {
    m.array() = cfg.beta1 * m.array() + (1.0 - cfg.beta1) * grad.array();
    v.array() = cfg.beta2 * v.array() + (1.0 - cfg.beta2) * grad.array().square();
    param.array() -=
        cfg.learning_rate * (m.array() / bias1) / ((v.array() / bias2).sqrt() + cfg.eps);
}

}  // namespace

void adam_step(AdamState& state, MeasurementMatrix& A, DecoderParams& w,
               const Gradients& grads) {
    state.t += 1;
    const double bias1 = 1.0 - std::pow(state.config.beta1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(state.config.beta2, static_cast<double>(state.t));
    adam_update_block(A.re, state.m.a_re, state.v.a_re, grads.a_re, state.config, bias1, bias2);
    adam_update_block(A.im, state.m.a_im, state.v.a_im, grads.a_im, state.config, bias1, bias2);
    adam_update_block(w.theta1, state.m.theta1, state.v.theta1, grads.theta1, state.config,
                      bias1, bias2);
    adam_update_block(w.b1, state.m.b1, state.v.b1, grads.b1, state.config, bias1, bias2);
    adam_update_block(w.theta2, state.m.theta2, state.v.theta2, grads.theta2, state.config,
                      bias1, bias2);
    adam_update_block(w.b2, state.m.b2, state.v.b2, grads.b2, state.config, bias1, bias2);
    adam_update_block(w.theta3, state.m.theta3, state.v.theta3, grads.theta3, state.config,
                      bias1, bias2);
    adam_update_block(w.b3, state.m.b3, state.v.b3, grads.b3, state.config, bias1, bias2);
}

MeasurementMatrix project_pilot_power(const MeasurementMatrix& A) {
    const double target = std::sqrt(static_cast<double>(A.rows()));
    MeasurementMatrix out = A;
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
        const double norm = A.column_norm(c);
        if (norm == 0.0) {
            throw std::invalid_argument("project_pilot_power: zero pilot column " +
                                        std::to_string(c));
        }
        const double scale = target / norm;
        out.re.col(c) *= scale;
        out.im.col(c) *= scale;
    }
    return out;
}

MeasurementMatrix random_pilot_matrix(int pilot_len, int n, Rng& rng) {
    MeasurementMatrix A;
    A.re = Mat(pilot_len, n);
    A.im = Mat(pilot_len, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < pilot_len; ++r) {
            auto [a, b] = rng.normal_pair();
            A.re(r, c) = a * kInvSqrt2;
            A.im(r, c) = b * kInvSqrt2;
        }
    }
    return A;
}

namespace {

struct BatchView {
    Mat x_re;
    Mat x_im;
    Mat alpha;
};

BatchView gather_batch(const Dataset& ds, const std::vector<std::size_t>& order,
                       std::size_t begin, std::size_t end) {
    const Eigen::Index n = ds.signal_dim();
    const Eigen::Index batch = static_cast<Eigen::Index>(end - begin);
    BatchView v{Mat(n, batch), Mat(n, batch), Mat(n, batch)};
    for (std::size_t i = begin; i < end; ++i) {
        const Sample& s = ds.samples[order[i]];
        const Eigen::Index col = static_cast<Eigen::Index>(i - begin);
        v.x_re.col(col) = s.x.re;
        v.x_im.col(col) = s.x.im;
        for (Eigen::Index k = 0; k < n; ++k) {
            v.alpha(k, col) = static_cast<double>(s.alpha[static_cast<std::size_t>(k)]);
        }
    }
    return v;
}

double evaluate_loss(const Dataset& ds, const MeasurementMatrix& A, const DecoderParams& w,
                     double sigma2, int batch_size, Rng& rng,
                     std::vector<std::size_t>& identity_order) {
    double total = 0.0;
    const std::size_t count = ds.size();
    for (std::size_t begin = 0; begin < count; begin += static_cast<std::size_t>(batch_size)) {
        const std::size_t end = std::min(count, begin + static_cast<std::size_t>(batch_size));
        const BatchView b = gather_batch(ds, identity_order, begin, end);
        const Mat u = encoder_forward_batch(A, b.x_re, b.x_im, sigma2, rng);
        const ForwardCache cache = decoder_forward_batch(w, u);
        total += cross_entropy_loss(cache.alpha_tilde, b.alpha) *
                 static_cast<double>(end - begin);
    }
    return total / static_cast<double>(count);
}

void check_power_invariant(const MeasurementMatrix& A) {
    const double target = std::sqrt(static_cast<double>(A.rows()));
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
        if (std::abs(A.column_norm(c) - target) > 1e-9 * target) {
            throw std::logic_error("pilot power invariant violated during training");
        }
    }
}

}  // namespace

TrainedModel train(const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg,
                   const ScenarioConfig& scenario,
                   const std::optional<MeasurementMatrix>& initial_matrix) {
    cfg.validate();
    scenario.validate();
    if (train_set.size() == 0 || val_set.size() == 0) {
        throw std::invalid_argument("train: empty dataset");
    }
    const Eigen::Index n = train_set.signal_dim();
    if (n != val_set.signal_dim() || n != scenario.num_devices) {
        throw std::invalid_argument("train: datasets and scenario disagree on N");
    }
    const int pilot_len = scenario.pilot_length;
    const int q = cfg.resolved_hidden_width(pilot_len);

    Rng rng_matrix = Rng::from_stream(cfg.seed, "init_matrix");
    MeasurementMatrix A = initial_matrix
                              ? *initial_matrix
                              : random_pilot_matrix(pilot_len, static_cast<int>(n), rng_matrix);
    if (A.rows() != pilot_len || A.cols() != n) {
        throw std::invalid_argument("train: initial matrix shape mismatch");
    }
    if (!cfg.freeze_matrix) A = project_pilot_power(A);

    Rng rng_decoder = Rng::from_stream(cfg.seed, "init_decoder");
    DecoderParams w = DecoderParams::glorot(static_cast<int>(n), pilot_len, q, rng_decoder);
    AdamState adam = AdamState::init(static_cast<int>(n), pilot_len, q,
                                     AdamConfig{.learning_rate = cfg.learning_rate});

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> val_order(val_set.size());
    std::iota(val_order.begin(), val_order.end(), 0);

    TrainLog log;
    MeasurementMatrix best_matrix = A;
    DecoderParams best_decoder = w;
    double best_val = std::numeric_limits<double>::infinity();
    int stall_epochs = 0;

    const auto t_start = std::chrono::steady_clock::now();
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        Rng rng_shuffle = Rng::from_stream(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch));
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng_shuffle.uniform() * static_cast<double>(i));
            std::swap(order[i - 1], order[std::min(j, i - 1)]);
        }

        Rng rng_noise = Rng::from_stream(cfg.seed, "train_noise", static_cast<std::uint64_t>(epoch));
        double epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < order.size();
             begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
            const BatchView b = gather_batch(train_set, order, begin, end);
            const Mat u = encoder_forward_batch(A, b.x_re, b.x_im, scenario.sigma2, rng_noise);
            const ForwardCache cache = decoder_forward_batch(w, u);
            epoch_loss += cross_entropy_loss(cache.alpha_tilde, b.alpha) *
                          static_cast<double>(end - begin);
            const Gradients grads =
                backward(w, b.x_re, b.x_im, cache, b.alpha, cfg.freeze_matrix);
            adam_step(adam, A, w, grads);
            if (!cfg.freeze_matrix) A = project_pilot_power(A);
        }
        epoch_loss /= static_cast<double>(train_set.size());
        if (!cfg.freeze_matrix) check_power_invariant(A);

        Rng rng_val = Rng::from_stream(cfg.seed, "val_noise");
        const double val_loss =
            evaluate_loss(val_set, A, w, scenario.sigma2, cfg.batch_size, rng_val, val_order);

        if (!std::isfinite(epoch_loss) || !std::isfinite(val_loss)) {
            throw TrainingFailure("training diverged at epoch " + std::to_string(epoch),
                                  std::move(log));
        }

        if (val_loss < best_val - cfg.loss_change_tol) {
            best_val = val_loss;
            best_matrix = A;
            best_decoder = w;
            log.best_epoch = epoch;
            stall_epochs = 0;
        } else {
            ++stall_epochs;
        }
        log.epochs.push_back({epoch, epoch_loss, val_loss, best_val});
        if (stall_epochs >= cfg.patience) break;
    }
    log.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    return TrainedModel{std::move(best_matrix), std::move(best_decoder), std::move(log)};
}

}  // namespace ssr
